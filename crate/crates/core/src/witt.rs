//! Truncated Witt vectors over the rings of `poly`.
//!
//! The universal addition polynomials `S_n(X_0..X_n, Y_0..Y_n)` are computed
//! from the ghost identities
//! `sum_i p^i S_i^{p^{n-i}} = sum_i p^i (X_i^{p^{n-i}} + Y_i^{p^{n-i}})`.
//! Working modulo `p^{n+1}` is exact here: `S_i^{p^{n-i}} mod p^{n-i+1}` only
//! depends on `S_i mod p`, so the already reduced lower polynomials suffice.
//! Divisibility of the numerator by `p^n` is checked before dividing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::poly::{Ring, SparsePoly, TowerRing};

/// Exponents of `X_0..X_7` in slots 0..8 and `Y_0..Y_7` in slots 8..16.
pub type Exps = [u8; 16];

const CACHE_MAGIC: &str = "zptower-witt-sums v1";

#[inline]
fn xv(i: usize) -> usize {
    i
}
#[inline]
fn yv(i: usize) -> usize {
    8 + i
}

/// Polynomial in the `X`/`Y` variables with coefficients in `[0, p)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntPoly {
    pub terms: Vec<(Exps, u32)>,
}

impl IntPoly {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &Exps) -> u32 {
        self.terms.iter().find(|(e, _)| e == exps).map_or(0, |t| t.1)
    }

    /// Textual form such as `1 * X1^1 + 1 * X0^1 * Y0^1`.
    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (t, (e, c)) in self.terms.iter().enumerate() {
            if t > 0 {
                s.push_str(" + ");
            }
            let _ = write!(s, "{c}");
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    let name = if v < 8 { format!("X{v}") } else { format!("Y{}", v - 8) };
                    let _ = write!(s, " * {name}^{k}");
                }
            }
        }
        s
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Cache(format!("malformed polynomial {s:?}"));
        let mut terms = Vec::new();
        if s.trim() == "0" {
            return Ok(IntPoly { terms });
        }
        for term in s.split(" + ") {
            let mut parts = term.split(" * ");
            let c: u32 = parts.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
            let mut e = [0u8; 16];
            for part in parts {
                let (name, k) = part.split_once('^').ok_or_else(bad)?;
                let k: u8 = k.parse().map_err(|_| bad())?;
                let idx: usize = name[1..].parse().map_err(|_| bad())?;
                if idx >= 8 {
                    return Err(bad());
                }
                match &name[..1] {
                    "X" => e[xv(idx)] = k,
                    "Y" => e[yv(idx)] = k,
                    _ => return Err(bad()),
                }
            }
            terms.push((e, c));
        }
        Ok(IntPoly { terms })
    }
}

type ModPoly = HashMap<Exps, u64>;

fn add_exps(a: &Exps, b: &Exps) -> Exps {
    let mut out = [0u8; 16];
    for i in 0..16 {
        out[i] = a[i].checked_add(b[i]).expect("Witt exponent overflow");
    }
    out
}

fn mod_mul(a: &ModPoly, b: &ModPoly, m: u64) -> ModPoly {
    let mut out: ModPoly = HashMap::with_capacity(a.len() * 2);
    for (ea, &ca) in a {
        for (eb, &cb) in b {
            let e = add_exps(ea, eb);
            let slot = out.entry(e).or_insert(0);
            *slot = (*slot + ca * cb) % m;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn mod_square(a: &ModPoly, m: u64) -> ModPoly {
    let terms: Vec<(&Exps, u64)> = a.iter().map(|(e, &c)| (e, c)).collect();
    let mut out: ModPoly = HashMap::with_capacity(terms.len() * terms.len() / 2 + 1);
    for (i, &(ei, ci)) in terms.iter().enumerate() {
        let slot = out.entry(add_exps(ei, ei)).or_insert(0);
        *slot = (*slot + ci * ci) % m;
        for &(ej, cj) in &terms[i + 1..] {
            let slot = out.entry(add_exps(ei, ej)).or_insert(0);
            *slot = (*slot + 2 * ci * cj) % m;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn mod_pow_p(a: &ModPoly, p: u64, m: u64) -> ModPoly {
    match p {
        2 => mod_square(a, m),
        _ => {
            // a^p = (a^2)^{(p-1)/2} * a
            let sq = mod_square(a, m);
            let mut r = a.clone();
            for _ in 0..(p - 1) / 2 {
                r = mod_mul(&r, &sq, m);
            }
            r
        }
    }
}

fn monomial_power(var: usize, e: u64) -> Exps {
    let mut x = [0u8; 16];
    x[var] = u8::try_from(e).expect("Witt exponent overflow");
    x
}

/// Maximal supported truncation length for a prime.
pub fn max_len(p: u32) -> usize {
    match p {
        2 => 8,
        3 => 6,
        5 => 4,
        _ => 2,
    }
}

/// Universal addition polynomials `S_0..S_{len-1}` reduced mod p.
pub fn addition_polynomials(p: u32, len: usize) -> Result<Vec<IntPoly>> {
    if len == 0 || len > max_len(p) {
        return Err(Error::WittLength { p, len });
    }
    let pp = p as u64;
    let big = pp.pow(len as u32);
    let mut sums: Vec<IntPoly> = Vec::with_capacity(len);
    // powers[i][j] = S_i^{p^j} mod p^len
    let mut powers: Vec<Vec<ModPoly>> = Vec::new();
    for n in 0..len {
        let m = pp.pow(n as u32 + 1);
        let mut acc: ModPoly = HashMap::new();
        for i in 0..=n {
            let w = pp.pow(i as u32);
            let e = pp.pow((n - i) as u32);
            *acc.entry(monomial_power(xv(i), e)).or_insert(0) += w;
            *acc.entry(monomial_power(yv(i), e)).or_insert(0) += w;
        }
        for (i, chain) in powers.iter_mut().enumerate() {
            let j = n - i;
            while chain.len() <= j {
                let next = mod_pow_p(chain.last().expect("chain starts at S_i"), pp, big);
                chain.push(next);
            }
            let w = pp.pow(i as u32);
            for (e, &c) in &chain[j] {
                let slot = acc.entry(*e).or_insert(0);
                *slot = (*slot + m - (w * c) % m) % m;
            }
        }
        let pn = pp.pow(n as u32);
        let mut terms = Vec::new();
        for (e, c) in acc {
            let c = c % m;
            if !c.is_multiple_of(pn) {
                return Err(Error::InternalConsistency(format!("ghost numerator of S_{n} not divisible by p^{n}")));
            }
            let r = (c / pn) % pp;
            if r != 0 {
                terms.push((e, r as u32));
            }
        }
        terms.sort_unstable_by_key(|t| std::cmp::Reverse(t.0));
        let poly = IntPoly { terms };
        let base: ModPoly = poly.terms.iter().map(|&(e, c)| (e, c as u64)).collect();
        powers.push(vec![base]);
        sums.push(poly);
    }
    Ok(sums)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector<E> {
    pub comps: Vec<E>,
}

impl<E> WittVector<E> {
    pub fn new(comps: Vec<E>) -> Self {
        WittVector { comps }
    }
    pub fn len(&self) -> usize {
        self.comps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct WittCtx {
    p: u32,
    len: usize,
    sums: Vec<IntPoly>,
    /// `S_m - X_m - Y_m`.
    carries: Vec<IntPoly>,
}

impl WittCtx {
    pub fn new(p: u32, len: usize) -> Result<Self> {
        Ok(Self::from_sums(p, addition_polynomials(p, len)?))
    }

    fn from_sums(p: u32, sums: Vec<IntPoly>) -> Self {
        let len = sums.len();
        let carries = sums
            .iter()
            .enumerate()
            .map(|(m, s)| {
                let lin_x = monomial_power(xv(m), 1);
                let lin_y = monomial_power(yv(m), 1);
                IntPoly { terms: s.terms.iter().filter(|(e, _)| *e != lin_x && *e != lin_y).cloned().collect() }
            })
            .collect();
        WittCtx { p, len, sums, carries }
    }

    pub fn cache_path(dir: &Path, p: u32, len: usize) -> PathBuf {
        dir.join(format!("witt-p{p}-len{len}.txt"))
    }

    /// Reads the polynomials from `dir` if a valid cache exists, else computes and writes them.
    pub fn load_or_compute(p: u32, len: usize, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else { return Self::new(p, len) };
        let path = Self::cache_path(dir, p, len);
        if let Ok(text) = fs::read_to_string(&path) {
            if let Ok(ctx) = Self::parse_cache(&text, p, len) {
                return Ok(ctx);
            }
        }
        let ctx = Self::new(p, len)?;
        fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, ctx.to_cache_text())?;
        fs::rename(&tmp, &path)?;
        Ok(ctx)
    }

    pub fn to_cache_text(&self) -> String {
        let mut s = format!("{CACHE_MAGIC}\np {}\nlen {}\n", self.p, self.len);
        for poly in &self.sums {
            s.push_str(&poly.format());
            s.push('\n');
        }
        s
    }

    pub fn parse_cache(text: &str, p: u32, len: usize) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next() != Some(CACHE_MAGIC) {
            return Err(Error::Cache("unknown Witt cache version".into()));
        }
        if lines.next() != Some(&format!("p {p}")) || lines.next() != Some(&format!("len {len}")) {
            return Err(Error::Cache("Witt cache key mismatch".into()));
        }
        let sums: Vec<IntPoly> = lines.map(IntPoly::parse).collect::<Result<_>>()?;
        if sums.len() != len {
            return Err(Error::Cache("truncated Witt cache".into()));
        }
        Ok(Self::from_sums(p, sums))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
    pub fn sum_polynomial(&self, m: usize) -> &IntPoly {
        &self.sums[m]
    }
    pub fn carry_polynomial(&self, m: usize) -> &IntPoly {
        &self.carries[m]
    }

    fn check_len<E>(&self, w: &WittVector<E>) -> Result<()> {
        if w.len() != self.len {
            return Err(Error::Dimension(format!("Witt vector of length {} in context of length {}", w.len(), self.len)));
        }
        Ok(())
    }

    pub fn zero<R: Ring>(&self, ring: &R) -> WittVector<R::Elem> {
        WittVector::new(vec![ring.zero(); self.len])
    }

    pub fn teichmuller<R: Ring>(&self, ring: &R, a: R::Elem) -> WittVector<R::Elem> {
        let mut comps = vec![ring.zero(); self.len];
        comps[0] = a;
        WittVector::new(comps)
    }

    pub fn add<R: Ring>(&self, ring: &R, u: &WittVector<R::Elem>, v: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.check_len(u)?;
        self.check_len(v)?;
        let comps = (0..self.len).map(|m| evaluate(ring, &self.sums[m], &u.comps, &v.comps)).collect();
        Ok(WittVector::new(comps))
    }

    /// `C_m(u, v) = S_m(u, v) - u_m - v_m`, which only involves components below m.
    pub fn carry<R: Ring>(&self, ring: &R, m: usize, u: &[R::Elem], v: &[R::Elem]) -> R::Elem {
        evaluate(ring, &self.carries[m], u, v)
    }

    pub fn negate<R: Ring>(&self, ring: &R, w: &WittVector<R::Elem>) -> Result<WittVector<R::Elem>> {
        self.check_len(w)?;
        // Solve w + u = 0 one component at a time.
        let mut u: Vec<R::Elem> = Vec::with_capacity(self.len);
        for m in 0..self.len {
            let mut partial = u.clone();
            partial.push(ring.zero());
            let c = if m == 0 { ring.zero() } else { self.carry(ring, m, &w.comps[..=m], &partial) };
            u.push(ring.neg(&ring.add(&w.comps[m], &c)));
        }
        Ok(WittVector::new(u))
    }

    pub fn frobenius<R: Ring>(&self, ring: &R, w: &WittVector<R::Elem>) -> WittVector<R::Elem> {
        WittVector::new(w.comps.iter().map(|c| ring.pow(c, self.p as u64)).collect())
    }

    /// `p * w = (0, w_0^p, w_1^p, ...)`.
    pub fn mul_by_p<R: Ring>(&self, ring: &R, w: &WittVector<R::Elem>) -> WittVector<R::Elem> {
        let mut comps = vec![ring.zero()];
        comps.extend(w.comps[..self.len - 1].iter().map(|c| ring.pow(c, self.p as u64)));
        WittVector::new(comps)
    }

    /// `sum p^v [c x^i]` in `W_len(k[x])`.
    pub fn rhs_assemble(&self, ctx: &FieldCtx, terms: &[(u32, FieldElement, u32)]) -> Result<WittVector<SparsePoly>> {
        let ring = TowerRing::univariate(ctx);
        let mut total = self.zero(&ring);
        for &(v, c, i) in terms {
            if c.is_zero() || i == 0 {
                return Err(Error::InvalidSpec(format!("term ({v}, {}, {i}) needs c != 0 and i >= 1", ctx.format(c))));
            }
            let v = v as usize;
            if v >= self.len {
                continue;
            }
            let mut w = self.teichmuller(&ring, SparsePoly::monomial(c, i, &[]));
            for _ in 0..v {
                w = self.mul_by_p(&ring, &w);
            }
            total = self.add(&ring, &total, &w)?;
        }
        Ok(total)
    }
}

/// Evaluates a polynomial in `X`/`Y` at `(xs, ys)`; missing components count as zero.
pub fn evaluate<R: Ring>(ring: &R, poly: &IntPoly, xs: &[R::Elem], ys: &[R::Elem]) -> R::Elem {
    let mut vals: [Option<&R::Elem>; 16] = [None; 16];
    for (i, x) in xs.iter().enumerate().take(8) {
        if !ring.is_zero(x) {
            vals[xv(i)] = Some(x);
        }
    }
    for (i, y) in ys.iter().enumerate().take(8) {
        if !ring.is_zero(y) {
            vals[yv(i)] = Some(y);
        }
    }
    // Terms touching a zero variable vanish.
    let mut live: Vec<(Exps, u32)> = poly
        .terms
        .iter()
        .filter(|(e, _)| e.iter().enumerate().all(|(v, &k)| k == 0 || vals[v].is_some()))
        .cloned()
        .collect();
    if live.is_empty() {
        return ring.zero();
    }
    // Expensive X variables at the root of the trie, cheap Y variables near the leaves.
    let order: Vec<usize> = (0..8).rev().chain((8..16).rev()).filter(|&v| vals[v].is_some()).collect();
    live.sort_unstable_by(|a, b| order.iter().map(|&v| a.0[v]).cmp(order.iter().map(|&v| b.0[v])));
    let mut ev = Evaluator { ring, vals, cache: HashMap::new() };
    ev.eval(&live, &order, 0)
}

struct Evaluator<'a, R: Ring> {
    ring: &'a R,
    vals: [Option<&'a R::Elem>; 16],
    cache: HashMap<(usize, u8), R::Elem>,
}

impl<R: Ring> Evaluator<'_, R> {
    fn pow(&mut self, var: usize, e: u8) -> R::Elem {
        let base = self.vals[var].expect("only live variables are raised to powers");
        if e == 1 {
            return base.clone();
        }
        if let Some(v) = self.cache.get(&(var, e)) {
            return v.clone();
        }
        let half = self.pow(var, e / 2);
        let mut r = self.ring.mul(&half, &half);
        if e % 2 == 1 {
            r = self.ring.mul(&r, base);
        }
        self.cache.insert((var, e), r.clone());
        r
    }

    fn eval(&mut self, terms: &[(Exps, u32)], order: &[usize], depth: usize) -> R::Elem {
        if depth == order.len() {
            let c: u32 = terms.iter().map(|t| t.1).sum();
            return self.ring.scale_int(&self.ring.one(), c);
        }
        let var = order[depth];
        let mut total: Option<R::Elem> = None;
        let mut start = 0;
        while start < terms.len() {
            let e = terms[start].0[var];
            let end = start + terms[start..].iter().take_while(|t| t.0[var] == e).count();
            let child = self.eval(&terms[start..end], order, depth + 1);
            let part = if e == 0 { child } else { self.ring.mul(&self.pow(var, e), &child) };
            total = Some(match total {
                None => part,
                Some(t) => self.ring.add(&t, &part),
            });
            start = end;
        }
        total.unwrap_or_else(|| self.ring.zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ex(xs: &[(usize, u8)], ys: &[(usize, u8)]) -> Exps {
        let mut e = [0u8; 16];
        for &(i, k) in xs {
            e[xv(i)] = k;
        }
        for &(i, k) in ys {
            e[yv(i)] = k;
        }
        e
    }

    #[test]
    fn low_degree_sums() {
        let s2 = addition_polynomials(2, 2).unwrap();
        assert_eq!(s2[0].len(), 2);
        assert_eq!(s2[1].len(), 3);
        assert_eq!(s2[1].coeff(&ex(&[(1, 1)], &[])), 1);
        assert_eq!(s2[1].coeff(&ex(&[], &[(1, 1)])), 1);
        assert_eq!(s2[1].coeff(&ex(&[(0, 1)], &[(0, 1)])), 1);

        let s3 = addition_polynomials(3, 2).unwrap();
        assert_eq!(s3[1].len(), 4);
        assert_eq!(s3[1].coeff(&ex(&[(0, 2)], &[(0, 1)])), 2);
        assert_eq!(s3[1].coeff(&ex(&[(0, 1)], &[(0, 2)])), 2);
        for p in [5, 7, 13] {
            let s = addition_polynomials(p, 1).unwrap();
            assert_eq!(s[0].len(), 2);
        }
    }

    #[test]
    fn term_counts_match_reference_sizes() {
        let s2: Vec<usize> = addition_polynomials(2, 5).unwrap().iter().map(IntPoly::len).collect();
        assert_eq!(s2, vec![2, 3, 7, 29, 219]);
        let s3: Vec<usize> = addition_polynomials(3, 4).unwrap().iter().map(IntPoly::len).collect();
        assert_eq!(s3, vec![2, 4, 22, 454]);
    }

    #[test]
    fn rejects_unsupported_lengths() {
        assert!(addition_polynomials(7, 3).is_err());
        assert!(addition_polynomials(2, 0).is_err());
        assert!(addition_polynomials(2, 9).is_err());
    }

    type BigPoly = HashMap<Exps, BigInt>;

    fn big_mul(a: &BigPoly, b: &BigPoly) -> BigPoly {
        let mut out = BigPoly::new();
        for (ea, ca) in a {
            for (eb, cb) in b {
                *out.entry(add_exps(ea, eb)).or_insert_with(BigInt::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn big_pow(a: &BigPoly, e: u64) -> BigPoly {
        let mut r: BigPoly = [([0u8; 16], BigInt::one())].into_iter().collect();
        for _ in 0..e {
            r = big_mul(&r, a);
        }
        r
    }

    /// Integer Witt addition polynomials straight from the ghost identities, without any reduction.
    fn exact_sums(p: u64, len: usize) -> Vec<BigPoly> {
        let mut sums: Vec<BigPoly> = Vec::new();
        for n in 0..len {
            let mut acc = BigPoly::new();
            for i in 0..=n {
                let w = BigInt::from(p.pow(i as u32));
                let e = p.pow((n - i) as u32);
                *acc.entry(monomial_power(xv(i), e)).or_insert_with(BigInt::zero) += &w;
                *acc.entry(monomial_power(yv(i), e)).or_insert_with(BigInt::zero) += &w;
            }
            for (i, s) in sums.iter().enumerate() {
                let w = BigInt::from(p.pow(i as u32));
                for (e, c) in big_pow(s, p.pow((n - i) as u32)) {
                    *acc.entry(e).or_insert_with(BigInt::zero) -= &w * c;
                }
            }
            let pn = BigInt::from(p.pow(n as u32));
            let mut s = BigPoly::new();
            for (e, c) in acc {
                if c.is_zero() {
                    continue;
                }
                assert!((&c % &pn).is_zero(), "integrality of S_{n}");
                s.insert(e, c / &pn);
            }
            sums.push(s);
        }
        sums
    }

    fn big_eval(poly: &BigPoly, point: &[i64; 16]) -> BigInt {
        poly.iter()
            .map(|(e, c)| {
                let mut t = c.clone();
                for v in 0..16 {
                    for _ in 0..e[v] {
                        t *= point[v];
                    }
                }
                t
            })
            .sum()
    }

    #[test]
    fn ghost_identities_hold_exactly_in_characteristic_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, len) in [(2u64, 4usize), (3, 3), (5, 2)] {
            let exact = exact_sums(p, len);
            let reduced = addition_polynomials(p as u32, len).unwrap();
            for n in 0..len {
                let from_exact: HashMap<Exps, u32> = exact[n]
                    .iter()
                    .filter_map(|(e, c)| {
                        let r = (c % BigInt::from(p) + BigInt::from(p)) % BigInt::from(p);
                        let r: u32 = r.try_into().unwrap();
                        (r != 0).then_some((*e, r))
                    })
                    .collect();
                let ours: HashMap<Exps, u32> = reduced[n].terms.iter().cloned().collect();
                assert_eq!(from_exact, ours, "p={p} S_{n}");
            }
            for _ in 0..20 {
                let mut point = [0i64; 16];
                for i in 0..len {
                    point[xv(i)] = rng.gen_range(-3..=3);
                    point[yv(i)] = rng.gen_range(-3..=3);
                }
                let svals: Vec<BigInt> = exact.iter().map(|s| big_eval(s, &point)).collect();
                for n in 0..len {
                    let ghost = |f: &dyn Fn(usize) -> BigInt| -> BigInt {
                        (0..=n).map(|i| BigInt::from(p.pow(i as u32)) * num_traits::pow(f(i), p.pow((n - i) as u32) as usize)).sum()
                    };
                    let lhs = ghost(&|i| svals[i].clone());
                    let rhs = ghost(&|i| BigInt::from(point[xv(i)])) + ghost(&|i| BigInt::from(point[yv(i)]));
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    fn xp(ctx: &FieldCtx, coeffs: &[(u32, i64)]) -> SparsePoly {
        SparsePoly::from_terms(0, coeffs.iter().map(|&(n, c)| (n, vec![], ctx.from_int(c))), ctx)
    }

    #[test]
    fn add_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let ring = TowerRing::univariate(&f2);
        let w = WittCtx::new(2, 2).unwrap();
        let a = w.teichmuller(&ring, xp(&f2, &[(3, 1)]));
        let b = w.teichmuller(&ring, xp(&f2, &[(1, 1)]));
        let s = w.add(&ring, &a, &b).unwrap();
        assert_eq!(s.comps, vec![xp(&f2, &[(3, 1), (1, 1)]), xp(&f2, &[(4, 1)])]);
        assert_eq!(w.add(&ring, &a, &w.zero(&ring)).unwrap(), a);
        assert!(w.add(&ring, &a, &WittVector::new(vec![SparsePoly::zero(0)])).is_err());
    }

    #[test]
    fn special_operation_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let ring = TowerRing::univariate(&f2);
        let w = WittCtx::new(2, 2).unwrap();
        let b = WittVector::new(vec![xp(&f2, &[(2, 1)]), xp(&f2, &[(1, 1)])]);
        let nb = w.negate(&ring, &b).unwrap();
        assert_eq!(nb.comps, vec![xp(&f2, &[(2, 1)]), xp(&f2, &[(1, 1), (4, 1)])]);
        assert_eq!(w.add(&ring, &b, &nb).unwrap(), w.zero(&ring));

        let f3 = FieldCtx::prime(3).unwrap();
        let r3 = TowerRing::univariate(&f3);
        let w3 = WittCtx::new(3, 2).unwrap();
        let ab = WittVector::new(vec![xp(&f3, &[(1, 1)]), xp(&f3, &[(2, 1)])]);
        assert_eq!(w3.mul_by_p(&r3, &ab).comps, vec![SparsePoly::zero(0), xp(&f3, &[(3, 1)])]);
    }

    #[test]
    fn rhs_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let w = WittCtx::new(2, 2).unwrap();
        let one = FieldElement::ONE;
        assert_eq!(w.rhs_assemble(&f2, &[(0, one, 3)]).unwrap().comps, vec![xp(&f2, &[(3, 1)]), SparsePoly::zero(0)]);
        assert_eq!(
            w.rhs_assemble(&f2, &[(0, one, 3), (0, one, 1)]).unwrap().comps,
            vec![xp(&f2, &[(3, 1), (1, 1)]), xp(&f2, &[(4, 1)])]
        );
        assert_eq!(
            w.rhs_assemble(&f2, &[(0, one, 3), (1, one, 5)]).unwrap().comps,
            vec![xp(&f2, &[(3, 1)]), xp(&f2, &[(10, 1)])]
        );
        assert!(w.rhs_assemble(&f2, &[(0, FieldElement::ZERO, 3)]).is_err());
    }

    fn random_vector(ctx: &FieldCtx, len: usize, rng: &mut ChaCha8Rng) -> WittVector<SparsePoly> {
        WittVector::new(
            (0..len)
                .map(|_| SparsePoly::from_x_coeffs((0..rng.gen_range(0..4)).map(|_| ctx.random(rng)).collect(), 0))
                .collect(),
        )
    }

    #[test]
    fn group_laws_on_random_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (p, k, len) in [(2, 1, 3), (3, 1, 3), (2, 2, 3), (5, 1, 2), (3, 2, 2)] {
            let ctx = FieldCtx::new(p, k).unwrap();
            let ring = TowerRing::univariate(&ctx);
            let w = WittCtx::new(p, len).unwrap();
            for _ in 0..10 {
                let (a, b, c) = (random_vector(&ctx, len, &mut rng), random_vector(&ctx, len, &mut rng), random_vector(&ctx, len, &mut rng));
                let ab = w.add(&ring, &a, &b).unwrap();
                assert_eq!(ab, w.add(&ring, &b, &a).unwrap());
                assert_eq!(w.add(&ring, &ab, &c).unwrap(), w.add(&ring, &a, &w.add(&ring, &b, &c).unwrap()).unwrap());
                let na = w.negate(&ring, &a).unwrap();
                assert_eq!(w.add(&ring, &a, &na).unwrap(), w.zero(&ring));
                let mut rep = w.zero(&ring);
                for _ in 0..p {
                    rep = w.add(&ring, &rep, &a).unwrap();
                }
                assert_eq!(rep, w.mul_by_p(&ring, &a));
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = std::env::temp_dir().join(format!("zptower-witt-test-{}", std::process::id()));
        let a = WittCtx::load_or_compute(3, 3, Some(&dir)).unwrap();
        assert!(WittCtx::cache_path(&dir, 3, 3).exists());
        let b = WittCtx::load_or_compute(3, 3, Some(&dir)).unwrap();
        for m in 0..3 {
            let mut x = a.sum_polynomial(m).terms.clone();
            let mut y = b.sum_polynomial(m).terms.clone();
            x.sort();
            y.sort();
            assert_eq!(x, y);
        }
        assert!(WittCtx::parse_cache("garbage", 3, 3).is_err());
        let _ = fs::remove_dir_all(&dir);
    }
}
