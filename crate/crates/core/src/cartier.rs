//! Regular differentials and the Cartier operator on each level of a tower.
//!
//! A differential is stored as the polynomial `h` in `h dx`. On the base the
//! operator sends `x^{pj-1} dx` to `x^{j-1} dx` and kills every other monomial.
//! Higher levels use tables `V(x^r y^a dx)` for `r < p` and `a_j < p`, built
//! from the level below by writing `y_m = y_m^p - f_m`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::linalg::{twisted_power_kernels, DenseMatrix};
use crate::poly::{exponent, pack, unit, unpack, xpoly, Monomial, PoleProfile, SparsePoly, YKey};
use crate::tower::TowerState;

/// Coefficient `h` of the form `h dx`.
pub type DifferentialForm = SparsePoly;

/// Exponents `(nu, a)` of a basis form `x^nu y^a dx`.
pub type BasisIndex = Monomial;

const CACHE_MAGIC: &str = "zptower-cartier-tables v1";

/// The Cartier operator on the projective line, on dense x-coefficients.
pub fn base_cartier(f: &[FieldElement], ctx: &FieldCtx) -> Vec<FieldElement> {
    let p = ctx.p() as usize;
    let mut out: Vec<FieldElement> = f.iter().skip(p - 1).step_by(p).map(|&c| ctx.frobenius_inv(c)).collect();
    xpoly::trim(&mut out);
    out
}

/// Base-p index of a reduced exponent vector.
fn digit_index(key: YKey, level: usize, p: usize) -> usize {
    (1..=level).rev().fold(0, |acc, j| acc * p + exponent(key, j) as usize)
}

/// The basis `x^nu y^a dx` of regular differentials at a level.
#[derive(Clone, Debug)]
pub struct MaddenBasis {
    pub level: usize,
    pub entries: Vec<BasisIndex>,
    /// y-part → (offset of nu = 0, largest nu)
    index: HashMap<YKey, (usize, u32)>,
}

impl MaddenBasis {
    /// Enumerates `0 <= p^n nu <= sum_j p^{n-j} d_j (p-1-a_j) - p^n - 1`.
    pub fn enumerate(profile: &PoleProfile, n: usize) -> Self {
        let p = profile.p;
        let pn = p.pow(n as u32) as i128;
        let mut entries = Vec::new();
        let mut index = HashMap::new();
        for idx in 0..(p as usize).pow(n as u32) {
            let mut a = vec![0u8; n];
            let mut t = idx;
            for aj in a.iter_mut() {
                *aj = (t % p as usize) as u8;
                t /= p as usize;
            }
            let bound: i128 = (1..=n)
                .map(|j| (p.pow((n - j) as u32) * profile.d[j - 1]) as i128 * (p as i128 - 1 - a[j - 1] as i128))
                .sum::<i128>()
                - pn
                - 1;
            if bound < 0 {
                continue;
            }
            let nu_max = (bound / pn) as u32;
            index.insert(pack(&a), (entries.len(), nu_max));
            for nu in 0..=nu_max {
                entries.push(Monomial { nu, a: a.clone() });
            }
        }
        MaddenBasis { level: n, entries, index }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn index_of(&self, nu: u32, key: YKey) -> Option<usize> {
        self.index.get(&key).and_then(|&(off, max)| (nu <= max).then_some(off + nu as usize))
    }

    /// Whether every monomial of `h dx` is a basis element.
    pub fn is_regular(&self, h: &DifferentialForm) -> bool {
        h.slots().all(|(k, v)| match self.index.get(&k) {
            Some(&(_, max)) => v.len() <= max as usize + 1,
            None => false,
        })
    }

    /// Basis coordinates of a regular form.
    pub fn coordinates(&self, h: &DifferentialForm) -> Result<Vec<FieldElement>> {
        let mut out = vec![FieldElement::ZERO; self.len()];
        for (k, v) in h.slots() {
            for (nu, &c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let i = self.index_of(nu as u32, k).ok_or_else(|| {
                    Error::InternalConsistency(format!("x^{nu} y^{:?} dx is not regular at level {}", unpack(k, self.level), self.level))
                })?;
                out[i] = c;
            }
        }
        Ok(out)
    }

    pub fn form(&self, coords: &[FieldElement], ctx: &FieldCtx) -> DifferentialForm {
        SparsePoly::from_terms(
            self.level,
            self.entries.iter().zip(coords).filter(|(_, c)| !c.is_zero()).map(|(m, &c)| (m.nu, m.a.clone(), c)),
            ctx,
        )
    }
}

/// The basis at level n; errors unless its size equals the genus.
pub fn madden_basis(state: &TowerState, n: usize) -> Result<MaddenBasis> {
    let prof = PoleProfile::new(state.p(), state.profile.d[..n].to_vec());
    let basis = MaddenBasis::enumerate(&prof, n);
    if basis.len() as u64 != state.genus(n) {
        return Err(Error::InternalConsistency(format!(
            "level {n}: {} basis differentials but genus {}",
            basis.len(),
            state.genus(n)
        )));
    }
    Ok(basis)
}

/// Tables `V(x^r y^a dx)` per level, indexed by `r + p * (base-p digits of a)`.
#[derive(Clone, Debug)]
pub struct CartierTables {
    p: usize,
    levels: Vec<Option<Vec<SparsePoly>>>,
}

fn binomial_mod(n: usize, k: usize, p: usize) -> u32 {
    let mut c = 1u64;
    for i in 0..k {
        c = c * (n - i) as u64 / (i as u64 + 1);
    }
    (c % p as u64) as u32
}

impl CartierTables {
    pub fn new(state: &TowerState) -> Self {
        let p = state.p() as usize;
        let base = (0..p).map(|r| if r == p - 1 { SparsePoly::one(0) } else { SparsePoly::zero(0) }).collect();
        CartierTables { p, levels: vec![Some(base)] }
    }

    /// Tables through level n, computed from scratch.
    pub fn build(state: &TowerState, n: usize) -> Result<Self> {
        let mut t = Self::new(state);
        t.ensure(state, n)?;
        Ok(t)
    }

    /// Tables through level n, loading valid cached levels from `dir` and computing and caching the rest.
    pub fn build_cached(state: &TowerState, n: usize, dir: &Path, spec_hash: &str) -> Result<Self> {
        let mut t = Self::new(state);
        for m in 1..=n {
            let path = cache_path(dir, spec_hash, m);
            let cached = fs::read_to_string(&path).ok().and_then(|text| parse_cache(&text, state, spec_hash, m).ok());
            if let Some(table) = cached {
                t.set_level(m, table);
                continue;
            }
            t.ensure(state, m)?;
            fs::create_dir_all(dir)?;
            let tmp = path.with_extension("tmp");
            fs::write(&tmp, t.to_cache_text(state, spec_hash, m))?;
            fs::rename(&tmp, &path)?;
        }
        Ok(t)
    }

    fn set_level(&mut self, m: usize, table: Vec<SparsePoly>) {
        if self.levels.len() <= m {
            self.levels.resize(m + 1, None);
        }
        self.levels[m] = Some(table);
    }

    pub fn has_level(&self, m: usize) -> bool {
        self.levels.get(m).is_some_and(Option::is_some)
    }

    /// Makes sure the level-m table exists, computing lower ones as needed.
    pub fn ensure(&mut self, state: &TowerState, m: usize) -> Result<()> {
        if self.has_level(m) {
            return Ok(());
        }
        if m > state.levels() {
            return Err(Error::InsufficientLevels(format!("tower built to level {}, tables requested at {m}", state.levels())));
        }
        self.ensure(state, m - 1)?;
        let table = self.compute_level(state, m)?;
        self.set_level(m, table);
        Ok(())
    }

    fn table(&self, m: usize) -> Result<&[SparsePoly]> {
        self.levels
            .get(m)
            .and_then(|t| t.as_deref())
            .ok_or_else(|| Error::InsufficientLevels(format!("Cartier table for level {m} missing")))
    }

    /// `V(x^r y^a dx)` at level m.
    pub fn entry(&self, m: usize, r: usize, a: &[u8]) -> Result<&SparsePoly> {
        Ok(&self.table(m)?[r + self.p * digit_index(pack(a), m, self.p)])
    }

    fn compute_level(&self, state: &TowerState, m: usize) -> Result<Vec<SparsePoly>> {
        let p = self.p;
        let ctx = state.field();
        let below = m - 1;
        let ring = state.ring(below);
        let neg_f = state.layers[below].neg(ctx);
        let mut neg_pows = vec![SparsePoly::one(below)];
        for j in 1..p {
            neg_pows.push(ring.mul(&neg_pows[j - 1], &neg_f));
        }
        let lower = self.table(below)?;
        let count_below = p.pow(below as u32);
        // V(x^r y^b (-f_m)^j dx) at level m-1, for j = 1..p-1
        let jobs: Vec<(usize, usize, usize)> =
            (0..count_below).flat_map(|b| (0..p).flat_map(move |r| (1..p).map(move |j| (b, r, j)))).collect();
        let images: Vec<Result<SparsePoly>> = jobs
            .par_iter()
            .map(|&(b, r, j)| {
                let mut a = vec![0u8; below];
                let mut t = b;
                for aj in a.iter_mut() {
                    *aj = (t % p) as u8;
                    t /= p;
                }
                let h = ring.mul(&SparsePoly::monomial(FieldElement::ONE, 0, &a), &neg_pows[j]).shift_x(r);
                apply_with(lower, p, &h, below, ctx)
            })
            .collect();
        let mut u: HashMap<(usize, usize, usize), SparsePoly> = HashMap::with_capacity(jobs.len());
        for (job, img) in jobs.into_iter().zip(images) {
            u.insert(job, img?);
        }
        let mut out = Vec::with_capacity(p * count_below * p);
        for k in 0..p {
            for b in 0..count_below {
                for r in 0..p {
                    // sum_i C(k,i) y_m^i V(x^r y^b (-f_m)^{k-i} dx)
                    let mut acc = SparsePoly::zero(m);
                    for i in 0..=k {
                        let c = binomial_mod(k, i, p);
                        if c == 0 {
                            continue;
                        }
                        let part = if i == k { &lower[r + p * b] } else { &u[&(b, r, k - i)] };
                        let shift = i as u64 * unit(m);
                        let cf = ctx.from_int(c as i64);
                        for (key, v) in part.slots() {
                            acc.add_slot(key + shift, &xpoly::scale(v, cf, ctx), ctx);
                        }
                    }
                    out.push(acc.lift(m));
                }
            }
        }
        Ok(out)
    }

    /// The Cartier operator on a polynomial differential at level n.
    pub fn apply(&self, state: &TowerState, omega: &DifferentialForm, n: usize) -> Result<DifferentialForm> {
        apply_with(self.table(n)?, self.p, omega, n, state.field())
    }

    fn to_cache_text(&self, state: &TowerState, spec_hash: &str, m: usize) -> String {
        let ctx = state.field();
        let mut s = format!("{CACHE_MAGIC}\np {}\nk {}\nspec_hash {spec_hash}\nlevel {m}\n", ctx.p(), ctx.k());
        let table = self.table(m).expect("level present when caching");
        for (idx, poly) in table.iter().enumerate() {
            let r = idx % self.p;
            let a = unpack_digits(idx / self.p, m, self.p);
            let terms = poly.terms();
            let _ = writeln!(s, "entry {r} {} terms {}", join(&a), terms.len());
            for (mono, c) in terms {
                let _ = writeln!(s, "{} {} {}", mono.nu, join(&mono.a), c.index());
            }
        }
        s
    }
}

fn join(a: &[u8]) -> String {
    a.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn unpack_digits(mut idx: usize, m: usize, p: usize) -> Vec<u8> {
    let mut a = vec![0u8; m];
    for aj in a.iter_mut() {
        *aj = (idx % p) as u8;
        idx /= p;
    }
    a
}

pub fn cache_path(dir: &Path, spec_hash: &str, level: usize) -> PathBuf {
    dir.join(format!("cartier-{spec_hash}-level{level}.txt"))
}

fn parse_cache(text: &str, state: &TowerState, spec_hash: &str, m: usize) -> Result<Vec<SparsePoly>> {
    let ctx = state.field();
    let bad = |what: &str| Error::Cache(format!("Cartier cache: {what}"));
    let mut lines = text.lines();
    let header = [
        CACHE_MAGIC.to_string(),
        format!("p {}", ctx.p()),
        format!("k {}", ctx.k()),
        format!("spec_hash {spec_hash}"),
        format!("level {m}"),
    ];
    for h in &header {
        if lines.next() != Some(h.as_str()) {
            return Err(bad("header mismatch"));
        }
    }
    let p = ctx.p() as usize;
    let count = p.pow(m as u32 + 1);
    let mut table = Vec::with_capacity(count);
    let nums = |line: &str| -> Result<Vec<u64>> {
        line.split_whitespace().map(|t| t.parse::<u64>().map_err(|_| bad("bad number"))).collect()
    };
    for idx in 0..count {
        let head = lines.next().ok_or_else(|| bad("truncated"))?;
        let rest = head.strip_prefix("entry ").ok_or_else(|| bad("expected entry"))?;
        let (key_part, n_terms) = rest.split_once(" terms ").ok_or_else(|| bad("expected term count"))?;
        let key = nums(key_part)?;
        let expect_a = unpack_digits(idx / p, m, p);
        if key.len() != m + 1 || key[0] as usize != idx % p || key[1..].iter().zip(&expect_a).any(|(x, &y)| *x != y as u64) {
            return Err(bad("entry order"));
        }
        let n_terms: usize = n_terms.trim().parse().map_err(|_| bad("bad count"))?;
        let mut terms = Vec::with_capacity(n_terms);
        for _ in 0..n_terms {
            let v = nums(lines.next().ok_or_else(|| bad("truncated"))?)?;
            if v.len() != m + 2 || v[m + 1] >= ctx.order() as u64 {
                return Err(bad("bad record"));
            }
            let a: Vec<u8> = v[1..=m].iter().map(|&x| x as u8).collect();
            terms.push((v[0] as u32, a, FieldElement(v[m + 1] as u32)));
        }
        table.push(SparsePoly::from_terms(m, terms, ctx));
    }
    Ok(table)
}

fn apply_with(table: &[SparsePoly], p: usize, omega: &DifferentialForm, n: usize, ctx: &FieldCtx) -> Result<DifferentialForm> {
    let mut acc: HashMap<YKey, Vec<FieldElement>> = HashMap::new();
    for (key, coeffs) in omega.slots() {
        if (1..=n).any(|j| exponent(key, j) as usize >= p) || (n + 1..=8).any(|j| exponent(key, j) != 0) {
            return Err(Error::InternalConsistency("Cartier operator needs a reduced form at its own level".into()));
        }
        let base = p * digit_index(key, n, p);
        for r in 0..p {
            let mut q: Vec<FieldElement> = coeffs.iter().skip(r).step_by(p).map(|&c| ctx.frobenius_inv(c)).collect();
            xpoly::trim(&mut q);
            if q.is_empty() {
                continue;
            }
            for (tk, tv) in table[base + r].slots() {
                xpoly::mul_acc(acc.entry(tk).or_default(), &q, tv, ctx);
            }
        }
    }
    Ok(SparsePoly::from_map(n, acc))
}

/// `pi_*(sum_i omega_i y_n^i) = -omega_{p-1}`, a form one level down.
pub fn trace_map(omega: &DifferentialForm, n: usize, ctx: &FieldCtx) -> DifferentialForm {
    let p = ctx.p() as u8;
    let top = (p as u64 - 1) * unit(n);
    let mut out = SparsePoly::zero(n - 1);
    for (k, v) in omega.slots() {
        if exponent(k, n) == p - 1 {
            out.add_slot(k - top, &xpoly::scale(v, ctx.neg(FieldElement::ONE), ctx), ctx);
        }
    }
    out
}

/// `dh/dx`, so that `dh = (dh/dx) dx`; uses `dy_j = -df_j`.
pub fn derivative(h: &SparsePoly, state: &TowerState, n: usize) -> SparsePoly {
    let ctx = state.field();
    let ring = state.ring(n);
    let mut dy: Vec<SparsePoly> = Vec::with_capacity(n);
    for j in 1..=n {
        let df = derivative_with(&state.layers[j - 1], &dy, ctx, &state.ring(j - 1));
        dy.push(df.neg(ctx).lift(n));
    }
    derivative_with(h, &dy, ctx, &ring)
}

fn derivative_with(h: &SparsePoly, dy: &[SparsePoly], ctx: &FieldCtx, ring: &crate::poly::TowerRing<'_>) -> SparsePoly {
    let level = ring.level();
    let mut out = SparsePoly::zero(level);
    for (k, v) in h.slots() {
        let dv: Vec<FieldElement> = v.iter().enumerate().skip(1).map(|(i, &c)| ctx.mul(ctx.from_int(i as i64), c)).collect();
        out.add_slot(k, &dv, ctx);
        for j in 1..=level {
            let e = exponent(k, j);
            if e == 0 {
                continue;
            }
            let mut piece = SparsePoly::zero(level);
            piece.add_slot(k - unit(j), &xpoly::scale(v, ctx.from_int(e as i64), ctx), ctx);
            out.add_assign(&ring.mul(&piece, &dy[j - 1]), ctx);
        }
    }
    out
}

/// The Cartier operator in the basis of regular differentials at one level.
#[derive(Clone, Debug)]
pub struct CartierMatrix {
    pub level: usize,
    pub basis: MaddenBasis,
    /// Row s holds the coordinates of `V(omega_s)`; this is the transpose of the matrix.
    pub images: DenseMatrix,
}

impl CartierMatrix {
    pub fn genus(&self) -> usize {
        self.basis.len()
    }

    /// Column s = coordinates of `V(omega_s)`.
    pub fn matrix(&self) -> DenseMatrix {
        self.images.transpose()
    }

    pub fn a_number(&self) -> usize {
        self.images.rows() - self.images.rank()
    }

    /// `a^(1..=r_max)`.
    pub fn kernel_dims(&self, r_max: usize) -> Result<Vec<usize>> {
        twisted_power_kernels(&self.matrix(), r_max)
    }
}

/// Assembles the Cartier matrix at level n; every image must be regular.
pub fn cartier_matrix(state: &TowerState, tables: &CartierTables, n: usize) -> Result<CartierMatrix> {
    let basis = madden_basis(state, n)?;
    let ctx = state.field();
    let p = ctx.p() as usize;
    let g = basis.len();
    let mut images = DenseMatrix::zeros(state.spec.field.clone(), g, g);
    for (s, m) in basis.entries.iter().enumerate() {
        let (q, r) = (m.nu as usize / p, m.nu as usize % p);
        let entry = tables.entry(n, r, &m.a)?;
        for (k, v) in entry.slots() {
            for (mu, &c) in v.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let col = basis.index_of((mu + q) as u32, k).ok_or_else(|| {
                    Error::InternalConsistency(format!(
                        "V(x^{} y^{:?} dx) has non-regular term x^{} y^{:?} at level {n}",
                        m.nu,
                        m.a,
                        mu + q,
                        unpack(k, n)
                    ))
                })?;
                images.set(s, col, c);
            }
        }
    }
    Ok(CartierMatrix { level: n, basis, images })
}

/// Cartier operator applied to a single form, without tables.
pub fn cartier_apply(omega: &DifferentialForm, state: &TowerState, tables: &CartierTables, n: usize) -> Result<DifferentialForm> {
    tables.apply(state, omega, n)
}
