//! Sparse polynomials in x, y_1, ..., y_n over GF(p^k).
//!
//! A polynomial is a map from packed y-exponent vectors to dense coefficient
//! vectors in x. The packing uses one byte per variable with `a_1` in the
//! lowest byte, so the numeric order of keys is lexicographic on
//! `(a_n, ..., a_1)` and the x-exponent breaks ties inside a slot.

use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};

pub const MAX_LEVEL: usize = 8;
const HIGH_BITS: u64 = 0x8080_8080_8080_8080;

/// Packed y-exponent vector.
pub type YKey = u64;

#[inline]
pub fn exponent(key: YKey, j: usize) -> u8 {
    (key >> (8 * (j - 1))) as u8
}

#[inline]
pub fn unit(j: usize) -> YKey {
    1u64 << (8 * (j - 1))
}

pub fn pack(a: &[u8]) -> YKey {
    assert!(a.len() <= MAX_LEVEL, "at most {MAX_LEVEL} y-variables");
    a.iter().enumerate().fold(0, |acc, (i, &e)| acc | (e as u64) << (8 * i))
}

pub fn unpack(key: YKey, level: usize) -> Vec<u8> {
    (1..=level).map(|j| exponent(key, j)).collect()
}

/// Adds two packed keys, failing if any byte would overflow.
#[inline]
pub fn add_keys(a: YKey, b: YKey) -> Result<YKey> {
    if (a | b) & HIGH_BITS == 0 {
        return Ok(a + b);
    }
    let mut out = 0u64;
    for i in 0..8 {
        let s = ((a >> (8 * i)) & 0xff) + ((b >> (8 * i)) & 0xff);
        if s > 0xff {
            return Err(Error::ExponentOverflow);
        }
        out |= s << (8 * i);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub nu: u32,
    pub a: Vec<u8>,
}

impl Monomial {
    pub fn key(&self) -> YKey {
        pack(&self.a)
    }
}

/// Dense univariate helpers on coefficient vectors (index = power of x).
pub mod xpoly {
    use super::*;

    pub fn trim(v: &mut Vec<FieldElement>) {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
    }

    pub fn is_zero(v: &[FieldElement]) -> bool {
        v.iter().all(|c| c.is_zero())
    }

    pub fn add_assign(dst: &mut Vec<FieldElement>, src: &[FieldElement], ctx: &FieldCtx) {
        if dst.len() < src.len() {
            dst.resize(src.len(), FieldElement::ZERO);
        }
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = ctx.add(*d, s);
        }
    }

    /// `dst += c * x^shift * src`.
    pub fn add_scaled_shifted(dst: &mut Vec<FieldElement>, src: &[FieldElement], c: FieldElement, shift: usize, ctx: &FieldCtx) {
        if c.is_zero() || src.is_empty() {
            return;
        }
        if dst.len() < src.len() + shift {
            dst.resize(src.len() + shift, FieldElement::ZERO);
        }
        for (d, &s) in dst[shift..].iter_mut().zip(src) {
            *d = ctx.add(*d, ctx.mul(c, s));
        }
    }

    pub fn scale(v: &[FieldElement], c: FieldElement, ctx: &FieldCtx) -> Vec<FieldElement> {
        let mut out: Vec<FieldElement> = v.iter().map(|&x| ctx.mul(x, c)).collect();
        trim(&mut out);
        out
    }

    /// `dst += a * b`.
    pub fn mul_acc(dst: &mut Vec<FieldElement>, a: &[FieldElement], b: &[FieldElement], ctx: &FieldCtx) {
        if a.is_empty() || b.is_empty() {
            return;
        }
        let n = a.len() + b.len() - 1;
        if dst.len() < n {
            dst.resize(n, FieldElement::ZERO);
        }
        if ctx.is_prime_field() {
            let p = ctx.p();
            let mut tmp = vec![0u32; n];
            if b.len() == 1 {
                let c = b[0].0;
                for (t, x) in tmp.iter_mut().zip(a) {
                    *t = x.0 * c;
                }
            } else {
                for (i, &x) in a.iter().enumerate() {
                    if x.0 == 0 {
                        continue;
                    }
                    let xv = x.0;
                    for (t, y) in tmp[i..i + b.len()].iter_mut().zip(b) {
                        *t += xv * y.0;
                    }
                }
            }
            for (d, t) in dst.iter_mut().zip(tmp) {
                d.0 = (d.0 + t % p) % p;
            }
        } else {
            for (i, &x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for (d, &y) in dst[i..i + b.len()].iter_mut().zip(b) {
                    *d = ctx.add(*d, ctx.mul(x, y));
                }
            }
        }
    }

    pub fn mul(a: &[FieldElement], b: &[FieldElement], ctx: &FieldCtx) -> Vec<FieldElement> {
        let mut out = Vec::new();
        mul_acc(&mut out, a, b, ctx);
        trim(&mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePoly {
    level: usize,
    slots: BTreeMap<YKey, Vec<FieldElement>>,
}

impl SparsePoly {
    pub fn zero(level: usize) -> Self {
        assert!(level <= MAX_LEVEL);
        SparsePoly { level, slots: BTreeMap::new() }
    }

    pub fn constant(c: FieldElement, level: usize) -> Self {
        Self::monomial(c, 0, &vec![0; level])
    }

    pub fn one(level: usize) -> Self {
        Self::constant(FieldElement::ONE, level)
    }

    /// `c * x^nu * y^a`, at level `a.len()`.
    pub fn monomial(c: FieldElement, nu: u32, a: &[u8]) -> Self {
        let mut f = Self::zero(a.len());
        if !c.is_zero() {
            let mut v = vec![FieldElement::ZERO; nu as usize + 1];
            v[nu as usize] = c;
            f.slots.insert(pack(a), v);
        }
        f
    }

    pub fn x_pow(nu: u32, level: usize) -> Self {
        Self::monomial(FieldElement::ONE, nu, &vec![0; level])
    }

    /// The variable `y_j` at the given level.
    pub fn y(j: usize, level: usize) -> Self {
        assert!(j >= 1 && j <= level);
        let mut a = vec![0; level];
        a[j - 1] = 1;
        Self::monomial(FieldElement::ONE, 0, &a)
    }

    /// Univariate polynomial from dense x-coefficients.
    pub fn from_x_coeffs(mut coeffs: Vec<FieldElement>, level: usize) -> Self {
        let mut f = Self::zero(level);
        xpoly::trim(&mut coeffs);
        if !coeffs.is_empty() {
            f.slots.insert(0, coeffs);
        }
        f
    }

    pub fn from_terms<I>(level: usize, terms: I, ctx: &FieldCtx) -> Self
    where
        I: IntoIterator<Item = (u32, Vec<u8>, FieldElement)>,
    {
        let mut f = Self::zero(level);
        for (nu, a, c) in terms {
            assert!(a.len() <= level);
            f.add_term(c, nu, pack(&a), ctx);
        }
        f.normalize();
        f
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.slots.values().map(|v| v.iter().filter(|c| !c.is_zero()).count()).sum()
    }

    pub fn slots(&self) -> impl Iterator<Item = (YKey, &[FieldElement])> {
        self.slots.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    pub fn slot(&self, key: YKey) -> Option<&[FieldElement]> {
        self.slots.get(&key).map(|v| v.as_slice())
    }

    pub fn coeff(&self, nu: u32, a: &[u8]) -> FieldElement {
        self.slot(pack(a)).and_then(|v| v.get(nu as usize).copied()).unwrap_or_default()
    }

    /// The x-only part, as dense coefficients.
    pub fn x_part(&self) -> &[FieldElement] {
        self.slot(0).unwrap_or(&[])
    }

    /// Nonzero terms in canonical order (lexicographic on `(a_n..a_1, nu)`).
    pub fn terms(&self) -> Vec<(Monomial, FieldElement)> {
        let mut out = Vec::new();
        for (&k, v) in &self.slots {
            for (nu, &c) in v.iter().enumerate() {
                if !c.is_zero() {
                    out.push((Monomial { nu: nu as u32, a: unpack(k, self.level) }, c));
                }
            }
        }
        out
    }

    pub fn x_degree(&self) -> Option<usize> {
        self.slots.values().map(|v| v.len() - 1).max()
    }

    pub fn max_y_exponent(&self) -> u8 {
        self.slots.keys().flat_map(|&k| (1..=self.level).map(move |j| exponent(k, j))).max().unwrap_or(0)
    }

    pub fn is_reduced(&self, p: u32) -> bool {
        (self.max_y_exponent() as u32) < p
    }

    /// Same polynomial viewed at a higher level.
    pub fn lift(&self, level: usize) -> Self {
        assert!(level >= self.level && level <= MAX_LEVEL);
        SparsePoly { level, slots: self.slots.clone() }
    }

    /// Drops zero slots and trailing zeros.
    fn normalize(&mut self) {
        self.slots.retain(|_, v| {
            xpoly::trim(v);
            !v.is_empty()
        });
    }

    pub(crate) fn from_map(level: usize, map: HashMap<YKey, Vec<FieldElement>>) -> Self {
        let mut f = SparsePoly { level, slots: map.into_iter().collect() };
        f.normalize();
        f
    }

    fn add_term(&mut self, c: FieldElement, nu: u32, key: YKey, ctx: &FieldCtx) {
        let v = self.slots.entry(key).or_default();
        if v.len() <= nu as usize {
            v.resize(nu as usize + 1, FieldElement::ZERO);
        }
        v[nu as usize] = ctx.add(v[nu as usize], c);
    }

    /// Adds a slot's contents at `key`.
    pub fn add_slot(&mut self, key: YKey, coeffs: &[FieldElement], ctx: &FieldCtx) {
        let v = self.slots.entry(key).or_default();
        xpoly::add_assign(v, coeffs, ctx);
        xpoly::trim(v);
        if v.is_empty() {
            self.slots.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &SparsePoly, ctx: &FieldCtx) {
        self.level = self.level.max(other.level);
        for (&k, v) in &other.slots {
            self.add_slot(k, v, ctx);
        }
    }

    pub fn add(&self, other: &SparsePoly, ctx: &FieldCtx) -> SparsePoly {
        let mut out = self.clone();
        out.add_assign(other, ctx);
        out
    }

    pub fn neg(&self, ctx: &FieldCtx) -> SparsePoly {
        self.map_coeffs(|c| ctx.neg(c))
    }

    pub fn sub(&self, other: &SparsePoly, ctx: &FieldCtx) -> SparsePoly {
        self.add(&other.neg(ctx), ctx)
    }

    pub fn scale(&self, c: FieldElement, ctx: &FieldCtx) -> SparsePoly {
        self.map_coeffs(|x| ctx.mul(x, c))
    }

    pub fn map_coeffs(&self, f: impl Fn(FieldElement) -> FieldElement) -> SparsePoly {
        let mut out = SparsePoly { level: self.level, slots: BTreeMap::new() };
        for (&k, v) in &self.slots {
            out.slots.insert(k, v.iter().map(|&c| if c.is_zero() { c } else { f(c) }).collect());
        }
        out.normalize();
        out
    }

    /// Multiplies by `x^shift`.
    pub fn shift_x(&self, shift: usize) -> SparsePoly {
        let mut out = self.clone();
        for v in out.slots.values_mut() {
            v.splice(0..0, std::iter::repeat_n(FieldElement::ZERO, shift));
        }
        out
    }

    /// Product without any y-reduction.
    pub fn mul_unreduced(&self, other: &SparsePoly, ctx: &FieldCtx) -> Result<SparsePoly> {
        let mut acc: HashMap<YKey, Vec<FieldElement>> = HashMap::new();
        for (&ka, va) in &self.slots {
            for (&kb, vb) in &other.slots {
                let key = add_keys(ka, kb)?;
                xpoly::mul_acc(acc.entry(key).or_default(), va, vb, ctx);
            }
        }
        Ok(Self::from_map(self.level.max(other.level), acc))
    }

    pub fn pow_unreduced(&self, e: u32, ctx: &FieldCtx) -> Result<SparsePoly> {
        let mut r = SparsePoly::one(self.level);
        for _ in 0..e {
            r = r.mul_unreduced(self, ctx)?;
        }
        Ok(r)
    }

    /// `c * x^nu * y^a` for `c != 0`.
    pub fn format(&self, ctx: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms().into_iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            s.push_str(&ctx.format(c));
            if m.nu > 0 {
                let _ = write!(s, " * x^{}", m.nu);
            }
            for (j, &e) in m.a.iter().enumerate() {
                if e > 0 {
                    let _ = write!(s, " * y{}^{}", j + 1, e);
                }
            }
        }
        s
    }
}

/// Pole orders `d_j` of `x`-adjoined layers at the point over infinity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleProfile {
    pub p: u64,
    pub d: Vec<u64>,
}

impl PoleProfile {
    pub fn new(p: u32, d: Vec<u64>) -> Self {
        PoleProfile { p: p as u64, d }
    }

    pub fn levels(&self) -> usize {
        self.d.len()
    }

    /// Pole order of `x^nu y^a` at the point over infinity at level n.
    #[inline]
    pub fn weight(&self, n: usize, nu: u64, key: YKey) -> u64 {
        let p = self.p;
        let mut w = nu * p.pow(n as u32);
        for j in 1..=n {
            let e = exponent(key, j) as u64;
            if e > 0 {
                w += e * self.d[j - 1] * p.pow((n - j) as u32);
            }
        }
        w
    }

    /// Pole order of the slot part `y^a` at level n.
    #[inline]
    pub fn slot_weight(&self, n: usize, key: YKey) -> u64 {
        self.weight(n, 0, key)
    }

    /// Largest pole order and its term, for reduced `f` at level n.
    pub fn lead(&self, f: &SparsePoly, n: usize) -> Result<Option<(u64, u32, YKey, FieldElement)>> {
        if n < f.level() && f.max_y_exponent() > 0 {
            let above = f.slots().any(|(k, _)| (n + 1..=f.level()).any(|j| exponent(k, j) > 0));
            if above {
                return Err(Error::LevelMismatch(f.level(), n));
            }
        }
        if n > self.levels() {
            return Err(Error::InsufficientLevels(format!("pole profile has {} levels, need {n}", self.levels())));
        }
        if !f.is_reduced(self.p as u32) {
            return Err(Error::InternalConsistency("valuation of an unreduced polynomial".into()));
        }
        let pn = self.p.pow(n as u32);
        let mut best: Option<(u64, u32, YKey, FieldElement)> = None;
        let mut tie = false;
        for (k, v) in f.slots() {
            let nu = v.len() - 1;
            let w = self.slot_weight(n, k) + nu as u64 * pn;
            match best {
                Some((bw, ..)) if bw > w => {}
                Some((bw, ..)) if bw == w => tie = true,
                _ => {
                    best = Some((w, nu as u32, k, v[nu]));
                    tie = false;
                }
            }
        }
        if tie {
            return Err(Error::InternalConsistency("two reduced monomials share a pole order".into()));
        }
        Ok(best)
    }

    pub fn pole_order(&self, f: &SparsePoly, n: usize) -> Result<Option<u64>> {
        Ok(self.lead(f, n)?.map(|(w, ..)| w))
    }
}

/// Valuation at the point over infinity; `None` encodes +∞.
pub fn infinity_valuation(f: &SparsePoly, profile: &PoleProfile, n: usize) -> Result<Option<i64>> {
    Ok(profile.pole_order(f, n)?.map(|w| -(w as i64)))
}

/// Commutative rings whose elements can be fed to Witt polynomials.
pub trait Ring {
    type Elem: Clone;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplies by the image of an integer.
    fn scale_int(&self, a: &Self::Elem, c: u32) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut result = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }
}

impl Ring for FieldCtx {
    type Elem = FieldElement;
    fn zero(&self) -> FieldElement {
        FieldElement::ZERO
    }
    fn one(&self) -> FieldElement {
        FieldElement::ONE
    }
    fn is_zero(&self, a: &FieldElement) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldCtx::add(self, *a, *b)
    }
    fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldCtx::neg(self, *a)
    }
    fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldCtx::mul(self, *a, *b)
    }
    fn scale_int(&self, a: &FieldElement, c: u32) -> FieldElement {
        FieldCtx::mul(self, *a, self.from_int(c as i64))
    }
    fn pow(&self, a: &FieldElement, e: u64) -> FieldElement {
        FieldCtx::pow(self, *a, e)
    }
}

/// The ring k[x, y_1..y_n]/(y_j^p - y_j - f_j), elements kept in reduced form.
#[derive(Clone, Copy)]
pub struct TowerRing<'a> {
    pub ctx: &'a FieldCtx,
    pub layers: &'a [SparsePoly],
}

impl<'a> TowerRing<'a> {
    pub fn new(ctx: &'a FieldCtx, layers: &'a [SparsePoly]) -> Self {
        TowerRing { ctx, layers }
    }

    /// The polynomial ring k[x].
    pub fn univariate(ctx: &'a FieldCtx) -> Self {
        TowerRing { ctx, layers: &[] }
    }

    pub fn level(&self) -> usize {
        self.layers.len()
    }

    pub fn reduce(&self, f: &SparsePoly) -> Result<SparsePoly> {
        if f.level() > self.layers.len() && f.max_y_exponent() as u32 >= self.ctx.p() {
            return Err(Error::InsufficientLevels(format!(
                "polynomial at level {} but only {} layers",
                f.level(),
                self.layers.len()
            )));
        }
        let map: HashMap<YKey, Vec<FieldElement>> = f.slots.iter().map(|(&k, v)| (k, v.clone())).collect();
        self.reduce_map(map, f.level())
    }

    pub(crate) fn reduce_map(&self, mut acc: HashMap<YKey, Vec<FieldElement>>, level: usize) -> Result<SparsePoly> {
        let ctx = self.ctx;
        let p = ctx.p() as u8;
        let top = level.min(self.layers.len());
        for j in (1..=top).rev() {
            let mut heap: BinaryHeap<(u8, YKey)> =
                acc.keys().filter(|&&k| exponent(k, j) >= p).map(|&k| (exponent(k, j), k)).collect();
            if heap.is_empty() {
                continue;
            }
            let layer = &self.layers[j - 1];
            let u = unit(j);
            while let Some((_, key)) = heap.pop() {
                let Some(coeffs) = acc.remove(&key) else { continue };
                if xpoly::is_zero(&coeffs) {
                    continue;
                }
                // y^e = y^{e-p} (y + f)
                let e1 = key - (p as u64 - 1) * u;
                if exponent(e1, j) >= p && !acc.contains_key(&e1) {
                    heap.push((exponent(e1, j), e1));
                }
                xpoly::add_assign(acc.entry(e1).or_default(), &coeffs, ctx);
                let e0 = key - p as u64 * u;
                for (fk, fv) in layer.slots() {
                    let k2 = add_keys(e0, fk)?;
                    if exponent(k2, j) >= p && !acc.contains_key(&k2) {
                        heap.push((exponent(k2, j), k2));
                    }
                    xpoly::mul_acc(acc.entry(k2).or_default(), &coeffs, fv, ctx);
                }
            }
        }
        Ok(SparsePoly::from_map(level, acc))
    }

    pub fn mul(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        let ctx = self.ctx;
        let mut acc: HashMap<YKey, Vec<FieldElement>> = HashMap::with_capacity(a.slots.len() * b.slots.len());
        for (&ka, va) in &a.slots {
            for (&kb, vb) in &b.slots {
                let key = add_keys(ka, kb).expect("exponent overflow in product");
                xpoly::mul_acc(acc.entry(key).or_default(), va, vb, ctx);
            }
        }
        self.reduce_map(acc, a.level.max(b.level)).expect("reduced operands cannot overflow")
    }

    pub fn pow(&self, a: &SparsePoly, e: u64) -> SparsePoly {
        Ring::pow(self, a, e)
    }
}

impl Ring for TowerRing<'_> {
    type Elem = SparsePoly;
    fn zero(&self) -> SparsePoly {
        SparsePoly::zero(0)
    }
    fn one(&self) -> SparsePoly {
        SparsePoly::one(0)
    }
    fn is_zero(&self, a: &SparsePoly) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        SparsePoly::add(a, b, self.ctx)
    }
    fn neg(&self, a: &SparsePoly) -> SparsePoly {
        SparsePoly::neg(a, self.ctx)
    }
    fn mul(&self, a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
        TowerRing::mul(self, a, b)
    }
    fn scale_int(&self, a: &SparsePoly, c: u32) -> SparsePoly {
        a.scale(self.ctx.from_int(c as i64), self.ctx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fe(ctx: &FieldCtx, n: i64) -> FieldElement {
        ctx.from_int(n)
    }

    #[test]
    fn arithmetic_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let x3 = SparsePoly::x_pow(3, 1);
        let y1 = SparsePoly::y(1, 1);
        let prod = x3.mul_unreduced(&y1, &f2).unwrap();
        assert_eq!(prod, SparsePoly::monomial(FieldElement::ONE, 3, &[1]));

        let s = SparsePoly::x_pow(1, 1).add(&y1, &f2);
        let sq = s.mul_unreduced(&s, &f2).unwrap();
        let expect = SparsePoly::x_pow(2, 1).add(&SparsePoly::monomial(FieldElement::ONE, 0, &[2]), &f2);
        assert_eq!(sq, expect);

        let f3 = FieldCtx::prime(3).unwrap();
        let xp1 = SparsePoly::x_pow(1, 0).add(&SparsePoly::one(0), &f3);
        let cube = xp1.pow_unreduced(3, &f3).unwrap();
        assert_eq!(cube, SparsePoly::x_pow(3, 0).add(&SparsePoly::one(0), &f3));
    }

    #[test]
    fn reduction_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let layers = vec![SparsePoly::x_pow(3, 0)];
        let ring = TowerRing::new(&f2, &layers);
        let y = SparsePoly::y(1, 1);
        let y2 = ring.reduce(&y.pow_unreduced(2, &f2).unwrap()).unwrap();
        assert_eq!(y2, y.add(&SparsePoly::x_pow(3, 1), &f2));
        let y3 = ring.reduce(&y.pow_unreduced(3, &f2).unwrap()).unwrap();
        let expect = SparsePoly::from_terms(
            1,
            vec![(3, vec![1], FieldElement::ONE), (0, vec![1], FieldElement::ONE), (3, vec![0], FieldElement::ONE)],
            &f2,
        );
        assert_eq!(y3, expect);
        assert_eq!(ring.reduce(&y3).unwrap(), y3);
        assert_eq!(ring.mul(&y2, &y), y3);
    }

    #[test]
    fn reduction_needs_layers() {
        let f2 = FieldCtx::prime(2).unwrap();
        let ring = TowerRing::univariate(&f2);
        let y2 = SparsePoly::monomial(FieldElement::ONE, 0, &[2]);
        assert!(ring.reduce(&y2).is_err());
    }

    #[test]
    fn valuation_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let prof = PoleProfile::new(2, vec![3]);
        assert_eq!(infinity_valuation(&SparsePoly::x_pow(3, 1), &prof, 1).unwrap(), Some(-6));
        let prof5 = PoleProfile::new(2, vec![5]);
        let f = SparsePoly::from_terms(
            1,
            vec![(8, vec![0], FieldElement::ONE), (5, vec![1], FieldElement::ONE), (3, vec![1], FieldElement::ONE)],
            &f2,
        );
        assert_eq!(infinity_valuation(&f, &prof5, 1).unwrap(), Some(-16));
        assert_eq!(infinity_valuation(&SparsePoly::one(2), &prof5, 1).unwrap(), Some(0));
        assert_eq!(infinity_valuation(&SparsePoly::zero(1), &prof5, 1).unwrap(), None);
        let unreduced = SparsePoly::monomial(FieldElement::ONE, 0, &[2]);
        assert!(infinity_valuation(&unreduced, &prof5, 1).is_err());
    }

    #[test]
    fn format_is_readable() {
        let f3 = FieldCtx::prime(3).unwrap();
        let f = SparsePoly::from_terms(1, vec![(2, vec![1], fe(&f3, 2)), (0, vec![0], FieldElement::ONE)], &f3);
        assert_eq!(f.format(&f3), "1 + 2 * x^2 * y1^1");
    }

    fn arb_poly(p: u32, level: usize) -> impl Strategy<Value = Vec<(u32, Vec<u8>, u32)>> {
        prop::collection::vec((0u32..6, prop::collection::vec(0u8..p as u8, level), 1u32..p), 0..6)
    }

    proptest! {
        #[test]
        fn tower_ring_is_commutative_and_associative(
            a in arb_poly(3, 2), b in arb_poly(3, 2), c in arb_poly(3, 2)
        ) {
            let f3 = FieldCtx::prime(3).unwrap();
            let layers = vec![
                SparsePoly::from_terms(0, vec![(7, vec![], FieldElement::ONE)], &f3),
                SparsePoly::from_terms(1, vec![(4, vec![2], f3.from_int(2)), (14, vec![0], FieldElement::ONE)], &f3),
            ];
            let ring = TowerRing::new(&f3, &layers);
            let mk = |t: &Vec<(u32, Vec<u8>, u32)>| SparsePoly::from_terms(2, t.iter().map(|(n, a, c)| (*n, a.clone(), f3.from_int(*c as i64))), &f3);
            let (a, b, c) = (mk(&a), mk(&b), mk(&c));
            prop_assert_eq!(ring.mul(&a, &b), ring.mul(&b, &a));
            prop_assert_eq!(ring.mul(&ring.mul(&a, &b), &c), ring.mul(&a, &ring.mul(&b, &c)));
            let lhs = ring.mul(&a, &b.add(&c, &f3));
            let rhs = ring.mul(&a, &b).add(&ring.mul(&a, &c), &f3);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn valuation_is_additive_on_x_polys(a in prop::collection::vec(0u32..3, 1..8), b in prop::collection::vec(0u32..3, 1..8)) {
            let f3 = FieldCtx::prime(3).unwrap();
            let fa = SparsePoly::from_x_coeffs(a.iter().map(|&c| f3.from_int(c as i64)).collect(), 1);
            let fb = SparsePoly::from_x_coeffs(b.iter().map(|&c| f3.from_int(c as i64)).collect(), 1);
            let prof = PoleProfile::new(3, vec![7]);
            let va = infinity_valuation(&fa, &prof, 1).unwrap();
            let vb = infinity_valuation(&fb, &prof, 1).unwrap();
            let vab = infinity_valuation(&fa.mul_unreduced(&fb, &f3).unwrap(), &prof, 1).unwrap();
            match (va, vb) {
                (Some(x), Some(y)) => prop_assert_eq!(vab, Some(x + y)),
                _ => prop_assert_eq!(vab, None),
            }
        }
    }
}
