//! Towers `F(Y) - Y = W` over the projective line, branched only at infinity.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};
use crate::poly::{PoleProfile, SparsePoly, TowerRing};
use crate::standard_form::to_standard_form;
use crate::witt::{max_len, WittCtx, WittVector};

pub type Rational = Ratio<i128>;

/// One summand `p^v [c x^i]` of the right-hand side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Term {
    pub v: u32,
    pub c: FieldElement,
    pub i: u64,
}

#[derive(Clone, Debug)]
pub struct TowerSpec {
    pub field: Arc<FieldCtx>,
    pub terms: Vec<Term>,
    pub name: String,
}

impl TowerSpec {
    pub fn new(field: Arc<FieldCtx>, terms: Vec<Term>, name: impl Into<String>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("no terms".into()));
        }
        for t in &terms {
            if t.c.is_zero() {
                return Err(Error::InvalidSpec(format!("zero coefficient on x^{}", t.i)));
            }
            if t.c.index() >= field.order() {
                return Err(Error::InvalidSpec("coefficient outside the field".into()));
            }
            if t.i == 0 {
                return Err(Error::InvalidSpec("constant terms are not supported; every term needs a pole at infinity".into()));
            }
        }
        Ok(TowerSpec { field, terms, name: name.into() })
    }

    /// The basic tower `F(Y) - Y = [x^d]` over GF(p).
    pub fn basic(p: u32, d: u64) -> Result<Self> {
        let field = Arc::new(FieldCtx::prime(p)?);
        Self::new(field, vec![Term { v: 0, c: FieldElement::ONE, i: d }], format!("p{p}d{d}"))
    }

    /// Prime-field tower from `(v, c, i)` triples with integer coefficients.
    pub fn from_int_terms(p: u32, terms: &[(u32, i64, u64)], name: &str) -> Result<Self> {
        let field = Arc::new(FieldCtx::prime(p)?);
        let terms = terms.iter().map(|&(v, c, i)| Term { v, c: field.from_int(c), i }).collect();
        Self::new(field, terms, name)
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    pub fn is_normalized(&self) -> bool {
        let p = self.p() as u64;
        self.terms.iter().all(|t| t.i % p != 0)
    }

    /// Replaces `p^v [c x^{pm}]` by `p^v [c^{1/p} x^m]` until every exponent is prime to p.
    pub fn normalize(&self) -> TowerSpec {
        let p = self.p() as u64;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let (mut c, mut i) = (t.c, t.i);
                while i % p == 0 {
                    i /= p;
                    c = self.field.frobenius_inv(c);
                }
                Term { v: t.v, c, i }
            })
            .collect();
        TowerSpec { field: self.field.clone(), terms, name: self.name.clone() }
    }

    /// Canonical text used for hashing and cache keys.
    pub fn canonical_string(&self) -> String {
        let mut terms: Vec<String> =
            self.terms.iter().map(|t| format!("({},{},{})", t.v, self.field.format(t.c), t.i)).collect();
        terms.sort();
        format!("p={};k={};modulus={:?};terms={}", self.p(), self.field.k(), self.field.modulus(), terms.join(""))
    }

    /// The ramification invariant `d` when every normalized term is a Teichmüller lift.
    pub fn basic_invariant(&self) -> Option<u64> {
        let n = self.normalize();
        if n.terms.is_empty() || n.terms.iter().any(|t| t.v != 0) {
            return None;
        }
        n.terms.iter().map(|t| t.i).max()
    }

    /// Hex digest of the normalized canonical string; equal towers share it.
    pub fn spec_hash(&self) -> String {
        let digest = Sha256::digest(self.normalize().canonical_string().as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// For each exponent, the index of the first nonzero component of the summed
/// coefficients in `W_n(k)`; `n` means all components up to `n` vanish.
pub fn coefficient_valuations(spec: &TowerSpec, n: usize) -> Result<BTreeMap<u64, usize>> {
    let spec = spec.normalize();
    let mut groups: BTreeMap<u64, Vec<Term>> = BTreeMap::new();
    for t in &spec.terms {
        groups.entry(t.i).or_default().push(*t);
    }
    let field = &*spec.field;
    let mut out = BTreeMap::new();
    let mut witt: Option<WittCtx> = None;
    for (i, ts) in groups {
        if let [t] = ts.as_slice() {
            out.insert(i, (t.v as usize).min(n));
            continue;
        }
        let len = n.min(max_len(field.p()));
        if len == 0 {
            out.insert(i, 0);
            continue;
        }
        if witt.as_ref().map(|w| w.len()) != Some(len) {
            witt = Some(WittCtx::new(field.p(), len)?);
        }
        let w = witt.as_ref().expect("initialised above");
        let mut total = w.zero(field);
        for t in ts {
            let mut comps = vec![FieldElement::ZERO; len];
            if (t.v as usize) < len {
                comps[t.v as usize] = field.pow(t.c, (field.p() as u64).pow(t.v));
            }
            total = w.add(field, &total, &WittVector::new(comps))?;
        }
        let first = total.comps.iter().position(|c| !c.is_zero()).unwrap_or(len);
        if first == len && len < n {
            return Err(Error::InvalidSpec(format!(
                "coefficients of x^{i} cancel in W_{len}(k); deeper cancellation is beyond the supported Witt length"
            )));
        }
        out.insert(i, first);
    }
    Ok(out)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RamificationData {
    /// Upper breaks, index 0 is level 1.
    pub s: Vec<u64>,
    pub u: Vec<u64>,
    /// Lower breaks.
    pub d: Vec<u64>,
    pub g: Vec<u64>,
}

impl RamificationData {
    pub fn levels(&self) -> usize {
        self.s.len()
    }
}

/// Upper breaks `s(1..=n)`.
pub fn upper_breaks(spec: &TowerSpec, n: usize) -> Result<Vec<u64>> {
    let p = spec.p() as u64;
    let vals = coefficient_valuations(spec, n)?;
    (1..=n)
        .map(|m| {
            vals.iter()
                .filter(|(_, &v)| v < m)
                .map(|(&i, &v)| i * p.pow((m - 1 - v) as u32))
                .max()
                .ok_or(Error::NotTotallyRamified(m))
        })
        .collect()
}

fn phi(p: u64, j: u32) -> u64 {
    p.pow(j) - p.pow(j - 1)
}

/// `d(n) = p^{n-1} s(n) - sum_{j<n} phi(p^j) s(j)`.
pub fn lower_breaks(p: u32, s: &[u64]) -> Result<Vec<u64>> {
    let p = p as u64;
    let mut out = Vec::with_capacity(s.len());
    for n in 1..=s.len() {
        if s[n - 1] == 0 {
            return Err(Error::MalformedBreaks("breaks must be positive".into()));
        }
        if n > 1 && s[n - 1] < p * s[n - 2] {
            return Err(Error::MalformedBreaks(format!("s({n}) = {} < p * s({}) = {}", s[n - 1], n - 1, p * s[n - 2])));
        }
        let top = p.pow(n as u32 - 1) as u128 * s[n - 1] as u128;
        let below: u128 = (1..n).map(|j| phi(p, j as u32) as u128 * s[j - 1] as u128).sum();
        let d = top.checked_sub(below).filter(|&d| d > 0).ok_or_else(|| Error::MalformedBreaks("nonpositive lower break".into()))?;
        out.push(u64::try_from(d).map_err(|_| Error::MalformedBreaks("lower break overflow".into()))?);
    }
    Ok(out)
}

/// Genus of level n from the upper breaks of levels `1..=n`.
pub fn genus_from_breaks(p: u32, s: &[u64]) -> u64 {
    let p = p as i128;
    let n = s.len() as u32;
    let mut two_g_minus_2 = -2 * p.pow(n);
    for (i, &si) in s.iter().enumerate() {
        let i = i as u32 + 1;
        two_g_minus_2 += (p.pow(i) - p.pow(i - 1)) * (si as i128 + 1);
    }
    ((two_g_minus_2 + 2) / 2) as u64
}

pub fn ramification_data(spec: &TowerSpec, n: usize) -> Result<RamificationData> {
    let s = upper_breaks(spec, n)?;
    let d = lower_breaks(spec.p(), &s)?;
    let g = (1..=n).map(|m| genus_from_breaks(spec.p(), &s[..m])).collect();
    let u = s.iter().map(|x| x + 1).collect();
    Ok(RamificationData { s, u, d, g })
}

pub fn genus(spec: &TowerSpec, n: usize) -> Result<u64> {
    Ok(genus_from_breaks(spec.p(), &upper_breaks(spec, n)?))
}

/// Towers branched at a single point of the projective line have p-rank zero.
pub fn p_rank(_spec: &TowerSpec, _n: usize) -> u64 {
    0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasicClosedForm {
    pub genus: u64,
    pub lower_break: u64,
    pub upper_break: u64,
}

/// Genus and breaks of level n of a basic tower with invariant d.
pub fn closed_form_basic(p: u32, d: u64, n: u32) -> Result<BasicClosedForm> {
    let (pi, di) = (p as i128, d as i128);
    if d.is_multiple_of(p as u64) {
        return Err(Error::InvalidSpec(format!("p = {p} divides d = {d}")));
    }
    if n == 0 {
        return Ok(BasicClosedForm { genus: 0, lower_break: 0, upper_break: 0 });
    }
    let num = di * pi.pow(2 * n) - (pi + 1) * pi.pow(n) + (pi + 1 - di);
    let genus = num / (2 * (pi + 1));
    let lower = di * (pi.pow(2 * n - 1) + 1) / (pi + 1);
    Ok(BasicClosedForm { genus: genus as u64, lower_break: lower as u64, upper_break: d * (p as u64).pow(n - 1) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Monodromy {
    /// `s(n) = c + d p^{n-1}` for `n >= from_level`.
    Stable { c: Rational, d: Rational, from_level: usize },
    /// `s(n) = c[n mod m] + d p^{n-1}` for `n >= from_level`.
    Periodic { m: usize, c: Vec<Rational>, d: Rational, from_level: usize },
    Unclassified,
}

/// Fits `s(n) = c(n mod m) + d p^{n-1}` over the longest trailing window; returns the
/// window start if it has at least `max(3, 2m)` points.
fn fit_breaks(p: u32, s: &[u64], m: usize) -> Option<(usize, Vec<Rational>, Rational)> {
    let n_max = s.len();
    let need = 3.max(2 * m);
    if n_max < need {
        return None;
    }
    let pw = |n: usize| Rational::from_integer((p as i128).pow(n as u32 - 1));
    let sv = |n: usize| Rational::from_integer(s[n - 1] as i128);
    // d from the last two levels in the same residue class
    let (a, b) = (n_max, n_max - m);
    let d = (sv(a) - sv(b)) / (pw(a) - pw(b));
    let c_of = |n: usize| sv(n) - d * pw(n);
    let mut c = vec![Rational::from_integer(0); m];
    for n in (n_max + 1 - m)..=n_max {
        c[n % m] = c_of(n);
    }
    let mut start = n_max + 1 - m;
    while start > 1 && c_of(start - 1) == c[(start - 1) % m] {
        start -= 1;
    }
    (n_max + 1 - start >= need).then_some((start, c, d))
}

/// Classifies upper breaks `s(1..=N)` as stable or periodic monodromy.
pub fn classify_breaks(p: u32, s: &[u64]) -> Result<Monodromy> {
    if s.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::MalformedBreaks("upper breaks must increase strictly".into()));
    }
    if let Some((from_level, c, d)) = fit_breaks(p, s, 1) {
        return Ok(Monodromy::Stable { c: c[0], d, from_level });
    }
    for m in 2..=s.len() / 2 {
        if let Some((from_level, c, d)) = fit_breaks(p, s, m) {
            return Ok(Monodromy::Periodic { m, c, d, from_level });
        }
    }
    Ok(Monodromy::Unclassified)
}

pub fn classify_monodromy(spec: &TowerSpec, n: usize) -> Result<Monodromy> {
    classify_breaks(spec.p(), &upper_breaks(spec, n)?)
}

/// Options for building a tower.
#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    /// Directory holding cached Witt addition polynomials.
    pub witt_cache: Option<std::path::PathBuf>,
}

/// Layer equations in standard form, together with the ramification data.
#[derive(Clone, Debug)]
pub struct TowerState {
    pub spec: TowerSpec,
    pub ram: RamificationData,
    pub profile: PoleProfile,
    /// Standard-form right-hand sides `f_1..f_n`; `f_m` lives at level `m - 1`.
    pub layers: Vec<SparsePoly>,
    /// The same equations before standard-form reduction.
    pub raw_layers: Vec<SparsePoly>,
    /// Original generator `y_m = y'_m + shifts[m-1]`.
    pub shifts: Vec<SparsePoly>,
    rhs: WittVector<SparsePoly>,
    witt: Arc<WittCtx>,
}

impl TowerState {
    pub fn build(spec: &TowerSpec, n: usize) -> Result<Self> {
        Self::build_with(spec, n, &BuildOptions::default())
    }

    pub fn build_with(spec: &TowerSpec, n: usize, opts: &BuildOptions) -> Result<Self> {
        let spec = spec.normalize();
        let p = spec.p();
        if n == 0 || n > max_len(p) {
            return Err(Error::WittLength { p, len: n });
        }
        let ram = ramification_data(&spec, n)?;
        let witt = Arc::new(WittCtx::load_or_compute(p, n, opts.witt_cache.as_deref())?);
        let triples: Vec<(u32, FieldElement, u32)> = spec
            .terms
            .iter()
            .map(|t| u32::try_from(t.i).map(|i| (t.v, t.c, i)))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidSpec("exponent too large".into()))?;
        let rhs = witt.rhs_assemble(&spec.field, &triples)?;
        let mut state = TowerState {
            profile: PoleProfile::new(p, Vec::new()),
            spec,
            ram,
            layers: Vec::new(),
            raw_layers: Vec::new(),
            shifts: Vec::new(),
            rhs,
            witt,
        };
        for _ in 0..n {
            state.push_level()?;
        }
        Ok(state)
    }

    pub fn levels(&self) -> usize {
        self.layers.len()
    }

    pub fn field(&self) -> &FieldCtx {
        &self.spec.field
    }

    pub fn p(&self) -> u32 {
        self.spec.p()
    }

    pub fn genus(&self, n: usize) -> u64 {
        self.ram.g[n - 1]
    }

    /// Ring of functions regular away from infinity at level n.
    pub fn ring(&self, n: usize) -> TowerRing<'_> {
        TowerRing::new(self.field(), &self.layers[..n])
    }

    fn push_level(&mut self) -> Result<()> {
        let m = self.layers.len() + 1;
        let below = m - 1;
        let ctx = self.spec.field.clone();
        let ring = TowerRing::new(&ctx, &self.layers);
        // original generators expressed in the standard-form variables
        let ys: Vec<SparsePoly> = (1..=below)
            .map(|j| SparsePoly::y(j, below).add(&self.shifts[j - 1].lift(below), &ctx))
            .collect();
        let ws: Vec<SparsePoly> = self.rhs.comps[..below].iter().map(|w| w.lift(below)).collect();
        let carry = self.witt.carry(&ring, below, &ys, &ws);
        let raw = ring.reduce(&self.rhs.comps[below].lift(below).add(&carry, &ctx))?;
        let target = self.ram.d[below];
        let sf = to_standard_form(&raw, ring, &self.profile, target)?;
        let check = self.profile.pole_order(&sf.f, below)?;
        if check != Some(target) {
            return Err(Error::InternalConsistency(format!("level {m}: pole order {check:?} != lower break {target}")));
        }
        self.raw_layers.push(raw);
        self.layers.push(sf.f);
        self.shifts.push(sf.shift);
        self.profile.d.push(target);
        Ok(())
    }
}

/// Pre-standard-form layer equations `f_1..f_n`, each written in the
/// standard-form generators of the levels below it.
pub fn layer_equations(spec: &TowerSpec, n: usize) -> Result<Vec<SparsePoly>> {
    Ok(TowerState::build(spec, n)?.raw_layers)
}

/// Builds with a Witt cache directory.
pub fn build_cached(spec: &TowerSpec, n: usize, witt_cache: Option<&Path>) -> Result<TowerState> {
    TowerState::build_with(spec, n, &BuildOptions { witt_cache: witt_cache.map(Path::to_path_buf) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn normalization_examples() {
        let s = TowerSpec::from_int_terms(2, &[(0, 1, 6)], "t").unwrap().normalize();
        assert_eq!(s.terms, vec![Term { v: 0, c: FieldElement::ONE, i: 3 }]);
        let f9 = Arc::new(FieldCtx::new(3, 2).unwrap());
        let c = f9.gen();
        let s = TowerSpec::new(f9.clone(), vec![Term { v: 1, c, i: 9 }], "t").unwrap().normalize();
        assert_eq!(s.terms, vec![Term { v: 1, c: f9.frobenius_inv(f9.frobenius_inv(c)), i: 1 }]);
        let s = TowerSpec::from_int_terms(2, &[(0, 1, 3)], "t").unwrap();
        assert_eq!(s.normalize().terms, s.terms);
        assert!(TowerSpec::from_int_terms(2, &[(0, 0, 3)], "t").is_err());
        assert!(TowerSpec::from_int_terms(2, &[(0, 1, 0)], "t").is_err());
    }

    #[test]
    fn valuation_examples() {
        let s = TowerSpec::from_int_terms(2, &[(0, 1, 3)], "t").unwrap();
        assert_eq!(coefficient_valuations(&s, 2).unwrap(), BTreeMap::from([(3, 0)]));
        let s = TowerSpec::from_int_terms(2, &[(1, 1, 5), (0, 1, 3)], "t").unwrap();
        assert_eq!(coefficient_valuations(&s, 2).unwrap(), BTreeMap::from([(3, 0), (5, 1)]));
        let s = TowerSpec::from_int_terms(2, &[(0, 1, 3), (0, 1, 3)], "t").unwrap();
        assert_eq!(coefficient_valuations(&s, 2).unwrap(), BTreeMap::from([(3, 1)]));
    }

    #[test]
    fn break_examples() {
        let s = TowerSpec::basic(3, 7).unwrap();
        assert_eq!(upper_breaks(&s, 3).unwrap(), vec![7, 21, 63]);
        let s = TowerSpec::from_int_terms(2, &[(0, 1, 3), (1, 1, 5)], "t").unwrap();
        assert_eq!(upper_breaks(&s, 3).unwrap(), vec![3, 6, 12]);
        let s = TowerSpec::from_int_terms(5, &[(0, 2, 4)], "t").unwrap();
        assert_eq!(upper_breaks(&s, 1).unwrap(), vec![4]);
        let s = TowerSpec::from_int_terms(2, &[(1, 1, 3)], "t").unwrap();
        assert!(matches!(upper_breaks(&s, 2), Err(Error::NotTotallyRamified(1))));
    }

    #[test]
    fn lower_break_examples() {
        assert_eq!(lower_breaks(3, &[7, 21, 63]).unwrap(), vec![7, 49, 427]);
        assert_eq!(lower_breaks(3, &[7, 21, 63, 189]).unwrap(), vec![7, 49, 427, 3829]);
        assert_eq!(lower_breaks(2, &[7, 14, 28]).unwrap(), vec![7, 21, 77]);
        assert_eq!(lower_breaks(5, &[4]).unwrap(), vec![4]);
        assert!(lower_breaks(2, &[7, 10]).is_err());
    }

    #[test]
    fn genus_examples() {
        let s = TowerSpec::basic(3, 7).unwrap();
        let g: Vec<u64> = (1..=4).map(|n| genus(&s, n).unwrap()).collect();
        assert_eq!(g, vec![6, 66, 624, 5700]);
        let s = TowerSpec::basic(2, 7).unwrap();
        let g: Vec<u64> = (1..=3).map(|n| genus(&s, n).unwrap()).collect();
        assert_eq!(g, vec![3, 16, 70]);
        assert_eq!(p_rank(&s, 3), 0);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_basic(3, 7, 2).unwrap(), BasicClosedForm { genus: 66, lower_break: 49, upper_break: 21 });
        assert_eq!(closed_form_basic(2, 7, 1).unwrap(), BasicClosedForm { genus: 3, lower_break: 7, upper_break: 7 });
        assert_eq!(closed_form_basic(2, 21, 2).unwrap().genus, 51);
        assert!(closed_form_basic(3, 9, 1).is_err());
    }

    #[test]
    fn closed_forms_agree_with_breaks() {
        for p in [2u32, 3, 5, 7] {
            for d in 1..40u64 {
                if d % p as u64 == 0 {
                    continue;
                }
                let spec = TowerSpec::basic(p, d).unwrap();
                let ram = ramification_data(&spec, 5).unwrap();
                for n in 1..=5 {
                    let cf = closed_form_basic(p, d, n as u32).unwrap();
                    assert_eq!(ram.g[n - 1], cf.genus);
                    assert_eq!(ram.d[n - 1], cf.lower_break);
                    assert_eq!(ram.s[n - 1], cf.upper_break);
                    if n > 1 {
                        let pp = p as u64;
                        assert!(ram.d[n - 1] >= (pp * pp - pp + 1) * ram.d[n - 2]);
                    }
                }
            }
        }
    }

    #[test]
    fn monodromy_examples() {
        let s = TowerSpec::basic(3, 7).unwrap();
        assert_eq!(classify_monodromy(&s, 5).unwrap(), Monodromy::Stable { c: q(0), d: q(7), from_level: 1 });
        // p^{2i-1}[x^{(d+2) 2^{2i-1} - 1}] added to [x^d]
        let d = 5i64;
        let terms: Vec<(u32, i64, u64)> = std::iter::once((0, 1, d as u64))
            .chain((1..=3).map(|i| (2 * i - 1, 1, ((d + 2) * (1 << (2 * i - 1)) - 1) as u64)))
            .collect();
        let s = TowerSpec::from_int_terms(2, &terms, "periodic").unwrap();
        match classify_monodromy(&s, 6).unwrap() {
            Monodromy::Periodic { m, c, d: slope, from_level } => {
                assert_eq!(m, 2);
                assert_eq!(slope, q(d as i128 + 2));
                assert_eq!(c, vec![q(-1), q(-2)]);
                assert_eq!(from_level, 1);
            }
            other => panic!("expected periodic, got {other:?}"),
        }
        assert!(classify_breaks(2, &[3, 3, 3]).is_err());
        assert_eq!(classify_breaks(2, &[1, 5, 11, 29, 60, 150]).unwrap(), Monodromy::Unclassified);
    }

    #[test]
    fn layer_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let one = FieldElement::ONE;
        let s = TowerSpec::from_int_terms(2, &[(0, 1, 3)], "t").unwrap();
        let layers = layer_equations(&s, 2).unwrap();
        assert_eq!(layers[0], SparsePoly::x_pow(3, 0));
        assert_eq!(layers[1], SparsePoly::monomial(one, 3, &[1]));

        let s = TowerSpec::from_int_terms(2, &[(0, 1, 5), (0, 1, 3)], "t").unwrap();
        let st = TowerState::build(&s, 2).unwrap();
        assert_eq!(st.raw_layers[0], SparsePoly::from_terms(0, vec![(5, vec![], one), (3, vec![], one)], &f2));
        let f2_expect = SparsePoly::from_terms(1, vec![(8, vec![0], one), (5, vec![1], one), (3, vec![1], one)], &f2);
        assert_eq!(st.raw_layers[1], f2_expect);
        let std_expect = SparsePoly::from_terms(1, vec![(4, vec![0], one), (5, vec![1], one), (3, vec![1], one)], &f2);
        assert_eq!(st.layers[1], std_expect);

        let one_level = layer_equations(&TowerSpec::basic(3, 7).unwrap(), 1).unwrap();
        assert_eq!(one_level, vec![SparsePoly::x_pow(7, 0)]);
    }

    #[test]
    fn standard_form_hits_lower_breaks() {
        for (p, terms, n) in [
            (2u32, vec![(0u32, 1i64, 7u64)], 4usize),
            (2, vec![(0, 1, 21), (0, 1, 19), (0, 1, 15), (0, 1, 13), (0, 1, 9)], 3),
            (3, vec![(0, 1, 5), (0, 2, 2)], 3),
            (3, vec![(0, 1, 7)], 3),
            (2, vec![(0, 1, 3), (1, 1, 5)], 3),
            (5, vec![(0, 1, 3)], 2),
        ] {
            let spec = TowerSpec::from_int_terms(p, &terms, "t").unwrap();
            let st = TowerState::build(&spec, n).unwrap();
            for m in 1..=n {
                assert_eq!(st.profile.pole_order(&st.layers[m - 1], m - 1).unwrap(), Some(st.ram.d[m - 1]));
            }
        }
    }
}
