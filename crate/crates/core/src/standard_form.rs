//! Rewriting layer equations so that their pole order equals the lower break.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gf::FieldCtx;
use crate::poly::{exponent, unpack, Monomial, PoleProfile, SparsePoly, TowerRing, YKey};

/// The unique reduced monomial `x^nu y^a` at `level` with pole order `w`.
pub fn monomial_with_pole_order(w: u64, profile: &PoleProfile, level: usize) -> Result<Monomial> {
    if level > profile.levels() {
        return Err(Error::InsufficientLevels(format!("profile has {} levels, asked for {level}", profile.levels())));
    }
    let p = profile.p;
    let mut rest = w;
    let mut a = vec![0u8; level];
    for j in (1..=level).rev() {
        let dj = profile.d[j - 1];
        // a_j * d_j = rest (mod p)
        let inv = (1..p).find(|&t| (t * (dj % p)) % p == 1).ok_or(Error::MalformedBreaks(format!("p divides d_{j} = {dj}")))?;
        let aj = (rest % p) * inv % p;
        if aj * dj > rest {
            return Err(Error::NoMonomial { order: w, level });
        }
        rest = (rest - aj * dj) / p;
        a[j - 1] = aj as u8;
    }
    Ok(Monomial { nu: u32::try_from(rest).map_err(|_| Error::NoMonomial { order: w, level })?, a })
}

/// Reduced p-th powers of monomials at a fixed level, memoised on the y-part.
pub struct FrobeniusPowers<'a> {
    ring: TowerRing<'a>,
    level: usize,
    /// `ypow[j-1][e] = (y_j^p)^e` reduced, for `e < p`.
    ypow: Vec<Vec<SparsePoly>>,
    memo: HashMap<YKey, SparsePoly>,
}

impl<'a> FrobeniusPowers<'a> {
    pub fn new(ring: TowerRing<'a>, level: usize) -> Self {
        let p = ring.ctx.p() as u64;
        let ypow = (1..=level)
            .map(|j| {
                let yp = ring.pow(&SparsePoly::y(j, level), p);
                let mut v = vec![SparsePoly::one(level)];
                for e in 1..p as usize {
                    v.push(ring.mul(&v[e - 1], &yp));
                }
                v
            })
            .collect();
        FrobeniusPowers { ring, level, ypow, memo: HashMap::new() }
    }

    /// `(x^nu y^a)^p` reduced.
    pub fn power(&mut self, m: &Monomial) -> SparsePoly {
        let key = m.key();
        if !self.memo.contains_key(&key) {
            let mut acc = SparsePoly::one(self.level);
            for j in 1..=self.level {
                let e = exponent(key, j) as usize;
                if e > 0 {
                    acc = self.ring.mul(&acc, &self.ypow[j - 1][e]);
                }
            }
            self.memo.insert(key, acc);
        }
        let p = self.ring.ctx.p() as usize;
        self.memo[&key].shift_x(p * m.nu as usize)
    }
}

/// Result of reducing one layer equation.
#[derive(Clone, Debug)]
pub struct StandardForm {
    /// Right-hand side in the new variable.
    pub f: SparsePoly,
    /// `y_old = y_new + shift`, a polynomial one level down.
    pub shift: SparsePoly,
}

/// Reduces `y^p - y = f` (with `f` at level `m - 1`) until the pole order of `f` at the
/// point over infinity equals `target`, the lower break `d(m)`.
///
/// `profile` must carry the lower breaks of the levels below `m`.
pub fn to_standard_form(f: &SparsePoly, ring: TowerRing<'_>, profile: &PoleProfile, target: u64) -> Result<StandardForm> {
    let level = ring.level();
    let ctx: &FieldCtx = ring.ctx;
    let p = ctx.p() as u64;
    let mut f = ring.reduce(f)?.lift(level.max(f.level()));
    let mut shift = SparsePoly::zero(level);
    let mut frob = FrobeniusPowers::new(ring, level);
    let mut last = u64::MAX;
    loop {
        let Some((w, nu, key, lead)) = profile.lead(&f, level)? else {
            return Err(Error::InternalConsistency("layer equation reduced to zero".into()));
        };
        if w >= last {
            return Err(Error::InternalConsistency(format!("pole order did not decrease ({last} -> {w})")));
        }
        last = w;
        if w == target {
            return Ok(StandardForm { f, shift });
        }
        if w < target || w % p != 0 {
            return Err(Error::InternalConsistency(format!(
                "layer pole order {w} cannot be brought to the lower break {target} (leading term x^{nu} y^{:?})",
                unpack(key, level)
            )));
        }
        let z = monomial_with_pole_order(w / p, profile, level)?;
        let zp = frob.power(&z);
        let zp_lead = match profile.lead(&zp, level)? {
            Some((wz, _, _, c)) if wz == w => c,
            _ => return Err(Error::InternalConsistency("p-th power has unexpected pole order".into())),
        };
        let c = ctx.frobenius_inv(ctx.div(lead, zp_lead)?);
        let zpoly = SparsePoly::monomial(c, z.nu, &z.a);
        // f <- f - c^p z^p + c z
        f.add_assign(&zp.scale(ctx.neg(ctx.frobenius(c)), ctx), ctx);
        f.add_assign(&zpoly, ctx);
        shift.add_assign(&zpoly, ctx);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldElement;

    #[test]
    fn monomial_examples() {
        let prof = PoleProfile::new(2, vec![5]);
        assert_eq!(monomial_with_pole_order(8, &prof, 1).unwrap(), Monomial { nu: 4, a: vec![0] });
        assert_eq!(monomial_with_pole_order(5, &prof, 1).unwrap(), Monomial { nu: 0, a: vec![1] });
        let prof3 = PoleProfile::new(3, vec![7]);
        assert_eq!(monomial_with_pole_order(10, &prof3, 1).unwrap(), Monomial { nu: 1, a: vec![1] });
        // 2ν + 5a = 3 has no solution with ν ≥ 0
        assert!(monomial_with_pole_order(3, &prof, 1).is_err());
    }

    #[test]
    fn monomial_weights_round_trip() {
        let prof = PoleProfile::new(3, vec![7, 49, 427]);
        for w in 0..3000u64 {
            if let Ok(m) = monomial_with_pole_order(w, &prof, 3) {
                assert_eq!(prof.weight(3, m.nu as u64, m.key()), w);
                assert!(m.a.iter().all(|&a| a < 3));
            }
        }
    }

    #[test]
    fn reduction_examples() {
        let f2 = FieldCtx::prime(2).unwrap();
        let one = FieldElement::ONE;
        let layers = vec![SparsePoly::from_terms(0, vec![(5, vec![], one), (3, vec![], one)], &f2)];
        let ring = TowerRing::new(&f2, &layers);
        let prof = PoleProfile::new(2, vec![5]);
        let f = SparsePoly::from_terms(1, vec![(8, vec![0], one), (5, vec![1], one), (3, vec![1], one)], &f2);
        let sf = to_standard_form(&f, ring, &prof, 15).unwrap();
        let expect = SparsePoly::from_terms(1, vec![(4, vec![0], one), (5, vec![1], one), (3, vec![1], one)], &f2);
        assert_eq!(sf.f, expect);
        assert_eq!(sf.shift, SparsePoly::x_pow(4, 1));

        let again = to_standard_form(&expect, ring, &prof, 15).unwrap();
        assert_eq!(again.f, expect);
        assert!(again.shift.is_zero());

        let layers3 = vec![SparsePoly::x_pow(3, 0)];
        let ring3 = TowerRing::new(&f2, &layers3);
        let prof3 = PoleProfile::new(2, vec![3]);
        let g = SparsePoly::monomial(one, 3, &[1]);
        assert_eq!(to_standard_form(&g, ring3, &prof3, 9).unwrap().f, g);
        assert!(to_standard_form(&g, ring3, &prof3, 7).is_err());
    }
}
