//! Small finite fields GF(p^k) with Frobenius and its inverse.
//!
//! Elements are stored as a single integer `c0 + c1 p + ... + c_{k-1} p^{k-1}`
//! whose base-p digits are the coefficients in the modulus basis. This keeps
//! the representation canonical and lets fields up to `TABLE_LIMIT` elements
//! use log/exp tables for multiplication.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

pub const SUPPORTED_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];
pub const MAX_DEGREE: u32 = 8;
const TABLE_LIMIT: u32 = 1 << 20;

#[derive(Copy, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(pub(crate) u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Packed index in `[0, q)`.
    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

struct Tables {
    log: Vec<u32>,
    exp: Vec<u32>,
    frob_inv: Vec<u32>,
}

pub struct FieldCtx {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{}) mod {:?}", self.p, self.k, self.modulus)
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

/// Remainder of `a` modulo monic `m` over GF(p); coefficient vectors are little-endian.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r[r.len() - 1];
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - (lead * mi) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Digits of `n` in base p, padded to `len`.
fn digits(mut n: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(n % p);
        n /= p;
    }
    out
}

/// Trial division by every monic polynomial of degree `1..=k/2`.
pub fn is_irreducible(p: u32, modulus: &[u32]) -> bool {
    let k = modulus.len() - 1;
    if k == 0 || modulus[k] != 1 {
        return false;
    }
    for deg in 1..=k / 2 {
        let count = (p as u64).pow(deg as u32);
        for low in 0..count {
            let mut cand = digits(low as u32, p, deg);
            cand.push(1);
            if poly_rem(modulus, &cand, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Monic irreducible of degree k minimising `sum m_i p^i`.
pub fn default_modulus(p: u32, k: u32) -> Vec<u32> {
    let count = p.pow(k);
    for low in 0..count {
        let mut cand = digits(low, p, k as usize);
        cand.push(1);
        if is_irreducible(p, &cand) {
            return cand;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldCtx {
    pub fn new(p: u32, k: u32) -> Result<Self> {
        Self::check_range(p, k)?;
        Self::with_modulus(p, k, &default_modulus(p, k))
    }

    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1)
    }

    fn check_range(p: u32, k: u32) -> Result<()> {
        if !is_prime(p) || !SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::UnsupportedField { p, k, reason: "p must be one of 2,3,5,7,11,13".into() });
        }
        if k == 0 || k > MAX_DEGREE {
            return Err(Error::UnsupportedField { p, k, reason: format!("k must lie in 1..={MAX_DEGREE}") });
        }
        Ok(())
    }

    /// `modulus` is little-endian with `k + 1` entries, the last being 1.
    pub fn with_modulus(p: u32, k: u32, modulus: &[u32]) -> Result<Self> {
        Self::check_range(p, k)?;
        if modulus.len() != k as usize + 1 || modulus.iter().any(|&c| c >= p) || !is_irreducible(p, modulus) {
            return Err(Error::ReducibleModulus { p, k });
        }
        let q = p.pow(k);
        let mut ctx = FieldCtx { p, k, q, modulus: modulus.to_vec(), tables: None };
        if q <= TABLE_LIMIT && k > 1 {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    fn build_tables(&self) -> Tables {
        let q = self.q;
        let order = q - 1;
        let mut factors = Vec::new();
        let mut n = order;
        let mut f = 2;
        while f * f <= n {
            if n.is_multiple_of(f) {
                factors.push(f);
                while n.is_multiple_of(f) {
                    n /= f;
                }
            }
            f += 1;
        }
        if n > 1 {
            factors.push(n);
        }
        let gen = (2..q)
            .map(FieldElement)
            .find(|&g| factors.iter().all(|&r| self.slow_pow(g, (order / r) as u64) != FieldElement::ONE))
            .unwrap_or(FieldElement::ONE);
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        let mut cur = FieldElement::ONE;
        for i in 0..order {
            exp[i as usize] = cur.0;
            exp[(i + order) as usize] = cur.0;
            log[cur.0 as usize] = i;
            cur = self.slow_mul(cur, gen);
        }
        // sigma^{-1}(a) = a^{p^{k-1}}; on logs multiply by p^{k-1} mod (q-1).
        let shift = (self.p as u64).pow(self.k - 1) % order as u64;
        let mut frob_inv = vec![0u32; q as usize];
        for a in 1..q {
            let l = (log[a as usize] as u64 * shift % order as u64) as usize;
            frob_inv[a as usize] = exp[l];
        }
        Tables { log, exp, frob_inv }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }
    #[inline]
    pub fn order(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }
    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElement> {
        if coeffs.len() > self.k as usize {
            return Err(Error::MalformedElement(format!("{coeffs:?}")));
        }
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = v * self.p + c % self.p;
        }
        Ok(FieldElement(v))
    }

    pub fn coeffs(&self, a: FieldElement) -> Vec<u32> {
        digits(a.0, self.p, self.k as usize)
    }

    /// Image of an integer in the prime subfield.
    #[inline]
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    /// The generator `t` of the extension (equals 0 + 1·t).
    pub fn gen(&self) -> FieldElement {
        if self.k == 1 {
            // t satisfies t + m0 = 0
            FieldElement((self.p - self.modulus[0]) % self.p)
        } else {
            FieldElement(self.p)
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.k == 1 {
            let s = a.0 + b.0;
            return FieldElement(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x != 0 || y != 0 {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        if self.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x != 0 {
            out += ((self.p - x % self.p) % self.p) * place;
            place *= self.p;
            x /= self.p;
        }
        FieldElement(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        if self.k == 1 {
            return FieldElement(a.0 * b.0 % self.p);
        }
        match &self.tables {
            Some(t) => FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.slow_mul(a, b),
        }
    }

    fn slow_mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let k = self.k as usize;
        let (da, db) = (digits(a.0, self.p, k), digits(b.0, self.p, k));
        let mut prod = vec![0u32; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        let r = poly_rem(&prod, &self.modulus, self.p);
        let mut v = 0u32;
        for &c in r.iter().rev() {
            v = v * self.p + c;
        }
        FieldElement(v)
    }

    fn slow_pow(&self, mut a: FieldElement, mut e: u64) -> FieldElement {
        let mut r = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                r = self.slow_mul(r, a);
            }
            a = self.slow_mul(a, a);
            e >>= 1;
        }
        r
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if a.0 == 0 {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.tables {
            let order = (self.q - 1) as u64;
            let l = t.log[a.0 as usize] as u64 * (e % order) % order;
            return FieldElement(t.exp[l as usize]);
        }
        let (mut base, mut e, mut r) = (a, e, FieldElement::ONE);
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        r
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroInverse);
        }
        if let Some(t) = &self.tables {
            let order = self.q - 1;
            let l = (order - t.log[a.0 as usize]) % order;
            return Ok(FieldElement(t.exp[l as usize]));
        }
        Ok(self.pow(a, (self.q - 2) as u64))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a ↦ a^p.
    #[inline]
    pub fn frobenius(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            a
        } else {
            self.pow(a, self.p as u64)
        }
    }

    /// The unique p-th root.
    #[inline]
    pub fn frobenius_inv(&self, a: FieldElement) -> FieldElement {
        if self.k == 1 {
            return a;
        }
        match &self.tables {
            Some(t) => FieldElement(t.frob_inv[a.0 as usize]),
            None => self.pow(a, (self.p as u64).pow(self.k - 1)),
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        FieldElement(rng.gen_range(0..self.q))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    /// `[c0,c1,...]`, or a bare integer for prime fields.
    pub fn format(&self, a: FieldElement) -> String {
        if self.k == 1 {
            return a.0.to_string();
        }
        let parts: Vec<String> = self.coeffs(a).iter().map(|c| c.to_string()).collect();
        format!("[{}]", parts.join(","))
    }

    /// Accepts a bare integer (read in the prime subfield) or a coefficient list.
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let t = s.trim();
        let bad = || Error::MalformedElement(s.to_string());
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let mut cs = Vec::new();
            for part in inner.split(',').map(str::trim).filter(|x| !x.is_empty()) {
                let c: i64 = part.parse().map_err(|_| bad())?;
                cs.push(c.rem_euclid(self.p as i64) as u32);
            }
            return self.from_coeffs(&cs).map_err(|_| bad());
        }
        let n: i64 = t.parse().map_err(|_| bad())?;
        Ok(self.from_int(n))
    }
}
