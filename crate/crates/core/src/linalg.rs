//! Dense matrices over GF(p^k) and kernel dimensions of Frobenius-twisted powers.
//!
//! Three storage layouts share one interface: bit-packed rows for GF(2),
//! one byte per entry for the other prime fields, and packed field elements
//! for extension fields.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{FieldCtx, FieldElement};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Storage {
    /// Row-major, `words` u64 per row.
    Bits { words: usize, data: Vec<u64> },
    Bytes(Vec<u8>),
    Elems(Vec<FieldElement>),
}

#[derive(Clone)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    field: Arc<FieldCtx>,
    data: Storage,
}

impl std::fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows.min(16) {
            let row: Vec<u32> = (0..self.cols.min(16)).map(|j| self.get(i, j).index()).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl PartialEq for DenseMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.data == other.data
    }
}

#[inline]
fn axpy_mod<const P: u16>(dst: &mut [u8], src: &[u8], c: u8) {
    let c = c as u16;
    for (d, &s) in dst.iter_mut().zip(src) {
        *d = ((*d as u16 + c * s as u16) % P) as u8;
    }
}

/// `dst += c * src` over GF(p), entries in `[0, p)`.
fn axpy_bytes(p: u32, dst: &mut [u8], src: &[u8], c: u8) {
    match p {
        3 => axpy_mod::<3>(dst, src, c),
        5 => axpy_mod::<5>(dst, src, c),
        7 => axpy_mod::<7>(dst, src, c),
        11 => axpy_mod::<11>(dst, src, c),
        13 => axpy_mod::<13>(dst, src, c),
        _ => {
            for (d, &s) in dst.iter_mut().zip(src) {
                *d = ((*d as u32 + c as u32 * s as u32) % p) as u8;
            }
        }
    }
}

impl DenseMatrix {
    pub fn zeros(field: Arc<FieldCtx>, rows: usize, cols: usize) -> Self {
        let data = if field.p() == 2 && field.k() == 1 {
            let words = cols.div_ceil(64);
            Storage::Bits { words, data: vec![0; rows * words] }
        } else if field.k() == 1 {
            Storage::Bytes(vec![0; rows * cols])
        } else {
            Storage::Elems(vec![FieldElement::ZERO; rows * cols])
        };
        DenseMatrix { rows, cols, field, data }
    }

    pub fn identity(field: Arc<FieldCtx>, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    pub fn from_rows(field: Arc<FieldCtx>, rows: &[Vec<FieldElement>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    /// Convenience constructor from integers (read in the prime subfield).
    pub fn from_ints(field: Arc<FieldCtx>, rows: &[Vec<i64>]) -> Result<Self> {
        let conv: Vec<Vec<FieldElement>> = rows.iter().map(|r| r.iter().map(|&c| field.from_int(c)).collect()).collect();
        Self::from_rows(field, &conv)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        debug_assert!(i < self.rows && j < self.cols);
        match &self.data {
            Storage::Bits { words, data } => FieldElement((data[i * words + j / 64] >> (j % 64)) as u32 & 1),
            Storage::Bytes(d) => FieldElement(d[i * self.cols + j] as u32),
            Storage::Elems(d) => d[i * self.cols + j],
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        debug_assert!(i < self.rows && j < self.cols);
        let cols = self.cols;
        match &mut self.data {
            Storage::Bits { words, data } => {
                let w = &mut data[i * *words + j / 64];
                if v.index() & 1 == 1 {
                    *w |= 1 << (j % 64);
                } else {
                    *w &= !(1 << (j % 64));
                }
            }
            Storage::Bytes(d) => d[i * cols + j] = v.index() as u8,
            Storage::Elems(d) => d[i * cols + j] = v,
        }
    }

    pub fn row(&self, i: usize) -> Vec<FieldElement> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        match &self.data {
            Storage::Bits { data, .. } => data.iter().all(|&w| w == 0),
            Storage::Bytes(d) => d.iter().all(|&b| b == 0),
            Storage::Elems(d) => d.iter().all(|e| e.is_zero()),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field.clone(), self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.get(i, j);
                if !v.is_zero() {
                    t.set(j, i, v);
                }
            }
        }
        t
    }

    /// Entrywise inverse Frobenius.
    pub fn frobenius_inv(&self) -> Self {
        let mut out = self.clone();
        if let Storage::Elems(d) = &mut out.data {
            for e in d.iter_mut() {
                *e = self.field.frobenius_inv(*e);
            }
        }
        out
    }

    pub fn mul(&self, other: &DenseMatrix) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, other.rows, other.cols)));
        }
        let mut out = Self::zeros(self.field.clone(), self.rows, other.cols);
        match (&self.data, &other.data, &mut out.data) {
            (Storage::Bits { words: wa, data: a }, Storage::Bits { words: wb, data: b }, Storage::Bits { data: c, .. }) => {
                for i in 0..self.rows {
                    let dst = &mut c[i * wb..(i + 1) * wb];
                    for k in 0..self.cols {
                        if (a[i * wa + k / 64] >> (k % 64)) & 1 == 1 {
                            for (d, s) in dst.iter_mut().zip(&b[k * wb..(k + 1) * wb]) {
                                *d ^= s;
                            }
                        }
                    }
                }
            }
            (Storage::Bytes(a), Storage::Bytes(b), Storage::Bytes(c)) => {
                let p = self.field.p();
                let n = other.cols;
                let mut acc = vec![0u32; n];
                for i in 0..self.rows {
                    acc.iter_mut().for_each(|x| *x = 0);
                    for k in 0..self.cols {
                        let aik = a[i * self.cols + k] as u32;
                        if aik != 0 {
                            for (x, &bkj) in acc.iter_mut().zip(&b[k * n..(k + 1) * n]) {
                                *x += aik * bkj as u32;
                            }
                        }
                        // keep accumulators far from overflow
                        if k % 4096 == 4095 {
                            acc.iter_mut().for_each(|x| *x %= p);
                        }
                    }
                    for (cij, x) in c[i * n..(i + 1) * n].iter_mut().zip(&acc) {
                        *cij = (x % p) as u8;
                    }
                }
            }
            _ => {
                let f = &self.field;
                for i in 0..self.rows {
                    for k in 0..self.cols {
                        let aik = self.get(i, k);
                        if aik.is_zero() {
                            continue;
                        }
                        for j in 0..other.cols {
                            let v = f.add(out.get(i, j), f.mul(aik, other.get(k, j)));
                            out.set(i, j, v);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let cols = self.cols;
        match &mut self.data {
            Storage::Bits { words, data } => {
                for w in 0..*words {
                    data.swap(a * *words + w, b * *words + w);
                }
            }
            Storage::Bytes(d) => {
                for j in 0..cols {
                    d.swap(a * cols + j, b * cols + j);
                }
            }
            Storage::Elems(d) => {
                for j in 0..cols {
                    d.swap(a * cols + j, b * cols + j);
                }
            }
        }
    }

    /// In-place Gaussian elimination. With `full`, produces reduced row echelon form
    /// with unit pivots; otherwise only clears below the pivots. Returns pivot columns.
    pub fn echelon(&mut self, full: bool) -> Vec<usize> {
        let (rows, cols) = (self.rows, self.cols);
        let field = self.field.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..cols {
            if rank == rows {
                break;
            }
            let Some(r) = (rank..rows).find(|&r| !self.get(r, col).is_zero()) else { continue };
            self.swap_rows(r, rank);
            match &mut self.data {
                Storage::Bits { words, data } => {
                    let w = *words;
                    let start = col / 64;
                    let (head, tail) = data.split_at_mut((rank + 1) * w);
                    let piv = &head[rank * w + start..(rank + 1) * w];
                    let bit = 1u64 << (col % 64);
                    for row in tail.chunks_exact_mut(w) {
                        if row[start] & bit != 0 {
                            for (d, s) in row[start..].iter_mut().zip(piv) {
                                *d ^= s;
                            }
                        }
                    }
                    if full {
                        let (above, rest) = head.split_at_mut(rank * w);
                        let piv = &rest[start..w];
                        for row in above.chunks_exact_mut(w) {
                            if row[start] & bit != 0 {
                                for (d, s) in row[start..].iter_mut().zip(piv) {
                                    *d ^= s;
                                }
                            }
                        }
                    }
                }
                Storage::Bytes(d) => {
                    let p = field.p();
                    let pv = d[rank * cols + col] as u32;
                    let inv = field.inv(FieldElement(pv)).expect("pivot is nonzero").index();
                    if inv != 1 {
                        for x in &mut d[rank * cols + col..(rank + 1) * cols] {
                            *x = ((*x as u32 * inv) % p) as u8;
                        }
                    }
                    let (head, tail) = d.split_at_mut((rank + 1) * cols);
                    let piv = &head[rank * cols + col..(rank + 1) * cols];
                    for row in tail.chunks_exact_mut(cols) {
                        let e = row[col];
                        if e != 0 {
                            axpy_bytes(p, &mut row[col..], piv, (p - e as u32) as u8);
                        }
                    }
                    if full {
                        let (above, rest) = head.split_at_mut(rank * cols);
                        let piv = &rest[col..cols];
                        for row in above.chunks_exact_mut(cols) {
                            let e = row[col];
                            if e != 0 {
                                axpy_bytes(p, &mut row[col..], piv, (p - e as u32) as u8);
                            }
                        }
                    }
                }
                Storage::Elems(d) => {
                    let inv = field.inv(d[rank * cols + col]).expect("pivot is nonzero");
                    for x in &mut d[rank * cols + col..(rank + 1) * cols] {
                        *x = field.mul(*x, inv);
                    }
                    let piv: Vec<FieldElement> = d[rank * cols + col..(rank + 1) * cols].to_vec();
                    for i in 0..rows {
                        if i == rank || (!full && i < rank) {
                            continue;
                        }
                        let e = d[i * cols + col];
                        if e.is_zero() {
                            continue;
                        }
                        let ne = field.neg(e);
                        for (x, &s) in d[i * cols + col..(i + 1) * cols].iter_mut().zip(&piv) {
                            *x = field.add(*x, field.mul(ne, s));
                        }
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon(false).len()
    }

    /// `cols - rank`: dimension of `{c : M c = 0}`.
    pub fn kernel_dim(&self) -> usize {
        self.cols - self.rank()
    }

    /// Basis of the row space, as the nonzero rows of an echelon form.
    pub fn row_basis(&self) -> Self {
        let mut m = self.clone();
        let rank = m.echelon(false).len();
        m.truncate_rows(rank);
        m
    }

    fn truncate_rows(&mut self, n: usize) {
        self.rows = n;
        let cols = self.cols;
        match &mut self.data {
            Storage::Bits { words, data } => data.truncate(n * *words),
            Storage::Bytes(d) => d.truncate(n * cols),
            Storage::Elems(d) => d.truncate(n * cols),
        }
    }

    /// Basis of `{c : M c = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<FieldElement>> {
        let mut m = self.clone();
        let pivots = m.echelon(true);
        let f = &self.field;
        let mut is_pivot = vec![None; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(r);
        }
        let mut out = Vec::new();
        for free in (0..self.cols).filter(|&c| is_pivot[c].is_none()) {
            let mut v = vec![FieldElement::ZERO; self.cols];
            v[free] = FieldElement::ONE;
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = f.neg(m.get(r, free));
            }
            out.push(v);
        }
        out
    }

    pub fn mul_vec(&self, v: &[FieldElement]) -> Vec<FieldElement> {
        let f = &self.field;
        (0..self.rows)
            .map(|i| (0..self.cols).fold(FieldElement::ZERO, |acc, j| f.add(acc, f.mul(self.get(i, j), v[j]))))
            .collect()
    }
}

pub fn kernel_dim(m: &DenseMatrix) -> usize {
    m.kernel_dim()
}

/// Kernel dimensions `a^(1..=r_max)` of `N_r = M M^{σ^-1} ... M^{σ^{-(r-1)}}`.
///
/// Equivalently `g - dim V^r(W)` where `V(c) = M σ^{-1}(c)`; the images are tracked
/// as a shrinking row basis so each step costs `rank * g * g`.
pub fn twisted_power_kernels(m: &DenseMatrix, r_max: usize) -> Result<Vec<usize>> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let g = m.rows;
    // rows of mt are the images of the basis vectors
    let mt = m.transpose();
    let mut out = Vec::with_capacity(r_max);
    let mut image = mt.row_basis();
    for r in 1..=r_max {
        if r > 1 {
            let prev = image.rows;
            if prev > 0 {
                image = image.frobenius_inv().mul(&mt)?.row_basis();
            }
            if image.rows == prev {
                out.resize(r_max, g - prev);
                break;
            }
        }
        out.push(g - image.rows);
    }
    Ok(out)
}

/// `a^(1), a^(2), ...` up to and including the first repeated value.
pub fn stable_kernel_chain(m: &DenseMatrix) -> Result<Vec<usize>> {
    if m.rows != m.cols {
        return Err(Error::Dimension(format!("{}x{} is not square", m.rows, m.cols)));
    }
    let g = m.rows;
    let mt = m.transpose();
    let mut image = mt.row_basis();
    let mut out = vec![g - image.rows];
    loop {
        let prev = image.rows;
        if prev > 0 {
            image = image.frobenius_inv().mul(&mt)?.row_basis();
        }
        out.push(g - image.rows);
        if image.rows == prev {
            return Ok(out);
        }
    }
}

/// The explicit twisted product `N_r`, for small matrices and tests.
pub fn twisted_power(m: &DenseMatrix, r: usize) -> Result<DenseMatrix> {
    if m.rows != m.cols {
        return Err(Error::Dimension("not square".into()));
    }
    let mut n = DenseMatrix::identity(m.field.clone(), m.rows);
    let mut twisted = m.clone();
    for _ in 0..r {
        n = n.mul(&twisted)?;
        twisted = twisted.frobenius_inv();
    }
    Ok(n)
}
