//! Exact rational linear algebra: small dense matrices and sparse operators.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::numeric::Rational;

/// Dense rational matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Rational>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, Rational::one());
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<Rational> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if !b.is_zero() {
                        let idx = r * out.cols + c;
                        out.data[idx] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows)
            .map(|r| {
                let mut acc = Rational::zero();
                for (c, x) in v.iter().enumerate() {
                    let a = self.get(r, c);
                    if !a.is_zero() && !x.is_zero() {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    self.data.swap(p * self.cols + c, row * self.cols + c);
                }
            }
            let inv = self.get(row, col).recip();
            for c in 0..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let f = self.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..self.cols {
                    let delta = self.get(row, c) * &f;
                    if !delta.is_zero() {
                        let v = self.get(r, c) - delta;
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right null space, one vector per free column in increasing order.
    pub fn null_space(&self) -> Vec<Vec<Rational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m.get(r, f).clone();
                }
                v
            })
            .collect()
    }

    /// Inverse of a square nonsingular matrix.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Rational::one());
        }
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c).clone());
            }
        }
        Some(inv)
    }
}

/// Bilinear form `xᵀ G y`.
pub fn form(g: &DenseMatrix, x: &[Rational], y: &[Rational]) -> Rational {
    let gy = g.mul_vec(y);
    dot(x, &gy)
}

pub fn dot(x: &[Rational], y: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for (a, b) in x.iter().zip(y) {
        if !a.is_zero() && !b.is_zero() {
            acc += a * b;
        }
    }
    acc
}

/// `x ← x + f·y`.
pub fn axpy(x: &mut [Rational], f: &Rational, y: &[Rational]) {
    if f.is_zero() {
        return;
    }
    for (a, b) in x.iter_mut().zip(y) {
        if !b.is_zero() {
            *a += f * b;
        }
    }
}

/// Sparse rational vector: index ↦ nonzero entry.
pub type SparseVec = BTreeMap<usize, Rational>;

/// `x ← x + f·y` on sparse vectors, dropping cancelled entries.
pub fn sparse_axpy(x: &mut SparseVec, f: &Rational, y: &SparseVec) {
    if f.is_zero() {
        return;
    }
    for (&i, v) in y {
        let e = x.entry(i).or_insert_with(Rational::zero);
        *e += f * v;
        if e.is_zero() {
            x.remove(&i);
        }
    }
}

/// Sparse rational matrix stored by columns.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `columns[c]` maps row index to nonzero entry.
    pub columns: Vec<BTreeMap<usize, Rational>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            columns: vec![BTreeMap::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.add_to(k, k, &Rational::one());
        }
        m
    }

    pub fn diagonal(values: &[Rational]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (k, v) in values.iter().enumerate() {
            m.add_to(k, k, v);
        }
        m
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &Rational) {
        if v.is_zero() {
            return;
        }
        let col = &mut self.columns[c];
        let e = col.entry(r).or_insert_with(Rational::zero);
        *e += v;
        if e.is_zero() {
            col.remove(&r);
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        self.columns[c].get(&r).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }

    pub fn apply(&self, v: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.rows];
        for (c, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (&r, a) in &self.columns[c] {
                out[r] += a * x;
            }
        }
        out
    }

    /// Matrix-vector product on a sparse vector.
    pub fn apply_sparse(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (&c, x) in v {
            sparse_axpy(&mut out, x, &self.columns[c]);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for (c, col) in other.columns.iter().enumerate() {
            for (&k, b) in col {
                for (&r, a) in &self.columns[k] {
                    out.add_to(r, c, &(a * b));
                }
            }
        }
        out
    }

    pub fn scale(&self, f: &Rational) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        if f.is_zero() {
            return out;
        }
        for (c, col) in self.columns.iter().enumerate() {
            for (&r, a) in col {
                out.columns[c].insert(r, a * f);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (c, col) in other.columns.iter().enumerate() {
            for (&r, a) in col {
                out.add_to(r, c, a);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for (c, col) in self.columns.iter().enumerate() {
            for (&r, a) in col {
                out.columns[r].insert(c, a.clone());
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// Kronecker product `self ⊗ other` with index `(a, b) ↦ a·other.rows + b`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for (ca, cola) in self.columns.iter().enumerate() {
            for (cb, colb) in other.columns.iter().enumerate() {
                let c = ca * other.cols + cb;
                for (&ra, a) in cola {
                    for (&rb, b) in colb {
                        out.columns[c].insert(ra * other.rows + rb, a * b);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn dm(rows: usize, cols: usize, v: &[i64]) -> DenseMatrix {
        DenseMatrix {
            rows,
            cols,
            data: v.iter().map(|&x| rat(x)).collect(),
        }
    }

    #[test]
    fn null_space_and_rank() {
        let m = dm(2, 3, &[1, 2, 3, 2, 4, 6]);
        assert_eq!(m.rank(), 1);
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert!(m.mul_vec(&v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let m = dm(2, 2, &[2, 1, 1, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), DenseMatrix::identity(2));
        assert!(dm(2, 2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn sparse_algebra() {
        let mut a = SparseMatrix::zeros(2, 2);
        a.add_to(0, 1, &rat(1));
        let b = a.transpose();
        let h = a.commutator(&b);
        assert_eq!(h.get(0, 0), rat(1));
        assert_eq!(h.get(1, 1), rat(-1));
        let k = a.kron(&SparseMatrix::identity(3));
        assert_eq!(k.nnz(), 3);
        assert_eq!(k.get(2, 5), rat(1));
    }
}
