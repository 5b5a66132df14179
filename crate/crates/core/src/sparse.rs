//! Compressed-sparse-row complex matrices.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::C64;

#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<C64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix { nrows, ncols, indptr: vec![0; nrows + 1], indices: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    pub fn from_diagonal(d: &[C64]) -> Self {
        CsrMatrix {
            nrows: d.len(),
            ncols: d.len(),
            indptr: (0..=d.len()).collect(),
            indices: (0..d.len()).collect(),
            values: d.to_vec(),
        }
    }

    /// Builds from `(row, col, value)` triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, C64)]) -> Self {
        let mut rows: Vec<BTreeMap<usize, C64>> = vec![BTreeMap::new(); nrows];
        for &(r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) outside {nrows}×{ncols}");
            *rows[r].entry(c).or_default() += v;
        }
        Self::from_rows(ncols, rows)
    }

    fn from_rows(ncols: usize, rows: Vec<BTreeMap<usize, C64>>) -> Self {
        let mut m = CsrMatrix::zeros(rows.len(), ncols);
        m.indptr.clear();
        m.indptr.push(0);
        for row in rows {
            for (c, v) in row {
                if v != C64::new(0.0, 0.0) {
                    m.indices.push(c);
                    m.values.push(v);
                }
            }
            m.indptr.push(m.indices.len());
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Iterates `(col, value)` over row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.indptr[r]..self.indptr[r + 1];
        self.indices[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.indptr[r]..self.indptr[r + 1];
        match self.indices[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.nrows];
        self.matvec(x, &mut y);
        y
    }

    pub fn transpose_map(&self, f: impl Fn(C64) -> C64) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.indices {
            counts[c + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut indices = vec![0; self.nnz()];
        let mut values = vec![C64::new(0.0, 0.0); self.nnz()];
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                let k = next[c];
                indices[k] = r;
                values[k] = f(v);
                next[c] += 1;
            }
        }
        CsrMatrix { nrows: self.ncols, ncols: self.nrows, indptr: counts, indices, values }
    }

    pub fn adjoint(&self) -> Self {
        self.transpose_map(|v| v.conj())
    }

    pub fn transpose(&self) -> Self {
        self.transpose_map(|v| v)
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `diag(left) · self · diag(right)`.
    pub fn scale_rows_cols(&self, left: &[f64], right: &[f64]) -> Self {
        let mut out = self.clone();
        for r in 0..self.nrows {
            for k in self.indptr[r]..self.indptr[r + 1] {
                out.values[k] *= left[r] * right[self.indices[k]];
            }
        }
        out
    }

    /// `a · self + b · other`.
    pub fn axpby(&self, a: C64, other: &CsrMatrix, b: C64) -> Self {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let mut m = CsrMatrix::zeros(self.nrows, self.ncols);
        m.indptr.clear();
        m.indptr.push(0);
        for r in 0..self.nrows {
            let (mut p, mut q) = (self.indptr[r], other.indptr[r]);
            let (pe, qe) = (self.indptr[r + 1], other.indptr[r + 1]);
            while p < pe || q < qe {
                let cp = if p < pe { self.indices[p] } else { usize::MAX };
                let cq = if q < qe { other.indices[q] } else { usize::MAX };
                let (c, v) = if cp == cq {
                    let v = a * self.values[p] + b * other.values[q];
                    p += 1;
                    q += 1;
                    (cp, v)
                } else if cp < cq {
                    p += 1;
                    (cp, a * self.values[p - 1])
                } else {
                    q += 1;
                    (cq, b * other.values[q - 1])
                };
                m.indices.push(c);
                m.values.push(v);
            }
            m.indptr.push(m.indices.len());
        }
        m
    }

    pub fn add(&self, other: &CsrMatrix) -> Self {
        self.axpby(C64::new(1.0, 0.0), other, C64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &CsrMatrix) -> Self {
        self.axpby(C64::new(1.0, 0.0), other, C64::new(-1.0, 0.0))
    }

    /// Sparse product (row-by-row accumulation).
    pub fn matmul(&self, other: &CsrMatrix) -> Self {
        assert_eq!(self.ncols, other.nrows);
        let mut acc = vec![C64::new(0.0, 0.0); other.ncols];
        let mut mark = vec![usize::MAX; other.ncols];
        let mut cols = Vec::new();
        let mut m = CsrMatrix::zeros(self.nrows, other.ncols);
        m.indptr.clear();
        m.indptr.push(0);
        for r in 0..self.nrows {
            cols.clear();
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if mark[c] != r {
                        mark[c] = r;
                        acc[c] = C64::new(0.0, 0.0);
                        cols.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            cols.sort_unstable();
            for &c in &cols {
                m.indices.push(c);
                m.values.push(acc[c]);
            }
            m.indptr.push(m.indices.len());
        }
        m
    }

    /// Rows and columns restricted to `keep` (in the given order).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut map = vec![usize::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let rows = keep
            .iter()
            .map(|&r| {
                self.row(r)
                    .filter(|(c, _)| map[*c] != usize::MAX)
                    .map(|(c, v)| (map[c], v))
                    .collect::<BTreeMap<_, _>>()
            })
            .collect();
        Self::from_rows(keep.len(), rows)
    }

    /// Removes stored entries with modulus at or below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        let rows = (0..self.nrows)
            .map(|r| self.row(r).filter(|(_, v)| v.norm() > tol).collect::<BTreeMap<_, _>>())
            .collect();
        Self::from_rows(self.ncols, rows)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut d = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                d[(r, c)] += v;
            }
        }
        d
    }

    pub fn from_dense(d: &DMatrix<C64>, tol: f64) -> Self {
        let rows = (0..d.nrows())
            .map(|r| {
                (0..d.ncols())
                    .filter(|&c| d[(r, c)].norm() > tol)
                    .map(|c| (c, d[(r, c)]))
                    .collect::<BTreeMap<_, _>>()
            })
            .collect();
        Self::from_rows(d.ncols(), rows)
    }

    pub fn norm_fro(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute row sum, an upper bound on the spectral norm of a
    /// Hermitian matrix.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).map(|(_, v)| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure `[lo, hi]` of the real parts of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.nrows {
            let mut d = 0.0;
            let mut rad = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    d = v.re;
                } else {
                    rad += v.norm();
                }
            }
            lo = lo.min(d - rad);
            hi = hi.max(d + rad);
        }
        if self.nrows == 0 {
            (0.0, 0.0)
        } else {
            (lo, hi)
        }
    }

    pub fn max_abs_diff(&self, other: &CsrMatrix) -> f64 {
        self.sub(other).max_abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample() -> CsrMatrix {
        CsrMatrix::from_triplets(
            3,
            3,
            &[(0, 0, c(1.0, 0.0)), (0, 2, c(0.0, 2.0)), (1, 1, c(3.0, 0.0)), (2, 0, c(4.0, -1.0)), (0, 0, c(1.0, 0.0))],
        )
    }

    #[test]
    fn triplets_sum_duplicates() {
        let m = sample();
        assert_eq!(m.get(0, 0), c(2.0, 0.0));
        assert_eq!(m.nnz(), 4);
        assert_eq!(m.get(1, 2), c(0.0, 0.0));
    }

    #[test]
    fn products_match_dense() {
        let a = sample();
        let b = a.adjoint();
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(a.matmul(&b).to_dense(), dense);
        assert_eq!(b.to_dense(), a.to_dense().adjoint());
        let s = a.axpby(c(2.0, 0.0), &b, c(0.0, 1.0));
        assert_eq!(s.to_dense(), a.to_dense() * c(2.0, 0.0) + b.to_dense() * c(0.0, 1.0));
        let x = vec![c(1.0, 1.0), c(-2.0, 0.0), c(0.5, 0.0)];
        let y = a.apply(&x);
        let yd = a.to_dense() * nalgebra::DVector::from_vec(x);
        for i in 0..3 {
            assert!((y[i] - yd[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn submatrix_and_scaling() {
        let a = sample();
        let s = a.submatrix(&[2, 0]);
        assert_eq!(s.get(0, 1), c(4.0, -1.0));
        assert_eq!(s.get(1, 0), c(0.0, 2.0));
        let w = a.scale_rows_cols(&[1.0, 2.0, 3.0], &[1.0, 1.0, 0.5]);
        assert_eq!(w.get(2, 0), c(12.0, -3.0));
        assert_eq!(w.get(0, 2), c(0.0, 1.0));
        let (lo, hi) = a.gershgorin();
        assert!(lo <= 2.0 - 2.0 && hi >= 3.0);
    }
}
