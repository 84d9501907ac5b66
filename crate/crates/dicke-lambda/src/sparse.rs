//! Sparse complex matrices in compressed-row form.
//!
//! Operators are assembled from `(row, col, value)` triplets and stored as
//! CSR with sorted, deduplicated columns so the nonzero pattern is
//! reproducible bit-for-bit across runs.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// A square sparse complex matrix (CSR).
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseOperator {
    /// Assemble from triplets; duplicate entries are summed, exact zeros
    /// dropped.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex64)]) -> Self {
        let mut per_row: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); dim];
        for &(r, c, v) in triplets {
            assert!(r < dim && c < dim, "triplet ({r},{c}) out of bounds {dim}");
            per_row[r].push((c, v));
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut k = 0;
            while k < row.len() {
                let c = row[k].0;
                let mut v = row[k].1;
                k += 1;
                while k < row.len() && row[k].0 == c {
                    v += row[k].1;
                    k += 1;
                }
                if v != Complex64::ZERO {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            dim,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_triplets(dim, &[])
    }

    pub fn identity(dim: usize) -> Self {
        let trips: Vec<_> = (0..dim).map(|i| (i, i, Complex64::ONE)).collect();
        Self::from_triplets(dim, &trips)
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let trips: Vec<_> = diag
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::from_triplets(diag.len(), &trips)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Iterate over stored entries as `(row, col, value)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let lo = self.row_ptr[row];
        let hi = self.row_ptr[row + 1];
        match self.col_idx[lo..hi].binary_search(&col) {
            Ok(k) => self.values[lo + k],
            Err(_) => Complex64::ZERO,
        }
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for r in 0..self.dim {
            let mut acc = Complex64::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = acc;
        }
    }

    /// `y += s A x`.
    pub fn matvec_acc(&self, s: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for r in 0..self.dim {
            let mut acc = Complex64::ZERO;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            y[r] += s * acc;
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let trips: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v.conj())).collect();
        Self::from_triplets(self.dim, &trips)
    }

    /// Transpose without conjugation.
    pub fn transpose(&self) -> Self {
        let trips: Vec<_> = self.iter().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.dim, &trips)
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        let trips: Vec<_> = self.iter().map(|(r, c, v)| (r, c, v.conj())).collect();
        Self::from_triplets(self.dim, &trips)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let trips: Vec<_> = self.iter().map(|(r, c, v)| (r, c, s * v)).collect();
        Self::from_triplets(self.dim, &trips)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let trips: Vec<_> = self.iter().chain(other.iter()).collect();
        Self::from_triplets(self.dim, &trips)
    }

    /// `A B` as a new CSR matrix.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut trips = Vec::new();
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let a = self.values[k];
                let mid = self.col_idx[k];
                for k2 in other.row_ptr[mid]..other.row_ptr[mid + 1] {
                    trips.push((r, other.col_idx[k2], a * other.values[k2]));
                }
            }
        }
        Self::from_triplets(self.dim, &trips)
    }

    /// Kronecker product `self ⊗ other`, with
    /// `(A ⊗ B)[i·db + j, k·db + l] = A[i,k] B[j,l]`.
    pub fn kron(&self, other: &Self) -> Self {
        let db = other.dim;
        let mut trips = Vec::with_capacity(self.nnz() * other.nnz());
        for (i, k, a) in self.iter() {
            for (j, l, b) in other.iter() {
                trips.push((i * db + j, k * db + l, a * b));
            }
        }
        Self::from_triplets(self.dim * db, &trips)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.iter() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum deviation `max |A - A†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let diff = self.add(&self.dagger().scale(-Complex64::ONE));
        diff.values
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    /// `Tr[A ρ]` with dense `ρ`.
    pub fn trace_with(&self, rho: &DMatrix<Complex64>) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (r, c, v) in self.iter() {
            acc += v * rho[(c, r)];
        }
        acc
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }
}
