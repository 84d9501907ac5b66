//! Dense density matrices with the solver's trace/Hermiticity/positivity
//! tolerances.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::symspace::StateVector;

/// Maximum allowed deviation from Hermiticity, `max |ρ - ρ†|`.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Maximum allowed `|Tr ρ - 1|`.
pub const TRACE_TOL: f64 = 1e-12;
/// Most negative eigenvalue tolerated (numerical positivity).
pub const POSITIVITY_TOL: f64 = -1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn from_matrix(m: DMatrix<Complex64>) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "density matrix must be square");
        Self { m }
    }

    /// `|ψ⟩⟨ψ|` from a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        let v = &psi.amplitudes;
        let m = v * v.adjoint();
        Self { m }
    }

    /// Basis state `|k⟩⟨k|`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut m = DMatrix::zeros(dim, dim);
        m[(k, k)] = Complex64::ONE;
        Self { m }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn element(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.m.diagonal().iter().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                worst = worst.max((self.m[(i, j)] - self.m[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Replace by `(ρ + ρ†)/2`.
    pub fn hermitize(&mut self) {
        let adj = self.m.adjoint();
        self.m = (&self.m + adj) * Complex64::new(0.5, 0.0);
    }

    pub fn normalize_trace(&mut self) {
        let tr = self.trace();
        self.m /= tr;
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// Enforce the steady-state tolerances.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidData(format!(
                "density matrix not Hermitian: defect {herm:.3e}"
            )));
        }
        let tr = (self.trace() - Complex64::ONE).norm();
        if tr > TRACE_TOL {
            return Err(Error::InvalidData(format!(
                "density matrix trace off unity by {tr:.3e}"
            )));
        }
        let min = self.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::InvalidData(format!(
                "density matrix not positive: min eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// Column-stacked `vec(ρ)`.
    pub fn vectorize(&self) -> Vec<Complex64> {
        self.m.as_slice().to_vec()
    }

    /// Inverse of [`Self::vectorize`].
    pub fn unvectorize(dim: usize, v: &[Complex64]) -> Self {
        assert_eq!(v.len(), dim * dim);
        Self {
            m: DMatrix::from_column_slice(dim, dim, v),
        }
    }
}
