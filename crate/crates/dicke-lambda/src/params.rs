//! Model parameters for the driven three-level lambda ensemble.
//!
//! All rates and frequencies are dimensionless, expressed in units of a
//! reference linewidth `Γ`. SI quantities enter only through
//! [`crate::slowlight::MediumParams`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the `N`-atom lambda system, in units of the reference
/// linewidth.
///
/// The two optical branches are `3↔1` (probe, Rabi frequency `omega_p`,
/// detuning `delta1`) and `3↔2` (control, Rabi frequency `omega_c`,
/// detuning `delta2`). `gamma2` and `gamma3` are the ground- and
/// excited-state pure dephasing rates used by the mean-field solver;
/// `gamma_phi` is the Raman dephasing rate of the exact collective solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_atoms: usize,
    pub omega_p: f64,
    pub omega_c: f64,
    pub delta1: f64,
    pub delta2: f64,
    pub gamma31: f64,
    pub gamma32: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma_phi: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::eit_reference()
    }
}

impl ModelParams {
    /// Reference EIT comparison set: `N = 14`, `Ω_p = 0.1Γ`, `Ω_c = 0.5Γ`,
    /// equal decay rates, dephasings `10⁻⁴Γ`.
    pub fn eit_reference() -> Self {
        Self {
            n_atoms: 14,
            omega_p: 0.1,
            omega_c: 0.5,
            delta1: 0.0,
            delta2: 0.0,
            gamma31: 1.0,
            gamma32: 1.0,
            gamma2: 1e-4,
            gamma3: 1e-4,
            gamma_phi: 1e-4,
        }
    }

    /// Asymmetric superradiance set: `Γ₃₁ = 5Γ₃₂`, drives off, `γ₂ = 0.01Γ`.
    pub fn sr_asymmetric(n_atoms: usize) -> Self {
        Self {
            n_atoms,
            omega_p: 0.0,
            omega_c: 0.0,
            delta1: 0.0,
            delta2: 0.0,
            gamma31: 5.0,
            gamma32: 1.0,
            gamma2: 0.01,
            gamma3: 0.0,
            gamma_phi: 0.01,
        }
    }

    /// Symmetric superradiance set: equal decay rates, drives off.
    pub fn sr_symmetric(n_atoms: usize) -> Self {
        Self {
            gamma31: 1.0,
            gamma32: 1.0,
            ..Self::sr_asymmetric(n_atoms)
        }
    }

    pub fn with_n(self, n_atoms: usize) -> Self {
        Self { n_atoms, ..self }
    }

    pub fn with_delta1(self, delta1: f64) -> Self {
        Self { delta1, ..self }
    }

    pub fn drives_off(self) -> Self {
        Self {
            omega_p: 0.0,
            omega_c: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_atoms == 0 {
            return Err(Error::InvalidParameter("n_atoms must be >= 1".into()));
        }
        let rates = [
            ("gamma31", self.gamma31),
            ("gamma32", self.gamma32),
            ("gamma2", self.gamma2),
            ("gamma3", self.gamma3),
            ("gamma_phi", self.gamma_phi),
        ];
        for (name, value) in rates {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a finite non-negative rate, got {value}"
                )));
            }
        }
        for (name, value) in [
            ("omega_p", self.omega_p),
            ("omega_c", self.omega_c),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite, got {value}"
                )));
            }
        }
        Ok(())
    }

    /// Two-photon detuning `δ = Δ₁ − Δ₂`.
    pub fn two_photon_detuning(&self) -> f64 {
        self.delta1 - self.delta2
    }
}

/// CODATA 2018 values used wherever SI units are needed.
pub mod constants {
    /// Speed of light in vacuum, m/s.
    pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;
    /// Vacuum permittivity, F/m.
    pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
    /// Reduced Planck constant, J·s.
    pub const HBAR: f64 = 1.054_571_817e-34;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_set_matches_published_values() {
        let p = ModelParams::eit_reference();
        assert_eq!(p.n_atoms, 14);
        assert_eq!(p.omega_p, 0.1);
        assert_eq!(p.omega_c, 0.5);
        assert_eq!(p.gamma2, 1e-4);
        assert!(p.validate().is_ok());
    }

    #[test]
    fn rejects_zero_atoms_and_negative_rates() {
        let mut p = ModelParams::eit_reference();
        p.n_atoms = 0;
        assert!(p.validate().is_err());

        let mut p = ModelParams::eit_reference();
        p.gamma31 = -1.0;
        assert!(p.validate().is_err());
    }
}
