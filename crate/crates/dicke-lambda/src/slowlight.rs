//! Group index, group velocity, and slow-light scaling from the closed-form
//! dispersion.
//!
//! Model rates stay in units of the reference linewidth Γ; SI enters only
//! through [`MediumParams`], which carries the SI value of that unit in
//! `gamma_ref`. Quoted `X/2π` frequencies are angular rates: multiply by 2π
//! at ingestion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meanfield::gamma_eff;
use crate::params::constants::{SPEED_OF_LIGHT, VACUUM_PERMITTIVITY, HBAR};
use crate::params::ModelParams;

/// Macroscopic medium parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumParams {
    /// Atomic density, m⁻³.
    pub n_at: f64,
    /// Probe transition dipole moment, C·m.
    pub mu31: f64,
    /// Probe angular frequency, rad/s.
    pub omega_p: f64,
    /// SI value of the reference linewidth Γ, rad/s.
    pub gamma_ref: f64,
    /// Medium length, m (needed only for pulse delays).
    pub length: Option<f64>,
}

impl MediumParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("n_at", self.n_at),
            ("mu31", self.mu31),
            ("omega_p", self.omega_p),
            ("gamma_ref", self.gamma_ref),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if let Some(l) = self.length {
            if !(l > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "length must be positive, got {l}"
                )));
            }
        }
        Ok(())
    }
}

/// Sodium D₂ operating point: λ_p = 589 nm, n_at = 10²⁰ m⁻³,
/// |μ₃₁| = 3.0·10⁻²⁹ C·m, Γ/2π = 5 MHz.
pub fn sodium_d2_medium() -> MediumParams {
    MediumParams {
        n_at: 1e20,
        mu31: 3.0e-29,
        omega_p: 2.0 * std::f64::consts::PI * SPEED_OF_LIGHT / 589e-9,
        gamma_ref: 2.0 * std::f64::consts::PI * 5e6,
        length: None,
    }
}

/// Sodium D₂ model rates in units of Γ = Γ₃₁: γ₂/2π = 0.5 kHz,
/// Ω_c/2π = 1.5 MHz, γ₃ ≈ 0, weak probe.
pub fn sodium_d2_model(n_atoms: usize) -> ModelParams {
    ModelParams {
        n_atoms,
        omega_p: 1e-8,
        omega_c: 1.5e6 / 5e6,
        delta1: 0.0,
        delta2: 0.0,
        gamma31: 1.0,
        gamma32: 1.0,
        gamma2: 0.5e3 / 5e6,
        gamma3: 0.0,
        gamma_phi: 0.5e3 / 5e6,
    }
}

/// Sodium-like strong slow-light set on the normal-dispersion branch
/// (`Ω_c < γ₂`), used for the relative group-velocity scaling scan.
pub fn slow_light_model(n_atoms: usize) -> ModelParams {
    ModelParams {
        omega_c: 0.1e3 / 5e6,
        ..sodium_d2_model(n_atoms)
    }
}

/// Dense-medium variant of the sodium parameters for the scaling scan.
pub fn slow_light_medium() -> MediumParams {
    MediumParams {
        n_at: 1e22,
        ..sodium_d2_medium()
    }
}

/// Coupling constant `C = n_at |μ₃₁|² / (ε₀ ħ)`, s⁻¹.
pub fn coupling_constant(medium: &MediumParams) -> f64 {
    medium.n_at * medium.mu31 * medium.mu31 / (VACUUM_PERMITTIVITY * HBAR)
}

/// `A₀(N) = (γ₂/2) Γ_eff(N) + Ω_c²/4`, in Γ².
pub fn a0(params: &ModelParams) -> f64 {
    params.gamma2 / 2.0 * gamma_eff(params) + params.omega_c * params.omega_c / 4.0
}

/// Dimensionless dispersion strength
/// `δ(N) = (ω_p C/4) [(γ₂/2)² − (Ω_c/2)²] / A₀(N)²`.
///
/// Negative exactly when `Ω_c > γ₂` (anomalous dispersion).
pub fn delta_n(params: &ModelParams, medium: &MediumParams) -> Result<f64> {
    params.validate()?;
    medium.validate()?;
    let g = medium.gamma_ref;
    let half_g2 = params.gamma2 * g / 2.0;
    let half_oc = params.omega_c * g / 2.0;
    let a0_si = half_g2 * gamma_eff(params) * g + half_oc * half_oc;
    let numerator = half_g2 * half_g2 - half_oc * half_oc;
    Ok(medium.omega_p * coupling_constant(medium) / 4.0 * numerator / (a0_si * a0_si))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GroupVelocityResult {
    /// Dimensionless `δ(N)`.
    pub delta: f64,
    /// Group index `n_g = 1 + δ`.
    pub n_g: f64,
    /// `v_g/c = 1/(1 + δ)`.
    pub vg_over_c: f64,
    /// Group velocity, m/s.
    pub vg: f64,
}

/// Group index and velocity from the line-center dispersion slope.
pub fn group_result(params: &ModelParams, medium: &MediumParams) -> Result<GroupVelocityResult> {
    let delta = delta_n(params, medium)?;
    let one_plus = 1.0 + delta;
    if one_plus <= 0.0 {
        return Err(Error::SuperluminalRegime {
            one_plus_delta: one_plus,
        });
    }
    Ok(GroupVelocityResult {
        delta,
        n_g: one_plus,
        vg_over_c: 1.0 / one_plus,
        vg: SPEED_OF_LIGHT / one_plus,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VgScanPoint {
    pub n_atoms: usize,
    pub delta: f64,
    pub vg_over_c: f64,
    /// `v_g(N)/v_g(1)`.
    pub ratio: f64,
}

/// Relative group velocity `v_g(N)/v_g(1)` across an atom-number sweep,
/// with only `N` varied.
pub fn vg_ratio_scan(
    params_base: &ModelParams,
    medium: &MediumParams,
    n_list: &[usize],
) -> Result<Vec<VgScanPoint>> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty atom-number list".into()));
    }
    let base = group_result(&params_base.with_n(1), medium)?;
    n_list
        .iter()
        .map(|&n| {
            let r = group_result(&params_base.with_n(n), medium)?;
            Ok(VgScanPoint {
                n_atoms: n,
                delta: r.delta,
                vg_over_c: r.vg_over_c,
                ratio: r.vg / base.vg,
            })
        })
        .collect()
}

/// Asymptotic coefficient `K = (ω_p C / 4Γ₃₁²) |1 − Ω_c²/γ₂²|` in
/// `v_g/c ≃ 1 − sgn(Ω_c²/γ₂² − 1) |K|/N²`.
pub fn asymptotic_k(params: &ModelParams, medium: &MediumParams) -> Result<f64> {
    params.validate()?;
    medium.validate()?;
    if params.gamma2 == 0.0 {
        return Err(Error::InvalidParameter(
            "asymptotic coefficient K needs gamma2 > 0".into(),
        ));
    }
    let g31_si = params.gamma31 * medium.gamma_ref;
    let ratio = params.omega_c / params.gamma2;
    Ok(medium.omega_p * coupling_constant(medium) / (4.0 * g31_si * g31_si)
        * (1.0 - ratio * ratio).abs())
}

/// `τ_d = L / v_g`.
pub fn pulse_delay(result: &GroupVelocityResult, medium: &MediumParams) -> Result<f64> {
    let l = medium.length.ok_or(Error::MissingLength)?;
    Ok(l / result.vg)
}

/// Two readings of the transparency-preservation bound. The stated
/// condition is `Γ_eff(N) ≤ Ω_c²/(4γ₂)`; the sodium numbers quoted with it
/// evaluate `Ω_c²/(2γ₂)` instead, so both are reported.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConsistencyCheck {
    /// `Γ_eff(N)`, units of Γ.
    pub gamma_eff: f64,
    /// `Ω_c²/(4γ₂)`, units of Γ.
    pub bound_stated: f64,
    /// `Ω_c²/(2γ₂)`, units of Γ.
    pub bound_evaluated: f64,
    pub satisfied_stated: bool,
    pub satisfied_evaluated: bool,
}

/// Check that collective broadening stays below the control-induced
/// transparency window.
pub fn eit_consistency_check(params: &ModelParams) -> ConsistencyCheck {
    let geff = gamma_eff(params);
    let oc2 = params.omega_c * params.omega_c;
    let (bound_stated, bound_evaluated) = if params.gamma2 > 0.0 {
        (oc2 / (4.0 * params.gamma2), oc2 / (2.0 * params.gamma2))
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    ConsistencyCheck {
        gamma_eff: geff,
        bound_stated,
        bound_evaluated,
        satisfied_stated: geff <= bound_stated,
        satisfied_evaluated: geff <= bound_evaluated,
    }
}
