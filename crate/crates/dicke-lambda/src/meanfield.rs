//! Representative-atom mean-field solver.
//!
//! A single three-level atom carries the ensemble through `(N−1)`-scaled
//! feedback terms built from its own expectation values, which makes the
//! master equation nonlinear. The closed-form linear-probe susceptibility
//! and its effective width live here as well.
//!
//! Basis ordering for the 3×3 representative state is `(|1⟩, |2⟩, |3⟩)`;
//! the excited state is index 2.

use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::params::ModelParams;

type M3 = Matrix3<Complex64>;

/// Effective excited-state width
/// `Γ^(eff) = (Γ₃₁ + Γ₃₂)/2 + γ₃ + Γ₃₁(N−1)`, in units of Γ.
pub fn gamma_eff(params: &ModelParams) -> f64 {
    (params.gamma31 + params.gamma32) / 2.0
        + params.gamma3
        + params.gamma31 * (params.n_atoms as f64 - 1.0)
}

/// Closed-form mean-field susceptibility per emitter, with the detuning
/// alignment `Δ₁ᵉᶠᶠ = −Δ₁` applied so the curve is directly comparable to
/// the exact collective scan:
/// `χ_MF = (i/2) / (Γ_eff + iΔ₁ᵉᶠᶠ + Ω_c²/(4[γ₂/2 + i(Δ₁ᵉᶠᶠ−Δ₂ᵉᶠᶠ)]))`.
///
/// Independent of `Ω_p` (linear regime).
pub fn chi_mf(params: &ModelParams, delta1: f64) -> Result<Complex64> {
    let geff = gamma_eff(params);
    let d1_eff = -delta1;
    let two_photon = Complex64::new(params.gamma2 / 2.0, -(delta1 - params.delta2));
    let drive = params.omega_c * params.omega_c / 4.0;
    if two_photon.norm() == 0.0 {
        if drive > 0.0 {
            // The control term diverges and transparency is exact.
            return Ok(Complex64::ZERO);
        }
        return Err(Error::Singularity(
            "gamma2 = 0 at two-photon resonance with the control off".into(),
        ));
    }
    let denom = Complex64::new(geff, d1_eff) + drive / two_photon;
    Ok(Complex64::new(0.0, 0.5) / denom)
}

/// Steady-state probe coherence of the representative atom in the linear
/// regime (main-text sign convention, no detuning alignment):
/// `ρ₃₁ = i(Ω_p/2)(γ₂/2 + iδ) / [(Γ_eff + iΔ₁)(γ₂/2 + iδ) + Ω_c²/4]`
/// with `δ = Δ₁ − Δ₂`.
pub fn rho31_linear(params: &ModelParams, delta1: f64) -> Result<Complex64> {
    let geff = gamma_eff(params);
    let two_photon = Complex64::new(params.gamma2 / 2.0, delta1 - params.delta2);
    let denom = Complex64::new(geff, delta1) * two_photon
        + params.omega_c * params.omega_c / 4.0;
    if denom.norm() == 0.0 {
        return Err(Error::Singularity(
            "vanishing linear-response denominator (gamma2 = 0, two-photon resonance, control off)"
                .into(),
        ));
    }
    Ok(Complex64::new(0.0, params.omega_p / 2.0) * two_photon / denom)
}

/// Representative-atom state, basis `(|1⟩, |2⟩, |3⟩)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepState {
    pub rho: M3,
}

impl RepState {
    pub fn ground() -> Self {
        let mut rho = M3::zeros();
        rho[(0, 0)] = Complex64::ONE;
        Self { rho }
    }

    /// Pure state from single-atom amplitudes `(c1, c2, c3)`.
    pub fn pure(c1: Complex64, c2: Complex64, c3: Complex64) -> Self {
        let v = nalgebra::Vector3::new(c1, c2, c3);
        Self { rho: v * v.adjoint() }
    }

    pub fn trace(&self) -> Complex64 {
        self.rho[(0, 0)] + self.rho[(1, 1)] + self.rho[(2, 2)]
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let diff = self.rho - self.rho.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermitize(&mut self) {
        self.rho = (self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    }

    /// `⟨σ₁₃⟩ = Tr[|1⟩⟨3| ρ] = ⟨3|ρ|1⟩`.
    pub fn coherence_31(&self) -> Complex64 {
        self.rho[(2, 0)]
    }

    pub fn coherence_32(&self) -> Complex64 {
        self.rho[(2, 1)]
    }

    pub fn population(&self, level: usize) -> f64 {
        self.rho[(level, level)].re
    }
}

fn unit(i: usize, j: usize) -> M3 {
    let mut m = M3::zeros();
    m[(i, j)] = Complex64::ONE;
    m
}

/// Nonlinear right-hand side of the representative master equation. The
/// effective Hamiltonian is rebuilt from the current expectation values on
/// every evaluation.
pub fn rep_rhs(state: &RepState, params: &ModelParams) -> M3 {
    rep_rhs_parts(state, params, 0.5, true)
}

pub(crate) fn rep_rhs_parts(
    state: &RepState,
    params: &ModelParams,
    feedback_factor: f64,
    dissipators: bool,
) -> M3 {
    let rho = &state.rho;
    let n = params.n_atoms as f64;
    let i = Complex64::I;
    let c = |x: f64| Complex64::new(x, 0.0);

    // Pauli-style quadratures on the two optical branches.
    let sx31 = unit(2, 0) + unit(0, 2);
    let sy31 = (unit(2, 0) - unit(0, 2)) * (-i);
    let sx32 = unit(2, 1) + unit(1, 2);
    let sy32 = (unit(2, 1) - unit(1, 2)) * (-i);

    let expect = |op: &M3| -> f64 { (op * rho).trace().re };

    let mut h = unit(2, 2) * c(params.delta1)
        + unit(1, 1) * c(params.delta1 - params.delta2)
        - (sx31 * c(params.omega_p) + sx32 * c(params.omega_c)) * c(0.5);
    let f31 = feedback_factor * params.gamma31 * (n - 1.0);
    let f32 = feedback_factor * params.gamma32 * (n - 1.0);
    if f31 != 0.0 {
        h += (sy31 * c(expect(&sx31)) - sx31 * c(expect(&sy31))) * c(f31);
    }
    if f32 != 0.0 {
        h += (sy32 * c(expect(&sx32)) - sx32 * c(expect(&sy32))) * c(f32);
    }

    let mut drho = (h * rho - rho * h) * (-i);
    if !dissipators {
        return drho;
    }

    // Radiative channels 3→1 and 3→2.
    for (rate, lower) in [
        (params.gamma31, unit(0, 2)),
        (params.gamma32, unit(1, 2)),
    ] {
        if rate == 0.0 {
            continue;
        }
        let raise = lower.adjoint();
        let proj = raise * lower; // |3⟩⟨3|
        drho += (lower * rho * raise - (proj * rho + rho * proj) * c(0.5)) * c(rate);
    }

    // Pure dephasing as double commutators on the level projectors.
    for (rate, proj) in [(params.gamma2, unit(1, 1)), (params.gamma3, unit(2, 2))] {
        if rate == 0.0 {
            continue;
        }
        let inner = proj * rho - rho * proj;
        drho -= (proj * inner - inner * proj) * c(rate / 2.0);
    }
    drho
}

// Probe hook; removed once the transient convention is pinned.
#[doc(hidden)]
pub fn rep_evolve_variant(
    rho0: &RepState,
    params: &ModelParams,
    t_grid: &[f64],
    feedback_factor: f64,
    dissipators: bool,
) -> Result<Vec<RepState>> {
    let v0: Vec<Complex64> = rho0.rho.as_slice().to_vec();
    let mut out = Vec::with_capacity(t_grid.len());
    ode::integrate(
        |_, v, dv| {
            let state = RepState {
                rho: M3::from_column_slice(v),
            };
            let d = rep_rhs_parts(&state, params, feedback_factor, dissipators);
            dv.copy_from_slice(d.as_slice());
        },
        &v0,
        t_grid,
        &OdeOptions::default(),
        |_, _, v| {
            let mut s = RepState {
                rho: M3::from_column_slice(v),
            };
            s.hermitize();
            out.push(s);
        },
    )?;
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct RepEvolveOptions {
    pub ode: OdeOptions,
    pub trace_tol: f64,
}

impl Default for RepEvolveOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            trace_tol: 1e-8,
        }
    }
}

/// Integrate the nonlinear representative equation over `t_grid`.
pub fn rep_evolve(
    rho0: &RepState,
    params: &ModelParams,
    t_grid: &[f64],
) -> Result<Vec<RepState>> {
    rep_evolve_with(rho0, params, t_grid, &RepEvolveOptions::default())
}

pub fn rep_evolve_with(
    rho0: &RepState,
    params: &ModelParams,
    t_grid: &[f64],
    opts: &RepEvolveOptions,
) -> Result<Vec<RepState>> {
    params.validate()?;
    let v0: Vec<Complex64> = rho0.rho.as_slice().to_vec();
    let mut out = Vec::with_capacity(t_grid.len());
    ode::integrate(
        |_, v, dv| {
            let state = RepState {
                rho: M3::from_column_slice(v),
            };
            let d = rep_rhs(&state, params);
            dv.copy_from_slice(d.as_slice());
        },
        &v0,
        t_grid,
        &opts.ode,
        |_, _, v| {
            let mut s = RepState {
                rho: M3::from_column_slice(v),
            };
            s.hermitize();
            out.push(s);
        },
    )?;
    let tr0 = out[0].trace().re;
    let drift = out
        .iter()
        .map(|s| (s.trace().re - tr0).abs())
        .fold(0.0, f64::max);
    if drift > opts.trace_tol {
        return Err(Error::TraceDrift {
            drift,
            tolerance: opts.trace_tol,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy)]
pub struct RepSteadyOptions {
    /// Residual target on `‖dρ/dt‖∞`.
    pub residual_tol: f64,
    /// March residual at which Newton refinement takes over.
    pub march_tol: f64,
    /// Hard cap on the marched time, in units of 1/Γ.
    pub max_time: f64,
}

impl Default for RepSteadyOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-12,
            march_tol: 1e-7,
            max_time: 1e9,
        }
    }
}

/// Damped long-time integration from `|1⟩⟨1|` followed by Newton
/// refinement on the (quadratic) fixed-point equations.
pub fn rep_steady_state(params: &ModelParams) -> Result<RepState> {
    rep_steady_state_with(params, &RepSteadyOptions::default())
}

pub fn rep_steady_state_with(
    params: &ModelParams,
    opts: &RepSteadyOptions,
) -> Result<RepState> {
    params.validate()?;
    let mut state = RepState::ground();
    let mut residual = rhs_inf_norm(&state, params);
    if residual < opts.residual_tol {
        return Ok(state);
    }

    // Slowest relevant relaxation sets the chunk length.
    let geff = gamma_eff(params).max(1e-12);
    let pump = params.omega_c * params.omega_c / (4.0 * geff);
    let slow = (params.gamma2 / 2.0 + pump)
        .max(params.gamma31.min(params.gamma32) * 1e-3)
        .max(1e-9);
    let mut chunk = 10.0 / slow;
    let mut elapsed = 0.0;
    let march_opts = RepEvolveOptions {
        ode: OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            ..OdeOptions::default()
        },
        trace_tol: 1e-7,
    };
    while residual > opts.march_tol {
        if elapsed > opts.max_time {
            return Err(Error::NonConvergence { residual });
        }
        let grid = [0.0, chunk];
        let traj = rep_evolve_with(&state, params, &grid, &march_opts)?;
        state = traj.last().expect("chunk has endpoints").clone();
        elapsed += chunk;
        chunk *= 2.0;
        residual = rhs_inf_norm(&state, params);
    }

    newton_refine(&mut state, params, opts.residual_tol)?;
    Ok(state)
}

fn rhs_inf_norm(state: &RepState, params: &ModelParams) -> f64 {
    rep_rhs(state, params)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Pack the independent real degrees of freedom of a Hermitian unit-trace
/// 3×3 matrix.
fn pack(state: &RepState) -> [f64; 8] {
    let r = &state.rho;
    [
        r[(0, 0)].re,
        r[(1, 1)].re,
        r[(1, 0)].re,
        r[(1, 0)].im,
        r[(2, 0)].re,
        r[(2, 0)].im,
        r[(2, 1)].re,
        r[(2, 1)].im,
    ]
}

fn unpack(x: &[f64; 8]) -> RepState {
    let mut rho = M3::zeros();
    rho[(0, 0)] = Complex64::new(x[0], 0.0);
    rho[(1, 1)] = Complex64::new(x[1], 0.0);
    rho[(2, 2)] = Complex64::new(1.0 - x[0] - x[1], 0.0);
    rho[(1, 0)] = Complex64::new(x[2], x[3]);
    rho[(0, 1)] = Complex64::new(x[2], -x[3]);
    rho[(2, 0)] = Complex64::new(x[4], x[5]);
    rho[(0, 2)] = Complex64::new(x[4], -x[5]);
    rho[(2, 1)] = Complex64::new(x[6], x[7]);
    rho[(1, 2)] = Complex64::new(x[6], -x[7]);
    RepState { rho }
}

fn residual_vector(x: &[f64; 8], params: &ModelParams) -> [f64; 8] {
    let d = rep_rhs(&unpack(x), params);
    [
        d[(0, 0)].re,
        d[(1, 1)].re,
        d[(1, 0)].re,
        d[(1, 0)].im,
        d[(2, 0)].re,
        d[(2, 0)].im,
        d[(2, 1)].re,
        d[(2, 1)].im,
    ]
}

/// Newton iteration on the fixed point, run down to its rounding floor so
/// that weak-probe coherences keep full relative accuracy. The right-hand
/// side is quadratic in the state, so central differences give the Jacobian
/// exactly.
fn newton_refine(state: &mut RepState, params: &ModelParams, tol: f64) -> crate::error::Result<()> {
    let mut x = pack(state);
    let h = 1e-4;
    let floor = 50.0 * f64::EPSILON * gamma_eff(params).max(1.0);
    let mut best_x = x;
    let mut best_f = f64::INFINITY;
    let mut stale = 0;
    for _ in 0..60 {
        let f = residual_vector(&x, params);
        let fnorm = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if fnorm < best_f {
            best_f = fnorm;
            best_x = x;
            stale = 0;
        } else {
            stale += 1;
        }
        if fnorm < floor || stale >= 3 {
            break;
        }
        let mut jac = nalgebra::SMatrix::<f64, 8, 8>::zeros();
        for j in 0..8 {
            let mut xp = x;
            let mut xm = x;
            xp[j] += h;
            xm[j] -= h;
            let fp = residual_vector(&xp, params);
            let fm = residual_vector(&xm, params);
            for i in 0..8 {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = nalgebra::SVector::<f64, 8>::from_column_slice(&f);
        let step = match jac.lu().solve(&rhs) {
            Some(s) => s,
            None => break,
        };
        for j in 0..8 {
            x[j] -= step[j];
        }
    }
    if best_f < tol {
        *state = unpack(&best_x);
        Ok(())
    } else {
        Err(Error::NonConvergence { residual: best_f })
    }
}

/// Channel intensities under the mean-field factorization
/// `I₃α = Γ₃α [N ρ₃₃ + N(N−1) |⟨σ_{α3}⟩|²]`.
pub fn mf_intensities(state: &RepState, params: &ModelParams) -> (f64, f64) {
    let n = params.n_atoms as f64;
    let pop = state.population(2);
    let coop = n * (n - 1.0);
    let i31 = params.gamma31 * (n * pop + coop * state.coherence_31().norm_sqr());
    let i32 = params.gamma32 * (n * pop + coop * state.coherence_32().norm_sqr());
    (i31, i32)
}
