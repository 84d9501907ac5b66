//! Drive-off superradiant transients, burst-envelope fitting, and
//! finite-size scaling of the peak intensity.
//!
//! Intensities are unnormalized channel fluxes `I₃α = Γ₃α ⟨Sα† Sα⟩` (exact)
//! or their mean-field factorization `Γ₃α [N ρ₃₃ + N(N−1)|⟨σ_{α3}⟩|²]`;
//! only ratios and exponents are compared across methods.

use num_complex::Complex64;
use serde::Serialize;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::fit::{levenberg_marquardt, linear_fit, LmOptions};
use crate::liouvillian::{evolve_observed, liouvillian_for, EvolveOptions};
use crate::meanfield::{mf_intensities, rep_evolve_with, RepEvolveOptions, RepState};
use crate::params::ModelParams;
use crate::symspace::{build_basis, lowering_operator, symmetric_product_state, Branch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMethod {
    Exact,
    MeanField,
}

/// Channel-resolved emission over a time grid, units of Γ.
#[derive(Debug, Clone)]
pub struct BurstTrace {
    pub t: Vec<f64>,
    pub i31: Vec<f64>,
    pub i32: Vec<f64>,
    pub itot: Vec<f64>,
    pub method: TraceMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    I31,
    I32,
    Total,
}

impl BurstTrace {
    pub fn channel(&self, channel: Channel) -> &[f64] {
        match channel {
            Channel::I31 => &self.i31,
            Channel::I32 => &self.i32,
            Channel::Total => &self.itot,
        }
    }
}

fn check_sr_preconditions(params: &ModelParams, epsilon: f64) -> Result<()> {
    params.validate()?;
    if params.omega_p != 0.0 || params.omega_c != 0.0 {
        return Err(Error::InvalidConfiguration(
            "superradiant transients require both drives off".into(),
        ));
    }
    if !(0.0..1.0 / std::f64::consts::SQRT_2).contains(&epsilon) {
        return Err(Error::InvalidConfiguration(format!(
            "ground-state admixture epsilon must lie in [0, 1/sqrt(2)), got {epsilon}"
        )));
    }
    Ok(())
}

fn initial_amplitudes(epsilon: f64) -> (Complex64, Complex64, Complex64) {
    let c3 = (1.0 - 2.0 * epsilon * epsilon).sqrt();
    (
        Complex64::new(epsilon, 0.0),
        Complex64::new(epsilon, 0.0),
        Complex64::new(c3, 0.0),
    )
}

/// Exact transient from the symmetric product state
/// `√(1−2ε²)|3⟩ + ε|1⟩ + ε|2⟩` per atom, with
/// `I₃α(t) = Γ₃α ⟨Sα†Sα⟩(t)`.
pub fn sr_transient_exact(
    params: &ModelParams,
    epsilon: f64,
    t_grid: &[f64],
) -> Result<BurstTrace> {
    check_sr_preconditions(params, epsilon)?;
    let basis = build_basis(params.n_atoms)?;
    let l = liouvillian_for(params, &basis)?;
    let (c1, c2, c3) = initial_amplitudes(epsilon);
    let psi = symmetric_product_state(&basis, c1, c2, c3)?;
    let rho0 = DensityMatrix::from_pure(&psi);
    let s1 = lowering_operator(&basis, Branch::One);
    let s2 = lowering_operator(&basis, Branch::Two);
    let flux1 = s1.dagger().matmul(&s1);
    let flux2 = s2.dagger().matmul(&s2);
    let records = evolve_observed(
        &l,
        &rho0,
        t_grid,
        &[&flux1, &flux2],
        &EvolveOptions::default(),
    )?;
    let mut i31 = Vec::with_capacity(t_grid.len());
    let mut i32 = Vec::with_capacity(t_grid.len());
    let mut itot = Vec::with_capacity(t_grid.len());
    for row in &records {
        let a = params.gamma31 * row[0].re;
        let b = params.gamma32 * row[1].re;
        i31.push(a);
        i32.push(b);
        itot.push(a + b);
    }
    Ok(BurstTrace {
        t: t_grid.to_vec(),
        i31,
        i32,
        itot,
        method: TraceMethod::Exact,
    })
}

/// Mean-field transient: the representative atom starts in the same pure
/// state and its trajectory is mapped through the intensity factorization.
pub fn sr_transient_mf(params: &ModelParams, epsilon: f64, t_grid: &[f64]) -> Result<BurstTrace> {
    check_sr_preconditions(params, epsilon)?;
    let (c1, c2, c3) = initial_amplitudes(epsilon);
    let rho0 = RepState::pure(c1, c2, c3);
    let traj = rep_evolve_with(&rho0, params, t_grid, &RepEvolveOptions::default())?;
    let mut i31 = Vec::with_capacity(t_grid.len());
    let mut i32 = Vec::with_capacity(t_grid.len());
    let mut itot = Vec::with_capacity(t_grid.len());
    for s in &traj {
        let (a, b) = mf_intensities(s, params);
        i31.push(a);
        i32.push(b);
        itot.push(a + b);
    }
    Ok(BurstTrace {
        t: t_grid.to_vec(),
        i31,
        i32,
        itot,
        method: TraceMethod::MeanField,
    })
}

/// Default time grid for a burst at a given atom number: a few collective
/// delay times at dense sampling.
pub fn default_burst_grid(params: &ModelParams, points: usize) -> Vec<f64> {
    let n = params.n_atoms as f64;
    let fast = params.gamma31.max(params.gamma32).max(1e-6);
    let t_max = (2.0 * n.ln().max(0.0) + 10.0) / (n * fast);
    (0..points)
        .map(|k| t_max * k as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Peak {
    pub value: f64,
    pub time: f64,
    /// The grid maximum sat on the first or last sample; the refined value
    /// is then the raw sample and the burst may not be resolved.
    pub at_boundary: bool,
}

/// Grid maximum refined by a parabola through the three points around it.
pub fn peak_extract(trace: &BurstTrace, channel: Channel) -> Result<Peak> {
    let y = trace.channel(channel);
    if y.is_empty() {
        return Err(Error::InvalidData("empty trace".into()));
    }
    let mut imax = 0;
    for (i, v) in y.iter().enumerate() {
        if *v > y[imax] {
            imax = i;
        }
    }
    if imax == 0 || imax == y.len() - 1 {
        return Ok(Peak {
            value: y[imax],
            time: trace.t[imax],
            at_boundary: true,
        });
    }
    let (t0, t1, t2) = (trace.t[imax - 1], trace.t[imax], trace.t[imax + 1]);
    let (y0, y1, y2) = (y[imax - 1], y[imax], y[imax + 1]);
    // Vertex of the parabola y = a t² + b t + c through the three samples,
    // valid on non-uniform grids.
    let d10 = t1 - t0;
    let d21 = t2 - t1;
    let s10 = (y1 - y0) / d10;
    let s21 = (y2 - y1) / d21;
    let a = (s21 - s10) / (d10 + d21);
    if a >= 0.0 {
        // Flat or locally convex data; keep the raw sample.
        return Ok(Peak {
            value: y1,
            time: t1,
            at_boundary: false,
        });
    }
    let b = s10 - a * (t0 + t1);
    let c = y0 - (a * t0 + b) * t0;
    let t_peak = -b / (2.0 * a);
    let v_peak = (a * t_peak + b) * t_peak + c;
    Ok(Peak {
        value: v_peak,
        time: t_peak,
        at_boundary: false,
    })
}

/// Superradiant envelope fit `I(t) = I_max sech²((t − t_d)/τ)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SechFit {
    pub imax: f64,
    pub t_d: f64,
    pub tau: f64,
    /// RMS residual over the fit window, normalized by the fitted peak.
    pub rms_residual: f64,
}

/// Nonlinear least-squares fit of the burst envelope on a window of
/// `window_halfwidth` duration estimates around the peak.
pub fn sech2_fit(trace: &BurstTrace, channel: Channel, window_halfwidth: f64) -> Result<SechFit> {
    let peak = peak_extract(trace, channel)?;
    if peak.at_boundary {
        return Err(Error::FitFailure {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    let y = trace.channel(channel);
    // Duration estimate from the half-maximum crossings; sech²(u) = 1/2 at
    // u ≈ 0.8814.
    let half = peak.value / 2.0;
    let mut left = trace.t[0];
    let mut right = trace.t[trace.t.len() - 1];
    let mut ipeak = 0;
    for (i, &t) in trace.t.iter().enumerate() {
        if (t - peak.time).abs() < (trace.t[ipeak] - peak.time).abs() {
            ipeak = i;
        }
    }
    for i in (0..ipeak).rev() {
        if y[i] <= half {
            let f = (half - y[i]) / (y[i + 1] - y[i]);
            left = trace.t[i] + f * (trace.t[i + 1] - trace.t[i]);
            break;
        }
    }
    for i in ipeak..y.len() - 1 {
        if y[i + 1] <= half {
            let f = (y[i] - half) / (y[i] - y[i + 1]);
            right = trace.t[i] + f * (trace.t[i + 1] - trace.t[i]);
            break;
        }
    }
    let tau_est = ((right - left) / (2.0 * 0.881_373_587_019_543)).max(1e-9);

    let lo = peak.time - window_halfwidth * tau_est;
    let hi = peak.time + window_halfwidth * tau_est;
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (i, &t) in trace.t.iter().enumerate() {
        if t >= lo && t <= hi {
            ts.push(t);
            ys.push(y[i]);
        }
    }
    if ts.len() < 4 {
        return Err(Error::FitFailure {
            iterations: 0,
            residual: f64::NAN,
        });
    }

    let fit = levenberg_marquardt(
        |p, r, jac| {
            let (imax, td, tau) = (p[0], p[1], p[2].abs().max(1e-12));
            r.clear();
            let mut jrows = Vec::new();
            for (t, yv) in ts.iter().zip(&ys) {
                let u = (t - td) / tau;
                let sech = 1.0 / u.cosh();
                let s2 = sech * sech;
                r.push(imax * s2 - yv);
                if jac.is_some() {
                    let tanh = u.tanh();
                    jrows.push(vec![
                        s2,
                        2.0 * imax * s2 * tanh / tau,
                        2.0 * imax * s2 * tanh * u / tau,
                    ]);
                }
            }
            if let Some(j) = jac {
                *j = jrows;
            }
        },
        &[peak.value, peak.time, tau_est],
        &LmOptions::default(),
    )?;
    let imax = fit.params[0];
    Ok(SechFit {
        imax,
        t_d: fit.params[1],
        tau: fit.params[2].abs(),
        rms_residual: fit.rms / imax.abs().max(1e-300),
    })
}

/// Log-log power-law fit `I_peak ~ N^b`.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingFit {
    pub exponent_b: f64,
    pub log_prefactor: f64,
    pub points: Vec<(usize, f64)>,
    pub r_squared: f64,
}

pub fn power_law_fit(peaks: &[(usize, f64)]) -> Result<ScalingFit> {
    if peaks.len() < 4 {
        return Err(Error::InvalidData(
            "power-law fit needs at least four (N, I_peak) points".into(),
        ));
    }
    for &(n, i) in peaks {
        if i <= 0.0 {
            return Err(Error::InvalidData(format!(
                "nonpositive peak intensity {i} at N = {n}"
            )));
        }
    }
    let x: Vec<f64> = peaks.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let y: Vec<f64> = peaks.iter().map(|&(_, i)| i.ln()).collect();
    let (slope, intercept, r2) = linear_fit(&x, &y)?;
    Ok(ScalingFit {
        exponent_b: slope,
        log_prefactor: intercept,
        points: peaks.to_vec(),
        r_squared: r2,
    })
}

/// Apparent finite-size exponent `ξ(N) = ln[I_max(N)/I₀] / ln N`, with the
/// prefactor `A` estimated as the geometric mean of `I_max/(I₀ N²)`.
#[derive(Debug, Clone, Serialize)]
pub struct ApparentExponent {
    pub xi_per_n: Vec<(usize, f64)>,
    pub a_prefactor: f64,
    pub i0: f64,
}

pub fn apparent_exponent(peaks: &[(usize, f64)], i0: f64) -> Result<ApparentExponent> {
    if i0 <= 0.0 {
        return Err(Error::InvalidData("single-emitter scale I0 must be positive".into()));
    }
    if peaks.is_empty() {
        return Err(Error::InvalidData("no peaks supplied".into()));
    }
    let mut xi_per_n = Vec::with_capacity(peaks.len());
    let mut log_a_sum = 0.0;
    for &(n, imax) in peaks {
        if n <= 1 {
            return Err(Error::InvalidData(
                "apparent exponent is undefined at N = 1 (ln N = 0)".into(),
            ));
        }
        if imax <= 0.0 {
            return Err(Error::InvalidData(format!(
                "nonpositive peak intensity {imax} at N = {n}"
            )));
        }
        let nf = n as f64;
        xi_per_n.push((n, (imax / i0).ln() / nf.ln()));
        log_a_sum += (imax / (i0 * nf * nf)).ln();
    }
    Ok(ApparentExponent {
        xi_per_n,
        a_prefactor: (log_a_sum / peaks.len() as f64).exp(),
        i0,
    })
}

/// One sweep entry: peak data for a single atom number.
#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub n_atoms: usize,
    pub peak: Peak,
    pub mf_peak: Peak,
    pub sech: Option<SechFit>,
}

/// Run exact and mean-field transients over an atom-number sweep and
/// extract total-intensity peaks. `base` supplies rates; drives must be
/// off.
pub fn sr_peak_sweep(
    base: &ModelParams,
    n_values: &[usize],
    epsilon: f64,
    points_per_trace: usize,
) -> Result<Vec<SweepPoint>> {
    let mut out = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let p = base.with_n(n);
        let grid = default_burst_grid(&p, points_per_trace);
        let exact = sr_transient_exact(&p, epsilon, &grid)?;
        let mf = sr_transient_mf(&p, epsilon, &grid)?;
        let peak = peak_extract(&exact, Channel::Total)?;
        let mf_peak = peak_extract(&mf, Channel::Total)?;
        let sech = sech2_fit(&exact, Channel::Total, 2.0).ok();
        out.push(SweepPoint {
            n_atoms: n,
            peak,
            mf_peak,
            sech,
        });
    }
    Ok(out)
}

/// Single-emitter intensity scale for [`apparent_exponent`]: the peak of
/// the `N = 1` trace at the same admixture and rates.
pub fn single_emitter_scale(base: &ModelParams, epsilon: f64, points: usize) -> Result<f64> {
    let p = base.with_n(1);
    let grid = default_burst_grid(&p, points);
    let trace = sr_transient_exact(&p, epsilon, &grid)?;
    Ok(peak_extract(&trace, Channel::Total)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn planted_sech(imax: f64, td: f64, tau: f64, n_pts: usize, t_max: f64) -> BurstTrace {
        let t: Vec<f64> = (0..n_pts)
            .map(|k| t_max * k as f64 / (n_pts - 1) as f64)
            .collect();
        let y: Vec<f64> = t
            .iter()
            .map(|&tv| {
                let u = (tv - td) / tau;
                imax / (u.cosh() * u.cosh())
            })
            .collect();
        BurstTrace {
            t: t.clone(),
            i31: y.clone(),
            i32: vec![0.0; n_pts],
            itot: y,
            method: TraceMethod::Exact,
        }
    }

    #[test]
    fn drives_must_be_off() {
        let mut p = ModelParams::sr_asymmetric(4);
        p.omega_c = 0.5;
        let grid = default_burst_grid(&p, 50);
        assert!(matches!(
            sr_transient_exact(&p, 0.1, &grid),
            Err(Error::InvalidConfiguration(_))
        ));
        assert!(matches!(
            sr_transient_mf(&p, 0.1, &grid),
            Err(Error::InvalidConfiguration(_))
        ));
        let p = ModelParams::sr_asymmetric(4);
        assert!(sr_transient_exact(&p, 0.8, &grid).is_err());
    }

    #[test]
    fn single_atom_branching_decay() {
        // ε = 0: I₃₁(t) = Γ₃₁ e^{-(Γ₃₁+Γ₃₂)t}.
        let p = ModelParams::sr_asymmetric(1);
        let grid: Vec<f64> = (0..=40).map(|k| 0.01 * k as f64).collect();
        let trace = sr_transient_exact(&p, 0.0, &grid).unwrap();
        let gtot = p.gamma31 + p.gamma32;
        for (k, &t) in grid.iter().enumerate() {
            assert_relative_eq!(
                trace.i31[k],
                p.gamma31 * (-gtot * t).exp(),
                max_relative = 1e-6
            );
        }
        // Monotone decay peaks at the boundary.
        let peak = peak_extract(&trace, Channel::I31).unwrap();
        assert!(peak.at_boundary);
        assert_abs_diff_eq!(peak.time, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mf_equals_exact_for_single_atom() {
        let mut p = ModelParams::sr_asymmetric(1);
        // Match the dephasing channels: populations are insensitive, but the
        // integrators follow slightly different state paths otherwise.
        p.gamma2 = 0.0;
        p.gamma_phi = 0.0;
        let grid: Vec<f64> = (0..=60).map(|k| 0.02 * k as f64).collect();
        let opts_tol = 1e-9;
        let exact = sr_transient_exact(&p, 0.1, &grid).unwrap();
        let mf = sr_transient_mf(&p, 0.1, &grid).unwrap();
        for k in 0..grid.len() {
            assert_abs_diff_eq!(exact.i31[k], mf.i31[k], epsilon = opts_tol);
            assert_abs_diff_eq!(exact.i32[k], mf.i32[k], epsilon = opts_tol);
        }
    }

    #[test]
    fn coherence_free_mf_start_decays_monotonically() {
        // ε = 0 leaves ⟨σ₁₃⟩ = 0, a fixed point of the feedback, so the
        // mean-field intensity has no cooperative term and only decays.
        let p = ModelParams::sr_symmetric(20);
        let grid = default_burst_grid(&p, 200);
        let trace = sr_transient_mf(&p, 0.0, &grid).unwrap();
        for w in trace.itot.windows(2) {
            assert!(w[1] <= w[0] + 1e-12);
        }
    }

    #[test]
    fn intensities_are_nonnegative_and_total_is_sum() {
        let p = ModelParams::sr_asymmetric(8);
        let grid = default_burst_grid(&p, 300);
        for trace in [
            sr_transient_exact(&p, 0.1, &grid).unwrap(),
            sr_transient_mf(&p, 0.1, &grid).unwrap(),
        ] {
            for k in 0..grid.len() {
                assert!(trace.i31[k] >= -1e-9);
                assert!(trace.i32[k] >= -1e-9);
                assert_abs_diff_eq!(
                    trace.itot[k],
                    trace.i31[k] + trace.i32[k],
                    epsilon = 1e-10
                );
            }
        }
    }

    #[test]
    fn peak_extract_recovers_planted_peak() {
        let trace = planted_sech(7.5, 0.12, 0.03, 600, 0.4);
        let peak = peak_extract(&trace, Channel::Total).unwrap();
        assert!(!peak.at_boundary);
        assert_relative_eq!(peak.value, 7.5, max_relative = 1e-4);
        assert_relative_eq!(peak.time, 0.12, max_relative = 1e-3);
    }

    #[test]
    fn sech_fit_recovers_planted_parameters() {
        let trace = planted_sech(3.2, 0.21, 0.045, 900, 0.6);
        let fit = sech2_fit(&trace, Channel::Total, 2.0).unwrap();
        assert_relative_eq!(fit.imax, 3.2, max_relative = 1e-6);
        assert_relative_eq!(fit.t_d, 0.21, max_relative = 1e-6);
        assert_relative_eq!(fit.tau, 0.045, max_relative = 1e-6);
        assert!(fit.rms_residual < 1e-7);
    }

    #[test]
    fn sech_fit_needs_enough_points_in_window() {
        // A window shrunk to a fraction of the sample spacing holds only
        // the peak sample, which cannot determine three parameters.
        let trace = planted_sech(3.2, 0.21, 0.045, 900, 0.6);
        assert!(sech2_fit(&trace, Channel::Total, 0.005).is_err());
    }

    #[test]
    fn power_law_fit_identities() {
        let peaks: Vec<(usize, f64)> = [2usize, 4, 8, 16, 32]
            .iter()
            .map(|&n| (n, 3.0 * (n as f64) * (n as f64)))
            .collect();
        let fit = power_law_fit(&peaks).unwrap();
        assert_abs_diff_eq!(fit.exponent_b, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.log_prefactor, 3.0f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-12);

        assert!(power_law_fit(&peaks[..3]).is_err());
        let mut bad = peaks.clone();
        bad[0].1 = -1.0;
        assert!(power_law_fit(&bad).is_err());
    }

    #[test]
    fn apparent_exponent_closed_form() {
        let (i0, a) = (5.88, 0.5);
        let peaks: Vec<(usize, f64)> = (2..=100)
            .map(|n| (n, i0 * a * (n as f64) * (n as f64)))
            .collect();
        let xi = apparent_exponent(&peaks, i0).unwrap();
        for &(n, x) in &xi.xi_per_n {
            let expected = 2.0 + a.ln() / (n as f64).ln();
            assert_abs_diff_eq!(x, expected, epsilon = 1e-10);
            // (ξ−2)·ln N is the constant ln A.
            assert_abs_diff_eq!((x - 2.0) * (n as f64).ln(), a.ln(), epsilon = 1e-10);
        }
        assert_relative_eq!(xi.a_prefactor, a, max_relative = 1e-10);

        // |ξ−2| decays like 1/ln N on the planted family.
        let xi2 = xi.xi_per_n[0].1;
        let xi100 = xi.xi_per_n.last().unwrap().1;
        assert!((xi100 - 2.0).abs() < (xi2 - 2.0).abs());

        assert!(apparent_exponent(&[(1, 1.0)], i0).is_err());
        assert!(apparent_exponent(&peaks, -1.0).is_err());
    }

    #[test]
    fn small_ensemble_burst_peaks_inside_grid() {
        let p = ModelParams::sr_asymmetric(8);
        let grid = default_burst_grid(&p, 400);
        let trace = sr_transient_exact(&p, 0.1, &grid).unwrap();
        let peak = peak_extract(&trace, Channel::Total).unwrap();
        assert!(!peak.at_boundary, "burst clipped by the grid");
        assert!(peak.time > 0.0 && peak.time < grid[grid.len() - 1]);
        // Channel asymmetry: the strong branch dominates.
        let p31 = peak_extract(&trace, Channel::I31).unwrap();
        let p32 = peak_extract(&trace, Channel::I32).unwrap();
        assert!(p31.value > 2.0 * p32.value);
    }

    #[test]
    fn excitation_bookkeeping_balances_fluxes() {
        // d⟨Ne⟩/dt = −Γ₃₁⟨S1†S1⟩ − Γ₃₂⟨S2†S2⟩ along the trajectory.
        use crate::liouvillian::{evolve_observed, liouvillian_for, EvolveOptions};
        use crate::symspace::number_operators;

        let p = ModelParams::sr_asymmetric(6);
        let basis = build_basis(6).unwrap();
        let l = liouvillian_for(&p, &basis).unwrap();
        let (c1, c2, c3) = initial_amplitudes(0.1);
        let psi = symmetric_product_state(&basis, c1, c2, c3).unwrap();
        let rho0 = DensityMatrix::from_pure(&psi);
        let s1 = lowering_operator(&basis, Branch::One);
        let s2 = lowering_operator(&basis, Branch::Two);
        let f1 = s1.dagger().matmul(&s1);
        let f2 = s2.dagger().matmul(&s2);
        let (_, _, ne) = number_operators(&basis);
        let grid: Vec<f64> = (0..=400).map(|k| 0.3 * k as f64 / 400.0).collect();
        let recs = evolve_observed(&l, &rho0, &grid, &[&ne, &f1, &f2], &EvolveOptions::default())
            .unwrap();
        let dt = grid[1] - grid[0];
        for k in 1..recs.len() - 1 {
            let dne = (recs[k + 1][0].re - recs[k - 1][0].re) / (2.0 * dt);
            let flux = -p.gamma31 * recs[k][1].re - p.gamma32 * recs[k][2].re;
            assert_abs_diff_eq!(dne, flux, epsilon = 1e-3 * flux.abs().max(1.0));
        }
    }
}
