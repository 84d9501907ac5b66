//! Small least-squares utilities: a dense Levenberg–Marquardt loop for the
//! burst-envelope fit and ordinary linear regression for log-log scaling.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop when the relative cost improvement falls below this.
    pub cost_tol: f64,
    /// Stop when the step is this small relative to the parameters.
    pub step_tol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            cost_tol: 1e-14,
            step_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LmResult {
    pub params: Vec<f64>,
    /// Root-mean-square residual at the solution.
    pub rms: f64,
    pub iterations: usize,
}

/// Levenberg–Marquardt minimization of `Σ r_i(p)²`.
///
/// `model` fills the residual vector and, when given, the Jacobian
/// `J[i][j] = ∂r_i/∂p_j`.
pub fn levenberg_marquardt<F>(mut model: F, p0: &[f64], opts: &LmOptions) -> Result<LmResult>
where
    F: FnMut(&[f64], &mut Vec<f64>, Option<&mut Vec<Vec<f64>>>),
{
    let np = p0.len();
    let mut p = p0.to_vec();
    let mut r = Vec::new();
    let mut jac: Vec<Vec<f64>> = Vec::new();
    model(&p, &mut r, Some(&mut jac));
    let nr = r.len();
    if nr < np {
        return Err(Error::FitFailure {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    let mut cost: f64 = r.iter().map(|v| v * v).sum();
    let mut lambda = 1e-3;

    for it in 0..opts.max_iterations {
        // Normal equations (J^T J + λ diag(J^T J)) δ = -J^T r.
        let j = DMatrix::from_fn(nr, np, |i, k| jac[i][k]);
        let rv = DVector::from_column_slice(&r);
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * rv;
        let mut improved = false;
        for _ in 0..25 {
            let mut damped = jtj.clone();
            for k in 0..np {
                let d = jtj[(k, k)];
                damped[(k, k)] = d + lambda * d.max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, s)| a + s).collect();
            let mut r_trial = Vec::new();
            model(&trial, &mut r_trial, None);
            let cost_trial: f64 = r_trial.iter().map(|v| v * v).sum();
            if cost_trial.is_finite() && cost_trial < cost {
                let rel_step = step
                    .iter()
                    .zip(&p)
                    .map(|(s, a)| s.abs() / a.abs().max(1e-12))
                    .fold(0.0f64, f64::max);
                let rel_gain = (cost - cost_trial) / cost.max(1e-300);
                p = trial;
                cost = cost_trial;
                lambda = (lambda * 0.3).max(1e-12);
                improved = true;
                if rel_gain < opts.cost_tol || rel_step < opts.step_tol {
                    return Ok(LmResult {
                        params: p,
                        rms: (cost / nr as f64).sqrt(),
                        iterations: it + 1,
                    });
                }
                break;
            }
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
        if !improved {
            // Damping exhausted: accept the current point if it is a
            // stationary spot, otherwise report failure.
            let grad_inf = jtr.iter().map(|v| v.abs()).fold(0.0, f64::max);
            if grad_inf < 1e-10 * (1.0 + cost) {
                return Ok(LmResult {
                    params: p,
                    rms: (cost / nr as f64).sqrt(),
                    iterations: it + 1,
                });
            }
            return Err(Error::FitFailure {
                iterations: it + 1,
                residual: (cost / nr as f64).sqrt(),
            });
        }
        model(&p, &mut r, Some(&mut jac));
    }
    Ok(LmResult {
        params: p,
        rms: (cost / nr as f64).sqrt(),
        iterations: opts.max_iterations,
    })
}

/// Ordinary least squares `y = slope·x + intercept`; returns
/// `(slope, intercept, r²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidData(
            "linear fit needs at least two (x, y) pairs".into(),
        ));
    }
    let n = x.len() as f64;
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let sxx: f64 = x.iter().map(|v| v * v).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(Error::InvalidData("degenerate abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - (slope * a + intercept);
            e * e
        })
        .sum();
    let r2 = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    Ok((slope, intercept, r2))
}
