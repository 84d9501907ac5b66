//! Adaptive embedded Runge–Kutta 5(4) (Dormand–Prince) for complex state
//! vectors.
//!
//! Steps are clamped so that every requested grid time is hit exactly; the
//! caller receives one callback per grid point. The first sample is the
//! initial condition itself.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-8,
            atol: 1e-10,
            max_steps: 50_000_000,
        }
    }
}

impl OdeOptions {
    pub fn tight() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            ..Self::default()
        }
    }
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrate `dy/dt = rhs(t, y)` from `t_grid[0]`, sampling at every grid
/// time. `rhs` writes the derivative into its third argument.
pub fn integrate<F, S>(
    mut rhs: F,
    y0: &[Complex64],
    t_grid: &[f64],
    opts: &OdeOptions,
    mut on_sample: S,
) -> Result<()>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
    S: FnMut(usize, f64, &[Complex64]),
{
    if t_grid.is_empty() {
        return Ok(());
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(
                "time grid must be strictly increasing".into(),
            ));
        }
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t_grid[0];
    on_sample(0, t, &y);
    if t_grid.len() == 1 {
        return Ok(());
    }

    let span = t_grid[t_grid.len() - 1] - t;
    let h_min = span * 1e-14;

    let mut k: Vec<Vec<Complex64>> = vec![vec![Complex64::ZERO; n]; 7];
    let mut y_stage = vec![Complex64::ZERO; n];
    let mut y5 = vec![Complex64::ZERO; n];

    rhs(t, &y, &mut k[0]);
    let mut h = initial_step(&y, &k[0], span, opts);
    let mut next_sample = 1;
    let mut steps = 0usize;

    while next_sample < t_grid.len() {
        if steps >= opts.max_steps {
            return Err(Error::Stiffness { t, dt: h });
        }
        steps += 1;

        let t_target = t_grid[next_sample];
        let mut h_step = h.min(t_target - t);
        if h_step < h_min {
            h_step = h_min.min(t_target - t);
        }
        let hit_sample = t + h_step >= t_target - 1e-15 * span;
        if hit_sample {
            h_step = t_target - t;
        }

        // FSAL: k[0] always holds the derivative at the current (t, y).
        for stage in 1..7 {
            for i in 0..n {
                let mut acc = Complex64::ZERO;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = A[stage - 1][j];
                    if a != 0.0 {
                        acc += a * kj[i];
                    }
                }
                y_stage[i] = y[i] + h_step * acc;
            }
            let t_stage = t + C[stage] * h_step;
            let (head, tail) = k.split_at_mut(stage);
            let _ = head;
            rhs(t_stage, &y_stage, &mut tail[0]);
        }
        for i in 0..n {
            let mut acc5 = Complex64::ZERO;
            let mut acc_err = Complex64::ZERO;
            for (j, kj) in k.iter().enumerate() {
                if B5[j] != 0.0 {
                    acc5 += B5[j] * kj[i];
                }
                let db = B5[j] - B4[j];
                if db != 0.0 {
                    acc_err += db * kj[i];
                }
            }
            y5[i] = y[i] + h_step * acc5;
            y_stage[i] = h_step * acc_err; // reuse as error store
        }

        let mut err_sq = 0.0;
        for i in 0..n {
            let scale = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            let e = y_stage[i].norm() / scale;
            err_sq += e * e;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t = if hit_sample { t_target } else { t + h_step };
            std::mem::swap(&mut y, &mut y5);
            // FSAL: stage 7 is the derivative at the accepted point.
            k.swap(0, 6);
            if hit_sample {
                on_sample(next_sample, t, &y);
                next_sample += 1;
            }
        }

        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h = (h_step * factor).max(h_min);
        if h < h_min.max(f64::MIN_POSITIVE * 1e4) {
            return Err(Error::Stiffness { t, dt: h });
        }
    }
    Ok(())
}

fn initial_step(y: &[Complex64], f0: &[Complex64], span: f64, opts: &OdeOptions) -> f64 {
    let ynorm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let fnorm = f0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let guess = if fnorm > 1e-300 {
        0.01 * (ynorm.max(opts.atol) / fnorm)
    } else {
        span * 1e-3
    };
    guess.min(span * 0.1).max(span * 1e-12)
}
