// Scratch probe for burst physics; will be replaced by the real examples.
use dicke_lambda::meanfield::{mf_intensities, rep_evolve_variant, RepState};
use dicke_lambda::params::ModelParams;
use dicke_lambda::superradiance::*;
use num_complex::Complex64;

fn mf_peak(p: &ModelParams, grid: &[f64], factor: f64, dissipators: bool) -> (f64, f64) {
    let eps = 0.1;
    let c3 = (1.0f64 - 2.0 * eps * eps).sqrt();
    let rho0 = RepState::pure(
        Complex64::new(eps, 0.0),
        Complex64::new(eps, 0.0),
        Complex64::new(c3, 0.0),
    );
    let traj = rep_evolve_variant(&rho0, p, grid, factor, dissipators).unwrap();
    let mut best = (0.0f64, 0.0f64);
    for (k, s) in traj.iter().enumerate() {
        let (a, b) = mf_intensities(s, p);
        if a + b > best.0 {
            best = (a + b, grid[k]);
        }
    }
    best
}

fn main() {
    for (label, base) in [
        ("asym", ModelParams::sr_asymmetric(1)),
        ("sym ", ModelParams::sr_symmetric(1)),
    ] {
        println!("== {label}: variants (factor, dissipators)");
        for n in [8usize, 12, 20, 30] {
            let p = base.with_n(n);
            let grid = default_burst_grid(&p, 1201);
            let exact = sr_transient_exact(&p, 0.1, &grid).unwrap();
            let pe = peak_extract(&exact, Channel::Total).unwrap();
            print!(
                "  N={n:2} exact {v:9.2} @ {t:6.4} |",
                v = pe.value,
                t = pe.time
            );
            for (factor, diss, tag) in [
                (0.5, true, "1/2+D"),
                (0.5, false, "1/2+H"),
                (0.25, true, "1/4+D"),
                (0.25, false, "1/4+H"),
            ] {
                let (v, t) = mf_peak(&p, &grid, factor, diss);
                print!(
                    " {tag}: {dev:+5.1}%/{dt:+5.1}%",
                    dev = 100.0 * (v - pe.value) / pe.value,
                    dt = 100.0 * (t - pe.time) / pe.time.max(1e-12)
                );
            }
            println!();
        }
    }
}
