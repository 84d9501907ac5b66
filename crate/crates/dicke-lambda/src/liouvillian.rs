//! Collective Hamiltonian, Lindblad dissipators, and the Liouvillian
//! superoperator in the symmetric subspace, with steady-state solves and
//! time propagation.
//!
//! The Hamiltonian follows the exact-solver sign convention
//! `H = Δ₁ Ne + (Δ₁−Δ₂) N2 + (Ω_p/2) S1x + (Ω_c/2) S2x`, and the collapse
//! operators are `C1 = √Γ₃₁ S1`, `C2 = √Γ₃₂ S2`, `Cφ = √γ_φ (N1−N2)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::DensityMatrix;
use crate::error::{Error, Result};
use crate::linsolve;
use crate::ode::{self, OdeOptions};
use crate::params::ModelParams;
use crate::sparse::SparseOperator;
use crate::symspace::{lowering_operator, number_operators, quadrature, Branch, SymmetricBasis};

/// `H = Δ₁ Ne + (Δ₁−Δ₂) N2 + (Ω_p/2) S1x + (Ω_c/2) S2x`.
pub fn build_hamiltonian(params: &ModelParams, basis: &SymmetricBasis) -> SparseOperator {
    let (_, n2, ne) = number_operators(basis);
    let s1x = quadrature(&lowering_operator(basis, Branch::One));
    let s2x = quadrature(&lowering_operator(basis, Branch::Two));
    let c = |x: f64| Complex64::new(x, 0.0);
    ne.scale(c(params.delta1))
        .add(&n2.scale(c(params.delta1 - params.delta2)))
        .add(&s1x.scale(c(params.omega_p / 2.0)))
        .add(&s2x.scale(c(params.omega_c / 2.0)))
}

/// Collapse operators in fixed order `[C1, C2, Cφ]`; zero-rate channels stay
/// as zero matrices so the superoperator assembly is branch-free.
pub fn collapse_operators(params: &ModelParams, basis: &SymmetricBasis) -> Vec<SparseOperator> {
    let s1 = lowering_operator(basis, Branch::One);
    let s2 = lowering_operator(basis, Branch::Two);
    let (n1, n2, _) = number_operators(basis);
    let c = |x: f64| Complex64::new(x.sqrt(), 0.0);
    vec![
        s1.scale(c(params.gamma31)),
        s2.scale(c(params.gamma32)),
        n1.add(&n2.scale(-Complex64::ONE)).scale(c(params.gamma_phi)),
    ]
}

/// Sparse superoperator under column-stacking vectorization:
/// `L = −i(I⊗H − Hᵀ⊗I) + Σ_k [ C̄_k⊗C_k − ½ I⊗(C_k†C_k) − ½ (C_k†C_k)ᵀ⊗I ]`.
#[derive(Debug, Clone)]
pub struct LiouvillianOp {
    rho_dim: usize,
    matrix: SparseOperator,
}

/// Vectorization convention tag carried by every [`LiouvillianOp`].
pub const VECTORIZATION: &str = "column-stacking";

impl LiouvillianOp {
    /// Dimension of the underlying density matrix (`D`).
    pub fn rho_dim(&self) -> usize {
        self.rho_dim
    }

    /// Superoperator dimension (`D²`).
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &SparseOperator {
        &self.matrix
    }

    pub fn vectorization(&self) -> &'static str {
        VECTORIZATION
    }

    /// `out = L v` on vectorized density matrices.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        self.matrix.matvec(v, out);
    }

    /// `unvec(L vec(ρ))`.
    pub fn apply_density(&self, rho: &DensityMatrix) -> DMatrix<Complex64> {
        let v = rho.vectorize();
        let mut out = vec![Complex64::ZERO; v.len()];
        self.apply(&v, &mut out);
        DMatrix::from_column_slice(self.rho_dim, self.rho_dim, &out)
    }

    /// `‖L vec(ρ)‖∞`.
    pub fn residual_inf(&self, rho: &DensityMatrix) -> f64 {
        let v = rho.vectorize();
        let mut out = vec![Complex64::ZERO; v.len()];
        self.apply(&v, &mut out);
        out.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

/// Assemble the Lindblad generator from a Hamiltonian and collapse operators.
pub fn assemble_liouvillian(
    hamiltonian: &SparseOperator,
    collapse: &[SparseOperator],
) -> Result<LiouvillianOp> {
    let d = hamiltonian.dim();
    for (k, c) in collapse.iter().enumerate() {
        if c.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: collapse[k].dim(),
            });
        }
    }
    let eye = SparseOperator::identity(d);
    let minus_i = Complex64::new(0.0, -1.0);
    let half = Complex64::new(0.5, 0.0);

    let mut l = eye
        .kron(hamiltonian)
        .add(&hamiltonian.transpose().kron(&eye).scale(-Complex64::ONE))
        .scale(minus_i);
    for c in collapse {
        if c.is_zero() {
            continue;
        }
        let cdc = c.dagger().matmul(c);
        l = l
            .add(&c.conjugate().kron(c))
            .add(&eye.kron(&cdc).scale(-half))
            .add(&cdc.transpose().kron(&eye).scale(-half));
    }
    Ok(LiouvillianOp {
        rho_dim: d,
        matrix: l,
    })
}

/// Build the Liouvillian for a parameter set in one call.
pub fn liouvillian_for(params: &ModelParams, basis: &SymmetricBasis) -> Result<LiouvillianOp> {
    let h = build_hamiltonian(params, basis);
    let collapse = collapse_operators(params, basis);
    assemble_liouvillian(&h, &collapse)
}

#[derive(Debug, Clone, Copy)]
pub struct SteadyStateOptions {
    /// Required `‖L vec(ρss)‖∞` after trace normalization.
    pub residual_tol: f64,
    /// Iteration cap for the BiCGSTAB fallback.
    pub max_iterations: usize,
    /// Dense-analysis cutoff (superoperator dimension) for classifying
    /// singular direct solves.
    pub dense_analysis_max: usize,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iterations: 200_000,
            dense_analysis_max: 1024,
        }
    }
}

/// Solve `L ρss = 0` with `Tr ρss = 1`.
///
/// One diagonal row of `L` is replaced by the trace constraint (the
/// diagonal rows are linearly dependent through trace preservation, so no
/// information is lost) and the square system is solved directly; a
/// Jacobi-BiCGSTAB refinement runs if the direct residual misses the
/// tolerance. Singular factorizations are classified through a dense
/// null-space analysis at small dimension.
pub fn steady_state(l: &LiouvillianOp) -> Result<DensityMatrix> {
    steady_state_with(l, &SteadyStateOptions::default())
}

pub fn steady_state_with(
    l: &LiouvillianOp,
    opts: &SteadyStateOptions,
) -> Result<DensityMatrix> {
    let d = l.rho_dim();
    let n = l.dim();
    let traced = trace_replaced_system(l, 0);
    let mut b = vec![Complex64::ZERO; n];
    b[0] = Complex64::ONE;

    let x = match linsolve::sparse_lu_solve(&traced, &b) {
        Some(x) => x,
        None => return classify_singular(l, opts),
    };
    let max_entry = x.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if !max_entry.is_finite() || max_entry > 1e10 {
        return classify_singular(l, opts);
    }
    let mut rho = finish_state(d, &x);
    let mut residual = l.residual_inf(&rho);
    if residual >= opts.residual_tol {
        let refined = linsolve::bicgstab(&traced, &b, Some(&x), 1e-13, opts.max_iterations);
        rho = finish_state(d, &refined.x);
        residual = l.residual_inf(&rho);
        if residual >= opts.residual_tol {
            return Err(Error::SolverFailure {
                residual,
                tolerance: opts.residual_tol,
            });
        }
    }
    rho.validate()?;
    Ok(rho)
}

fn trace_replaced_system(l: &LiouvillianOp, replaced_diag: usize) -> SparseOperator {
    let d = l.rho_dim();
    let row = replaced_diag * (d + 1);
    let mut trips: Vec<(usize, usize, Complex64)> = l
        .matrix()
        .iter()
        .filter(|&(r, _, _)| r != row)
        .collect();
    for k in 0..d {
        trips.push((row, k * (d + 1), Complex64::ONE));
    }
    SparseOperator::from_triplets(l.dim(), &trips)
}

fn finish_state(d: usize, x: &[Complex64]) -> DensityMatrix {
    let mut rho = DensityMatrix::unvectorize(d, x);
    rho.hermitize();
    rho.normalize_trace();
    rho
}

/// A singular trace-replaced system means the Liouvillian kernel is not
/// one-dimensional (replacing a redundant diagonal row cannot break a
/// unique-kernel system). At small dimension the kernel is counted
/// explicitly to rule out factorization breakdown.
fn classify_singular(l: &LiouvillianOp, opts: &SteadyStateOptions) -> Result<DensityMatrix> {
    let n = l.dim();
    if n <= opts.dense_analysis_max {
        let dense = l.matrix().to_dense();
        let svd = dense.svd(false, true);
        let smax = svd
            .singular_values
            .iter()
            .cloned()
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let kernel = svd
            .singular_values
            .iter()
            .filter(|&&s| s < smax * 1e-12 + 1e-14)
            .count();
        if kernel >= 2 {
            return Err(Error::DegenerateSteadyState(format!(
                "Liouvillian kernel has dimension {kernel}; the stationary state is a family, not a point"
            )));
        }
        if kernel == 1 {
            // The kernel is unique but the direct solve broke down; recover
            // the null vector from the SVD.
            let v_t = svd.v_t.expect("requested V^T");
            let null_row = v_t.nrows() - 1;
            let x: Vec<Complex64> = (0..n).map(|j| v_t[(null_row, j)].conj()).collect();
            let trace: Complex64 = (0..l.rho_dim()).map(|k| x[k * (l.rho_dim() + 1)]).sum();
            if trace.norm() < 1e-10 {
                return Err(Error::DegenerateSteadyState(
                    "null vector is traceless; no normalizable stationary state".into(),
                ));
            }
            let rho = finish_state(l.rho_dim(), &x);
            let residual = l.residual_inf(&rho);
            if residual < opts.residual_tol {
                rho.validate()?;
                return Ok(rho);
            }
            return Err(Error::SolverFailure {
                residual,
                tolerance: opts.residual_tol,
            });
        }
        // kernel == 0: no stationary state at all for the replaced system.
        return Err(Error::SolverFailure {
            residual: f64::INFINITY,
            tolerance: opts.residual_tol,
        });
    }
    Err(Error::DegenerateSteadyState(
        "direct factorization is singular; the stationary state is not unique".into(),
    ))
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub ode: OdeOptions,
    /// Allowed `|Tr ρ(t) − Tr ρ(0)|` over the run.
    pub trace_tol: f64,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self {
            ode: OdeOptions::default(),
            trace_tol: 1e-8,
        }
    }
}

/// Propagate `dvec(ρ)/dt = L vec(ρ)` over `t_grid`, returning Hermitized
/// snapshots at every grid time.
pub fn evolve(
    l: &LiouvillianOp,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Vec<DensityMatrix>> {
    evolve_with(l, rho0, t_grid, &EvolveOptions::default())
}

pub fn evolve_with(
    l: &LiouvillianOp,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<DensityMatrix>> {
    check_grid_start(t_grid)?;
    if rho0.dim() != l.rho_dim() {
        return Err(Error::DimensionMismatch {
            expected: l.rho_dim(),
            found: rho0.dim(),
        });
    }
    let d = l.rho_dim();
    let v0 = rho0.vectorize();
    let mut snapshots = Vec::with_capacity(t_grid.len());
    ode::integrate(
        |_, v, dv| l.apply(v, dv),
        &v0,
        t_grid,
        &opts.ode,
        |_, _, v| {
            let mut rho = DensityMatrix::unvectorize(d, v);
            rho.hermitize();
            snapshots.push(rho);
        },
    )?;
    let tr0 = snapshots[0].trace().re;
    let drift = snapshots
        .iter()
        .map(|r| (r.trace().re - tr0).abs())
        .fold(0.0, f64::max);
    if drift > opts.trace_tol {
        return Err(Error::TraceDrift {
            drift,
            tolerance: opts.trace_tol,
        });
    }
    Ok(snapshots)
}

/// Propagate and record only expectation values `Tr[O_k ρ(t)]`; avoids
/// storing full snapshots on large subspaces.
pub fn evolve_observed(
    l: &LiouvillianOp,
    rho0: &DensityMatrix,
    t_grid: &[f64],
    observables: &[&SparseOperator],
    opts: &EvolveOptions,
) -> Result<Vec<Vec<Complex64>>> {
    check_grid_start(t_grid)?;
    if rho0.dim() != l.rho_dim() {
        return Err(Error::DimensionMismatch {
            expected: l.rho_dim(),
            found: rho0.dim(),
        });
    }
    for op in observables {
        if op.dim() != l.rho_dim() {
            return Err(Error::DimensionMismatch {
                expected: l.rho_dim(),
                found: op.dim(),
            });
        }
    }
    let d = l.rho_dim();
    let v0 = rho0.vectorize();
    let mut records = Vec::with_capacity(t_grid.len());
    let mut max_drift = 0.0f64;
    let tr0: Complex64 = (0..d).map(|k| v0[k * (d + 1)]).sum();
    ode::integrate(
        |_, v, dv| l.apply(v, dv),
        &v0,
        t_grid,
        &opts.ode,
        |_, _, v| {
            let tr: Complex64 = (0..d).map(|k| v[k * (d + 1)]).sum();
            max_drift = max_drift.max((tr - tr0).norm());
            let row: Vec<Complex64> = observables
                .iter()
                .map(|op| {
                    // Tr[O ρ] = Σ_{i,j} O[i,j] ρ[j,i]; element (j,i) sits at
                    // vec index i·D + j under column stacking.
                    op.iter().map(|(i, j, o)| o * v[i * d + j]).sum()
                })
                .collect();
            records.push(row);
        },
    )?;
    if max_drift > opts.trace_tol {
        return Err(Error::TraceDrift {
            drift: max_drift,
            tolerance: opts.trace_tol,
        });
    }
    Ok(records)
}

fn check_grid_start(t_grid: &[f64]) -> Result<()> {
    match t_grid.first() {
        None => Err(Error::InvalidParameter("empty time grid".into())),
        Some(&t0) if t0 < 0.0 => Err(Error::InvalidParameter(
            "time grid must start at t >= 0".into(),
        )),
        _ => Ok(()),
    }
}

/// `Tr[op ρ]`.
pub fn expectation(op: &SparseOperator, rho: &DensityMatrix) -> Result<Complex64> {
    if op.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: op.dim(),
        });
    }
    Ok(op.trace_with(rho.matrix()))
}
