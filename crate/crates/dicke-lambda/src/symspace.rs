//! Permutation-symmetric (Dicke) subspace for `N` three-level atoms.
//!
//! Basis states are labeled by level occupations `|n1, n2, ne⟩` with
//! `n1 + n2 + ne = N`; the subspace dimension is `(N+1)(N+2)/2`. Collective
//! operators act by shifting occupations, so they stay sparse for any `N`.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sparse::SparseOperator;

/// Largest atom number accepted by [`build_basis`]. At `N = 60` the
/// superoperator dimension is already ~3.6M; anything larger needs an
/// explicit opt-in through [`build_basis_with_max`].
pub const DEFAULT_MAX_ATOMS: usize = 60;

/// Occupations of the three levels; `ne` counts the excited level `|3⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BasisState {
    pub n1: usize,
    pub n2: usize,
    pub ne: usize,
}

impl BasisState {
    pub fn total(&self) -> usize {
        self.n1 + self.n2 + self.ne
    }
}

/// Ordered enumeration of the symmetric subspace, lexicographic in
/// `(n1, n2)` with `ne = N - n1 - n2`.
#[derive(Debug, Clone)]
pub struct SymmetricBasis {
    n_atoms: usize,
    states: Vec<BasisState>,
}

impl SymmetricBasis {
    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> BasisState {
        self.states[index]
    }

    /// Position of `|n1, n2, ne⟩` in the lexicographic enumeration.
    pub fn index_of(&self, n1: usize, n2: usize, ne: usize) -> Option<usize> {
        let n = self.n_atoms;
        if n1 + n2 + ne != n || n1 > n || n2 > n {
            return None;
        }
        // Rows with first occupation < n1 contribute (n+1) + n + ... blocks.
        let skipped = n1 * (n + 1) - n1 * (n1.wrapping_sub(1)) / 2;
        Some(skipped + n2)
    }
}

/// Optical branch of the lambda system: `3↔1` carries the probe,
/// `3↔2` the control.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `3 → 1` transition (probe leg).
    One,
    /// `3 → 2` transition (control leg).
    Two,
}

/// Enumerate the symmetric subspace for `n_atoms` atoms.
pub fn build_basis(n_atoms: usize) -> Result<SymmetricBasis> {
    build_basis_with_max(n_atoms, DEFAULT_MAX_ATOMS)
}

/// Same as [`build_basis`] with an explicit upper bound on `N`.
pub fn build_basis_with_max(n_atoms: usize, max_atoms: usize) -> Result<SymmetricBasis> {
    if n_atoms == 0 {
        return Err(Error::InvalidParameter(
            "atom number must be at least 1".into(),
        ));
    }
    if n_atoms > max_atoms {
        return Err(Error::InvalidParameter(format!(
            "atom number {n_atoms} exceeds the configured maximum {max_atoms}"
        )));
    }
    let mut states = Vec::with_capacity((n_atoms + 1) * (n_atoms + 2) / 2);
    for n1 in 0..=n_atoms {
        for n2 in 0..=(n_atoms - n1) {
            states.push(BasisState {
                n1,
                n2,
                ne: n_atoms - n1 - n2,
            });
        }
    }
    Ok(SymmetricBasis { n_atoms, states })
}

/// Diagonal occupation operators `(N1, N2, Ne)`.
pub fn number_operators(
    basis: &SymmetricBasis,
) -> (SparseOperator, SparseOperator, SparseOperator) {
    let diag = |f: fn(&BasisState) -> usize| {
        let d: Vec<Complex64> = basis
            .states()
            .iter()
            .map(|s| Complex64::new(f(s) as f64, 0.0))
            .collect();
        SparseOperator::from_diagonal(&d)
    };
    (diag(|s| s.n1), diag(|s| s.n2), diag(|s| s.ne))
}

/// Collective lowering operator for one optical branch:
/// `S1 |n1,n2,ne⟩ = √((n1+1) ne) |n1+1, n2, ne−1⟩` and analogously for `S2`.
pub fn lowering_operator(basis: &SymmetricBasis, branch: Branch) -> SparseOperator {
    let mut trips = Vec::new();
    for (col, s) in basis.states().iter().enumerate() {
        if s.ne == 0 {
            continue;
        }
        let (target, amp) = match branch {
            Branch::One => (
                basis.index_of(s.n1 + 1, s.n2, s.ne - 1),
                (((s.n1 + 1) * s.ne) as f64).sqrt(),
            ),
            Branch::Two => (
                basis.index_of(s.n1, s.n2 + 1, s.ne - 1),
                (((s.n2 + 1) * s.ne) as f64).sqrt(),
            ),
        };
        let row = target.expect("occupation shift stays inside the basis");
        trips.push((row, col, Complex64::new(amp, 0.0)));
    }
    SparseOperator::from_triplets(basis.dim(), &trips)
}

/// Hermitian quadrature `S + S†`.
pub fn quadrature(op: &SparseOperator) -> SparseOperator {
    op.add(&op.dagger())
}

/// Pure state of the symmetric subspace.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Symmetric product state `(c1|1⟩ + c2|2⟩ + c3|3⟩)^⊗N` projected onto the
/// symmetric basis: the amplitude on `|n1,n2,ne⟩` is
/// `√(N!/(n1! n2! ne!)) · c1^n1 c2^n2 c3^ne`.
pub fn symmetric_product_state(
    basis: &SymmetricBasis,
    c1: Complex64,
    c2: Complex64,
    c3: Complex64,
) -> Result<StateVector> {
    let norm_sq = c1.norm_sqr() + c2.norm_sqr() + c3.norm_sqr();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "single-atom amplitudes must be normalized: |c|^2 = {norm_sq}"
        )));
    }
    let n = basis.n_atoms();
    let ln_fact = ln_factorials(n);
    let mut amps = DVector::zeros(basis.dim());
    for (i, s) in basis.states().iter().enumerate() {
        let ln_multinomial =
            ln_fact[n] - ln_fact[s.n1] - ln_fact[s.n2] - ln_fact[s.ne];
        let weight = (0.5 * ln_multinomial).exp();
        amps[i] = weight * cpow(c1, s.n1) * cpow(c2, s.n2) * cpow(c3, s.ne);
    }
    // Kill the residual rounding of the multinomial expansion.
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps /= Complex64::new(norm, 0.0);
    Ok(StateVector { amplitudes: amps })
}

fn cpow(c: Complex64, n: usize) -> Complex64 {
    let mut acc = Complex64::ONE;
    for _ in 0..n {
        acc *= c;
    }
    acc
}

fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = vec![0.0; n + 1];
    for k in 1..=n {
        table[k] = table[k - 1] + (k as f64).ln();
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_dimension_follows_closed_form() {
        for n in 1..=60 {
            let basis = build_basis(n).unwrap();
            assert_eq!(basis.dim(), (n + 1) * (n + 2) / 2, "N = {n}");
        }
        assert_eq!(build_basis(14).unwrap().dim(), 120);
        assert_eq!(build_basis(30).unwrap().dim(), 496);
    }

    #[test]
    fn basis_bounds_are_enforced() {
        assert!(build_basis(0).is_err());
        assert!(build_basis(61).is_err());
        assert!(build_basis_with_max(61, 61).is_ok());
    }

    #[test]
    fn single_atom_basis_has_three_states() {
        let basis = build_basis(1).unwrap();
        let listed: Vec<_> = basis.states().iter().map(|s| (s.n1, s.n2, s.ne)).collect();
        assert_eq!(listed, vec![(0, 0, 1), (0, 1, 0), (1, 0, 0)]);
    }

    #[test]
    fn index_lookup_matches_enumeration() {
        let basis = build_basis(7).unwrap();
        for (i, s) in basis.states().iter().enumerate() {
            assert_eq!(basis.index_of(s.n1, s.n2, s.ne), Some(i));
        }
        assert_eq!(basis.index_of(4, 4, 0), None);
    }

    #[test]
    fn number_operators_count_occupations() {
        let basis = build_basis(2).unwrap();
        let (n1, n2, ne) = number_operators(&basis);
        let i = basis.index_of(1, 0, 1).unwrap();
        assert_eq!(n1.get(i, i).re, 1.0);
        assert_eq!(n2.get(i, i).re, 0.0);
        assert_eq!(ne.get(i, i).re, 1.0);

        let basis = build_basis(1).unwrap();
        let (n1, n2, ne) = number_operators(&basis);
        let i = basis.index_of(0, 0, 1).unwrap();
        assert_eq!(ne.get(i, i).re, 1.0);
        assert_eq!(n1.get(i, i).re, 0.0);
        assert_eq!(n2.get(i, i).re, 0.0);
    }

    #[test]
    fn number_operator_trace_identity() {
        for n in [1usize, 3, 6, 11] {
            let basis = build_basis(n).unwrap();
            let (n1, n2, ne) = number_operators(&basis);
            let total = n1.add(&n2).add(&ne);
            let trace = total.trace();
            assert_abs_diff_eq!(trace.re, (n * basis.dim()) as f64, epsilon = 1e-9);
            assert_abs_diff_eq!(trace.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lowering_operator_matrix_elements() {
        let basis = build_basis(1).unwrap();
        let s1 = lowering_operator(&basis, Branch::One);
        let from = basis.index_of(0, 0, 1).unwrap();
        let to = basis.index_of(1, 0, 0).unwrap();
        assert_abs_diff_eq!(s1.get(to, from).re, 1.0, epsilon = 1e-15);

        let basis = build_basis(2).unwrap();
        let s1 = lowering_operator(&basis, Branch::One);
        let from = basis.index_of(0, 0, 2).unwrap();
        let to = basis.index_of(1, 0, 1).unwrap();
        assert_abs_diff_eq!(s1.get(to, from).re, 2f64.sqrt(), epsilon = 1e-15);

        let s2 = lowering_operator(&basis, Branch::Two);
        let from = basis.index_of(1, 0, 1).unwrap();
        let to = basis.index_of(1, 1, 0).unwrap();
        assert_abs_diff_eq!(s2.get(to, from).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn lowering_operator_has_one_entry_per_excited_state() {
        let basis = build_basis(5).unwrap();
        let s1 = lowering_operator(&basis, Branch::One);
        let excited = basis.states().iter().filter(|s| s.ne > 0).count();
        assert_eq!(s1.nnz(), excited);
    }

    #[test]
    fn quadrature_is_hermitian() {
        let basis = build_basis(4).unwrap();
        for branch in [Branch::One, Branch::Two] {
            let q = quadrature(&lowering_operator(&basis, branch));
            assert!(q.hermiticity_defect() < 1e-15);
        }
        // Quadrature of a real diagonal operator doubles it.
        let (n1, _, _) = number_operators(&basis);
        let q = quadrature(&n1);
        assert_eq!(q, n1.scale(Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn quadrature_n1_single_atom_connects_ground_and_excited() {
        let basis = build_basis(1).unwrap();
        let q = quadrature(&lowering_operator(&basis, Branch::One));
        let g = basis.index_of(1, 0, 0).unwrap();
        let e = basis.index_of(0, 0, 1).unwrap();
        assert_abs_diff_eq!(q.get(g, e).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.get(e, g).re, 1.0, epsilon = 1e-15);
        assert_eq!(q.nnz(), 2);
    }

    #[test]
    fn total_number_commutes_with_jumps() {
        for n in 1..=6 {
            let basis = build_basis(n).unwrap();
            let (n1, n2, ne) = number_operators(&basis);
            let total = n1.add(&n2).add(&ne);
            for branch in [Branch::One, Branch::Two] {
                let s = lowering_operator(&basis, branch);
                let comm = total
                    .matmul(&s)
                    .add(&s.matmul(&total).scale(-Complex64::ONE));
                assert!(comm.is_zero(), "nonzero commutator at N = {n}");
            }
        }
    }

    #[test]
    fn jump_quadratic_forms_are_positive_semidefinite() {
        for n in 1..=6 {
            let basis = build_basis(n).unwrap();
            for branch in [Branch::One, Branch::Two] {
                let s = lowering_operator(&basis, branch);
                let q = s.dagger().matmul(&s).to_dense();
                let eig = q.symmetric_eigen();
                let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
                assert!(min >= -1e-12, "negative eigenvalue {min} at N = {n}");
            }
        }
    }

    #[test]
    fn product_state_single_atom_amplitudes() {
        let basis = build_basis(1).unwrap();
        let eps = 0.1f64;
        let c3 = (1.0 - 2.0 * eps * eps).sqrt();
        let psi = symmetric_product_state(
            &basis,
            Complex64::new(eps, 0.0),
            Complex64::new(eps, 0.0),
            Complex64::new(c3, 0.0),
        )
        .unwrap();
        let i1 = basis.index_of(1, 0, 0).unwrap();
        let i2 = basis.index_of(0, 1, 0).unwrap();
        let i3 = basis.index_of(0, 0, 1).unwrap();
        assert_abs_diff_eq!(psi.amplitudes[i1].re, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.amplitudes[i2].re, 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(psi.amplitudes[i3].re, 0.98f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn product_state_fully_inverted() {
        let basis = build_basis(2).unwrap();
        let psi =
            symmetric_product_state(&basis, Complex64::ZERO, Complex64::ZERO, Complex64::ONE)
                .unwrap();
        let top = basis.index_of(0, 0, 2).unwrap();
        for (i, a) in psi.amplitudes.iter().enumerate() {
            if i == top {
                assert_abs_diff_eq!(a.re, 1.0, epsilon = 1e-15);
            } else {
                assert_eq!(*a, Complex64::ZERO);
            }
        }
    }

    #[test]
    fn product_state_two_atom_cross_term() {
        let basis = build_basis(2).unwrap();
        let c1 = Complex64::new(0.3, 0.1);
        let c2 = Complex64::new(0.2, -0.4);
        let remainder = 1.0 - c1.norm_sqr() - c2.norm_sqr();
        let c3 = Complex64::new(remainder.sqrt(), 0.0);
        let psi = symmetric_product_state(&basis, c1, c2, c3).unwrap();
        let i = basis.index_of(1, 0, 1).unwrap();
        let expected = 2f64.sqrt() * c1 * c3;
        assert!((psi.amplitudes[i] - expected).norm() < 1e-12);
    }

    #[test]
    fn product_state_rejects_unnormalized_input() {
        let basis = build_basis(2).unwrap();
        let bad = symmetric_product_state(
            &basis,
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.5, 0.0),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn product_state_is_normalized() {
        let basis = build_basis(40).unwrap();
        let psi = symmetric_product_state(
            &basis,
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, 0.1),
            Complex64::new(0.98f64.sqrt(), 0.0),
        )
        .unwrap();
        assert_abs_diff_eq!(psi.norm(), 1.0, epsilon = 1e-12);
    }
}
