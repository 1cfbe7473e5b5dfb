//! States on CAR algebras and their basic operations.
//!
//! Densities are stored with respect to the plain matrix trace (the trace
//! that takes the value one on minimal projections), so the tracial state on
//! an `n`-mode algebra has density `1/2^n`. Restrictions are computed through
//! the orthonormal monomial expansion, which is correct for arbitrary mode
//! subsets; when the subset is the leading tensor block it agrees with the
//! partial trace (cross-checked in the test suite).

use std::sync::Arc;

use crate::algebra::AlgebraRef;
use crate::basis::{Partition, SubalgebraBasis};
use crate::error::{Error, Result};
use crate::linalg::{
    self, cr, entropy_of_density, hermitian_eigen, max_abs_diff, ptrace_second, trace_product,
    CMat, CVec, C64,
};
use crate::tol;

/// A state represented by its matrix-trace density.
#[derive(Debug, Clone)]
pub struct QuantumState {
    density: CMat,
    algebra: AlgebraRef,
    even: bool,
    pure: bool,
}

impl QuantumState {
    /// Wraps a density matrix, validating positivity and normalization and
    /// caching evenness and purity.
    pub fn from_density(algebra: &AlgebraRef, density: CMat) -> Result<QuantumState> {
        let dim = algebra.dim();
        if density.nrows() != dim || density.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                rows: density.nrows(),
                cols: density.ncols(),
            });
        }
        if max_abs_diff(&density, &density.adjoint()) > 1e-9 {
            return Err(Error::NotAState("density is not hermitian".into()));
        }
        let tr = density.trace();
        if (tr - cr(1.0)).norm() > tol::STATE_TRACE {
            return Err(Error::NotAState(format!("trace is {tr} instead of 1")));
        }
        let eigs = linalg::hermitian_eigenvalues(&density);
        if eigs[0] < tol::PSD_EIG {
            return Err(Error::NotAState(format!(
                "minimum eigenvalue {} below PSD tolerance",
                eigs[0]
            )));
        }
        let theta_rho = algebra.theta(&density);
        let even = max_abs_diff(&theta_rho, &density) <= tol::STATE_EVEN;
        let purity = trace_product(&density, &density).re;
        let pure = (purity - 1.0).abs() <= tol::PURITY;
        Ok(QuantumState {
            density,
            algebra: Arc::clone(algebra),
            even,
            pure,
        })
    }

    /// Pure state with the given amplitude vector (occupation basis).
    pub fn from_vector(algebra: &AlgebraRef, amplitudes: CVec) -> Result<QuantumState> {
        if amplitudes.len() != algebra.dim() {
            return Err(Error::DimensionMismatch {
                expected: algebra.dim(),
                rows: amplitudes.len(),
                cols: 1,
            });
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tol::STATE_TRACE {
            return Err(Error::NotNormalized(norm));
        }
        let density = &amplitudes * amplitudes.adjoint();
        QuantumState::from_density(algebra, density)
    }

    pub fn from_amplitudes(algebra: &AlgebraRef, amplitudes: &[C64]) -> Result<QuantumState> {
        QuantumState::from_vector(algebra, CVec::from_column_slice(amplitudes))
    }

    /// The tracial state, density `1/dim`.
    pub fn tracial(algebra: &AlgebraRef) -> QuantumState {
        let dim = algebra.dim();
        QuantumState {
            density: CMat::identity(dim, dim).scale(1.0 / dim as f64),
            algebra: Arc::clone(algebra),
            even: true,
            pure: dim == 1,
        }
    }

    pub fn density(&self) -> &CMat {
        &self.density
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn is_pure(&self) -> bool {
        self.pure
    }

    /// Expectation value of an operator in the ambient representation.
    pub fn expect(&self, a: &CMat) -> C64 {
        trace_product(&self.density, a)
    }

    /// Von Neumann entropy in nats.
    pub fn entropy(&self) -> f64 {
        entropy_of_density(&self.density, tol::PSD_EIG)
    }

    /// Restriction to the subalgebra on the given modes, as a state in the
    /// standalone `2^|I|` representation.
    pub fn restrict(&self, labels: &[u32]) -> Result<QuantumState> {
        if labels == self.algebra.labels() {
            return Ok(self.clone());
        }
        let basis = SubalgebraBasis::build(&self.algebra, labels)?;
        self.restrict_with(&basis)
    }

    /// Restriction using a prebuilt basis (avoids rebuilding it in loops).
    pub fn restrict_with(&self, basis: &SubalgebraBasis) -> Result<QuantumState> {
        let reduced = basis.reduce_density(&self.density);
        QuantumState::from_density(basis.small_algebra(), reduced)
    }

    /// The grading-averaged state `(omega + omega ∘ theta)/2`; always even,
    /// idempotent, fixes even states.
    pub fn theta_average(&self) -> QuantumState {
        if self.even {
            return self.clone();
        }
        let avg = (&self.density + self.algebra.theta(&self.density)).scale(0.5);
        QuantumState {
            density: avg,
            algebra: Arc::clone(&self.algebra),
            even: true,
            pure: false,
        }
        .revalidate_flags()
    }

    fn revalidate_flags(mut self) -> QuantumState {
        let theta_rho = self.algebra.theta(&self.density);
        self.even = max_abs_diff(&theta_rho, &self.density) <= tol::STATE_EVEN;
        let purity = trace_product(&self.density, &self.density).re;
        self.pure = (purity - 1.0).abs() <= tol::PURITY;
        self
    }

    /// State transformed by the gauge automorphism at the given angle.
    pub fn gauge_transformed(&self, angle: f64) -> QuantumState {
        let density = self.algebra.gauge(&self.density, angle);
        QuantumState {
            density,
            algebra: Arc::clone(&self.algebra),
            even: self.even,
            pure: self.pure,
        }
        .revalidate_flags()
    }

    /// Splits an even state into its particle-number-parity blocks, the
    /// eigenspaces of the parity unitary of the full mode set.
    pub fn parity_blocks(&self) -> Result<ParityBlocks> {
        if !self.even {
            let theta_rho = self.algebra.theta(&self.density);
            return Err(Error::NotEven(max_abs_diff(&theta_rho, &self.density)));
        }
        let dim = self.algebra.dim();
        let mut blocks = [CMat::zeros(dim, dim), CMat::zeros(dim, dim)];
        for i in 0..dim {
            for j in 0..dim {
                let pi = (i as u32).count_ones() % 2;
                let pj = (j as u32).count_ones() % 2;
                if pi == pj {
                    blocks[pi as usize][(i, j)] = self.density[(i, j)];
                }
            }
        }
        let weights = [blocks[0].trace().re, blocks[1].trace().re];
        let mut out = ParityBlocks {
            even_weight: weights[0].max(0.0),
            even_block: None,
            odd_weight: weights[1].max(0.0),
            odd_block: None,
        };
        for (s, w) in weights.iter().enumerate() {
            if *w > 1e-12 {
                let state =
                    QuantumState::from_density(&self.algebra, blocks[s].clone().scale(1.0 / w))?;
                if s == 0 {
                    out.even_block = Some(state);
                } else {
                    out.odd_block = Some(state);
                }
            }
        }
        Ok(out)
    }

    /// Decomposition of an even state into pure even components: parity
    /// blocks refined by their eigendecompositions.
    pub fn even_pure_decomposition(&self) -> Result<Decomposition> {
        let blocks = self.parity_blocks()?;
        let mut weights = Vec::new();
        let mut components = Vec::new();
        for (w, block) in [
            (blocks.even_weight, blocks.even_block),
            (blocks.odd_weight, blocks.odd_block),
        ] {
            let Some(block) = block else { continue };
            let (vals, vecs) = hermitian_eigen(block.density());
            for (k, &mu) in vals.iter().enumerate() {
                if mu > 1e-12 {
                    let v = vecs.column(k).into_owned();
                    let density = &v * v.adjoint();
                    weights.push(w * mu);
                    components.push(QuantumState::from_density(&self.algebra, density)?);
                }
            }
        }
        Decomposition::new(weights, components)
    }
}

/// Weights and normalized blocks of an even state on the two
/// particle-number-parity sectors.
#[derive(Debug, Clone)]
pub struct ParityBlocks {
    pub even_weight: f64,
    pub even_block: Option<QuantumState>,
    pub odd_weight: f64,
    pub odd_block: Option<QuantumState>,
}

impl ParityBlocks {
    pub fn reassemble(&self, dim: usize) -> CMat {
        let mut out = CMat::zeros(dim, dim);
        if let Some(b) = &self.even_block {
            out += b.density().clone().scale(self.even_weight);
        }
        if let Some(b) = &self.odd_block {
            out += b.density().clone().scale(self.odd_weight);
        }
        out
    }
}

/// A convex decomposition of a state into component states.
#[derive(Debug, Clone)]
pub struct Decomposition {
    weights: Vec<f64>,
    components: Vec<QuantumState>,
    all_even: bool,
    all_pure: bool,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, components: Vec<QuantumState>) -> Result<Decomposition> {
        if weights.len() != components.len() {
            return Err(Error::MalformedDecomposition(format!(
                "{} weights for {} components",
                weights.len(),
                components.len()
            )));
        }
        if weights.is_empty() {
            return Err(Error::MalformedDecomposition("empty decomposition".into()));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::MalformedDecomposition(
                "weights must be positive".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::MalformedDecomposition(format!(
                "weights sum to {sum}"
            )));
        }
        let all_even = components.iter().all(|s| s.is_even());
        let all_pure = components.iter().all(|s| s.is_pure());
        Ok(Decomposition {
            weights,
            components,
            all_even,
            all_pure,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn components(&self) -> &[QuantumState] {
        &self.components
    }

    pub fn all_even(&self) -> bool {
        self.all_even
    }

    pub fn all_pure(&self) -> bool {
        self.all_pure
    }

    pub fn reassemble(&self) -> CMat {
        let dim = self.components[0].density().nrows();
        let mut out = CMat::zeros(dim, dim);
        for (w, s) in self.weights.iter().zip(&self.components) {
            out += s.density().clone().scale(*w);
        }
        out
    }

    pub fn reassembly_error(&self, target: &QuantumState) -> f64 {
        max_abs_diff(&self.reassemble(), target.density())
    }
}

/// The product state extension of a state on the modes I and a state on the
/// modes J of a partition: the unique joint state whose expectations
/// factorize over products of elements of the two subalgebras. Exists
/// exactly when at least one marginal is even.
pub fn product_extension(
    partition: &Partition,
    omega_i: &QuantumState,
    omega_j: &QuantumState,
) -> Result<QuantumState> {
    if omega_i.algebra().labels() != partition.i_labels() {
        return Err(Error::AlgebraMismatch {
            expected: partition.i_labels().to_vec(),
            got: omega_i.algebra().labels().to_vec(),
        });
    }
    if omega_j.algebra().labels() != partition.j_labels() {
        return Err(Error::AlgebraMismatch {
            expected: partition.j_labels().to_vec(),
            got: omega_j.algebra().labels().to_vec(),
        });
    }
    if !omega_i.is_even() && !omega_j.is_even() {
        return Err(Error::NoProductExtension);
    }
    // Tracial-state densities multiply: with at least one even factor the
    // two lifts commute and their product is the joint tracial density.
    let d_i = partition
        .basis_i()
        .lift(&omega_i.density().clone().scale(partition.dim_i() as f64));
    let d_j = partition
        .basis_j()
        .lift(&omega_j.density().clone().scale(partition.dim_j() as f64));
    let joint_tau = if omega_j.is_even() { &d_i * &d_j } else { &d_j * &d_i };
    let dim = partition.ambient().dim() as f64;
    QuantumState::from_density(partition.ambient(), joint_tau.scale(1.0 / dim))
}

/// Entropies of the four marginals of a state of a partitioned system: on
/// the subalgebras of I and J and on their commutants.
#[derive(Debug, Clone, Copy)]
pub struct MarginalEntropies {
    pub on_i: f64,
    pub on_j: f64,
    pub on_commutant_i: f64,
    pub on_commutant_j: f64,
}

pub fn marginal_entropies(state: &QuantumState, partition: &Partition) -> Result<MarginalEntropies> {
    if state.algebra().labels() != partition.ambient().labels() {
        return Err(Error::AlgebraMismatch {
            expected: partition.ambient().labels().to_vec(),
            got: state.algebra().labels().to_vec(),
        });
    }
    let on_i = state.restrict_with(partition.basis_i())?.entropy();
    let on_j = state.restrict_with(partition.basis_j())?.entropy();
    // The commutant of A_I is exactly the trailing tensor factor.
    let rho_ci = linalg::ptrace_first(state.density(), partition.dim_i(), partition.dim_j());
    let on_commutant_i = entropy_of_density(&rho_ci, tol::PSD_EIG);
    // The commutant of A_J is carried to the standalone representation of
    // the subalgebra on I through the embedding basis.
    let rho_cj = reduce_on_commutant_j(state, partition);
    let on_commutant_j = entropy_of_density(&rho_cj, tol::PSD_EIG);
    Ok(MarginalEntropies {
        on_i,
        on_j,
        on_commutant_i,
        on_commutant_j,
    })
}

/// Reduced density of a state on the commutant of the subalgebra on J,
/// expressed in the standalone representation of the subalgebra on I.
pub fn reduce_on_commutant_j(state: &QuantumState, partition: &Partition) -> CMat {
    let basis = partition.basis_i();
    let embedded = partition.commutant_j_basis();
    let dim_small = basis.small_algebra().dim();
    let mut d = CMat::zeros(dim_small, dim_small);
    for (e_embedded, idx) in embedded.iter().zip(0..basis.len()) {
        let expect = trace_product(state.density(), e_embedded);
        d += basis.on_small(idx).adjoint() * expect;
    }
    d.scale(1.0 / dim_small as f64)
}

/// Reduced density on the commutant of the subalgebra on I (the trailing
/// tensor factor).
pub fn reduce_on_commutant_i(state: &QuantumState, partition: &Partition) -> CMat {
    linalg::ptrace_first(state.density(), partition.dim_i(), partition.dim_j())
}

/// Reduced density on the leading tensor factor; for states of a partition
/// ambient this equals the restriction to the subalgebra on I.
pub fn reduce_on_leading_factor(state: &QuantumState, partition: &Partition) -> CMat {
    ptrace_second(state.density(), partition.dim_i(), partition.dim_j())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FermionAlgebra;
    use crate::basis::GradeFilter;
    use crate::linalg::c;
    use crate::random;

    const LN2: f64 = std::f64::consts::LN_2;

    fn alg(n: u32) -> AlgebraRef {
        FermionAlgebra::new(&(1..=n).collect::<Vec<_>>()).unwrap()
    }

    fn psi_plus(a: &AlgebraRef) -> QuantumState {
        let s = 1.0 / 2f64.sqrt();
        QuantumState::from_amplitudes(a, &[cr(0.0), cr(s), cr(s), cr(0.0)]).unwrap()
    }

    fn plus_plus(a: &AlgebraRef) -> QuantumState {
        QuantumState::from_amplitudes(a, &[cr(0.5), cr(0.5), cr(0.5), cr(0.5)]).unwrap()
    }

    #[test]
    fn tracial_expectations() {
        let a = alg(2);
        let tau = QuantumState::tracial(&a);
        let n1 = a.creation(1).unwrap() * a.annihilation(1).unwrap();
        assert!((tau.expect(&n1) - cr(0.5)).norm() <= tol::EXPECTATION);
        assert!(tau.expect(a.annihilation(1).unwrap()).norm() <= tol::EXPECTATION);
        assert!(tau.is_even());

        // Product property over the two subsystems on random elements.
        let part = Partition::new(&[1], &[2]).unwrap();
        let mut rng = random::rng_from_seed(7);
        for _ in 0..20 {
            let x = random::subalgebra_element(part.basis_i(), &mut rng, GradeFilter::All);
            let y = random::subalgebra_element(part.basis_j(), &mut rng, GradeFilter::All);
            let lhs = tau.expect(&(&x * &y));
            let rhs = tau.expect(&x) * tau.expect(&y);
            assert!((lhs - rhs).norm() <= 1e-10);
        }
    }

    #[test]
    fn vector_state_parity_flags() {
        let a = alg(2);
        let mut vac = vec![cr(0.0); 4];
        vac[0] = cr(1.0);
        let vacuum = QuantumState::from_amplitudes(&a, &vac).unwrap();
        assert!(vacuum.is_even() && vacuum.is_pure());

        let bell = psi_plus(&a);
        assert!(bell.is_even() && bell.is_pure());

        let pp = plus_plus(&a);
        assert!(!pp.is_even() && pp.is_pure());

        assert!(matches!(
            QuantumState::from_amplitudes(&a, &[cr(1.0), cr(1.0), cr(0.0), cr(0.0)]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn entropy_values() {
        let a1 = alg(1);
        let tau = QuantumState::tracial(&a1);
        assert!((tau.entropy() - LN2).abs() <= 1e-12);

        let a2 = alg(2);
        assert!(psi_plus(&a2).entropy() <= 1e-12);

        let diag = CMat::from_diagonal(&CVec::from_column_slice(&[cr(0.75), cr(0.25)]));
        let s = QuantumState::from_density(&a1, diag).unwrap();
        assert!((s.entropy() - 0.5623351446188083).abs() <= 1e-12);
    }

    #[test]
    fn restriction_examples() {
        let a = alg(2);
        // Restriction of the tracial state is tracial.
        let tau = QuantumState::tracial(&a);
        let r = tau.restrict(&[1]).unwrap();
        assert!(max_abs_diff(r.density(), &CMat::identity(2, 2).scale(0.5)) <= 1e-12);

        // The hopping pair state has tracial one-mode restrictions.
        let bell = psi_plus(&a);
        let r = bell.restrict(&[1]).unwrap();
        assert!((r.entropy() - LN2).abs() <= 1e-10);

        // The asymmetric-marginal state: pure on mode 1, tracial on mode 2.
        let pp = plus_plus(&a);
        let r1 = pp.restrict(&[1]).unwrap();
        let r2 = pp.restrict(&[2]).unwrap();
        assert!(r1.entropy() <= 1e-10);
        assert!(r1.is_pure());
        assert!((r2.entropy() - LN2).abs() <= 1e-10);

        assert!(matches!(
            tau.restrict(&[5]),
            Err(Error::UnknownLabel(5))
        ));
    }

    #[test]
    fn restriction_defining_property_and_ptrace_agreement() {
        let a = alg(3);
        let mut rng = random::rng_from_seed(11);
        for trial in 0..10 {
            let rho = random::density(&mut rng, a.dim(), a.dim());
            let st = QuantumState::from_density(&a, rho).unwrap();
            for labels in [vec![1u32], vec![2], vec![3], vec![1, 2], vec![2, 3], vec![1, 3]] {
                let basis = SubalgebraBasis::build(&a, &labels).unwrap();
                let r = st.restrict_with(&basis).unwrap();
                // Expectation of every basis element agrees.
                let small_dim = basis.small_algebra().dim() as f64;
                for idx in 0..basis.len() {
                    let want = st.expect(basis.on_big(idx));
                    let got = trace_product(r.density(), basis.on_small(idx));
                    assert!(
                        (want - got).norm() <= tol::EXPECTATION,
                        "trial {trial} labels {labels:?} idx {idx}"
                    );
                }
                let _ = small_dim;
            }
            // Leading block agrees with the partial trace.
            let r = st.restrict(&[1]).unwrap();
            let pt = ptrace_second(st.density(), 2, 4);
            assert!(max_abs_diff(r.density(), &pt) <= 1e-10);
        }
    }

    #[test]
    fn product_extension_examples() {
        let part = Partition::new(&[1], &[2]).unwrap();
        let a1 = part.basis_i().small_algebra().clone();
        let a2 = part.basis_j().small_algebra().clone();

        // tau o tau = tau.
        let joint =
            product_extension(&part, &QuantumState::tracial(&a1), &QuantumState::tracial(&a2))
                .unwrap();
        let dim = part.ambient().dim();
        assert!(
            max_abs_diff(joint.density(), &CMat::identity(dim, dim).scale(1.0 / dim as f64))
                <= 1e-12
        );

        // Two noneven pure factors have no product extension.
        let s = 1.0 / 2f64.sqrt();
        let plus1 = QuantumState::from_amplitudes(&a1, &[cr(s), cr(s)]).unwrap();
        let plus2 = QuantumState::from_amplitudes(&a2, &[cr(s), cr(s)]).unwrap();
        assert!(matches!(
            product_extension(&part, &plus1, &plus2),
            Err(Error::NoProductExtension)
        ));

        // With one even factor the extension exists, restricts correctly,
        // and satisfies the product property in both orders.
        let mut rng = random::rng_from_seed(3);
        for trial in 0..20 {
            let even_first: bool = trial % 2 == 0;
            let (w1, w2) = if even_first {
                (
                    QuantumState::from_density(&a1, random::even_density(&a1, &mut rng)).unwrap(),
                    QuantumState::from_density(&a2, random::density(&mut rng, 2, 2)).unwrap(),
                )
            } else {
                (
                    QuantumState::from_density(&a1, random::density(&mut rng, 2, 2)).unwrap(),
                    QuantumState::from_density(&a2, random::even_density(&a2, &mut rng)).unwrap(),
                )
            };
            let joint = product_extension(&part, &w1, &w2).unwrap();
            let r1 = joint.restrict(&[1]).unwrap();
            let r2 = joint.restrict(&[2]).unwrap();
            assert!(max_abs_diff(r1.density(), w1.density()) <= 1e-10);
            assert!(max_abs_diff(r2.density(), w2.density()) <= 1e-10);
            for _ in 0..10 {
                let x = random::subalgebra_element(part.basis_i(), &mut rng, GradeFilter::All);
                let y = random::subalgebra_element(part.basis_j(), &mut rng, GradeFilter::All);
                let lhs = joint.expect(&(&x * &y));
                let rhs = w1.expect(&part.basis_i().to_small(&x))
                    * w2.expect(&part.basis_j().to_small(&y));
                assert!((lhs - rhs).norm() <= 1e-9, "product property, trial {trial}");
                // Converse order.
                let lhs = joint.expect(&(&y * &x));
                assert!((lhs - rhs).norm() <= 1e-9, "converse order, trial {trial}");
            }
        }
    }

    #[test]
    fn theta_average_examples() {
        let a = alg(2);
        let tau = QuantumState::tracial(&a);
        assert!(max_abs_diff(tau.theta_average().density(), tau.density()) <= 1e-12);

        // |+>|0> averages to the classical mixture of |00> and |10>.
        let s = 1.0 / 2f64.sqrt();
        let st = QuantumState::from_amplitudes(&a, &[cr(s), cr(0.0), cr(s), cr(0.0)]).unwrap();
        let avg = st.theta_average();
        let mut want = CMat::zeros(4, 4);
        want[(0, 0)] = cr(0.5);
        want[(2, 2)] = cr(0.5);
        assert!(max_abs_diff(avg.density(), &want) <= 1e-12);
        assert!(avg.is_even());
        // Idempotent.
        assert!(max_abs_diff(avg.theta_average().density(), avg.density()) <= 1e-12);
    }

    #[test]
    fn theta_average_commutes_with_restriction() {
        let a = alg(3);
        let mut rng = random::rng_from_seed(19);
        for _ in 0..10 {
            let st =
                QuantumState::from_density(&a, random::density(&mut rng, a.dim(), a.dim()))
                    .unwrap();
            for labels in [vec![1u32], vec![2, 3], vec![1, 3]] {
                let lhs = st.theta_average().restrict(&labels).unwrap();
                let rhs = st.restrict(&labels).unwrap().theta_average();
                assert!(max_abs_diff(lhs.density(), rhs.density()) <= 1e-10);
            }
        }
    }

    #[test]
    fn parity_block_examples() {
        let a1 = alg(1);
        let tau = QuantumState::tracial(&a1);
        let blocks = tau.parity_blocks().unwrap();
        assert!((blocks.even_weight - 0.5).abs() <= 1e-12);
        assert!((blocks.odd_weight - 0.5).abs() <= 1e-12);
        assert!(blocks.even_block.as_ref().unwrap().is_pure());
        assert!(blocks.odd_block.as_ref().unwrap().is_pure());

        let a2 = alg(2);
        let bell = psi_plus(&a2);
        let blocks = bell.parity_blocks().unwrap();
        assert!(blocks.even_weight <= 1e-12);
        assert!((blocks.odd_weight - 1.0).abs() <= 1e-12);

        // Reassembly.
        let mut rng = random::rng_from_seed(23);
        let st = QuantumState::from_density(&a2, random::even_density(&a2, &mut rng)).unwrap();
        let blocks = st.parity_blocks().unwrap();
        assert!(max_abs_diff(&blocks.reassemble(4), st.density()) <= 1e-12);

        // Noneven input is rejected.
        let pp = plus_plus(&a2);
        assert!(matches!(pp.parity_blocks(), Err(Error::NotEven(_))));
    }

    #[test]
    fn even_pure_decomposition_reassembles() {
        let a = alg(2);
        let mut rng = random::rng_from_seed(29);
        for _ in 0..5 {
            let st = QuantumState::from_density(&a, random::even_density(&a, &mut rng)).unwrap();
            let dec = st.even_pure_decomposition().unwrap();
            assert!(dec.all_even());
            assert!(dec.all_pure());
            assert!(dec.reassembly_error(&st) <= 1e-10);
        }
    }

    #[test]
    fn entropy_symmetry_for_even_pure_states() {
        for (i_labels, j_labels) in [(vec![1u32], vec![2u32]), (vec![1u32, 2], vec![3u32, 4])] {
            let part = Partition::new(&i_labels, &j_labels).unwrap();
            let a = part.ambient().clone();
            let mut rng = random::rng_from_seed(31);
            for _ in 0..10 {
                let v = random::even_pure_vector(&a, &mut rng);
                let st = QuantumState::from_vector(&a, v).unwrap();
                assert!(st.is_even());
                let m = marginal_entropies(&st, &part).unwrap();
                for pair in [
                    (m.on_i, m.on_j),
                    (m.on_i, m.on_commutant_i),
                    (m.on_i, m.on_commutant_j),
                ] {
                    assert!(
                        (pair.0 - pair.1).abs() <= 1e-8,
                        "marginals {m:?} differ"
                    );
                }
            }
        }
    }

    #[test]
    fn restriction_is_state_on_random_inputs() {
        let a = alg(3);
        let mut rng = random::rng_from_seed(37);
        for _ in 0..10 {
            let st =
                QuantumState::from_density(&a, random::density(&mut rng, a.dim(), 3)).unwrap();
            for labels in [vec![1u32], vec![2], vec![1, 2], vec![1, 2, 3]] {
                let r = st.restrict(&labels).unwrap();
                let _ = r.entropy();
            }
        }
        let _ = c(0.0, 0.0);
    }
}
