//! Constructors for the named state families used throughout the guide,
//! the verification suite, and the CLI.

use crate::algebra::{AlgebraRef, Grade};
use crate::basis::{GradeFilter, Partition};
use crate::error::{Error, Result};
use crate::expr::parse_operator;
use crate::linalg::{cr, operator_norm, CMat, CVec};
use crate::state::QuantumState;
use crate::tol;

fn require_two_modes(algebra: &AlgebraRef) -> Result<()> {
    if algebra.n_modes() != 2 {
        return Err(Error::WrongModeCount {
            expected: 2,
            got: algebra.n_modes(),
        });
    }
    Ok(())
}

/// The default two-site split: I = {1}, J = {2}.
pub fn default_partition() -> Partition {
    Partition::new(&[1], &[2]).expect("two-site partition")
}

/// The even hopping pair `(|01> + |10>)/sqrt(2)` on a two-mode algebra.
pub fn psi_plus(algebra: &AlgebraRef) -> Result<QuantumState> {
    require_two_modes(algebra)?;
    let s = cr(1.0 / 2f64.sqrt());
    QuantumState::from_vector(
        algebra,
        CVec::from_column_slice(&[cr(0.0), s, s, cr(0.0)]),
    )
}

/// The even two-mode mixture
/// `1/4 (|00><00| + |11><11|) + 1/2 |psi_+><psi_+|`.
/// Its tensor-pair separable decomposition exists while no fermionic
/// (CAR-pair) separable decomposition does.
pub fn rho_one(algebra: &AlgebraRef) -> Result<QuantumState> {
    require_two_modes(algebra)?;
    let mut rho = CMat::zeros(4, 4);
    rho[(0, 0)] = cr(0.25);
    rho[(3, 3)] = cr(0.25);
    for a in [1usize, 2] {
        for b in [1usize, 2] {
            rho[(a, b)] += cr(0.25);
        }
    }
    QuantumState::from_density(algebra, rho)
}

/// The four single-mode vectors `(|0> +/- |1>)/sqrt(2)`,
/// `(|0> +/- i|1>)/sqrt(2)` whose equal-weight pairing reassembles
/// [`rho_one`] for the tensor pairing.
pub fn rho_one_factor_vectors() -> Vec<CVec> {
    let s = 1.0 / 2f64.sqrt();
    vec![
        CVec::from_column_slice(&[cr(s), cr(s)]),
        CVec::from_column_slice(&[cr(s), cr(-s)]),
        CVec::from_column_slice(&[cr(s), crate::linalg::c(0.0, s)]),
        CVec::from_column_slice(&[cr(s), crate::linalg::c(0.0, -s)]),
    ]
}

/// A pure noneven two-mode state with asymmetric marginals: pure on the
/// first mode, tracial on the second. Realized as `|+> (x) |+>` with
/// `|+> = (|0> + |1>)/sqrt(2)`; the asymmetry of the two restrictions is
/// what the constructor guarantees, the amplitude choice itself is one
/// convenient realization.
pub fn varrho_asym(algebra: &AlgebraRef) -> Result<QuantumState> {
    require_two_modes(algebra)?;
    QuantumState::from_vector(algebra, CVec::from_element(4, cr(0.5)))
}

/// Parameters for [`phi_lambda`].
#[derive(Debug, Clone)]
pub struct PhiLambdaSpec {
    pub lambda: f64,
    /// Odd element of the subalgebra on I with operator norm at most one;
    /// defaults to the annihilation operator of the first I mode.
    pub k1: Option<String>,
    /// Odd element of the subalgebra on J, same constraints; defaults to
    /// the annihilation operator of the first J mode.
    pub k2: Option<String>,
}

impl PhiLambdaSpec {
    pub fn new(lambda: f64) -> PhiLambdaSpec {
        PhiLambdaSpec {
            lambda,
            k1: None,
            k2: None,
        }
    }
}

/// The even hopping-correlated family: the state with tracial-state density
/// `P(lambda) = id + lambda K` where
/// `K = (K1^dag K2 - K1 K2^dag)/2` for odd contractions K1, K2 on the two
/// sides of the partition. For `|lambda| <= 1` and `||K1||, ||K2|| <= 1`
/// the density is positive and the state is even; at `lambda = 0` it is the
/// tracial state.
pub fn phi_lambda(partition: &Partition, spec: &PhiLambdaSpec) -> Result<QuantumState> {
    if spec.lambda.abs() > 1.0 + 1e-12 {
        return Err(Error::ParamBounds(format!(
            "lambda must satisfy |lambda| <= 1, got {}",
            spec.lambda
        )));
    }
    let ambient = partition.ambient();
    let k1_src = spec
        .k1
        .clone()
        .unwrap_or_else(|| format!("a{}", partition.i_labels()[0]));
    let k2_src = spec
        .k2
        .clone()
        .unwrap_or_else(|| format!("a{}", partition.j_labels()[0]));
    let k1 = parse_operator(&k1_src, ambient)?;
    let k2 = parse_operator(&k2_src, ambient)?;

    for (name, k, basis) in [
        ("K1", &k1, partition.basis_i()),
        ("K2", &k2, partition.basis_j()),
    ] {
        basis.require_member(k, tol::EXPECTATION)?;
        if ambient.grade_of(k) != Grade::Odd {
            return Err(Error::ParamBounds(format!("{name} must be an odd element")));
        }
        let norm = operator_norm(k);
        if norm > 1.0 + 1e-9 {
            return Err(Error::ParamBounds(format!(
                "{name} must have operator norm at most 1, got {norm}"
            )));
        }
    }

    let hop = (k1.adjoint() * &k2 - &k1 * k2.adjoint()).scale(0.5);
    let dim = ambient.dim();
    let p = CMat::identity(dim, dim) + hop * cr(spec.lambda);
    let state = QuantumState::from_density(ambient, p.scale(1.0 / dim as f64))?;
    debug_assert!(state.is_even());
    Ok(state)
}

/// Convenience: [`phi_lambda`] with the default contractions on the default
/// two-site partition.
pub fn phi_lambda_default(lambda: f64) -> Result<(Partition, QuantumState)> {
    let part = default_partition();
    let state = phi_lambda(&part, &PhiLambdaSpec::new(lambda))?;
    Ok((part, state))
}

/// Random-element variant used in property tests: odd normalized elements.
pub fn random_odd_contraction<R: rand::Rng>(
    partition: &Partition,
    side_i: bool,
    rng: &mut R,
) -> CMat {
    let basis = if side_i {
        partition.basis_i()
    } else {
        partition.basis_j()
    };
    let raw = crate::random::subalgebra_element(basis, rng, GradeFilter::Odd);
    let norm = operator_norm(&raw);
    raw.scale(1.0 / norm.max(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FermionAlgebra;
    use crate::linalg::{hermitian_eigenvalues, max_abs_diff};
    use crate::random;

    #[test]
    fn rho_one_spectrum_and_hopping_correlation() {
        let alg = FermionAlgebra::new(&[1, 2]).unwrap();
        let rho = rho_one(&alg).unwrap();
        assert!(rho.is_even());
        let eigs = hermitian_eigenvalues(rho.density());
        let want = [0.0, 0.25, 0.25, 0.5];
        for (e, w) in eigs.iter().zip(want) {
            assert!((e - w).abs() <= 1e-12, "eigenvalues {eigs:?}");
        }
        let hop = alg.creation(1).unwrap() * alg.annihilation(2).unwrap();
        assert!((rho.expect(&hop) - cr(0.25)).norm() <= 1e-12);
    }

    #[test]
    fn varrho_marginals() {
        let alg = FermionAlgebra::new(&[1, 2]).unwrap();
        let v = varrho_asym(&alg).unwrap();
        assert!(v.is_pure() && !v.is_even());
        let s1 = v.restrict(&[1]).unwrap().entropy();
        let s2 = v.restrict(&[2]).unwrap().entropy();
        assert!(s1 <= 1e-10);
        assert!((s2 - std::f64::consts::LN_2).abs() <= 1e-10);
    }

    #[test]
    fn phi_lambda_family() {
        let (part, tau_like) = phi_lambda_default(0.0).unwrap();
        let dim = part.ambient().dim();
        assert!(
            max_abs_diff(
                tau_like.density(),
                &CMat::identity(dim, dim).scale(1.0 / dim as f64)
            ) <= 1e-15
        );

        // Hopping correlators at the default contractions.
        for lambda in [-1.0, -0.5, 0.25, 0.5, 1.0] {
            let (part, st) = phi_lambda_default(lambda).unwrap();
            let amb = part.ambient();
            let hop = amb.creation(1).unwrap() * amb.annihilation(2).unwrap();
            let anti = amb.annihilation(1).unwrap() * amb.creation(2).unwrap();
            assert!((st.expect(&hop) - cr(lambda / 8.0)).norm() <= 1e-12);
            assert!((st.expect(&anti) - cr(-lambda / 8.0)).norm() <= 1e-12);
            assert!(st.is_even());
            let eigs = hermitian_eigenvalues(st.density());
            assert!(eigs[0] >= tol::PSD_EIG);
        }

        // Out-of-range and malformed parameters.
        assert!(phi_lambda_default(1.5).is_err());
        let part = default_partition();
        let bad = PhiLambdaSpec {
            lambda: 0.5,
            k1: Some("ad1*a1".into()),
            k2: None,
        };
        assert!(matches!(
            phi_lambda(&part, &bad),
            Err(Error::ParamBounds(_))
        ));
        let misplaced = PhiLambdaSpec {
            lambda: 0.5,
            k1: Some("a2".into()),
            k2: None,
        };
        assert!(phi_lambda(&part, &misplaced).is_err());
        let too_big = PhiLambdaSpec {
            lambda: 0.5,
            k1: Some("2*a1".into()),
            k2: None,
        };
        assert!(matches!(
            phi_lambda(&part, &too_big),
            Err(Error::ParamBounds(_))
        ));
    }

    #[test]
    fn phi_lambda_correlation_formula() {
        // omega(A1 A2) = tau(A1+)tau(A2+)
        //   - lambda/2 (tau(K1^dag A1-)tau(K2 A2-) - tau(K1 A1-)tau(K2^dag A2-)),
        // and the converse order flips the sign of the lambda term.
        let part = default_partition();
        let amb = part.ambient().clone();
        let dim = amb.dim() as f64;
        let tau = |m: &CMat| m.trace() / cr(dim);
        let mut rng = random::rng_from_seed(101);
        for &lambda in &[-1.0, -0.5, 0.25, 0.5, 1.0] {
            let st = phi_lambda(&part, &PhiLambdaSpec::new(lambda)).unwrap();
            let k1 = amb.annihilation(1).unwrap().clone();
            let k2 = amb.annihilation(2).unwrap().clone();
            for _ in 0..25 {
                let a1 = random::subalgebra_element(part.basis_i(), &mut rng, GradeFilter::All);
                let a2 = random::subalgebra_element(part.basis_j(), &mut rng, GradeFilter::All);
                let (a1p, a1m) = amb.grade_split(&a1);
                let (a2p, a2m) = amb.grade_split(&a2);
                let base = tau(&a1p) * tau(&a2p);
                let hop_term = tau(&(k1.adjoint() * &a1m)) * tau(&(&k2 * &a2m))
                    - tau(&(&k1 * &a1m)) * tau(&(k2.adjoint() * &a2m));
                let want_fwd = base - hop_term * cr(lambda / 2.0);
                let want_rev = base + hop_term * cr(lambda / 2.0);
                let got_fwd = st.expect(&(&a1 * &a2));
                let got_rev = st.expect(&(&a2 * &a1));
                assert!((got_fwd - want_fwd).norm() <= 1e-10);
                assert!((got_rev - want_rev).norm() <= 1e-10);
            }
        }
    }
}
