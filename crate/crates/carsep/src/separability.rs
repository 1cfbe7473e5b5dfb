//! Separability criteria and certificates for the two pairings of a
//! partitioned fermion system: the CAR pair of subalgebras on I and J, and
//! the tensor pair of the subalgebra on I with its commutant.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::basis::{GradeFilter, Partition};
use crate::entanglement::{eof_averaged, eof_superselected, RoofOptions, RoofResult};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, max_abs_diff, partial_transpose_second, CMat, CVec,
    C64,
};
use crate::random;
use crate::state::{product_extension, Decomposition, QuantumState};
use crate::tol;

/// Which pair of subsystems a verdict refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pairing {
    /// The fermionic pair: subalgebras on the disjoint mode sets I and J.
    Car,
    /// The tensor pair: the subalgebra on I and its commutant.
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Separable,
    Nonseparable,
    Inconclusive,
}

/// Result of scanning the odd-odd cross correlations of a state.
///
/// Every separable state for the CAR pair kills all products of an odd
/// element on I with an odd element on J, so any violation above threshold
/// certifies nonseparability. The converse does not hold: a zero scan alone
/// never certifies separability.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    /// Largest singular value of the odd-odd correlation matrix over the
    /// raw normally ordered monomials.
    pub max_violation: f64,
    /// Odd element of the subalgebra on I achieving the violation.
    pub left: CMat,
    /// Odd element of the subalgebra on J achieving the violation.
    pub right: CMat,
    pub left_expr: String,
    pub right_expr: String,
    pub threshold: f64,
    pub nonseparable: bool,
}

fn combo_expr(coeffs: &[C64], names: &[String]) -> String {
    let mut parts = Vec::new();
    for (w, n) in coeffs.iter().zip(names) {
        if w.norm() > 1e-9 {
            parts.push(format!("({:+.6}{:+.6}i)*{}", w.re, w.im, n));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

/// Scans the raw odd monomials of the two subalgebras and returns the
/// largest cross correlation `|omega(A_- B_-)|` together with an achieving
/// pair, using the default threshold.
pub fn hopping_witness(state: &QuantumState, partition: &Partition) -> Result<WitnessReport> {
    hopping_witness_with_threshold(state, partition, tol::WITNESS)
}

pub fn hopping_witness_with_threshold(
    state: &QuantumState,
    partition: &Partition,
    threshold: f64,
) -> Result<WitnessReport> {
    require_ambient(state, partition)?;
    let bi = partition.basis_i();
    let bj = partition.basis_j();
    let odd_i = bi.indices(GradeFilter::Odd);
    let odd_j = bj.indices(GradeFilter::Odd);

    let mut m = CMat::zeros(odd_i.len(), odd_j.len());
    for (a, &ia) in odd_i.iter().enumerate() {
        for (b, &jb) in odd_j.iter().enumerate() {
            m[(a, b)] = state.expect(&(bi.raw_big(ia) * bj.raw_big(jb)));
        }
    }
    let svd = m.clone().svd(true, true);
    let mut best = 0usize;
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > svd.singular_values[best] {
            best = k;
        }
    }
    let sigma = svd.singular_values[best];
    let u = svd.u.as_ref().expect("svd u");
    let vt = svd.v_t.as_ref().expect("svd v_t");

    let dim = partition.ambient().dim();
    let mut left = CMat::zeros(dim, dim);
    let mut right = CMat::zeros(dim, dim);
    let mut left_coeffs = Vec::with_capacity(odd_i.len());
    let mut right_coeffs = Vec::with_capacity(odd_j.len());
    for (a, &ia) in odd_i.iter().enumerate() {
        let w = u[(a, best)].conj();
        left += bi.raw_big(ia) * w;
        left_coeffs.push(w);
    }
    for (b, &jb) in odd_j.iter().enumerate() {
        let w = vt[(best, b)].conj();
        right += bj.raw_big(jb) * w;
        right_coeffs.push(w);
    }
    debug_assert!((state.expect(&(&left * &right)).norm() - sigma).abs() <= 1e-9);

    let names_i: Vec<String> = odd_i
        .iter()
        .map(|&ia| bi.monomial_name(ia).to_string())
        .collect();
    let names_j: Vec<String> = odd_j
        .iter()
        .map(|&jb| bj.monomial_name(jb).to_string())
        .collect();
    Ok(WitnessReport {
        max_violation: sigma,
        left,
        right,
        left_expr: combo_expr(&left_coeffs, &names_i),
        right_expr: combo_expr(&right_coeffs, &names_j),
        threshold,
        nonseparable: sigma > threshold,
    })
}

/// A convex combination of product pairs: each component is a state on the
/// subalgebra of I paired with a state on the subalgebra of J (in their
/// standalone representations). Under the CAR pairing a pair contributes its
/// product state extension; under the tensor pairing the right factor is
/// read on the commutant, contributing the Kronecker product.
#[derive(Debug, Clone)]
pub struct SeparableDecomposition {
    pub weights: Vec<f64>,
    pub pairs: Vec<(QuantumState, QuantumState)>,
}

impl SeparableDecomposition {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Joint density of component `idx` under the given pairing.
    pub fn joint_density(
        &self,
        partition: &Partition,
        pairing: Pairing,
        idx: usize,
    ) -> Result<CMat> {
        let (left, right) = &self.pairs[idx];
        match pairing {
            Pairing::Car => {
                Ok(product_extension(partition, left, right)?.density().clone())
            }
            Pairing::Tensor => Ok(left.density().kronecker(right.density())),
        }
    }

    pub fn reassemble(&self, partition: &Partition, pairing: Pairing) -> Result<CMat> {
        let dim = partition.ambient().dim();
        let mut out = CMat::zeros(dim, dim);
        for idx in 0..self.len() {
            out += self.joint_density(partition, pairing, idx)?.scale(self.weights[idx]);
        }
        Ok(out)
    }
}

/// Outcome of checking a separable decomposition against a target state.
#[derive(Debug, Clone)]
pub struct DecompositionCheck {
    pub accepted: bool,
    pub reassembly_error: f64,
    /// Whether every component factor is even (an even separable state
    /// always admits such a decomposition).
    pub all_factors_even: bool,
    pub failure: Option<String>,
}

/// Checks that a decomposition reassembles the target within the
/// certificate tolerance and that each component is admissible for the
/// pairing; under the CAR pairing a pair of two noneven factors has no
/// product state extension and is rejected.
pub fn verify_separable_decomposition(
    state: &QuantumState,
    partition: &Partition,
    dec: &SeparableDecomposition,
    pairing: Pairing,
) -> Result<DecompositionCheck> {
    require_ambient(state, partition)?;
    if dec.weights.len() != dec.pairs.len() || dec.weights.is_empty() {
        return Err(Error::MalformedDecomposition(
            "weights and component pairs must be nonempty and match".into(),
        ));
    }
    if dec.weights.iter().any(|&w| w <= 0.0) {
        return Err(Error::MalformedDecomposition(
            "weights must be positive".into(),
        ));
    }
    let sum: f64 = dec.weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::MalformedDecomposition(format!(
            "weights sum to {sum}"
        )));
    }

    let all_factors_even = dec
        .pairs
        .iter()
        .all(|(l, r)| l.is_even() && r.is_even());

    let dim = partition.ambient().dim();
    let mut reassembled = CMat::zeros(dim, dim);
    for idx in 0..dec.len() {
        match dec.joint_density(partition, pairing, idx) {
            Ok(j) => reassembled += j.scale(dec.weights[idx]),
            Err(Error::NoProductExtension) => {
                return Ok(DecompositionCheck {
                    accepted: false,
                    reassembly_error: f64::INFINITY,
                    all_factors_even,
                    failure: Some(format!(
                        "component {idx} pairs two noneven states; no product state extension"
                    )),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let err = max_abs_diff(&reassembled, state.density());
    Ok(DecompositionCheck {
        accepted: err <= tol::DECOMP_REASSEMBLE,
        reassembly_error: err,
        all_factors_even,
        failure: (err > tol::DECOMP_REASSEMBLE)
            .then(|| format!("reassembly residual {err:.3e} exceeds tolerance")),
    })
}

/// Separability verdict with its certificate.
#[derive(Debug, Clone)]
pub struct SeparabilityVerdict {
    pub pairing: Pairing,
    pub verdict: Verdict,
    pub certificate: Certificate,
}

#[derive(Debug, Clone)]
pub enum Certificate {
    /// Explicit decomposition certifying separability.
    Decomposition(SeparableDecomposition),
    /// Hopping witness certifying CAR-nonseparability.
    Witness(WitnessReport),
    /// Spectrum of the partial transpose. `decisive` reflects whether
    /// positivity is sufficient at these factor dimensions (2x2, 2x3).
    PptSpectrum { min_eigenvalue: f64, decisive: bool },
    /// Roof upper bound attached to an inconclusive verdict.
    RoofBound { value: f64, converged: bool },
}

/// Positive-partial-transpose test for the tensor pairing. A negative
/// eigenvalue certifies nonseparability in any dimension; positivity is
/// decisive only when the two factor dimensions are 2x2 or 2x3.
pub fn ppt_check(state: &QuantumState, partition: &Partition) -> Result<SeparabilityVerdict> {
    require_ambient(state, partition)?;
    let d1 = partition.dim_i();
    let d2 = partition.dim_j();
    let pt = partial_transpose_second(state.density(), d1, d2);
    let eigs = hermitian_eigenvalues(&pt);
    let min_eigenvalue = eigs[0];
    let decisive = d1 * d2 <= 6;
    let verdict = if min_eigenvalue < tol::PPT_EIG {
        Verdict::Nonseparable
    } else if decisive {
        Verdict::Separable
    } else {
        Verdict::Inconclusive
    };
    Ok(SeparabilityVerdict {
        pairing: Pairing::Tensor,
        verdict,
        certificate: Certificate::PptSpectrum {
            min_eigenvalue,
            decisive,
        },
    })
}

/// Random CAR-separable states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparableKind {
    /// Every component has two even factors; the mixture is even.
    EvenFactors,
    /// Every component has exactly one even factor (the other is generic);
    /// the mixture is typically noneven.
    OneEvenFactor,
}

/// Draws a random separable state for the CAR pair: Dirichlet weights over
/// 3 to 8 product extensions whose even factors are parity-block-diagonal
/// random densities. Returns the state together with its generating
/// decomposition, which is an exact certificate.
pub fn random_car_separable<R: Rng>(
    partition: &Partition,
    rng: &mut R,
    kind: SeparableKind,
) -> (QuantumState, SeparableDecomposition) {
    let alg_i = partition.basis_i().small_algebra().clone();
    let alg_j = partition.basis_j().small_algebra().clone();
    let k = rng.random_range(3..=8);
    let weights = random::dirichlet(rng, k);
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let (left, right) = match kind {
            SeparableKind::EvenFactors => (
                QuantumState::from_density(&alg_i, random::even_density(&alg_i, rng)).unwrap(),
                QuantumState::from_density(&alg_j, random::even_density(&alg_j, rng)).unwrap(),
            ),
            SeparableKind::OneEvenFactor => {
                let even_on_i: bool = rng.random();
                if even_on_i {
                    (
                        QuantumState::from_density(&alg_i, random::even_density(&alg_i, rng))
                            .unwrap(),
                        QuantumState::from_density(
                            &alg_j,
                            random::density(rng, alg_j.dim(), alg_j.dim()),
                        )
                        .unwrap(),
                    )
                } else {
                    (
                        QuantumState::from_density(
                            &alg_i,
                            random::density(rng, alg_i.dim(), alg_i.dim()),
                        )
                        .unwrap(),
                        QuantumState::from_density(&alg_j, random::even_density(&alg_j, rng))
                            .unwrap(),
                    )
                }
            }
        };
        pairs.push((left, right));
    }
    let dec = SeparableDecomposition {
        weights,
        pairs,
    };
    let density = dec
        .reassemble(partition, Pairing::Car)
        .expect("components are valid product extensions");
    let state = QuantumState::from_density(partition.ambient(), density).unwrap();
    (state, dec)
}

/// The equal-weight four-term product decomposition whose tensor-pairing
/// reassembly is the state `rho_one`; under the CAR pairing its components
/// pair two noneven factors and are rejected.
pub fn rho_one_four_term_decomposition(partition: &Partition) -> Result<SeparableDecomposition> {
    let alg_i = partition.basis_i().small_algebra().clone();
    let alg_j = partition.basis_j().small_algebra().clone();
    let mut pairs = Vec::new();
    for v in crate::named::rho_one_factor_vectors() {
        let left = QuantumState::from_vector(&alg_i, v.clone())?;
        let right = QuantumState::from_vector(&alg_j, v)?;
        pairs.push((left, right));
    }
    Ok(SeparableDecomposition {
        weights: vec![0.25; 4],
        pairs,
    })
}

fn require_ambient(state: &QuantumState, partition: &Partition) -> Result<()> {
    if state.algebra().labels() != partition.ambient().labels() {
        return Err(Error::AlgebraMismatch {
            expected: partition.ambient().labels().to_vec(),
            got: state.algebra().labels().to_vec(),
        });
    }
    Ok(())
}

/// Decision pipeline for the CAR pairing:
///
/// 1. the hopping witness; a violation certifies nonseparability;
/// 2. the superselection-respecting roof for even states (the averaged roof
///    otherwise); a numerically zero value triggers an attempt to promote
///    the optimizer's decomposition into an exact product-extension
///    certificate.
///
/// Separable verdicts always carry a decomposition that reassembles the
/// state within the certificate tolerance; a near-zero roof value without
/// such a certificate stays inconclusive.
pub fn car_separability(
    state: &QuantumState,
    partition: &Partition,
    opts: &RoofOptions,
) -> Result<SeparabilityVerdict> {
    require_ambient(state, partition)?;
    let witness = hopping_witness(state, partition)?;
    if witness.nonseparable {
        return Ok(SeparabilityVerdict {
            pairing: Pairing::Car,
            verdict: Verdict::Nonseparable,
            certificate: Certificate::Witness(witness),
        });
    }
    let roof: RoofResult = if state.is_even() {
        eof_superselected(state, partition, opts)?
    } else {
        eof_averaged(state, partition, opts)?
    };
    if roof.value <= tol::ROOF_ZERO {
        if let Some(dec) = certify_from_roof(state, partition, &roof.decomposition)? {
            return Ok(SeparabilityVerdict {
                pairing: Pairing::Car,
                verdict: Verdict::Separable,
                certificate: Certificate::Decomposition(dec),
            });
        }
    }
    Ok(SeparabilityVerdict {
        pairing: Pairing::Car,
        verdict: Verdict::Inconclusive,
        certificate: Certificate::RoofBound {
            value: roof.value,
            converged: roof.converged,
        },
    })
}

/// Tries to promote a near-product roof decomposition into an exact
/// separable certificate: each component is snapped to an exact product
/// extension (top singular pair with the nearer side projected onto a
/// single parity sector), occupation products are added as candidates, and
/// the weights are refit by nonnegative least squares.
pub fn certify_from_roof(
    state: &QuantumState,
    partition: &Partition,
    roof_dec: &Decomposition,
) -> Result<Option<SeparableDecomposition>> {
    let mut pairs: Vec<(QuantumState, QuantumState)> = Vec::new();
    for comp in roof_dec.components() {
        if let Some(pair) = snap_to_product(comp, partition) {
            pairs.push(pair);
        }
    }
    pairs.extend(occupation_product_pairs(partition));

    // Joint densities form the columns of the least-squares problem.
    let mut columns = Vec::with_capacity(pairs.len());
    for (l, r) in &pairs {
        match product_extension(partition, l, r) {
            Ok(joint) => columns.push(realify(joint.density())),
            Err(Error::NoProductExtension) => columns.push(DVector::zeros(0)),
            Err(e) => return Err(e),
        }
    }
    let valid: Vec<usize> = (0..pairs.len()).filter(|&i| columns[i].len() > 0).collect();
    if valid.is_empty() {
        return Ok(None);
    }
    let rows = columns[valid[0]].len();
    let mut a = DMatrix::zeros(rows, valid.len());
    for (col, &i) in valid.iter().enumerate() {
        a.set_column(col, &columns[i]);
    }
    let b = realify(state.density());
    let w = nnls(&a, &b);

    let mut weights = Vec::new();
    let mut kept = Vec::new();
    for (col, &i) in valid.iter().enumerate() {
        if w[col] > 1e-12 {
            weights.push(w[col]);
            kept.push(pairs[i].clone());
        }
    }
    if weights.is_empty() {
        return Ok(None);
    }
    let total: f64 = weights.iter().sum();
    for x in &mut weights {
        *x /= total;
    }
    let dec = SeparableDecomposition {
        weights,
        pairs: kept,
    };
    let check = verify_separable_decomposition(state, partition, &dec, Pairing::Car)?;
    Ok(check.accepted.then_some(dec))
}

/// Snaps a (near-)pure (near-)product component to an exact product pair:
/// top singular vectors of the reshaped state vector, with whichever side
/// is closer to a single parity sector projected exactly onto it.
fn snap_to_product(
    comp: &QuantumState,
    partition: &Partition,
) -> Option<(QuantumState, QuantumState)> {
    let d1 = partition.dim_i();
    let d2 = partition.dim_j();
    let (vals, vecs) = hermitian_eigen(comp.density());
    let top = vals.len() - 1;
    if vals[top] < 0.9 {
        return None; // not close to pure
    }
    let phi = vecs.column(top).into_owned();
    let phi_mat = CMat::from_fn(d1, d2, |r, s| phi[r * d2 + s]);
    let svd = phi_mat.svd(true, true);
    let mut best = 0usize;
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s > svd.singular_values[best] {
            best = k;
        }
    }
    let u = svd.u.as_ref()?;
    let vt = svd.v_t.as_ref()?;
    let e: CVec = u.column(best).into_owned();
    let f: CVec = CVec::from_fn(d2, |s, _| vt[(best, s)].conj());

    // Project the side nearer to a definite particle-number parity.
    let (e2, pe) = sector_project(&e);
    let (f2, pf) = sector_project(&f);
    let (e_fixed, f_fixed) = if pe >= pf { (e2?, f) } else { (e, f2?) };

    let joint_vec = kron_vec(&e_fixed, &f_fixed);
    let joint = QuantumState::from_vector(partition.ambient(), joint_vec).ok()?;
    let left = joint.restrict_with(partition.basis_i()).ok()?;
    let right = joint.restrict_with(partition.basis_j()).ok()?;
    if !left.is_even() && !right.is_even() {
        return None;
    }
    Some((left, right))
}

/// Zeroes the minority parity sector of a vector and renormalizes. Returns
/// the majority-sector weight alongside (used to pick which side to snap).
fn sector_project(v: &CVec) -> (Option<CVec>, f64) {
    let mut weight = [0.0f64; 2];
    for (i, z) in v.iter().enumerate() {
        weight[(i as u32).count_ones() as usize % 2] += z.norm_sqr();
    }
    let keep = usize::from(weight[1] > weight[0]);
    let majority = weight[keep] / (weight[0] + weight[1]);
    let mut out = v.clone();
    for (i, z) in out.iter_mut().enumerate() {
        if (i as u32).count_ones() as usize % 2 != keep {
            *z = C64::default();
        }
    }
    let n = out.norm();
    if n < 1e-8 {
        return (None, majority);
    }
    out /= crate::linalg::cr(n);
    (Some(out), majority)
}

fn kron_vec(a: &CVec, b: &CVec) -> CVec {
    let mut out = CVec::zeros(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i * b.len() + j] = x * y;
        }
    }
    out
}

/// All occupation-basis product pairs of a partition; each is an exact
/// product extension with two even factors.
pub fn occupation_product_pairs(partition: &Partition) -> Vec<(QuantumState, QuantumState)> {
    let alg_i = partition.basis_i().small_algebra().clone();
    let alg_j = partition.basis_j().small_algebra().clone();
    let mut out = Vec::new();
    for bi in 0..alg_i.dim() {
        for bj in 0..alg_j.dim() {
            let mut vi = CVec::zeros(alg_i.dim());
            vi[bi] = crate::linalg::cr(1.0);
            let mut vj = CVec::zeros(alg_j.dim());
            vj[bj] = crate::linalg::cr(1.0);
            out.push((
                QuantumState::from_vector(&alg_i, vi).unwrap(),
                QuantumState::from_vector(&alg_j, vj).unwrap(),
            ));
        }
    }
    out
}

/// Checks the implication "separable for the CAR pair implies separable
/// (or at least positive under partial transposition) for the tensor
/// pair". Returns whether the implication held; it holds vacuously when
/// the CAR decision is not `Separable`.
pub fn car_implies_tensor_check(
    state: &QuantumState,
    partition: &Partition,
    opts: &RoofOptions,
) -> Result<bool> {
    let car = car_separability(state, partition, opts)?;
    if car.verdict != Verdict::Separable {
        return Ok(true);
    }
    let tensor = ppt_check(state, partition)?;
    Ok(tensor.verdict != Verdict::Nonseparable)
}

/// Nonnegative least squares (Lawson-Hanson active set), used to refit
/// certificate weights.
pub(crate) fn nnls(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let n = a.ncols();
    let mut passive = vec![false; n];
    let mut x = DVector::zeros(n);
    let max_outer = 3 * n + 10;
    for _ in 0..max_outer {
        let residual = b - a * &x;
        let w = a.transpose() * &residual;
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if !passive[j] && w[j] > 1e-12 {
                if best.map_or(true, |(_, bw)| w[j] > bw) {
                    best = Some((j, w[j]));
                }
            }
        }
        let Some((enter, _)) = best else { break };
        passive[enter] = true;

        loop {
            // Solve the unconstrained problem on the passive set.
            let cols: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let ap = a.select_columns(cols.iter());
            let ata = ap.transpose() * &ap;
            let atb = ap.transpose() * b;
            let z_sub = ata
                .cholesky()
                .map(|ch| ch.solve(&atb))
                .unwrap_or_else(|| {
                    ap.svd(true, true)
                        .solve(&atb, 1e-12)
                        .expect("svd solve")
                });
            if z_sub.iter().all(|&v| v > 1e-14) {
                x.fill(0.0);
                for (k, &j) in cols.iter().enumerate() {
                    x[j] = z_sub[k];
                }
                break;
            }
            // Step back to the feasible boundary and drop offending columns.
            let mut alpha = f64::INFINITY;
            for (k, &j) in cols.iter().enumerate() {
                if z_sub[k] <= 1e-14 {
                    let denom = x[j] - z_sub[k];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    }
                }
            }
            if !alpha.is_finite() {
                alpha = 0.0;
            }
            for (k, &j) in cols.iter().enumerate() {
                x[j] += alpha * (z_sub[k] - x[j]);
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if cols.iter().all(|&j| !passive[j]) {
                break;
            }
        }
    }
    x
}

/// Stacks the real and imaginary parts of a Hermitian matrix into a real
/// vector (used for least-squares fits of decompositions).
pub(crate) fn realify(m: &CMat) -> DVector<f64> {
    let n = m.nrows() * m.ncols();
    let mut v = DVector::zeros(2 * n);
    for (k, z) in m.iter().enumerate() {
        v[k] = z.re;
        v[n + k] = z.im;
    }
    v
}
