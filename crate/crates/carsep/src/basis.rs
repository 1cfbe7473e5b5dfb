//! Monomial bases of subalgebras, orthonormalization, and partitions.
//!
//! Each mode contributes one of `{1, a^dag, a, a^dag a}` to a normally
//! ordered monomial, giving `4^|I|` monomials for the subalgebra on a mode
//! subset `I`. Orthonormalizing them under the tracial inner product
//! `<X, Y> = tau(X^dag Y)` yields the basis used for state restriction,
//! membership tests, and witness scans. The same coefficient matrix is
//! applied in the ambient representation and in the standalone `2^|I|`
//! representation, so the two orthonormal bases correspond under the unique
//! isomorphism that matches generators.

use crate::algebra::{AlgebraRef, FermionAlgebra, OperatorElement};
use crate::error::{Error, Result};
use crate::linalg::{cr, hs_inner, max_abs_diff, trace_product, CMat};
use crate::tol;

/// Selects monomials by the parity of their total degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradeFilter {
    All,
    Even,
    Odd,
}

/// Per-mode factor of a normally ordered monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Factor {
    One,
    Creation,
    Annihilation,
    Number,
}

impl Factor {
    fn from_code(c: usize) -> Factor {
        match c {
            0 => Factor::One,
            1 => Factor::Creation,
            2 => Factor::Annihilation,
            _ => Factor::Number,
        }
    }

    fn degree(self) -> u32 {
        match self {
            Factor::One => 0,
            Factor::Creation | Factor::Annihilation => 1,
            Factor::Number => 2,
        }
    }
}

/// The monomial basis of the subalgebra on a mode subset, kept in both the
/// ambient representation and a standalone small representation.
#[derive(Debug)]
pub struct SubalgebraBasis {
    labels: Vec<u32>,
    positions: Vec<usize>,
    small: AlgebraRef,
    raw_big: Vec<CMat>,
    raw_small: Vec<CMat>,
    on_big: Vec<CMat>,
    on_small: Vec<CMat>,
    odd: Vec<bool>,
    names: Vec<String>,
    big_dim: usize,
}

impl SubalgebraBasis {
    pub fn build(parent: &AlgebraRef, labels: &[u32]) -> Result<SubalgebraBasis> {
        let positions: Vec<usize> = labels
            .iter()
            .map(|&l| parent.position(l))
            .collect::<Result<_>>()?;
        let small = FermionAlgebra::with_mode_cap(labels, tol::MODE_CAP)?;
        let s = labels.len();
        let count = 1usize << (2 * s);

        let mut raw_big = Vec::with_capacity(count);
        let mut raw_small = Vec::with_capacity(count);
        let mut odd = Vec::with_capacity(count);
        let mut names = Vec::with_capacity(count);
        for code in 0..count {
            let mut big = parent.identity();
            let mut sm = small.identity();
            let mut degree = 0u32;
            let mut name_parts: Vec<String> = Vec::new();
            for t in 0..s {
                let f = Factor::from_code((code >> (2 * (s - 1 - t))) & 3);
                degree += f.degree();
                let (bf, sf): (Option<CMat>, Option<CMat>) = match f {
                    Factor::One => (None, None),
                    Factor::Creation => (
                        Some(parent.creation_at(positions[t]).clone()),
                        Some(small.creation_at(t).clone()),
                    ),
                    Factor::Annihilation => (
                        Some(parent.annihilation_at(positions[t]).clone()),
                        Some(small.annihilation_at(t).clone()),
                    ),
                    Factor::Number => (
                        Some(parent.creation_at(positions[t]) * parent.annihilation_at(positions[t])),
                        Some(small.creation_at(t) * small.annihilation_at(t)),
                    ),
                };
                match f {
                    Factor::One => {}
                    Factor::Creation => name_parts.push(format!("ad{}", labels[t])),
                    Factor::Annihilation => name_parts.push(format!("a{}", labels[t])),
                    Factor::Number => name_parts.push(format!("ad{0}*a{0}", labels[t])),
                }
                if let (Some(bf), Some(sf)) = (bf, sf) {
                    big = big * bf;
                    sm = sm * sf;
                }
            }
            raw_big.push(big);
            raw_small.push(sm);
            odd.push(degree % 2 == 1);
            names.push(if name_parts.is_empty() {
                "1".to_string()
            } else {
                name_parts.join("*")
            });
        }

        // Gram matrix under <X, Y> = tau(X^dag Y), computed in the small
        // representation where entries are exact dyadic rationals. Its
        // Cholesky factor yields the orthonormalizing coefficients applied
        // to both representations.
        let small_dim = small.dim() as f64;
        let mut gram = CMat::zeros(count, count);
        for a in 0..count {
            for b in 0..count {
                gram[(a, b)] = hs_inner(&raw_small[a], &raw_small[b]) / cr(small_dim);
            }
        }
        let chol = nalgebra::linalg::Cholesky::new(gram)
            .expect("monomial Gram matrix is positive definite");
        let coeff = chol
            .l()
            .adjoint()
            .solve_upper_triangular(&CMat::identity(count, count))
            .expect("triangular solve");

        let combine = |raws: &[CMat], rows: usize| -> Vec<CMat> {
            (0..count)
                .map(|alpha| {
                    let mut acc = CMat::zeros(rows, rows);
                    for beta in 0..count {
                        let w = coeff[(beta, alpha)];
                        if w.norm() > 0.0 {
                            acc += &raws[beta] * w;
                        }
                    }
                    acc
                })
                .collect()
        };
        let on_big = combine(&raw_big, parent.dim());
        let on_small = combine(&raw_small, small.dim());

        Ok(SubalgebraBasis {
            labels: labels.to_vec(),
            positions,
            small,
            raw_big,
            raw_small,
            on_big,
            on_small,
            odd,
            names,
            big_dim: parent.dim(),
        })
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// The standalone algebra on this subset, with the same mode order.
    pub fn small_algebra(&self) -> &AlgebraRef {
        &self.small
    }

    pub fn len(&self) -> usize {
        self.on_big.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_odd(&self, idx: usize) -> bool {
        self.odd[idx]
    }

    pub fn monomial_name(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    pub fn raw_big(&self, idx: usize) -> &CMat {
        &self.raw_big[idx]
    }

    pub fn raw_small(&self, idx: usize) -> &CMat {
        &self.raw_small[idx]
    }

    pub fn on_big(&self, idx: usize) -> &CMat {
        &self.on_big[idx]
    }

    pub fn on_small(&self, idx: usize) -> &CMat {
        &self.on_small[idx]
    }

    pub fn indices(&self, filter: GradeFilter) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| match filter {
                GradeFilter::All => true,
                GradeFilter::Even => !self.odd[i],
                GradeFilter::Odd => self.odd[i],
            })
            .collect()
    }

    /// The orthonormalized monomials as tagged elements of the ambient
    /// algebra.
    pub fn orthonormal_elements(
        &self,
        parent: &AlgebraRef,
        filter: GradeFilter,
    ) -> Result<Vec<OperatorElement>> {
        self.indices(filter)
            .into_iter()
            .map(|i| parent.element(self.on_big[i].clone()))
            .collect()
    }

    /// Expansion coefficients of an ambient-representation operator in the
    /// orthonormal basis, together with the reconstruction residual.
    pub fn expand_big(&self, x: &CMat) -> (Vec<crate::linalg::C64>, f64) {
        let d = self.big_dim as f64;
        let coeffs: Vec<_> = self
            .on_big
            .iter()
            .map(|e| hs_inner(e, x) / cr(d))
            .collect();
        let mut rec = CMat::zeros(x.nrows(), x.ncols());
        for (c, e) in coeffs.iter().zip(self.on_big.iter()) {
            rec += e * *c;
        }
        let residual = max_abs_diff(x, &rec);
        (coeffs, residual)
    }

    /// Membership test against the monomial basis.
    pub fn contains(&self, x: &CMat, eps: f64) -> bool {
        self.expand_big(x).1 <= eps
    }

    pub fn require_member(&self, x: &CMat, eps: f64) -> Result<()> {
        let (_, residual) = self.expand_big(x);
        if residual <= eps {
            Ok(())
        } else {
            Err(Error::NotInSubalgebra {
                labels: self.labels.clone(),
                residual,
            })
        }
    }

    /// Reduced density (with respect to the matrix trace of the small
    /// representation) of a state given by its ambient matrix-trace density.
    pub fn reduce_density(&self, rho_big: &CMat) -> CMat {
        let mut d = CMat::zeros(self.small.dim(), self.small.dim());
        for (e_big, e_small) in self.on_big.iter().zip(self.on_small.iter()) {
            let expect = trace_product(rho_big, e_big);
            d += e_small.adjoint() * expect;
        }
        d.scale(1.0 / self.small.dim() as f64)
    }

    /// Carries a small-representation operator to the ambient representation
    /// through the basis correspondence.
    pub fn lift(&self, x_small: &CMat) -> CMat {
        let ds = self.small.dim() as f64;
        let mut out = CMat::zeros(self.big_dim, self.big_dim);
        for (e_big, e_small) in self.on_big.iter().zip(self.on_small.iter()) {
            let c = hs_inner(e_small, x_small) / cr(ds);
            if c.norm() > 0.0 {
                out += e_big * c;
            }
        }
        out
    }

    /// Inverse of [`SubalgebraBasis::lift`] on members of the subalgebra:
    /// carries an ambient-representation element to the small representation.
    pub fn to_small(&self, x_big: &CMat) -> CMat {
        let d = self.big_dim as f64;
        let mut out = CMat::zeros(self.small.dim(), self.small.dim());
        for (e_big, e_small) in self.on_big.iter().zip(self.on_small.iter()) {
            let c = hs_inner(e_big, x_big) / cr(d);
            if c.norm() > 0.0 {
                out += e_small * c;
            }
        }
        out
    }
}

/// An ordered pair of disjoint mode subsets with the ambient algebra built
/// as "I first, then J", so that the subalgebra on I is exactly the leading
/// tensor factor and its commutant the trailing one.
#[derive(Debug)]
pub struct Partition {
    ambient: AlgebraRef,
    i_labels: Vec<u32>,
    j_labels: Vec<u32>,
    basis_i: SubalgebraBasis,
    basis_j: SubalgebraBasis,
    v_i: CMat,
    v_j: CMat,
}

impl Partition {
    pub fn new(i_labels: &[u32], j_labels: &[u32]) -> Result<Partition> {
        for l in i_labels {
            if j_labels.contains(l) {
                return Err(Error::OverlappingSubsets(*l));
            }
        }
        let mut all = i_labels.to_vec();
        all.extend_from_slice(j_labels);
        let ambient = FermionAlgebra::new(&all)?;
        let basis_i = SubalgebraBasis::build(&ambient, i_labels)?;
        let basis_j = SubalgebraBasis::build(&ambient, j_labels)?;
        let v_i = ambient.parity_unitary(i_labels)?;
        let v_j = ambient.parity_unitary(j_labels)?;
        Ok(Partition {
            ambient,
            i_labels: i_labels.to_vec(),
            j_labels: j_labels.to_vec(),
            basis_i,
            basis_j,
            v_i,
            v_j,
        })
    }

    pub fn ambient(&self) -> &AlgebraRef {
        &self.ambient
    }

    pub fn i_labels(&self) -> &[u32] {
        &self.i_labels
    }

    pub fn j_labels(&self) -> &[u32] {
        &self.j_labels
    }

    /// Dimension of the leading tensor factor, `2^|I|`.
    pub fn dim_i(&self) -> usize {
        1 << self.i_labels.len()
    }

    /// Dimension of the trailing tensor factor, `2^|J|`.
    pub fn dim_j(&self) -> usize {
        1 << self.j_labels.len()
    }

    pub fn basis_i(&self) -> &SubalgebraBasis {
        &self.basis_i
    }

    pub fn basis_j(&self) -> &SubalgebraBasis {
        &self.basis_j
    }

    pub fn parity_unitary_i(&self) -> &CMat {
        &self.v_i
    }

    pub fn parity_unitary_j(&self) -> &CMat {
        &self.v_j
    }

    /// Embeds an element of the subalgebra on J into the commutant of the
    /// subalgebra on I: `B -> B_even + v_I B_odd`. The result commutes with
    /// everything on I; the map is a grade-preserving isomorphism fixing the
    /// even part.
    pub fn commutant_embed(&self, b: &CMat) -> Result<CMat> {
        self.basis_j.require_member(b, tol::EXPECTATION)?;
        Ok(self.commutant_embed_unchecked(b))
    }

    pub(crate) fn commutant_embed_unchecked(&self, b: &CMat) -> CMat {
        let (even, odd) = self.ambient.grade_split(b);
        even + &self.v_i * odd
    }

    /// Embeds an element of the subalgebra on I into the commutant of the
    /// subalgebra on J: `A -> A_even + v_J A_odd`.
    pub fn commutant_embed_from_i(&self, a: &CMat) -> Result<CMat> {
        self.basis_i.require_member(a, tol::EXPECTATION)?;
        let (even, odd) = self.ambient.grade_split(a);
        Ok(even + &self.v_j * odd)
    }

    /// Orthonormal basis of the commutant of the subalgebra on I.
    pub fn commutant_i_basis(&self) -> Vec<CMat> {
        (0..self.basis_j.len())
            .map(|idx| {
                let e = self.basis_j.on_big(idx);
                if self.basis_j.is_odd(idx) {
                    &self.v_i * e
                } else {
                    e.clone()
                }
            })
            .collect()
    }

    /// Orthonormal basis of the commutant of the subalgebra on J.
    pub fn commutant_j_basis(&self) -> Vec<CMat> {
        (0..self.basis_i.len())
            .map(|idx| {
                let e = self.basis_i.on_big(idx);
                if self.basis_i.is_odd(idx) {
                    &self.v_j * e
                } else {
                    e.clone()
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{commutator, Grade};
    use crate::linalg::{max_abs, C64};

    #[test]
    fn one_mode_basis_counts_and_gram() {
        let alg = FermionAlgebra::new(&[1]).unwrap();
        let basis = SubalgebraBasis::build(&alg, &[1]).unwrap();
        assert_eq!(basis.len(), 4);
        assert_eq!(basis.indices(GradeFilter::Odd).len(), 2);
        // Odd span is {a_1, a_1^dag}.
        for idx in basis.indices(GradeFilter::Odd) {
            let e = basis.on_big(idx);
            assert_eq!(alg.grade_of(e), Grade::Odd);
        }
        // Gram of the returned basis is the identity.
        let d = alg.dim() as f64;
        for a in 0..4 {
            for b in 0..4 {
                let g = hs_inner(basis.on_big(a), basis.on_big(b)) / cr(d);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - cr(want)).norm() <= tol::OP_EQ);
            }
        }
    }

    #[test]
    fn two_mode_subset_gram_identity() {
        let alg = FermionAlgebra::new(&[1, 2, 3]).unwrap();
        let basis = SubalgebraBasis::build(&alg, &[1, 3]).unwrap();
        assert_eq!(basis.len(), 16);
        let d = alg.dim() as f64;
        for a in 0..16 {
            for b in 0..16 {
                let g = hs_inner(basis.on_big(a), basis.on_big(b)) / cr(d);
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g - cr(want)).norm() <= tol::OP_EQ, "gram({a},{b}) = {g}");
            }
        }
    }

    #[test]
    fn membership_test() {
        let alg = FermionAlgebra::new(&[1, 2]).unwrap();
        let basis = SubalgebraBasis::build(&alg, &[2]).unwrap();
        let a2 = alg.annihilation(2).unwrap();
        assert!(basis.contains(a2, 1e-10));
        let a1 = alg.annihilation(1).unwrap();
        assert!(!basis.contains(a1, 1e-10));
    }

    #[test]
    fn commutant_embedding_commutes_with_i() {
        let part = Partition::new(&[1], &[2]).unwrap();
        let alg = part.ambient().clone();
        let a2 = alg.annihilation(2).unwrap().clone();
        let image = part.commutant_embed(&a2).unwrap();
        let a1 = alg.annihilation(1).unwrap();
        assert!(max_abs(&commutator(&image, a1)) <= tol::OP_EQ);
        // v_1 a_2 is the expected image for the odd generator.
        let v1 = part.parity_unitary_i();
        assert!(max_abs_diff(&image, &(v1 * &a2)) <= tol::OP_EQ);

        // Even part is fixed.
        let n2 = alg.creation(2).unwrap() * alg.annihilation(2).unwrap();
        let image = part.commutant_embed(&n2).unwrap();
        assert!(max_abs_diff(&image, &n2) <= tol::OP_EQ);

        // Rejects elements outside the subalgebra on J.
        assert!(part.commutant_embed(a1).is_err());
    }

    #[test]
    fn commutant_basis_is_second_tensor_factor() {
        // With the "I first" ordering, the commutant of A_I must span
        // 1 (x) M_{2^|J|}.
        let part = Partition::new(&[1], &[2]).unwrap();
        for e in part.commutant_i_basis() {
            // Check the block structure: entries couple only equal factor-1
            // indices, i.e. e = 1 (x) X.
            let d2 = part.dim_j();
            let x = e.view((0, 0), (d2, d2)).into_owned();
            let mut want = CMat::zeros(4, 4);
            for r in 0..2 {
                for s in 0..d2 {
                    for sp in 0..d2 {
                        want[(r * d2 + s, r * d2 + sp)] = x[(s, sp)];
                    }
                }
            }
            assert!(max_abs_diff(&e, &want) <= tol::OP_EQ);
        }
    }

    #[test]
    fn products_with_commutant_span_everything() {
        // A_I together with the embedded commutant generates the full
        // matrix algebra: the Gram of {E_a * embed(F_b)} has full rank.
        for (i_labels, j_labels) in [(vec![1u32], vec![2u32]), (vec![1u32], vec![2u32, 3u32])] {
            let part = Partition::new(&i_labels, &j_labels).unwrap();
            let comm = part.commutant_i_basis();
            let d = part.ambient().dim() as f64;
            let mut products: Vec<CMat> = Vec::new();
            for a in 0..part.basis_i().len() {
                for f in &comm {
                    products.push(part.basis_i().on_big(a) * f);
                }
            }
            let n = products.len();
            assert_eq!(n, part.ambient().dim() * part.ambient().dim());
            let mut gram = CMat::zeros(n, n);
            for a in 0..n {
                for b in 0..n {
                    gram[(a, b)] = hs_inner(&products[a], &products[b]) / cr(d);
                }
            }
            let eigs = crate::linalg::hermitian_eigenvalues(&gram);
            assert!(eigs[0] > 1e-8, "minimum Gram eigenvalue {}", eigs[0]);
        }
    }

    #[test]
    fn lift_round_trip() {
        let part = Partition::new(&[1], &[2, 3]).unwrap();
        let basis = part.basis_j();
        let small = basis.small_algebra();
        let x_small = small.creation(2).unwrap() + small.annihilation(3).unwrap().scale(2.0);
        let lifted = basis.lift(&x_small);
        // The lift of a combination of generators is the same combination of
        // ambient generators.
        let amb = part.ambient();
        let want = amb.creation(2).unwrap() + amb.annihilation(3).unwrap().scale(2.0);
        assert!(max_abs_diff(&lifted, &want) <= 1e-11);
        let _ = C64::default();
    }
}
