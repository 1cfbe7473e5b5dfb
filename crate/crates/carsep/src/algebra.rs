//! Finite CAR algebras in a concrete matrix representation.
//!
//! An algebra on `n` modes is realized on the occupation basis of dimension
//! `2^n` through Jordan-Klein-Wigner matrices: the generator of the k-th mode
//! carries a sign string over modes `1..k-1`,
//!
//! ```text
//! a_k = Z ⊗ ... ⊗ Z ⊗ lower ⊗ 1 ⊗ ... ⊗ 1
//! ```
//!
//! with `|0>` the empty and `|1>` the occupied single-mode state and `lower`
//! mapping `|1> -> |0>`. Mode 1 is the leftmost (most significant) tensor
//! factor. Any fixed convention satisfies the anticommutation relations; all
//! quantities computed by this crate are convention independent.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c, cr, max_abs, max_abs_diff, CMat};
use crate::tol;

/// Parity grade of an operator under the grading automorphism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grade {
    Even,
    Odd,
    Mixed,
}

/// A finite CAR algebra with a fixed ordered set of mode labels.
#[derive(Debug)]
pub struct FermionAlgebra {
    labels: Vec<u32>,
    dim: usize,
    cr_ops: Vec<CMat>,
    an_ops: Vec<CMat>,
    /// (-1)^(number of occupied modes) per occupation-basis index.
    number_parity: Vec<f64>,
}

pub type AlgebraRef = Arc<FermionAlgebra>;

fn single_site() -> (CMat, CMat) {
    let lower = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)]);
    let z = CMat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
    (lower, z)
}

impl FermionAlgebra {
    /// Builds the algebra on the given ordered, distinct mode labels.
    pub fn new(labels: &[u32]) -> Result<AlgebraRef> {
        Self::with_mode_cap(labels, tol::MODE_CAP)
    }

    /// Same as [`FermionAlgebra::new`] with an explicit resource cap on the
    /// number of modes.
    pub fn with_mode_cap(labels: &[u32], cap: usize) -> Result<AlgebraRef> {
        if labels.is_empty() {
            return Err(Error::EmptyModeList);
        }
        if labels.len() > cap {
            return Err(Error::TooManyModes {
                requested: labels.len(),
                cap,
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for &l in labels {
            if !seen.insert(l) {
                return Err(Error::DuplicateLabel(l));
            }
        }

        let n = labels.len();
        let dim = 1usize << n;
        let (lower, z) = single_site();
        let id2 = CMat::identity(2, 2);

        let mut an_ops = Vec::with_capacity(n);
        let mut cr_ops = Vec::with_capacity(n);
        for p in 0..n {
            let mut m = CMat::identity(1, 1);
            for q in 0..n {
                let factor = if q < p {
                    &z
                } else if q == p {
                    &lower
                } else {
                    &id2
                };
                m = m.kronecker(factor);
            }
            cr_ops.push(m.adjoint());
            an_ops.push(m);
        }

        let number_parity = (0..dim)
            .map(|i| if (i as u32).count_ones() % 2 == 0 { 1.0 } else { -1.0 })
            .collect();

        Ok(Arc::new(FermionAlgebra {
            labels: labels.to_vec(),
            dim,
            cr_ops,
            an_ops,
            number_parity,
        }))
    }

    pub fn n_modes(&self) -> usize {
        self.labels.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.dim, self.dim)
    }

    pub fn position(&self, label: u32) -> Result<usize> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .ok_or(Error::UnknownLabel(label))
    }

    /// Creation operator of the mode with the given label.
    pub fn creation(&self, label: u32) -> Result<&CMat> {
        Ok(&self.cr_ops[self.position(label)?])
    }

    /// Annihilation operator of the mode with the given label.
    pub fn annihilation(&self, label: u32) -> Result<&CMat> {
        Ok(&self.an_ops[self.position(label)?])
    }

    pub(crate) fn creation_at(&self, pos: usize) -> &CMat {
        &self.cr_ops[pos]
    }

    pub(crate) fn annihilation_at(&self, pos: usize) -> &CMat {
        &self.an_ops[pos]
    }

    /// Occupation bit of `pos` within basis index `idx` (mode at position 0
    /// is the most significant bit).
    pub fn occupation_bit(&self, idx: usize, pos: usize) -> bool {
        (idx >> (self.n_modes() - 1 - pos)) & 1 == 1
    }

    /// The grading automorphism, the linear multiplicative extension of
    /// `a_i -> -a_i`, `a_i^dag -> -a_i^dag`. Implemented as conjugation by
    /// the diagonal number-parity unitary, which is exact entrywise.
    pub fn theta(&self, a: &CMat) -> CMat {
        let mut out = a.clone();
        for j in 0..self.dim {
            for i in 0..self.dim {
                out[(i, j)] *= cr(self.number_parity[i] * self.number_parity[j]);
            }
        }
        out
    }

    /// U(1) gauge transformation `a_i^dag -> e^{i angle} a_i^dag`,
    /// `a_i -> e^{-i angle} a_i`, extended multiplicatively. At `angle = pi`
    /// it coincides with the grading automorphism.
    pub fn gauge(&self, a: &CMat, angle: f64) -> CMat {
        let mut out = a.clone();
        for j in 0..self.dim {
            let nj = (j as u32).count_ones() as f64;
            for i in 0..self.dim {
                let ni = (i as u32).count_ones() as f64;
                let phase = c(0.0, angle * (ni - nj)).exp();
                out[(i, j)] *= phase;
            }
        }
        out
    }

    /// The self-adjoint unitary `v_I = prod_{i in I} (a_i^dag a_i - a_i a_i^dag)`
    /// implementing the grading on the subalgebra of the modes in `subset`.
    /// An empty subset yields the identity.
    pub fn parity_unitary(&self, subset: &[u32]) -> Result<CMat> {
        let positions: Vec<usize> = subset
            .iter()
            .map(|&l| self.position(l))
            .collect::<Result<_>>()?;
        let mut m = CMat::zeros(self.dim, self.dim);
        for idx in 0..self.dim {
            // Each factor contributes +1 on an occupied mode and -1 on an
            // empty one, so the diagonal entry is (-1)^(#empty modes in I).
            let occupied = positions
                .iter()
                .filter(|&&p| self.occupation_bit(idx, p))
                .count();
            let sign = if (positions.len() - occupied) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            m[(idx, idx)] = cr(sign);
        }
        Ok(m)
    }

    /// Diagonal unitary with entry `(-1)^(particle number)`; conjugation by
    /// it equals the grading automorphism, and it coincides with the full
    /// parity unitary up to a global sign.
    pub fn number_parity_unitary(&self) -> CMat {
        let mut m = CMat::zeros(self.dim, self.dim);
        for idx in 0..self.dim {
            m[(idx, idx)] = cr(self.number_parity[idx]);
        }
        m
    }

    /// Sign `(-1)^(particle number)` of one occupation-basis index.
    pub fn number_parity_sign(&self, idx: usize) -> f64 {
        self.number_parity[idx]
    }

    /// Splits `a` into its even and odd parts `(a + theta(a))/2` and
    /// `(a - theta(a))/2`.
    pub fn grade_split(&self, a: &CMat) -> (CMat, CMat) {
        let t = self.theta(a);
        ((a + &t).scale(0.5), (a - &t).scale(0.5))
    }

    /// Classifies `a` as even, odd, or mixed within `tol::OP_EQ` relative to
    /// the entry scale of `a`.
    pub fn grade_of(&self, a: &CMat) -> Grade {
        let t = self.theta(a);
        let scale = max_abs(a).max(1.0);
        if max_abs_diff(&t, a) <= tol::OP_EQ * scale {
            Grade::Even
        } else if max_abs(&(&t + a)) <= tol::OP_EQ * scale {
            Grade::Odd
        } else {
            Grade::Mixed
        }
    }

    /// Wraps a matrix as an element of this algebra, tagging its grade.
    pub fn element(self: &AlgebraRef, matrix: CMat) -> Result<OperatorElement> {
        if matrix.nrows() != self.dim || matrix.ncols() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let grade = self.grade_of(&matrix);
        Ok(OperatorElement {
            grade,
            matrix,
            algebra: Arc::clone(self),
        })
    }

    pub fn same_algebra(&self, other: &FermionAlgebra) -> bool {
        self.labels == other.labels
    }
}

/// A matrix tagged with its owning algebra and parity grade.
#[derive(Debug, Clone)]
pub struct OperatorElement {
    matrix: CMat,
    algebra: AlgebraRef,
    grade: Grade,
}

impl OperatorElement {
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn algebra(&self) -> &AlgebraRef {
        &self.algebra
    }

    pub fn grade(&self) -> Grade {
        self.grade
    }

    pub fn theta(&self) -> OperatorElement {
        let m = self.algebra.theta(&self.matrix);
        OperatorElement {
            grade: self.algebra.grade_of(&m),
            matrix: m,
            algebra: Arc::clone(&self.algebra),
        }
    }

    pub fn gauge(&self, angle: f64) -> OperatorElement {
        let m = self.algebra.gauge(&self.matrix, angle);
        OperatorElement {
            grade: self.algebra.grade_of(&m),
            matrix: m,
            algebra: Arc::clone(&self.algebra),
        }
    }

    /// Even/odd parts, each tagged.
    pub fn grade_split(&self) -> (OperatorElement, OperatorElement) {
        let (e, o) = self.algebra.grade_split(&self.matrix);
        (
            OperatorElement {
                matrix: e,
                algebra: Arc::clone(&self.algebra),
                grade: Grade::Even,
            },
            OperatorElement {
                matrix: o,
                algebra: Arc::clone(&self.algebra),
                grade: Grade::Odd,
            },
        )
    }
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}
