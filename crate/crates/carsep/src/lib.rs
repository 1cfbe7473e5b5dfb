//! Numerical toolkit for bipartite spinless-fermion (CAR) lattice systems.
//!
//! The crate constructs finite CAR algebras in a concrete matrix
//! representation, manipulates their states, decides and certifies
//! separability for both the fermionic pair of subsystems and the
//! tensor-product pair obtained through the commutant, and computes
//! convex-roof entanglement-of-formation functionals, including the variant
//! restricted to decompositions that respect the univalence superselection
//! rule.
//!
//! See the `book/` guide in the repository for a walk-through of the
//! concepts and the command-line interface.

pub mod algebra;
pub mod basis;
pub mod entanglement;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod named;
pub mod random;
pub mod report;
pub mod separability;
pub mod specdoc;
pub mod state;
pub mod tol;
pub mod verify;

pub use algebra::{AlgebraRef, FermionAlgebra, Grade, OperatorElement};
pub use basis::{GradeFilter, Partition, SubalgebraBasis};
pub use entanglement::{
    concurrence_eof, eof_averaged, eof_superselected, eof_tensor, eof_weighted, RoofOptions,
    RoofResult, Side,
};
pub use error::{Error, Result};
pub use separability::{
    car_implies_tensor_check, car_separability, hopping_witness, ppt_check,
    verify_separable_decomposition, Certificate, Pairing, SeparabilityVerdict, Verdict,
    WitnessReport,
};
pub use state::{
    marginal_entropies, product_extension, Decomposition, MarginalEntropies, ParityBlocks,
    QuantumState,
};
