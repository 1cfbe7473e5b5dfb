//! Default numerical tolerances.
//!
//! All tolerances assume double precision arithmetic on dense matrices of
//! dimension at most 1024. Functions that accept an explicit tolerance use
//! these values as defaults.

/// Operator equality in max-entry norm (anticommutators, grading checks).
pub const OP_EQ: f64 = 1e-12;

/// Most negative admissible eigenvalue of a density matrix.
pub const PSD_EIG: f64 = -1e-10;

/// Unit-trace check for densities.
pub const STATE_TRACE: f64 = 1e-10;

/// Evenness of a state: max-entry distance between the density and its
/// grading conjugate.
pub const STATE_EVEN: f64 = 1e-10;

/// Purity: |Tr(rho^2) - 1|.
pub const PURITY: f64 = 1e-9;

/// Agreement of expectation values (state restriction, product property).
pub const EXPECTATION: f64 = 1e-10;

/// Reassembly residual accepted for a separable-decomposition certificate.
pub const DECOMP_REASSEMBLE: f64 = 1e-9;

/// Hopping-witness violations above this certify CAR-nonseparability.
pub const WITNESS: f64 = 1e-8;

/// Roof values below this are reported as numerically zero.
pub const ROOF_ZERO: f64 = 1e-6;

/// Default roof-optimizer tolerance (nats).
pub const ROOF_OPT: f64 = 1e-3;

/// Eigenvalues of a partially transposed density below this certify
/// tensor-pair nonseparability.
pub const PPT_EIG: f64 = -1e-10;

/// Default cap on the number of modes of a single algebra (dimension 2^10).
pub const MODE_CAP: usize = 10;
