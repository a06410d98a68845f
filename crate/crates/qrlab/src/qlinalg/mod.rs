//! Dense complex linear algebra over qudit registers.
//!
//! Everything downstream (codes, channels, recovery maps, diagnostics) is
//! built on [`DenseOperator`]: a square complex matrix carrying the list of
//! local dimensions whose product is the total dimension. Values are
//! immutable after construction and all operations are pure functions.

mod eigen;
mod metrics;
mod operator;
mod state;

pub(crate) use eigen::eigh_mat as eigen_backend;
pub use eigen::{eig_hermitian, inv_sqrt_psd, mat_func, sqrt_psd};
pub use metrics::{fidelity, trace_distance, von_neumann_entropy};
pub use operator::{pure_state_marginal, DenseOperator};
pub use state::{DensityMatrix, PureState};

/// Default tolerance for Hermiticity and trace checks.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Default tolerance on `tr(rho) - 1`.
pub const TRACE_TOL: f64 = 1e-9;
/// Default relative cutoff below which eigenvalues are treated as exact
/// zeros by matrix functions (pseudo-inverse convention).
pub const PSEUDO_CUTOFF: f64 = 1e-12;
/// Hard cap on the total dimension produced by tensor products.
pub const MAX_TENSOR_DIM: usize = 1 << 16;
