//! Numerical operator theory over the symmetrized polydisc at finite matrix
//! dimension.
//!
//! The library realizes, for a commuting tuple `(S_1, ..., S_{d-1}, P)` of
//! matrices with `‖P‖ <= 1`:
//!
//! - the asymptotic limit `Q` of `P*^n P^n` and purity detection
//!   ([`asymptotics`]);
//! - the fundamental operators on the defect space of `P` ([`asymptotics`]);
//! - the canonical unitary extension `(R, U)` on `Ran Q` with module map
//!   `J*J = Q`, unique up to unitary isomorphism ([`dilation`]);
//! - the space of operators satisfying the Brown-Halmos relations, the
//!   completely positive Toeplitz projection, and the norm-preserving
//!   correspondence between that space and the extension commutant
//!   ([`toeplitz`]);
//! - commutant lifting with no norm increase ([`lifting`]).
//!
//! Every identity is backed by a verification driver producing structured
//! pass/fail [`report`]s, and seeded instance generators make all checks
//! reproducible. Residual gates are scale-free: a condition passes when its
//! residual is at most `tol * (1 + operand norms)`.

pub mod asymptotics;
pub mod dilation;
pub mod error;
pub mod gamma;
pub mod instance;
pub mod lifting;
pub mod matrixkit;
pub mod report;
pub mod toeplitz;

pub use error::{GammaError, Result};

/// Default tolerances and iteration budgets.
pub mod defaults {
    /// Scale-free gate for membership tests and tuple invariants.
    pub const GATE_TOL: f64 = 1e-8;
    /// Frobenius convergence threshold for the power-doubling iteration.
    pub const CONV_TOL: f64 = 1e-12;
    /// Iteration budget for the power doubling (exponent reaches 2^60).
    pub const MAX_DOUBLINGS: usize = 60;
    /// A tuple is pure when `lambda_max(Q)` stays at or below this.
    pub const PURE_TOL: f64 = 1e-8;
    /// Relative singular-value cut for pseudoinverses.
    pub const PINV_RANK_TOL: f64 = 1e-12;
    /// Residual gate above which an intertwining solve is rejected.
    pub const ILL_COND_TOL: f64 = 1e-6;
    /// Absolute eigenvalue cut (relative to the unit scale of a defect
    /// operator) separating `Ran D_P` from rounding noise.
    pub const DEFECT_RANK_TOL: f64 = 1e-10;

    /// Eigenvalue cut for the rank of the asymptotic limit.
    pub fn q_rank_tol(n: usize) -> f64 {
        n as f64 * f64::EPSILON * 16.0
    }
}
