//! Pseudospectral solver and exact symbolic verifier for a generalized
//! Camassa–Holm family
//!
//! ```text
//! m_t + u m_x + 2 u_x m = alpha u_x + beta u^2 u_x + gamma u^3 u_x + Gamma u_xxx,
//! m = u - u_xx,
//! ```
//!
//! on a periodic domain.  The numerical layer integrates the evolution form
//! of the equation, tracks characteristics and monitors the quantities that
//! the analytic theory constrains: conserved functionals, sign-invariant
//! momentum, slope bounds and the wave-breaking criterion.  The symbolic
//! layer re-derives the equation's integrability structure over exact
//! rationals.

pub mod certificates;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod monitors;
pub mod spectral;
pub mod symbolic;

pub use error::{ModelError, SymbolicError};
