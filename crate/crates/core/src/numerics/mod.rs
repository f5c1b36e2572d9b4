//! Deterministic numeric kernels shared by every check.

mod diff;
mod ode;
mod quad;
mod roots;

pub use diff::{central_diff, central_diff_noisy, default_step, Derivative};
pub use ode::{ode_solve, OdeFailure, OdeSpec, Termination, Trajectory};
pub use quad::{integrate, integrate_improper, QuadSpec};
pub use roots::newton_bracketed;

