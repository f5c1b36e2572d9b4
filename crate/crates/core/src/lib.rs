//! Numerical checks of monotone level-set quantities for exterior harmonic
//! potentials on rotationally symmetric manifolds with nonnegative Ricci
//! curvature.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is a pure
//! function of its inputs; IO, configuration and parallel scheduling live in
//! the `capmono` companion crate.
//!
//! - [`numerics`]: adaptive quadrature, ODE integration, finite differences.
//! - [`geometry`]: warped-product models, Ricci curvature, volume ratios.
//! - [`potential`]: capacitary and parabolic potentials, spheroids.
//! - [`monotone`]: the `U_β`, `Φ_β`, `Ψ_β` and `A_β` families.
//! - [`willmore`]: Willmore energies, Kasue bounds, derived constants.
//! - [`mcf`]: mean curvature flow of coordinate spheres.
#![no_std]
#![deny(unsafe_code)]
// `!(x > 0.0)` is used deliberately so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod geometry;
pub mod mcf;
pub mod monotone;
pub mod numerics;
pub mod potential;
mod report;
pub mod willmore;

pub use error::{Error, Result};
pub use report::{CheckReport, Status};
