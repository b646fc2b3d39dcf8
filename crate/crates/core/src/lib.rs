//! Numerics for the degenerate parabolic problem
//!
//! ```text
//! u_t = x^(2-2/N) u_xx + u (u_x)^q,   0 < x <= 1,   u(t,0) = 0,  u(t,1) = m,
//! ```
//!
//! together with its radial reformulation `w(t,r) = u(N^2 t, r^N) / r^N` on the unit ball of
//! `R^(N+2)` and the regularized family where `s^q` is replaced by `f_eps(s) = (s+eps)^q - eps^q`.
//!
//! The crate is `no_std` (it needs `alloc`). Everything that touches files, processes or threads
//! lives in the `degen` companion crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bessel;
pub mod error;
pub mod evolve;
pub mod functional;
pub mod grid;
pub mod heat;
pub mod mild;
pub mod params;
pub mod profile;
pub mod quad;
pub mod regularize;
pub mod stationary;
pub mod stencil;
pub mod transform;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use evolve::{SolverConfig, Status, Trajectory};
pub use grid::{RadialGrid, Spacing};
pub use params::{Epsilon, Exponent, ProblemParams};
pub use profile::{MassProfile, RadialProfile};
