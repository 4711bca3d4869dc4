//! Numerical laboratory for the six-parameter family of quadratic
//! Camassa-Holm-type equations
//!
//! ```text
//! u_t + l1 u^2 + l2 u u_x + G*(l3 u^2 + l4 u_x^2) + d/dx G*(l5 u^2 + l6 u_x^2) = 0,
//! ```
//!
//! where `G(x) = exp(-|x|)/2` is the Helmholtz kernel. The crate provides
//!
//! * [`model`] — the coefficient family, named presets (Camassa-Holm,
//!   Degasperis-Procesi, Xia-Qiao, b-family) and the coefficient predicates
//!   that gate each analytical result,
//! * [`kernel`] — exact Helmholtz convolution identities for peakon
//!   superpositions and the spectral multiplier on periodic grids,
//! * [`peakon_dynamics`] — the N-peakon ODE reduction with an adaptive
//!   integrator, event detection and residual verification,
//! * [`closed_forms`] — exact single- and two-peakon solution formulas with
//!   constant fitting and singular-time prediction,
//! * [`pde_solver`] — a dealiased pseudospectral solver with conservation,
//!   blow-up and characteristics monitors,
//! * [`analysis`] — Riccati blow-up bounds, the wave-breaking time estimate,
//!   the Besov B^{3/2}_{2,inf} norm of peakon states and the ill-posedness
//!   pair construction,
//! * [`verify`] — named cross-check suites tying the above together.
//!
//! See the `examples/` directory for one runnable program per capability,
//! and the `peakon-lab` binary for a scriptable front end.

pub mod analysis;
pub mod cli;
pub mod closed_forms;
pub mod grid;
pub mod kernel;
pub mod model;
pub mod peakon_dynamics;
pub mod pde_solver;
pub mod quadrature;
pub mod verify;

mod error;

pub use error::Error;
pub use model::LambdaParams;
pub use peakon_dynamics::PeakonState;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
