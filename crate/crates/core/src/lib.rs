//! Semiclassical machinery for Hermite-Gaussian photon modes.
//!
//! * [`modes`]: the `|m,n>` basis and the tridiagonal action of the cubic generators.
//! * [`spectral`]: Jacobi-matrix diagnostics and the truncated-basis propagator.
//! * [`elliptic`]: Weierstrass `P` with invariants, roots and periods.
//! * [`flows`]: closed-form Hamilton flows, an RK4 oracle and the eikonal solver.
//! * [`fields`]: grid wavefunctions, Fourier and Wigner transforms.
//! * [`propagators`]: exact and semiclassical evolution operators, Egorov checks.
//! * [`cli`]: the `scmodes` command-line front end.

pub mod cli;
pub mod elliptic;
pub mod error;
pub mod fields;
pub mod flows;
pub mod modes;
pub mod propagators;
pub mod spectral;

pub use error::{Checked, Error, Result, Warning};
