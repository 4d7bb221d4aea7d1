//! Grid wavefunctions and the transforms acting on them.

pub mod fourier;
pub mod grid;
pub mod interp;
pub mod weyl;
pub mod wigner;

pub use fourier::{inverse_at_1d, inverse_at_2d, isft, partial_fourier, sft};
pub use grid::{Axis, Grid, GridWavefunction, WavefunctionRecord, FORMAT_TAG, FORMAT_VERSION};
pub use interp::{interp_1d, interp_2d};
pub use weyl::{weyl_apply, weyl_pairing, QuadraticSymbol};
pub use wigner::{extended_wigner, laguerre_gaussian, wigner, WignerFunction};
