//! Evolution operators: the exact metaplectic warm-up and gyrator
//! propagators, the first-order Fourier integral operator for `Op(p0)`,
//! the closed-form `Q1`/`Q2` propagators and Egorov checks.
//!
//! All propagators solve `(hD_t + P) u = 0`, i.e. `u = exp(-itP/h) v`.

mod egorov;
mod fio;
mod gyrator;
mod singular;
mod warmup;

pub use egorov::{egorov_check, EgorovGen, EgorovResult};
pub use fio::{
    localization_mass, op_p0_apply, step_count, t0_fio_propagator, t0_fio_propagator_steps, t0_fio_residual,
    t0_reference, LOCALIZATION_RADIUS, LOCALIZATION_TOL, MAX_STEP,
};
pub use gyrator::{gyrator, Chart, ChartedTime, CHART_THRESHOLD};
pub use singular::{q1_propagator, q1_singularity_probe, q2_map, q2_propagator, SingularityFit};
pub use warmup::warmup_propagator;

use crate::error::{Error, Result};
use crate::fields::GridWavefunction;

fn require_dims(v: &GridWavefunction, d: usize, what: &str) -> Result<()> {
    if v.grid().dims() != d {
        return Err(Error::InvalidInput(format!("{what} needs a {d}D wavefunction")));
    }
    Ok(())
}

fn require_time(t: f64) -> Result<()> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("time must be finite, got {t}")));
    }
    Ok(())
}
