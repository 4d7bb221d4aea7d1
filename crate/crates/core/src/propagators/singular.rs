//! Closed-form propagators of the first-order operators
//! `Q1 = (x^2 D + D x^2)/2` (at `h = 1`) and `Q2 = Op((x^2 - 5h) xi)`.
//! Both transport data along Mobius characteristics and develop moving
//! singular points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{require_dims, require_time};
use crate::error::{Checked, Error, Result, Warning};
use crate::fields::{interp_1d, GridWavefunction};

/// Samples closer than this many grid spacings to a singular point are flagged.
const SINGULAR_CELLS: f64 = 2.0;

/// `(amplitude, argument)` with `exp(-itQ2/h) u0 (x) = amplitude * u0(argument)`,
/// `a = sqrt(5h)`:
/// `a / (x sinh(at) + a cosh(at))` and
/// `a (x cosh(at) + a sinh(at)) / (x sinh(at) + a cosh(at))`.
pub fn q2_map(x: f64, t: f64, h: f64) -> (f64, f64) {
    let a = (5.0 * h).sqrt();
    let (s, c) = ((a * t).sinh(), (a * t).cosh());
    let den = x * s + a * c;
    (a / den, a * (x * c + a * s) / den)
}

/// `exp(-itQ2/h) u0` on the grid of `u0`, interpolating `u0` at the mapped
/// points (zero outside the grid). Samples within two cells of the
/// singular point `x = -a coth(at)` are flagged and set to zero when the
/// formula is not finite.
pub fn q2_propagator(u0: &GridWavefunction, t: f64, h: f64) -> Result<Checked<GridWavefunction>> {
    require_dims(u0, 1, "Q2 propagator")?;
    require_time(t)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    let grid = u0.grid().clone();
    let ax = *grid.axis(0);
    let a = (5.0 * h).sqrt();
    let singular = if t == 0.0 { None } else { Some(-a / (a * t).tanh()) };
    let mut warnings = Vec::new();
    let values = ax
        .points()
        .map(|x| {
            if let Some(xs) = singular {
                let distance = (x - xs).abs();
                if distance < SINGULAR_CELLS * ax.spacing() {
                    warnings.push(Warning::SingularPoint { x, distance });
                }
            }
            let (amp, arg) = q2_map(x, t, h);
            let z = interp_1d(u0, arg) * amp;
            if z.is_finite() {
                z
            } else {
                Complex64::default()
            }
        })
        .collect();
    Ok(Checked::with(GridWavefunction::new(grid, values)?, warnings))
}

/// `exp(-itQ1) u0 (x) = u0(x / (1 + tx)) / (1 + tx)`, singular at `x = -1/t`.
pub fn q1_propagator(u0: impl Fn(f64) -> f64, t: f64, x: f64) -> f64 {
    let d = 1.0 + t * x;
    u0(x / d) / d
}

/// Log-log fit of `|u|` against the distance to the singular point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityFit {
    pub alpha: f64,
    pub t: f64,
    /// `-1/t`.
    pub x_star: f64,
    pub slope: f64,
    pub intercept: f64,
    /// `(log eps, log |u|)` samples used by the fit.
    pub points: Vec<(f64, f64)>,
}

/// Propagates `u0 = <x>^{-alpha}` under `Q1` for time `t` and fits the
/// growth exponent of `|u|` at `x = -1/t + eps` for `eps` in `[1e-7, 1e-3]`
/// on both sides. The exact exponent is `alpha - 1`.
pub fn q1_singularity_probe(alpha: f64, t: f64) -> Result<SingularityFit> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::InvalidInput(format!("alpha must lie in (1/2, 1), got {alpha}")));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!("t must be positive, got {t}")));
    }
    let x_star = -1.0 / t;
    let u0 = |x: f64| (1.0 + x * x).powf(-0.5 * alpha);
    let mut points = Vec::new();
    for k in 0..=40 {
        let eps = 10f64.powf(-7.0 + 4.0 * k as f64 / 40.0);
        for side in [-1.0, 1.0] {
            let u = q1_propagator(u0, t, x_star + side * eps).abs();
            if u.is_finite() && u > 0.0 {
                points.push((eps.ln(), u.ln()));
            }
        }
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if points.len() < 3 || sxx <= 0.0 {
        return Err(Error::FitDegenerate(format!("{} usable samples near x* = {x_star}", points.len())));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(SingularityFit { alpha, t, x_star, slope, intercept: my - slope * mx, points })
}
