//! The gyrator `exp(-it(xy + h^2 D_x D_y)/h)`, Weyl symbol `xy + xi eta`.
//!
//! Two charts cover the circle of times. The frequency chart is valid away
//! from `cos t = 0`, the position chart away from `sin t = 0`. The bilinear
//! forms in both phases have signature zero, so neither chart carries a
//! Maslov factor. Optics fixes `h = 1`; the formulas below keep `h`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{require_dims, require_time};
use crate::error::{Checked, Error, Result};
use crate::fields::{inverse_at_2d, sft, GridWavefunction};

/// Charts are valid where `|cos t|` (frequency) or `|sin t|` (position)
/// exceeds this value; every time has at least one valid chart.
pub const CHART_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    /// `|sec t| exp(-i xy tan t / h)` times an inverse transform of the
    /// `exp(-i xi eta tan t / h)`-chirped spectrum at `(x sec t, y sec t)`.
    Frequency,
    /// `(2 pi h |sin t|)^{-1} iint v(a,b) exp(i((xy + ab) cos t - (ay + xb)) / (h sin t)) da db`.
    Position,
}

impl Chart {
    pub fn name(self) -> &'static str {
        match self {
            Chart::Frequency => "frequency",
            Chart::Position => "position",
        }
    }

    pub fn valid_at(self, t: f64) -> bool {
        match self {
            Chart::Frequency => t.cos().abs() > CHART_THRESHOLD,
            Chart::Position => t.sin().abs() > CHART_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartedTime {
    pub t: f64,
    pub chart: Chart,
}

impl ChartedTime {
    pub fn new(t: f64, chart: Chart) -> Result<Self> {
        require_time(t)?;
        if !chart.valid_at(t) {
            return Err(Error::ChartInvalid { chart: chart.name(), t });
        }
        Ok(ChartedTime { t, chart })
    }

    /// The chart with the larger margin at `t`.
    pub fn auto(t: f64) -> Self {
        let chart = if t.cos().abs() >= t.sin().abs() { Chart::Frequency } else { Chart::Position };
        ChartedTime { t, chart }
    }
}

fn chirp(f: &mut GridWavefunction, c: f64) {
    let g = f.grid().clone();
    let ny = g.axis(1).n();
    for (i, v) in f.values_mut().iter_mut().enumerate() {
        let (a, b) = (g.axis(0).point(i / ny), g.axis(1).point(i % ny));
        *v *= Complex64::from_polar(1.0, c * a * b);
    }
}

/// Applies the gyrator at the charted time `ct`, using the grid's `h`.
pub fn gyrator(v: &GridWavefunction, ct: ChartedTime) -> Result<Checked<GridWavefunction>> {
    require_dims(v, 2, "gyrator")?;
    let ChartedTime { t, chart } = ChartedTime::new(ct.t, ct.chart)?;
    let grid = v.grid().clone();
    let h = grid.h();
    let (ax, ay) = (*grid.axis(0), *grid.axis(1));
    let (nx, ny) = (ax.n(), ay.n());
    let (s, c) = t.sin_cos();
    let mut warnings = Vec::new();
    let values: Vec<Complex64> = match chart {
        Chart::Frequency => {
            let (sec, tan) = (1.0 / c, s / c);
            let Checked { value: mut vhat, warnings: w } = sft(v);
            warnings.extend(w);
            chirp(&mut vhat, -tan / h);
            let xs: Vec<f64> = ax.points().map(|x| x * sec).collect();
            let ys: Vec<f64> = ay.points().map(|y| y * sec).collect();
            let w = inverse_at_2d(&vhat, h, &xs, &ys);
            let inside = |p: f64, l: f64| p.abs() <= l;
            (0..nx * ny)
                .map(|i| {
                    let (a, b) = (i / ny, i % ny);
                    let (x, y) = (ax.point(a), ay.point(b));
                    if !inside(xs[a], ax.half_extent()) || !inside(ys[b], ay.half_extent()) {
                        return Complex64::default();
                    }
                    w[i] * sec.abs() * Complex64::from_polar(1.0, -x * y * tan / h)
                })
                .collect()
        }
        Chart::Position => {
            let cot = c / s;
            let mut vt = v.clone();
            chirp(&mut vt, cot / h);
            // resolution check on the chirped input
            warnings.extend(sft(&vt).warnings);
            let conj = vt.conj();
            // sum_{a,b} vt(a,b) exp(-i(a y + b x)/(h s)): a pairs with the target y
            let ta: Vec<f64> = ay.points().map(|y| y / s).collect();
            let tb: Vec<f64> = ax.points().map(|x| x / s).collect();
            let w = inverse_at_2d(&conj, h, &ta, &tb);
            // target frequencies past Nyquist would alias back onto the spectrum
            let nyq = |p: f64, dx: f64| (p / h * dx).abs() <= PI;
            let back = (2.0 * PI * h).powi(2);
            let pre = 1.0 / (2.0 * PI * h * s.abs());
            (0..nx * ny)
                .map(|i| {
                    let (a, b) = (i / ny, i % ny);
                    let (x, y) = (ax.point(a), ay.point(b));
                    if !nyq(ta[b], ax.spacing()) || !nyq(tb[a], ay.spacing()) {
                        return Complex64::default();
                    }
                    let sum = w[b * nx + a].conj() * back;
                    sum * pre * Complex64::from_polar(1.0, x * y * cot / h)
                })
                .collect()
        }
    };
    Ok(Checked::with(GridWavefunction::new(grid, values)?, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{extended_wigner, Axis, Grid};
    use crate::modes::{mode_eval, ModeIndex};

    fn grid(n: usize, l: f64) -> Grid {
        Grid::new_2d(Axis::new(n, l).unwrap(), Axis::new(n, l).unwrap(), 1.0)
    }

    fn packet(g: Grid) -> GridWavefunction {
        GridWavefunction::from_fn_2d(g, |x, y| {
            let r = ((x - 0.7).powi(2) + (y + 0.3).powi(2)) / 2.0;
            Complex64::from_polar((-r).exp() / PI.sqrt(), 0.5 * y - 0.2 * x)
        })
        .unwrap()
    }

    #[test]
    fn chart_validity() {
        assert!(ChartedTime::new(0.0, Chart::Frequency).is_ok());
        assert!(matches!(ChartedTime::new(0.0, Chart::Position), Err(Error::ChartInvalid { .. })));
        assert!(matches!(ChartedTime::new(PI / 2.0, Chart::Frequency), Err(Error::ChartInvalid { .. })));
        for k in 0..100 {
            let t = k as f64 * 0.0731 - 3.0;
            assert!(Chart::Frequency.valid_at(t) || Chart::Position.valid_at(t));
            let a = ChartedTime::auto(t);
            assert!(a.chart.valid_at(t));
        }
    }

    #[test]
    fn identity_at_zero() {
        let v = packet(grid(64, 8.0));
        let u = gyrator(&v, ChartedTime::new(0.0, Chart::Frequency).unwrap()).unwrap().value;
        assert!(u.distance(&v).unwrap() < 1e-10);
    }

    #[test]
    fn charts_agree_on_the_overlap() {
        let v = packet(grid(128, 12.0));
        for t in [PI / 3.0, -0.9, 2.2, 0.5, -2.7] {
            let a = gyrator(&v, ChartedTime::new(t, Chart::Frequency).unwrap()).unwrap().value;
            let b = gyrator(&v, ChartedTime::new(t, Chart::Position).unwrap()).unwrap().value;
            assert!(a.distance(&b).unwrap() < 1e-6, "t = {t}: {}", a.distance(&b).unwrap());
            assert!((a.norm() - v.norm()).abs() < 1e-7);
        }
    }

    #[test]
    fn group_property_across_charts() {
        let v = packet(grid(128, 12.0));
        let once = gyrator(&v, ChartedTime::auto(1.4)).unwrap().value;
        let half = gyrator(&v, ChartedTime::auto(0.7)).unwrap().value;
        let twice = gyrator(&half, ChartedTime::auto(0.7)).unwrap().value;
        assert!(once.distance(&twice).unwrap() < 1e-6);
    }

    #[test]
    fn quarter_turn_is_the_extended_wigner_transform() {
        let g = grid(128, 12.0);
        for (m, n) in [(0, 0), (1, 0), (0, 1), (1, 1), (2, 1)] {
            let v = mode_eval(ModeIndex::new(m, n), 1.0, &g).unwrap().value;
            let swapped = mode_eval(ModeIndex::new(n, m), 1.0, &g).unwrap().value;
            let lg = extended_wigner(&swapped).unwrap().value;
            let phase = Complex64::new(0.0, -1.0).powu(n as u32);
            let u = gyrator(&v, ChartedTime::auto(PI / 4.0)).unwrap().value;
            let d = u.distance(&lg.scaled(phase)).unwrap();
            assert!(d < 1e-6, "({m},{n}): {d}");
            let mirror = extended_wigner(&v).unwrap().value.scaled(Complex64::new(0.0, 1.0).powu(n as u32));
            let u = gyrator(&v, ChartedTime::auto(-PI / 4.0)).unwrap().value;
            let d = u.distance(&mirror).unwrap();
            assert!(d < 1e-6, "-pi/4 ({m},{n}): {d}");
        }
    }
}
