//! Fixed-grid RK4 with step halving, used as an independent check on the
//! closed forms and for symbols without one.

use serde::{Deserialize, Serialize};

use super::{p0, p4, PhasePoint};
use crate::error::{Error, Result};

/// Per-substep tolerance on conserved-quantity drift, relative to `1 + |C|`.
pub const DRIFT_TOL: f64 = 1e-10;
/// A state norm beyond this is recorded as blow-up.
pub const BLOWUP_RADIUS: f64 = 1e8;

const MAX_HALVINGS: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlowSymbol {
    /// `x(x^2 + xi^2)/2 - 3hx/2`.
    P0,
    /// `x(x^2 + y^2 + xi^2 + eta^2)/2 - 5hx/2`.
    P4,
    /// `xi*eta - x*y`.
    Hyperbolic,
    /// `x*y + xi*eta`.
    Gyrator,
    /// `x^2 xi`.
    Q1,
    /// `(x^2 - 5h) xi`.
    Q2,
}

impl FlowSymbol {
    pub fn dim(self) -> usize {
        match self {
            FlowSymbol::P0 | FlowSymbol::Q1 | FlowSymbol::Q2 => 2,
            _ => 4,
        }
    }

    fn field(self, s: &[f64], h: f64, out: &mut [f64]) {
        match self {
            FlowSymbol::P0 => {
                let (x, xi) = (s[0], s[1]);
                out[0] = x * xi;
                out[1] = -1.5 * x * x - 0.5 * xi * xi + 1.5 * h;
            }
            FlowSymbol::Q1 | FlowSymbol::Q2 => {
                let shift = if self == FlowSymbol::Q2 { 5.0 * h } else { 0.0 };
                out[0] = s[0] * s[0] - shift;
                out[1] = -2.0 * s[0] * s[1];
            }
            FlowSymbol::P4 => {
                let (x, y, xi, eta) = (s[0], s[1], s[2], s[3]);
                out[0] = x * xi;
                out[1] = x * eta;
                out[2] = -1.5 * x * x - 0.5 * (y * y + xi * xi + eta * eta) + 2.5 * h;
                out[3] = -x * y;
            }
            FlowSymbol::Hyperbolic => {
                out[0] = s[3];
                out[1] = s[2];
                out[2] = s[1];
                out[3] = s[0];
            }
            FlowSymbol::Gyrator => {
                out[0] = s[3];
                out[1] = s[2];
                out[2] = -s[1];
                out[3] = -s[0];
            }
        }
    }

    /// The conserved quantities checked during integration.
    pub fn conserved(self, s: &[f64], h: f64) -> Vec<f64> {
        match self {
            FlowSymbol::P0 => vec![p0(s[0], s[1], h)],
            FlowSymbol::Q1 => vec![s[0] * s[0] * s[1]],
            FlowSymbol::Q2 => vec![(s[0] * s[0] - 5.0 * h) * s[1]],
            FlowSymbol::P4 => vec![p4(s[0], s[1], s[2], s[3], h), s[1] * s[1] + s[3] * s[3]],
            FlowSymbol::Hyperbolic => vec![s[2] * s[3] - s[0] * s[1], s[1] * s[1] - s[2] * s[2]],
            FlowSymbol::Gyrator => vec![s[0] * s[1] + s[2] * s[3], s[0] * s[0] + s[3] * s[3]],
        }
    }
}

/// Samples of a numerically integrated flow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FlowTrace {
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    /// Conserved quantities at each sample.
    pub conserved_log: Vec<Vec<f64>>,
    /// Set when the state left the ball of radius [`BLOWUP_RADIUS`].
    pub blowup_time: Option<f64>,
}

impl FlowTrace {
    pub fn last(&self) -> Option<&PhasePoint> {
        self.points.last()
    }

    /// Largest deviation of any conserved quantity from its initial value.
    pub fn max_drift(&self) -> f64 {
        let Some(first) = self.conserved_log.first() else { return 0.0 };
        self.conserved_log.iter().flat_map(|c| c.iter().zip(first).map(|(a, b)| (a - b).abs())).fold(0.0, f64::max)
    }
}

fn rk4(sym: FlowSymbol, s: &[f64], dt: f64, h: f64) -> Vec<f64> {
    let n = s.len();
    let mut k = [[0.0; 4]; 4];
    let mut tmp = vec![0.0; n];
    sym.field(s, h, &mut k[0]);
    for stage in 1..4 {
        let w = if stage == 3 { 1.0 } else { 0.5 };
        for i in 0..n {
            tmp[i] = s[i] + w * dt * k[stage - 1][i];
        }
        let (_, rest) = k.split_at_mut(stage);
        sym.field(&tmp, h, &mut rest[0]);
    }
    (0..n).map(|i| s[i] + dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i])).collect()
}

fn norm(s: &[f64]) -> f64 {
    s.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Integrates `sym` from `start` to time `t_end` (either sign), sampling on
/// the grid of spacing `|dt|`. Steps are halved while any conserved
/// quantity drifts by more than `DRIFT_TOL (1 + |C|)` in one substep.
pub fn rk4_oracle(sym: FlowSymbol, start: PhasePoint, t_end: f64, dt: f64) -> Result<FlowTrace> {
    let h = start.h();
    let mut s = start.coords();
    if s.len() != sym.dim() {
        return Err(Error::InvalidInput(format!("symbol {sym:?} needs a {}-dimensional point", sym.dim())));
    }
    if !(dt.abs() > 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidInput("time step must be nonzero and the end time finite".into()));
    }
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let dt = dt.abs();
    let steps = (t_end.abs() / dt).ceil().max(1.0) as usize;
    let mut trace = FlowTrace {
        times: vec![0.0],
        points: vec![start],
        conserved_log: vec![sym.conserved(&s, h)],
        blowup_time: None,
    };
    let mut t = 0.0;
    'outer: for k in 1..=steps {
        let target = dir * (k as f64 * dt).min(t_end.abs());
        while (target - t).abs() > 1e-15 * (1.0 + target.abs()) {
            let mut sub = target - t;
            let c_old = sym.conserved(&s, h);
            let mut halvings = 0;
            let next = loop {
                let cand = rk4(sym, &s, sub, h);
                let c_new = sym.conserved(&cand, h);
                let drift = c_new.iter().zip(&c_old).map(|(a, b)| (a - b).abs() / (1.0 + b.abs())).fold(0.0, f64::max);
                let finite = cand.iter().all(|v| v.is_finite());
                if finite && drift <= DRIFT_TOL {
                    break cand;
                }
                if halvings >= MAX_HALVINGS {
                    if !finite || norm(&s) > 1e3 {
                        trace.blowup_time = Some(t);
                        break 'outer;
                    }
                    return Err(Error::StepRejected { t, drift });
                }
                sub *= 0.5;
                halvings += 1;
            };
            t += sub;
            s = next;
            if norm(&s) > BLOWUP_RADIUS {
                trace.blowup_time = Some(t);
                break 'outer;
            }
        }
        t = target;
        trace.times.push(t);
        trace.points.push(PhasePoint::from_coords(&s, h));
        trace.conserved_log.push(sym.conserved(&s, h));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flows::PhasePoint1D;

    #[test]
    fn q1_blows_up_at_inverse_x() {
        // x' = x^2 from x0 = 2 explodes at t = 1/2
        let start = PhasePoint::One(PhasePoint1D::new(2.0, 1.0, 1.0));
        let tr = rk4_oracle(FlowSymbol::Q1, start, 1.0, 1e-3).unwrap();
        let tb = tr.blowup_time.unwrap();
        assert!((tb - 0.5).abs() < 1e-6, "{tb}");
    }

    #[test]
    fn backward_time_reverses() {
        let start = PhasePoint::One(PhasePoint1D::new(0.2, 0.1, 0.1));
        let fwd = rk4_oracle(FlowSymbol::P0, start, 1.5, 1e-3).unwrap();
        let back = rk4_oracle(FlowSymbol::P0, *fwd.last().unwrap(), -1.5, 1e-3).unwrap();
        let (a, b) = (start.coords(), back.last().unwrap().coords());
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        assert_eq!(*back.times.last().unwrap(), -1.5);
    }

    #[test]
    fn gyrator_conserves() {
        let start = PhasePoint::from_coords(&[0.3, -0.4, 0.5, 0.1], 1.0);
        let tr = rk4_oracle(FlowSymbol::Gyrator, start, 3.0, 1e-2).unwrap();
        assert!(tr.max_drift() < 1e-9);
    }
}
