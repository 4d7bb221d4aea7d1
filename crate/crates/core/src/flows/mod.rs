//! Hamilton flows of the symbols in the crate: closed forms built on the
//! Weierstrass function, the two exact linear flows, an RK4 oracle with
//! blow-up detection, and the eikonal phase and amplitude for `p0`.

mod eikonal;
mod linear;
mod oracle;
mod reduced;

use serde::{Deserialize, Serialize};

use crate::elliptic::EllipticData;
use crate::error::{Error, Result};

pub use eikonal::{
    amplitude_a0, characteristic, eikonal_phase, mixed_derivative_fd, solve_characteristic, Characteristic,
    EikonalPhase,
};
pub use linear::{flow_gyrator, flow_hyperbolic, gyrator_matrix, gyrator_phase, hyperbolic_matrix, warmup_phase};
pub use oracle::{rk4_oracle, FlowSymbol, FlowTrace, BLOWUP_RADIUS, DRIFT_TOL};
pub use reduced::{OrbitKind, AMBIGUITY_TOL};

use reduced::Reduced;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint1D {
    pub x: f64,
    pub xi: f64,
    pub h: f64,
}

impl PhasePoint1D {
    pub fn new(x: f64, xi: f64, h: f64) -> Self {
        PhasePoint1D { x, xi, h }
    }

    pub fn distance(&self, o: &PhasePoint1D) -> f64 {
        (self.x - o.x).hypot(self.xi - o.xi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint2D {
    pub x: f64,
    pub y: f64,
    pub xi: f64,
    pub eta: f64,
    pub h: f64,
}

impl PhasePoint2D {
    pub fn new(x: f64, y: f64, xi: f64, eta: f64, h: f64) -> Self {
        PhasePoint2D { x, y, xi, eta, h }
    }

    /// `(x, y, xi, eta)`.
    pub fn coords(&self) -> [f64; 4] {
        [self.x, self.y, self.xi, self.eta]
    }

    pub fn from_coords(c: [f64; 4], h: f64) -> Self {
        PhasePoint2D { x: c[0], y: c[1], xi: c[2], eta: c[3], h }
    }

    pub fn distance(&self, o: &PhasePoint2D) -> f64 {
        self.coords().iter().zip(o.coords()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// Either dimension, for traces and drivers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhasePoint {
    One(PhasePoint1D),
    Two(PhasePoint2D),
}

impl PhasePoint {
    pub fn h(&self) -> f64 {
        match self {
            PhasePoint::One(p) => p.h,
            PhasePoint::Two(p) => p.h,
        }
    }

    /// `(x, xi)` or `(x, y, xi, eta)`.
    pub fn coords(&self) -> Vec<f64> {
        match self {
            PhasePoint::One(p) => vec![p.x, p.xi],
            PhasePoint::Two(p) => p.coords().to_vec(),
        }
    }

    pub fn from_coords(c: &[f64], h: f64) -> Self {
        if c.len() == 2 {
            PhasePoint::One(PhasePoint1D::new(c[0], c[1], h))
        } else {
            PhasePoint::Two(PhasePoint2D::new(c[0], c[1], c[2], c[3], h))
        }
    }
}

fn check_h(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    Ok(())
}

/// `p0(x, xi; h) = x(x^2 + xi^2)/2 - 3hx/2`.
pub fn p0(x: f64, xi: f64, h: f64) -> f64 {
    0.5 * x * (x * x + xi * xi) - 1.5 * h * x
}

/// `p4(x, y, xi, eta; h) = x(x^2 + y^2 + xi^2 + eta^2)/2 - 5hx/2`.
pub fn p4(x: f64, y: f64, xi: f64, eta: f64, h: f64) -> f64 {
    0.5 * x * (x * x + y * y + xi * xi + eta * eta) - 2.5 * h * x
}

/// A classified `p0` orbit that can be evaluated at many times.
#[derive(Debug, Clone)]
pub struct P0Orbit {
    start: PhasePoint1D,
    inner: Reduced,
}

impl P0Orbit {
    pub fn new(p: PhasePoint1D) -> Result<Self> {
        check_h(p.h)?;
        Ok(P0Orbit { start: p, inner: Reduced::new(p.x, p.xi, -3.0 * p.h)? })
    }

    pub fn start(&self) -> PhasePoint1D {
        self.start
    }

    /// The conserved value `C0 = p0`.
    pub fn c0(&self) -> f64 {
        self.inner.c0()
    }

    pub fn kind(&self) -> OrbitKind {
        self.inner.kind()
    }

    pub fn elliptic_data(&self) -> Option<&EllipticData> {
        self.inner.elliptic_data()
    }

    /// Return time of a bounded loop.
    pub fn period(&self) -> Option<f64> {
        self.inner.period()
    }

    /// First blow-up time forward (`true`) or backward in time.
    pub fn blowup_time(&self, forward: bool) -> Option<f64> {
        self.inner.blowup_time(forward)
    }

    pub fn at(&self, t: f64) -> Result<PhasePoint1D> {
        let (x, xi) = self.inner.at(t)?;
        Ok(PhasePoint1D::new(x, xi, self.start.h))
    }
}

/// Closed-form Hamilton flow of `p0` from `p` for time `t`.
pub fn flow_p0(p: PhasePoint1D, t: f64) -> Result<PhasePoint1D> {
    P0Orbit::new(p)?.at(t)
}

/// A classified `p4` orbit. The `(x, xi)` pair follows the reduced cubic
/// flow with `b = C1^2 - 5h`; `(y, eta)` rotates by `int_0^t x(s) ds`.
#[derive(Debug, Clone)]
pub struct P4Orbit {
    start: PhasePoint2D,
    c1sq: f64,
    inner: Reduced,
}

impl P4Orbit {
    pub fn new(p: PhasePoint2D) -> Result<Self> {
        check_h(p.h)?;
        let c1sq = p.y * p.y + p.eta * p.eta;
        Ok(P4Orbit { start: p, c1sq, inner: Reduced::new(p.x, p.xi, c1sq - 5.0 * p.h)? })
    }

    pub fn c0(&self) -> f64 {
        self.inner.c0()
    }

    pub fn c1sq(&self) -> f64 {
        self.c1sq
    }

    pub fn kind(&self) -> OrbitKind {
        self.inner.kind()
    }

    pub fn elliptic_data(&self) -> Option<&EllipticData> {
        self.inner.elliptic_data()
    }

    pub fn period(&self) -> Option<f64> {
        self.inner.period()
    }

    pub fn blowup_time(&self, forward: bool) -> Option<f64> {
        self.inner.blowup_time(forward)
    }

    fn rotate(&self, x: f64, xi: f64, theta: f64) -> PhasePoint2D {
        let (s, c) = theta.sin_cos();
        let (y0, eta0) = (self.start.y, self.start.eta);
        PhasePoint2D::new(x, y0 * c + eta0 * s, xi, -y0 * s + eta0 * c, self.start.h)
    }

    pub fn at(&self, t: f64) -> Result<PhasePoint2D> {
        let (x, xi) = self.inner.at(t)?;
        let theta = self.inner.phase(t)?;
        Ok(self.rotate(x, xi, theta))
    }

    /// Samples at increasing `times` (starting anywhere), integrating the
    /// rotation angle piecewise.
    pub fn sample(&self, times: &[f64]) -> Result<Vec<PhasePoint2D>> {
        let mut out = Vec::with_capacity(times.len());
        let mut theta = 0.0;
        let mut last = 0.0;
        for &t in times {
            theta += self.inner.phase_between(last, t)?;
            last = t;
            let (x, xi) = self.inner.at(t)?;
            out.push(self.rotate(x, xi, theta));
        }
        Ok(out)
    }
}

/// Closed-form Hamilton flow of `p4` from `p` for time `t`.
pub fn flow_p4(p: PhasePoint2D, t: f64) -> Result<PhasePoint2D> {
    P4Orbit::new(p)?.at(t)
}

/// One sample of [`invariant_pocket_check`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PocketSample {
    pub x0: f64,
    pub c0: f64,
    pub period: f64,
    /// `|flow(p, period) - p|`.
    pub closure: f64,
    pub max_radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PocketReport {
    pub h: f64,
    pub samples: Vec<PocketSample>,
    /// Largest `sqrt(x^2 + xi^2)` seen on any loop.
    pub max_radius: f64,
    /// `sqrt(3h)`.
    pub pocket_radius: f64,
    pub all_closed: bool,
}

/// Loop closure tolerance used by [`invariant_pocket_check`].
pub const CLOSURE_TOL: f64 = 1e-6;

/// Follows loops through `(x0, 0)` with `sqrt(h) < x0 < sqrt(3h)` for one
/// period and records closure and the largest radius reached.
pub fn invariant_pocket_check(h: f64, samples: usize) -> Result<PocketReport> {
    check_h(h)?;
    if samples == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let (lo, hi) = (h.sqrt(), (3.0 * h).sqrt());
    let mut out = Vec::with_capacity(samples);
    for k in 1..=samples {
        let x0 = lo + (hi - lo) * k as f64 / (samples + 1) as f64;
        let start = PhasePoint1D::new(x0, 0.0, h);
        let orbit = P0Orbit::new(start)?;
        let period = orbit
            .period()
            .ok_or_else(|| Error::Consistency(format!("orbit through x0 = {x0} is not a bounded loop")))?;
        let mut max_radius: f64 = 0.0;
        for j in 0..=256 {
            let q = orbit.at(period * j as f64 / 256.0)?;
            max_radius = max_radius.max(q.x.hypot(q.xi));
        }
        let closure = orbit.at(period)?.distance(&start);
        out.push(PocketSample { x0, c0: orbit.c0(), period, closure, max_radius });
    }
    let max_radius = out.iter().map(|s| s.max_radius).fold(0.0, f64::max);
    let all_closed = out.iter().all(|s| s.closure < CLOSURE_TOL);
    Ok(PocketReport { h, samples: out, max_radius, pocket_radius: hi, all_closed })
}

/// `(t, x, xi)` samples of the `p0` level set `C0`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct LevelSet {
    /// Loop on the shifted line, one full period; present iff `0 < C0^2 < h^3`.
    pub bounded: Option<Vec<[f64; 3]>>,
    /// The unbounded branch on the real line, cut to `x^2 + xi^2 <= box^2`.
    pub unbounded: Vec<[f64; 3]>,
    /// The point the loop collapses to when `C0^2 = h^3`.
    pub collapsed: Option<[f64; 2]>,
}

impl LevelSet {
    pub fn components(&self) -> usize {
        self.bounded.is_some() as usize + (!self.unbounded.is_empty()) as usize
    }
}

/// Both components of `p0 = C0` for `C0 != 0`, parametrized by the
/// Weierstrass function on its two real lines.
pub fn p0_level_set(h: f64, c0: f64, samples: usize, radius: f64) -> Result<LevelSet> {
    use crate::elliptic::{Branch, Lattice};
    check_h(h)?;
    if c0 == 0.0 {
        return Err(Error::Domain("the C0 = 0 level set is the separatrix, not an elliptic curve".into()));
    }
    let samples = samples.max(8);
    let data = EllipticData::from_p0(h, c0)?;
    let point = |p: f64, dp: f64| {
        let den = p - 0.25 * h;
        (c0 / (2.0 * den), -dp / den)
    };
    let mut out = LevelSet::default();
    let h32 = h.powf(1.5);
    if (c0 * c0 - h * h * h).abs() <= 1e-12 * h * h * h {
        out.collapsed = Some([-c0.signum() * h.sqrt(), 0.0]);
    }
    if data.lattice == Lattice::Rectangular {
        let w = data.omega2;
        let mut loop_pts = Vec::with_capacity(samples + 1);
        for j in 0..=samples {
            let t = w * j as f64 / samples as f64;
            let (p, dp) = data.wp_real_line(t, Branch::Shifted)?;
            let (x, xi) = point(p, dp);
            loop_pts.push([t, x, xi]);
        }
        out.bounded = Some(loop_pts);
    }
    // the real line: one period between consecutive poles
    let w = if data.omega2.is_finite() { data.omega2 } else { 40.0 / h32.cbrt() };
    for j in 1..samples {
        let t = w * j as f64 / samples as f64;
        let Ok((p, dp)) = data.wp_real_line(t, Branch::Real) else { continue };
        let (x, xi) = point(p, dp);
        if x.hypot(xi) <= radius {
            out.unbounded.push([t, x, xi]);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
