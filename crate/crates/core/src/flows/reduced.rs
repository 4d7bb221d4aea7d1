//! Orbits of the reduced cubic symbol `q = x(x^2 + xi^2 + b)/2`.
//!
//! Both `p0` (`b = -3h`) and `p4` at fixed `C1^2 = y^2 + eta^2`
//! (`b = C1^2 - 5h`) reduce to this system:
//! `x' = x xi`, `xi' = -x^2 - (x^2 + xi^2 + b)/2`.
//! For `C0 = q != 0`, `w = 1/x` satisfies a Weierstrass equation and
//! `x(t) = C0 / (2 (P(t + t0) + b/12))`.

use serde::{Deserialize, Serialize};

use crate::elliptic::{composite, Branch, EllipticData, Lattice};
use crate::error::{Error, Result};

/// Relative size of `C0` below which an orbit with `x != 0` is too close
/// to the separatrix to classify.
pub const AMBIGUITY_TOL: f64 = 1e-10;

/// Which closed form an orbit follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitKind {
    Stationary,
    /// `x == 0`, `xi` follows `tanh` or `coth`.
    AxisHyperbolic,
    /// `x == 0`, `xi` follows `tan`.
    AxisTrigonometric,
    /// `x == 0`, `xi = 2/(t + t0)`.
    AxisRational,
    /// `C0 = 0`, `x != 0`: the `sech`/`tanh` orbit.
    Separatrix,
    /// `C0 != 0` on the shifted real line of `P`.
    Bounded,
    /// `C0 != 0` on the real line of `P`.
    Unbounded,
}

#[derive(Debug, Clone)]
enum Kind {
    Fixed { x: f64, xi: f64 },
    AxisHyp { k: f64, q: f64 },
    AxisTrig { k: f64, alpha: f64 },
    AxisRational { xi0: f64 },
    Separatrix { sign: f64, k: f64, u0: f64 },
    Elliptic { data: Box<EllipticData>, branch: Branch, s0: f64 },
}

#[derive(Debug, Clone)]
pub(crate) struct Reduced {
    b: f64,
    c0: f64,
    kind: Kind,
}

fn gd(u: f64) -> f64 {
    u.sinh().atan()
}

impl Reduced {
    pub fn new(x0: f64, xi0: f64, b: f64) -> Result<Self> {
        if !x0.is_finite() || !xi0.is_finite() || !b.is_finite() {
            return Err(Error::InvalidInput("phase point must be finite".into()));
        }
        let c0 = 0.5 * x0 * (x0 * x0 + xi0 * xi0 + b);
        let scale = x0.abs().max(xi0.abs()).max(b.abs().sqrt());
        let xdot = x0 * xi0;
        let xidot = -x0 * x0 - 0.5 * (x0 * x0 + xi0 * xi0 + b);
        let kind = if xdot.hypot(xidot) <= 1e-13 * scale * scale {
            Kind::Fixed { x: x0, xi: xi0 }
        } else if x0 == 0.0 {
            if b < 0.0 {
                let k = (-b).sqrt();
                Kind::AxisHyp { k, q: xi0 / k }
            } else if b > 0.0 {
                let k = b.sqrt();
                Kind::AxisTrig { k, alpha: (-xi0 / k).atan() }
            } else {
                Kind::AxisRational { xi0 }
            }
        } else if c0.abs() <= 4.0 * f64::EPSILON * scale.powi(3) {
            if b >= 0.0 {
                return Err(Error::Consistency(format!("C0 = 0 with x != 0 needs b < 0, got b = {b}")));
            }
            let k = (-b).sqrt();
            let r = x0.hypot(xi0);
            let u0 = (-xi0 / r).clamp(-1.0 + 1e-16, 1.0 - 1e-16).atanh();
            Kind::Separatrix { sign: x0.signum(), k, u0 }
        } else if c0.abs() < AMBIGUITY_TOL * scale.powi(3) {
            return Err(Error::ClassificationAmbiguity { c0 });
        } else {
            Self::elliptic(x0, xi0, b, c0)?
        };
        Ok(Reduced { b, c0, kind })
    }

    fn elliptic(x0: f64, xi0: f64, b: f64, c0: f64) -> Result<Kind> {
        let g2 = b * b / 12.0;
        let g3 = b * b * b / 216.0 + 0.25 * c0 * c0;
        let data = EllipticData::new(g2, g3)?;
        let shift = -b / 12.0;
        let target = shift + c0 / (2.0 * x0);
        let dtarget = -xi0 * c0 / (2.0 * x0);
        let branch = match data.lattice {
            Lattice::Rectangular => {
                let (_, e3, e2) = data.roots;
                if target <= 0.5 * (e3 + e2) {
                    Branch::Shifted
                } else {
                    Branch::Real
                }
            }
            Lattice::Trigonometric { k, d } => {
                if target < d + 0.5 * k * k {
                    // the loop has shrunk onto the centre
                    return Ok(Kind::Fixed { x: x0, xi: xi0 });
                }
                Branch::Real
            }
            Lattice::Hyperbolic { d, .. } if target < d => {
                return Err(Error::Consistency("bounded orbit on a degenerate hyperbolic lattice".into()));
            }
            _ => Branch::Real,
        };
        let s = fit_shift(&data, branch, target)?;
        // P' < 0 on (0, w2/2) of the real line and > 0 on the shifted line
        let s = match branch {
            Branch::Real if dtarget > 0.0 => -s,
            Branch::Shifted if dtarget < 0.0 => -s,
            _ => s,
        };
        let s0 = polish(&data, branch, s, target, dtarget);
        Ok(Kind::Elliptic { data: Box::new(data), branch, s0 })
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn kind(&self) -> OrbitKind {
        match &self.kind {
            Kind::Fixed { .. } => OrbitKind::Stationary,
            Kind::AxisHyp { .. } => OrbitKind::AxisHyperbolic,
            Kind::AxisTrig { .. } => OrbitKind::AxisTrigonometric,
            Kind::AxisRational { .. } => OrbitKind::AxisRational,
            Kind::Separatrix { .. } => OrbitKind::Separatrix,
            Kind::Elliptic { branch: Branch::Shifted, .. } => OrbitKind::Bounded,
            Kind::Elliptic { .. } => OrbitKind::Unbounded,
        }
    }

    pub fn elliptic_data(&self) -> Option<&EllipticData> {
        match &self.kind {
            Kind::Elliptic { data, .. } => Some(data),
            _ => None,
        }
    }

    /// Time of return for bounded loops.
    pub fn period(&self) -> Option<f64> {
        match &self.kind {
            Kind::Elliptic { data, branch: Branch::Shifted, .. } => Some(data.omega2),
            _ => None,
        }
    }

    /// First blow-up time in the direction of `sign(t)`, if any.
    pub fn blowup_time(&self, forward: bool) -> Option<f64> {
        let pick = |t: f64| if (t > 0.0) == forward { Some(t) } else { None };
        match &self.kind {
            Kind::AxisHyp { k, q } if q.abs() > 1.0 => pick(2.0 / k * (-1.0 / q).atanh()),
            Kind::AxisTrig { k, alpha } => {
                let half = std::f64::consts::FRAC_PI_2;
                Some(if forward { (half - alpha) * 2.0 / k } else { (-half - alpha) * 2.0 / k })
            }
            Kind::AxisRational { xi0 } if *xi0 != 0.0 => pick(-2.0 / xi0),
            Kind::Elliptic { data, branch: Branch::Real, s0 } => {
                let w = data.omega2;
                if w.is_finite() {
                    let j = if forward { (s0 / w).floor() + 1.0 } else { (s0 / w).ceil() - 1.0 };
                    Some(j * w - s0)
                } else {
                    pick(-s0)
                }
            }
            _ => None,
        }
    }

    fn check_blowup(&self, t: f64) -> Result<()> {
        if t == 0.0 {
            return Ok(());
        }
        if let Some(tb) = self.blowup_time(t > 0.0) {
            if t.abs() >= tb.abs() {
                return Err(Error::BlowUp { time: tb });
            }
        }
        Ok(())
    }

    /// `(x, xi)` at time `t`.
    pub fn at(&self, t: f64) -> Result<(f64, f64)> {
        self.check_blowup(t)?;
        Ok(match &self.kind {
            Kind::Fixed { x, xi } => (*x, *xi),
            Kind::AxisHyp { k, q } => {
                let th = (0.5 * k * t).tanh();
                (0.0, k * (q + th) / (1.0 + q * th))
            }
            Kind::AxisTrig { k, alpha } => (0.0, -k * (alpha + 0.5 * k * t).tan()),
            Kind::AxisRational { xi0 } => (0.0, xi0 / (1.0 + 0.5 * xi0 * t)),
            Kind::Separatrix { sign, k, u0 } => {
                let u = k * t + u0;
                (sign * k / u.cosh(), -k * u.tanh())
            }
            Kind::Elliptic { data, branch, s0 } => {
                let (p, dp) = match data.wp_real_line(s0 + t, *branch) {
                    Err(Error::PoleProximity { .. }) => {
                        let tb = self.blowup_time(t > 0.0).unwrap_or(t);
                        return Err(Error::BlowUp { time: tb });
                    }
                    r => r?,
                };
                let den = p + self.b / 12.0;
                (self.c0 / (2.0 * den), -dp / den)
            }
        })
    }

    /// `int_0^t x(s) ds`, the rotation angle of the `(y, eta)` pair.
    pub fn phase(&self, t: f64) -> Result<f64> {
        self.phase_between(0.0, t)
    }

    pub fn phase_between(&self, t1: f64, t2: f64) -> Result<f64> {
        self.check_blowup(t1)?;
        self.check_blowup(t2)?;
        Ok(match &self.kind {
            Kind::Fixed { x, .. } => x * (t2 - t1),
            Kind::Separatrix { sign, k, u0 } => sign * (gd(k * t2 + u0) - gd(k * t1 + u0)),
            Kind::Elliptic { data, .. } => {
                if t1 == t2 {
                    return Ok(0.0);
                }
                let period =
                    if data.omega2.is_finite() { data.omega2 } else { 1.0 / data.g2.abs().powf(0.25).max(1e-300) };
                let mut panels = ((t2 - t1).abs() * 16.0 / period).ceil().max(2.0) as usize;
                let f = |s: f64| self.at(s).map(|p| p.0).unwrap_or(f64::NAN);
                let mut prev = composite(&f, t1, t2, panels);
                loop {
                    panels *= 2;
                    let next = composite(&f, t1, t2, panels);
                    if !next.is_finite() {
                        return Err(Error::NonConvergence("phase quadrature hit a non-finite sample".into()));
                    }
                    if (next - prev).abs() <= 1e-13 * (1.0 + next.abs()) {
                        break next;
                    }
                    if panels > 1 << 16 {
                        return Err(Error::NonConvergence("phase quadrature did not settle".into()));
                    }
                    prev = next;
                }
            }
            _ => 0.0,
        })
    }
}

/// `s in [0, w2/2]` on `branch` with `P = target`, on the half where `P' <= 0`
/// (real line) or `P' >= 0` (shifted line).
fn fit_shift(data: &EllipticData, branch: Branch, target: f64) -> Result<f64> {
    match data.lattice {
        Lattice::Trigonometric { k, d } => return Ok((k / (target - d).sqrt()).min(1.0).asin() / k),
        Lattice::Hyperbolic { k, d } => return Ok((k / (target - d).sqrt()).asinh() / k),
        _ => {}
    }
    let half = 0.5 * data.omega2;
    let wp = |s: f64| data.wp_real_line(s, branch).map(|v| v.0);
    let (mut lo, mut hi) = match branch {
        Branch::Real => {
            let lo = 2e-6 * data.omega2;
            if wp(lo)? < target {
                // deep inside the pole: invert the leading Laurent terms
                let s = 1.0 / target.sqrt();
                return Ok(s);
            }
            (lo, half)
        }
        Branch::Shifted => (0.0, half),
    };
    // P decreasing on the real half-period, increasing on the shifted one
    let decreasing = branch == Branch::Real;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let above = wp(mid)? > target;
        if above == decreasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gauss-Newton on `(P(s) - target, P'(s) - dtarget)` so that the fit stays
/// well conditioned near turning points where `P'` vanishes.
fn polish(data: &EllipticData, branch: Branch, mut s: f64, target: f64, dtarget: f64) -> f64 {
    let w1 = 1.0 / (target.abs() + data.g2.abs().sqrt() + 1e-300).powi(2);
    let w2 = 1.0
        / (dtarget.abs() + (4.0 * target.abs().powi(3) + data.g2.abs() * target.abs() + data.g3.abs()).sqrt() + 1e-300)
            .powi(2);
    for _ in 0..4 {
        let Ok((p, dp)) = data.wp_real_line(s, branch) else { break };
        let ddp = 6.0 * p * p - 0.5 * data.g2;
        let (r1, r2) = (p - target, dp - dtarget);
        let den = dp * dp * w1 + ddp * ddp * w2;
        if den == 0.0 {
            break;
        }
        let step = (r1 * dp * w1 + r2 * ddp * w2) / den;
        if !step.is_finite() || step.abs() > 0.01 * data.omega2.min(1.0) {
            break;
        }
        s -= step;
    }
    s
}
