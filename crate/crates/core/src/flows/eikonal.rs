//! Eikonal phase and leading amplitude for `p0`.
//!
//! `phi(t, x, xi)` solves `d_t phi + p0(x, d_x phi) = 0` with `phi(0) = x xi`.
//! It is evaluated along the characteristic leaving `(y, xi)`, with `y`
//! chosen so the characteristic lands on `x` at time `t`. The Jacobian
//! `J = dx(t)/dy` gives `a0 = J^{-1/2}` and `d_x d_xi phi = 1/J`.

use serde::{Deserialize, Serialize};

use super::p0;
use crate::error::{Error, Result};

/// Step used by the characteristic integrator unless overridden.
pub const DEFAULT_DT: f64 = 1e-3;
const SHOOT_TOL: f64 = 1e-10;
const CAUSTIC_TOL: f64 = 1e-8;

/// State of one characteristic at its end time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Characteristic {
    /// Start position.
    pub y: f64,
    /// Start momentum, the Fourier variable.
    pub xi0: f64,
    pub x: f64,
    pub xi: f64,
    /// `phi(t, x, xi0)`.
    pub phase: f64,
    /// `dx/dy`.
    pub jac: f64,
    /// `d xi / dy`.
    pub dxi_dy: f64,
}

// [x, xi, phi, dx/dy, dxi/dy]
fn field(s: &[f64; 5], h: f64, c0: f64) -> [f64; 5] {
    let [x, xi, _, jx, jxi] = *s;
    [x * xi, -1.5 * x * x - 0.5 * xi * xi + 1.5 * h, x * xi * xi - c0, xi * jx + x * jxi, -3.0 * x * jx - xi * jxi]
}

fn step(s: &[f64; 5], dt: f64, h: f64, c0: f64) -> [f64; 5] {
    let f = |s: &[f64; 5]| field(s, h, c0);
    let add = |a: &[f64; 5], b: &[f64; 5], w: f64| {
        let mut o = *a;
        for i in 0..5 {
            o[i] += w * b[i];
        }
        o
    };
    let k1 = f(s);
    let k2 = f(&add(s, &k1, 0.5 * dt));
    let k3 = f(&add(s, &k2, 0.5 * dt));
    let k4 = f(&add(s, &k3, dt));
    let mut o = *s;
    for i in 0..5 {
        o[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    o
}

/// Integrates the characteristic from `(y, xi0)` for time `t` (either sign)
/// with at most `dt` per RK4 step.
pub fn characteristic(y: f64, xi0: f64, t: f64, h: f64, dt: f64) -> Result<Characteristic> {
    if !(dt > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput("characteristic needs dt > 0 and finite t".into()));
    }
    let n = (t.abs() / dt).ceil().max(1.0) as usize;
    let sub = t / n as f64;
    let c0 = p0(y, xi0, h);
    let mut s = [y, xi0, y * xi0, 1.0, 0.0];
    for k in 0..n {
        s = step(&s, sub, h, c0);
        if !s.iter().all(|v| v.is_finite()) || s[0].abs() > 1e8 {
            return Err(Error::BlowUp { time: (k + 1) as f64 * sub });
        }
    }
    Ok(Characteristic { y, xi0, x: s[0], xi: s[1], phase: s[2], jac: s[3], dxi_dy: s[4] })
}

/// Finds the characteristic with start momentum `xi0` that reaches `x` at
/// time `t`, starting the Newton iteration from `guess`. Falls back to the
/// secant rule when a Newton step overshoots.
pub fn solve_characteristic(x: f64, xi0: f64, t: f64, h: f64, guess: f64, dt: f64) -> Result<Characteristic> {
    let scale = 1.0 + x.abs();
    let mut y = guess;
    let mut c = characteristic(y, xi0, t, h, dt)?;
    let mut prev: Option<(f64, f64)> = None;
    for _ in 0..60 {
        let r = c.x - x;
        if r.abs() <= SHOOT_TOL * scale {
            if c.jac.abs() < CAUSTIC_TOL {
                return Err(Error::Caustic { t, x });
            }
            return Ok(c);
        }
        let slope = match prev {
            Some((py, pr)) if c.jac.abs() < CAUSTIC_TOL && py != y => (r - pr) / (y - py),
            _ => c.jac,
        };
        if slope.abs() < CAUSTIC_TOL {
            return Err(Error::Caustic { t, x });
        }
        let mut dy = -r / slope;
        let limit = 0.5 * (1.0 + y.abs());
        if dy.abs() > limit {
            dy = limit * dy.signum();
        }
        prev = Some((y, r));
        y += dy;
        c = characteristic(y, xi0, t, h, dt)?;
    }
    Err(Error::NoSolution { t, x })
}

/// Phase, amplitude and mixed derivative at one `(t, x, xi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EikonalPhase {
    pub phi: f64,
    pub a0: f64,
    /// `d_x d_xi phi = 1/J`.
    pub mixed: f64,
    pub characteristic: Characteristic,
}

/// `phi(t, x, xi)` together with `a0` and the mixed derivative.
pub fn eikonal_phase(x: f64, xi: f64, t: f64, h: f64) -> Result<EikonalPhase> {
    // backward characteristic from (x, xi_t) is not available in closed form;
    // shoot from the identity map as the first guess
    let c = solve_characteristic(x, xi, t, h, x, DEFAULT_DT)?;
    if c.jac <= 0.0 {
        return Err(Error::Caustic { t, x });
    }
    Ok(EikonalPhase { phi: c.phase, a0: c.jac.powf(-0.5), mixed: 1.0 / c.jac, characteristic: c })
}

/// `a0(t, x, xi) = J^{-1/2}`.
pub fn amplitude_a0(x: f64, xi: f64, t: f64, h: f64) -> Result<f64> {
    Ok(eikonal_phase(x, xi, t, h)?.a0)
}

/// Central-difference `d_x d_xi phi` with step `d`, independent of the
/// variational equations.
pub fn mixed_derivative_fd(x: f64, xi: f64, t: f64, h: f64, d: f64) -> Result<f64> {
    let f = |a: f64, b: f64| eikonal_phase(a, b, t, h).map(|e| e.phi);
    Ok((f(x + d, xi + d)? - f(x + d, xi - d)? - f(x - d, xi + d)? + f(x - d, xi - d)?) / (4.0 * d * d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_is_identity_at_zero() {
        let e = eikonal_phase(0.3, -0.2, 0.0, 0.1).unwrap();
        assert!((e.phi - 0.3 * -0.2).abs() < 1e-14);
        assert_eq!(e.a0, 1.0);
    }

    #[test]
    fn mixed_derivative_matches_jacobian() {
        let (x, xi, t, h) = (0.25, 0.15, 0.6, 0.1);
        let e = eikonal_phase(x, xi, t, h).unwrap();
        let fd = mixed_derivative_fd(x, xi, t, h, 1e-4).unwrap();
        assert!((fd - e.mixed).abs() < 1e-5, "{fd} vs {}", e.mixed);
    }

    #[test]
    fn phase_solves_hamilton_jacobi() {
        let (x, xi, t, h) = (0.2, -0.1, 0.5, 0.1);
        let d = 1e-5;
        let phi = |a: f64, s: f64| eikonal_phase(a, xi, s, h).unwrap().phi;
        let dt = (phi(x, t + d) - phi(x, t - d)) / (2.0 * d);
        let dx = (phi(x + d, t) - phi(x - d, t)) / (2.0 * d);
        assert!((dt + p0(x, dx, h)).abs() < 1e-7);
    }

    #[test]
    fn landing_point_is_hit() {
        let c = solve_characteristic(0.4, 0.3, 1.0, 0.1, 0.0, 1e-3).unwrap();
        assert!((c.x - 0.4).abs() < 1e-10);
        let again = characteristic(c.y, 0.3, 1.0, 0.1, 1e-3).unwrap();
        assert!((again.x - 0.4).abs() < 1e-10);
    }
}
