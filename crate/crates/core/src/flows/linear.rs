//! The two quadratic flows with exact linear solutions: the hyperbolic
//! warm-up `xi*eta - x*y` and the gyrator `x*y + xi*eta`.

use super::PhasePoint2D;

/// Flow matrix of `xi*eta - x*y` acting on `(x, y, xi, eta)`.
pub fn hyperbolic_matrix(t: f64) -> [[f64; 4]; 4] {
    let (c, s) = (t.cosh(), t.sinh());
    [[c, 0.0, 0.0, s], [0.0, c, s, 0.0], [0.0, s, c, 0.0], [s, 0.0, 0.0, c]]
}

/// Flow matrix of `x*y + xi*eta` acting on `(x, y, xi, eta)`.
pub fn gyrator_matrix(t: f64) -> [[f64; 4]; 4] {
    let (s, c) = t.sin_cos();
    [[c, 0.0, 0.0, s], [0.0, c, s, 0.0], [0.0, -s, c, 0.0], [-s, 0.0, 0.0, c]]
}

fn apply(m: [[f64; 4]; 4], p: PhasePoint2D) -> PhasePoint2D {
    let v = p.coords();
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m.iter()) {
        *o = row.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
    }
    PhasePoint2D::from_coords(out, p.h)
}

pub fn flow_hyperbolic(p: PhasePoint2D, t: f64) -> PhasePoint2D {
    apply(hyperbolic_matrix(t), p)
}

pub fn flow_gyrator(p: PhasePoint2D, t: f64) -> PhasePoint2D {
    apply(gyrator_matrix(t), p)
}

/// Generating function `phi(x, y, xi, eta)` of the warm-up flow:
/// `(x*y - xi*eta) tanh t + (x*xi + y*eta) sech t`.
pub fn warmup_phase(t: f64, x: f64, y: f64, xi: f64, eta: f64) -> f64 {
    (x * y - xi * eta) * t.tanh() + (x * xi + y * eta) / t.cosh()
}

/// Generating function of the gyrator, defined for `cos t != 0`:
/// `(x*xi + y*eta) sec t - (x*y + xi*eta) tan t`.
pub fn gyrator_phase(t: f64, x: f64, y: f64, xi: f64, eta: f64) -> f64 {
    (x * xi + y * eta) / t.cos() - (x * y + xi * eta) * t.tan()
}
