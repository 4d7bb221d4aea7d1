//! Weierstrass `P` for real invariants.
//!
//! Evaluation reduces the argument to the fundamental cell, halves it until
//! a truncated Laurent series is accurate, and doubles back with the
//! duplication formula. Only `g2` and `g3` enter; no lattice sums are formed.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p0 = x(x^2 + xi^2)/2 - 3hx/2` gives `g2 = 3h^2/4`, `g3 = C0^2/4 - h^3/8`.
pub fn invariants_p0(h: f64, c0: f64) -> (f64, f64) {
    (0.75 * h * h, 0.25 * c0 * c0 - h * h * h / 8.0)
}

/// `p4` with `C1^2 = y^2 + eta^2` gives `g2 = (C1^2 - 5h)^2/12`,
/// `g3 = (C1^2 - 5h)^3/216 + C0^2/4`.
pub fn invariants_p4(h: f64, c0: f64, c1sq: f64) -> Result<(f64, f64)> {
    if c1sq < 0.0 {
        return Err(Error::InvalidInput(format!("C1^2 must be non-negative, got {c1sq}")));
    }
    let a = c1sq - 5.0 * h;
    Ok((a * a / 12.0, a * a * a / 216.0 + 0.25 * c0 * c0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RootCase {
    AllRealDistinct,
    Degenerate,
    ComplexPair,
}

/// Relative size of `|Delta|` below which the cubic is treated as degenerate.
pub const DEGENERATE_TOL: f64 = 1e-12;

pub fn discriminant(g2: f64, g3: f64) -> f64 {
    g2 * g2 * g2 - 27.0 * g3 * g3
}

pub fn classify(g2: f64, g3: f64) -> (f64, RootCase) {
    let d = discriminant(g2, g3);
    let scale = g2.abs().powi(3) + 27.0 * g3 * g3;
    let case = if d.abs() <= DEGENERATE_TOL * scale {
        RootCase::Degenerate
    } else if d > 0.0 {
        RootCase::AllRealDistinct
    } else {
        RootCase::ComplexPair
    };
    (d, case)
}

fn cubic(g2: f64, g3: f64, x: f64) -> f64 {
    4.0 * x * x * x - g2 * x - g3
}

fn newton_polish(g2: f64, g3: f64, x: f64) -> f64 {
    let d = 12.0 * x * x - g2;
    if d == 0.0 {
        return x;
    }
    let y = x - cubic(g2, g3, x) / d;
    if cubic(g2, g3, y).abs() <= cubic(g2, g3, x).abs() {
        y
    } else {
        x
    }
}

/// Roots of `4x^3 - g2 x - g3` ordered `e1 < e3 < e2`; needs `Delta > 0`.
pub fn cubic_roots(g2: f64, g3: f64) -> Result<(f64, f64, f64)> {
    let (d, case) = classify(g2, g3);
    if case != RootCase::AllRealDistinct {
        return Err(Error::Domain(format!("three distinct real roots need Delta > 0, got {d:e}")));
    }
    // x^3 + p x + q with p = -g2/4, q = -g3/4
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let r = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let mut e: Vec<f64> = (0..3).map(|k| newton_polish(g2, g3, r * (phi - 2.0 * PI * k as f64 / 3.0).cos())).collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok((e[0], e[1], e[2]))
}

/// The single real root when `Delta < 0`.
pub fn real_root(g2: f64, g3: f64) -> f64 {
    let p = -g2 / 4.0;
    let q = -g3 / 4.0;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let s = disc.max(0.0).sqrt();
    let x = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
    newton_polish(g2, g3, newton_polish(g2, g3, x))
}

const GL_ORDER: usize = 20;

fn gl_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(NonZeroUsize::new(GL_ORDER).unwrap()))
}

/// Composite Gauss-Legendre rule with `panels` equal panels on `[a, b]`.
pub(crate) fn composite(f: &dyn Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let rule = gl_rule();
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| {
            let lo = a + k as f64 * w;
            rule.integrate(lo, lo + w, f)
        })
        .sum()
}

/// Arithmetic-geometric mean of two nonnegative numbers.
pub(crate) fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    0.5 * (a + b)
}

/// Real period, and imaginary half-period (`Delta > 0`) or the imaginary part
/// of the second generator (`Delta < 0`). Uses
/// `int_0^inf ds / sqrt((A + s^2)(B + s^2)) = pi / (2 agm(sqrt A, sqrt B))`,
/// which stays accurate as the discriminant approaches zero.
fn period_integrals(g2: f64, g3: f64, case: RootCase) -> Result<(f64, f64)> {
    match case {
        RootCase::AllRealDistinct => {
            let (e1, e3, e2) = cubic_roots(g2, g3)?;
            let w2 = PI / agm((e2 - e1).sqrt(), (e2 - e3).sqrt());
            let w1 = PI / agm((e2 - e1).sqrt(), (e3 - e1).sqrt());
            Ok((w2, w1))
        }
        RootCase::ComplexPair => {
            // 4(x - e)((x - a)^2 + b^2) with a = -e/2
            let e = real_root(g2, g3);
            let a = -0.5 * e;
            let b2 = (e * e - g2 / 4.0) - a * a;
            let big_h = ((e - a).powi(2) + b2.max(0.0)).sqrt();
            let root_h = big_h.sqrt();
            let kp_r = (0.5 * (1.0 + (e - a) / big_h)).max(0.0).sqrt();
            let kp_i = (0.5 * (1.0 - (e - a) / big_h)).max(0.0).sqrt();
            let wr = PI / agm(root_h, root_h * kp_r);
            let wi = 0.5 * PI / agm(root_h, root_h * kp_i);
            Ok((wr, wi))
        }
        RootCase::Degenerate => Err(Error::Domain("degenerate cubic has an infinite period".into())),
    }
}

/// Periods `(omega1, omega2)` with `omega2` real and `omega1` on the positive
/// imaginary axis; needs `Delta > 0`.
pub fn periods(g2: f64, g3: f64) -> Result<(Complex64, f64)> {
    let (d, case) = classify(g2, g3);
    if case != RootCase::AllRealDistinct {
        return Err(Error::Domain(format!("rectangular periods need Delta > 0, got {d:e}")));
    }
    let (w2, w1) = period_integrals(g2, g3, case)?;
    Ok((Complex64::new(0.0, w1), w2))
}

/// Period structure behind an [`EllipticData`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Lattice {
    /// Generators `omega2` (real) and `omega1` (imaginary).
    Rectangular,
    /// Generators `omega2` (real) and `omega1 = omega2/2 + i w` for `Delta < 0`.
    Rhombic,
    /// `P = d + k^2 / sin^2(k z)`: real period `pi/k`, no second period.
    Trigonometric { k: f64, d: f64 },
    /// `P = d + k^2 / sinh^2(k z)`: imaginary period `i pi/k`.
    Hyperbolic { k: f64, d: f64 },
    /// `g2 = g3 = 0`, `P = 1/z^2`.
    Rational,
}

/// Invariants, discriminant, roots and periods of one Weierstrass function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticData {
    pub g2: f64,
    pub g3: f64,
    pub delta: f64,
    pub case: RootCase,
    /// `(e1, e3, e2)` with `e1 < e3 < e2` when `Delta > 0`. For `Delta < 0`
    /// all three hold the real root; in the degenerate case `e1 = e3` is the
    /// double root.
    pub roots: (f64, f64, f64),
    pub omega1: Complex64,
    pub omega2: f64,
    pub lattice: Lattice,
    laurent: Vec<f64>,
}

const LAURENT_TERMS: usize = 30;

fn laurent_coeffs(g2: f64, g3: f64) -> Vec<f64> {
    // P(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}
    let mut c = vec![0.0; LAURENT_TERMS + 2];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for k in 4..c.len() {
        let s: f64 = (2..=k - 2).map(|m| c[m] * c[k - m]).sum();
        c[k] = 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64) * s;
    }
    c
}

impl EllipticData {
    pub fn new(g2: f64, g3: f64) -> Result<Self> {
        if !g2.is_finite() || !g3.is_finite() {
            return Err(Error::InvalidInput("invariants must be finite".into()));
        }
        let (delta, case) = classify(g2, g3);
        let laurent = laurent_coeffs(g2, g3);
        let base = EllipticData {
            g2,
            g3,
            delta,
            case,
            roots: (0.0, 0.0, 0.0),
            omega1: Complex64::default(),
            omega2: f64::INFINITY,
            lattice: Lattice::Rational,
            laurent,
        };
        match case {
            RootCase::AllRealDistinct => {
                let roots = cubic_roots(g2, g3)?;
                let (w2, w1) = period_integrals(g2, g3, case)?;
                Ok(EllipticData {
                    roots,
                    omega1: Complex64::new(0.0, w1),
                    omega2: w2,
                    lattice: Lattice::Rectangular,
                    ..base
                })
            }
            RootCase::ComplexPair => {
                let e = real_root(g2, g3);
                let (wr, wi) = period_integrals(g2, g3, case)?;
                Ok(EllipticData {
                    roots: (e, e, e),
                    omega1: Complex64::new(0.5 * wr, wi),
                    omega2: wr,
                    lattice: Lattice::Rhombic,
                    ..base
                })
            }
            RootCase::Degenerate => {
                if g2 == 0.0 && g3 == 0.0 {
                    return Ok(base);
                }
                // double root d = -3 g3 / (2 g2), simple root -2d
                let d = if g2 != 0.0 { -1.5 * g3 / g2 } else { 0.0 };
                let e = -2.0 * d;
                if e > d {
                    let k = (e - d).sqrt();
                    Ok(EllipticData {
                        roots: (d, d, e),
                        omega1: Complex64::new(0.0, f64::INFINITY),
                        omega2: PI / k,
                        lattice: Lattice::Trigonometric { k, d },
                        ..base
                    })
                } else {
                    let k = (d - e).sqrt();
                    Ok(EllipticData {
                        roots: (e, d, d),
                        omega1: Complex64::new(0.0, PI / k),
                        omega2: f64::INFINITY,
                        lattice: Lattice::Hyperbolic { k, d },
                        ..base
                    })
                }
            }
        }
    }

    pub fn from_p0(h: f64, c0: f64) -> Result<Self> {
        let (g2, g3) = invariants_p0(h, c0);
        EllipticData::new(g2, g3)
    }

    pub fn from_p4(h: f64, c0: f64, c1sq: f64) -> Result<Self> {
        let (g2, g3) = invariants_p4(h, c0, c1sq)?;
        EllipticData::new(g2, g3)
    }

    /// Length scale for the pole threshold: the real period, or the finite one.
    fn scale(&self) -> f64 {
        if self.omega2.is_finite() {
            self.omega2
        } else if self.omega1.im.is_finite() && self.omega1.im > 0.0 {
            self.omega1.im
        } else {
            1.0
        }
    }

    /// Reduces `z` modulo the lattice to the cell centred at the origin.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let wrap = |x: f64, p: f64| if p.is_finite() { x - p * (x / p).round() } else { x };
        match self.lattice {
            Lattice::Rectangular => Complex64::new(wrap(z.re, self.omega2), wrap(z.im, self.omega1.im)),
            Lattice::Rhombic => {
                let w1 = self.omega1;
                let b = (z.im / w1.im).round();
                let z1 = z - b * w1;
                let z1 = Complex64::new(wrap(z1.re, self.omega2), z1.im);
                // the rhombic cell: also compare with the neighbours across the slanted edges
                [z1, z1 - w1, z1 + w1, z1 - w1 + self.omega2, z1 + w1 - self.omega2]
                    .into_iter()
                    .min_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                    .unwrap()
            }
            Lattice::Trigonometric { .. } => Complex64::new(wrap(z.re, self.omega2), z.im),
            Lattice::Hyperbolic { .. } => Complex64::new(z.re, wrap(z.im, self.omega1.im)),
            Lattice::Rational => z,
        }
    }

    fn series(&self, z: Complex64) -> (Complex64, Complex64) {
        let z2 = z * z;
        let mut p = Complex64::default();
        let mut dp = Complex64::default();
        let mut pow = Complex64::new(1.0, 0.0); // z^{2k-4}
        for k in 2..self.laurent.len() {
            let c = self.laurent[k];
            // z^{2k-2} and (2k-2) z^{2k-3}
            p += c * pow * z2;
            dp += c * (2 * k - 2) as f64 * pow * z;
            pow *= z2;
        }
        (1.0 / z2 + p, -2.0 / (z2 * z) + dp)
    }

    /// `(P(z), P'(z))`.
    pub fn wp_both(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let zr = self.reduce(z);
        let dist = zr.norm();
        if dist < 1e-6 * self.scale() {
            return Err(Error::PoleProximity { distance: dist });
        }
        match self.lattice {
            Lattice::Trigonometric { k, d } => {
                let s = (k * zr).sin();
                let c = (k * zr).cos();
                return Ok((d + k * k / (s * s), -2.0 * k * k * k * c / (s * s * s)));
            }
            Lattice::Hyperbolic { k, d } => {
                let s = (k * zr).sinh();
                let c = (k * zr).cosh();
                return Ok((d + k * k / (s * s), -2.0 * k * k * k * c / (s * s * s)));
            }
            Lattice::Rational => return Ok((1.0 / (zr * zr), -2.0 / (zr * zr * zr))),
            _ => {}
        }
        let w1 = if self.lattice == Lattice::Rhombic {
            // shortest non-real lattice vector
            self.omega1.norm().min((self.omega1 - self.omega2).norm())
        } else {
            self.omega1.im
        };
        let radius = 0.25 * w1.min(self.omega2);
        let mut zz = zr;
        let mut halvings = 0;
        while zz.norm() > radius {
            zz *= 0.5;
            halvings += 1;
        }
        let (mut p, mut dp) = self.series(zz);
        for _ in 0..halvings {
            let p2 = 6.0 * p * p - 0.5 * self.g2;
            let np = -2.0 * p + (p2 / (2.0 * dp)).powi(2);
            let ndp = -dp + p2 * (12.0 * p * dp * dp - p2 * p2) / (4.0 * dp * dp * dp);
            p = np;
            dp = ndp;
        }
        Ok((p, dp))
    }

    pub fn wp(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.wp_both(z)?.0)
    }

    pub fn wp_prime(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.wp_both(z)?.1)
    }

    /// `(P, P')` at `t` (`Real`) or `t + omega1/2` (`Shifted`), checked to be real.
    pub fn wp_real_line(&self, t: f64, branch: Branch) -> Result<(f64, f64)> {
        let z = match branch {
            Branch::Real => Complex64::new(t, 0.0),
            Branch::Shifted => {
                if self.lattice != Lattice::Rectangular {
                    return Err(Error::Domain("the shifted real line needs Delta > 0".into()));
                }
                Complex64::new(t, 0.5 * self.omega1.im)
            }
        };
        let (p, dp) = self.wp_both(z)?;
        let tol = |v: Complex64| 1e-9 * v.re.abs().max(1.0);
        if p.im.abs() > tol(p) || dp.im.abs() > tol(dp) {
            return Err(Error::Consistency(format!(
                "imaginary residue {:e} / {:e} on the {branch:?} line at t = {t}",
                p.im, dp.im
            )));
        }
        Ok((p.re, dp.re))
    }
}

/// Lines on which `P` is real for a rectangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    /// `z = t`, where `P >= e2` between poles.
    Real,
    /// `z = t + omega1/2`, where `e1 <= P <= e3`.
    Shifted,
}
