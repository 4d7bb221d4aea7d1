//! Hermite-Gaussian mode algebra.
//!
//! The cubic generators act tridiagonally on the `|m,n>` basis with the
//! real couplings [`beta`]. Vectors are finite sparse maps so the banded
//! action never touches more than the occupied indices and their neighbours.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Checked, Error, Result, Warning};
use crate::fields::{Grid, GridWavefunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ModeIndex {
    pub m: usize,
    pub n: usize,
}

impl ModeIndex {
    pub const fn new(m: usize, n: usize) -> Self {
        ModeIndex { m, n }
    }
}

/// Coupling `beta_m^n = sqrt(m+1) (1 - m - n) / 2`.
pub fn beta(m: usize, n: usize) -> f64 {
    0.5 * ((m + 1) as f64).sqrt() * (1.0 - m as f64 - n as f64)
}

/// Finite linear combination of `|m,n>` modes.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeVector {
    coeffs: BTreeMap<ModeIndex, Complex64>,
}

impl ModeVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(m: usize, n: usize) -> Self {
        let mut v = Self::zero();
        v.set(ModeIndex::new(m, n), Complex64::new(1.0, 0.0));
        v
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (ModeIndex, Complex64)>,
    {
        let mut v = Self::zero();
        for (k, c) in pairs {
            v.add_to(k, c);
        }
        v
    }

    pub fn get(&self, idx: ModeIndex) -> Complex64 {
        self.coeffs.get(&idx).copied().unwrap_or_default()
    }

    pub fn set(&mut self, idx: ModeIndex, c: Complex64) {
        if c == Complex64::default() {
            self.coeffs.remove(&idx);
        } else {
            self.coeffs.insert(idx, c);
        }
    }

    pub fn add_to(&mut self, idx: ModeIndex, c: Complex64) {
        let e = self.coeffs.entry(idx).or_default();
        *e += c;
        if *e == Complex64::default() {
            self.coeffs.remove(&idx);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ModeIndex, Complex64)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, *c))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self, other>`, antilinear in `self`.
    pub fn inner(&self, other: &ModeVector) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c.conj() * other.get(*k)).sum()
    }

    pub fn scale(&self, s: Complex64) -> ModeVector {
        ModeVector::from_pairs(self.iter().map(|(k, c)| (k, c * s)))
    }

    /// Largest `m` and `n` with a stored coefficient.
    pub fn max_indices(&self) -> (usize, usize) {
        self.coeffs.keys().fold((0, 0), |(a, b), k| (a.max(k.m), b.max(k.n)))
    }

    /// Drops coefficients with modulus at most `tol`.
    pub fn pruned(&self, tol: f64) -> ModeVector {
        ModeVector::from_pairs(self.iter().filter(|(_, c)| c.norm() > tol))
    }
}

impl Add for &ModeVector {
    type Output = ModeVector;
    fn add(self, rhs: &ModeVector) -> ModeVector {
        let mut out = self.clone();
        for (k, c) in rhs.iter() {
            out.add_to(k, c);
        }
        out
    }
}

impl Sub for &ModeVector {
    type Output = ModeVector;
    fn sub(self, rhs: &ModeVector) -> ModeVector {
        let mut out = self.clone();
        for (k, c) in rhs.iter() {
            out.add_to(k, -c);
        }
        out
    }
}

impl Mul<Complex64> for &ModeVector {
    type Output = ModeVector;
    fn mul(self, rhs: Complex64) -> ModeVector {
        self.scale(rhs)
    }
}

fn scatter(v: &ModeVector, up: impl Fn(ModeIndex) -> Complex64, down: impl Fn(ModeIndex) -> Complex64) -> ModeVector {
    let mut out = ModeVector::zero();
    for (k, c) in v.iter() {
        out.add_to(ModeIndex::new(k.m + 1, k.n), c * up(k));
        if k.m > 0 {
            out.add_to(ModeIndex::new(k.m - 1, k.n), c * down(k));
        }
    }
    out
}

/// `T4 psi_m = beta_m psi_{m+1} + beta_{m-1} psi_{m-1}` on every `n` band.
pub fn apply_t4(v: &ModeVector) -> ModeVector {
    scatter(v, |k| beta(k.m, k.n).into(), |k| beta(k.m - 1, k.n).into())
}

/// `T5 psi_m = -i (beta_m psi_{m+1} - beta_{m-1} psi_{m-1})`, the Fourier
/// conjugate of `T4`.
pub fn apply_t5(v: &ModeVector) -> ModeVector {
    let mi = Complex64::new(0.0, -1.0);
    scatter(v, |k| mi * beta(k.m, k.n), |k| -mi * beta(k.m - 1, k.n))
}

/// The one-dimensional generator `T0 = (a + a' - a'a'a - a'aa)/2` acting on the
/// `x` index, i.e. the `n = 0` couplings applied on every band.
pub fn apply_t0_1d(v: &ModeVector) -> ModeVector {
    scatter(v, |k| beta(k.m, 0).into(), |k| beta(k.m - 1, 0).into())
}

/// Diagonal member of the second triad, `(T3 + sqrt(3) T8)/2 = N_x + N_y/2 - 1/2`.
pub fn apply_t38(v: &ModeVector) -> ModeVector {
    ModeVector::from_pairs(v.iter().map(|(k, c)| (k, c * t38_eigenvalue(k))))
}

pub fn t38_eigenvalue(k: ModeIndex) -> f64 {
    k.m as f64 + 0.5 * k.n as f64 - 0.5
}

/// Orthogonal projection onto the `n`-th `y` mode.
pub fn project_n(v: &ModeVector, n: usize) -> ModeVector {
    ModeVector::from_pairs(v.iter().filter(|(k, _)| k.n == n))
}

/// Normalized semiclassical Hermite functions `psi_0..=psi_mmax` at `x`.
///
/// Uses `phi_{m+1} = sqrt(2/(m+1)) s phi_m - sqrt(m/(m+1)) phi_{m-1}` with
/// `s = x/sqrt(h)`, which is stable for large `m`.
pub fn hermite_functions(mmax: usize, h: f64, x: f64) -> Vec<f64> {
    let s = x / h.sqrt();
    let mut out = Vec::with_capacity(mmax + 1);
    let p0 = (PI * h).powf(-0.25) * (-0.5 * s * s).exp();
    out.push(p0);
    if mmax == 0 {
        return out;
    }
    out.push(2f64.sqrt() * s * p0);
    for m in 1..mmax {
        let mf = m as f64;
        let next = (2.0 / (mf + 1.0)).sqrt() * s * out[m] - (mf / (mf + 1.0)).sqrt() * out[m - 1];
        out.push(next);
    }
    out
}

pub fn hermite_function(m: usize, h: f64, x: f64) -> f64 {
    hermite_functions(m, h, x)[m]
}

/// Samples `|m,n>` on `grid`. On a one-dimensional grid only `m` is used and
/// `n` must be zero.
pub fn mode_eval(idx: ModeIndex, h: f64, grid: &Grid) -> Result<Checked<GridWavefunction>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    let mut warnings = Vec::new();
    let limit = h.sqrt() / 4.0;
    for ax in grid.axes() {
        if ax.spacing() > limit {
            warnings.push(Warning::GridUnderresolved { spacing: ax.spacing(), limit });
        }
    }
    let values = match grid.dims() {
        1 => {
            if idx.n != 0 {
                return Err(Error::InvalidInput(format!(
                    "mode ({}, {}) has a y index but the grid is one-dimensional",
                    idx.m, idx.n
                )));
            }
            grid.axis(0).points().map(|x| Complex64::new(hermite_function(idx.m, h, x), 0.0)).collect()
        }
        _ => {
            let fx: Vec<f64> = grid.axis(0).points().map(|x| hermite_function(idx.m, h, x)).collect();
            let fy: Vec<f64> = grid.axis(1).points().map(|y| hermite_function(idx.n, h, y)).collect();
            let mut vals = Vec::with_capacity(fx.len() * fy.len());
            for a in &fx {
                for b in &fy {
                    vals.push(Complex64::new(a * b, 0.0));
                }
            }
            vals
        }
    };
    let grid = grid.with_h(h);
    Ok(Checked::with(GridWavefunction::new(grid, values)?, warnings))
}

/// Samples a finite mode superposition on `grid`.
pub fn mode_vector_eval(v: &ModeVector, h: f64, grid: &Grid) -> Result<GridWavefunction> {
    let grid = grid.with_h(h);
    let mut out = GridWavefunction::zeros(grid.clone());
    for (k, c) in v.iter() {
        let f = mode_eval(k, h, &grid)?.value;
        out.axpy(c, &f)?;
    }
    Ok(out)
}

/// Coefficients `<k|f>` for every `k` with `k.m <= mmax`, `k.n <= nmax`.
pub fn mode_project(f: &GridWavefunction, mmax: usize, nmax: usize) -> Result<ModeVector> {
    let grid = f.grid();
    let h = grid.h();
    let mut out = ModeVector::zero();
    let nmax = if grid.dims() == 1 { 0 } else { nmax };
    for m in 0..=mmax {
        for n in 0..=nmax {
            let k = ModeIndex::new(m, n);
            let psi = mode_eval(k, h, grid)?.value;
            out.set(k, psi.inner(f)?);
        }
    }
    Ok(out)
}
