//! Ten-point Lagrange interpolation on uniform axes.

use num_complex::Complex64;

use super::grid::{Axis, GridWavefunction};

const STENCIL: usize = 10;

/// Stencil start and Lagrange weights for `x`, or `None` outside the axis.
fn weights(axis: &Axis, x: f64) -> Option<(usize, [f64; STENCIL])> {
    let n = axis.n();
    let dx = axis.spacing();
    let u = (x - axis.point(0)) / dx;
    if !(u >= 0.0) || u > (n - 1) as f64 {
        return None;
    }
    let base = (u.floor() as isize - (STENCIL as isize / 2 - 1)).clamp(0, (n - STENCIL) as isize) as usize;
    let t = u - base as f64;
    let mut w = [0.0; STENCIL];
    for (k, wk) in w.iter_mut().enumerate() {
        let mut p = 1.0;
        for j in 0..STENCIL {
            if j != k {
                p *= (t - j as f64) / (k as f64 - j as f64);
            }
        }
        *wk = p;
    }
    Some((base, w))
}

/// Interpolated value of a 1D wavefunction; zero outside the grid.
pub fn interp_1d(f: &GridWavefunction, x: f64) -> Complex64 {
    let ax = f.grid().axis(0);
    match weights(ax, x) {
        None => Complex64::default(),
        Some((b, w)) => (0..STENCIL).map(|k| f.values()[b + k] * w[k]).sum(),
    }
}

/// Tensor-product interpolation of a 2D wavefunction; zero outside the grid.
pub fn interp_2d(f: &GridWavefunction, x: f64, y: f64) -> Complex64 {
    let g = f.grid();
    let ny = g.axis(1).n();
    let (Some((bx, wx)), Some((by, wy))) = (weights(g.axis(0), x), weights(g.axis(1), y)) else {
        return Complex64::default();
    };
    let vals = f.values();
    let mut s = Complex64::default();
    for i in 0..STENCIL {
        let row = (bx + i) * ny + by;
        let mut r = Complex64::default();
        for j in 0..STENCIL {
            r += vals[row + j] * wy[j];
        }
        s += r * wx[i];
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid;

    #[test]
    fn reproduces_low_degree_polynomials() {
        let g = Grid::new_1d(Axis::new(16, 2.0).unwrap(), 1.0);
        let p = |x: f64| 1.0 - x + 0.5 * x.powi(3) - 0.2 * x.powi(5) + 0.01 * x.powi(9);
        let f = GridWavefunction::from_fn_1d(g, |x| Complex64::new(p(x), 0.0)).unwrap();
        for x in [-2.0, -1.93, -0.01, 0.4, 1.7, 1.75] {
            assert!((interp_1d(&f, x).re - p(x)).abs() < 1e-12, "x={x}");
        }
        assert_eq!(interp_1d(&f, 3.0), Complex64::default());
    }

    #[test]
    fn smooth_2d_accuracy() {
        let g = Grid::new_2d(Axis::new(128, 8.0).unwrap(), Axis::new(128, 8.0).unwrap(), 1.0);
        let f = |x: f64, y: f64| Complex64::new((-(x * x + y * y) / 2.0).exp(), x * (-(x * x + y * y) / 2.0).exp());
        let w = GridWavefunction::from_fn_2d(g, f).unwrap();
        for (x, y) in [(0.03, -0.71), (1.234, 0.5), (-2.2, 2.9)] {
            let e = (interp_2d(&w, x, y) - f(x, y)).norm();
            assert!(e < 1e-9, "({x},{y}): {e:e}");
        }
    }
}
