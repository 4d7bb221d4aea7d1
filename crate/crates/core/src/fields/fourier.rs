use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use super::grid::{Axis, Grid, GridWavefunction};
use crate::error::{Checked, Error, Result, Warning};

/// Fraction of each axis treated as the boundary or Nyquist shell.
const SHELL: f64 = 1.0 / 32.0;
const SHELL_TOL: f64 = 1e-10;

/// In-place FFT along `axis` of a row-major array with the given shape.
pub(crate) fn fft_axis(data: &mut [Complex64], shape: &[usize], axis: usize, dir: FftDirection) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let fft = FftPlanner::new().plan_fft(n, dir);
    let mut buf = vec![Complex64::default(); n];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * n * stride + s;
            for k in 0..n {
                buf[k] = data[base + k * stride];
            }
            fft.process(&mut buf);
            for k in 0..n {
                data[base + k * stride] = buf[k];
            }
        }
    }
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Centred transform `out_k = scale * sum_j in_j exp(-+ i x_j w_k)` along one
/// axis, where both `x` and `w` grids are symmetric and `x_j w_k` has the
/// reciprocal product `dx dw = 2 pi / n`.
pub(crate) fn centred_axis(data: &mut [Complex64], shape: &[usize], axis: usize, dir: FftDirection, scale: f64) {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let half = n / 2;
    for (i, v) in data.iter_mut().enumerate() {
        let j = (i / stride) % n;
        *v *= sign(j);
    }
    fft_axis(data, shape, axis, dir);
    for (i, v) in data.iter_mut().enumerate() {
        let k = (i / stride) % n;
        *v *= scale * sign(k + n - half);
    }
}

/// Semiclassical Fourier transform `v^(xi) = int exp(-i x xi / h) v(x) dx`.
///
/// The result lives on [`Grid::dual`], ordered from the most negative frequency.
pub fn sft(f: &GridWavefunction) -> Checked<GridWavefunction> {
    let mut warnings = Vec::new();
    let edge = f.edge_fraction(SHELL);
    if edge > SHELL_TOL {
        warnings.push(Warning::Periodization { edge_mass: edge });
    }
    let grid = f.grid();
    let shape = grid.shape();
    let mut data = f.values().to_vec();
    for ax in 0..grid.dims() {
        centred_axis(&mut data, &shape, ax, FftDirection::Forward, grid.axis(ax).spacing());
    }
    let out = GridWavefunction::new(grid.dual(), data).expect("transform keeps shape");
    let shell = out.edge_fraction(SHELL);
    if shell > SHELL_TOL {
        warnings.push(Warning::Aliasing { shell_mass: shell });
    }
    Checked::with(out, warnings)
}

/// Inverse of [`sft`]: `v(x) = (2 pi h)^{-d} int exp(i x xi / h) v^(xi) dxi`.
///
/// `space` is the position grid the transform came from.
pub fn isft(fhat: &GridWavefunction, space: &Grid) -> Result<GridWavefunction> {
    if space.dual().axes() != fhat.grid().axes() {
        return Err(Error::InvalidInput("frequency grid is not dual to the target grid".into()));
    }
    let h = space.h();
    let shape = space.shape();
    let mut data = fhat.values().to_vec();
    for ax in 0..space.dims() {
        let dxi = fhat.grid().axis(ax).spacing();
        centred_axis(&mut data, &shape, ax, FftDirection::Inverse, dxi / (2.0 * PI * h));
    }
    GridWavefunction::new(space.clone(), data)
}

/// Renormalized partial transform `F2 F(x,y) = (2 pi)^{-1/2} int exp(-i p y) F(x,p) dp`
/// at unit `h`. The second axis of the output is reciprocal to the input's.
pub fn partial_fourier(f: &GridWavefunction) -> Result<GridWavefunction> {
    let grid = f.grid();
    if grid.dims() != 2 {
        return Err(Error::InvalidInput("partial Fourier transform needs a 2D grid".into()));
    }
    let ay = *grid.axis(1);
    let shape = grid.shape();
    let mut data = f.values().to_vec();
    centred_axis(&mut data, &shape, 1, FftDirection::Forward, ay.spacing() / (2.0 * PI).sqrt());
    let out_grid = Grid::new_2d(*grid.axis(0), ay.dual(1.0), grid.h());
    GridWavefunction::new(out_grid, data)
}

/// Evaluates the trigonometric interpolant of the inverse transform,
/// `w(x, y) = (2 pi h)^{-2} sum v^(xi, eta) exp(i (x xi + y eta)/h) dxi deta`,
/// at arbitrary separable target points. Cost is `O(n^3)`.
pub fn inverse_at_2d(fhat: &GridWavefunction, h: f64, xs: &[f64], ys: &[f64]) -> Vec<Complex64> {
    let g = fhat.grid();
    let (axi, aeta) = (*g.axis(0), *g.axis(1));
    let (nx, ny) = (axi.n(), aeta.n());
    let vals = fhat.values();
    let norm = axi.spacing() * aeta.spacing() / (2.0 * PI * h).powi(2);
    let ey: Vec<Vec<Complex64>> =
        ys.iter().map(|&y| aeta.points().map(|eta| Complex64::from_polar(1.0, y * eta / h)).collect()).collect();
    // partial[k][b] = sum_l v^(xi_k, eta_l) exp(i y_b eta_l / h)
    let mut partial = vec![Complex64::default(); nx * ys.len()];
    for k in 0..nx {
        let row = &vals[k * ny..(k + 1) * ny];
        for (b, e) in ey.iter().enumerate() {
            partial[k * ys.len() + b] = row.iter().zip(e).map(|(v, p)| v * p).sum();
        }
    }
    let mut out = vec![Complex64::default(); xs.len() * ys.len()];
    for (a, &x) in xs.iter().enumerate() {
        let ex: Vec<Complex64> = axi.points().map(|xi| Complex64::from_polar(1.0, x * xi / h)).collect();
        for b in 0..ys.len() {
            let mut s = Complex64::default();
            for k in 0..nx {
                s += ex[k] * partial[k * ys.len() + b];
            }
            out[a * ys.len() + b] = s * norm;
        }
    }
    out
}

/// One-dimensional analogue of [`inverse_at_2d`].
pub fn inverse_at_1d(fhat: &GridWavefunction, h: f64, xs: &[f64]) -> Vec<Complex64> {
    let axi: Axis = *fhat.grid().axis(0);
    let norm = axi.spacing() / (2.0 * PI * h);
    xs.iter()
        .map(|&x| {
            axi.points().zip(fhat.values()).map(|(xi, v)| v * Complex64::from_polar(1.0, x * xi / h)).sum::<Complex64>()
                * norm
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss_1d(n: usize, l: f64, h: f64) -> GridWavefunction {
        let g = Grid::new_1d(Axis::new(n, l).unwrap(), h);
        GridWavefunction::from_fn_1d(g, |x| Complex64::new((-x * x / (2.0 * h)).exp(), 0.0)).unwrap()
    }

    #[test]
    fn gaussian_transform_is_analytic() {
        let h = 0.1;
        let f = gauss_1d(256, 4.0, h);
        let r = sft(&f);
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        let fh = r.value;
        let ax = *fh.grid().axis(0);
        for (xi, v) in ax.points().zip(fh.values()) {
            let want = (2.0 * PI * h).sqrt() * (-xi * xi / (2.0 * h)).exp();
            assert!((v - want).norm() < 1e-12, "xi={xi}: {v} vs {want}");
        }
    }

    #[test]
    fn round_trip_and_parseval() {
        let h = 0.2;
        let g = Grid::new_2d(Axis::new(64, 5.0).unwrap(), Axis::new(32, 4.0).unwrap(), h);
        let f = GridWavefunction::from_fn_2d(g.clone(), |x, y| {
            Complex64::new((-(x - 0.3).powi(2) / h - y * y / h).exp(), x * (-(x * x + y * y) / h).exp())
        })
        .unwrap();
        let fh = sft(&f).value;
        let back = isft(&fh, &g).unwrap();
        assert!(f.distance(&back).unwrap() < 1e-12);
        let ratio = fh.norm_sqr() / (2.0 * PI * h).powi(2) / f.norm_sqr();
        assert!((ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn warns_on_boundary_mass() {
        let g = Grid::new_1d(Axis::new(64, 1.0).unwrap(), 1.0);
        let f = GridWavefunction::from_fn_1d(g, |_| Complex64::new(1.0, 0.0)).unwrap();
        let r = sft(&f);
        assert!(r.warnings.iter().any(|w| matches!(w, Warning::Periodization { .. })));
    }

    #[test]
    fn partial_fourier_squares_to_parity() {
        let g = Grid::new_2d(Axis::new(32, 6.0).unwrap(), Axis::new(64, 8.0).unwrap(), 1.0);
        let f = GridWavefunction::from_fn_2d(g.clone(), |x, y| {
            Complex64::new((-(x * x) / 2.0 - (y - 1.0).powi(2)).exp(), 0.3 * y * (-(x * x + y * y)).exp())
        })
        .unwrap();
        let once = partial_fourier(&f).unwrap();
        assert!((once.norm() - f.norm()).abs() < 1e-10);
        let twice = partial_fourier(&once).unwrap();
        assert_eq!(twice.grid().axes(), g.axes());
        let ny = 64;
        for i in 0..32 {
            for j in 1..ny {
                let a = twice.values()[i * ny + j];
                let b = f.values()[i * ny + (ny - j)];
                assert!((a - b).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn partial_fourier_of_gaussian_is_self_dual() {
        let g = Grid::new_2d(Axis::new(16, 4.0).unwrap(), Axis::new(64, 8.0).unwrap(), 1.0);
        let f = GridWavefunction::from_fn_2d(g, |x, y| Complex64::new((-(x * x + y * y) / 2.0).exp(), 0.0)).unwrap();
        let once = partial_fourier(&f).unwrap();
        let ax = *once.grid().axis(0);
        let ay = *once.grid().axis(1);
        for (i, x) in ax.points().enumerate() {
            for (j, y) in ay.points().enumerate() {
                let want = (-(x * x + y * y) / 2.0).exp();
                assert!((once.values()[i * 64 + j] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn off_grid_inverse_matches_fft_on_grid() {
        let h = 0.5;
        let g = Grid::new_2d(Axis::new(32, 6.0).unwrap(), Axis::new(32, 6.0).unwrap(), h);
        let f = GridWavefunction::from_fn_2d(g.clone(), |x, y| {
            Complex64::new((-(x * x + 2.0 * y * y) / h).exp(), (-(x - 1.0).powi(2) / h - y * y).exp())
        })
        .unwrap();
        let fh = sft(&f).value;
        let xs: Vec<f64> = g.axis(0).points().collect();
        let ys: Vec<f64> = g.axis(1).points().collect();
        let w = inverse_at_2d(&fh, h, &xs, &ys);
        for (a, b) in w.iter().zip(f.values()) {
            assert!((a - b).norm() < 1e-12);
        }
        let g1 = Grid::new_1d(Axis::new(64, 6.0).unwrap(), h);
        let f1 = GridWavefunction::from_fn_1d(g1, |x| Complex64::new((-x * x / h).exp(), 0.0)).unwrap();
        let w1 = inverse_at_1d(&sft(&f1).value, h, &[0.123]);
        let want = (-0.123f64 * 0.123 / h).exp();
        assert!((w1[0].re - want).abs() < 1e-12, "{} vs {want}", w1[0]);
    }
}
