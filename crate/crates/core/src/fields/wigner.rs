use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;

use super::fourier::centred_axis;
use super::grid::{Axis, Grid, GridWavefunction};
use super::interp::interp_2d;
use crate::error::{Checked, Error, Result, Warning};

/// Cross-Wigner function sampled on position axes times frequency axes.
///
/// Values are row-major over `(x.., xi..)` with the frequency axes fastest.
#[derive(Debug, Clone)]
pub struct WignerFunction {
    pub space: Grid,
    pub freq: Vec<Axis>,
    pub values: Vec<Complex64>,
}

impl WignerFunction {
    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    fn cell(&self) -> f64 {
        self.space.cell() * self.freq.iter().map(|a| a.spacing()).product::<f64>()
    }

    /// `(2 pi h)^{-d} iint sigma W dx dxi`, equal to `<Op_h^W(sigma) f | g>`.
    pub fn pair(&self, sigma: impl Fn(&[f64], &[f64]) -> f64) -> Complex64 {
        let d = self.dims();
        let h = self.space.h();
        let mut acc = Complex64::default();
        let mut x = vec![0.0; d];
        let mut xi = vec![0.0; d];
        let nf: Vec<usize> = self.freq.iter().map(|a| a.n()).collect();
        let fsize: usize = nf.iter().product();
        for (i, v) in self.values.iter().enumerate() {
            if *v == Complex64::default() {
                continue;
            }
            let (si, fi) = (i / fsize, i % fsize);
            self.unflatten(si, fi, &mut x, &mut xi);
            acc += v * sigma(&x, &xi);
        }
        acc * self.cell() / (2.0 * PI * h).powi(d as i32)
    }

    fn unflatten(&self, si: usize, fi: usize, x: &mut [f64], xi: &mut [f64]) {
        match self.dims() {
            1 => {
                x[0] = self.space.axis(0).point(si);
                xi[0] = self.freq[0].point(fi);
            }
            _ => {
                let ny = self.space.axis(1).n();
                let neta = self.freq[1].n();
                x[0] = self.space.axis(0).point(si / ny);
                x[1] = self.space.axis(1).point(si % ny);
                xi[0] = self.freq[0].point(fi / neta);
                xi[1] = self.freq[1].point(fi % neta);
            }
        }
    }

    /// `(2 pi h)^{-d} int W(x, xi) dxi` at each position sample.
    pub fn position_marginal(&self) -> Vec<Complex64> {
        let d = self.dims() as i32;
        let h = self.space.h();
        let fsize: usize = self.freq.iter().map(|a| a.n()).product();
        let dxi: f64 = self.freq.iter().map(|a| a.spacing()).product();
        self.values.chunks(fsize).map(|c| c.iter().sum::<Complex64>() * dxi / (2.0 * PI * h).powi(d)).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }
}

/// `W(f,g)(x,xi) = int exp(-i xi p / h) f(x + p/2) conj(g(x - p/2)) dp`.
///
/// The lag is sampled at `p = 2 m dx`, so the frequency axes span half the
/// range of the semiclassical Fourier transform. Cost is `O(n^{2d} log n)`.
pub fn wigner(f: &GridWavefunction, g: &GridWavefunction) -> Result<WignerFunction> {
    if f.grid() != g.grid() {
        return Err(Error::InvalidInput("Wigner transform needs both states on one grid".into()));
    }
    let grid = f.grid().clone();
    let h = grid.h();
    let freq: Vec<Axis> =
        grid.axes().iter().map(|a| Axis::new(a.n(), PI * h / (2.0 * a.spacing()))).collect::<Result<_>>()?;
    let (fv, gv) = (f.values(), g.values());
    let values = match grid.dims() {
        1 => {
            let n = grid.axis(0).n();
            let dx = grid.axis(0).spacing();
            let half = (n / 2) as isize;
            let mut out = Vec::with_capacity(n * n);
            let mut buf = vec![Complex64::default(); n];
            for i in 0..n as isize {
                for (mi, b) in buf.iter_mut().enumerate() {
                    let m = mi as isize - half;
                    let (a, c) = (i + m, i - m);
                    *b = if a >= 0 && a < n as isize && c >= 0 && c < n as isize {
                        fv[a as usize] * gv[c as usize].conj()
                    } else {
                        Complex64::default()
                    };
                }
                centred_axis(&mut buf, &[n], 0, FftDirection::Forward, 2.0 * dx);
                out.extend_from_slice(&buf);
            }
            out
        }
        _ => {
            let (nx, ny) = (grid.axis(0).n(), grid.axis(1).n());
            let (dx, dy) = (grid.axis(0).spacing(), grid.axis(1).spacing());
            let (hx, hy) = ((nx / 2) as isize, (ny / 2) as isize);
            let mut out = Vec::with_capacity(nx * ny * nx * ny);
            let mut buf = vec![Complex64::default(); nx * ny];
            let inside = |i: isize, j: isize| i >= 0 && i < nx as isize && j >= 0 && j < ny as isize;
            for i in 0..nx as isize {
                for j in 0..ny as isize {
                    for m1 in 0..nx {
                        for m2 in 0..ny {
                            let (p, q) = (m1 as isize - hx, m2 as isize - hy);
                            let (a1, a2, c1, c2) = (i + p, j + q, i - p, j - q);
                            buf[m1 * ny + m2] = if inside(a1, a2) && inside(c1, c2) {
                                fv[a1 as usize * ny + a2 as usize] * gv[c1 as usize * ny + c2 as usize].conj()
                            } else {
                                Complex64::default()
                            };
                        }
                    }
                    centred_axis(&mut buf, &[nx, ny], 0, FftDirection::Forward, 2.0 * dx);
                    centred_axis(&mut buf, &[nx, ny], 1, FftDirection::Forward, 2.0 * dy);
                    out.extend_from_slice(&buf);
                }
            }
            out
        }
    };
    Ok(WignerFunction { space: grid, freq, values })
}

/// Extended Wigner transform at unit `h`:
/// `W~F(x,y) = (2 pi)^{-1/2} int exp(i p y) F((x+p)/sqrt2, (x-p)/sqrt2) dp`.
///
/// The rotated samples come from ten-point Lagrange interpolation; the `p`
/// integral is a centred FFT whose reciprocal axis is the input `y` axis.
pub fn extended_wigner(f: &GridWavefunction) -> Result<Checked<GridWavefunction>> {
    let grid = f.grid();
    if grid.dims() != 2 {
        return Err(Error::InvalidInput("extended Wigner transform needs a 2D grid".into()));
    }
    let (ax, ay) = (*grid.axis(0), *grid.axis(1));
    let mut warnings = Vec::new();
    let coarse = ax.spacing().max(ay.spacing());
    if coarse > 0.2 {
        warnings.push(Warning::Interpolation { spacing: coarse });
    }
    let ny = ay.n();
    let pax = ay.dual(1.0);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(grid.len());
    let mut buf = vec![Complex64::default(); ny];
    for x in ax.points() {
        for (k, b) in buf.iter_mut().enumerate() {
            let p = pax.point(k);
            *b = interp_2d(f, (x + p) * r, (x - p) * r);
        }
        centred_axis(&mut buf, &[ny], 0, FftDirection::Inverse, pax.spacing() / (2.0 * PI).sqrt());
        out.extend_from_slice(&buf);
    }
    Ok(Checked::with(GridWavefunction::new(grid.clone(), out)?, warnings))
}

/// Normalized Laguerre-Gaussian mode at unit `h`,
/// `(-1)^k sqrt(k!/(pi K!)) r^{|l|} e^{-r^2/2} L_k^{|l|}(r^2) e^{i l theta}`
/// with `k = min(m,n)`, `K = max(m,n)`, `l = m - n`. It agrees with the
/// extended Wigner transform of `h_m(x) h_n(y)` up to a constant phase.
pub fn laguerre_gaussian(m: usize, n: usize, x: f64, y: f64) -> Complex64 {
    let k = m.min(n);
    let big = m.max(n);
    let l = m as i64 - n as i64;
    let al = l.unsigned_abs() as usize;
    let r2 = x * x + y * y;
    // generalized Laguerre by recurrence
    let mut lm1 = 0.0;
    let mut lk = 1.0;
    for j in 0..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + al as f64 - r2) * lk - (jf + al as f64) * lm1) / (jf + 1.0);
        lm1 = lk;
        lk = next;
    }
    let mut ratio = 1.0;
    for j in (k + 1)..=big {
        ratio /= j as f64;
    }
    let norm = (ratio / PI).sqrt();
    let sgn = if k % 2 == 0 { 1.0 } else { -1.0 };
    let z = Complex64::new(x, if l >= 0 { y } else { -y });
    sgn * norm * z.powu(al as u32) * (-r2 / 2.0).exp() * lk
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modes::{mode_eval, ModeIndex};

    fn ground(n: usize, l: f64, h: f64) -> GridWavefunction {
        let g = Grid::new_1d(Axis::new(n, l).unwrap(), h);
        mode_eval(ModeIndex::new(0, 0), h, &g).unwrap().value
    }

    #[test]
    fn ground_state_wigner_matches_quadrature() {
        let h = 0.1;
        let f = ground(128, 3.0, h);
        let w = wigner(&f, &f).unwrap();
        assert!(w.max_imag() < 1e-12);
        let n = 128;
        // W = 2 exp(-(x^2 + xi^2)/h) for the normalized ground state
        for (i, k) in [(64, 64), (70, 64), (64, 60), (58, 71), (80, 50)] {
            let x = w.space.axis(0).point(i);
            let xi = w.freq[0].point(k);
            let want = 2.0 * (-(x * x + xi * xi) / h).exp();
            let got = w.values[i * n + k];
            assert!((got.re - want).abs() < 1e-10, "({x},{xi}): {got} vs {want}");
        }
    }

    #[test]
    fn pairing_with_linear_symbols() {
        let h = 0.1;
        let g = Grid::new_1d(Axis::new(128, 3.0).unwrap(), h);
        let f = GridWavefunction::from_fn_1d(g.clone(), |x| {
            Complex64::from_polar((-(x - 0.2).powi(2) / (2.0 * h)).exp(), 0.7 * x / h)
        })
        .unwrap();
        let u =
            GridWavefunction::from_fn_1d(g.clone(), |x| Complex64::new((-(x + 0.1).powi(2) / h).exp(), 0.0)).unwrap();
        let w = wigner(&f, &u).unwrap();
        let mut xf = f.clone();
        for (v, x) in xf.values_mut().iter_mut().zip(g.axis(0).points()) {
            *v *= x;
        }
        let want = u.inner(&xf).unwrap();
        let got = w.pair(|x, _| x[0]);
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
        let one = w.pair(|_, _| 1.0);
        assert!((one - u.inner(&f).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn marginal_is_density() {
        let h = 0.2;
        let g = Grid::new_1d(Axis::new(128, 4.0).unwrap(), h);
        let f = mode_eval(ModeIndex::new(2, 0), h, &g).unwrap().value;
        let w = wigner(&f, &f).unwrap();
        for (m, v) in w.position_marginal().iter().zip(f.values()) {
            assert!((m.re - v.norm_sqr()).abs() < 1e-8);
        }
    }

    #[test]
    fn two_dimensional_wigner_is_real() {
        let h = 0.5;
        let g = Grid::new_2d(Axis::new(16, 4.0).unwrap(), Axis::new(16, 4.0).unwrap(), h);
        let f = mode_eval(ModeIndex::new(1, 0), h, &g).unwrap().value;
        let w = wigner(&f, &f).unwrap();
        assert!(w.max_imag() < 1e-12);
        let norm = w.pair(|_, _| 1.0);
        assert!((norm.re - f.norm_sqr()).abs() < 1e-12, "{norm}");
    }

    #[test]
    fn extended_wigner_of_ground_is_ground() {
        let g = Grid::new_2d(Axis::new(128, 8.0).unwrap(), Axis::new(128, 8.0).unwrap(), 1.0);
        let f = mode_eval(ModeIndex::new(0, 0), 1.0, &g).unwrap().value;
        let w = extended_wigner(&f).unwrap().value;
        assert!(w.distance(&f).unwrap() < 1e-6);
    }

    #[test]
    fn extended_wigner_gives_laguerre_modes() {
        let g = Grid::new_2d(Axis::new(128, 8.0).unwrap(), Axis::new(128, 8.0).unwrap(), 1.0);
        for (m, n) in [(1, 0), (0, 1), (1, 1), (2, 1), (0, 3)] {
            let f = mode_eval(ModeIndex::new(m, n), 1.0, &g).unwrap().value;
            let w = extended_wigner(&f).unwrap().value;
            assert!((w.norm() - 1.0).abs() < 1e-6, "({m},{n}): norm {}", w.norm());
            let lg = GridWavefunction::from_fn_2d(g.clone(), |x, y| laguerre_gaussian(m, n, x, y)).unwrap();
            // equal up to a unit constant
            let ov = lg.inner(&w).unwrap();
            assert!((ov.norm() - 1.0).abs() < 1e-6, "({m},{n}): overlap {ov}");
        }
    }

    #[test]
    fn extended_wigner_is_linear() {
        let g = Grid::new_2d(Axis::new(32, 6.0).unwrap(), Axis::new(32, 6.0).unwrap(), 1.0);
        let a = mode_eval(ModeIndex::new(1, 2), 1.0, &g).unwrap().value;
        let b = mode_eval(ModeIndex::new(0, 1), 1.0, &g).unwrap().value;
        let c = Complex64::new(0.3, -1.2);
        let mut s = a.clone();
        s.axpy(c, &b).unwrap();
        let lhs = extended_wigner(&s).unwrap().value;
        let mut rhs = extended_wigner(&a).unwrap().value;
        rhs.axpy(c, &extended_wigner(&b).unwrap().value).unwrap();
        assert!(lhs.distance(&rhs).unwrap() < 1e-12);
    }
}
