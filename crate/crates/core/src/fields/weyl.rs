//! Weyl quantization of polynomial symbols of degree at most two.
//!
//! For such symbols the Weyl operator is a finite combination of
//! multiplications and `hD` derivatives, so it can be applied exactly on a
//! grid with spectral differentiation.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fourier::{isft, sft};
use super::grid::GridWavefunction;
use crate::error::{Error, Result};

/// `sigma(z) = c + b.z + z^T A z` on phase space `z = (x.., xi..)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticSymbol {
    pub dims: usize,
    pub c: f64,
    pub b: Vec<f64>,
    pub a: DMatrix<f64>,
}

impl QuadraticSymbol {
    pub fn zero(dims: usize) -> Self {
        QuadraticSymbol { dims, c: 0.0, b: vec![0.0; 2 * dims], a: DMatrix::zeros(2 * dims, 2 * dims) }
    }

    pub fn constant(dims: usize, c: f64) -> Self {
        QuadraticSymbol { c, ..Self::zero(dims) }
    }

    /// The coordinate function `z_i`.
    pub fn coordinate(dims: usize, i: usize) -> Self {
        let mut s = Self::zero(dims);
        s.b[i] = 1.0;
        s
    }

    /// The product `z_i z_j`.
    pub fn product(dims: usize, i: usize, j: usize) -> Self {
        let mut s = Self::zero(dims);
        s.a[(i, j)] += 0.5;
        s.a[(j, i)] += 0.5;
        s
    }

    /// Parses names such as `x`, `xi`, `y`, `eta`, `x2`, `xxi`, `xieta`, `1`.
    pub fn parse(dims: usize, name: &str) -> Result<Self> {
        let coords: &[&str] = if dims == 1 { &["x", "xi"] } else { &["x", "y", "xi", "eta"] };
        let index = |s: &str| coords.iter().position(|c| *c == s);
        if name == "1" {
            return Ok(Self::constant(dims, 1.0));
        }
        if let Some(i) = index(name) {
            return Ok(Self::coordinate(dims, i));
        }
        if let Some(base) = name.strip_suffix('2') {
            if let Some(i) = index(base) {
                return Ok(Self::product(dims, i, i));
            }
        }
        // longest-first split into two coordinate names
        for cut in 1..name.len() {
            let (l, r) = name.split_at(cut);
            if let (Some(i), Some(j)) = (index(l), index(r)) {
                return Ok(Self::product(dims, i, j));
            }
        }
        Err(Error::InvalidInput(format!("unknown symbol {name:?} for dimension {dims}")))
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        let mut s = self.c;
        for i in 0..2 * self.dims {
            s += self.b[i] * z[i];
            for j in 0..2 * self.dims {
                s += self.a[(i, j)] * z[i] * z[j];
            }
        }
        s
    }

    /// `sigma o M` for a linear map `z -> M z`.
    pub fn compose_linear(&self, m: &DMatrix<f64>) -> Self {
        let b = m.transpose() * nalgebra::DVector::from_column_slice(&self.b);
        QuadraticSymbol { dims: self.dims, c: self.c, b: b.as_slice().to_vec(), a: m.transpose() * &self.a * m }
    }
}

/// Applies the phase-space coordinate operator `Z_i` (multiplication by `x_k`
/// or `hD_{x_k}`).
fn apply_coordinate(f: &GridWavefunction, i: usize) -> Result<GridWavefunction> {
    let grid = f.grid();
    let d = grid.dims();
    let (ax, is_freq) = if i < d { (i, false) } else { (i - d, true) };
    let mut out = if is_freq { sft(f).value } else { f.clone() };
    let g = out.grid().clone();
    let shape = g.shape();
    let stride: usize = shape[ax + 1..].iter().product();
    let n = shape[ax];
    for (k, v) in out.values_mut().iter_mut().enumerate() {
        let j = (k / stride) % n;
        *v *= g.axis(ax).point(j);
    }
    if is_freq {
        // The Nyquist sample has no symmetric partner; drop it so hD stays symmetric.
        for (k, v) in out.values_mut().iter_mut().enumerate() {
            if (k / stride) % n == 0 {
                *v = Complex64::default();
            }
        }
        out = isft(&out, grid)?;
    }
    Ok(out)
}

/// `Op_h^W(sigma) f` for a quadratic symbol.
pub fn weyl_apply(sigma: &QuadraticSymbol, f: &GridWavefunction) -> Result<GridWavefunction> {
    let d = f.grid().dims();
    if sigma.dims != d {
        return Err(Error::InvalidInput("symbol and state dimensions differ".into()));
    }
    let mut out = f.scaled(sigma.c.into());
    let first: Vec<GridWavefunction> = (0..2 * d).map(|i| apply_coordinate(f, i)).collect::<Result<_>>()?;
    for i in 0..2 * d {
        if sigma.b[i] != 0.0 {
            out.axpy(sigma.b[i].into(), &first[i])?;
        }
        for j in 0..2 * d {
            let a = sigma.a[(i, j)];
            if a != 0.0 {
                out.axpy(a.into(), &apply_coordinate(&first[j], i)?)?;
            }
        }
    }
    Ok(out)
}

/// `<Op_h^W(sigma) f | g> = int (Op f) conj(g)`.
pub fn weyl_pairing(sigma: &QuadraticSymbol, f: &GridWavefunction, g: &GridWavefunction) -> Result<Complex64> {
    let of = weyl_apply(sigma, f)?;
    g.inner(&of)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::wigner::wigner;
    use crate::fields::{Axis, Grid};

    fn packet(g: &Grid, x0: f64, p0: f64) -> GridWavefunction {
        let h = g.h();
        GridWavefunction::from_fn_1d(g.clone(), |x| {
            Complex64::from_polar((-(x - x0).powi(2) / (2.0 * h)).exp(), p0 * x / h)
        })
        .unwrap()
    }

    #[test]
    fn parses_names() {
        let s = QuadraticSymbol::parse(2, "xieta").unwrap();
        assert_eq!(s.eval(&[0.0, 0.0, 2.0, 3.0]), 6.0);
        let s = QuadraticSymbol::parse(1, "xxi").unwrap();
        assert_eq!(s.eval(&[2.0, 5.0]), 10.0);
        assert!(QuadraticSymbol::parse(1, "eta").is_err());
    }

    #[test]
    fn momentum_of_plane_wave_packet() {
        let h = 0.1;
        let g = Grid::new_1d(Axis::new(256, 4.0).unwrap(), h);
        let f = packet(&g, 0.3, 0.7);
        let n2 = f.norm_sqr();
        let xi = weyl_pairing(&QuadraticSymbol::parse(1, "xi").unwrap(), &f, &f).unwrap();
        assert!((xi.re / n2 - 0.7).abs() < 1e-10);
        let x = weyl_pairing(&QuadraticSymbol::parse(1, "x").unwrap(), &f, &f).unwrap();
        assert!((x.re / n2 - 0.3).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_wigner_pairing() {
        let h = 0.1;
        let g = Grid::new_1d(Axis::new(128, 3.0).unwrap(), h);
        let f = packet(&g, 0.2, -0.4);
        let u = packet(&g, -0.1, 0.3);
        let w = wigner(&f, &u).unwrap();
        for name in ["x", "xi", "x2", "xi2", "xxi"] {
            let s = QuadraticSymbol::parse(1, name).unwrap();
            let a = weyl_pairing(&s, &f, &u).unwrap();
            let b = w.pair(|x, xi| s.eval(&[x[0], xi[0]]));
            assert!((a - b).norm() < 1e-8, "{name}: {a} vs {b}");
        }
    }
}
