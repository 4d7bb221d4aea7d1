use num_complex::Complex64;

use super::{require_dims, require_time};
use crate::error::{Checked, Error, Result, Warning};
use crate::fields::{inverse_at_2d, sft, GridWavefunction};

/// Exact propagator of `P = -h^2 d_x d_y - xy`, Weyl symbol `xi*eta - x*y`:
///
/// `U_t v(x,y) = sech t (2 pi h)^{-2} iint exp(i phi / h) v^(xi,eta) dxi deta`
/// with `phi = (xy - xi eta) tanh t + (x xi + y eta) sech t`.
///
/// The `x y` chirp factors out and the rest is an inverse transform of the
/// `xi eta`-chirped spectrum sampled at `(x sech t, y sech t)`.
pub fn warmup_propagator(v: &GridWavefunction, t: f64, h: f64) -> Result<Checked<GridWavefunction>> {
    require_dims(v, 2, "warm-up propagator")?;
    require_time(t)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    let v = GridWavefunction::new(v.grid().with_h(h), v.values().to_vec())?;
    let Checked { value: mut vhat, mut warnings } = sft(&v);
    let (th, sech) = (t.tanh(), 1.0 / t.cosh());
    let g = vhat.grid().clone();
    let neta = g.axis(1).n();
    for (i, val) in vhat.values_mut().iter_mut().enumerate() {
        let (xi, eta) = (g.axis(0).point(i / neta), g.axis(1).point(i % neta));
        *val *= Complex64::from_polar(1.0, -xi * eta * th / h);
    }
    let grid = v.grid().clone();
    let (ax, ay) = (*grid.axis(0), *grid.axis(1));
    // local frequency of the output chirp against the transform grid
    let chirp = ax.half_extent().max(ay.half_extent()) * th.abs();
    let nyquist = ax.dual(h).half_extent().min(ay.dual(h).half_extent());
    if chirp > nyquist {
        warnings.push(Warning::QuadratureResolution {
            detail: format!("chirp frequency {chirp:.3} exceeds Nyquist {nyquist:.3}"),
        });
    }
    let xs: Vec<f64> = ax.points().map(|x| x * sech).collect();
    let ys: Vec<f64> = ay.points().map(|y| y * sech).collect();
    let w = inverse_at_2d(&vhat, h, &xs, &ys);
    let ny = ay.n();
    let values = w
        .into_iter()
        .enumerate()
        .map(|(i, wv)| {
            let (x, y) = (ax.point(i / ny), ay.point(i % ny));
            wv * sech * Complex64::from_polar(1.0, x * y * th / h)
        })
        .collect();
    Ok(Checked::with(GridWavefunction::new(grid, values)?, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{weyl_apply, Axis, Grid, QuadraticSymbol};

    fn packet(h: f64, n: usize, l: f64) -> GridWavefunction {
        let g = Grid::new_2d(Axis::new(n, l).unwrap(), Axis::new(n, l).unwrap(), h);
        GridWavefunction::from_fn_2d(g, |x, y| {
            let r = ((x - 0.4).powi(2) + (y + 0.2).powi(2)) / (2.0 * h);
            Complex64::from_polar((-r).exp() / (std::f64::consts::PI * h).sqrt(), 0.3 * x / h)
        })
        .unwrap()
    }

    #[test]
    fn identity_at_zero() {
        let v = packet(0.5, 32, 6.0);
        let u = warmup_propagator(&v, 0.0, 0.5).unwrap().value;
        assert!(u.distance(&v).unwrap() < 1e-10);
    }

    #[test]
    fn norm_and_group_property() {
        let v = packet(0.5, 64, 8.0);
        let u = warmup_propagator(&v, 0.4, 0.5).unwrap().value;
        assert!((u.norm() - v.norm()).abs() < 1e-7);
        let half = warmup_propagator(&warmup_propagator(&v, 0.2, 0.5).unwrap().value, 0.2, 0.5).unwrap().value;
        assert!(half.distance(&u).unwrap() < 1e-7);
    }

    #[test]
    fn solves_the_evolution_equation() {
        let h = 0.5;
        let v = packet(h, 64, 8.0);
        let (t, d) = (0.3, 1e-3);
        let up = warmup_propagator(&v, t + d, h).unwrap().value;
        let um = warmup_propagator(&v, t - d, h).unwrap().value;
        let u = warmup_propagator(&v, t, h).unwrap().value;
        let mut p = QuadraticSymbol::product(2, 2, 3);
        p.a -= QuadraticSymbol::product(2, 0, 1).a;
        let pu = weyl_apply(&p, &u).unwrap();
        let n = 64;
        let mut worst: f64 = 0.0;
        for i in 8..n - 8 {
            for j in 8..n - 8 {
                let k = i * n + j;
                let dt = (up.values()[k] - um.values()[k]) / (2.0 * d);
                let r = Complex64::new(0.0, -h) * dt + pu.values()[k];
                worst = worst.max(r.norm());
            }
        }
        assert!(worst < 1e-5, "{worst}");
    }
}
