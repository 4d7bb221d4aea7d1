//! Egorov checks: `<Op(sigma) U f, U g>` against `iint (sigma o kappa_t) W(f,g)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{gyrator, t0_fio_propagator, ChartedTime};
use crate::error::{Error, Result};
use crate::fields::{weyl_pairing, wigner, GridWavefunction, QuadraticSymbol};
use crate::flows::{flow_p0, gyrator_matrix, rk4_oracle, FlowSymbol, PhasePoint, PhasePoint1D};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EgorovGen {
    /// Exact metaplectic case: both sides agree to quadrature accuracy.
    Gyrator,
    /// The first-order FIO for `Op(p0)` against the `p0` flow.
    T0,
}

impl std::str::FromStr for EgorovGen {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gyrator" => Ok(EgorovGen::Gyrator),
            "t0" | "p0" => Ok(EgorovGen::T0),
            _ => Err(Error::InvalidInput(format!("unknown Egorov generator {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EgorovResult {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub deviation: f64,
}

/// Wigner samples below this fraction of the peak are not transported.
const WIGNER_SKIP: f64 = 1e-14;

fn flowed_symbol(sigma: &QuadraticSymbol, x: f64, xi: f64, t: f64, h: f64) -> Result<f64> {
    let p = PhasePoint1D::new(x, xi, h);
    let q = match flow_p0(p, t) {
        Ok(q) => q,
        Err(Error::ClassificationAmbiguity { .. }) => {
            let tr = rk4_oracle(FlowSymbol::P0, PhasePoint::One(p), t, 1e-3)?;
            match tr.last() {
                Some(PhasePoint::One(q)) if tr.blowup_time.is_none() => *q,
                _ => return Err(Error::BlowUp { time: tr.blowup_time.unwrap_or(t) }),
            }
        }
        Err(e) => return Err(e),
    };
    Ok(sigma.eval(&[q.x, q.xi]))
}

/// Compares `<Op(sigma) U_t f, U_t g>` with `iint (sigma o kappa_t) W(f,g)`.
///
/// The left side uses the exact Weyl action of the quadratic `sigma`. For
/// the gyrator the right side is the Weyl pairing of `sigma` composed with
/// the linear flow; for `T0` it is the Wigner pairing with `sigma`
/// transported by the closed-form `p0` flow.
pub fn egorov_check(
    sigma: &QuadraticSymbol,
    t: f64,
    h: f64,
    f: &GridWavefunction,
    g: &GridWavefunction,
    gen: EgorovGen,
) -> Result<EgorovResult> {
    if f.grid() != g.grid() {
        return Err(Error::InvalidInput("Egorov check needs both states on one grid".into()));
    }
    let relabel = |v: &GridWavefunction| GridWavefunction::new(v.grid().with_h(h), v.values().to_vec());
    let (f, g) = (relabel(f)?, relabel(g)?);
    let (lhs, rhs) = match gen {
        EgorovGen::Gyrator => {
            if f.grid().dims() != 2 || sigma.dims != 2 {
                return Err(Error::InvalidInput("gyrator Egorov check is two-dimensional".into()));
            }
            let ct = ChartedTime::auto(t);
            let uf = gyrator(&f, ct)?.value;
            let ug = gyrator(&g, ct)?.value;
            let m = DMatrix::from_fn(4, 4, |i, j| gyrator_matrix(t)[i][j]);
            (weyl_pairing(sigma, &uf, &ug)?, weyl_pairing(&sigma.compose_linear(&m), &f, &g)?)
        }
        EgorovGen::T0 => {
            if f.grid().dims() != 1 || sigma.dims != 1 {
                return Err(Error::InvalidInput("T0 Egorov check is one-dimensional".into()));
            }
            let uf = t0_fio_propagator(&f, t, h)?.value;
            let ug = if f == g { uf.clone() } else { t0_fio_propagator(&g, t, h)?.value };
            let lhs = weyl_pairing(sigma, &uf, &ug)?;
            let w = wigner(&f, &g)?;
            let peak = w.values.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let cut = WIGNER_SKIP * peak;
            let (ax, af) = (*w.space.axis(0), w.freq[0]);
            let nf = af.n();
            // transport sigma only where W is non-negligible
            let mut vals = vec![0.0; w.values.len()];
            for (i, z) in w.values.iter().enumerate() {
                if z.norm() > cut {
                    vals[i] = flowed_symbol(sigma, ax.point(i / nf), af.point(i % nf), t, h)?;
                }
            }
            let rhs = w.pair(|x, xi| {
                let i = ax_index(&ax, x[0]) * nf + ax_index(&af, xi[0]);
                vals[i]
            });
            (lhs, rhs)
        }
    };
    Ok(EgorovResult { lhs, rhs, deviation: (lhs - rhs).norm() })
}

fn ax_index(a: &crate::fields::Axis, p: f64) -> usize {
    ((p - a.point(0)) / a.spacing()).round() as usize
}
