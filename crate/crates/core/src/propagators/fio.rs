//! First-order Fourier integral operator for `exp(-it Op(p0)/h)`:
//!
//! `u(x) = (2 pi h)^{-1} int exp(i phi(t,x,xi)/h) a0(t,x,xi) v^(xi) dxi`
//!
//! with the eikonal phase and `a0 = J^{-1/2}` from the characteristics of
//! `p0`. Higher transport orders are dropped, so the error is `O(h)` for
//! fixed `t`.
//!
//! The characteristics at fixed momentum fold after a scaled time of about
//! `0.3`, so longer times are reached by composing steps of length at most
//! [`MAX_STEP`]. The step count depends on `t` only, never on `h`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{require_dims, require_time};
use crate::error::{Checked, Error, Result, Warning};
use crate::fields::{isft, sft, wigner, GridWavefunction};
use crate::flows::{characteristic, solve_characteristic, Characteristic};
use crate::modes::{mode_project, mode_vector_eval, ModeVector};
use crate::spectral::{truncated_propagator_auto, Generator};

/// Radius, in units of `sqrt(h)`, outside which the initial Wigner mass
/// must be negligible.
pub const LOCALIZATION_RADIUS: f64 = 6.0;
/// Largest admissible Wigner mass fraction outside the localization disc.
pub const LOCALIZATION_TOL: f64 = 1e-6;

/// Longest single FIO step. Families stay fold-free out to `20 sqrt(h)`
/// for `h <= 0.1`.
pub const MAX_STEP: f64 = 0.1;

/// Characteristic step in the scaled time `sqrt(h) t`.
const SCALED_STEP: f64 = 2e-3;
/// Frequencies with `|v^|` below this fraction of the peak are skipped.
const SKIP_TOL: f64 = 1e-10;
/// Frequencies whose characteristics fail are dropped, with a warning, when
/// `|v^|` is below this fraction of the peak; above it the failure is an error.
const DROP_TOL: f64 = 1e-6;
/// Targets missed by a frequency above this fraction of the peak are zeroed.
const COVER_TOL: f64 = 1e-8;
/// The characteristic family is cut where `dx/dy` falls below this value.
const FOLD_JAC: f64 = 1e-6;
/// Inside this many `sqrt(h)` a fold is reported as a caustic.
const CORE_RADIUS: f64 = 3.0;

/// Fraction of `|W(v,v)|` mass outside the disc of the given radius.
pub fn localization_mass(v: &GridWavefunction, radius: f64) -> Result<f64> {
    require_dims(v, 1, "localization check")?;
    let w = wigner(v, v)?;
    let (ax, af) = (*w.space.axis(0), w.freq[0]);
    let nf = af.n();
    let (mut out, mut all) = (0.0, 0.0);
    for (i, val) in w.values.iter().enumerate() {
        let (x, xi) = (ax.point(i / nf), af.point(i % nf));
        let m = val.norm();
        all += m;
        if x.hypot(xi) > radius {
            out += m;
        }
    }
    Ok(if all > 0.0 { out / all } else { 0.0 })
}

fn time_step(t: f64, h: f64) -> f64 {
    (SCALED_STEP / h.sqrt()).min(t.abs().max(1e-12))
}

/// Characteristics from every grid point `y` with start momentum `xi`,
/// grown outward from the centre until they blow up or fold.
fn family(ys: &[f64], xi: f64, t: f64, h: f64, dt: f64) -> Result<Vec<Characteristic>> {
    let mid = ys.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map(|(i, _)| i).unwrap_or(0);
    let core = CORE_RADIUS * h.sqrt();
    let mut right = Vec::new();
    for &y in &ys[mid..] {
        match characteristic(y, xi, t, h, dt) {
            Ok(c) if c.jac > FOLD_JAC && right.last().map_or(true, |p: &Characteristic| c.x > p.x) => right.push(c),
            _ if y.abs() < core => return Err(Error::Caustic { t, x: y }),
            _ => break,
        }
    }
    let mut left = Vec::new();
    for &y in ys[..mid].iter().rev() {
        let first = left.last().or(right.first());
        match characteristic(y, xi, t, h, dt) {
            Ok(c) if c.jac > FOLD_JAC && first.map_or(true, |p: &Characteristic| c.x < p.x) => left.push(c),
            _ if y.abs() < core => return Err(Error::Caustic { t, x: y }),
            _ => break,
        }
    }
    left.reverse();
    left.extend(right);
    Ok(left)
}

/// Semiclassical propagator `exp(-it Op(p0)/h) v` with the amplitude
/// truncated at `a0`, composed from `ceil(|t| / MAX_STEP)` equal steps. The
/// input grid is relabelled with `h`.
///
/// Fails with [`Error::LocalizationViolated`] when more than
/// [`LOCALIZATION_TOL`] of the Wigner mass of `v` lies outside radius
/// `LOCALIZATION_RADIUS sqrt(h)`, and with [`Error::Caustic`] when the
/// characteristics fold near the origin.
pub fn t0_fio_propagator(v: &GridWavefunction, t: f64, h: f64) -> Result<Checked<GridWavefunction>> {
    t0_fio_propagator_steps(v, t, h, step_count(t))
}

/// `ceil(|t| / MAX_STEP)`, at least one.
pub fn step_count(t: f64) -> usize {
    (t.abs() / MAX_STEP).ceil().max(1.0) as usize
}

/// [`t0_fio_propagator`] with an explicit number of equal steps.
pub fn t0_fio_propagator_steps(
    v: &GridWavefunction,
    t: f64,
    h: f64,
    steps: usize,
) -> Result<Checked<GridWavefunction>> {
    require_dims(v, 1, "FIO propagator")?;
    require_time(t)?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    if steps == 0 {
        return Err(Error::InvalidInput("FIO needs at least one step".into()));
    }
    let mut u = GridWavefunction::new(v.grid().with_h(h), v.values().to_vec())?;
    let outside = localization_mass(&u, LOCALIZATION_RADIUS * h.sqrt())?;
    if outside > LOCALIZATION_TOL {
        return Err(Error::LocalizationViolated { outside });
    }
    let mut warnings = Vec::new();
    for _ in 0..steps {
        let Checked { value, warnings: w } = fio_step(&u, t / steps as f64, h)?;
        u = value;
        for w in w {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    Ok(Checked::with(u, warnings))
}

fn fio_step(v: &GridWavefunction, t: f64, h: f64) -> Result<Checked<GridWavefunction>> {
    let Checked { value: vhat, mut warnings } = sft(v);
    let grid = v.grid().clone();
    let xs: Vec<f64> = grid.axis(0).points().collect();
    let faxis = *vhat.grid().axis(0);
    let peak = vhat.values().iter().map(|z| z.norm()).fold(0.0, f64::max);
    let dt = time_step(t, h);
    let mut u = vec![Complex64::default(); xs.len()];
    // targets that some significant frequency cannot reach
    let mut incomplete = vec![false; xs.len()];
    let mut dropped: f64 = 0.0;
    for (k, vk) in vhat.values().iter().enumerate() {
        if vk.norm() <= SKIP_TOL * peak {
            continue;
        }
        let significant = vk.norm() > COVER_TOL * peak;
        let xi = faxis.point(k);
        let fam = match family(&xs, xi, t, h, dt) {
            Ok(f) => f,
            Err(Error::Caustic { .. } | Error::BlowUp { .. }) if vk.norm() <= DROP_TOL * peak => {
                dropped = dropped.max(vk.norm() / peak);
                continue;
            }
            Err(e) => return Err(e),
        };
        let (lo, hi) = match (fam.first(), fam.last()) {
            (Some(a), Some(b)) if fam.len() >= 2 => (a.x, b.x),
            _ => (f64::INFINITY, f64::NEG_INFINITY),
        };
        let mut seg = 0;
        for (j, &x) in xs.iter().enumerate() {
            if x < lo || x > hi {
                incomplete[j] |= significant;
                continue;
            }
            while seg + 2 < fam.len() && fam[seg + 1].x < x {
                seg += 1;
            }
            let (a, b) = (&fam[seg], &fam[seg + 1]);
            let c = if x == a.x {
                *a
            } else if x == b.x {
                *b
            } else {
                let guess = a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x);
                solve_characteristic(x, xi, t, h, guess, dt)?
            };
            u[j] += Complex64::from_polar(c.jac.powf(-0.5), c.phase / h) * vk;
        }
    }
    for (z, bad) in u.iter_mut().zip(&incomplete) {
        if *bad {
            *z = Complex64::default();
        }
    }
    if dropped > 0.0 {
        warnings.push(Warning::QuadratureResolution {
            detail: format!(
                "frequencies of relative weight up to {dropped:.1e} have no characteristic patch at t = {t}"
            ),
        });
    }
    let norm = faxis.spacing() / (2.0 * PI * h);
    let out = GridWavefunction::new(grid, u.into_iter().map(|z| z * norm).collect())?;
    Ok(Checked::with(out, warnings))
}

/// `Op(p0) f = x^3 f/2 + x (hD)^2 f/2 - (ih/2) hD f - (3h/2) x f`.
pub fn op_p0_apply(f: &GridWavefunction) -> Result<GridWavefunction> {
    require_dims(f, 1, "Op(p0)")?;
    let grid = f.grid().clone();
    let h = grid.h();
    let fhat = sft(f).value;
    let fa = *fhat.grid().axis(0);
    let spectral = |power: i32| -> Result<GridWavefunction> {
        let mut g = fhat.clone();
        for (k, z) in g.values_mut().iter_mut().enumerate() {
            // the unpaired Nyquist sample would break symmetry of hD
            *z *= if k == 0 { 0.0 } else { fa.point(k).powi(power) };
        }
        isft(&g, &grid)
    };
    let d1 = spectral(1)?;
    let d2 = spectral(2)?;
    let values = grid
        .axis(0)
        .points()
        .enumerate()
        .map(|(j, x)| {
            0.5 * x * x * x * f.values()[j] + 0.5 * x * d2.values()[j]
                - Complex64::new(0.0, 0.5 * h) * d1.values()[j]
                - 1.5 * h * x * f.values()[j]
        })
        .collect();
    GridWavefunction::new(grid, values)
}

/// `|| (hD_t + Op(p0)) u ||` at time `t` for the FIO solution, with a
/// central difference of width `2 dt` in time. The step count of time `t`
/// is kept for the shifted times.
pub fn t0_fio_residual(v: &GridWavefunction, t: f64, h: f64, dt: f64) -> Result<f64> {
    let steps = step_count(t);
    let up = t0_fio_propagator_steps(v, t + dt, h, steps)?.value;
    let um = t0_fio_propagator_steps(v, t - dt, h, steps)?.value;
    let u = t0_fio_propagator_steps(v, t, h, steps)?.value;
    let pu = op_p0_apply(&u)?;
    let mut r = pu;
    let scale = Complex64::new(0.0, -h / (2.0 * dt));
    r.axpy(scale, &up)?;
    r.axpy(-scale, &um)?;
    Ok(r.norm())
}

/// Truncated-basis reference `exp(-it Op(p0)/h) v`, computed in the mode
/// basis from the projection of `v` onto its first `mmax + 1` modes.
pub fn t0_reference(v: &GridWavefunction, t: f64, h: f64, mmax: usize) -> Result<GridWavefunction> {
    require_dims(v, 1, "reference propagator")?;
    let v = GridWavefunction::new(v.grid().with_h(h), v.values().to_vec())?;
    let coeffs: ModeVector = mode_project(&v, mmax, 0)?;
    // the band exponential applies exp(+itG/h)
    let w = truncated_propagator_auto(Generator::P0, -t, h, &coeffs)?;
    mode_vector_eval(&w, h, v.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{Axis, Grid};
    use crate::modes::{mode_eval, ModeIndex};

    fn ground(h: f64, n: usize) -> GridWavefunction {
        let g = Grid::new_1d(Axis::new(n, 14.0 * h.sqrt()).unwrap(), h);
        mode_eval(ModeIndex::new(0, 0), h, &g).unwrap().value
    }

    #[test]
    fn identity_at_zero() {
        let v = ground(0.1, 128);
        let u = t0_fio_propagator(&v, 0.0, 0.1).unwrap().value;
        assert!(u.distance(&v).unwrap() < 1e-10);
    }

    #[test]
    fn op_matches_mode_matrix() {
        // <k| Op(p0) |0> = -sqrt(2) h^{3/2} times the P0 band couplings
        let h = 0.1;
        let v = ground(h, 256);
        let pv = op_p0_apply(&v).unwrap();
        let c = mode_project(&pv, 3, 0).unwrap();
        let expect = -(2.0f64).sqrt() * h.powf(1.5) * crate::spectral::p0_coupling(0);
        assert!((c.get(ModeIndex::new(1, 0)) - expect).norm() < 1e-10);
        assert!(c.get(ModeIndex::new(0, 0)).norm() < 1e-10);
        assert!(c.get(ModeIndex::new(2, 0)).norm() < 1e-10);
    }

    #[test]
    fn reference_solves_the_evolution_equation() {
        let h = 0.1;
        let v = ground(h, 256);
        let (t, d) = (0.7, 1e-4);
        let up = t0_reference(&v, t + d, h, 0).unwrap();
        let um = t0_reference(&v, t - d, h, 0).unwrap();
        let u = t0_reference(&v, t, h, 0).unwrap();
        let mut r = op_p0_apply(&u).unwrap();
        let s = Complex64::new(0.0, -h / (2.0 * d));
        r.axpy(s, &up).unwrap();
        r.axpy(-s, &um).unwrap();
        assert!(r.norm() < 1e-8, "{}", r.norm());
    }

    #[test]
    fn close_to_reference_and_nearly_unitary() {
        let h = 0.1;
        let v = ground(h, 256);
        let u = t0_fio_propagator(&v, 1.0, h).unwrap().value;
        let r = t0_reference(&v, 1.0, h, 0).unwrap();
        let err = u.distance(&r).unwrap();
        assert!(err < 0.1 * h, "{err}");
        assert!((u.norm() - 1.0).abs() < h);
    }

    #[test]
    fn delocalized_input_is_rejected() {
        let h = 0.1;
        let g = Grid::new_1d(Axis::new(128, 4.0).unwrap(), h);
        let v = GridWavefunction::from_fn_1d(g, |x| Complex64::new((-(x - 2.5f64).powi(2) / (2.0 * h)).exp(), 0.0))
            .unwrap();
        assert!(matches!(t0_fio_propagator(&v, 1.0, h), Err(Error::LocalizationViolated { .. })));
    }
}
