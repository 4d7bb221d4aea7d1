//! Command drivers. Each returns a table plus its JSON form.

use std::fs;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use super::render::{Cell, Table};
use super::{Report, RunConfig};
use crate::elliptic::EllipticData;
use crate::error::{Checked, Error, Result, Warning};
use crate::fields::{Axis, Grid, GridWavefunction, QuadraticSymbol};
use crate::flows::{p0_level_set, P0Orbit, PhasePoint1D};
use crate::modes::{mode_eval, mode_project, ModeIndex, ModeVector};
use crate::propagators::{
    egorov_check, gyrator, q2_propagator, t0_fio_propagator, warmup_propagator, Chart, ChartedTime, EgorovGen,
};
use crate::spectral::{berezanskii_check, deficiency_tail, truncated_propagator_auto, Generator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Stationary,
    Separatrix,
    Bounded,
    Unbounded,
    /// A loop collapsed onto its stationary point.
    Point,
}

impl CurveKind {
    pub fn name(self) -> &'static str {
        match self {
            CurveKind::Stationary => "stationary",
            CurveKind::Separatrix => "separatrix",
            CurveKind::Bounded => "bounded",
            CurveKind::Unbounded => "unbounded",
            CurveKind::Point => "point",
        }
    }
}

/// A sampled piece of a `p0` level set; points are `[t, x, xi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub c0: f64,
    pub points: Vec<[f64; 3]>,
}

/// Splits `pts` where `keep` fails or the time step jumps.
fn runs(pts: &[[f64; 3]], keep: impl Fn(&[f64; 3]) -> bool) -> Vec<Vec<[f64; 3]>> {
    let step = pts.windows(2).map(|w| (w[1][0] - w[0][0]).abs()).filter(|d| *d > 0.0).fold(f64::INFINITY, f64::min);
    let mut out: Vec<Vec<[f64; 3]>> = Vec::new();
    let mut cur: Vec<[f64; 3]> = Vec::new();
    for p in pts {
        let jump = cur.last().is_some_and(|q| (p[0] - q[0]).abs() > 1.5 * step);
        if !keep(p) || jump {
            if cur.len() > 1 {
                out.push(std::mem::take(&mut cur));
            }
            cur.clear();
        }
        if keep(p) {
            cur.push(*p);
        }
    }
    if cur.len() > 1 {
        out.push(cur);
    }
    out
}

/// Phase portrait of `p0`: the four stationary points, the `C0 = 0`
/// separatrix (circle of radius `sqrt(3h)` and the `x = 0` axis) and both
/// components of every requested level inside `radius`. Without `mirror`
/// only the upper half plane `xi >= 0` is kept for the flow lines.
pub fn portrait_curves(h: f64, c0s: &[f64], radius: f64, samples: usize, mirror: bool) -> Result<Vec<Curve>> {
    if !(radius > 0.0) || samples < 8 {
        return Err(Error::InvalidInput("portrait needs a positive extent and at least 8 samples".into()));
    }
    let (rh, r3) = (h.sqrt(), (3.0 * h).sqrt());
    let mut out: Vec<Curve> = [[rh, 0.0], [-rh, 0.0], [0.0, r3], [0.0, -r3]]
        .iter()
        .map(|p| Curve { kind: CurveKind::Stationary, c0: 0.0, points: vec![[0.0, p[0], p[1]]] })
        .collect();
    let keep = |p: &[f64; 3]| (mirror || p[2] >= 0.0) && p[1].hypot(p[2]) <= radius;
    let mut push = |kind, c0, pts: &[[f64; 3]], split: bool| {
        if split {
            for r in runs(pts, keep) {
                out.push(Curve { kind, c0, points: r });
            }
        } else if !pts.is_empty() {
            out.push(Curve { kind, c0, points: pts.to_vec() });
        }
    };
    // separatrix arcs approach the stationary points at rate sqrt(3h)
    let tmax = 8.0 / r3;
    for (x, xi) in [(r3, 0.0), (-r3, 0.0), (0.0, 0.0)] {
        let orbit = P0Orbit::new(PhasePoint1D::new(x, xi, h))?;
        let pts: Vec<[f64; 3]> = (0..=2 * samples)
            .filter_map(|j| {
                let t = -tmax + tmax * j as f64 / samples as f64;
                orbit.at(t).ok().map(|q| [t, q.x, q.xi])
            })
            .collect();
        push(CurveKind::Separatrix, 0.0, &pts, true);
    }
    for &c0 in c0s {
        if c0 == 0.0 {
            continue;
        }
        let ls = p0_level_set(h, c0, samples, radius)?;
        if let Some(lp) = &ls.bounded {
            push(CurveKind::Bounded, c0, lp, !mirror);
        }
        if let Some([x, xi]) = ls.collapsed {
            push(CurveKind::Point, c0, &[[0.0, x, xi]], false);
        }
        push(CurveKind::Unbounded, c0, &ls.unbounded, true);
    }
    Ok(out)
}

/// The real components of `p0 = C0` with the Weierstrass data behind them.
pub fn ellcurve_curves(h: f64, c0: f64, radius: f64, samples: usize) -> Result<(Vec<Curve>, EllipticData)> {
    let data = EllipticData::from_p0(h, c0)?;
    let ls = p0_level_set(h, c0, samples, radius)?;
    let mut out = Vec::new();
    if let Some(lp) = ls.bounded {
        out.push(Curve { kind: CurveKind::Bounded, c0, points: lp });
    }
    if let Some([x, xi]) = ls.collapsed {
        out.push(Curve { kind: CurveKind::Point, c0, points: vec![[0.0, x, xi]] });
    }
    if !ls.unbounded.is_empty() {
        out.push(Curve { kind: CurveKind::Unbounded, c0, points: ls.unbounded });
    }
    Ok((out, data))
}

pub(super) fn portrait(cfg: &RunConfig) -> Result<Checked<Report>> {
    let h = cfg.h;
    let c0s = cfg.list_or("c0", &[-0.05, -0.025, -0.01, 0.01, 0.025, 0.05])?;
    let radius = cfg.f64_or("extent", 4.0 * h.sqrt())?;
    let curves = portrait_curves(h, &c0s, radius, cfg.usize_or("samples", 256)?, cfg.flag("mirror")?)?;
    let mut table = Table::new(&["curve", "kind", "c0", "t", "x", "xi"]);
    for (i, c) in curves.iter().enumerate() {
        for p in &c.points {
            table.push(vec![i.into(), c.kind.name().into(), c.c0.into(), p[0].into(), p[1].into(), p[2].into()]);
        }
    }
    let json = json!({ "curves": curves });
    Ok(Checked::new(Report { table, json, bare_json: false }))
}

pub(super) fn ellcurve(cfg: &RunConfig) -> Result<Checked<Report>> {
    let h = cfg.h;
    let c0s = cfg.list_or("c0", &[0.025])?;
    let [c0] = c0s[..] else {
        return Err(Error::InvalidInput(format!("ellcurve takes one c0 value, got {}", c0s.len())));
    };
    let radius = cfg.f64_or("extent", 4.0 * h.sqrt())?;
    let (curves, data) = ellcurve_curves(h, c0, radius, cfg.usize_or("samples", 256)?)?;
    let mut table = Table::new(&["component", "t", "x", "xi"]);
    for c in &curves {
        for p in &c.points {
            table.push(vec![c.kind.name().into(), p[0].into(), p[1].into(), p[2].into()]);
        }
    }
    let json = json!({
        "g2": data.g2,
        "g3": data.g3,
        "discriminant": data.delta,
        "omega2": data.omega2,
        "components": curves,
    });
    Ok(Checked::new(Report { table, json, bare_json: false }))
}

fn grid_table(f: &GridWavefunction) -> Table {
    let g = f.grid();
    if g.dims() == 1 {
        let mut t = Table::new(&["x", "re", "im"]);
        for (x, z) in g.axis(0).points().zip(f.values()) {
            t.push(vec![x.into(), z.re.into(), z.im.into()]);
        }
        t
    } else {
        let mut t = Table::new(&["x", "y", "re", "im"]);
        let ny = g.axis(1).n();
        for (i, z) in f.values().iter().enumerate() {
            let (x, y) = (g.axis(0).point(i / ny), g.axis(1).point(i % ny));
            t.push(vec![x.into(), y.into(), z.re.into(), z.im.into()]);
        }
        t
    }
}

fn grid_report(f: Checked<GridWavefunction>) -> Result<Checked<Report>> {
    let json = serde_json::to_value(f.value.to_record())?;
    Ok(Checked::with(Report { table: grid_table(&f.value), json, bare_json: true }, f.warnings))
}

fn grid(cfg: &RunConfig, dims: usize, points: usize, extent: f64) -> Result<Grid> {
    let ax = Axis::new(cfg.usize_or("grid-points", points)?, cfg.f64_or("extent", extent)?)?;
    Grid::from_axes(vec![ax; dims], cfg.h)
}

pub(super) fn modes(cfg: &RunConfig) -> Result<Checked<Report>> {
    let h = cfg.h;
    let idx = ModeIndex::new(cfg.usize_or("m", 0)?, cfg.usize_or("n", 0)?);
    let dims = cfg.usize_or("dims", 2)?;
    if dims != 1 && dims != 2 {
        return Err(Error::InvalidInput(format!("dims must be 1 or 2, got {dims}")));
    }
    let g = grid(cfg, dims, 128, 8.0 * h.sqrt())?;
    grid_report(mode_eval(idx, h, &g)?)
}

fn load_input(cfg: &RunConfig) -> Result<Option<GridWavefunction>> {
    let Some(path) = cfg.opt_str("input")? else { return Ok(None) };
    let f = GridWavefunction::from_json(&fs::read_to_string(path)?)?;
    if f.grid().h() != cfg.h {
        return Err(Error::InvalidInput(format!("input was sampled at h = {}, run has h = {}", f.grid().h(), cfg.h)));
    }
    Ok(Some(f))
}

fn single_time(cfg: &RunConfig) -> Result<f64> {
    match cfg.list_or("t", &[])?[..] {
        [t] => Ok(t),
        _ => Err(Error::InvalidInput("propagate needs exactly one --t".into())),
    }
}

pub(super) fn propagate(cfg: &RunConfig) -> Result<Checked<Report>> {
    let h = cfg.h;
    let t = single_time(cfg)?;
    let gen = cfg.str_or("gen", "")?.to_ascii_lowercase();
    let idx = ModeIndex::new(cfg.usize_or("m", 0)?, cfg.usize_or("n", 0)?);
    if let Some(base) = gen.strip_suffix("-truncated") {
        let generator: Generator = base.parse()?;
        let v = match load_input(cfg)? {
            Some(f) => mode_project(&f, 32, 32)?,
            None => ModeVector::basis(idx.m, idx.n),
        };
        let w = truncated_propagator_auto(generator, t, h, &v)?.pruned(1e-14);
        let mut table = Table::new(&["m", "n", "re", "im"]);
        let mut rows = Vec::new();
        for (k, c) in w.iter() {
            table.push(vec![k.m.into(), k.n.into(), c.re.into(), c.im.into()]);
            rows.push(json!({ "m": k.m, "n": k.n, "re": c.re, "im": c.im }));
        }
        return Ok(Checked::new(Report { table, json: json!({ "modes": rows }), bare_json: false }));
    }
    let (dims, points, extent) = match gen.as_str() {
        "warmup" | "gyrator" => (2, 128, 8.0 * h.sqrt()),
        "t0-fio" | "t0" => (1, 256, 14.0 * h.sqrt()),
        "q2" => (1, 256, 8.0 * h.sqrt()),
        "" => return Err(Error::InvalidInput("propagate needs --gen".into())),
        g => return Err(Error::InvalidInput(format!("unknown propagator {g:?}"))),
    };
    let v = match load_input(cfg)? {
        Some(f) => f,
        None => {
            let g = grid(cfg, dims, points, extent)?;
            let idx = if dims == 1 { ModeIndex::new(idx.m, 0) } else { idx };
            mode_eval(idx, h, &g)?.value
        }
    };
    let out = match gen.as_str() {
        "warmup" => warmup_propagator(&v, t, h)?,
        "gyrator" => {
            let ct = match cfg.str_or("chart", "auto")? {
                "auto" => ChartedTime::auto(t),
                "frequency" => ChartedTime::new(t, Chart::Frequency)?,
                "position" => ChartedTime::new(t, Chart::Position)?,
                c => return Err(Error::InvalidInput(format!("unknown chart {c:?}"))),
            };
            gyrator(&v, ct)?
        }
        "q2" => q2_propagator(&v, t, h)?,
        _ => t0_fio_propagator(&v, t, h)?,
    };
    grid_report(out)
}

/// Relative increment below which a deficiency sum counts as converged.
const PLATEAU_TOL: f64 = 1e-8;

pub(super) fn deficiency(cfg: &RunConfig) -> Result<Checked<Report>> {
    let n = cfg.usize_or("n", 2)?;
    let big_m = cfg.usize_or("m-max", 500)?;
    let mut table = Table::new(&["z", "m", "partial_sum"]);
    let mut reports = Vec::new();
    for (label, z) in [("+i", Complex64::new(0.0, 1.0)), ("-i", Complex64::new(0.0, -1.0))] {
        let r = deficiency_tail(n, z, big_m)?;
        for (k, s) in r.partial_sums.iter().enumerate() {
            table.push(vec![label.into(), (r.start + k).into(), (*s).into()]);
        }
        reports.push(json!({
            "z": label,
            "report": r,
            "plateaued": r.plateaued(PLATEAU_TOL),
        }));
    }
    let json = json!({
        "n": n,
        "m_max": big_m,
        "plateau_tol": PLATEAU_TOL,
        "deficiency": reports,
        "berezanskii": berezanskii_check(n, big_m)?,
    });
    Ok(Checked::new(Report { table, json, bare_json: false }))
}

pub(super) fn egorov(cfg: &RunConfig) -> Result<Checked<Report>> {
    let h = cfg.h;
    let gen: EgorovGen = cfg.str_or("gen", "gyrator")?.parse()?;
    let times = cfg.list_or("t", &[0.5])?;
    let (dims, g, f0, g0) = match gen {
        EgorovGen::Gyrator => (2, grid(cfg, 2, 64, 8.0 * h.sqrt())?, ModeIndex::new(1, 0), ModeIndex::new(0, 1)),
        EgorovGen::T0 => (1, grid(cfg, 1, 256, 14.0 * h.sqrt())?, ModeIndex::new(0, 0), ModeIndex::new(0, 0)),
    };
    let sigma = QuadraticSymbol::parse(dims, cfg.str_or("symbol", "x2")?)?;
    let mut warnings: Vec<Warning> = Vec::new();
    let mut state = |key: &str, default: ModeIndex| -> Result<GridWavefunction> {
        let c = mode_eval(cfg.mode_or(key, default)?, h, &g)?;
        warnings.extend(c.warnings);
        Ok(c.value)
    };
    let (f, k) = (state("f", f0)?, state("g", g0)?);
    let mut table = Table::new(&["t", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "deviation"]);
    let mut rows = Vec::new();
    for &t in &times {
        let r = egorov_check(&sigma, t, h, &f, &k, gen)?;
        let row: Vec<Cell> =
            vec![t.into(), r.lhs.re.into(), r.lhs.im.into(), r.rhs.re.into(), r.rhs.im.into(), r.deviation.into()];
        table.push(row);
        rows.push(json!({ "t": t, "result": r }));
    }
    Ok(Checked::with(Report { table, json: json!({ "rows": rows }), bare_json: false }, warnings))
}
