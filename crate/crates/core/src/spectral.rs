//! Jacobi-matrix view of `T4` on a fixed `y` band.
//!
//! For fixed `n` the generator is a symmetric tridiagonal matrix with zero
//! diagonal and off-diagonal `beta_m^n`. The bands `n = 0` (where `beta_1 = 0`
//! splits off a 2x2 block) and `n = 1` (where `beta_0 = 0`) are handled by
//! starting every recursion at the first index of the unbounded sub-band.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modes::{beta, ModeIndex, ModeVector};

/// `zeta(3/2)`.
const ZETA_3_2: f64 = 2.612_375_348_685_488;

/// Partial sums above this are treated as overflow.
const OVERFLOW: f64 = 1e280;

/// First index of the unbounded sub-band on band `n`.
pub fn band_start(n: usize) -> usize {
    match n {
        0 => 2,
        1 => 1,
        _ => 0,
    }
}

/// Off-diagonal entries `beta_m^n`, `m = 0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiBand {
    pub n: usize,
    pub off_diag: Vec<f64>,
}

impl JacobiBand {
    pub fn new(n: usize, len: usize) -> Self {
        JacobiBand { n, off_diag: (0..len).map(|m| beta(m, n)).collect() }
    }
}

/// `(t4 g)_m = beta_{m-1} g_{m-1} + beta_m g_{m+1}` on a finite sequence; the
/// last entry omits the missing `g_{len}` term.
pub fn t4_band_apply(g: &[Complex64], n: usize) -> Vec<Complex64> {
    let len = g.len();
    (0..len)
        .map(|m| {
            let mut s = Complex64::default();
            if m > 0 {
                s += g[m - 1] * beta(m - 1, n);
            }
            if m + 1 < len {
                s += g[m + 1] * beta(m, n);
            }
            s
        })
        .collect()
}

fn check_len(len: usize, need: usize, what: &str) -> Result<()> {
    if len < need {
        return Err(Error::InvalidInput(format!("{what}: need at least {need} entries, got {len}")));
    }
    Ok(())
}

/// Solutions of `beta_{m-1} y_{m-1} + beta_m y_{m+1} = z y_m` started at the
/// band start with `y_s = a`, `y_{s+1} = b`; entries below the start are zero.
fn recurse(n: usize, z: Complex64, len: usize, a: Complex64, b: Complex64) -> Result<Vec<Complex64>> {
    let s = band_start(n);
    let mut y = vec![Complex64::default(); len];
    if s < len {
        y[s] = a;
    }
    if s + 1 < len {
        y[s + 1] = b;
    }
    for m in (s + 1)..len.saturating_sub(1) {
        let bm = beta(m, n);
        if bm == 0.0 {
            return Err(Error::StructuralZero { m, n });
        }
        y[m + 1] = (z * y[m] - y[m - 1] * beta(m - 1, n)) / bm;
    }
    Ok(y)
}

/// `P_m(z)`, `m = 0..=M`, with `P_s = 1` at the band start and `P_{s-1} = 0`.
pub fn polynomial_solution(n: usize, z: Complex64, big_m: usize) -> Result<Vec<Complex64>> {
    if big_m < 2 {
        return Err(Error::InvalidInput(format!("M must be at least 2, got {big_m}")));
    }
    let s = band_start(n);
    let b0 = beta(s, n);
    if b0 == 0.0 {
        return Err(Error::StructuralZero { m: s, n });
    }
    recurse(n, z, big_m + 1, Complex64::new(1.0, 0.0), z / b0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeficiencyReport {
    pub n: usize,
    pub z: Complex64,
    /// Index of `P` that carries the first term.
    pub start: usize,
    /// `sum_{m = start}^{start + k} |P_m(z)|^2`.
    pub partial_sums: Vec<f64>,
    /// Last term divided by the last partial sum.
    pub relative_increment: f64,
    /// Set when the sums were cut short to avoid overflow.
    pub overflow_at: Option<usize>,
}

impl DeficiencyReport {
    pub fn plateaued(&self, tol: f64) -> bool {
        self.overflow_at.is_none() && self.relative_increment < tol
    }
}

/// Partial sums of `|P_m(z)|^2` over the unbounded sub-band, `M + 1` terms.
pub fn deficiency_tail(n: usize, z: Complex64, big_m: usize) -> Result<DeficiencyReport> {
    if z.im == 0.0 {
        return Err(Error::Domain("deficiency sums need Im z != 0".into()));
    }
    let s = band_start(n);
    let p = polynomial_solution(n, z, (s + big_m).max(2))?;
    let mut sums = Vec::with_capacity(big_m + 1);
    let mut acc = 0.0;
    let mut overflow_at = None;
    for (k, v) in p[s..=s + big_m].iter().enumerate() {
        acc += v.norm_sqr();
        if !acc.is_finite() || acc > OVERFLOW {
            overflow_at = Some(k);
            break;
        }
        sums.push(acc);
    }
    let last = *sums.last().unwrap_or(&0.0);
    let relative_increment = if sums.len() >= 2 { (last - sums[sums.len() - 2]) / last } else { 1.0 };
    Ok(DeficiencyReport { n, z, start: s, partial_sums: sums, relative_increment, overflow_at })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BerezanskiiReport {
    pub n: usize,
    pub bounded_diag: bool,
    /// First index from which `a_{j-1} a_{j+1} <= a_j^2` holds up to `M`.
    pub log_concave_from: Option<usize>,
    /// `sum_{j = start}^{M} 1/a_j` with `a_j = -beta_j^n`.
    pub inv_sum_partial: f64,
    /// `K zeta(3/2)` with `K = max_j (j+1)^{3/2} / a_j`.
    pub comparison_bound: f64,
    pub within_bound: bool,
}

/// Checks the hypotheses of Berezanskii's non-self-adjointness criterion on
/// band `n` up to index `M`.
pub fn berezanskii_check(n: usize, big_m: usize) -> Result<BerezanskiiReport> {
    if big_m < 3 {
        return Err(Error::InvalidInput(format!("M must be at least 3, got {big_m}")));
    }
    let s = band_start(n);
    let a: Vec<f64> = (0..=big_m).map(|j| -beta(j, n)).collect();
    if a[s..].iter().any(|&x| x <= 0.0) {
        return Err(Error::Consistency(format!("non-positive a_j on band {n}")));
    }
    let mut log_concave_from = None;
    for j in ((s + 1)..big_m).rev() {
        if a[j - 1] * a[j + 1] <= a[j] * a[j] {
            log_concave_from = Some(j);
        } else {
            break;
        }
    }
    let inv_sum_partial: f64 = a[s..].iter().map(|x| 1.0 / x).sum();
    // a_j (j+1)^{-3/2} increases towards 1/2, so the maximum of the ratio is
    // attained inside the scanned range.
    let k = (s..=big_m).map(|j| ((j + 1) as f64).powf(1.5) / a[j]).fold(0.0, f64::max);
    let comparison_bound = k * ZETA_3_2;
    Ok(BerezanskiiReport {
        n,
        bounded_diag: true,
        log_concave_from,
        inv_sum_partial,
        comparison_bound,
        within_bound: inv_sum_partial <= comparison_bound,
    })
}

/// `[g,f]_M = beta_M (g_M conj(f_{M+1}) - g_{M+1} conj(f_M))`.
pub fn bracket(g: &[Complex64], f: &[Complex64], n: usize, big_m: usize) -> Result<Complex64> {
    check_len(g.len().min(f.len()), big_m + 2, "bracket")?;
    Ok(beta(big_m, n) * (g[big_m] * f[big_m + 1].conj() - g[big_m + 1] * f[big_m].conj()))
}

/// Boundary sequences `u`, `v` solving the homogeneous recursion.
#[derive(Debug, Clone)]
pub struct BoundarySeqs {
    pub n: usize,
    pub u: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

/// `u_s = 1, u_{s+1} = 0, v_s = 0, v_{s+1} = 1/beta_s` at the band start `s`.
pub fn boundary_seqs(n: usize, len: usize) -> Result<BoundarySeqs> {
    let s = band_start(n);
    let zero = Complex64::default();
    let u = recurse(n, zero, len, Complex64::new(1.0, 0.0), zero)?;
    let v = recurse(n, zero, len, zero, Complex64::new(1.0 / beta(s, n), 0.0))?;
    Ok(BoundarySeqs { n, u, v })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaEstimate {
    /// `[f,v]_M` at `M_max`.
    pub gamma1: Complex64,
    /// `[f,u]_M` at `M_max`.
    pub gamma2: Complex64,
    /// Largest deviation from the final value over `M in [M_max/10, M_max]`.
    pub spread1: f64,
    pub spread2: f64,
    pub converged: bool,
}

pub const GAMMA_TOL: f64 = 1e-6;

/// Boundary values at infinity estimated at `M_max`.
pub fn gamma_boundary(f: &[Complex64], n: usize, m_max: usize) -> Result<GammaEstimate> {
    check_len(f.len(), m_max + 2, "gamma_boundary")?;
    let bs = boundary_seqs(n, m_max + 2)?;
    let lo = (m_max / 10).max(band_start(n));
    let g1 = bracket(f, &bs.v, n, m_max)?;
    let g2 = bracket(f, &bs.u, n, m_max)?;
    let mut spread1: f64 = 0.0;
    let mut spread2: f64 = 0.0;
    for m in lo..=m_max {
        spread1 = spread1.max((bracket(f, &bs.v, n, m)? - g1).norm());
        spread2 = spread2.max((bracket(f, &bs.u, n, m)? - g2).norm());
    }
    Ok(GammaEstimate {
        gamma1: g1,
        gamma2: g2,
        spread1,
        spread2,
        converged: spread1 < GAMMA_TOL && spread2 < GAMMA_TOL,
    })
}

/// Parameter `h_n` of a self-adjoint extension on one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtensionParam {
    Finite(f64),
    Infinity,
}

/// `[f,v]_M - h [f,u]_M`, or `[f,u]_M` when `h` is infinite.
pub fn extension_residual(f: &[Complex64], n: usize, h: ExtensionParam, big_m: usize) -> Result<Complex64> {
    check_len(f.len(), big_m + 2, "extension_residual")?;
    let bs = boundary_seqs(n, big_m + 2)?;
    let fu = bracket(f, &bs.u, n, big_m)?;
    Ok(match h {
        ExtensionParam::Finite(h) => bracket(f, &bs.v, n, big_m)? - h * fu,
        ExtensionParam::Infinity => fu,
    })
}

/// Generators with a tridiagonal or diagonal mode-basis matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Generator {
    T4,
    T5,
    /// `(T3 + sqrt(3) T8)/2`
    T38,
    /// The `x`-only generator `T0`.
    T0,
    /// `-sqrt(2) h^{3/2} P0` is the Weyl quantization of
    /// `p0 = x(x^2 + xi^2)/2 - 3hx/2`; its couplings are `sqrt(m+1)(1/2 - m)/2`.
    P0,
}

/// Off-diagonal entry `m, m+1` of `P0`.
pub fn p0_coupling(m: usize) -> f64 {
    0.5 * ((m + 1) as f64).sqrt() * (0.5 - m as f64)
}

impl std::str::FromStr for Generator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t4" => Ok(Generator::T4),
            "t5" => Ok(Generator::T5),
            "t38" => Ok(Generator::T38),
            "t0" => Ok(Generator::T0),
            "p0" => Ok(Generator::P0),
            _ => Err(Error::InvalidInput(format!("unknown generator {s:?}"))),
        }
    }
}

/// Eigendecomposition of one truncated band, reusable across times.
#[derive(Debug, Clone)]
pub struct BandExponential {
    gen: Generator,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

impl BandExponential {
    pub fn new(gen: Generator, n: usize, size: usize) -> Self {
        let mut mat = DMatrix::zeros(size, size);
        match gen {
            Generator::T38 => {
                for m in 0..size {
                    mat[(m, m)] = crate::modes::t38_eigenvalue(ModeIndex::new(m, n));
                }
            }
            _ => {
                let nb = if gen == Generator::T0 { 0 } else { n };
                for m in 0..size - 1 {
                    let b = if gen == Generator::P0 { p0_coupling(m) } else { beta(m, nb) };
                    mat[(m, m + 1)] = b;
                    mat[(m + 1, m)] = b;
                }
            }
        }
        let eig = SymmetricEigen::new(mat);
        BandExponential { gen, eigvals: eig.eigenvalues, eigvecs: eig.eigenvectors }
    }

    pub fn size(&self) -> usize {
        self.eigvals.len()
    }

    /// `exp(i t G / h) c` with the scaled generator `G = -sqrt(2) h^{3/2} T`.
    pub fn apply(&self, t: f64, h: f64, c: &[Complex64]) -> Vec<Complex64> {
        let size = self.size();
        let tau = -t * (2.0 * h).sqrt();
        // T5 = U T4 U^* with U = diag((-i)^m)
        let phase = |m: usize| -> Complex64 {
            match m % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, -1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, 1.0),
            }
        };
        let input: Vec<Complex64> = (0..size)
            .map(|m| {
                let x = c.get(m).copied().unwrap_or_default();
                if self.gen == Generator::T5 {
                    x * phase(m).conj()
                } else {
                    x
                }
            })
            .collect();
        let mut out = vec![Complex64::default(); size];
        for k in 0..size {
            let col = self.eigvecs.column(k);
            let proj: Complex64 = (0..size).map(|m| input[m] * col[m]).sum();
            if proj == Complex64::default() {
                continue;
            }
            let w = proj * Complex64::from_polar(1.0, tau * self.eigvals[k]);
            for m in 0..size {
                out[m] += w * col[m];
            }
        }
        if self.gen == Generator::T5 {
            for (m, o) in out.iter_mut().enumerate() {
                *o *= phase(m);
            }
        }
        out
    }
}

fn band_vectors(v: &ModeVector) -> BTreeMap<usize, Vec<(usize, Complex64)>> {
    let mut bands: BTreeMap<usize, Vec<(usize, Complex64)>> = BTreeMap::new();
    for (k, c) in v.iter() {
        bands.entry(k.n).or_default().push((k.m, c));
    }
    bands
}

fn propagate_at(gen: Generator, t: f64, h: f64, size: usize, v: &ModeVector) -> ModeVector {
    let mut out = ModeVector::zero();
    for (n, entries) in band_vectors(v) {
        let mut c = vec![Complex64::default(); size];
        for (m, x) in entries {
            c[m] = x;
        }
        let w = BandExponential::new(gen, n, size).apply(t, h, &c);
        for (m, x) in w.into_iter().enumerate() {
            out.set(ModeIndex::new(m, n), x);
        }
    }
    out
}

pub const LEAKAGE_TOL: f64 = 1e-10;

/// `exp(i t G / h) v` on the first `size` modes of every occupied band,
/// cross-checked against a run at `2 size`.
pub fn truncated_propagator(gen: Generator, t: f64, h: f64, size: usize, v: &ModeVector) -> Result<ModeVector> {
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
    }
    let (mmax, _) = v.max_indices();
    if size < 4 || mmax + 2 > size {
        return Err(Error::InvalidInput(format!("truncation {size} too small for input up to m = {mmax}")));
    }
    let a = propagate_at(gen, t, h, size, v);
    let b = propagate_at(gen, t, h, 2 * size, v);
    let change = (&a - &b).norm();
    if change > LEAKAGE_TOL {
        return Err(Error::TruncationLeakage { change, size });
    }
    Ok(b.pruned(0.0))
}

/// [`truncated_propagator`] starting from 64 modes and doubling until the
/// leakage test passes.
pub fn truncated_propagator_auto(gen: Generator, t: f64, h: f64, v: &ModeVector) -> Result<ModeVector> {
    let (mmax, _) = v.max_indices();
    let mut size = 64usize.max((mmax + 2).next_power_of_two());
    loop {
        match truncated_propagator(gen, t, h, size, v) {
            Err(Error::TruncationLeakage { .. }) if size < 2048 => size *= 2,
            r => return r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_first_steps() {
        let z = c(0.3, -0.7);
        let p = polynomial_solution(2, z, 5).unwrap();
        assert_eq!(p[0], c(1.0, 0.0));
        assert!((p[1] - (-2.0) * z).norm() < 1e-15);
        // hand step: P2 = (z P1 - beta0 P0) / beta1
        let p2 = (z * p[1] - beta(0, 2)) / beta(1, 2);
        assert!((p[2] - p2).norm() < 1e-14);
    }

    #[test]
    fn polynomial_at_zero_alternates() {
        let p = polynomial_solution(2, c(0.0, 0.0), 20).unwrap();
        for (m, v) in p.iter().enumerate() {
            if m % 2 == 1 {
                assert_eq!(*v, c(0.0, 0.0));
            } else {
                assert!(v.norm() > 0.0);
            }
        }
    }

    #[test]
    fn degenerate_bands_start_late() {
        let p = polynomial_solution(0, c(0.0, 1.0), 6).unwrap();
        assert_eq!(p[0], c(0.0, 0.0));
        assert_eq!(p[1], c(0.0, 0.0));
        assert_eq!(p[2], c(1.0, 0.0));
        let p = polynomial_solution(1, c(0.0, 1.0), 6).unwrap();
        assert_eq!(p[0], c(0.0, 0.0));
        assert_eq!(p[1], c(1.0, 0.0));
    }

    #[test]
    fn solution_satisfies_recursion() {
        for n in 0..5 {
            let z = c(0.2, 1.0);
            let p = polynomial_solution(n, z, 40).unwrap();
            let s = band_start(n);
            for m in (s + 1)..40 {
                let lhs = p[m - 1] * beta(m - 1, n) + p[m + 1] * beta(m, n);
                assert!((lhs - z * p[m]).norm() < 1e-9 * (1.0 + p[m].norm()));
            }
        }
    }

    #[test]
    fn deficiency_sums() {
        let r = deficiency_tail(2, c(0.0, 1.0), 0).unwrap();
        assert_eq!(r.partial_sums, vec![1.0]);
        let a = deficiency_tail(2, c(0.0, 1.0), 200).unwrap();
        let b = deficiency_tail(2, c(0.0, -1.0), 200).unwrap();
        for w in a.partial_sums.windows(2) {
            assert!(w[1] >= w[0]);
        }
        for (x, y) in a.partial_sums.iter().zip(&b.partial_sums) {
            assert!((x - y).abs() <= 1e-12 * x);
        }
        assert!(a.relative_increment < 1e-2);
        assert!(deficiency_tail(2, c(1.0, 0.0), 10).is_err());
    }

    #[test]
    fn berezanskii_hypotheses() {
        let r = berezanskii_check(2, 1000).unwrap();
        assert!(r.bounded_diag);
        assert!(r.log_concave_from.is_some());
        assert!((r.comparison_bound - 2.0 * ZETA_3_2).abs() < 1e-12);
        assert!(r.within_bound);
        // direct sum against the integral bound 2 (1 + int_1^inf x^{-3/2} dx) = 6
        let direct: f64 = (0..=1000).map(|j| 2.0 / ((j + 1) as f64).powf(1.5)).sum();
        assert!((direct - r.inv_sum_partial).abs() < 1e-10);
        assert!(direct < 6.0);
        for n in [0, 1, 3, 7] {
            let r = berezanskii_check(n, 500).unwrap();
            assert!(r.within_bound && r.log_concave_from.is_some(), "n={n}");
        }
    }

    #[test]
    fn bracket_antisymmetry() {
        let g: Vec<_> = (0..10).map(|k| c(k as f64 * 0.3 - 1.0, 0.0)).collect();
        for m in 0..8 {
            assert_eq!(bracket(&g, &g, 2, m).unwrap(), c(0.0, 0.0));
        }
    }

    #[test]
    fn bracket_of_boundary_sequences() {
        let bs = boundary_seqs(2, 10).unwrap();
        let want = beta(1, 2) * (bs.u[1] * bs.v[2] - bs.u[2] * bs.v[1]);
        assert_eq!(bracket(&bs.u, &bs.v, 2, 1).unwrap(), want);
        for n in 0..6 {
            let bs = boundary_seqs(n, 400).unwrap();
            for m in band_start(n)..398 {
                let w = bracket(&bs.u, &bs.v, n, m).unwrap();
                assert!((w - c(1.0, 0.0)).norm() < 1e-12, "n={n} m={m}: {w}");
            }
            let tu = t4_band_apply(&bs.u, n);
            let tv = t4_band_apply(&bs.v, n);
            let s = band_start(n);
            for m in 0..398 {
                let want_v = if m == s { 1.0 } else { 0.0 };
                assert!(tu[m].norm() < 1e-9 * (1.0 + bs.u[m + 1].norm()), "n={n} m={m}");
                assert!((tv[m] - want_v).norm() < 1e-9 * (1.0 + bs.v[m + 1].norm()), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn finite_sequences_have_zero_boundary_values() {
        let mut f = vec![c(0.0, 0.0); 600];
        for (k, x) in f.iter_mut().take(12).enumerate() {
            *x = c(1.0 / (k + 1) as f64, 0.5);
        }
        let g = gamma_boundary(&f, 2, 500).unwrap();
        assert_eq!(g.gamma1, c(0.0, 0.0));
        assert_eq!(g.gamma2, c(0.0, 0.0));
        for h in [ExtensionParam::Finite(0.0), ExtensionParam::Finite(2.5), ExtensionParam::Infinity] {
            assert_eq!(extension_residual(&f, 2, h, 500).unwrap(), c(0.0, 0.0));
        }
        let bs = boundary_seqs(2, 600).unwrap();
        let gu = gamma_boundary(&bs.u, 2, 500).unwrap();
        assert_eq!(gu.gamma2, c(0.0, 0.0));
    }

    #[test]
    fn extension_residual_cancels_by_construction() {
        let m = 300;
        let pp = polynomial_solution(2, c(0.0, 1.0), m + 2).unwrap();
        let pm = polynomial_solution(2, c(0.0, -1.0), m + 2).unwrap();
        let bs = boundary_seqs(2, m + 2).unwrap();
        let cp = bracket(&pm, &bs.v, 2, m).unwrap();
        let cm = -bracket(&pp, &bs.v, 2, m).unwrap();
        let f: Vec<_> = pp.iter().zip(&pm).map(|(a, b)| cp * a + cm * b).collect();
        let r = extension_residual(&f, 2, ExtensionParam::Finite(0.0), m).unwrap();
        assert!(r.norm() < 1e-6);
        let inf = extension_residual(&f, 2, ExtensionParam::Infinity, m).unwrap();
        assert_eq!(inf, gamma_boundary(&f, 2, m).unwrap().gamma2);
    }

    #[test]
    fn permutation_at_half_period() {
        let h: f64 = 0.1;
        let t = std::f64::consts::PI / (2.0 * h).sqrt();
        let w = truncated_propagator_auto(Generator::T4, t, h, &ModeVector::basis(0, 0)).unwrap();
        assert!((w.get(ModeIndex::new(1, 0)) - c(0.0, -1.0)).norm() < 1e-10);
        assert!(w.get(ModeIndex::new(0, 0)).norm() < 1e-10);
    }

    #[test]
    fn zero_time_is_identity() {
        let v = ModeVector::from_pairs([(ModeIndex::new(3, 2), c(0.2, 0.1)), (ModeIndex::new(5, 0), c(-1.0, 0.0))]);
        for gen in [Generator::T4, Generator::T5, Generator::T0, Generator::T38] {
            let w = truncated_propagator(gen, 0.0, 0.2, 32, &v).unwrap();
            assert!((&w - &v).norm() < 1e-12);
        }
    }

    #[test]
    fn invariant_block_closed_form() {
        let h = 0.05;
        for t in [0.3, 1.7, 4.0] {
            let w = truncated_propagator_auto(Generator::T4, t, h, &ModeVector::basis(1, 0)).unwrap();
            let th = (h / 2.0).sqrt() * t;
            assert!((w.get(ModeIndex::new(1, 0)) - c(th.cos(), 0.0)).norm() < 1e-12);
            assert!((w.get(ModeIndex::new(0, 0)) - c(0.0, -th.sin())).norm() < 1e-12);
        }
    }

    #[test]
    fn p0_is_t0_minus_quarter_position() {
        // x = sqrt(h/2)(a + a'), so h x / 2 = -sqrt(2) h^{3/2} (-(a + a')/4)
        for m in 0..20 {
            let want = beta(m, 0) - 0.25 * ((m + 1) as f64).sqrt();
            assert!((p0_coupling(m) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn leakage_is_reported() {
        let v = ModeVector::basis(2, 3);
        let r = truncated_propagator(Generator::T4, 50.0, 1.0, 8, &v);
        assert!(matches!(r, Err(Error::TruncationLeakage { .. })));
    }

    fn arb_seq(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| c(a, b)), len)
    }

    proptest! {
        #[test]
        fn greens_formula(g in arb_seq(52), f in arb_seq(52), n in 0usize..6, big_m in 0usize..50) {
            let tg = t4_band_apply(&g, n);
            let tf = t4_band_apply(&f, n);
            let lhs: Complex64 = (0..=big_m).map(|m| tg[m] * f[m].conj() - g[m] * tf[m].conj()).sum();
            let rhs = -bracket(&g, &f, n, big_m).unwrap();
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + lhs.norm()));
        }

        #[test]
        fn propagator_is_unitary(t in -20.0f64..20.0, re in -1.0f64..1.0, im in -1.0f64..1.0) {
            let v = ModeVector::from_pairs([
                (ModeIndex::new(0, 0), c(re, im)),
                (ModeIndex::new(2, 1), c(0.5, 0.0)),
                (ModeIndex::new(4, 3), c(0.0, -0.3)),
            ]);
            for gen in [Generator::T4, Generator::T5, Generator::T0, Generator::P0] {
                let w = propagate_at(gen, t, 0.1, 64, &v);
                prop_assert!((w.norm() - v.norm()).abs() < 1e-10);
            }
        }
    }
}
