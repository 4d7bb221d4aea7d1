use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform periodic axis `x_j = -L + j dx`, `j = 0..n`, `dx = 2L/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    n: usize,
    half_extent: f64,
}

impl Axis {
    pub fn new(n: usize, half_extent: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::InvalidInput(format!("axis length must be a power of two >= 4, got {n}")));
        }
        if !(half_extent > 0.0) || !half_extent.is_finite() {
            return Err(Error::InvalidInput(format!("axis extent must be positive, got {half_extent}")));
        }
        Ok(Axis { n, half_extent })
    }

    /// Axis with the given spacing centred on the origin.
    pub fn with_spacing(n: usize, spacing: f64) -> Result<Self> {
        Axis::new(n, 0.5 * n as f64 * spacing)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.n as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_extent + j as f64 * self.spacing()
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Frequency axis seen by the semiclassical Fourier transform with parameter `h`.
    pub fn dual(&self, h: f64) -> Axis {
        Axis { n: self.n, half_extent: std::f64::consts::PI * h / self.spacing() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
    h: f64,
}

impl Grid {
    pub fn new_1d(x: Axis, h: f64) -> Self {
        Grid { axes: vec![x], h }
    }

    pub fn new_2d(x: Axis, y: Axis, h: f64) -> Self {
        Grid { axes: vec![x, y], h }
    }

    pub fn from_axes(axes: Vec<Axis>, h: f64) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidInput(format!("grid must have 1 or 2 axes, got {}", axes.len())));
        }
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
        }
        Ok(Grid { axes, h })
    }

    /// Square grid with the default extent `max(8 sqrt(h), 8)`.
    pub fn default_for(dims: usize, n: usize, h: f64) -> Result<Self> {
        let ax = Axis::new(n, (8.0 * h.sqrt()).max(8.0))?;
        Grid::from_axes(vec![ax; dims], h)
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn with_h(&self, h: f64) -> Grid {
        Grid { axes: self.axes.clone(), h }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n()).collect()
    }

    /// Volume element of one cell.
    pub fn cell(&self) -> f64 {
        self.axes.iter().map(|a| a.spacing()).product()
    }

    /// Grid of the semiclassical Fourier transform.
    pub fn dual(&self) -> Grid {
        Grid { axes: self.axes.iter().map(|a| a.dual(self.h)).collect(), h: self.h }
    }
}

/// Complex samples on a [`Grid`], row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridWavefunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} samples for the grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(GridWavefunction { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.len();
        GridWavefunction { grid, values: vec![Complex64::default(); n] }
    }

    pub fn from_fn_1d(grid: Grid, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let vals = grid.axis(0).points().map(f).collect();
        GridWavefunction::new(grid, vals)
    }

    pub fn from_fn_2d(grid: Grid, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let (ax, ay) = (*grid.axis(0), *grid.axis(1));
        let mut vals = Vec::with_capacity(grid.len());
        for x in ax.points() {
            for y in ay.points() {
                vals.push(f(x, y));
            }
        }
        GridWavefunction::new(grid, vals)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    fn check_same(&self, other: &GridWavefunction) -> Result<()> {
        if self.grid.axes != other.grid.axes {
            return Err(Error::InvalidInput("wavefunctions live on different grids".into()));
        }
        Ok(())
    }

    /// Discrete `L^2` inner product, antilinear in `self`.
    pub fn inner(&self, other: &GridWavefunction) -> Result<Complex64> {
        self.check_same(other)?;
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum();
        Ok(s * self.grid.cell())
    }

    pub fn distance(&self, other: &GridWavefunction) -> Result<f64> {
        self.check_same(other)?;
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.cell()).sqrt())
    }

    /// `self += a * x`.
    pub fn axpy(&mut self, a: Complex64, x: &GridWavefunction) -> Result<()> {
        self.check_same(x)?;
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += a * v;
        }
        Ok(())
    }

    pub fn scaled(&self, a: Complex64) -> GridWavefunction {
        GridWavefunction { grid: self.grid.clone(), values: self.values.iter().map(|v| v * a).collect() }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridWavefunction {
        GridWavefunction { grid: self.grid.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    pub fn conj(&self) -> GridWavefunction {
        self.map(|v| v.conj())
    }

    /// Fraction of the mass in the outer `frac` of each axis.
    pub fn edge_fraction(&self, frac: f64) -> f64 {
        let total: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let shape = self.grid.shape();
        let band: Vec<usize> = shape.iter().map(|&n| ((n as f64 * frac).ceil() as usize).max(1)).collect();
        let near = |j: usize, ax: usize| j < band[ax] || j >= shape[ax] - band[ax];
        let mut edge = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let on_edge = match shape.len() {
                1 => near(i, 0),
                _ => near(i / shape[1], 0) || near(i % shape[1], 1),
            };
            if on_edge {
                edge += v.norm_sqr();
            }
        }
        edge / total
    }

    pub fn to_record(&self) -> WavefunctionRecord {
        let mut samples = Vec::with_capacity(2 * self.values.len());
        for v in &self.values {
            samples.push(v.re);
            samples.push(v.im);
        }
        WavefunctionRecord {
            format: FORMAT_TAG.to_string(),
            version: FORMAT_VERSION,
            dims: self.grid.dims(),
            n: self.grid.shape(),
            spacing: self.grid.axes().iter().map(|a| a.spacing()).collect(),
            extent: self.grid.axes().iter().map(|a| a.half_extent()).collect(),
            h: self.grid.h(),
            samples,
        }
    }

    pub fn from_record(r: &WavefunctionRecord) -> Result<Self> {
        if r.format != FORMAT_TAG {
            return Err(Error::InvalidInput(format!("unknown wavefunction format tag {:?}", r.format)));
        }
        if r.version != FORMAT_VERSION {
            return Err(Error::InvalidInput(format!("unsupported wavefunction version {}", r.version)));
        }
        if r.n.len() != r.dims || r.extent.len() != r.dims || r.spacing.len() != r.dims {
            return Err(Error::InvalidInput("axis metadata does not match dims".into()));
        }
        let axes = r.n.iter().zip(&r.extent).map(|(&n, &l)| Axis::new(n, l)).collect::<Result<Vec<_>>>()?;
        for (a, &s) in axes.iter().zip(&r.spacing) {
            if (a.spacing() - s).abs() > 1e-12 * s.abs().max(1.0) {
                return Err(Error::InvalidInput(format!("spacing {s} inconsistent with extent")));
            }
        }
        let grid = Grid::from_axes(axes, r.h)?;
        if r.samples.len() != 2 * grid.len() {
            return Err(Error::InvalidInput("sample count does not match grid".into()));
        }
        let values = r.samples.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect();
        GridWavefunction::new(grid, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_record())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: WavefunctionRecord = serde_json::from_str(s)?;
        GridWavefunction::from_record(&r)
    }
}

pub const FORMAT_TAG: &str = "scmodes.grid-wavefunction";
pub const FORMAT_VERSION: u32 = 1;

/// On-disk layout of a [`GridWavefunction`]; see the README for the field list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionRecord {
    pub format: String,
    pub version: u32,
    pub dims: usize,
    pub n: Vec<usize>,
    pub spacing: Vec<f64>,
    pub extent: Vec<f64>,
    pub h: f64,
    pub samples: Vec<f64>,
}
