use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A recursion coefficient vanished at an index where the band is not
    /// allowed to decouple.
    #[error("structural zero coupling beta({m},{n}) in recursion")]
    StructuralZero { m: usize, n: usize },

    #[error("argument within {distance:e} of a lattice pole")]
    PoleProximity { distance: f64 },

    #[error("flow blows up at t = {time}")]
    BlowUp { time: f64 },

    #[error("orbit too close to the separatrix to classify (C0 = {c0:e})")]
    ClassificationAmbiguity { c0: f64 },

    #[error("caustic: projection degenerates at t = {t}, x = {x}")]
    Caustic { t: f64, x: f64 },

    #[error("no characteristic reaches x = {x} at t = {t}")]
    NoSolution { t: f64, x: f64 },

    #[error("failed to converge: {0}")]
    NonConvergence(String),

    #[error("truncation leakage {change:e} exceeds tolerance at N = {size}")]
    TruncationLeakage { change: f64, size: usize },

    #[error("step rejected at t = {t}: conserved drift {drift:e}")]
    StepRejected { t: f64, drift: f64 },

    #[error("chart {chart} is not valid at t = {t}")]
    ChartInvalid { chart: &'static str, t: f64 },

    #[error("initial state not localized: mass {outside:e} outside the invariant disc")]
    LocalizationViolated { outside: f64 },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("fit window degenerate: {0}")]
    FitDegenerate(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Domain(_) | Error::ChartInvalid { .. } => 2,
            Error::Io(_) | Error::Json(_) => 4,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid_input",
            Error::Domain(_) => "domain",
            Error::StructuralZero { .. } => "structural_zero",
            Error::PoleProximity { .. } => "pole_proximity",
            Error::BlowUp { .. } => "blow_up",
            Error::ClassificationAmbiguity { .. } => "classification_ambiguity",
            Error::Caustic { .. } => "caustic",
            Error::NoSolution { .. } => "no_solution",
            Error::NonConvergence(_) => "non_convergence",
            Error::TruncationLeakage { .. } => "truncation_leakage",
            Error::StepRejected { .. } => "step_rejected",
            Error::ChartInvalid { .. } => "chart_invalid",
            Error::LocalizationViolated { .. } => "localization_violated",
            Error::Consistency(_) => "consistency",
            Error::FitDegenerate(_) => "fit_degenerate",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

/// Non-fatal numerical diagnostics attached to a result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Grid spacing is coarse relative to the mode width `sqrt(h)`.
    GridUnderresolved { spacing: f64, limit: f64 },
    /// L² mass near the box boundary; the discrete transform sees a periodic copy.
    Periodization { edge_mass: f64 },
    /// Spectral mass in the outer Nyquist shell.
    Aliasing { shell_mass: f64 },
    /// Interpolated sampling on a coarse grid.
    Interpolation { spacing: f64 },
    /// Oscillatory quadrature is close to its resolution limit.
    QuadratureResolution { detail: String },
    /// Samples near a moving singular point of a closed-form propagator.
    SingularPoint { x: f64, distance: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::GridUnderresolved { spacing, limit } => {
                write!(f, "grid spacing {spacing} exceeds {limit}")
            }
            Warning::Periodization { edge_mass } => {
                write!(f, "boundary mass {edge_mass:e}: transform is periodized")
            }
            Warning::Aliasing { shell_mass } => {
                write!(f, "Nyquist-shell mass {shell_mass:e}: possible aliasing")
            }
            Warning::Interpolation { spacing } => {
                write!(f, "interpolation on coarse grid (spacing {spacing})")
            }
            Warning::QuadratureResolution { detail } => write!(f, "quadrature: {detail}"),
            Warning::SingularPoint { x, distance } => {
                write!(f, "sample x = {x} within {distance:e} of singular point")
            }
        }
    }
}

/// A value together with the warnings raised while computing it.
#[derive(Debug, Clone)]
pub struct Checked<T> {
    pub value: T,
    pub warnings: Vec<Warning>,
}

impl<T> Checked<T> {
    pub fn new(value: T) -> Self {
        Checked { value, warnings: Vec::new() }
    }

    pub fn with(value: T, warnings: Vec<Warning>) -> Self {
        Checked { value, warnings }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Checked<U> {
        Checked { value: f(self.value), warnings: self.warnings }
    }

    pub fn into_inner(self) -> T {
        self.value
    }
}
