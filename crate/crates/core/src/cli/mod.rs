//! Command-line front end.
//!
//! Every command resolves a [`RunConfig`] from defaults, an optional JSON
//! config file and explicit flags (flags win), runs one driver and writes a
//! single output file atomically. CSV files open with a comment block that
//! records the configuration; SVG is rendered from the CSV text alone.

mod commands;
mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Checked, Error, Result};
use crate::modes::ModeIndex;

pub use commands::{ellcurve_curves, portrait_curves, Curve, CurveKind};
pub use render::{svg_from_csv, Cell, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SCMODES_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "scmodes", version, about = "Semiclassical mode algebra, flows and propagators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Flow lines of p0 in the (x, xi) plane with the separatrix and stationary points.
    Portrait(Flags),
    /// Real components of the elliptic curve p0 = C0.
    Ellcurve(Flags),
    /// Samples a Hermite-Gaussian mode on a grid.
    Modes(Flags),
    /// Runs a propagator on a mode or a stored wavefunction.
    Propagate(Flags),
    /// Deficiency partial sums and the Berezanskii report for one band.
    Deficiency(Flags),
    /// Egorov comparison of both sides of the conjugation identity.
    Egorov(Flags),
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// Semiclassical parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Comma-separated level values (an empty string gives none).
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<String>,
    /// Mode index n, or the band for `deficiency`.
    #[arg(long)]
    pub n: Option<usize>,
    /// Mode index m.
    #[arg(long)]
    pub m: Option<usize>,
    /// Time, or a comma-separated list for `egorov`.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Points per grid axis (a power of two).
    #[arg(long = "grid-points")]
    pub grid_points: Option<usize>,
    /// Half-width of the grid box, or the plotting radius for curves.
    #[arg(long, allow_hyphen_values = true)]
    pub extent: Option<f64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; defaults to `<command>.<ext>` in `$SCMODES_OUT_DIR` or the working directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON object with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Propagator or Egorov generator name.
    #[arg(long)]
    pub gen: Option<String>,
    /// Input wavefunction in the grid JSON format.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Quadratic symbol name such as `x2` or `xeta`.
    #[arg(long)]
    pub symbol: Option<String>,
    /// First Egorov state as `m,n`.
    #[arg(long)]
    pub f: Option<String>,
    /// Second Egorov state as `m,n`.
    #[arg(long)]
    pub g: Option<String>,
    /// Gyrator chart: `frequency`, `position` or `auto`.
    #[arg(long)]
    pub chart: Option<String>,
    /// Truncation index M.
    #[arg(long = "m-max")]
    pub m_max: Option<usize>,
    /// Samples per curve.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Grid dimension for `modes`.
    #[arg(long)]
    pub dims: Option<usize>,
    /// Also emit the lower half plane.
    #[arg(long)]
    pub mirror: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Portrait(_) => "portrait",
            Command::Ellcurve(_) => "ellcurve",
            Command::Modes(_) => "modes",
            Command::Propagate(_) => "propagate",
            Command::Deficiency(_) => "deficiency",
            Command::Egorov(_) => "egorov",
        }
    }

    pub fn flags(&self) -> &Flags {
        match self {
            Command::Portrait(f)
            | Command::Ellcurve(f)
            | Command::Modes(f)
            | Command::Propagate(f)
            | Command::Deficiency(f)
            | Command::Egorov(f) => f,
        }
    }
}

fn allowed_keys(command: &str) -> &'static [&'static str] {
    match command {
        "portrait" => &["c0", "extent", "samples", "mirror"],
        "ellcurve" => &["c0", "extent", "samples"],
        "modes" => &["m", "n", "dims", "grid-points", "extent"],
        "propagate" => &["gen", "t", "input", "m", "n", "grid-points", "extent", "chart"],
        "deficiency" => &["n", "m-max"],
        "egorov" => &["gen", "symbol", "t", "f", "g", "grid-points", "extent"],
        _ => &[],
    }
}

fn formats(command: &str) -> &'static [Format] {
    match command {
        "portrait" | "ellcurve" => &[Format::Csv, Format::Json, Format::Svg],
        _ => &[Format::Csv, Format::Json],
    }
}

/// Fully resolved settings of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub h: f64,
    /// Command-specific values, keyed by flag name.
    pub parameters: BTreeMap<String, Value>,
    pub output_path: PathBuf,
    pub format: Format,
}

fn parse_list(key: &str, s: &str) -> Result<Value> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Value::Array(Vec::new()));
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map(|x| json!(x))
                .map_err(|_| Error::InvalidInput(format!("--{key}: cannot parse {p:?} as a number")))
        })
        .collect::<Result<Vec<_>>>()
        .map(Value::Array)
}

impl Flags {
    fn to_map(&self) -> Result<BTreeMap<String, Value>> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: Option<Value>| {
            if let Some(v) = v {
                m.insert(k.to_string(), v);
            }
        };
        put("h", self.h.map(|x| json!(x)));
        put("c0", self.c0.as_deref().map(|s| parse_list("c0", s)).transpose()?);
        put("n", self.n.map(|x| json!(x)));
        put("m", self.m.map(|x| json!(x)));
        put("t", self.t.as_deref().map(|s| parse_list("t", s)).transpose()?);
        put("grid-points", self.grid_points.map(|x| json!(x)));
        put("extent", self.extent.map(|x| json!(x)));
        put("format", self.format.map(|f| json!(f.ext())));
        put("out", self.out.as_ref().map(|p| json!(p)));
        put("gen", self.gen.as_ref().map(|x| json!(x)));
        put("input", self.input.as_ref().map(|p| json!(p)));
        put("symbol", self.symbol.as_ref().map(|x| json!(x)));
        put("f", self.f.as_ref().map(|x| json!(x)));
        put("g", self.g.as_ref().map(|x| json!(x)));
        put("chart", self.chart.as_ref().map(|x| json!(x)));
        put("m-max", self.m_max.map(|x| json!(x)));
        put("samples", self.samples.map(|x| json!(x)));
        put("dims", self.dims.map(|x| json!(x)));
        put("mirror", self.mirror.then(|| json!(true)));
        Ok(m)
    }
}

fn read_config_file(path: &Path, command: &str) -> Result<BTreeMap<String, Value>> {
    let text = fs::read_to_string(path)?;
    let obj: serde_json::Map<String, Value> = serde_json::from_str(&text)?;
    let mut out = BTreeMap::new();
    for (k, v) in obj {
        let k = k.replace('_', "-");
        if k == "command" {
            if v.as_str() != Some(command) {
                return Err(Error::InvalidInput(format!("config file is for command {v}, not {command}")));
            }
            continue;
        }
        // lists may be given as a single number
        let v = match (k.as_str(), v) {
            ("c0" | "t", Value::Number(x)) => Value::Array(vec![Value::Number(x)]),
            ("c0" | "t", Value::String(s)) => parse_list(&k, &s)?,
            (_, v) => v,
        };
        out.insert(k, v);
    }
    Ok(out)
}

impl RunConfig {
    /// Defaults, then the config file, then explicit flags.
    pub fn resolve(command: &Command) -> Result<RunConfig> {
        let name = command.name();
        let flags = command.flags();
        let mut merged = match &flags.config {
            Some(p) => read_config_file(p, name)?,
            None => BTreeMap::new(),
        };
        merged.extend(flags.to_map()?);
        RunConfig::from_map(name, merged)
    }

    /// Validates a merged key/value map for `command`.
    pub fn from_map(command: &str, mut map: BTreeMap<String, Value>) -> Result<RunConfig> {
        let allowed = allowed_keys(command);
        if allowed.is_empty() {
            return Err(Error::InvalidInput(format!("unknown command {command:?}")));
        }
        let h = match map.remove("h") {
            None => 0.1,
            Some(v) => v.as_f64().ok_or_else(|| Error::InvalidInput(format!("h must be a number, got {v}")))?,
        };
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidInput(format!("h must be positive, got {h}")));
        }
        let format = match map.remove("format") {
            None => Format::Csv,
            Some(v) => serde_json::from_value::<Format>(v.clone())
                .map_err(|_| Error::InvalidInput(format!("unknown format {v}")))?,
        };
        if !formats(command).contains(&format) {
            return Err(Error::InvalidInput(format!("{command} does not support {} output", format.ext())));
        }
        let output_path = match map.remove("out") {
            Some(Value::String(p)) => PathBuf::from(p),
            Some(v) => return Err(Error::InvalidInput(format!("out must be a path, got {v}"))),
            None => {
                let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
                dir.join(format!("{command}.{}", format.ext()))
            }
        };
        if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidInput(format!("option {k:?} does not apply to {command}")));
        }
        Ok(RunConfig { command: command.to_string(), h, parameters: map, output_path, format })
    }

    fn get(&self, key: &str) -> Option<&Value> {
        self.parameters.get(key)
    }

    fn bad(key: &str, v: &Value, what: &str) -> Error {
        Error::InvalidInput(format!("{key} must be {what}, got {v}"))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| Self::bad(key, v, "a finite number")),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().map(|x| x as usize).ok_or_else(|| Self::bad(key, v, "a non-negative integer")),
        }
    }

    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.get(key) {
            None => Ok(default.to_vec()),
            Some(Value::Array(a)) => a
                .iter()
                .map(|v| v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| Self::bad(key, v, "a list of numbers")))
                .collect(),
            Some(v) => Err(Self::bad(key, v, "a list of numbers")),
        }
    }

    pub fn str_or<'a>(&'a self, key: &str, default: &'a str) -> Result<&'a str> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.as_str().ok_or_else(|| Self::bad(key, v, "a string")),
        }
    }

    pub fn opt_str(&self, key: &str) -> Result<Option<&str>> {
        self.get(key).map(|v| v.as_str().ok_or_else(|| Self::bad(key, v, "a string"))).transpose()
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            None => Ok(false),
            Some(v) => v.as_bool().ok_or_else(|| Self::bad(key, v, "a boolean")),
        }
    }

    /// Mode index given as `"m,n"`.
    pub fn mode_or(&self, key: &str, default: ModeIndex) -> Result<ModeIndex> {
        let Some(s) = self.opt_str(key)? else { return Ok(default) };
        let parts: Vec<_> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
        match parts.as_slice() {
            [Ok(m), Ok(n)] => Ok(ModeIndex::new(*m, *n)),
            _ => Err(Error::InvalidInput(format!("{key} must be \"m,n\", got {s:?}"))),
        }
    }
}

/// Result of one command before it is written.
#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub json: Value,
    /// JSON that is itself a data file (a stored wavefunction) and is
    /// written without the configuration wrapper.
    pub bare_json: bool,
}

/// Runs the command of `cfg` without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<Checked<Report>> {
    match cfg.command.as_str() {
        "portrait" => commands::portrait(cfg),
        "ellcurve" => commands::ellcurve(cfg),
        "modes" => commands::modes(cfg),
        "propagate" => commands::propagate(cfg),
        "deficiency" => commands::deficiency(cfg),
        "egorov" => commands::egorov(cfg),
        c => Err(Error::InvalidInput(format!("unknown command {c:?}"))),
    }
}

/// The bytes written for `report` in the configured format.
pub fn render(cfg: &RunConfig, report: &Report) -> Result<Vec<u8>> {
    let csv = || render::csv_with_header(cfg, &report.table);
    Ok(match cfg.format {
        Format::Csv => csv()?.into_bytes(),
        Format::Svg => svg_from_csv(&csv()?)?.into_bytes(),
        Format::Json => {
            let v =
                if report.bare_json { report.json.clone() } else { json!({ "config": cfg, "result": report.json }) };
            let mut s = serde_json::to_string_pretty(&v)?;
            s.push('\n');
            s.into_bytes()
        }
    })
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

fn error_json(kind: &str, message: &str, code: i32) -> String {
    json!({ "error": kind, "message": message, "exit_code": code }).to_string()
}

/// Parses `args`, runs the command and returns the process exit code.
/// Errors go to standard error as one JSON object; warnings as one JSON
/// object per line.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", error_json("invalid_input", first, 2));
            return 2;
        }
    };
    let run = || -> Result<Checked<PathBuf>> {
        let cfg = RunConfig::resolve(&cli.command)?;
        let Checked { value: report, warnings } = execute(&cfg)?;
        let bytes = render(&cfg, &report)?;
        write_atomic(&cfg.output_path, &bytes)?;
        Ok(Checked::with(cfg.output_path, warnings))
    };
    match run() {
        Ok(done) => {
            for w in &done.warnings {
                eprintln!("{}", json!({ "warning": w.to_string() }));
            }
            println!("{}", done.value.display());
            0
        }
        Err(e) => {
            let code = e.exit_code();
            eprintln!("{}", error_json(e.kind(), &e.to_string(), code));
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, Value)]) -> BTreeMap<String, Value> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn defaults_and_validation() {
        let cfg = RunConfig::from_map("portrait", BTreeMap::new()).unwrap();
        assert_eq!(cfg.h, 0.1);
        assert_eq!(cfg.format, Format::Csv);
        assert!(cfg.output_path.ends_with("portrait.csv"));
        let bad = RunConfig::from_map("portrait", map(&[("h", json!(-1.0))]));
        assert_eq!(bad.unwrap_err().exit_code(), 2);
        let svg = RunConfig::from_map("deficiency", map(&[("format", json!("svg"))]));
        assert!(matches!(svg, Err(Error::InvalidInput(_))));
        let foreign = RunConfig::from_map("deficiency", map(&[("c0", json!([0.1]))]));
        assert!(matches!(foreign, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        fs::write(&path, r#"{"h": 0.2, "c0": 0.01, "samples": 64, "grid_points": 8}"#).unwrap();
        let flags = Flags { h: Some(0.05), config: Some(path), ..Flags::default() };
        let err = RunConfig::resolve(&Command::Portrait(flags.clone())).unwrap_err();
        assert!(err.to_string().contains("grid-points"));
        fs::write(flags.config.as_ref().unwrap(), r#"{"h": 0.2, "c0": 0.01, "samples": 64}"#).unwrap();
        let cfg = RunConfig::resolve(&Command::Portrait(flags)).unwrap();
        assert_eq!(cfg.h, 0.05);
        assert_eq!(cfg.list_or("c0", &[]).unwrap(), vec![0.01]);
        assert_eq!(cfg.usize_or("samples", 0).unwrap(), 64);
    }

    #[test]
    fn lists_and_modes_parse() {
        assert_eq!(parse_list("c0", "").unwrap(), json!([]));
        assert_eq!(parse_list("c0", "-0.01, 0.02").unwrap(), json!([-0.01, 0.02]));
        assert!(parse_list("t", "a").is_err());
        let cfg = RunConfig::from_map("egorov", map(&[("f", json!("2,1"))])).unwrap();
        assert_eq!(cfg.mode_or("f", ModeIndex::new(0, 0)).unwrap(), ModeIndex::new(2, 1));
        assert_eq!(cfg.mode_or("g", ModeIndex::new(0, 1)).unwrap(), ModeIndex::new(0, 1));
    }

    #[test]
    fn atomic_write_replaces_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
