//! CSV tables and the SVG view derived from them.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

use super::RunConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // shortest round-trip form, so reruns are byte-identical
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

/// `# `-prefixed header with the run configuration, then the table.
pub(super) fn csv_with_header(cfg: &RunConfig, table: &Table) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "# scmodes {} {}", env!("CARGO_PKG_VERSION"), cfg.command);
    let _ = writeln!(out, "# run-config: {}", serde_json::to_string(cfg)?);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::render)).map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
    out.push_str(&String::from_utf8_lossy(&body));
    Ok(out)
}

const WIDTH: f64 = 640.0;
const PAD: f64 = 24.0;

fn colour(style: &str) -> &'static str {
    match style {
        "stationary" | "point" => "#c0392b",
        "separatrix" => "#222222",
        "bounded" => "#1f5fa8",
        "unbounded" => "#2e8b57",
        _ => "#777777",
    }
}

/// Draws the `x`/`xi` columns of a curve table, one polyline per `curve`
/// (or `component`) value and a marker for single-point groups. Reads
/// nothing but the CSV text.
pub fn svg_from_csv(text: &str) -> Result<String> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rd.headers().map_err(csv_err)?.clone();
    let col = |n: &str| headers.iter().position(|h| h == n);
    let (Some(ix), Some(iy)) = (col("x"), col("xi")) else {
        return Err(Error::InvalidInput("SVG needs x and xi columns".into()));
    };
    let ig = col("curve").or(col("component"));
    let is = col("kind").or(col("component"));
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, (String, Vec<(f64, f64)>)> = BTreeMap::new();
    for rec in rd.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| {
            rec[i].parse::<f64>().map_err(|_| Error::InvalidInput(format!("non-numeric cell {:?}", &rec[i])))
        };
        let (x, y) = (num(ix)?, num(iy)?);
        let key = ig.map(|i| rec[i].to_string()).unwrap_or_default();
        let style = is.map(|i| rec[i].to_string()).unwrap_or_default();
        let entry = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (style, Vec::new())
        });
        entry.1.push((x, y));
    }
    let pts = groups.values().flat_map(|g| g.1.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-12);
    let scale = (WIDTH - 2.0 * PAD) / span;
    let height = (y1 - y0) * scale + 2.0 * PAD;
    let px = |x: f64| PAD + (x - x0) * scale;
    let py = |y: f64| height - PAD - (y - y0) * scale;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if x0 <= 0.0 && x1 >= 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="#bbbbbb" stroke-width="0.5"/>"##,
            px(0.0),
            py(y0),
            py(y1)
        );
    }
    if y0 <= 0.0 && y1 >= 0.0 {
        let _ = writeln!(
            s,
            r##"<line x1="{1:.2}" y1="{0:.2}" x2="{2:.2}" y2="{0:.2}" stroke="#bbbbbb" stroke-width="0.5"/>"##,
            py(0.0),
            px(x0),
            px(x1)
        );
    }
    for key in &order {
        let (style, pts) = &groups[key];
        let c = colour(style);
        if pts.len() == 1 {
            let (x, y) = pts[0];
            let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{c}"/>"#, px(x), py(y));
            continue;
        }
        let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
        let dash = if style == "separatrix" { r#" stroke-dasharray="4 3""# } else { "" };
        let _ =
            writeln!(s, r#"<polyline fill="none" stroke="{c}" stroke-width="1.2"{dash} points="{}"/>"#, path.join(" "));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
