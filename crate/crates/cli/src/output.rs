use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;
const SIG_DIGITS: usize = 12;

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x, SIG_DIGITS),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(format_sig(*x, SIG_DIGITS)),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_owned())
    }
}

/// `x` with `digits` significant digits, fixed notation for moderate
/// exponents and scientific otherwise, trailing zeros removed.
///
/// Never locale dependent: always `.` as decimal separator, no grouping.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_owned()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_owned()
}

/// Tabular command output.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub params: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "params": self.params,
            "columns": self.columns,
            "rows": rows,
        })
    }
}

/// Adds the schema version and command name to a JSON object.
pub fn document(command: &str, body: Value) -> Value {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        doc.extend(fields);
    }
    Value::Object(doc)
}

/// Writes `text` to `out`, or stdout when `out` is `None`.
pub fn emit(text: &str, out: Option<&Path>) -> io::Result<()> {
    match out {
        Some(path) => fs::write(path, text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn json_text(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// How the columns of a table should be drawn.
#[derive(Debug, Clone, Copy)]
pub struct PlotStyle {
    pub title: &'static str,
    pub x_col: usize,
    pub y_cols: &'static [usize],
    pub log_x: bool,
    pub log_y: bool,
    /// Columns `(x, y, z)` for a 3-D scatter instead of line plots.
    pub surface: Option<(usize, usize, usize)>,
}

/// Path of the gnuplot script written next to `csv`.
pub fn plot_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

/// Gnuplot script plotting `csv`, referenced relative to the script.
pub fn plot_script(table: &Table, csv: &Path, style: &PlotStyle) -> String {
    let name = csv.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script for {name}; run from this directory");
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set title '{}'", style.title);
    if style.log_x {
        let _ = writeln!(s, "set logscale x");
    }
    if style.log_y {
        let _ = writeln!(s, "set logscale y");
    }
    if let Some((x, y, z)) = style.surface {
        let _ = writeln!(s, "set xlabel '{}'", table.columns[x]);
        let _ = writeln!(s, "set ylabel '{}'", table.columns[y]);
        let _ = writeln!(s, "set zlabel '{}'", table.columns[z]);
        let _ = writeln!(s, "splot '{name}' using {}:{}:{} with points pt 7 ps 0.5", x + 1, y + 1, z + 1);
    } else {
        let _ = writeln!(s, "set xlabel '{}'", table.columns[style.x_col]);
        let parts: Vec<String> = style
            .y_cols
            .iter()
            .map(|&c| format!("'{name}' using {}:{} with linespoints", style.x_col + 1, c + 1))
            .collect();
        let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    }
    let _ = writeln!(s, "pause mouse close");
    s
}
