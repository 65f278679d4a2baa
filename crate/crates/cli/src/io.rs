//! File formats and canonical JSON output.
//!
//! Matrices are row-major nested arrays and complex scalars are `[re, im]`
//! pairs. Output is canonical: object keys sorted, two-space indentation,
//! arrays of scalars on one line and every float written with 17 significant
//! digits, so load → save → load → save is byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gausseng::{
    Complex64, ComplexMatrix, EngineeringParameters, Error, GaussianDynamics, PureStateSpec,
    RealMatrix,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type Rows = Vec<Vec<f64>>;
pub type ComplexRows = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "G")]
    pub g: Rows,
    #[serde(rename = "C")]
    pub c: ComplexRows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Rows,
    #[serde(rename = "Y")]
    pub y: Rows,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    #[serde(rename = "P")]
    pub p: ComplexRows,
    #[serde(rename = "R")]
    pub r: Rows,
    #[serde(rename = "Gamma")]
    pub gamma: Rows,
}

pub fn real_rows(m: &RealMatrix) -> Rows {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

pub fn complex_rows(m: &ComplexMatrix) -> ComplexRows {
    m.row_iter()
        .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn check_shape<T>(rows: &[Vec<T>], name: &str, nrows: usize, ncols: usize) -> Result<()> {
    if rows.len() != nrows {
        bail!("{name} has {} rows, expected {nrows}", rows.len());
    }
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
        bail!("{name}[{i}] has {} entries, expected {ncols}", row.len());
    }
    Ok(())
}

fn to_real(rows: &Rows, name: &str, nrows: usize, ncols: usize) -> Result<RealMatrix> {
    check_shape(rows, name, nrows, ncols)?;
    Ok(RealMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn to_complex(rows: &ComplexRows, name: &str, nrows: usize, ncols: usize) -> Result<ComplexMatrix> {
    check_shape(rows, name, nrows, ncols)?;
    Ok(ComplexMatrix::from_fn(nrows, ncols, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Rewrites symmetry errors with JSON-style indices into the named matrix.
fn describe(err: Error) -> anyhow::Error {
    match err {
        Error::Asymmetric {
            what,
            row,
            col,
            value,
            mirror,
        } => anyhow::anyhow!("{what} must be symmetric: {what}[{row}][{col}] = {value} but {what}[{col}][{row}] = {mirror}"),
        Error::NotAntisymmetric { what, row, col } => {
            anyhow::anyhow!("{what} must be antisymmetric: {what}[{row}][{col}] != -{what}[{col}][{row}]")
        }
        other => other.into(),
    }
}

impl SystemFile {
    pub fn from_system(sys: &GaussianDynamics) -> Self {
        SystemFile {
            n: sys.modes(),
            m: sys.channels(),
            g: real_rows(sys.g()),
            c: complex_rows(sys.c()),
        }
    }

    pub fn to_system(&self) -> Result<GaussianDynamics> {
        let g = to_real(&self.g, "G", 2 * self.n, 2 * self.n)?;
        let c = to_complex(&self.c, "C", self.m, 2 * self.n)?;
        GaussianDynamics::new(g, c).map_err(describe)
    }
}

impl SpecFile {
    pub fn from_spec(spec: &PureStateSpec) -> Self {
        SpecFile {
            n: spec.modes(),
            x: real_rows(spec.x()),
            y: real_rows(spec.y()),
        }
    }

    pub fn to_spec(&self) -> Result<PureStateSpec> {
        let x = to_real(&self.x, "X", self.n, self.n)?;
        let y = to_real(&self.y, "Y", self.n, self.n)?;
        PureStateSpec::new(x, y).map_err(describe)
    }
}

impl ParamsFile {
    pub fn to_params(&self, n: usize) -> Result<EngineeringParameters> {
        let m = self.p.first().map_or(0, Vec::len);
        let p = to_complex(&self.p, "P", n, m)?;
        let r = to_real(&self.r, "R", n, n)?;
        let gamma = to_real(&self.gamma, "Gamma", n, n)?;
        EngineeringParameters::new(p, r, gamma).map_err(describe)
    }
}

/// Parses a JSON document; serde errors carry the line and column.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T> {
    serde_json::from_str(text).with_context(|| format!("invalid {origin}"))
}

pub fn read<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse(&text, &path.display().to_string())
}

/// Canonical text of any serializable value, newline-terminated.
pub fn to_canonical<T: Serialize>(value: &T) -> Result<String> {
    let mut out = String::new();
    write_value(&serde_json::to_value(value)?, 0, &mut out);
    out.push('\n');
    Ok(out)
}

pub fn write_canonical<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let text = to_canonical(value)?;
    let mut file =
        fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    file.write_all(text.as_bytes())
        .with_context(|| format!("cannot write {}", path.display()))
}

/// `{:.16e}`: 17 significant digits, enough to round-trip every f64.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // JSON has no NaN or infinity
        "null".to_string()
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn write_value(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(num) => match (num.as_u64(), num.as_i64()) {
            (Some(u), _) if !num.is_f64() => out.push_str(&u.to_string()),
            (_, Some(i)) if !num.is_f64() => out.push_str(&i.to_string()),
            _ => out.push_str(&format_float(num.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) if items.iter().all(is_scalar) => {
            out.push('[');
            for (k, item) in items.iter().enumerate() {
                if k > 0 {
                    out.push_str(", ");
                }
                write_value(item, depth, out);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                write_value(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            // serde_json's default map is ordered by key
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                out.push_str(&pad(depth + 1));
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                write_value(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(depth));
            out.push('}');
        }
    }
}
