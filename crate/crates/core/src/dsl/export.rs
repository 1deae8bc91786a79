//! R-matrix serializations.
//!
//! * `json`: `{"d_states": D, "params": [...], "entries": [[row, col, "coeff"], ...]}`
//! * `mm`: MatrixMarket coordinate, parameter-free entries only
//! * `latex`: a `D² × D²` array with rules between the `D × D` blocks
//! * `dsl`: a line format, `rmatrix D`, optional `params ...`, then `(row, col) = coeff`
//!
//! Rows and columns are 1-based flattened pair indices `(i-1)·D + j`; entries are
//! always written row by row, columns ascending.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Deserialize;
use thiserror::Error;

use super::{parse_algebra_with, AlgebraDocument, DslError, Profile};
use crate::poly::{Params, Polynomial, Rational, ScalarError};
use crate::rmatrix::{RMatrix, RMatrixError, SparseMatrix};

/// Largest `D` accepted by the importers.
pub const MAX_IMPORT_D: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    Mm,
    Latex,
    Dsl,
}

impl FromStr for ExportFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "mm" | "mtx" => Ok(ExportFormat::Mm),
            "latex" | "tex" => Ok(ExportFormat::Latex),
            "dsl" => Ok(ExportFormat::Dsl),
            other => Err(format!("unknown format `{other}` (expected json, mm, latex or dsl)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("MatrixMarket needs numeric entries; ({row}, {col}) = {value}")]
    SymbolicEntry { row: usize, col: usize, value: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImportError {
    #[error("json: {0}")]
    Json(String),
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("D = {d} exceeds the import limit {MAX_IMPORT_D}")]
    TooLarge { d: usize },
    #[error("duplicate entry ({row}, {col})")]
    Duplicate { row: usize, col: usize },
    #[error(transparent)]
    RMatrix(#[from] RMatrixError),
    #[error(transparent)]
    Dsl(#[from] DslError),
}

fn line_err(line: usize, message: impl Into<String>) -> ImportError {
    ImportError::Line {
        line,
        message: message.into(),
    }
}

pub fn export_rmatrix(r: &RMatrix, fmt: ExportFormat) -> Result<String, ExportError> {
    Ok(match fmt {
        ExportFormat::Json => to_json(r),
        ExportFormat::Mm => to_matrix_market(r)?,
        ExportFormat::Latex => to_latex(r),
        ExportFormat::Dsl => to_text(r),
    })
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("string serializes")
}

fn to_json(r: &RMatrix) -> String {
    let m = r.matrix();
    let params: Vec<String> = m.params().names().iter().map(|p| json_str(p)).collect();
    let mut out = format!(
        "{{\n  \"d_states\": {},\n  \"params\": [{}],\n",
        r.d_states(),
        params.join(", ")
    );
    if m.is_zero() {
        out.push_str("  \"entries\": []\n}\n");
        return out;
    }
    out.push_str("  \"entries\": [\n");
    let lines: Vec<String> = m
        .iter()
        .map(|((row, col), v)| format!("    [{row}, {col}, {}]", json_str(&v.to_string())))
        .collect();
    out.push_str(&lines.join(",\n"));
    out.push_str("\n  ]\n}\n");
    out
}

fn to_matrix_market(r: &RMatrix) -> Result<String, ExportError> {
    let m = r.matrix();
    let mut values = Vec::with_capacity(m.nnz());
    for ((row, col), v) in m.iter() {
        let q = v.constant_value().ok_or_else(|| ExportError::SymbolicEntry {
            row,
            col,
            value: v.to_string(),
        })?;
        values.push((row, col, q));
    }
    let integral = values.iter().all(|(_, _, q)| q.is_integer());
    let mut out = String::new();
    if integral {
        out.push_str("%%MatrixMarket matrix coordinate integer general\n");
    } else {
        out.push_str("%%MatrixMarket matrix coordinate real general\n");
        out.push_str("% values are exact rationals n/d\n");
    }
    let _ = writeln!(out, "% d_states {}", r.d_states());
    let _ = writeln!(out, "{} {} {}", m.dim(), m.dim(), values.len());
    for (row, col, q) in values {
        let _ = writeln!(out, "{row} {col} {q}");
    }
    Ok(out)
}

fn latex_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", q.numer(), q.denom())
    }
}

fn latex_param(name: &str) -> String {
    match name.strip_prefix('k') {
        Some(idx) if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) => {
            if idx.len() == 1 {
                format!("\\kappa_{idx}")
            } else {
                format!("\\kappa_{{{idx}}}")
            }
        }
        _ => format!("\\mathrm{{{name}}}"),
    }
}

fn latex_poly(p: &Polynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let names = p.params().names();
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().rev().enumerate() {
        let sign = if c.is_negative() { "-" } else { "+" };
        if idx == 0 {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            let _ = write!(out, " {sign} ");
        }
        let abs = c.abs();
        let mono: Vec<String> = names
            .iter()
            .zip(m.exponents())
            .filter(|(_, &e)| e > 0)
            .map(|(n, &e)| {
                if e == 1 {
                    latex_param(n)
                } else {
                    format!("{}^{{{e}}}", latex_param(n))
                }
            })
            .collect();
        if mono.is_empty() {
            out.push_str(&latex_rational(&abs));
        } else {
            if !abs.is_one() {
                out.push_str(&latex_rational(&abs));
                out.push(' ');
            }
            out.push_str(&mono.join(" "));
        }
    }
    out
}

fn to_latex(r: &RMatrix) -> String {
    let d = r.d_states();
    let side = d * d;
    let m = r.matrix();
    let spec = vec!["c".repeat(d); d].join("|");
    let mut out = format!("\\left( \\begin{{array}}{{{spec}}}\n");
    for row in 1..=side {
        let cells: BTreeMap<usize, &Polynomial> = m.row(row).collect();
        let line: Vec<String> = (1..=side)
            .map(|c| cells.get(&c).map_or_else(|| "0".to_string(), |p| latex_poly(p)))
            .collect();
        out.push_str(&line.join(" & "));
        if row < side {
            out.push_str("\\\\");
        }
        out.push('\n');
        if row < side && row % d == 0 {
            out.push_str("\\hline\n");
        }
    }
    out.push_str("\\end{array} \\right)\n");
    out
}

fn to_text(r: &RMatrix) -> String {
    let m = r.matrix();
    let mut out = format!("rmatrix {}\n", r.d_states());
    if !m.params().is_empty() {
        let _ = writeln!(out, "params {}", m.params().names().join(" "));
    }
    for ((row, col), v) in m.iter() {
        let _ = writeln!(out, "({row}, {col}) = {v}");
    }
    out
}

fn check_d(d: usize) -> Result<usize, ImportError> {
    if d > MAX_IMPORT_D {
        return Err(ImportError::TooLarge { d });
    }
    if d == 0 {
        return Err(RMatrixError::NotASquare { side: 0 }.into());
    }
    Ok(d * d)
}

fn insert(m: &mut SparseMatrix, row: usize, col: usize, v: Polynomial) -> Result<(), ImportError> {
    if m.get(row, col).is_some() {
        return Err(ImportError::Duplicate { row, col });
    }
    m.set(row, col, v).map_err(RMatrixError::from)?;
    Ok(())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonR {
    d_states: usize,
    params: Vec<String>,
    entries: Vec<(usize, usize, String)>,
}

/// Reads the json layout written by [`export_rmatrix`].
pub fn import_rmatrix_json(text: &str) -> Result<RMatrix, ImportError> {
    let raw: JsonR = serde_json::from_str(text).map_err(|e| ImportError::Json(e.to_string()))?;
    check_d(raw.d_states)?;
    let params = Params::new(raw.params.iter().map(String::as_str)).map_err(|e| ImportError::Json(e.to_string()))?;
    let mut m = SparseMatrix::new(raw.d_states * raw.d_states, &params);
    for (n, (row, col, coeff)) in raw.entries.iter().enumerate() {
        let v = Polynomial::parse(&params, coeff)
            .map_err(|e| ImportError::Json(format!("entry {}: `{coeff}`: {e}", n + 1)))?;
        if v.is_zero() {
            continue;
        }
        insert(&mut m, *row, *col, v)?;
    }
    Ok(RMatrix::new(raw.d_states, m, crate::rmatrix::Provenance::UserSupplied)?)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmField {
    Integer,
    Real,
    Pattern,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
    Skew,
}

/// Exact value of `n`, `n/d` or a decimal such as `-1.25e-3`.
fn parse_exact(s: &str) -> Option<Rational> {
    if let Some(q) = crate::poly::parse_rational(s) {
        return Some(q);
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    if exp.unsigned_abs() > 4096 {
        return None;
    }
    let numer: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let scale = i64::from(exp) - frac_part.len() as i64 - 1;
    let ten = BigInt::from(10);
    let pow = num_traits::pow(ten, scale.unsigned_abs() as usize);
    let mut q = if scale >= 0 {
        Rational::from_integer(numer * pow)
    } else {
        Rational::new(numer, pow)
    };
    if neg {
        q = -q;
    }
    Some(q)
}

/// Reads MatrixMarket coordinate data with field `integer`, `real` or `pattern`
/// and symmetry `general`, `symmetric` or `skew-symmetric`.
pub fn import_matrix_market(text: &str) -> Result<RMatrix, ImportError> {
    let mut lines = text.lines().enumerate().map(|(n, l)| (n + 1, l));
    let (_, header) = lines.next().ok_or_else(|| line_err(1, "empty input"))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" || words[2] != "coordinate" {
        return Err(line_err(
            1,
            "expected `%%MatrixMarket matrix coordinate FIELD SYMMETRY`",
        ));
    }
    let field = match words[3].as_str() {
        "integer" => MmField::Integer,
        "real" => MmField::Real,
        "pattern" => MmField::Pattern,
        other => return Err(line_err(1, format!("unsupported field `{other}`"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => MmSymmetry::General,
        "symmetric" => MmSymmetry::Symmetric,
        "skew-symmetric" => MmSymmetry::Skew,
        other => return Err(line_err(1, format!("unsupported symmetry `{other}`"))),
    };
    let mut data = lines.filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('%'));
    let (size_line, size) = data.next().ok_or_else(|| line_err(1, "missing size line"))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| line_err(size_line, "size line must be three non-negative integers"))?;
    let [rows, cols, nnz] = dims[..] else {
        return Err(line_err(size_line, "size line must be three non-negative integers"));
    };
    if rows != cols {
        return Err(line_err(size_line, format!("matrix is {rows}×{cols}, not square")));
    }
    let d = num_integer::Roots::sqrt(&rows);
    if d * d != rows {
        return Err(RMatrixError::NotASquare { side: rows }.into());
    }
    check_d(d)?;
    let params = Params::empty();
    let mut m = SparseMatrix::new(rows, &params);
    let mut seen = 0usize;
    for (n, l) in data {
        let parts: Vec<&str> = l.split_whitespace().collect();
        let want = if field == MmField::Pattern { 2 } else { 3 };
        if parts.len() != want {
            return Err(line_err(n, format!("expected {want} fields")));
        }
        let index = |s: &str| s.parse::<usize>().map_err(|_| line_err(n, format!("bad index `{s}`")));
        let (row, col) = (index(parts[0])?, index(parts[1])?);
        if row == 0 || col == 0 || row > rows || col > rows {
            return Err(line_err(n, format!("entry ({row}, {col}) outside 1..={rows}")));
        }
        let value = match field {
            MmField::Pattern => Rational::one(),
            MmField::Integer => parts[2]
                .parse::<BigInt>()
                .map(Rational::from_integer)
                .map_err(|_| line_err(n, format!("bad integer `{}`", parts[2])))?,
            MmField::Real => parse_exact(parts[2]).ok_or_else(|| line_err(n, format!("bad value `{}`", parts[2])))?,
        };
        seen += 1;
        if seen > nnz {
            return Err(line_err(n, format!("more than the declared {nnz} entries")));
        }
        match symmetry {
            MmSymmetry::General => {}
            _ if row < col => {
                return Err(line_err(n, "symmetric storage keeps the lower triangle only"));
            }
            MmSymmetry::Skew if row == col => {
                return Err(line_err(n, "skew-symmetric storage has no diagonal"));
            }
            _ => {}
        }
        if value.is_zero() {
            continue;
        }
        if row != col && symmetry != MmSymmetry::General {
            let mirror = if symmetry == MmSymmetry::Skew {
                -value.clone()
            } else {
                value.clone()
            };
            insert(&mut m, col, row, Polynomial::constant(&params, mirror))?;
        }
        insert(&mut m, row, col, Polynomial::constant(&params, value))?;
    }
    if seen != nnz {
        return Err(line_err(
            text.lines().count().max(1),
            format!("declared {nnz} entries, found {seen}"),
        ));
    }
    Ok(RMatrix::new(d, m, crate::rmatrix::Provenance::UserSupplied)?)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(n, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((n + 1, l))
    })
}

/// Reads the `dsl` R-matrix format.
pub fn import_rmatrix_text(text: &str) -> Result<RMatrix, ImportError> {
    let mut lines = content_lines(text).peekable();
    let (hl, header) = lines.next().ok_or_else(|| line_err(1, "empty input"))?;
    let d: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
        ["rmatrix", d] => d.parse().map_err(|_| line_err(hl, format!("bad state count `{d}`")))?,
        _ => return Err(line_err(hl, "expected `rmatrix D`")),
    };
    let side = check_d(d)?;
    let params = match lines.peek() {
        Some((n, l)) if l.split_whitespace().next() == Some("params") => {
            let n = *n;
            let names: Vec<&str> = l.split_whitespace().skip(1).collect();
            lines.next();
            Params::new(names).map_err(|e| line_err(n, e.to_string()))?
        }
        _ => Params::empty(),
    };
    let mut m = SparseMatrix::new(side, &params);
    for (n, l) in lines {
        let (lhs, rhs) = l
            .split_once('=')
            .ok_or_else(|| line_err(n, "expected `(row, col) = coeff`"))?;
        let inner = lhs
            .trim()
            .strip_prefix('(')
            .and_then(|s| s.strip_suffix(')'))
            .ok_or_else(|| line_err(n, "expected `(row, col)` before `=`"))?;
        let (r, c) = inner
            .split_once(',')
            .ok_or_else(|| line_err(n, "expected `(row, col)`"))?;
        let index = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| line_err(n, format!("bad index `{}`", s.trim())))
        };
        let (row, col) = (index(r)?, index(c)?);
        let v = Polynomial::parse(&params, rhs.trim()).map_err(|e: ScalarError| line_err(n, e.to_string()))?;
        if v.is_zero() {
            continue;
        }
        if row == 0 || col == 0 || row > side || col > side {
            return Err(line_err(n, format!("entry ({row}, {col}) outside 1..={side}")));
        }
        insert(&mut m, row, col, v)?;
    }
    Ok(RMatrix::new(d, m, crate::rmatrix::Provenance::UserSupplied)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Input {
    Algebra(AlgebraDocument),
    RMatrix(RMatrix),
}

/// Sniffs the content: json object, MatrixMarket banner, `rmatrix` header, or
/// otherwise an algebra document.
pub fn load_input(text: &str, profile: Option<Profile>) -> Result<Input, ImportError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        return import_rmatrix_json(text).map(Input::RMatrix);
    }
    if trimmed.len() >= 14 && trimmed[..14].eq_ignore_ascii_case("%%MatrixMarket") {
        return import_matrix_market(text).map(Input::RMatrix);
    }
    if let Some((_, first)) = content_lines(text).next() {
        if first.split_whitespace().next() == Some("rmatrix") {
            return import_rmatrix_text(text).map(Input::RMatrix);
        }
    }
    Ok(Input::Algebra(parse_algebra_with(text, profile)?))
}
