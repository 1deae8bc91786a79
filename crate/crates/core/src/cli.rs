//! Command-line driver. Exit codes: 0 success, 1 verification failure, 2 usage
//! or input error.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{centrally_extend, StructureConstants, Violation};
use crate::ck::{build_ck, classify_ck2, enumerate_sign_patterns, format_signs, CkSpec, Kappa, CENTRAL_LABEL};
use crate::dsl::{export_rmatrix, load_input, AlgebraDocument, ExportFormat, Input, Profile};
use crate::poly::{parse_rational, Assignment};
use crate::rmatrix::{build_r, specialize, structural_stats, RMatrix};
use crate::ybe::{oracle_max_d, verify_cqybe, verify_cqybe_with_oracle, YbeReport};

const MAX_CK_N: usize = 64;
const MAX_SCAN_N: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "ybx",
    version,
    about = "Singular constant Yang-Baxter solutions from structure constants"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; the accepted values depend on the subcommand.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cross-check products against the component-summation oracle when D is within the bound.
    #[arg(long, global = true)]
    oracle: bool,
    /// Override the document's profile (none, lie, super).
    #[arg(long, global = true)]
    profile: Option<Profile>,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input file, or `-` for stdin.
    #[arg(default_value = "-")]
    input: String,
    /// Numeric values for parameters, e.g. `k1=1,k2=-1/2`.
    #[arg(long)]
    assign: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an algebra document and report antisymmetry / Jacobi violations.
    Validate(InputArgs),
    /// Build the R-matrix (format json, mm, latex or dsl).
    Rmatrix(InputArgs),
    /// Check R12 R13 R23 = R23 R13 R12 (format text or json).
    Verify(InputArgs),
    /// Emit a Cayley-Klein algebra so_k(N+1).
    Ck {
        #[arg(long)]
        n: usize,
        /// Keep every contraction parameter symbolic (the default).
        #[arg(long, conflicts_with = "kappas")]
        symbolic: bool,
        /// Comma-separated values; `k` or `*` keeps that slot symbolic.
        #[arg(long)]
        kappas: Option<String>,
    },
    /// Verify every sign pattern of so_k(N+1).
    CkScan {
        #[arg(long)]
        n: usize,
    },
    /// Structural counts and, for numeric matrices, the exact rank.
    Stats(InputArgs),
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Check(_) => 1,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

struct Output {
    text: String,
    code: i32,
}

impl Output {
    fn ok(text: String) -> Self {
        Output { text, code: 0 }
    }
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(&cli, stdin) {
        Ok(out) => {
            let written = match &cli.out {
                Some(path) => fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
                None => stdout.write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    2
                }
            }
        }
        Err(f) => {
            let (Failure::Usage(msg) | Failure::Check(msg)) = &f;
            let _ = writeln!(stderr, "error: {msg}");
            f.code()
        }
    }
}

fn dispatch(cli: &Cli, stdin: &mut dyn Read) -> Result<Output, Failure> {
    match &cli.command {
        Command::Validate(a) => validate(cli, a, stdin),
        Command::Rmatrix(a) => rmatrix_cmd(cli, a, stdin),
        Command::Verify(a) => verify_cmd(cli, a, stdin),
        Command::Ck { n, kappas, .. } => ck_cmd(cli, *n, kappas.as_deref()),
        Command::CkScan { n } => scan_cmd(cli, *n),
        Command::Stats(a) => stats_cmd(cli, a, stdin),
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))
    }
}

fn parse_assign(text: &str) -> Result<Assignment, Failure> {
    let mut out = Assignment::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("--assign expects NAME=VALUE, got `{part}`")))?;
        let q = parse_rational(value.trim()).ok_or_else(|| usage(format!("`{value}` is not a rational number")))?;
        out.insert(name.trim().to_string(), q);
    }
    Ok(out)
}

fn format_or<'a>(cli: &'a Cli, default: &'a str, allowed: &[&str]) -> Result<&'a str, Failure> {
    let f = cli.format.as_deref().unwrap_or(default);
    if allowed.contains(&f) {
        Ok(f)
    } else {
        Err(usage(format!(
            "--format {f} is not available here (expected {})",
            allowed.join(", ")
        )))
    }
}

fn load(cli: &Cli, a: &InputArgs, stdin: &mut dyn Read) -> Result<Input, Failure> {
    let text = read_input(&a.input, stdin)?;
    load_input(&text, cli.profile).map_err(usage)
}

/// Builds (or takes) the R-matrix, applies `--assign`, and checks the
/// structural pattern of anything this program constructed.
fn obtain_r(cli: &Cli, a: &InputArgs, stdin: &mut dyn Read) -> Result<RMatrix, Failure> {
    let (r, constructed) = match load(cli, a, stdin)? {
        Input::Algebra(doc) => (r_from_constants(&doc.structure_constants().map_err(usage)?), true),
        Input::RMatrix(r) => (r, false),
    };
    let r = match &a.assign {
        Some(text) => specialize(&r, &parse_assign(text)?).map_err(usage)?,
        None => r,
    };
    if constructed {
        r.check_central_pattern()
            .map_err(|e| Failure::Check(format!("internal pattern check failed: {e}")))?;
    }
    Ok(r)
}

fn r_from_constants(c: &StructureConstants) -> RMatrix {
    build_r(&centrally_extend(c))
}

fn violation_line(doc: &AlgebraDocument, kind: &str, v: &Violation) -> String {
    let labels: Vec<&str> = v.indices.iter().map(|&i| doc.label(i)).collect();
    format!("  {kind} ({}): residual {}\n", labels.join(", "), v.residual)
}

fn validate(cli: &Cli, a: &InputArgs, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let fmt = format_or(cli, "text", &["text", "json"])?;
    let doc = match load(cli, a, stdin)? {
        Input::Algebra(doc) => doc,
        Input::RMatrix(_) => return Err(usage("validate expects an algebra document")),
    };
    let report = doc.validate().map_err(usage)?;
    if fmt == "json" {
        #[derive(Serialize)]
        struct V {
            indices: Vec<String>,
            residual: String,
        }
        #[derive(Serialize)]
        struct R {
            algebra: String,
            profile: String,
            dim: usize,
            graded: bool,
            antisymmetry: Vec<V>,
            jacobi: Option<Vec<V>>,
            clean: bool,
        }
        let conv = |vs: &[Violation]| -> Vec<V> {
            vs.iter()
                .map(|v| V {
                    indices: v.indices.iter().map(|&i| doc.label(i).to_string()).collect(),
                    residual: v.residual.to_string(),
                })
                .collect()
        };
        let rec = R {
            algebra: doc.name.clone(),
            profile: doc.profile.to_string(),
            dim: doc.dim(),
            graded: report.graded,
            antisymmetry: conv(&report.antisymmetry),
            jacobi: report.jacobi.as_deref().map(conv),
            clean: report.is_clean(),
        };
        return Ok(Output::ok(serde_json::to_string(&rec).expect("serializes") + "\n"));
    }
    let mut s = format!(
        "algebra {} (dim {}, profile {}): {} brackets\n",
        doc.name,
        doc.dim(),
        doc.profile,
        doc.brackets.len()
    );
    let check = if report.graded { "graded" } else { "ungraded" };
    s += &format!("antisymmetry ({check}): {} violation(s)\n", report.antisymmetry.len());
    for v in &report.antisymmetry {
        s += &violation_line(&doc, "antisymmetry", v);
    }
    match &report.jacobi {
        Some(vs) => {
            s += &format!("jacobi ({check}): {} violation(s)\n", vs.len());
            for v in vs {
                s += &violation_line(&doc, "jacobi", v);
            }
        }
        None => s += "jacobi: skipped (antisymmetry fails)\n",
    }
    s += "advisory only: the R-matrix construction accepts arbitrary coefficients\n";
    Ok(Output::ok(s))
}

fn rmatrix_cmd(cli: &Cli, a: &InputArgs, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let fmt: ExportFormat = format_or(cli, "json", &["json", "mm", "latex", "dsl"])?
        .parse()
        .map_err(usage)?;
    let r = obtain_r(cli, a, stdin)?;
    Ok(Output::ok(export_rmatrix(&r, fmt).map_err(usage)?))
}

fn run_verify(r: &RMatrix, oracle: bool) -> (YbeReport, Option<String>) {
    let bound = oracle_max_d();
    if oracle {
        match verify_cqybe_with_oracle(r, bound) {
            Ok(rep) => return (rep, None),
            Err(e) => return (verify_cqybe(r), Some(format!("oracle skipped: {e}"))),
        }
    }
    (verify_cqybe(r), None)
}

fn verdict_code(rep: &YbeReport) -> i32 {
    if rep.sides_equal && rep.oracle_agrees != Some(false) {
        0
    } else {
        1
    }
}

fn verify_cmd(cli: &Cli, a: &InputArgs, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let fmt = format_or(cli, "text", &["text", "json"])?;
    let r = obtain_r(cli, a, stdin)?;
    let (rep, note) = run_verify(&r, cli.oracle);
    let mut text = if fmt == "json" {
        rep.to_record() + "\n"
    } else {
        rep.to_string()
    };
    if let (Some(n), "text") = (note, fmt) {
        text += &format!("  {n}\n");
    }
    Ok(Output {
        code: verdict_code(&rep),
        text,
    })
}

fn parse_kappas(n: usize, text: Option<&str>) -> Result<CkSpec, Failure> {
    let Some(text) = text else {
        return CkSpec::symbolic(n).map_err(usage);
    };
    let kappas = text
        .split(',')
        .map(str::trim)
        .map(|t| match t {
            "k" | "*" | "sym" => Ok(Kappa::Symbolic),
            v => parse_rational(v)
                .map(Kappa::Value)
                .ok_or_else(|| usage(format!("`{v}` is neither a rational nor `k`"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if kappas.len() != n {
        return Err(usage(format!("--kappas has {} entries, --n is {n}", kappas.len())));
    }
    CkSpec::new(kappas).map_err(usage)
}

fn ck_cmd(cli: &Cli, n: usize, kappas: Option<&str>) -> Result<Output, Failure> {
    if n == 0 || n > MAX_CK_N {
        return Err(usage(format!("--n must be in 1..={MAX_CK_N}")));
    }
    let fmt = format_or(cli, "dsl", &["dsl", "json", "mm", "latex"])?;
    let spec = parse_kappas(n, kappas)?;
    let alg = build_ck(&spec);
    if fmt == "dsl" {
        let profile = cli.profile.unwrap_or(Profile::Lie);
        let doc = AlgebraDocument::from_constants(&format!("so_k_{}", n + 1), alg.basis, &alg.constants, profile);
        return Ok(Output::ok(doc.to_string()));
    }
    let r = r_from_constants(&alg.constants);
    r.check_central_pattern()
        .map_err(|e| Failure::Check(format!("internal pattern check failed: {e}")))?;
    Ok(Output::ok(
        export_rmatrix(&r, fmt.parse().map_err(usage)?).map_err(usage)?,
    ))
}

#[derive(Serialize)]
struct ScanLine {
    pattern: String,
    family: Option<String>,
    kinematical: Option<String>,
    physical: Option<String>,
    #[serde(flatten)]
    report: YbeReport,
}

fn scan_cmd(cli: &Cli, n: usize) -> Result<Output, Failure> {
    if n == 0 || n > MAX_SCAN_N {
        return Err(usage(format!("--n must be in 1..={MAX_SCAN_N}")));
    }
    let fmt = format_or(cli, "text", &["text", "json"])?;
    let specs = enumerate_sign_patterns(n).map_err(usage)?;
    let oracle = cli.oracle;
    let lines: Vec<ScanLine> = specs
        .par_iter()
        .map(|spec| {
            let r = r_from_constants(&build_ck(spec).constants);
            r.check_central_pattern()
                .expect("constructed R has the central-charge pattern");
            let (report, _) = run_verify(&r, oracle);
            let signs = spec.sign_pattern().expect("numeric spec");
            let class = (n == 2).then(|| classify_ck2(signs[0], signs[1]));
            ScanLine {
                pattern: format_signs(&signs),
                family: class.as_ref().map(|c| c.family_name.clone()),
                kinematical: class.as_ref().and_then(|c| c.kinematical_name.clone()),
                physical: class.and_then(|c| c.physical_parameters),
                report,
            }
        })
        .collect();
    let code = lines.iter().map(|l| verdict_code(&l.report)).max().unwrap_or(0);
    let mut text = String::new();
    for l in &lines {
        if fmt == "json" {
            text += &serde_json::to_string(l).expect("serializes");
            text.push('\n');
            continue;
        }
        let rep = &l.report;
        let verdict = match (rep.sides_equal, rep.both_zero()) {
            (true, true) => "both sides zero",
            (true, false) => "sides equal, nonzero",
            (false, _) => "FAILS",
        };
        text += &format!("{} D={} {verdict}", l.pattern, rep.d_states);
        if let Some(ok) = rep.oracle_agrees {
            text += if ok { " oracle=agrees" } else { " oracle=DISAGREES" };
        }
        if let Some(f) = &l.family {
            text += &format!(" {f}");
        }
        if let (Some(k), Some(p)) = (&l.kinematical, &l.physical) {
            text += &format!(" [{k} {p}]");
        }
        text.push('\n');
    }
    Ok(Output { text, code })
}

fn stats_cmd(cli: &Cli, a: &InputArgs, stdin: &mut dyn Read) -> Result<Output, Failure> {
    let fmt = format_or(cli, "text", &["text", "json"])?;
    let r = obtain_r(cli, a, stdin)?;
    let s = structural_stats(&r);
    if fmt == "json" {
        let rec = serde_json::json!({
            "d_states": s.d_states,
            "side": r.matrix().dim(),
            "nnz": s.nnz,
            "zero_rows": s.zero_rows,
            "zero_cols": s.zero_cols,
            "min_zero_rows": s.min_zero_rows(),
            "min_zero_cols": s.min_zero_cols(),
            "rank": s.rank,
            "central_label": CENTRAL_LABEL,
        });
        return Ok(Output::ok(rec.to_string() + "\n"));
    }
    let side = r.matrix().dim();
    let mut text = format!("D = {} ({side}×{side}), nnz = {}\n", s.d_states, s.nnz);
    text += &format!("zero rows = {} (lower bound {})\n", s.zero_rows, s.min_zero_rows());
    text += &format!("zero cols = {} (lower bound {})\n", s.zero_cols, s.min_zero_cols());
    text += &match s.rank {
        Some(k) => format!("rank = {k} of {side}{}\n", if k < side { " (singular)" } else { "" }),
        None => "rank = n/a (symbolic entries; pass --assign)\n".to_string(),
    };
    Ok(Output::ok(text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ybx").chain(args.iter().copied());
        let code = run(argv, &mut input.as_bytes(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn assign_parsing() {
        let a = parse_assign("k1=1, k2=-1/2").unwrap();
        assert_eq!(a.len(), 2);
        assert!(parse_assign("k1").is_err());
        assert!(parse_assign("k1=x").is_err());
    }

    #[test]
    fn kappa_parsing() {
        let spec = parse_kappas(3, Some("1,k,-1/2")).unwrap();
        assert_eq!(spec.kappas()[1], Kappa::Symbolic);
        assert!(parse_kappas(2, Some("1")).is_err());
        assert!(parse_kappas(2, Some("1,q")).is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&["bogus"], "").0, 2);
        assert_eq!(call(&["ck"], "").0, 2);
        assert_eq!(call(&["ck", "--n", "0"], "").0, 2);
        assert_eq!(call(&["rmatrix", "--format", "pdf"], "").0, 2);
        assert_eq!(call(&["validate"], "algebra\n").0, 2);
        assert_eq!(call(&["--help"], "").0, 0);
    }

    #[test]
    fn ck_pipes_into_rmatrix() {
        let (code, doc, _) = call(&["ck", "--n", "2", "--symbolic"], "");
        assert_eq!(code, 0);
        assert!(doc.starts_with("algebra so_k_3\nparams k1 k2\nbasis J01 J02 J12\nprofile lie\n"));
        let (code, json, _) = call(&["rmatrix"], &doc);
        assert_eq!(code, 0);
        assert!(json.contains("[2, 12, \"k1\"]"));
    }

    #[test]
    fn verify_exit_codes() {
        let (code, doc, _) = call(&["ck", "--n", "2"], "");
        assert_eq!(code, 0);
        let (code, out, _) = call(&["verify", "--oracle"], &doc);
        assert_eq!(code, 0, "{out}");
        assert!(out.contains("both sides zero") && out.contains("agrees"));
        let bad = "rmatrix 2\n(1, 2) = 1\n(2, 4) = 1\n(4, 3) = 1\n";
        let (code, out, _) = call(&["verify"], bad);
        assert_eq!(code, 1, "{out}");
    }
}
