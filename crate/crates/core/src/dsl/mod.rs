//! Algebra-definition language and file formats.
//!
//! A document is line oriented; `#` starts a comment.
//!
//! ```text
//! algebra so_k_3
//! params k1 k2
//! basis J01 J02 J12
//! profile lie            # none | lie | super
//! [J01, J02] = k1*J12
//! [J01, J12] = -J02
//! [J02, J12] = k2*J01
//! ```
//!
//! Under `profile none` brackets are taken verbatim. Under `lie` and `super`
//! each bracket is stated once and its mirror is implied; `super` also accepts
//! `parity LABEL odd` lines. The central generator is never written: it is
//! adjoined by the pipeline and reported as `_central`.

mod export;

pub use export::{
    export_rmatrix, import_matrix_market, import_rmatrix_json, import_rmatrix_text, load_input, ExportError,
    ExportFormat, ImportError, Input,
};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{
    complete_antisymmetric, validate_antisymmetry, validate_jacobi, AlgebraError, Basis, Parity, StructureConstants,
    Violation,
};
use crate::lex::{self, Tok};
use crate::poly::{Params, PolyParser, Polynomial, ScalarError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    #[default]
    None,
    Lie,
    Super,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::None => "none",
            Profile::Lie => "lie",
            Profile::Super => "super",
        }
    }
}

impl FromStr for Profile {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(Profile::None),
            "lie" => Ok(Profile::Lie),
            "super" => Ok(Profile::Super),
            other => Err(format!("unknown profile `{other}` (expected none, lie or super)")),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, PartialOrd, Ord)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslErrorKind {
    #[error("{0}")]
    Lexical(String),
    #[error("{0}")]
    Syntax(String),
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("bracket [{left}, {right}] conflicts with the one at line {first_line}")]
    ConflictingBracket {
        left: String,
        right: String,
        first_line: usize,
    },
    #[error("[{left}, {right}] is inconsistent with its mirror: {detail}")]
    MirrorInconsistent {
        left: String,
        right: String,
        detail: String,
    },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct DslError {
    pub pos: Position,
    pub kind: DslErrorKind,
}

impl DslError {
    fn new(pos: Position, kind: DslErrorKind) -> Self {
        DslError { pos, kind }
    }
}

/// `[left, right] = Σ coeff · label`. Equality ignores `pos`.
#[derive(Debug, Clone, Eq)]
pub struct Bracket {
    pub left: String,
    pub right: String,
    /// Labels in order of first appearance; coefficients nonzero.
    pub rhs: Vec<(String, Polynomial)>,
    pub pos: Position,
}

impl PartialEq for Bracket {
    fn eq(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right && self.rhs == other.rhs
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraDocument {
    pub name: String,
    pub params: Params,
    pub basis: Basis,
    pub brackets: Vec<Bracket>,
    pub profile: Profile,
}

pub fn parse_algebra(text: &str) -> Result<AlgebraDocument, DslError> {
    parse_algebra_with(text, None)
}

/// Parses with an optional profile override (the `--profile` flag).
pub fn parse_algebra_with(text: &str, profile_override: Option<Profile>) -> Result<AlgebraDocument, DslError> {
    let mut name: Option<String> = None;
    let mut params: Option<Params> = None;
    let mut labels: Option<Vec<String>> = None;
    let mut profile: Option<(Profile, Position)> = None;
    let mut parity_lines: Vec<(String, Parity, Position)> = Vec::new();
    let mut brackets: Vec<Bracket> = Vec::new();
    let mut seen_header = false;
    let mut last_line = 0;

    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let trimmed = content.trim_start();
        if trimmed.trim().is_empty() {
            continue;
        }
        let indent = content.len() - trimmed.len();
        let at = |byte: usize| Position {
            line: line_no,
            col: content[..byte.min(content.len())].chars().count() + 1,
        };
        let start = at(indent);

        if trimmed.starts_with('[') {
            let params = params.get_or_insert_with(Params::empty);
            let labels = labels.as_deref().ok_or_else(|| {
                DslError::new(start, DslErrorKind::Syntax("bracket before `basis` declaration".into()))
            })?;
            brackets.push(parse_bracket(content, line_no, params, labels)?);
            continue;
        }

        let mut words = trimmed.split_whitespace();
        let keyword = words.next().unwrap_or("");
        let rest: Vec<&str> = words.collect();
        // column of the i-th argument
        let arg_pos = |i: usize| {
            let mut offset = indent + keyword.len();
            for (idx, w) in rest.iter().enumerate() {
                let found = content[offset..].find(w).map(|p| p + offset).unwrap_or(offset);
                if idx == i {
                    return at(found);
                }
                offset = found + w.len();
            }
            at(content.trim_end().len())
        };
        let syntax = |pos: Position, msg: String| DslError::new(pos, DslErrorKind::Syntax(msg));

        if !seen_header && keyword != "algebra" {
            return Err(syntax(start, "document must start with `algebra NAME`".into()));
        }
        match keyword {
            "algebra" => {
                if seen_header {
                    return Err(syntax(start, "duplicate `algebra` header".into()));
                }
                seen_header = true;
                match rest.as_slice() {
                    [n] if lex::is_identifier(n) => name = Some(n.to_string()),
                    [n] => {
                        return Err(DslError::new(
                            arg_pos(0),
                            DslErrorKind::Invalid(format!("invalid name `{n}`")),
                        ))
                    }
                    _ => return Err(syntax(start, "expected `algebra NAME`".into())),
                }
            }
            "params" => {
                if params.is_some() {
                    return Err(syntax(start, "`params` must appear once, before any bracket".into()));
                }
                for (i, w) in rest.iter().enumerate() {
                    if !lex::is_identifier(w) {
                        return Err(DslError::new(
                            arg_pos(i),
                            DslErrorKind::Invalid(format!("invalid parameter name `{w}`")),
                        ));
                    }
                    if labels.as_ref().is_some_and(|l| l.iter().any(|x| x == w)) {
                        return Err(DslError::new(
                            arg_pos(i),
                            DslErrorKind::Invalid(format!("`{w}` is already a basis label")),
                        ));
                    }
                }
                params = Some(Params::new(rest.iter().copied()).map_err(|e| {
                    let pos = match &e {
                        ScalarError::DuplicateParameter(p) => arg_pos(rest.iter().rposition(|w| w == p).unwrap_or(0)),
                        _ => start,
                    };
                    DslError::new(pos, DslErrorKind::Invalid(e.to_string()))
                })?);
            }
            "basis" => {
                if labels.is_some() {
                    return Err(syntax(start, "duplicate `basis` declaration".into()));
                }
                if rest.is_empty() {
                    return Err(syntax(start, "basis needs at least one generator".into()));
                }
                let mut out: Vec<String> = Vec::new();
                for (i, w) in rest.iter().enumerate() {
                    let problem = if !lex::is_identifier(w) {
                        Some(format!("invalid label `{w}`"))
                    } else if out.iter().any(|x| x == w) {
                        Some(format!("duplicate label `{w}`"))
                    } else if params.as_ref().is_some_and(|p| p.index_of(w).is_some()) {
                        Some(format!("`{w}` is already a parameter"))
                    } else {
                        None
                    };
                    if let Some(msg) = problem {
                        return Err(DslError::new(arg_pos(i), DslErrorKind::Invalid(msg)));
                    }
                    out.push(w.to_string());
                }
                labels = Some(out);
            }
            "profile" => {
                if profile.is_some() {
                    return Err(syntax(start, "duplicate `profile` line".into()));
                }
                match rest.as_slice() {
                    [p] => {
                        let parsed = p
                            .parse::<Profile>()
                            .map_err(|m| DslError::new(arg_pos(0), DslErrorKind::Invalid(m)))?;
                        profile = Some((parsed, start));
                    }
                    _ => return Err(syntax(start, "expected `profile none|lie|super`".into())),
                }
            }
            "parity" => {
                let Some(labels) = labels.as_ref() else {
                    return Err(syntax(start, "`parity` before `basis` declaration".into()));
                };
                match rest.as_slice() {
                    [label, p] => {
                        if !labels.iter().any(|l| l == label) {
                            return Err(DslError::new(arg_pos(0), DslErrorKind::UnknownLabel(label.to_string())));
                        }
                        let parity = match *p {
                            "odd" => Parity::Odd,
                            "even" => Parity::Even,
                            other => {
                                return Err(DslError::new(
                                    arg_pos(1),
                                    DslErrorKind::Invalid(format!("parity must be `odd` or `even`, got `{other}`")),
                                ))
                            }
                        };
                        if parity_lines.iter().any(|(l, _, _)| l == label) {
                            return Err(syntax(start, format!("duplicate parity for `{label}`")));
                        }
                        parity_lines.push((label.to_string(), parity, start));
                    }
                    _ => return Err(syntax(start, "expected `parity LABEL odd|even`".into())),
                }
            }
            other => {
                return Err(syntax(start, format!("unknown directive `{other}`")));
            }
        }
    }

    let end = Position {
        line: last_line.max(1),
        col: 1,
    };
    if !seen_header {
        return Err(DslError::new(
            end,
            DslErrorKind::Syntax("missing `algebra NAME` header".into()),
        ));
    }
    let labels =
        labels.ok_or_else(|| DslError::new(end, DslErrorKind::Syntax("missing `basis` declaration".into())))?;
    let profile_pos = profile.map(|(_, p)| p).unwrap_or(end);
    let profile = profile_override.or(profile.map(|(p, _)| p)).unwrap_or_default();

    let mut basis = Basis::new(labels).map_err(|e| DslError::new(end, DslErrorKind::Invalid(e.to_string())))?;
    match profile {
        Profile::Super => {
            let mut parity = vec![Parity::Even; basis.dim()];
            for (label, p, _) in &parity_lines {
                parity[basis.index_of(label).expect("checked") - 1] = *p;
            }
            basis = basis.with_parity(parity).expect("length matches");
        }
        _ => {
            if let Some((_, _, pos)) = parity_lines.first() {
                return Err(DslError::new(
                    *pos,
                    DslErrorKind::Invalid(format!(
                        "`parity` requires profile super (profile is {profile}, {profile_pos})"
                    )),
                ));
            }
        }
    }

    let doc = AlgebraDocument {
        name: name.expect("header seen"),
        params: params.unwrap_or_else(Params::empty),
        basis,
        brackets,
        profile,
    };
    doc.structure_constants()?;
    Ok(doc)
}

fn parse_bracket(content: &str, line_no: usize, params: &Params, labels: &[String]) -> Result<Bracket, DslError> {
    let pos_of = |byte: usize| Position {
        line: line_no,
        col: content[..byte.min(content.len())].chars().count() + 1,
    };
    let toks = lex::tokenize(content).map_err(|e| {
        DslError::new(
            pos_of(e.offset),
            DslErrorKind::Lexical(format!("unexpected character `{}`", e.found)),
        )
    })?;
    let end = content.trim_end().len();
    let mut p = PolyParser::new(&toks, params, end);
    let scalar = |e: ScalarError| match e {
        ScalarError::Parse { offset, message } => {
            let kind = match message
                .strip_prefix("unknown parameter `")
                .and_then(|m| m.strip_suffix('`'))
            {
                Some(name) => DslErrorKind::UnknownParameter(name.to_string()),
                None => DslErrorKind::Syntax(message),
            };
            DslError::new(pos_of(offset), kind)
        }
        other => DslError::new(pos_of(0), DslErrorKind::Invalid(other.to_string())),
    };
    let expect = |p: &mut PolyParser<'_>, tok: Tok| -> Result<(), DslError> {
        match p.bump() {
            Some(t) if t.tok == tok => Ok(()),
            Some(t) => Err(DslError::new(
                pos_of(t.offset),
                DslErrorKind::Syntax(format!("expected {}, found {}", tok.describe(), t.tok.describe())),
            )),
            None => Err(DslError::new(
                pos_of(end),
                DslErrorKind::Syntax(format!("expected {}, found end of line", tok.describe())),
            )),
        }
    };
    let label = |p: &mut PolyParser<'_>| -> Result<String, DslError> {
        match p.bump() {
            Some(t) => match &t.tok {
                Tok::Ident(name) if labels.contains(name) => Ok(name.clone()),
                Tok::Ident(name) => Err(DslError::new(
                    pos_of(t.offset),
                    DslErrorKind::UnknownLabel(name.clone()),
                )),
                other => Err(DslError::new(
                    pos_of(t.offset),
                    DslErrorKind::Syntax(format!("expected a basis label, found {}", other.describe())),
                )),
            },
            None => Err(DslError::new(
                pos_of(end),
                DslErrorKind::Syntax("expected a basis label".into()),
            )),
        }
    };

    let bracket_pos = pos_of(p.offset());
    expect(&mut p, Tok::LBracket)?;
    let left = label(&mut p)?;
    expect(&mut p, Tok::Comma)?;
    let right = label(&mut p)?;
    expect(&mut p, Tok::RBracket)?;
    expect(&mut p, Tok::Eq)?;

    let mut rhs: Vec<(String, Polynomial)> = Vec::new();
    let explicit_zero = matches!(p.peek().map(|t| &t.tok), Some(Tok::Num(n)) if num_traits::Zero::is_zero(n))
        && toks.len() == p_pos_after_one(&p);
    if explicit_zero {
        p.bump();
    } else {
        let mut negate = match p.peek().map(|t| &t.tok) {
            Some(Tok::Minus) => {
                p.bump();
                true
            }
            Some(Tok::Plus) => {
                p.bump();
                false
            }
            _ => false,
        };
        loop {
            let mut coeff = Polynomial::one(params);
            let term_label = loop {
                match p.peek() {
                    Some(t) => {
                        if let Tok::Ident(name) = &t.tok {
                            if labels.contains(name) {
                                p.bump();
                                break name.clone();
                            }
                            if params.index_of(name).is_none() {
                                let followed_by_star = p_next_is_star(&p);
                                let kind = if followed_by_star {
                                    DslErrorKind::UnknownParameter(name.clone())
                                } else {
                                    DslErrorKind::UnknownLabel(name.clone())
                                };
                                return Err(DslError::new(pos_of(t.offset), kind));
                            }
                        }
                    }
                    None => {
                        return Err(DslError::new(
                            pos_of(end),
                            DslErrorKind::Syntax("expected a term ending in a basis label".into()),
                        ))
                    }
                }
                let f = p.factor().map_err(scalar)?;
                coeff = coeff.checked_mul(&f).map_err(scalar)?;
                match p.bump() {
                    Some(t) if t.tok == Tok::Star => {}
                    Some(t) => {
                        return Err(DslError::new(
                            pos_of(t.offset),
                            DslErrorKind::Syntax(format!("expected `*`, found {}", t.tok.describe())),
                        ))
                    }
                    None => {
                        return Err(DslError::new(
                            pos_of(end),
                            DslErrorKind::Syntax("term must end with `*LABEL`".into()),
                        ))
                    }
                }
            };
            if negate {
                coeff = coeff.neg();
            }
            match rhs.iter_mut().find(|(l, _)| *l == term_label) {
                Some((_, c)) => c.try_add_assign(&coeff).map_err(scalar)?,
                None => rhs.push((term_label, coeff)),
            }
            match p.bump() {
                None => break,
                Some(t) if t.tok == Tok::Plus => negate = false,
                Some(t) if t.tok == Tok::Minus => negate = true,
                Some(t) => {
                    return Err(DslError::new(
                        pos_of(t.offset),
                        DslErrorKind::Syntax(format!("expected `+`, `-` or end of line, found {}", t.tok.describe())),
                    ))
                }
            }
        }
    }
    if let Some(t) = p.peek() {
        return Err(DslError::new(
            pos_of(t.offset),
            DslErrorKind::Syntax(format!("unexpected {}", t.tok.describe())),
        ));
    }
    rhs.retain(|(_, c)| !c.is_zero());
    Ok(Bracket {
        left,
        right,
        rhs,
        pos: bracket_pos,
    })
}

fn p_pos_after_one(p: &PolyParser<'_>) -> usize {
    p.position() + 1
}

fn p_next_is_star(p: &PolyParser<'_>) -> bool {
    matches!(p.peek_at(1).map(|t| &t.tok), Some(Tok::Star))
}

/// Right-hand side keyed by basis index.
type Combination = BTreeMap<usize, Polynomial>;

impl AlgebraDocument {
    /// Builds a document from constants. Under `lie`/`super` only brackets with
    /// `left <= right` (in basis order) are written; the mirrors are implied.
    pub fn from_constants(name: &str, basis: Basis, constants: &StructureConstants, profile: Profile) -> Self {
        let mut grouped: BTreeMap<(usize, usize), Vec<(String, Polynomial)>> = BTreeMap::new();
        for ((i, j, k), c) in constants.iter() {
            if profile != Profile::None && i > j {
                continue;
            }
            grouped
                .entry((i, j))
                .or_default()
                .push((basis.labels()[k - 1].clone(), c.clone()));
        }
        let brackets = grouped
            .into_iter()
            .map(|((i, j), rhs)| Bracket {
                left: basis.labels()[i - 1].clone(),
                right: basis.labels()[j - 1].clone(),
                rhs,
                pos: Position::default(),
            })
            .collect();
        AlgebraDocument {
            name: name.to_string(),
            params: constants.params().clone(),
            basis,
            brackets,
            profile,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Brackets as structure constants: verbatim under `none`, mirror-completed otherwise.
    pub fn structure_constants(&self) -> Result<StructureConstants, DslError> {
        let index = |label: &str, pos: Position| {
            self.basis
                .index_of(label)
                .ok_or_else(|| DslError::new(pos, DslErrorKind::UnknownLabel(label.to_string())))
        };
        let mut seen: BTreeMap<(usize, usize), (&Bracket, Combination)> = BTreeMap::new();
        for b in &self.brackets {
            let key = (index(&b.left, b.pos)?, index(&b.right, b.pos)?);
            let mut rhs = BTreeMap::new();
            for (label, c) in &b.rhs {
                rhs.insert(index(label, b.pos)?, c.clone());
            }
            match seen.get(&key) {
                Some((first, prev)) if *prev != rhs => {
                    return Err(DslError::new(
                        b.pos,
                        DslErrorKind::ConflictingBracket {
                            left: b.left.clone(),
                            right: b.right.clone(),
                            first_line: first.pos.line,
                        },
                    ))
                }
                Some(_) => {}
                None => {
                    seen.insert(key, (b, rhs));
                }
            }
        }

        let mut c = StructureConstants::new(self.dim(), &self.params);
        if let (Profile::Super, Some(p)) = (self.profile, self.basis.parity()) {
            c = c.with_parity(p.to_vec()).expect("length matches");
        }
        for (&(i, j), (b, rhs)) in &seen {
            for (&k, v) in rhs {
                c.set(i, j, k, v.clone())
                    .map_err(|e| DslError::new(b.pos, DslErrorKind::Invalid(e.to_string())))?;
            }
        }
        if self.profile == Profile::None {
            return Ok(c);
        }
        complete_antisymmetric(&c, self.profile == Profile::Super).map_err(|e| match e {
            AlgebraError::InconsistentMirror {
                i, j, found, expected, ..
            } => {
                let culprit = [seen.get(&(i, j)), seen.get(&(j, i))]
                    .into_iter()
                    .flatten()
                    .map(|(b, _)| *b)
                    .max_by_key(|b| b.pos)
                    .expect("one of the pair is stored");
                DslError::new(
                    culprit.pos,
                    DslErrorKind::MirrorInconsistent {
                        left: culprit.left.clone(),
                        right: culprit.right.clone(),
                        detail: format!("found {found}, expected {expected}"),
                    },
                )
            }
            other => DslError::new(Position::default(), DslErrorKind::Invalid(other.to_string())),
        })
    }

    /// Advisory axiom checks. Jacobi runs only when antisymmetry holds.
    pub fn validate(&self) -> Result<ValidationReport, DslError> {
        let c = self.structure_constants()?;
        let graded = self.profile == Profile::Super;
        let antisymmetry = validate_antisymmetry(&c, graded).expect("parity present when graded");
        let jacobi = antisymmetry
            .is_empty()
            .then(|| validate_jacobi(&c, graded).expect("parity present when graded"));
        Ok(ValidationReport {
            graded,
            antisymmetry,
            jacobi,
        })
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.basis.labels()[idx - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub graded: bool,
    pub antisymmetry: Vec<Violation>,
    /// `None` when skipped because antisymmetry failed.
    pub jacobi: Option<Vec<Violation>>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.as_ref().is_some_and(Vec::is_empty)
    }
}

/// Coefficient-times-label text with the sign pulled out, e.g. (`-`, `k1*J12`).
fn term_text(label: &str, c: &Polynomial) -> (bool, String) {
    if c.len() == 1 {
        let text = c.to_string();
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, text),
        };
        if body == "1" {
            (neg, label.to_string())
        } else {
            (neg, format!("{body}*{label}"))
        }
    } else {
        (false, format!("({c})*{label}"))
    }
}

impl fmt::Display for AlgebraDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "algebra {}", self.name)?;
        if !self.params.is_empty() {
            writeln!(f, "params {}", self.params.names().join(" "))?;
        }
        writeln!(f, "basis {}", self.basis.labels().join(" "))?;
        writeln!(f, "profile {}", self.profile)?;
        if self.profile == Profile::Super {
            if let Some(p) = self.basis.parity() {
                for (label, parity) in self.basis.labels().iter().zip(p) {
                    if *parity == Parity::Odd {
                        writeln!(f, "parity {label} odd")?;
                    }
                }
            }
        }
        for b in &self.brackets {
            write!(f, "[{}, {}] = ", b.left, b.right)?;
            if b.rhs.is_empty() {
                f.write_str("0")?;
            }
            for (n, (label, c)) in b.rhs.iter().enumerate() {
                let (neg, body) = term_text(label, c);
                match (n, neg) {
                    (0, true) => write!(f, "-{body}")?,
                    (0, false) => f.write_str(&body)?,
                    (_, true) => write!(f, " - {body}")?,
                    (_, false) => write!(f, " + {body}")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
