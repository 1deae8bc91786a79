//! Three-site operators and the exact constant Yang–Baxter check
//! `R12 R13 R23 = R23 R13 R12`.
//!
//! A `D³` index is `(p-1)·D² + (q-1)·D + r` for tensor slots `(p, q, r)`.
//! Products are ordinary row-times-column composition with the leftmost factor
//! outermost.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::poly::Polynomial;
use crate::rmatrix::{unflatten, RMatrix};
use crate::sparse::SparseMatrix;

/// Oracle bound used when `YBX_ORACLE_MAX_D` is unset.
pub const DEFAULT_ORACLE_MAX_D: usize = 7;
pub const ORACLE_ENV: &str = "YBX_ORACLE_MAX_D";

/// The oracle bound, honouring `YBX_ORACLE_MAX_D` when it parses.
pub fn oracle_max_d() -> usize {
    std::env::var(ORACLE_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_MAX_D)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum YbeError {
    #[error("D = {d} exceeds the oracle bound {bound}")]
    AboveOracleBound { d: usize, bound: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SitePair {
    S12,
    S13,
    S23,
}

impl fmt::Display for SitePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SitePair::S12 => "12",
            SitePair::S13 => "13",
            SitePair::S23 => "23",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `R12 R13 R23`
    Left,
    /// `R23 R13 R12`
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteEmbedding {
    pub site_pair: SitePair,
    pub matrix: SparseMatrix,
}

fn triple_index(p: usize, q: usize, r: usize, d: usize) -> usize {
    (p - 1) * d * d + (q - 1) * d + r
}

/// Places `R` on two of three tensor slots, identity on the third.
pub fn embed(r: &RMatrix, site_pair: SitePair) -> SiteEmbedding {
    let d = r.d_states();
    let mut m = SparseMatrix::new(d * d * d, r.matrix().params());
    for ((row, col), v) in r.matrix().iter() {
        let (i, j) = unflatten(row, d);
        let (k, l) = unflatten(col, d);
        for free in 1..=d {
            let (a, b) = match site_pair {
                SitePair::S12 => (triple_index(i, j, free, d), triple_index(k, l, free, d)),
                SitePair::S13 => (triple_index(i, free, j, d), triple_index(k, free, l, d)),
                SitePair::S23 => (triple_index(free, i, j, d), triple_index(free, k, l, d)),
            };
            m.set(a, b, v.clone()).expect("index within D³");
        }
    }
    SiteEmbedding { site_pair, matrix: m }
}

/// Exact product of two sparse matrices.
pub fn sparse_mul(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix, crate::sparse::MatrixError> {
    a.mul(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripleProducts {
    pub lhs: SparseMatrix,
    pub rhs: SparseMatrix,
}

/// Both sides through explicit embeddings and sparse products.
pub fn triple_products(r: &RMatrix) -> TripleProducts {
    let r12 = embed(r, SitePair::S12).matrix;
    let r13 = embed(r, SitePair::S13).matrix;
    let r23 = embed(r, SitePair::S23).matrix;
    let mul = |a: &SparseMatrix, b: &SparseMatrix| a.mul(b).expect("same dimension and params");
    TripleProducts {
        lhs: mul(&mul(&r12, &r13), &r23),
        rhs: mul(&mul(&r23, &r13), &r12),
    }
}

/// First entry where the two sides differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub row: usize,
    pub col: usize,
    pub lhs: String,
    pub rhs: String,
    pub residual: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct YbeReport {
    pub d_states: usize,
    pub lhs_nnz: usize,
    pub rhs_nnz: usize,
    pub sides_equal: bool,
    pub lhs_zero: bool,
    pub rhs_zero: bool,
    #[serde(serialize_with = "as_millis")]
    pub elapsed: Duration,
    pub witness: Option<Witness>,
    /// Set when the summation oracle was run as a cross-check.
    pub oracle_agrees: Option<bool>,
}

fn as_millis<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64((d.as_secs_f64() * 1e6).round() / 1e3)
}

impl YbeReport {
    pub fn both_zero(&self) -> bool {
        self.lhs_zero && self.rhs_zero
    }

    /// Single-line JSON record.
    pub fn to_record(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

impl fmt::Display for YbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = match (self.sides_equal, self.both_zero()) {
            (true, true) => "holds: both sides zero",
            (true, false) => "holds: sides equal and nonzero",
            (false, _) => "FAILS: sides differ",
        };
        writeln!(
            f,
            "cQYBE R12 R13 R23 = R23 R13 R12 with D = {}: {verdict}",
            self.d_states
        )?;
        writeln!(
            f,
            "  lhs nnz = {}, rhs nnz = {}, {:.3} ms",
            self.lhs_nnz,
            self.rhs_nnz,
            self.elapsed.as_secs_f64() * 1e3
        )?;
        if let Some(w) = &self.witness {
            writeln!(
                f,
                "  witness ({}, {}): lhs = {}, rhs = {}, lhs - rhs = {}",
                w.row, w.col, w.lhs, w.rhs, w.residual
            )?;
        }
        if let Some(ok) = self.oracle_agrees {
            writeln!(f, "  summation oracle {}", if ok { "agrees" } else { "DISAGREES" })?;
        }
        Ok(())
    }
}

/// Computes both triple products in full and compares them exactly.
pub fn verify_cqybe(r: &RMatrix) -> YbeReport {
    let start = Instant::now();
    let TripleProducts { lhs, rhs } = triple_products(r);
    report_from(r.d_states(), &lhs, &rhs, start.elapsed())
}

/// [`verify_cqybe`] plus an entry-for-entry comparison against
/// [`oracle_triple_product`] on both sides.
pub fn verify_cqybe_with_oracle(r: &RMatrix, max_d: usize) -> Result<YbeReport, YbeError> {
    if r.d_states() > max_d {
        return Err(YbeError::AboveOracleBound {
            d: r.d_states(),
            bound: max_d,
        });
    }
    let start = Instant::now();
    let TripleProducts { lhs, rhs } = triple_products(r);
    let mut report = report_from(r.d_states(), &lhs, &rhs, start.elapsed());
    let oracle_lhs = oracle_triple_product(r, Side::Left, max_d)?;
    let oracle_rhs = oracle_triple_product(r, Side::Right, max_d)?;
    report.oracle_agrees = Some(oracle_lhs == lhs && oracle_rhs == rhs);
    Ok(report)
}

fn report_from(d: usize, lhs: &SparseMatrix, rhs: &SparseMatrix, elapsed: Duration) -> YbeReport {
    let diff = lhs.checked_sub(rhs).expect("same shape");
    let witness = diff.iter().next().map(|((row, col), residual)| {
        let show = |m: &SparseMatrix| m.get(row, col).map_or_else(|| "0".to_string(), Polynomial::to_string);
        Witness {
            row,
            col,
            lhs: show(lhs),
            rhs: show(rhs),
            residual: residual.to_string(),
        }
    });
    YbeReport {
        d_states: d,
        lhs_nnz: lhs.nnz(),
        rhs_nnz: rhs.nnz(),
        sides_equal: diff.is_zero(),
        lhs_zero: lhs.is_zero(),
        rhs_zero: rhs.is_zero(),
        elapsed,
        witness,
        oracle_agrees: None,
    }
}

/// One side of the equation by direct component summation, never building the
/// three-site matrices.
///
/// With `F^{A,B} F^{A',B'} = δ^{A',B} F^{A,B'}` the left side collapses through
/// `δ^{k1,i2} δ^{l1,m2} δ^{j2,m1}` and `δ^{k2,m3} δ^{i3,m2} δ^{l2,j3}`, leaving
///
/// ```text
/// (R12 R13 R23)[(i1,j1,m1), (m3,k3,l3)] = Σ_{k1,l1,l2} R[(i1,j1),(k1,l1)] R[(k1,m1),(m3,l2)] R[(l1,l2),(k3,l3)]
/// (R23 R13 R12)[(a,b,c), (k1,l1,c')]    = Σ_{x,y,u}    R[(b,c),(x,y)]     R[(a,y),(u,c')]    R[(u,x),(k1,l1)]
/// ```
pub fn oracle_triple_product(r: &RMatrix, side: Side, max_d: usize) -> Result<SparseMatrix, YbeError> {
    let d = r.d_states();
    if d > max_d {
        return Err(YbeError::AboveOracleBound { d, bound: max_d });
    }
    let params = r.matrix().params().clone();
    // dense lookup R[(i,j),(k,l)] with 0-based slots
    let mut table: Vec<Option<&Polynomial>> = vec![None; d.pow(4)];
    for ((row, col), v) in r.matrix().iter() {
        table[(row - 1) * d * d + (col - 1)] = Some(v);
    }
    let at = |i: usize, j: usize, k: usize, l: usize| table[((i * d + j) * d + k) * d + l];
    let idx3 = |p: usize, q: usize, s: usize| (p * d + q) * d + s + 1;

    let mut out = SparseMatrix::new(d * d * d, &params);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let mut row_acc: Vec<Option<Polynomial>> = vec![None; d * d * d];
                for x in 0..d {
                    for y in 0..d {
                        let first = match side {
                            Side::Left => at(a, b, x, y),
                            Side::Right => at(b, c, x, y),
                        };
                        let Some(first) = first else { continue };
                        for p in 0..d {
                            for q in 0..d {
                                for s in 0..d {
                                    for z in 0..d {
                                        let (second, third) = match side {
                                            // x = k1, y = l1, z = l2; column (p,q,s) = (m3,k3,l3)
                                            Side::Left => (at(x, c, p, z), at(y, z, q, s)),
                                            // x, y as above, z = u; column (p,q,s) = (k1,l1,c')
                                            Side::Right => (at(a, y, z, s), at(z, x, p, q)),
                                        };
                                        let (Some(second), Some(third)) = (second, third) else {
                                            continue;
                                        };
                                        let term = &(first * second) * third;
                                        let slot = &mut row_acc[(p * d + q) * d + s];
                                        match slot {
                                            Some(acc) => acc.try_add_assign(&term).expect("shared params"),
                                            None => *slot = Some(term),
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                let row = idx3(a, b, c);
                for (col0, v) in row_acc.into_iter().enumerate() {
                    if let Some(v) = v {
                        out.set(row, col0 + 1, v).expect("in range");
                    }
                }
            }
        }
    }
    Ok(out)
}
