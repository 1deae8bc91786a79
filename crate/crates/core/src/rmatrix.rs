//! The `D² × D²` R-matrix built from centrally extended structure constants:
//!
//! ```text
//! R_{(i,j),(k,l)} = C_ij^k δ_l^D + C_ij^l δ_k^D
//! ```
//!
//! Pair indices are flattened row-major, `(i, j) ↦ (i-1)·D + j`.

use thiserror::Error;

use crate::algebra::ExtendedConstants;
use crate::poly::Assignment;
pub use crate::sparse::{rational_rank, MatrixError, SparseMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RMatrixError {
    #[error("pair ({i}, {j}) outside 1..={d}")]
    PairOutOfRange { i: usize, j: usize, d: usize },
    #[error("matrix side {side} is not the square of a positive integer")]
    NotASquare { side: usize },
    #[error("entry ({row}, {col}) breaks the central-charge pattern: {reason}")]
    Pattern {
        row: usize,
        col: usize,
        reason: &'static str,
    },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// `(i, j) ↦ (i-1)·D + j`, 1-based.
pub fn flatten(i: usize, j: usize, d: usize) -> Result<usize, RMatrixError> {
    if i == 0 || j == 0 || i > d || j > d {
        return Err(RMatrixError::PairOutOfRange { i, j, d });
    }
    Ok((i - 1) * d + j)
}

/// Inverse of [`flatten`].
pub fn unflatten(idx: usize, d: usize) -> (usize, usize) {
    ((idx - 1) / d + 1, (idx - 1) % d + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    TheoremConstructed,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMatrix {
    d_states: usize,
    matrix: SparseMatrix,
    source: Provenance,
}

impl RMatrix {
    pub fn new(d_states: usize, matrix: SparseMatrix, source: Provenance) -> Result<Self, RMatrixError> {
        if d_states == 0 || d_states.checked_mul(d_states) != Some(matrix.dim()) {
            return Err(RMatrixError::NotASquare { side: matrix.dim() });
        }
        Ok(RMatrix {
            d_states,
            matrix,
            source,
        })
    }

    /// Wraps a `D²`-sided matrix supplied from outside the construction.
    pub fn user_supplied(matrix: SparseMatrix) -> Result<Self, RMatrixError> {
        let side = matrix.dim();
        let d = num_integer::Roots::sqrt(&side);
        if d.checked_mul(d) != Some(side) {
            return Err(RMatrixError::NotASquare { side });
        }
        Self::new(d, matrix, Provenance::UserSupplied)
    }

    pub fn d_states(&self) -> usize {
        self.d_states
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn source(&self) -> Provenance {
        self.source
    }

    pub fn nnz(&self) -> usize {
        self.matrix.nnz()
    }

    /// Entry at `((i, j), (k, l))`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> Option<&crate::poly::Polynomial> {
        let d = self.d_states;
        self.matrix.get(flatten(i, j, d).ok()?, flatten(k, l, d).ok()?)
    }

    /// Every nonzero sits in a row `(i, j)` with `i, j < D` and a column `(k, l)`
    /// with exactly one of `k, l` equal to `D`.
    pub fn check_central_pattern(&self) -> Result<(), RMatrixError> {
        let d = self.d_states;
        for ((row, col), _) in self.matrix.iter() {
            let (i, j) = unflatten(row, d);
            let (k, l) = unflatten(col, d);
            if i == d || j == d {
                return Err(RMatrixError::Pattern {
                    row,
                    col,
                    reason: "row involves the central index",
                });
            }
            if (k == d) == (l == d) {
                return Err(RMatrixError::Pattern {
                    row,
                    col,
                    reason: "column must touch the central index exactly once",
                });
            }
        }
        Ok(())
    }
}

/// Builds `R` from extended constants: each `C_ij^k` lands at row `(i, j)` in
/// columns `(k, D)` and `(D, k)`.
pub fn build_r(ext: &ExtendedConstants) -> RMatrix {
    let d = ext.dim_ext();
    let mut m = SparseMatrix::new(d * d, ext.params());
    for ((i, j, k), c) in ext.iter() {
        let row = flatten(i, j, d).expect("indices below D");
        m.set(row, flatten(k, d, d).expect("k < D"), c.clone())
            .expect("in range");
        m.set(row, flatten(d, k, d).expect("k < D"), c.clone())
            .expect("in range");
    }
    debug_assert_eq!(m.nnz(), 2 * ext.nnz());
    RMatrix::new(d, m, Provenance::TheoremConstructed).expect("side is D²")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralStats {
    pub d_states: usize,
    pub nnz: usize,
    pub zero_rows: usize,
    pub zero_cols: usize,
    pub rank: Option<usize>,
}

impl StructuralStats {
    /// `2D − 1`: rows `(D, j)` and `(i, D)`.
    pub fn min_zero_rows(&self) -> usize {
        2 * self.d_states - 1
    }

    /// `(D − 1)² + 1`: columns `(k, l)` with `k, l < D`, plus `(D, D)`.
    pub fn min_zero_cols(&self) -> usize {
        (self.d_states - 1).pow(2) + 1
    }
}

/// Sparse-pattern counts; `rank` is filled only for parameter-free matrices.
pub fn structural_stats(r: &RMatrix) -> StructuralStats {
    let m = r.matrix();
    let side = m.dim();
    StructuralStats {
        d_states: r.d_states,
        nnz: m.nnz(),
        zero_rows: side - m.nonzero_rows().len(),
        zero_cols: side - m.nonzero_cols().len(),
        rank: if m.is_numeric() { rational_rank(m).ok() } else { None },
    }
}

/// Entrywise evaluation; provenance is kept.
pub fn specialize(r: &RMatrix, assignment: &Assignment) -> Result<RMatrix, RMatrixError> {
    Ok(RMatrix {
        d_states: r.d_states,
        matrix: r.matrix.specialize(assignment)?,
        source: r.source,
    })
}
