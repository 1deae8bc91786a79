//! Square sparse matrices with polynomial entries, 1-based, stored row-sorted.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{Assignment, Params, Polynomial, Rational, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("entry ({row}, {col}) outside 1..={dim}")]
    OutOfRange { row: usize, col: usize, dim: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("entry ({row}, {col}) = {value} is not a rational number")]
    Symbolic { row: usize, col: usize, value: String },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    dim: usize,
    params: Params,
    entries: BTreeMap<(usize, usize), Polynomial>,
}

impl SparseMatrix {
    pub fn new(dim: usize, params: &Params) -> Self {
        SparseMatrix {
            dim,
            params: params.clone(),
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(dim: usize, params: &Params) -> Self {
        let mut m = Self::new(dim, params);
        for i in 1..=dim {
            m.entries.insert((i, i), Polynomial::one(params));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sets an entry; zero removes it. Values over a different parameter list are
    /// re-expressed over this matrix's list when the names allow it.
    pub fn set(&mut self, row: usize, col: usize, value: Polynomial) -> Result<(), MatrixError> {
        if row == 0 || col == 0 || row > self.dim || col > self.dim {
            return Err(MatrixError::OutOfRange {
                row,
                col,
                dim: self.dim,
            });
        }
        let value = if value.params() == &self.params {
            value
        } else {
            value.reindex(&self.params)?
        };
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&Polynomial> {
        self.entries.get(&(row, col))
    }

    /// Entries in (row, col) ascending order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Polynomial)> + '_ {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn row(&self, row: usize) -> impl Iterator<Item = (usize, &Polynomial)> + '_ {
        self.entries
            .range((row, 0)..=(row, usize::MAX))
            .map(|(&(_, c), v)| (c, v))
    }

    pub fn nonzero_rows(&self) -> std::collections::BTreeSet<usize> {
        self.entries.keys().map(|&(r, _)| r).collect()
    }

    pub fn nonzero_cols(&self) -> std::collections::BTreeSet<usize> {
        self.entries.keys().map(|&(_, c)| c).collect()
    }

    /// Exact product `self · rhs`; cancelled entries are dropped.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        if self.params != rhs.params {
            return Err(ScalarError::ParamMismatch {
                left: self.params.names().join(" "),
                right: rhs.params.names().join(" "),
            }
            .into());
        }
        let mut out = SparseMatrix::new(self.dim, &self.params);
        let mut row_acc: BTreeMap<usize, Polynomial> = BTreeMap::new();
        let mut current = None;
        let flush = |out: &mut SparseMatrix, row: usize, acc: &mut BTreeMap<usize, Polynomial>| {
            for (c, v) in std::mem::take(acc) {
                if !v.is_zero() {
                    out.entries.insert((row, c), v);
                }
            }
        };
        for (&(i, k), a) in &self.entries {
            if current != Some(i) {
                if let Some(r) = current {
                    flush(&mut out, r, &mut row_acc);
                }
                current = Some(i);
            }
            for (j, b) in rhs.row(k) {
                let t = a.checked_mul(b)?;
                match row_acc.get_mut(&j) {
                    Some(acc) => acc.try_add_assign(&t)?,
                    None => {
                        row_acc.insert(j, t);
                    }
                }
            }
        }
        if let Some(r) = current {
            flush(&mut out, r, &mut row_acc);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, rhs: &SparseMatrix) -> Result<SparseMatrix, MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let mut out = self.clone();
        for (&(r, c), v) in &rhs.entries {
            let cur = out
                .entries
                .remove(&(r, c))
                .unwrap_or_else(|| Polynomial::zero(&self.params));
            let diff = cur.checked_sub(v)?;
            if !diff.is_zero() {
                out.entries.insert((r, c), diff);
            }
        }
        Ok(out)
    }

    /// Entrywise evaluation; entries that evaluate to zero disappear.
    pub fn specialize(&self, assignment: &Assignment) -> Result<SparseMatrix, MatrixError> {
        let mut out = SparseMatrix::new(self.dim, &self.params);
        for (&(r, c), v) in &self.entries {
            let value = v.specialize(assignment)?;
            if !value.is_zero() {
                out.entries.insert((r, c), value);
            }
        }
        Ok(out)
    }

    /// True when no entry depends on a parameter.
    pub fn is_numeric(&self) -> bool {
        self.entries.values().all(Polynomial::is_constant)
    }

    /// Entries as exact rationals, or the first symbolic entry as an error.
    pub fn rational_entries(&self) -> Result<BTreeMap<(usize, usize), Rational>, MatrixError> {
        self.entries
            .iter()
            .map(|(&(row, col), v)| match v.constant_value() {
                Some(q) => Ok(((row, col), q)),
                None => Err(MatrixError::Symbolic {
                    row,
                    col,
                    value: v.to_string(),
                }),
            })
            .collect()
    }
}

/// Exact rank of a parameter-free matrix by fraction-free (Bareiss) elimination.
///
/// Each nonzero row is first scaled by the lcm of its denominators so that the
/// elimination runs over the integers; every division in the loop is exact.
pub fn rational_rank(m: &SparseMatrix) -> Result<usize, MatrixError> {
    let values = m.rational_entries()?;
    let rows: Vec<usize> = m.nonzero_rows().into_iter().collect();
    let cols: Vec<usize> = m.nonzero_cols().into_iter().collect();
    let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(p, &c)| (c, p)).collect();

    let mut a: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|&r| {
            let row: Vec<(usize, &Rational)> = values
                .range((r, 0)..=(r, usize::MAX))
                .map(|(&(_, c), q)| (col_pos[&c], q))
                .collect();
            let lcm = row.iter().fold(BigInt::one(), |acc, (_, q)| acc.lcm(q.denom()));
            let mut dense = vec![BigInt::zero(); cols.len()];
            for (p, q) in row {
                dense[p] = q.numer() * (&lcm / q.denom());
            }
            dense
        })
        .collect();

    let (nrows, ncols) = (a.len(), cols.len());
    let mut rank = 0;
    let mut prev = BigInt::one();
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for i in rank + 1..nrows {
            let factor = a[i][c].clone();
            let (upper, lower) = a.split_at_mut(i);
            let (pivot_row, row) = (&upper[rank], &mut lower[0]);
            for (x, p) in row[c + 1..].iter_mut().zip(&pivot_row[c + 1..]) {
                *x = (&pivot * &*x - &factor * p) / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = pivot;
        rank += 1;
    }
    Ok(rank)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, ratio};

    fn numeric(dim: usize, entries: &[(usize, usize, Rational)]) -> SparseMatrix {
        let ps = Params::empty();
        let mut m = SparseMatrix::new(dim, &ps);
        for (r, c, v) in entries {
            m.set(*r, *c, Polynomial::constant(&ps, v.clone())).unwrap();
        }
        m
    }

    #[test]
    fn mul_basics() {
        let ps = Params::empty();
        let a = numeric(3, &[(1, 2, int(2)), (2, 3, int(5)), (3, 1, ratio(1, 2))]);
        assert!(a.mul(&SparseMatrix::new(3, &ps)).unwrap().is_zero());
        assert_eq!(SparseMatrix::identity(3, &ps).mul(&a).unwrap(), a);
        assert_eq!(a.mul(&SparseMatrix::identity(3, &ps)).unwrap(), a);
        let e12 = numeric(2, &[(1, 2, int(1))]);
        assert!(e12.mul(&e12).unwrap().is_zero());
        assert!(matches!(
            a.mul(&e12),
            Err(MatrixError::DimensionMismatch { left: 3, right: 2 })
        ));
    }

    #[test]
    fn mul_cancels_to_zero() {
        // [1 1] [ 1]   [0]
        //       [-1] =
        let a = numeric(2, &[(1, 1, int(1)), (1, 2, int(1))]);
        let b = numeric(2, &[(1, 1, int(1)), (2, 1, int(-1))]);
        assert!(a.mul(&b).unwrap().is_zero());
    }

    #[test]
    fn set_bounds() {
        let mut m = SparseMatrix::new(2, &Params::empty());
        let one = Polynomial::one(&Params::empty());
        assert!(m.set(0, 1, one.clone()).is_err());
        assert!(m.set(1, 3, one.clone()).is_err());
        m.set(1, 1, one).unwrap();
        m.set(1, 1, Polynomial::zero(&Params::empty())).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rational_rank(&SparseMatrix::new(4, &Params::empty())).unwrap(), 0);
        assert_eq!(rational_rank(&SparseMatrix::identity(9, &Params::empty())).unwrap(), 9);
        // second row is 3/2 times the first
        let m = numeric(
            3,
            &[
                (1, 1, int(2)),
                (1, 3, int(4)),
                (2, 1, int(3)),
                (2, 3, int(6)),
                (3, 2, ratio(1, 7)),
            ],
        );
        assert_eq!(rational_rank(&m).unwrap(), 2);
    }

    #[test]
    fn rank_rejects_symbolic() {
        let ps = Params::new(["k1"]).unwrap();
        let mut m = SparseMatrix::new(2, &ps);
        m.set(1, 2, Polynomial::var(&ps, "k1").unwrap()).unwrap();
        assert!(matches!(
            rational_rank(&m),
            Err(MatrixError::Symbolic { row: 1, col: 2, .. })
        ));
    }
}
