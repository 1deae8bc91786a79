//! Test-side oracles that share no code with the library's construction or
//! products: dense matrices, Kronecker products and Gauss-Jordan rank.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use ybx::algebra::{ExtendedConstants, StructureConstants};
use ybx::poly::{Params, Polynomial};
use ybx::rmatrix::RMatrix;

pub type Q = BigRational;
pub type Dense = Vec<Vec<Q>>;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn read(rel: impl AsRef<Path>) -> String {
    std::fs::read_to_string(manifest_dir().join(rel)).expect("fixture readable")
}

pub fn files_with_ext(dir: &str, ext: &str) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(manifest_dir().join(dir))
        .expect("directory exists")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    v.sort();
    v
}

pub fn zeros(n: usize) -> Dense {
    vec![vec![Q::zero(); n]; n]
}

pub fn identity(n: usize) -> Dense {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Q::one();
    }
    m
}

pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = zeros(n * m);
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

/// Permutation swapping tensor slots 2 and 3 of a `d³` space.
pub fn swap23(d: usize) -> Dense {
    let mut p = zeros(d * d * d);
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                p[a * d * d + b * d + c][a * d * d + c * d + b] = Q::one();
            }
        }
    }
    p
}

/// `(R12 R13 R23, R23 R13 R12)` by Kronecker products, `R13 = P23 R12 P23`.
pub fn brute_force_sides(r: &Dense, d: usize) -> (Dense, Dense) {
    let id = identity(d);
    let r12 = kron(r, &id);
    let r23 = kron(&id, r);
    let p = swap23(d);
    let r13 = matmul(&matmul(&p, &r12), &p);
    let lhs = matmul(&matmul(&r12, &r13), &r23);
    let rhs = matmul(&matmul(&r23, &r13), &r12);
    (lhs, rhs)
}

/// Dense copy of a numeric library matrix (0-based).
pub fn to_dense(r: &RMatrix) -> Dense {
    let n = r.matrix().dim();
    let mut m = zeros(n);
    for ((row, col), v) in r.matrix().iter() {
        m[row - 1][col - 1] = v.constant_value().expect("numeric entry");
    }
    m
}

/// The R-matrix straight from its defining formula, entry by entry over all
/// `(i, j, k, l)`, for numeric extended constants.
pub fn formula_r(ext: &ExtendedConstants) -> Dense {
    let d = ext.dim_ext();
    let c = |i: usize, j: usize, k: usize| {
        ext.get(i, j, k)
            .map(|p| p.constant_value().expect("numeric"))
            .unwrap_or_else(Q::zero)
    };
    let delta = |a: usize, b: usize| if a == b { Q::one() } else { Q::zero() };
    let mut m = zeros(d * d);
    for i in 1..=d {
        for j in 1..=d {
            for k in 1..=d {
                for l in 1..=d {
                    m[(i - 1) * d + j - 1][(k - 1) * d + l - 1] = c(i, j, k) * delta(l, d) + c(i, j, l) * delta(k, d);
                }
            }
        }
    }
    m
}

/// Rank by plain Gauss-Jordan elimination over the rationals.
pub fn gauss_rank(m: &Dense) -> usize {
    let mut a = m.clone();
    let (rows, cols) = (a.len(), a.first().map_or(0, Vec::len));
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let inv = Q::one() / &a[rank][c];
        for x in a[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let pivot_row = a[rank].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn is_zero(m: &Dense) -> bool {
    m.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Random rational with numerator and denominator in `[-9, 9]`, denominator nonzero.
pub fn random_rational(rng: &mut ChaCha8Rng) -> Q {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        let d: i64 = rng.gen_range(-9..=9);
        if n != 0 && d != 0 {
            return q(n, d);
        }
    }
}

/// Random `d`-dimensional constants, each `C_ij^k` nonzero with probability `density`.
pub fn random_constants(rng: &mut ChaCha8Rng, d: usize, density: f64) -> StructureConstants {
    let ps = Params::empty();
    let mut c = StructureConstants::new(d, &ps);
    for i in 1..=d {
        for j in 1..=d {
            for k in 1..=d {
                if rng.gen_bool(density) {
                    c.set(i, j, k, Polynomial::constant(&ps, random_rational(rng))).unwrap();
                }
            }
        }
    }
    c
}

/// Nonzero pattern of a dense matrix as 1-based `(row, col) -> value`.
pub fn support(m: &Dense) -> BTreeMap<(usize, usize), Q> {
    let mut out = BTreeMap::new();
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                out.insert((i + 1, j + 1), v.clone());
            }
        }
    }
    out
}
