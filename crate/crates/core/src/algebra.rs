//! Structure constants of a bilinear law `X_i * X_j = C_ij^k X_k`, optional
//! Lie / Lie-super axiom checks, and the central extension feeding the R-matrix.
//!
//! Indices are 1-based everywhere in this module.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::poly::{Params, Polynomial, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("index ({i}, {j}, {k}) outside 1..={dim}")]
    IndexOutOfRange { i: usize, j: usize, k: usize, dim: usize },
    #[error("graded check requested but the basis carries no parity")]
    MissingParity,
    #[error("parity list has {got} entries, expected {dim}")]
    ParityLength { got: usize, dim: usize },
    #[error("coefficient ({i}, {j}, {k}) involves the central index {dim_ext}")]
    TouchesCentral {
        i: usize,
        j: usize,
        k: usize,
        dim_ext: usize,
    },
    #[error("mirror of ({i}, {j}, {k}) is {found}, expected {expected}")]
    InconsistentMirror {
        i: usize,
        j: usize,
        k: usize,
        found: String,
        expected: String,
    },
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("basis must have at least one generator")]
    EmptyBasis,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn bit(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

/// `(-1)^{p q}`
fn koszul(p: Parity, q: Parity) -> i64 {
    if p.bit() * q.bit() == 1 {
        -1
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Basis {
    labels: Vec<String>,
    parity: Option<Vec<Parity>>,
}

impl Basis {
    pub fn new(labels: Vec<String>) -> Result<Self, AlgebraError> {
        if labels.is_empty() {
            return Err(AlgebraError::EmptyBasis);
        }
        for (n, l) in labels.iter().enumerate() {
            if labels[..n].contains(l) {
                return Err(AlgebraError::DuplicateLabel(l.clone()));
            }
        }
        Ok(Basis { labels, parity: None })
    }

    pub fn with_parity(mut self, parity: Vec<Parity>) -> Result<Self, AlgebraError> {
        if parity.len() != self.labels.len() {
            return Err(AlgebraError::ParityLength {
                got: parity.len(),
                dim: self.labels.len(),
            });
        }
        self.parity = Some(parity);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parity(&self) -> Option<&[Parity]> {
        self.parity.as_deref()
    }

    /// 1-based index of a label.
    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label).map(|i| i + 1)
    }
}

/// Key `(i, j, k)` of `C_ij^k`.
pub type Triple = (usize, usize, usize);

/// `C_ij^k` over a `dim`-dimensional basis. Absent keys are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    params: Params,
    parity: Option<Vec<Parity>>,
    coeffs: BTreeMap<Triple, Polynomial>,
}

impl StructureConstants {
    pub fn new(dim: usize, params: &Params) -> Self {
        StructureConstants {
            dim,
            params: params.clone(),
            parity: None,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn with_parity(mut self, parity: Vec<Parity>) -> Result<Self, AlgebraError> {
        if parity.len() != self.dim {
            return Err(AlgebraError::ParityLength {
                got: parity.len(),
                dim: self.dim,
            });
        }
        self.parity = Some(parity);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn parity(&self) -> Option<&[Parity]> {
        self.parity.as_deref()
    }

    /// Sets `C_ij^k`; a zero value removes the key.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Polynomial) -> Result<(), AlgebraError> {
        let dim = self.dim;
        if [i, j, k].iter().any(|&x| x == 0 || x > dim) {
            return Err(AlgebraError::IndexOutOfRange { i, j, k, dim });
        }
        let value = value.reindex(&self.params)?;
        if value.is_zero() {
            self.coeffs.remove(&(i, j, k));
        } else {
            self.coeffs.insert((i, j, k), value);
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<&Polynomial> {
        self.coeffs.get(&(i, j, k))
    }

    fn get_or_zero(&self, i: usize, j: usize, k: usize) -> Polynomial {
        self.get(i, j, k)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(&self.params))
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Triple, &Polynomial)> + '_ {
        self.coeffs.iter().map(|(&t, p)| (t, p))
    }

    /// Entrywise evaluation; zero results are dropped.
    pub fn specialize(&self, assignment: &crate::poly::Assignment) -> Result<Self, AlgebraError> {
        let mut out = StructureConstants {
            coeffs: BTreeMap::new(),
            ..self.clone()
        };
        for (&(i, j, k), c) in &self.coeffs {
            out.set(i, j, k, c.specialize(assignment)?)?;
        }
        Ok(out)
    }

    fn parity_of(&self, graded: bool) -> Result<Option<&[Parity]>, AlgebraError> {
        match (graded, self.parity.as_deref()) {
            (false, _) => Ok(None),
            (true, Some(p)) => Ok(Some(p)),
            (true, None) => Err(AlgebraError::MissingParity),
        }
    }
}

/// Constants over `D = d + 1` generators where index `D` is central:
/// no key has `D` in any slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedConstants {
    dim_ext: usize,
    params: Params,
    coeffs: BTreeMap<Triple, Polynomial>,
}

impl ExtendedConstants {
    /// Checked constructor for hand-built inputs. Rejects any key touching the central index.
    pub fn from_coeffs<I>(dim_ext: usize, params: &Params, coeffs: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Triple, Polynomial)>,
    {
        let mut inner = StructureConstants::new(dim_ext, params);
        for ((i, j, k), c) in coeffs {
            if i == dim_ext || j == dim_ext || k == dim_ext {
                return Err(AlgebraError::TouchesCentral { i, j, k, dim_ext });
            }
            inner.set(i, j, k, c)?;
        }
        let ext = ExtendedConstants {
            dim_ext,
            params: params.clone(),
            coeffs: inner.coeffs,
        };
        debug_assert!(ext.central_vanishes());
        Ok(ext)
    }

    pub fn dim_ext(&self) -> usize {
        self.dim_ext
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn nnz(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> Option<&Polynomial> {
        self.coeffs.get(&(i, j, k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Triple, &Polynomial)> + '_ {
        self.coeffs.iter().map(|(&t, p)| (t, p))
    }

    /// Scans every key for the central index.
    pub fn central_vanishes(&self) -> bool {
        let d = self.dim_ext;
        self.coeffs.keys().all(|&(i, j, k)| i < d && j < d && k < d)
    }
}

/// Adjoins a central generator `X_D`, `D = d + 1`, copying the coefficients verbatim.
pub fn centrally_extend(c: &StructureConstants) -> ExtendedConstants {
    let ext = ExtendedConstants {
        dim_ext: c.dim + 1,
        params: c.params.clone(),
        coeffs: c.coeffs.clone(),
    };
    assert!(ext.central_vanishes(), "central extension touched index D");
    ext
}

/// A failed axiom instance together with the nonzero residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub indices: Vec<usize>,
    pub residual: Polynomial,
}

/// Checks `C_ij^k = -(-1)^{p(i)p(j)} C_ji^k`. Each unordered pair `i <= j` is
/// reported at most once per `k`, keyed `(i, j, k)`.
pub fn validate_antisymmetry(c: &StructureConstants, graded: bool) -> Result<Vec<Violation>, AlgebraError> {
    let parity = c.parity_of(graded)?;
    let sign = |i: usize, j: usize| parity.map_or(1, |p| koszul(p[i - 1], p[j - 1]));
    let mut pairs: Vec<Triple> = c
        .coeffs
        .keys()
        .map(|&(i, j, k)| if i <= j { (i, j, k) } else { (j, i, k) })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();

    let mut out = Vec::new();
    for (i, j, k) in pairs {
        let cij = c.get_or_zero(i, j, k);
        let cji = c.get_or_zero(j, i, k);
        // C_ij + s C_ji must vanish, with s = (-1)^{p(i)p(j)}
        let residual = if sign(i, j) == 1 { &cij + &cji } else { &cij - &cji };
        if !residual.is_zero() {
            out.push(Violation {
                indices: vec![i, j, k],
                residual,
            });
        }
    }
    Ok(out)
}

/// Checks the (graded) Jacobi identity
/// `(-1)^{p_i p_k} [[X_i,X_j],X_k] + (-1)^{p_j p_i} [[X_j,X_k],X_i] + (-1)^{p_k p_j} [[X_k,X_i],X_j] = 0`
/// componentwise, for all `i, j, k, l`.
pub fn validate_jacobi(c: &StructureConstants, graded: bool) -> Result<Vec<Violation>, AlgebraError> {
    let parity = c.parity_of(graded)?;
    let sign = |a: usize, b: usize| parity.map_or(1, |p| koszul(p[a - 1], p[b - 1]));
    let d = c.dim;

    // [[X_a,X_b],X_c]^l = sum_m C_ab^m C_mc^l
    let by_first: BTreeMap<usize, Vec<(Triple, &Polynomial)>> =
        c.coeffs.iter().fold(BTreeMap::new(), |mut acc, (&t, p)| {
            acc.entry(t.0).or_default().push((t, p));
            acc
        });
    let nested = |a: usize, b: usize, cc: usize| -> BTreeMap<usize, Polynomial> {
        let mut acc: BTreeMap<usize, Polynomial> = BTreeMap::new();
        for m in 1..=d {
            let Some(cab) = c.get(a, b, m) else { continue };
            for &((_, second, l), cml) in by_first.get(&m).into_iter().flatten() {
                if second != cc {
                    continue;
                }
                let term = cab * cml;
                acc.entry(l)
                    .or_insert_with(|| Polynomial::zero(&c.params))
                    .try_add_assign(&term)
                    .expect("shared params");
            }
        }
        acc
    };

    let mut out = Vec::new();
    for i in 1..=d {
        for j in 1..=d {
            for k in 1..=d {
                let mut total: BTreeMap<usize, Polynomial> = BTreeMap::new();
                let parts = [
                    (sign(i, k), nested(i, j, k)),
                    (sign(j, i), nested(j, k, i)),
                    (sign(k, j), nested(k, i, j)),
                ];
                for (s, part) in parts {
                    for (l, v) in part {
                        let v = if s == 1 { v } else { v.neg() };
                        total
                            .entry(l)
                            .or_insert_with(|| Polynomial::zero(&c.params))
                            .try_add_assign(&v)
                            .expect("shared params");
                    }
                }
                for (l, v) in total {
                    if !v.is_zero() {
                        out.push(Violation {
                            indices: vec![i, j, k, l],
                            residual: v,
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Fills in the mirror `C_ji^k = -(-1)^{p(i)p(j)} C_ij^k` of every stored coefficient.
pub fn complete_antisymmetric(partial: &StructureConstants, graded: bool) -> Result<StructureConstants, AlgebraError> {
    let parity = partial.parity_of(graded)?;
    let sign = |i: usize, j: usize| parity.map_or(1, |p| koszul(p[i - 1], p[j - 1]));
    let mut out = partial.clone();
    for (&(i, j, k), value) in &partial.coeffs {
        let expected = if sign(i, j) == 1 { value.neg() } else { value.clone() };
        match partial.get(j, i, k) {
            Some(found) if *found == expected => {}
            None if i != j => {
                out.coeffs.insert((j, i, k), expected);
            }
            found => {
                return Err(AlgebraError::InconsistentMirror {
                    i: j,
                    j: i,
                    k,
                    found: found.map_or_else(|| "0".to_string(), |p| p.to_string()),
                    expected: expected.to_string(),
                })
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::int;

    fn so3_symbolic() -> StructureConstants {
        // [J01,J02] = k1 J12, [J01,J12] = -J02, [J02,J12] = k2 J01, both orientations
        let ps = Params::new(["k1", "k2"]).unwrap();
        let k1 = Polynomial::var(&ps, "k1").unwrap();
        let k2 = Polynomial::var(&ps, "k2").unwrap();
        let one = Polynomial::one(&ps);
        let mut c = StructureConstants::new(3, &ps);
        c.set(1, 2, 3, k1.clone()).unwrap();
        c.set(2, 1, 3, k1.neg()).unwrap();
        c.set(1, 3, 2, one.neg()).unwrap();
        c.set(3, 1, 2, one).unwrap();
        c.set(2, 3, 1, k2.clone()).unwrap();
        c.set(3, 2, 1, k2.neg()).unwrap();
        c
    }

    pub(crate) fn arbitrary_d2() -> StructureConstants {
        let ps = Params::empty();
        let mut c = StructureConstants::new(2, &ps);
        c.set(1, 2, 1, Polynomial::from_int(&ps, 5)).unwrap();
        c.set(1, 2, 2, Polynomial::from_int(&ps, 7)).unwrap();
        c.set(2, 1, 1, Polynomial::from_int(&ps, 3)).unwrap();
        c
    }

    #[test]
    fn extend_so3() {
        let ext = centrally_extend(&so3_symbolic());
        assert_eq!(ext.dim_ext(), 4);
        assert_eq!(ext.nnz(), 6);
        assert!(ext.central_vanishes());
    }

    #[test]
    fn extend_empty_and_arbitrary() {
        let ext = centrally_extend(&StructureConstants::new(1, &Params::empty()));
        assert_eq!((ext.dim_ext(), ext.nnz()), (2, 0));
        let c = arbitrary_d2();
        let ext = centrally_extend(&c);
        assert_eq!(ext.dim_ext(), 3);
        assert_eq!(ext.iter().collect::<Vec<_>>(), c.iter().collect::<Vec<_>>());
    }

    #[test]
    fn from_coeffs_rejects_central() {
        let ps = Params::empty();
        let err = ExtendedConstants::from_coeffs(3, &ps, [((1, 2, 3), Polynomial::one(&ps))]).unwrap_err();
        assert!(matches!(err, AlgebraError::TouchesCentral { .. }));
    }

    #[test]
    fn set_rejects_out_of_range() {
        let mut c = StructureConstants::new(2, &Params::empty());
        let one = Polynomial::one(&Params::empty());
        assert!(c.set(0, 1, 1, one.clone()).is_err());
        assert!(c.set(1, 3, 1, one).is_err());
    }

    #[test]
    fn antisymmetry_examples() {
        assert!(validate_antisymmetry(&so3_symbolic(), false).unwrap().is_empty());
        // 5 vs -3 at (1,2,1) and the unmatched C_12^2 = 7
        let v = validate_antisymmetry(&arbitrary_d2(), false).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].indices, vec![1, 2, 1]);
        assert_eq!(v[0].residual.constant_value(), Some(int(8)));
        assert_eq!(v[1].indices, vec![1, 2, 2]);

        let ps = Params::empty();
        let mut only = StructureConstants::new(2, &ps);
        only.set(1, 2, 1, Polynomial::from_int(&ps, 5)).unwrap();
        only.set(2, 1, 1, Polynomial::from_int(&ps, 3)).unwrap();
        let v = validate_antisymmetry(&only, false).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].indices, vec![1, 2, 1]);

        assert!(validate_antisymmetry(&StructureConstants::new(3, &ps), false)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn graded_checks_need_parity() {
        assert_eq!(
            validate_antisymmetry(&so3_symbolic(), true),
            Err(AlgebraError::MissingParity)
        );
        assert_eq!(validate_jacobi(&so3_symbolic(), true), Err(AlgebraError::MissingParity));
        assert_eq!(
            complete_antisymmetric(&so3_symbolic(), true).map(|_| ()),
            Err(AlgebraError::MissingParity)
        );
    }

    #[test]
    fn jacobi_examples() {
        assert!(validate_jacobi(&so3_symbolic(), false).unwrap().is_empty());
        assert!(validate_jacobi(&StructureConstants::new(3, &Params::empty()), false)
            .unwrap()
            .is_empty());

        // An antisymmetric perturbation of one so(3)-shaped bracket keeps Jacobi:
        // every nested bracket lands on [X_m, X_m] or pairs up with its mirror.
        let ps = so3_symbolic().params().clone();
        let k1p1 = Polynomial::parse(&ps, "k1 + 1").unwrap();
        let mut both = so3_symbolic();
        both.set(1, 2, 3, k1p1.clone()).unwrap();
        both.set(2, 1, 3, k1p1.neg()).unwrap();
        assert!(validate_jacobi(&both, false).unwrap().is_empty());

        // Perturbing the single stored C_12^3 does break it.
        // (1,2,1) on X2: C_12^3 C_31^2 + C_21^3 C_31^2 = (k1+1) - k1 = 1
        // (2,1,2) on X1: C_21^3 C_32^1 + C_12^3 C_32^1 = k1 k2 - (k1+1) k2 = -k2
        let mut bad = so3_symbolic();
        bad.set(1, 2, 3, k1p1).unwrap();
        let v = validate_jacobi(&bad, false).unwrap();
        let find = |idx: [usize; 4]| v.iter().find(|x| x.indices == idx).map(|x| x.residual.to_string());
        assert_eq!(find([1, 2, 1, 2]).as_deref(), Some("1"));
        assert_eq!(find([2, 1, 2, 1]).as_deref(), Some("-k2"));
        for x in &v {
            let ijk = &x.indices[..3];
            assert!(
                ijk.contains(&1) && ijk.contains(&2),
                "violation away from the perturbed pair: {x:?}"
            );
        }
    }

    #[test]
    fn completion() {
        let ps = Params::new(["k1"]).unwrap();
        let k1 = Polynomial::var(&ps, "k1").unwrap();
        let mut partial = StructureConstants::new(3, &ps);
        partial.set(1, 2, 3, k1.clone()).unwrap();
        let full = complete_antisymmetric(&partial, false).unwrap();
        assert_eq!(full.get(2, 1, 3), Some(&k1.neg()));
        assert_eq!(complete_antisymmetric(&full, false).unwrap(), full);

        let mut conflict = partial.clone();
        conflict.set(2, 1, 3, k1.clone()).unwrap();
        assert!(matches!(
            complete_antisymmetric(&conflict, false),
            Err(AlgebraError::InconsistentMirror { .. })
        ));
    }

    #[test]
    fn graded_completion_odd_pair() {
        let ps = Params::empty();
        let mut partial = StructureConstants::new(3, &ps)
            .with_parity(vec![Parity::Odd, Parity::Odd, Parity::Even])
            .unwrap();
        partial.set(1, 2, 3, Polynomial::one(&ps)).unwrap();
        let full = complete_antisymmetric(&partial, true).unwrap();
        assert_eq!(full.get(2, 1, 3), Some(&Polynomial::one(&ps)));
        assert!(validate_antisymmetry(&full, true).unwrap().is_empty());
        // ungraded view of the same data sees a symmetric pair
        assert_eq!(validate_antisymmetry(&full, false).unwrap().len(), 1);
    }

    #[test]
    fn even_diagonal_cannot_be_completed() {
        let ps = Params::empty();
        let mut partial = StructureConstants::new(2, &ps);
        partial.set(1, 1, 2, Polynomial::one(&ps)).unwrap();
        assert!(complete_antisymmetric(&partial, false).is_err());
    }

    #[test]
    fn super_jacobi_osp12_like() {
        // osp(1|2): H,E,F even; Q+,Q- odd.
        // [H,E]=2E [H,F]=-2F [E,F]=H [H,Q+]=Q+ [H,Q-]=-Q- [E,Q-]=-Q+ [F,Q+]=-Q-
        // {Q+,Q+}=2E {Q-,Q-}=-2F {Q+,Q-}=H
        let ps = Params::empty();
        let n = |v: i64| Polynomial::from_int(&ps, v);
        let (h, e, f, qp, qm) = (1, 2, 3, 4, 5);
        let mut c = StructureConstants::new(5, &ps)
            .with_parity(vec![Parity::Even, Parity::Even, Parity::Even, Parity::Odd, Parity::Odd])
            .unwrap();
        for (i, j, k, v) in [
            (h, e, e, 2),
            (h, f, f, -2),
            (e, f, h, 1),
            (h, qp, qp, 1),
            (h, qm, qm, -1),
            (e, qm, qp, -1),
            (f, qp, qm, -1),
            (qp, qp, e, 2),
            (qm, qm, f, -2),
            (qp, qm, h, 1),
        ] {
            c.set(i, j, k, n(v)).unwrap();
        }
        let c = complete_antisymmetric(&c, true).unwrap();
        assert!(validate_antisymmetry(&c, true).unwrap().is_empty());
        assert!(validate_jacobi(&c, true).unwrap().is_empty());
        // the same constants fail the ungraded identity
        assert!(!validate_jacobi(&c, false).unwrap().is_empty());
    }
}
