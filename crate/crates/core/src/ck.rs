//! The Cayley–Klein orthogonal family `so_κ(N+1)`.
//!
//! Generators `J_ab`, `0 <= a < b <= N`, are ordered by increasing `(a, b)` and
//! mapped to 1-based indices in that order. The non-zero brackets are, for
//! `a < b < c`,
//!
//! ```text
//! [J_ab, J_ac] = κ_ab J_bc     [J_ab, J_bc] = -J_ac     [J_ac, J_bc] = κ_bc J_ab
//! ```
//!
//! with `κ_ab = κ_{a+1} κ_{a+2} ⋯ κ_b`. The parameter list is always
//! `k1 … kN`, whether or not a given κ is numeric, so that symbolic and
//! specialized algebras live over the same [`Params`].

use std::fmt;

use thiserror::Error;

use crate::algebra::{Basis, StructureConstants};
use crate::poly::{int, Assignment, Params, Polynomial, Rational};
use crate::rmatrix::{flatten, Provenance, RMatrix, SparseMatrix};

/// Label of the adjoined central generator.
pub const CENTRAL_LABEL: &str = "_central";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CkError {
    #[error("N must be at least 1")]
    ZeroRank,
    #[error("expected {expected} contraction parameters, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("pair ({a}, {b}) is not 0 <= a < b <= {n}")]
    PairOutOfRange { a: usize, b: usize, n: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kappa {
    Symbolic,
    Value(Rational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkSpec {
    n: usize,
    kappas: Vec<Kappa>,
}

impl CkSpec {
    pub fn new(kappas: Vec<Kappa>) -> Result<Self, CkError> {
        if kappas.is_empty() {
            return Err(CkError::ZeroRank);
        }
        Ok(CkSpec {
            n: kappas.len(),
            kappas,
        })
    }

    pub fn symbolic(n: usize) -> Result<Self, CkError> {
        Self::new(vec![Kappa::Symbolic; n])
    }

    pub fn numeric(values: Vec<Rational>) -> Result<Self, CkError> {
        Self::new(values.into_iter().map(Kappa::Value).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappas(&self) -> &[Kappa] {
        &self.kappas
    }

    /// `k1 … kN`.
    pub fn params(&self) -> Params {
        Params::new((1..=self.n).map(|m| format!("k{m}"))).expect("generated names are valid")
    }

    /// Assignment for the numeric entries of this spec.
    pub fn assignment(&self) -> Assignment {
        self.kappas
            .iter()
            .enumerate()
            .filter_map(|(m, k)| match k {
                Kappa::Value(v) => Some((format!("k{}", m + 1), v.clone())),
                Kappa::Symbolic => None,
            })
            .collect()
    }

    /// Number of generators `N(N+1)/2`, without the central charge.
    pub fn dim(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn sign_pattern(&self) -> Option<Vec<Sign>> {
        self.kappas
            .iter()
            .map(|k| match k {
                Kappa::Symbolic => None,
                Kappa::Value(v) => Some(Sign::of(v)),
            })
            .collect()
    }

    /// 1-based position of `J_ab` in the increasing `(a, b)` order.
    pub fn pair_index(&self, a: usize, b: usize) -> Result<usize, CkError> {
        if a >= b || b > self.n {
            return Err(CkError::PairOutOfRange { a, b, n: self.n });
        }
        // pairs (a', b') with a' < a: sum over a' of (N - a')
        let before: usize = (0..a).map(|x| self.n - x).sum();
        Ok(before + (b - a))
    }

    pub fn label(&self, a: usize, b: usize) -> String {
        if self.n >= 10 {
            format!("J{a}_{b}")
        } else {
            format!("J{a}{b}")
        }
    }

    pub fn labels(&self) -> Vec<String> {
        pairs(self.n).map(|(a, b)| self.label(a, b)).collect()
    }

    fn kappa_poly(&self, params: &Params, m: usize) -> Polynomial {
        match &self.kappas[m - 1] {
            Kappa::Symbolic => Polynomial::var(params, &format!("k{m}")).expect("declared"),
            Kappa::Value(v) => Polynomial::constant(params, v.clone()),
        }
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |a| (a + 1..=n).map(move |b| (a, b)))
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=n).flat_map(move |a| (a + 1..=n).flat_map(move |b| (b + 1..=n).map(move |c| (a, b, c))))
}

/// `κ_ab = κ_{a+1} ⋯ κ_b`.
pub fn kappa_product(spec: &CkSpec, a: usize, b: usize) -> Result<Polynomial, CkError> {
    if a >= b || b > spec.n {
        return Err(CkError::PairOutOfRange { a, b, n: spec.n });
    }
    let params = spec.params();
    let mut acc = Polynomial::one(&params);
    for m in a + 1..=b {
        acc = &acc * &spec.kappa_poly(&params, m);
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkAlgebra {
    pub spec: CkSpec,
    pub basis: Basis,
    pub constants: StructureConstants,
}

impl CkAlgebra {
    /// Generator labels followed by [`CENTRAL_LABEL`].
    pub fn extended_labels(&self) -> Vec<String> {
        let mut v = self.basis.labels().to_vec();
        v.push(CENTRAL_LABEL.to_string());
        v
    }
}

/// Builds the structure constants of `so_κ(N+1)`, both orientations of every bracket.
pub fn build_ck(spec: &CkSpec) -> CkAlgebra {
    let params = spec.params();
    let one = Polynomial::one(&params);
    let mut c = StructureConstants::new(spec.dim(), &params);
    let idx = |a, b| spec.pair_index(a, b).expect("valid pair");
    for (a, b, cc) in triples(spec.n) {
        let (ab, ac, bc) = (idx(a, b), idx(a, cc), idx(b, cc));
        let k_ab = kappa_product(spec, a, b).expect("valid pair");
        let k_bc = kappa_product(spec, b, cc).expect("valid pair");
        // set() drops zero values
        c.set(ab, ac, bc, k_ab.clone()).unwrap();
        c.set(ac, ab, bc, k_ab.neg()).unwrap();
        c.set(ab, bc, ac, one.neg()).unwrap();
        c.set(bc, ab, ac, one.clone()).unwrap();
        c.set(ac, bc, ab, k_bc.clone()).unwrap();
        c.set(bc, ac, ab, k_bc.neg()).unwrap();
    }
    CkAlgebra {
        spec: spec.clone(),
        basis: Basis::new(spec.labels()).expect("labels are distinct"),
        constants: c,
    }
}

/// The CK R-matrix written down directly from the closed-form entry table,
/// without going through structure constants. Twelve entries per triple `a < b < c`
/// (fewer where a κ product vanishes).
pub fn ck_rmatrix_table(spec: &CkSpec) -> RMatrix {
    let params = spec.params();
    let d = spec.dim() + 1;
    let one = Polynomial::one(&params);
    let mut m = SparseMatrix::new(d * d, &params);
    let idx = |a, b| spec.pair_index(a, b).expect("valid pair");
    let f = |i, j| flatten(i, j, d).expect("in range");
    for (a, b, c) in triples(spec.n) {
        let (ab, ac, bc) = (idx(a, b), idx(a, c), idx(b, c));
        let k_ab = kappa_product(spec, a, b).expect("valid pair");
        let k_bc = kappa_product(spec, b, c).expect("valid pair");
        let rows = [
            ((ab, ac), bc, k_ab.clone()),
            ((ac, ab), bc, k_ab.neg()),
            ((ab, bc), ac, one.neg()),
            ((bc, ab), ac, one.clone()),
            ((ac, bc), ab, k_bc.clone()),
            ((bc, ac), ab, k_bc.neg()),
        ];
        for ((i, j), k, value) in rows {
            m.set(f(i, j), f(k, d), value.clone()).unwrap();
            m.set(f(i, j), f(d, k), value).unwrap();
        }
    }
    RMatrix::new(d, m, Provenance::TheoremConstructed).expect("square of D")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Zero,
    Minus,
}

impl Sign {
    pub fn of(v: &Rational) -> Sign {
        use num_traits::Signed;
        if v.is_positive() {
            Sign::Plus
        } else if v.is_negative() {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    /// Representative value `+1`, `0`, `-1`.
    pub fn representative(self) -> Rational {
        match self {
            Sign::Plus => int(1),
            Sign::Zero => int(0),
            Sign::Minus => int(-1),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Zero => '0',
            Sign::Minus => '-',
        }
    }
}

pub fn format_signs(signs: &[Sign]) -> String {
    let inner: Vec<String> = signs.iter().map(|s| s.symbol().to_string()).collect();
    format!("({})", inner.join(","))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkClassification {
    pub sign_pattern: Vec<Sign>,
    pub family_name: String,
    pub kinematical_name: Option<String>,
    /// Physical reading of `(κ1, κ2)` in terms of the universe radius τ and the
    /// speed of light c. Present exactly when `kinematical_name` is.
    pub physical_parameters: Option<String>,
}

impl fmt::Display for CkClassification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", format_signs(&self.sign_pattern), self.family_name)?;
        if let (Some(k), Some(p)) = (&self.kinematical_name, &self.physical_parameters) {
            write!(f, " [{k} {p}]")?;
        }
        Ok(())
    }
}

/// Names the nine `N = 2` algebras; the six with `κ2 <= 0` also get a spacetime name.
pub fn classify_ck2(k1: Sign, k2: Sign) -> CkClassification {
    use Sign::*;
    let family = match (k1, k2) {
        (Plus, Plus) => "so(3)",
        (Plus, Minus) | (Minus, Plus) | (Minus, Minus) => "so(2,1)",
        (Plus, Zero) | (Zero, Plus) => "iso(2)",
        (Minus, Zero) | (Zero, Minus) => "iso(1,1)",
        (Zero, Zero) => "iiso(1)",
    };
    let kinematical = match (k1, k2) {
        (Plus, Minus) => Some(("anti-de Sitter", "(+1/tau^2, -1/c^2)")),
        (Zero, Minus) => Some(("Minkowskian", "(0, -1/c^2)")),
        (Minus, Minus) => Some(("de Sitter", "(-1/tau^2, -1/c^2)")),
        (Plus, Zero) => Some(("oscillating Newton-Hooke", "(+1/tau^2, 0)")),
        (Zero, Zero) => Some(("Galilean", "(0, 0)")),
        (Minus, Zero) => Some(("expanding Newton-Hooke", "(-1/tau^2, 0)")),
        _ => None,
    };
    CkClassification {
        sign_pattern: vec![k1, k2],
        family_name: family.to_string(),
        kinematical_name: kinematical.map(|(k, _)| k.to_string()),
        physical_parameters: kinematical.map(|(_, p)| p.to_string()),
    }
}

/// All `3^n` sign patterns with representatives `+1, 0, -1`, in ternary counting
/// order with κ1 the most significant digit.
pub fn enumerate_sign_patterns(n: usize) -> Result<Vec<CkSpec>, CkError> {
    if n == 0 {
        return Err(CkError::ZeroRank);
    }
    const DIGITS: [Sign; 3] = [Sign::Plus, Sign::Zero, Sign::Minus];
    let count = 3usize.pow(n as u32);
    (0..count)
        .map(|mut code| {
            let mut values = vec![int(0); n];
            for slot in values.iter_mut().rev() {
                *slot = DIGITS[code % 3].representative();
                code /= 3;
            }
            CkSpec::numeric(values)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{validate_antisymmetry, validate_jacobi};
    use crate::poly::Polynomial;

    fn poly(spec: &CkSpec, s: &str) -> Polynomial {
        Polynomial::parse(&spec.params(), s).unwrap()
    }

    #[test]
    fn kappa_products() {
        let s2 = CkSpec::symbolic(2).unwrap();
        assert_eq!(kappa_product(&s2, 0, 2).unwrap(), poly(&s2, "k1*k2"));
        let s4 = CkSpec::symbolic(4).unwrap();
        for a in 0..4 {
            assert_eq!(kappa_product(&s4, a, a + 1).unwrap(), poly(&s4, &format!("k{}", a + 1)));
        }
        let mixed = CkSpec::new(vec![Kappa::Symbolic, Kappa::Value(int(0)), Kappa::Symbolic]).unwrap();
        assert!(kappa_product(&mixed, 0, 3).unwrap().is_zero());
        assert!(kappa_product(&s2, 1, 1).is_err());
        assert!(kappa_product(&s2, 0, 3).is_err());
    }

    #[test]
    fn kappa_cocycle() {
        let s = CkSpec::symbolic(4).unwrap();
        for (a, b, c) in triples(4) {
            let lhs = &kappa_product(&s, a, b).unwrap() * &kappa_product(&s, b, c).unwrap();
            assert_eq!(lhs, kappa_product(&s, a, c).unwrap());
        }
    }

    #[test]
    fn pair_indices_follow_lex_order() {
        let s = CkSpec::symbolic(3).unwrap();
        let got: Vec<_> = pairs(3).map(|(a, b)| s.pair_index(a, b).unwrap()).collect();
        assert_eq!(got, (1..=6).collect::<Vec<_>>());
        assert_eq!(s.labels(), ["J01", "J02", "J03", "J12", "J13", "J23"]);
        let big = CkSpec::symbolic(10).unwrap();
        assert_eq!(big.label(1, 10), "J1_10");
    }

    #[test]
    fn so3_symbolic_brackets() {
        let s = CkSpec::symbolic(2).unwrap();
        let alg = build_ck(&s);
        let c = &alg.constants;
        assert_eq!(c.nnz(), 6);
        assert_eq!(c.get(1, 2, 3), Some(&poly(&s, "k1")));
        assert_eq!(c.get(1, 3, 2), Some(&poly(&s, "-1")));
        assert_eq!(c.get(2, 3, 1), Some(&poly(&s, "k2")));
        assert_eq!(alg.extended_labels(), ["J01", "J02", "J12", "_central"]);
    }

    #[test]
    fn flag_algebra_keeps_units_only() {
        let s = CkSpec::numeric(vec![int(0), int(0)]).unwrap();
        let c = build_ck(&s).constants;
        assert_eq!(c.nnz(), 2);
        assert!(c
            .iter()
            .all(|(_, v)| v.constant_value().map(|x| x == int(1) || x == int(-1)) == Some(true)));
    }

    #[test]
    fn coefficient_counts() {
        for n in 1..=4usize {
            let c = build_ck(&CkSpec::symbolic(n).unwrap()).constants;
            // 6 * C(N+1, 3)
            let triples = (n + 1) * n * n.saturating_sub(1) / 6;
            assert_eq!(c.nnz(), 6 * triples, "N={n}");
        }
        assert_eq!(build_ck(&CkSpec::symbolic(3).unwrap()).constants.nnz(), 24);
    }

    #[test]
    fn ck_brackets_are_lie() {
        for n in 1..=4 {
            let c = build_ck(&CkSpec::symbolic(n).unwrap()).constants;
            assert!(validate_antisymmetry(&c, false).unwrap().is_empty());
            assert!(validate_jacobi(&c, false).unwrap().is_empty(), "N={n}");
        }
    }

    #[test]
    fn specialization_commutes_with_construction() {
        for n in 1..=3 {
            let symbolic = build_ck(&CkSpec::symbolic(n).unwrap()).constants;
            for spec in enumerate_sign_patterns(n).unwrap() {
                let direct = build_ck(&spec).constants;
                assert_eq!(symbolic.specialize(&spec.assignment()).unwrap(), direct);
            }
        }
    }

    #[test]
    fn classification_table() {
        use Sign::*;
        assert_eq!(classify_ck2(Plus, Plus).family_name, "so(3)");
        assert_eq!(classify_ck2(Plus, Plus).kinematical_name, None);
        let m = classify_ck2(Zero, Minus);
        assert_eq!(m.family_name, "iso(1,1)");
        assert_eq!(m.kinematical_name.as_deref(), Some("Minkowskian"));
        let g = classify_ck2(Zero, Zero);
        assert_eq!(g.family_name, "iiso(1)");
        assert_eq!(g.kinematical_name.as_deref(), Some("Galilean"));
        for a in [Plus, Zero, Minus] {
            for b in [Plus, Zero, Minus] {
                let c = classify_ck2(a, b);
                assert_eq!(c.kinematical_name.is_some(), b != Plus);
                assert_eq!(c.physical_parameters.is_some(), b != Plus);
            }
        }
    }

    #[test]
    fn sign_pattern_enumeration() {
        let one = enumerate_sign_patterns(1).unwrap();
        let vals: Vec<_> = one.iter().map(|s| s.kappas().to_vec()).collect();
        assert_eq!(
            vals,
            vec![
                vec![Kappa::Value(int(1))],
                vec![Kappa::Value(int(0))],
                vec![Kappa::Value(int(-1))]
            ]
        );
        let two = enumerate_sign_patterns(2).unwrap();
        assert_eq!(two.len(), 9);
        assert_eq!(two[1].sign_pattern().unwrap(), vec![Sign::Plus, Sign::Zero]);
        assert_eq!(two[3].sign_pattern().unwrap(), vec![Sign::Zero, Sign::Plus]);
        assert_eq!(enumerate_sign_patterns(3).unwrap().len(), 27);
        assert!(enumerate_sign_patterns(0).is_err());
    }
}
