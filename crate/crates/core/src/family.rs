//! The cyclic family
//!
//! ```text
//!     f_t(z) = sum_j z_j^{a_j} z_{j+1} { (1-t) |z_j|^{2 b_j} + t },   j mod n,
//! ```
//!
//! with a_j >= 1, b_j >= 0. Standing assumptions: (a) some b_j >= 1 (t = 0
//! is genuinely mixed) and (b) some a_k >= 2 (the cyclic determinant does
//! not degenerate for even n). `new` enforces both; `new_relaxed` skips them
//! for exploratory work but keeps the structural checks.

use alloc::vec::Vec;

use crate::mixedpoly::{MixedMonomial, MixedPolynomial};
use crate::C64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpecViolation {
    TooFewVariables { n: usize },
    LengthMismatch { field: &'static str, len: usize, n: usize },
    /// a_j must be at least 1.
    ZeroExponent { j: usize },
    /// Assumption (a): some b_j >= 1.
    NoPositiveB,
    /// Assumption (b): some a_k >= 2.
    NoExponentAtLeastTwo,
}

impl core::fmt::Display for SpecViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SpecViolation::TooFewVariables { n } => write!(f, "need n >= 2 variables, got {n}"),
            SpecViolation::LengthMismatch { field, len, n } => {
                write!(f, "{field} has length {len}, expected {n}")
            }
            SpecViolation::ZeroExponent { j } => write!(f, "a[{j}] must be at least 1"),
            SpecViolation::NoPositiveB => write!(f, "assumption (a) fails: no b_j >= 1"),
            SpecViolation::NoExponentAtLeastTwo => {
                write!(f, "assumption (b) fails: no a_k >= 2")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyclicFamilySpec {
    n: usize,
    a: Vec<u32>,
    b: Vec<u32>,
}

/// All violations of the given exponent data, assumption checks included.
pub fn validate_spec(a: &[u32], b: &[u32]) -> Vec<SpecViolation> {
    let n = a.len();
    let mut v = Vec::new();
    if n < 2 {
        v.push(SpecViolation::TooFewVariables { n });
    }
    if b.len() != n {
        v.push(SpecViolation::LengthMismatch { field: "b", len: b.len(), n });
    }
    for (j, &aj) in a.iter().enumerate() {
        if aj == 0 {
            v.push(SpecViolation::ZeroExponent { j });
        }
    }
    if !b.iter().any(|&bj| bj >= 1) {
        v.push(SpecViolation::NoPositiveB);
    }
    if !a.iter().any(|&aj| aj >= 2) {
        v.push(SpecViolation::NoExponentAtLeastTwo);
    }
    v
}

impl CyclicFamilySpec {
    pub fn new(a: Vec<u32>, b: Vec<u32>) -> Result<Self, Vec<SpecViolation>> {
        let v = validate_spec(&a, &b);
        if v.is_empty() {
            Ok(CyclicFamilySpec { n: a.len(), a, b })
        } else {
            Err(v)
        }
    }

    /// Skips assumptions (a) and (b); structural problems still reject.
    pub fn new_relaxed(a: Vec<u32>, b: Vec<u32>) -> Result<Self, Vec<SpecViolation>> {
        let v: Vec<SpecViolation> = validate_spec(&a, &b)
            .into_iter()
            .filter(|x| {
                !matches!(x, SpecViolation::NoPositiveB | SpecViolation::NoExponentAtLeastTwo)
            })
            .collect();
        if v.is_empty() {
            Ok(CyclicFamilySpec { n: a.len(), a, b })
        } else {
            Err(v)
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[u32] {
        &self.a
    }

    pub fn b(&self) -> &[u32] {
        &self.b
    }

    /// Violations still carried by this spec (nonempty only for relaxed
    /// specs).
    pub fn violations(&self) -> Vec<SpecViolation> {
        validate_spec(&self.a, &self.b)
    }

    /// det of transpose(N - M) in closed form: `a_1 .. a_n + (-1)^(n+1)`.
    /// `None` on i64 overflow.
    pub fn det_nm(&self) -> Option<i64> {
        let mut prod: i128 = 1;
        for &aj in &self.a {
            prod = prod.checked_mul(aj as i128)?;
            if prod > i64::MAX as i128 {
                return None;
            }
        }
        let sign: i128 = if self.n % 2 == 0 { -1 } else { 1 };
        i64::try_from(prod + sign).ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilyError {
    TOutOfRange,
}

impl core::fmt::Display for FamilyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            FamilyError::TOutOfRange => write!(f, "family parameter t must lie in [0, 1]"),
        }
    }
}

/// One member of the family, with its parameter kept as metadata.
#[derive(Clone, Debug)]
pub struct FamilyMember {
    spec: CyclicFamilySpec,
    t: f64,
    poly: MixedPolynomial,
}

impl FamilyMember {
    pub fn spec(&self) -> &CyclicFamilySpec {
        &self.spec
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn poly(&self) -> &MixedPolynomial {
        &self.poly
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    /// Endpoint members are the mixed (t = 0) and holomorphic (t = 1) ones.
    pub fn is_endpoint(&self) -> bool {
        self.t == 0.0 || self.t == 1.0
    }
}

/// Build f_t. Monomial j carries `z_j^{a_j + b_j} zbar_j^{b_j} z_{j+1}` with
/// coefficient 1 - t and `z_j^{a_j} z_{j+1}` with coefficient t; for b_j = 0
/// the two merge.
pub fn make_member(spec: &CyclicFamilySpec, t: f64) -> Result<FamilyMember, FamilyError> {
    if !(0.0..=1.0).contains(&t) || !t.is_finite() {
        return Err(FamilyError::TOutOfRange);
    }
    let n = spec.n;
    let mut monomials = Vec::with_capacity(2 * n);
    for j in 0..n {
        let jn = (j + 1) % n;
        let mut nu = alloc::vec![0u32; n];
        let mut mu = alloc::vec![0u32; n];
        nu[j] = spec.a[j] + spec.b[j];
        nu[jn] += 1;
        mu[j] = spec.b[j];
        monomials.push(MixedMonomial { coeff: C64::new(1.0 - t, 0.0), nu, mu });

        let mut nu = alloc::vec![0u32; n];
        nu[j] = spec.a[j];
        nu[jn] += 1;
        monomials.push(MixedMonomial { coeff: C64::new(t, 0.0), nu, mu: alloc::vec![0u32; n] });
    }
    let poly = MixedPolynomial::new(n, monomials).expect("spec dimensions are consistent");
    Ok(FamilyMember { spec: spec.clone(), t, poly })
}

/// Bamboo variant: the chain `sum_{j<n-1} z_j^{a_j+b_j} zbar_j^{b_j} z_{j+1}`
/// closed off by the Brieskorn term `z_{n-1}^{a+b} zbar_{n-1}^{b}`.
pub fn make_bamboo(a: &[u32], b: &[u32]) -> Result<MixedPolynomial, MixedPolynomialShapeError> {
    check_shape(a, b)?;
    let n = a.len();
    let mut monomials = Vec::with_capacity(n);
    for j in 0..n {
        let mut nu = alloc::vec![0u32; n];
        let mut mu = alloc::vec![0u32; n];
        nu[j] = a[j] + b[j];
        mu[j] = b[j];
        if j + 1 < n {
            nu[j + 1] = 1;
        }
        monomials.push(MixedMonomial { coeff: C64::new(1.0, 0.0), nu, mu });
    }
    Ok(MixedPolynomial::new(n, monomials).expect("shape checked"))
}

/// Mixed Brieskorn: `sum_j z_j^{a_j + b_j} zbar_j^{b_j}`.
pub fn make_brieskorn(a: &[u32], b: &[u32]) -> Result<MixedPolynomial, MixedPolynomialShapeError> {
    check_shape(a, b)?;
    let n = a.len();
    let mut monomials = Vec::with_capacity(n);
    for j in 0..n {
        let mut nu = alloc::vec![0u32; n];
        let mut mu = alloc::vec![0u32; n];
        nu[j] = a[j] + b[j];
        mu[j] = b[j];
        monomials.push(MixedMonomial { coeff: C64::new(1.0, 0.0), nu, mu });
    }
    Ok(MixedPolynomial::new(n, monomials).expect("shape checked"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MixedPolynomialShapeError {
    Empty,
    LengthMismatch,
    ZeroExponent { j: usize },
}

fn check_shape(a: &[u32], b: &[u32]) -> Result<(), MixedPolynomialShapeError> {
    if a.is_empty() {
        return Err(MixedPolynomialShapeError::Empty);
    }
    if a.len() != b.len() {
        return Err(MixedPolynomialShapeError::LengthMismatch);
    }
    if let Some(j) = a.iter().position(|&x| x == 0) {
        return Err(MixedPolynomialShapeError::ZeroExponent { j });
    }
    Ok(())
}
