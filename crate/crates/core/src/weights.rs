//! Polar and radial weight systems, solved exactly over the rationals.
//!
//! With exponent matrices N (holomorphic) and M (antiholomorphic), a polar
//! weight is an integer vector p with `transpose(N - M) p = d_p (1, .., 1)`,
//! normalized to gcd 1 and positive degree; the radial weight uses N + M.
//! The system may be overdetermined (m > n monomials): it is solved as-is,
//! and only rank deficiency or inconsistency are errors.

use alloc::vec;
use alloc::vec::Vec;
use num_traits::One;
// Carries f64 math in no_std builds; redundant once std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::ChaCha8Rng;

use crate::exact::{self, LinSolve, Rat};
use crate::mixedpoly::MixedPolynomial;
use crate::rng;
use crate::C64;

/// Integer exponent matrices of a mixed polynomial, n rows by m columns,
/// one column per monomial in the polynomial's own order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrices {
    pub n: usize,
    pub m: usize,
    pub nmat: Vec<Vec<i64>>,
    pub mmat: Vec<Vec<i64>>,
}

impl ExponentMatrices {
    /// Rows of `transpose(N - M)`: one row `nu_i - mu_i` per monomial.
    pub fn polar_rows(&self) -> Vec<Vec<i64>> {
        (0..self.m)
            .map(|i| (0..self.n).map(|j| self.nmat[j][i] - self.mmat[j][i]).collect())
            .collect()
    }

    /// Rows of `transpose(N + M)`.
    pub fn radial_rows(&self) -> Vec<Vec<i64>> {
        (0..self.m)
            .map(|i| (0..self.n).map(|j| self.nmat[j][i] + self.mmat[j][i]).collect())
            .collect()
    }
}

pub fn exponent_matrices(f: &MixedPolynomial) -> ExponentMatrices {
    let n = f.n();
    let m = f.monomials().len();
    let mut nmat = vec![vec![0i64; m]; n];
    let mut mmat = vec![vec![0i64; m]; n];
    for (i, mono) in f.monomials().iter().enumerate() {
        for j in 0..n {
            nmat[j][i] = mono.nu[j] as i64;
            mmat[j][i] = mono.mu[j] as i64;
        }
    }
    ExponentMatrices { n, m, nmat, mmat }
}

/// Simplicial: at most n monomials and both N - M and N + M have full
/// column rank (exact integer ranks).
pub fn is_simplicial(f: &MixedPolynomial) -> bool {
    let em = exponent_matrices(f);
    if em.m > em.n {
        return false;
    }
    exact::int_rank(&em.polar_rows()) == em.m && exact::int_rank(&em.radial_rows()) == em.m
}

/// Full: simplicial with exactly n monomials.
pub fn is_full(f: &MixedPolynomial) -> bool {
    exponent_matrices(f).m == f.n() && is_simplicial(f)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Polar,
    Radial,
}

/// An integer weight system: `rows . weights = degree * (1, .., 1)` holds
/// exactly, gcd of the weights is 1, degree is positive. Signs of individual
/// weights are not constrained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSystem {
    pub kind: WeightKind,
    pub weights: Vec<i64>,
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WeightError {
    ZeroPolynomial,
    /// The system does not determine the weights: coefficient rank < n.
    NotFull { rank: usize, monomials: usize },
    /// The system has no solution (or a degenerate square matrix).
    SingularSystem,
    NoPositiveDegree,
    Overflow,
}

impl core::fmt::Display for WeightError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WeightError::ZeroPolynomial => write!(f, "zero polynomial has no weight system"),
            WeightError::NotFull { rank, monomials } => {
                write!(f, "underdetermined weight system: rank {rank} over {monomials} monomials")
            }
            WeightError::SingularSystem => write!(f, "inconsistent or singular weight system"),
            WeightError::NoPositiveDegree => write!(f, "no scaling gives a positive degree"),
            WeightError::Overflow => write!(f, "weight entries exceed i64"),
        }
    }
}

fn solve_weight(rows: Vec<Vec<i64>>, kind: WeightKind) -> Result<WeightSystem, WeightError> {
    if rows.is_empty() {
        return Err(WeightError::ZeroPolynomial);
    }
    let m = rows.len();
    let ones = vec![Rat::one(); m];
    let x = match exact::solve(&rows, &ones) {
        LinSolve::Unique(x) => x,
        LinSolve::Underdetermined { rank } => {
            return Err(WeightError::NotFull { rank, monomials: m })
        }
        LinSolve::Inconsistent => return Err(WeightError::SingularSystem),
    };
    let mut weights = exact::primitive_integer_direction(&x).ok_or(WeightError::Overflow)?;
    let mut degree: i128 = rows[0].iter().zip(&weights).map(|(&a, &w)| a as i128 * w as i128).sum();
    if degree < 0 {
        for w in weights.iter_mut() {
            *w = -*w;
        }
        degree = -degree;
    }
    if degree == 0 {
        return Err(WeightError::NoPositiveDegree);
    }
    let degree = i64::try_from(degree).map_err(|_| WeightError::Overflow)?;
    Ok(WeightSystem { kind, weights, degree })
}

pub fn polar_weight(f: &MixedPolynomial) -> Result<WeightSystem, WeightError> {
    solve_weight(exponent_matrices(f).polar_rows(), WeightKind::Polar)
}

pub fn radial_weight(f: &MixedPolynomial) -> Result<WeightSystem, WeightError> {
    solve_weight(exponent_matrices(f).radial_rows(), WeightKind::Radial)
}

/// Numerical spot check of weighted homogeneity. For a polar system the
/// action is `z_j -> e^(i p_j theta) z_j` against the factor
/// `e^(i d theta)`; for a radial system it is `z_j -> lambda^(q_j) z_j`,
/// lambda in [1/2, 2], against `lambda^d`. Returns the max of
/// `|f(s.z) - s^d f(z)| / (1 + |f(z)|)` over `samples` random points.
pub fn check_polar_homogeneity(
    f: &MixedPolynomial,
    w: &WeightSystem,
    samples: usize,
    seed: u64,
) -> f64 {
    debug_assert_eq!(w.weights.len(), f.n());
    let mut worst = 0.0f64;
    for k in 0..samples {
        let mut r: ChaCha8Rng = rng::stream(seed, k as u64);
        let z: Vec<C64> = (0..f.n())
            .map(|_| C64::new(rng::uniform(&mut r, -1.0, 1.0), rng::uniform(&mut r, -1.0, 1.0)))
            .collect();
        let fz = f.eval(&z);
        let (zs, factor) = match w.kind {
            WeightKind::Polar => {
                let theta = rng::phase(&mut r);
                let zs: Vec<C64> = z
                    .iter()
                    .zip(&w.weights)
                    .map(|(&zj, &p)| zj * C64::from_polar(1.0, p as f64 * theta))
                    .collect();
                (zs, C64::from_polar(1.0, w.degree as f64 * theta))
            }
            WeightKind::Radial => {
                let lam = rng::uniform(&mut r, 0.5, 2.0);
                let zs: Vec<C64> =
                    z.iter().zip(&w.weights).map(|(&zj, &q)| zj * lam.powf(q as f64)).collect();
                (zs, C64::new(lam.powf(w.degree as f64), 0.0))
            }
        };
        let res = (f.eval(&zs) - factor * fz).norm() / (1.0 + fz.norm());
        worst = worst.max(res);
    }
    worst
}
