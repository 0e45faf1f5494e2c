//! The torus modification of a full simplicial mixed polynomial.
//!
//! On the open torus `(C*)^n` write `z_j = rho_j u_j` with `|u_j| = 1`.
//! The map keeps every phase and reshuffles only the moduli,
//!
//! ```text
//!     w_j = xi_j u_j,    log xi = E log rho,
//! ```
//!
//! where the exponent matrix `E` solves `P E = Q` exactly over the
//! rationals, `P` and `Q` being the polar and radial exponent matrices of
//! `f`. By construction `f(z) = L(w)` for the Laurent monomial sum `L` with
//! the polar exponents, so the map carries fibers of `f` to fibers of `L`.

use alloc::vec::Vec;
use num_traits::{ToPrimitive, Zero};
// Carries f64 math in no_std builds; redundant once std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::exact::{self, Rat};
use crate::mixedpoly::{cpowu, MixedPolynomial};
use crate::rng;
use crate::weights::{exponent_matrices, is_simplicial};
use crate::C64;

#[derive(Clone, Debug)]
pub struct TorusMap {
    n: usize,
    e: Vec<Vec<Rat>>,
    e_inv: Vec<Vec<Rat>>,
    e_f64: Vec<Vec<f64>>,
    e_inv_f64: Vec<Vec<f64>>,
    laurent: Vec<(C64, Vec<i64>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorusMapError {
    /// The construction needs exactly n monomials in n variables.
    NotFull { monomials: usize, n: usize },
    /// Exponent matrices are square but rank deficient.
    NotSimplicial,
    /// The polar matrix could not be inverted (should be unreachable once
    /// simpliciality holds, kept as a graceful failure mode).
    SingularPolarMatrix,
    /// The map is only defined off the coordinate hyperplanes.
    OffTorus { j: usize },
}

impl core::fmt::Display for TorusMapError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TorusMapError::NotFull { monomials, n } => {
                write!(f, "need exactly {n} monomials, found {monomials}")
            }
            TorusMapError::NotSimplicial => write!(f, "exponent matrices are rank deficient"),
            TorusMapError::SingularPolarMatrix => write!(f, "polar exponent matrix is singular"),
            TorusMapError::OffTorus { j } => {
                write!(f, "coordinate {j} vanishes; the map lives on the open torus")
            }
        }
    }
}

fn to_f64_matrix(m: &[Vec<Rat>]) -> Vec<Vec<f64>> {
    m.iter()
        .map(|row| row.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
        .collect()
}

/// Build the torus modification of `f`. Requires `f` full simplicial:
/// exactly `n` monomials with both exponent matrices of rank `n`.
pub fn build_torus_map(f: &MixedPolynomial) -> Result<TorusMap, TorusMapError> {
    let em = exponent_matrices(f);
    if em.m != em.n {
        return Err(TorusMapError::NotFull {
            monomials: em.m,
            n: em.n,
        });
    }
    if !is_simplicial(f) {
        return Err(TorusMapError::NotSimplicial);
    }
    let p = em.polar_rows();
    let q = em.radial_rows();
    let e = exact::solve_matrix(&p, &q).ok_or(TorusMapError::SingularPolarMatrix)?;
    let e_inv = exact::invert(&e).ok_or(TorusMapError::SingularPolarMatrix)?;
    let laurent = f
        .monomials()
        .iter()
        .zip(&p)
        .map(|(mono, prow)| (mono.coeff, prow.clone()))
        .collect();
    Ok(TorusMap {
        n: em.n,
        e_f64: to_f64_matrix(&e),
        e_inv_f64: to_f64_matrix(&e_inv),
        e,
        e_inv,
        laurent,
    })
}

impl TorusMap {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The exact exponent matrix `E`.
    pub fn exponents(&self) -> &[Vec<Rat>] {
        &self.e
    }

    pub fn inverse_exponents(&self) -> &[Vec<Rat>] {
        &self.e_inv
    }

    /// Laurent image of `f`: coefficients with integer exponent vectors,
    /// negative entries allowed.
    pub fn laurent_terms(&self) -> &[(C64, Vec<i64>)] {
        &self.laurent
    }

    /// Split `z` into the new moduli and the carried phase factors. The
    /// phases are returned exactly as computed from `z`, untouched by the
    /// modulus reshuffle.
    pub fn polar_parts(&self, z: &[C64]) -> Result<(Vec<f64>, Vec<C64>), TorusMapError> {
        if let Some(j) = z.iter().position(|c| c.norm() == 0.0) {
            return Err(TorusMapError::OffTorus { j });
        }
        let log_rho: Vec<f64> = z.iter().map(|c| c.norm().ln()).collect();
        let xi = apply_log_linear(&self.e_f64, &log_rho);
        let units: Vec<C64> = z.iter().map(|c| c / c.norm()).collect();
        Ok((xi, units))
    }
}

fn apply_log_linear(e: &[Vec<f64>], log_rho: &[f64]) -> Vec<f64> {
    e.iter()
        .map(|row| {
            row.iter()
                .zip(log_rho)
                .map(|(&c, &l)| c * l)
                .sum::<f64>()
                .exp()
        })
        .collect()
}

/// Apply the map on the open torus.
pub fn apply_torus_map(map: &TorusMap, z: &[C64]) -> Result<Vec<C64>, TorusMapError> {
    let (xi, units) = map.polar_parts(z)?;
    Ok(units.iter().zip(&xi).map(|(u, &x)| u * x).collect())
}

/// Apply the inverse map: recover moduli through `E^{-1}`, keep phases.
pub fn apply_torus_map_inverse(map: &TorusMap, w: &[C64]) -> Result<Vec<C64>, TorusMapError> {
    if let Some(j) = w.iter().position(|c| c.norm() == 0.0) {
        return Err(TorusMapError::OffTorus { j });
    }
    let log_xi: Vec<f64> = w.iter().map(|c| c.norm().ln()).collect();
    let rho = apply_log_linear(&map.e_inv_f64, &log_xi);
    Ok(w.iter()
        .zip(&rho)
        .map(|(c, &r)| c / c.norm() * r)
        .collect())
}

fn cpow_i(z: C64, e: i64) -> C64 {
    if e >= 0 {
        cpowu(z, e as u32)
    } else {
        cpowu(C64::new(1.0, 0.0) / z, (-e) as u32)
    }
}

/// Evaluate the Laurent image of `f` at a torus point.
pub fn eval_laurent(map: &TorusMap, w: &[C64]) -> Result<C64, TorusMapError> {
    if let Some(j) = w.iter().position(|c| c.norm() == 0.0) {
        return Err(TorusMapError::OffTorus { j });
    }
    let mut acc = C64::new(0.0, 0.0);
    for (coeff, exps) in &map.laurent {
        let mut term = *coeff;
        for (c, &e) in w.iter().zip(exps) {
            term *= cpow_i(*c, e);
        }
        acc += term;
    }
    Ok(acc)
}

/// Max over random torus points of `|L(phi(z)) - f(z)| / (1 + |f(z)|)`.
/// Moduli are drawn from `[0.85, 1.2]`; the narrow band keeps the exact
/// identity testable without drowning it in cancellation noise.
pub fn check_fiber_preservation(
    f: &MixedPolynomial,
    map: &TorusMap,
    samples: u64,
    seed: u64,
) -> f64 {
    let n = f.n();
    let mut worst = 0.0f64;
    for k in 0..samples {
        let mut rng = rng::stream(seed, k);
        let z: Vec<C64> = (0..n)
            .map(|_| {
                let rho = rng::uniform(&mut rng, 0.85, 1.2);
                C64::from_polar(rho, rng::phase(&mut rng))
            })
            .collect();
        let w = apply_torus_map(map, &z).expect("moduli are positive");
        let lhs = eval_laurent(map, &w).expect("moduli are positive");
        let rhs = f.eval(&z);
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtendVerdict {
    /// `E` is diagonal with positive diagonal: the map is a plain modulus
    /// power rescale in each coordinate and extends over the hyperplanes.
    Extendable,
    /// A negative off-diagonal entry blows up some modulus as another
    /// coordinate approaches zero.
    NonExtendable,
    /// Neither certificate applies.
    NoObstructionFound,
}

#[derive(Clone, Debug)]
pub struct ExtendabilityReport {
    /// All negative entries of `E` as `(row, column, value)`.
    pub negatives: Vec<(usize, usize, Rat)>,
    pub verdict: ExtendVerdict,
}

pub fn extendability_report(map: &TorusMap) -> ExtendabilityReport {
    let n = map.n;
    let e = map.exponents();
    let mut negatives = Vec::new();
    let mut off_diag_negative = false;
    let mut diagonal = true;
    let mut diag_positive = true;
    for i in 0..n {
        for j in 0..n {
            let v = &e[i][j];
            if *v < Rat::zero() {
                negatives.push((i, j, v.clone()));
                if i != j {
                    off_diag_negative = true;
                }
            }
            if i != j && !v.is_zero() {
                diagonal = false;
            }
            if i == j && *v <= Rat::zero() {
                diag_positive = false;
            }
        }
    }
    let verdict = if off_diag_negative {
        ExtendVerdict::NonExtendable
    } else if diagonal && diag_positive {
        ExtendVerdict::Extendable
    } else {
        ExtendVerdict::NoObstructionFound
    };
    ExtendabilityReport { negatives, verdict }
}
