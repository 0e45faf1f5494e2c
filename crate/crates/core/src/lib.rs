//! Links of mixed polynomial families on odd spheres.
//!
//! This crate implements the computational side of a family of mixed
//! polynomials in cyclic shape,
//!
//! ```text
//!     f_t(z) = sum_j z_j^{a_j} z_{j+1} { (1-t) |z_j|^{2 b_j} + t },      j mod n,
//! ```
//!
//! interpolating between a mixed member (t = 0) and a holomorphic member
//! (t = 1). It provides:
//!
//! * mixed polynomial evaluation, Wirtinger/real Jacobians, and the variable
//!   interconnection graph ([`mixedpoly`]);
//! * exact polar and radial weight systems over the rationals ([`weights`]);
//! * constructors and closed-form data for the cyclic family ([`family`]);
//! * deterministic sampling of link and fiber points ([`sampler`]);
//! * transversality certification of `V_t ∩ S_r`, both by a direct rank
//!   check and by constructing the curve germ through each sample
//!   ([`transversal`]);
//! * the torus coordinate change carrying the mixed member to an associated
//!   Laurent polynomial, with exact rational exponents ([`torusmap`]).
//!
//! The crate is `no_std` (with `alloc`); IO, config files, reports and the
//! command line live in the companion `cyclink-cli` crate. Every randomized
//! routine takes an explicit seed and is reproducible independently of
//! worker count.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod exact;
pub mod family;
pub mod linalg;
pub mod mixedpoly;
pub mod rng;
pub mod sampler;
pub mod torusmap;
pub mod transversal;
pub mod weights;

/// Complex double, the scalar type of every floating-point computation here.
pub type C64 = num_complex::Complex64;

/// Shared numeric tolerances. Defaults follow the conventions used across
/// the crate; all three are scale factors, not absolute bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Rank test: a stacked Jacobian counts as full rank when
    /// `sigma_min > sigma_rel * sigma_max`.
    pub sigma_rel: f64,
    /// Newton residual target, relative to the natural scale of the system.
    pub newton: f64,
    /// Coordinates with `|w_i| <= zero_rel * r` are snapped to exactly 0.
    pub zero_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { sigma_rel: 1e-8, newton: 1e-12, zero_rel: 1e-9 }
    }
}
