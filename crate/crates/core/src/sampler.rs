//! Deterministic sampling of link points.
//!
//! A link point is a solution of `f(w) = 0`, `||w|| = r`. We reach one by
//! Gauss-Newton projection of a random start onto the three real constraints
//! `(Re f, Im f, ||z||^2 - r^2)`. Coordinates that are exactly zero in the
//! start stay pinned to zero, which is how prescribed nullity patterns are
//! sampled. The same projection with target `f = eta e^{i theta}` probes
//! nearby fibers for Milnor tube estimates.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
// Carries f64 math in no_std builds; redundant once std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::family::FamilyMember;
use crate::linalg;
use crate::mixedpoly::MixedPolynomial;
use crate::rng;
use crate::{Tolerances, C64};

/// Every accepted sample satisfies `|f(w)| <= RES_F_FACTOR * (1 + ||w||^d)`
/// with `d` the maximal total degree of `f`.
pub const RES_F_FACTOR: f64 = 1e-10;
/// Every accepted sample satisfies `| ||w|| - r | <= RES_R_FACTOR * r`.
pub const RES_R_FACTOR: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct LinkSample {
    pub t: f64,
    pub r: f64,
    pub w: Vec<C64>,
    /// Indices of exactly-zero coordinates.
    pub nullity: BTreeSet<usize>,
    /// `|f(w)|`.
    pub residual_f: f64,
    /// `| ||w|| - r |`.
    pub residual_r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceFailure {
    pub start_index: u64,
    pub iterations: usize,
    /// Combined scaled residual at the last iterate.
    pub residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// Zeroing every coordinate leaves only the origin, which is not on the
    /// sphere.
    AllCoordinatesNull,
    /// Exactly one cyclic term survives the restriction. Its bracket factor
    /// is strictly positive for t in [0, 1], so nothing is left to cancel it
    /// and the restriction never vanishes on nonzero coordinates.
    SingleSurvivingTerm,
}

/// Outcome of a sampling request. Failed starts are counted, never dropped.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub samples: Vec<LinkSample>,
    pub failures: Vec<ConvergenceFailure>,
    pub infeasible: Option<InfeasibleReason>,
}

impl SampleBatch {
    fn infeasible(reason: InfeasibleReason) -> Self {
        SampleBatch {
            samples: Vec::new(),
            failures: Vec::new(),
            infeasible: Some(reason),
        }
    }
}

fn norm(z: &[C64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// sigma_max and sigma_min of the 3 x 2n matrix stacking the real Jacobian
/// of `f` over the gradient of `||z||^2`. Full rank here is exactly
/// transversality of `V(f)` and the sphere at `z`.
pub fn constraint_sigmas(f: &MixedPolynomial, z: &[C64]) -> (f64, f64) {
    let mut rows = f.real_jacobian(z);
    let grad: Vec<f64> = z.iter().flat_map(|c| [2.0 * c.re, 2.0 * c.im]).collect();
    rows.push(grad);
    let sv = linalg::singular_values(&rows);
    (sv[0], sv[2])
}

struct Projection {
    w: Vec<C64>,
    iterations: usize,
}

/// Scaled residual used for convergence and damping decisions.
fn scaled_residual(f_diff: C64, sphere_diff: f64, f_scale: f64, r_sq: f64) -> f64 {
    let a = f_diff.norm() / f_scale;
    let b = sphere_diff.abs() / r_sq;
    (a * a + b * b).sqrt()
}

/// Gauss-Newton projection onto `{ f = target } ∩ S_r`, moving only the
/// coordinates outside `frozen`. Frozen coordinates keep their start value
/// (zero, in every current caller).
fn project(
    f: &MixedPolynomial,
    r: f64,
    target: C64,
    start: &[C64],
    frozen: &BTreeSet<usize>,
    tol: &Tolerances,
) -> Result<Projection, (usize, f64)> {
    let n = f.n();
    let free: Vec<usize> = (0..n).filter(|j| !frozen.contains(j)).collect();
    let d = f.max_total_degree() as i32;
    let f_scale = 1.0 + r.powi(d);
    let r_sq = r * r;

    let mut w = start.to_vec();
    let mut fd = f.eval(&w) - target;
    let mut sd = w.iter().map(|c| c.norm_sqr()).sum::<f64>() - r_sq;
    let mut res = scaled_residual(fd, sd, f_scale, r_sq);

    for it in 0..50 {
        if fd.norm() <= tol.newton * f_scale && sd.abs() <= tol.newton * r_sq {
            return Ok(Projection { w, iterations: it });
        }

        // 3 x 2k Jacobian restricted to the free coordinates.
        let jac_full = f.real_jacobian(&w);
        let k = free.len();
        let mut j = vec![vec![0.0; 2 * k]; 3];
        for (col, &v) in free.iter().enumerate() {
            j[0][2 * col] = jac_full[0][2 * v];
            j[0][2 * col + 1] = jac_full[0][2 * v + 1];
            j[1][2 * col] = jac_full[1][2 * v];
            j[1][2 * col + 1] = jac_full[1][2 * v + 1];
            j[2][2 * col] = 2.0 * w[v].re;
            j[2][2 * col + 1] = 2.0 * w[v].im;
        }

        // Minimal-norm Gauss-Newton step: solve (J J^T) s = F, step = J^T s.
        let mut gram = vec![vec![0.0; 3]; 3];
        for p in 0..3 {
            for q in 0..3 {
                gram[p][q] = (0..2 * k).map(|c| j[p][c] * j[q][c]).sum();
            }
        }
        let rhs = vec![fd.re, fd.im, sd];
        let s = match linalg::lu_solve(gram.clone(), rhs.clone()) {
            Some(s) => s,
            None => {
                // Singular Gram matrix; retry with a small ridge.
                let ridge = 1e-12 * (1.0 + (gram[0][0] + gram[1][1] + gram[2][2]) / 3.0);
                let mut g = gram;
                for p in 0..3 {
                    g[p][p] += ridge;
                }
                match linalg::lu_solve(g, rhs) {
                    Some(s) => s,
                    None => return Err((it, res)),
                }
            }
        };

        // Backtracking: halve the step while the scaled residual grows.
        let mut lambda = 1.0;
        let mut best = None;
        for _ in 0..12 {
            let mut trial = w.clone();
            for (col, &v) in free.iter().enumerate() {
                let dx = s[0] * j[0][2 * col] + s[1] * j[1][2 * col] + s[2] * j[2][2 * col];
                let dy =
                    s[0] * j[0][2 * col + 1] + s[1] * j[1][2 * col + 1] + s[2] * j[2][2 * col + 1];
                trial[v] -= lambda * C64::new(dx, dy);
            }
            let tfd = f.eval(&trial) - target;
            let tsd = trial.iter().map(|c| c.norm_sqr()).sum::<f64>() - r_sq;
            let tres = scaled_residual(tfd, tsd, f_scale, r_sq);
            if tres <= res {
                best = Some((trial, tfd, tsd, tres));
                break;
            }
            if best.as_ref().map_or(true, |b| tres < b.3) {
                best = Some((trial, tfd, tsd, tres));
            }
            lambda *= 0.5;
        }
        // Take the best trial even if it did not improve; the iteration cap
        // turns a stall into a reported failure.
        let (tw, tfd, tsd, tres) = best.expect("at least one trial");
        w = tw;
        fd = tfd;
        sd = tsd;
        res = tres;
    }

    if fd.norm() <= tol.newton * f_scale && sd.abs() <= tol.newton * r_sq {
        return Ok(Projection { w, iterations: 50 });
    }
    Err((50, res))
}

/// Project `start` onto the link `V(f_t) ∩ S_r`. Coordinates of `start`
/// that are exactly zero are held at zero. After convergence, coordinates
/// with `|w_j| <= zero_rel * r` are snapped to exact zero and the point is
/// re-projected with those pinned, so the returned nullity set is honest.
pub fn project_point(
    member: &FamilyMember,
    r: f64,
    start: &[C64],
    start_index: u64,
    tol: &Tolerances,
) -> Result<LinkSample, ConvergenceFailure> {
    project_to_target(member, r, C64::new(0.0, 0.0), start, start_index, tol)
}

fn project_to_target(
    member: &FamilyMember,
    r: f64,
    target: C64,
    start: &[C64],
    start_index: u64,
    tol: &Tolerances,
) -> Result<LinkSample, ConvergenceFailure> {
    let f = member.poly();
    let snap = tol.zero_rel * r;
    let mut frozen: BTreeSet<usize> = start
        .iter()
        .enumerate()
        .filter(|(_, c)| c.re == 0.0 && c.im == 0.0)
        .map(|(j, _)| j)
        .collect();
    let mut current = start.to_vec();

    // The snap loop terminates: the frozen set grows strictly each pass.
    loop {
        let proj = match project(f, r, target, &current, &frozen, tol) {
            Ok(p) => p,
            Err((iterations, residual)) => {
                return Err(ConvergenceFailure {
                    start_index,
                    iterations,
                    residual,
                })
            }
        };
        current = proj.w;
        let mut grew = false;
        for (j, c) in current.iter_mut().enumerate() {
            if !frozen.contains(&j) && c.norm() <= snap {
                *c = C64::new(0.0, 0.0);
                frozen.insert(j);
                grew = true;
            }
        }
        if !grew {
            let residual_f = (f.eval(&current) - target).norm();
            let nw = norm(&current);
            let residual_r = (nw - r).abs();
            // Acceptance contract; a violation counts as a failed start.
            let d = f.max_total_degree() as i32;
            if target == C64::new(0.0, 0.0)
                && (residual_f > RES_F_FACTOR * (1.0 + nw.powi(d)) || residual_r > RES_R_FACTOR * r)
            {
                return Err(ConvergenceFailure {
                    start_index,
                    iterations: proj.iterations,
                    residual: residual_f.max(residual_r),
                });
            }
            let nullity = current
                .iter()
                .enumerate()
                .filter(|(_, c)| c.re == 0.0 && c.im == 0.0)
                .map(|(j, _)| j)
                .collect();
            return Ok(LinkSample {
                t: member.t(),
                r,
                w: current,
                nullity,
                residual_f,
                residual_r,
            });
        }
    }
}

/// Draw `count` link samples with independent per-sample streams derived
/// from `seed`. Requires `r > 0`.
pub fn sample_link(
    member: &FamilyMember,
    r: f64,
    count: u64,
    seed: u64,
    tol: &Tolerances,
) -> SampleBatch {
    debug_assert!(r > 0.0);
    let n = member.n();
    let mut batch = SampleBatch {
        samples: Vec::new(),
        failures: Vec::new(),
        infeasible: None,
    };
    for k in 0..count {
        let mut rng = rng::stream(seed, k);
        let mut start: Vec<C64> = (0..n).map(|_| rng::normal_complex(&mut rng)).collect();
        let s = norm(&start);
        for c in &mut start {
            *c *= r / s;
        }
        match project_point(member, r, &start, k, tol) {
            Ok(sample) => batch.samples.push(sample),
            Err(fail) => batch.failures.push(fail),
        }
    }
    batch
}

/// Sample link points whose coordinates in `nullity` are exactly zero.
/// Detects the two structurally infeasible cases up front; for feasible
/// patterns failed starts are reported, not retried.
pub fn sample_with_nullity(
    member: &FamilyMember,
    r: f64,
    nullity: &BTreeSet<usize>,
    count: u64,
    seed: u64,
    tol: &Tolerances,
) -> SampleBatch {
    debug_assert!(r > 0.0);
    let n = member.n();
    debug_assert!(!nullity.is_empty() && nullity.iter().all(|&j| j < n));
    if nullity.len() >= n {
        return SampleBatch::infeasible(InfeasibleReason::AllCoordinatesNull);
    }
    // Term j survives iff both z_j and z_{j+1} stay alive.
    let alive = (0..n)
        .filter(|&j| !nullity.contains(&j) && !nullity.contains(&((j + 1) % n)))
        .count();
    if alive == 1 {
        return SampleBatch::infeasible(InfeasibleReason::SingleSurvivingTerm);
    }

    let mut batch = SampleBatch {
        samples: Vec::new(),
        failures: Vec::new(),
        infeasible: None,
    };
    for k in 0..count {
        let mut rng = rng::stream(seed, k);
        let mut start = vec![C64::new(0.0, 0.0); n];
        for (j, c) in start.iter_mut().enumerate() {
            if !nullity.contains(&j) {
                *c = rng::normal_complex(&mut rng);
            }
        }
        let s = norm(&start);
        for c in &mut start {
            *c *= r / s;
        }
        match project_point(member, r, &start, k, tol) {
            Ok(sample) => batch.samples.push(sample),
            Err(fail) => batch.failures.push(fail),
        }
    }
    batch
}

/// One tube level `|f| = eta`.
#[derive(Clone, Copy, Debug)]
pub struct LevelProbe {
    pub eta: f64,
    pub attempted: u64,
    pub converged: u64,
    /// Converged fiber points where the constraint matrix lost rank.
    pub rank_failures: u64,
    /// No start converged at this level, usually because `eta` exceeds
    /// `max |f|` on the sphere. Counts as a pass, but flagged.
    pub vacuous: bool,
    pub pass: bool,
}

/// Tube radius estimate at fixed `(t, r)`.
#[derive(Clone, Debug)]
pub struct TubeEstimate {
    pub t: f64,
    pub r: f64,
    /// Largest grid prefix that passed everywhere; 0.0 if the first level
    /// already failed.
    pub eta0: f64,
    pub probes: Vec<LevelProbe>,
}

/// Largest `eta` of the maximal all-pass prefix of `probes`.
pub fn eta0_from_probes(probes: &[LevelProbe]) -> f64 {
    let mut eta0 = 0.0;
    for p in probes {
        if !p.pass {
            break;
        }
        eta0 = p.eta;
    }
    eta0
}

/// Probe fibers `f = eta e^{i theta}` inside the sphere `S_r` for each
/// `eta` in `eta_grid` and report the largest prefix on which every
/// converged fiber point kept full constraint rank.
pub fn estimate_eta0(
    member: &FamilyMember,
    r: f64,
    eta_grid: &[f64],
    samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> TubeEstimate {
    let f = member.poly();
    let n = member.n();
    let mut probes = Vec::with_capacity(eta_grid.len());
    for (li, &eta) in eta_grid.iter().enumerate() {
        let mut converged = 0;
        let mut rank_failures = 0;
        for k in 0..samples {
            let mut rng = rng::stream(seed, ((li as u64) << 32) | k);
            let theta = rng::phase(&mut rng);
            let target = C64::from_polar(eta, theta);
            let mut start: Vec<C64> = (0..n).map(|_| rng::normal_complex(&mut rng)).collect();
            let s = norm(&start);
            for c in &mut start {
                *c *= r / s;
            }
            if let Ok(sample) = project_to_target(member, r, target, &start, k, tol) {
                converged += 1;
                let (smax, smin) = constraint_sigmas(f, &sample.w);
                if smin <= tol.sigma_rel * smax {
                    rank_failures += 1;
                }
            }
        }
        let vacuous = converged == 0;
        probes.push(LevelProbe {
            eta,
            attempted: samples,
            converged,
            rank_failures,
            vacuous,
            pass: vacuous || rank_failures == 0,
        });
    }
    TubeEstimate {
        t: member.t(),
        r,
        eta0: eta0_from_probes(&probes),
        probes,
    }
}
