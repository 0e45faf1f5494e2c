//! Transversality of the family members with spheres.
//!
//! Two independent verdicts are produced for every link sample. The direct
//! check measures the smallest singular value of the constraint matrix. The
//! constructive check builds a radial curve germ inside the zero set and
//! reports its speed through the sphere.
//!
//! The curve scales each coordinate of a base point w by a radius,
//! z_j(s) = psi_j(s) w_j. Requiring every cyclic term to scale by the same
//! factor (s+1) gives one equation per term,
//!
//! ```text
//! h_j = psi_j^{a_j} psi_{j+1} ((1-t) m_j psi_j^{2 b_j} + t)
//!       - (s+1) ((1-t) m_j + t),      m_j = |w_j|^{2 b_j},
//! ```
//!
//! and the branch through psi = 1 at s = 0 stays on the zero set because
//! f(z(s)) = (s+1) f(w) = 0. When no coordinate vanishes the linearised
//! system is cyclic banded; when some do, the surviving terms split into
//! bamboo chains solved by back-substitution from a pinned top variable.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
// Carries f64 math in no_std builds; redundant once std is in the crate graph.
#[allow(unused_imports)]
use num_traits::Float;

use crate::family::{make_member, CyclicFamilySpec, FamilyError, FamilyMember};
use crate::linalg;
use crate::mixedpoly::MixedPolynomial;
use crate::rng;
use crate::sampler::{self, LinkSample};
use crate::{Tolerances, C64};

/// The radial system counts as degenerate when its determinant falls below
/// this fraction of its natural scale.
pub const DET_REL_FLOOR: f64 = 1e-12;
/// Required relative agreement between the linear solve and the cofactor
/// expansion for the first radial speed.
pub const CRAMER_AGREE: f64 = 1e-10;

/// Banded Jacobian of the radial system h at fixed radii. Row j holds
/// `diag[j]` at column j, `sup[j]` at column j+1 mod n, and `-beta[j]` in
/// the parameter column.
#[derive(Clone, Debug)]
pub struct PhiJacobian {
    pub n: usize,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
    pub beta: Vec<f64>,
}

impl PhiJacobian {
    /// Dense n x n radial block.
    pub fn a_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for j in 0..self.n {
            a[j][j] = self.diag[j];
            a[j][(j + 1) % self.n] += self.sup[j];
        }
        a
    }

    /// Dense (n+1) x (n+1) matrix in (r, s) with the trivial parameter row
    /// appended; expansion along that row reduces it to `a_dense`.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let m = self.n + 1;
        let mut a = vec![vec![0.0; m]; m];
        for j in 0..self.n {
            a[j][j] = self.diag[j];
            a[j][(j + 1) % self.n] += self.sup[j];
            a[j][self.n] = -self.beta[j];
        }
        a[self.n][self.n] = 1.0;
        a
    }
}

/// det A = prod diag + (-1)^{n+1} prod sup for the cyclic band.
pub fn det_closed_form(pj: &PhiJacobian) -> f64 {
    let prod_diag: f64 = pj.diag.iter().product();
    let prod_sup: f64 = pj.sup.iter().product();
    let sign = if pj.n % 2 == 0 { -1.0 } else { 1.0 };
    prod_diag + sign * prod_sup
}

/// Magnitude scale for relative determinant tests; bounds both products.
pub fn det_scale(pj: &PhiJacobian) -> f64 {
    pj.diag
        .iter()
        .zip(&pj.sup)
        .map(|(&d, &s)| d.abs().max(s.abs()))
        .product()
}

/// The fixed bracket weights m_j = |w_j|^{2 b_j} of a base point.
pub fn bracket_weights(spec: &CyclicFamilySpec, w: &[C64]) -> Vec<f64> {
    spec.b()
        .iter()
        .zip(w)
        .map(|(&bj, c)| c.norm_sqr().powi(bj as i32))
        .collect()
}

/// The n functions h_j at the given radii and parameter.
pub fn h_functions(spec: &CyclicFamilySpec, t: f64, m: &[f64], radii: &[f64], s: f64) -> Vec<f64> {
    let n = spec.n();
    (0..n)
        .map(|j| {
            let (aj, bj) = (spec.a()[j] as i32, spec.b()[j] as i32);
            let u = (1.0 - t) * m[j];
            radii[j].powi(aj) * radii[(j + 1) % n] * (u * radii[j].powi(2 * bj) + t)
                - (s + 1.0) * (u + t)
        })
        .collect()
}

/// Jacobian of h with respect to the radii, plus the parameter column.
pub fn phi_jacobian(spec: &CyclicFamilySpec, t: f64, m: &[f64], radii: &[f64]) -> PhiJacobian {
    let n = spec.n();
    let mut diag = Vec::with_capacity(n);
    let mut sup = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    for j in 0..n {
        let (aj, bj) = (spec.a()[j] as f64, spec.b()[j] as f64);
        let (ai, bi) = (spec.a()[j] as i32, spec.b()[j] as i32);
        let u = (1.0 - t) * m[j];
        let rj = radii[j];
        let rn = radii[(j + 1) % n];
        diag.push(rj.powi(ai - 1) * rn * (u * (aj + 2.0 * bj) * rj.powi(2 * bi) + aj * t));
        sup.push(rj.powi(ai) * (u * rj.powi(2 * bi) + t));
        beta.push(u + t);
    }
    PhiJacobian { n, diag, sup, beta }
}

/// The Jacobian at the base radii psi = 1, where `sup` and `beta` coincide.
pub fn matrix_a(spec: &CyclicFamilySpec, t: f64, m: &[f64]) -> PhiJacobian {
    phi_jacobian(spec, t, m, &vec![1.0; spec.n()])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GermMethod {
    /// Full cyclic system, LU solve with a cofactor cross-check.
    LinearSolve,
    /// Back-substitution along bamboo chains of the restriction.
    BambooRecursion,
    /// The restriction vanishes identically; uniform scaling works.
    Scaling,
}

impl GermMethod {
    pub fn name(self) -> &'static str {
        match self {
            GermMethod::LinearSolve => "linear-solve",
            GermMethod::BambooRecursion => "bamboo-recursion",
            GermMethod::Scaling => "scaling",
        }
    }
}

/// First-order data of the radial curve through a base point.
#[derive(Clone, Debug)]
pub struct CurveGerm {
    pub t: f64,
    pub w: Vec<C64>,
    /// d psi_j / ds at s = 0.
    pub dr_ds: Vec<f64>,
    /// d z_j / ds at s = 0.
    pub tangent: Vec<C64>,
    /// d ||z||^2 / ds at s = 0; positive means the curve leaves the ball.
    pub radial_derivative: f64,
    pub method: GermMethod,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TransversalError {
    ExpectedEmptyNullity,
    ExpectedNonEmptyNullity,
    AllCoordinatesNull,
    DegenerateSystem { det: f64, scale: f64 },
    MethodDisagreement { linear: f64, cramer: f64 },
    SolveFailed { term: usize },
    ParameterOutOfRange { s: f64 },
}

impl core::fmt::Display for TransversalError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TransversalError::ExpectedEmptyNullity => {
                write!(f, "expected a sample with no zero coordinates")
            }
            TransversalError::ExpectedNonEmptyNullity => {
                write!(f, "expected a sample with at least one zero coordinate")
            }
            TransversalError::AllCoordinatesNull => {
                write!(f, "every coordinate is zero; the origin is not on the sphere")
            }
            TransversalError::DegenerateSystem { det, scale } => {
                write!(f, "radial system is degenerate: det {det:.6e} at scale {scale:.6e}")
            }
            TransversalError::MethodDisagreement { linear, cramer } => {
                write!(f, "solver disagreement: linear {linear:.17e} vs cofactor {cramer:.17e}")
            }
            TransversalError::SolveFailed { term } => {
                write!(f, "scalar radius solve failed at term {term}")
            }
            TransversalError::ParameterOutOfRange { s } => {
                write!(f, "curve parameter s = {s} is out of range (needs s > -1)")
            }
        }
    }
}

/// Closed-form determinant, rejected when it is too small to trust.
pub fn check_det(pj: &PhiJacobian) -> Result<f64, TransversalError> {
    let det = det_closed_form(pj);
    let scale = det_scale(pj);
    if det.abs() <= DET_REL_FLOOR * scale {
        return Err(TransversalError::DegenerateSystem { det, scale });
    }
    Ok(det)
}

/// Numerator of Cramer's rule for the first radial speed: expansion of the
/// determinant with column 0 replaced by beta.
fn cramer_dr1(pj: &PhiJacobian) -> f64 {
    let mut acc = 0.0;
    let mut prefix = 1.0;
    let mut sign = 1.0;
    for j in 0..pj.n {
        let suffix: f64 = pj.diag[j + 1..].iter().product();
        acc += sign * prefix * pj.beta[j] * suffix;
        prefix *= pj.sup[j];
        sign = -sign;
    }
    acc
}

fn germ_from_dr(t: f64, w: &[C64], dr_ds: Vec<f64>, method: GermMethod) -> CurveGerm {
    let tangent: Vec<C64> = w.iter().zip(&dr_ds).map(|(c, &d)| c * d).collect();
    let radial_derivative = 2.0
        * w.iter()
            .zip(&dr_ds)
            .map(|(c, &d)| d * c.norm_sqr())
            .sum::<f64>();
    CurveGerm {
        t,
        w: w.to_vec(),
        dr_ds,
        tangent,
        radial_derivative,
        method,
    }
}

fn case1_from_matrix(pj: &PhiJacobian, t: f64, w: &[C64]) -> Result<CurveGerm, TransversalError> {
    let det = check_det(pj)?;
    let dr = match linalg::lu_solve(pj.a_dense(), pj.beta.clone()) {
        Some(dr) => dr,
        None => {
            return Err(TransversalError::DegenerateSystem {
                det,
                scale: det_scale(pj),
            })
        }
    };
    let cramer = cramer_dr1(pj) / det;
    if (dr[0] - cramer).abs() > CRAMER_AGREE * (1.0 + dr[0].abs().max(cramer.abs())) {
        return Err(TransversalError::MethodDisagreement { linear: dr[0], cramer });
    }
    Ok(germ_from_dr(t, w, dr, GermMethod::LinearSolve))
}

/// Curve germ at a sample with no zero coordinates.
pub fn tangent_case1(member: &FamilyMember, sample: &LinkSample) -> Result<CurveGerm, TransversalError> {
    if !sample.nullity.is_empty() {
        return Err(TransversalError::ExpectedEmptyNullity);
    }
    let spec = member.spec();
    let m = bracket_weights(spec, &sample.w);
    let pj = matrix_a(spec, sample.t, &m);
    case1_from_matrix(&pj, sample.t, &sample.w)
}

/// A maximal run of consecutive surviving terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BambooComponent {
    /// First surviving term of the run.
    pub start: usize,
    /// One past the last surviving term; indices are taken mod n.
    pub end: usize,
}

impl BambooComponent {
    /// Term indices of the run, not reduced mod n.
    pub fn terms(&self) -> core::ops::Range<usize> {
        self.start..self.end
    }

    /// Variables touched by the run in chain order, reduced mod n. The last
    /// one is the pinned top of the back-substitution.
    pub fn vars(&self, n: usize) -> Vec<usize> {
        (self.start..=self.end).map(|v| v % n).collect()
    }
}

/// The member polynomial with a nullity pattern substituted in, together
/// with the chain structure of the surviving terms.
#[derive(Clone, Debug)]
pub struct Restriction {
    pub poly: MixedPolynomial,
    /// Variables appearing in some surviving term.
    pub support: BTreeSet<usize>,
    pub components: Vec<BambooComponent>,
}

pub fn restrict_to_nullity(member: &FamilyMember, nullity: &BTreeSet<usize>) -> Restriction {
    let n = member.n();
    let poly = member.poly().zero_coordinates(nullity);
    // Term j survives iff both of its variables z_j, z_{j+1} stay alive.
    let alive: Vec<bool> = (0..n)
        .map(|j| !nullity.contains(&j) && !nullity.contains(&((j + 1) % n)))
        .collect();
    let mut support = BTreeSet::new();
    let mut components = Vec::new();
    for j in 0..n {
        if alive[j] {
            support.insert(j);
            support.insert((j + 1) % n);
        }
        if alive[j] && !alive[(j + n - 1) % n] {
            let mut len = 1;
            while len < n && alive[(j + len) % n] {
                len += 1;
            }
            components.push(BambooComponent { start: j, end: j + len });
        }
    }
    components.sort_by_key(|c| c.start);
    Restriction { poly, support, components }
}

/// Curve germ at a sample with a proper nonempty nullity pattern.
pub fn tangent_case2(member: &FamilyMember, sample: &LinkSample) -> Result<CurveGerm, TransversalError> {
    let spec = member.spec();
    let n = spec.n();
    if sample.nullity.is_empty() {
        return Err(TransversalError::ExpectedNonEmptyNullity);
    }
    if sample.nullity.len() >= n {
        return Err(TransversalError::AllCoordinatesNull);
    }
    let restriction = restrict_to_nullity(member, &sample.nullity);
    let mut dr = vec![0.0; n];
    if restriction.poly.is_zero() {
        // The whole stratum lies in the zero set; uniform radial scaling of
        // the live coordinates is already a curve with positive speed.
        for (j, d) in dr.iter_mut().enumerate() {
            if !sample.nullity.contains(&j) {
                *d = 1.0;
            }
        }
        return Ok(germ_from_dr(sample.t, &sample.w, dr, GermMethod::Scaling));
    }
    let m = bracket_weights(spec, &sample.w);
    let pj = matrix_a(spec, sample.t, &m);
    for comp in &restriction.components {
        // Walk each chain downward from its pinned top variable, where
        // dr = 0. Term j relates dr_j to dr_{j+1}.
        let mut next = 0.0;
        for j in comp.terms().rev() {
            let jm = j % n;
            if pj.diag[jm].abs() <= f64::MIN_POSITIVE {
                return Err(TransversalError::SolveFailed { term: jm });
            }
            next = pj.beta[jm] * (1.0 - next) / pj.diag[jm];
            dr[jm] = next;
        }
    }
    Ok(germ_from_dr(sample.t, &sample.w, dr, GermMethod::BambooRecursion))
}

/// Dispatch on the sample's nullity pattern.
pub fn curve_germ(member: &FamilyMember, sample: &LinkSample) -> Result<CurveGerm, TransversalError> {
    if sample.nullity.is_empty() {
        tangent_case1(member, sample)
    } else if sample.nullity.len() >= member.n() {
        Err(TransversalError::AllCoordinatesNull)
    } else {
        tangent_case2(member, sample)
    }
}

/// One solved point of the traced radial curve.
#[derive(Clone, Debug)]
pub struct TracePoint {
    pub s: f64,
    pub radii: Vec<f64>,
    pub w: Vec<C64>,
    /// | f(z(s)) - (s+1) f(w) |.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Solve the full cyclic system h = 0 at each parameter value by damped
/// Newton iteration, warm-starting from the previous radii. Only samples
/// with no zero coordinates are traceable this way.
pub fn trace_curve(
    member: &FamilyMember,
    sample: &LinkSample,
    s_vals: &[f64],
    tol: &Tolerances,
) -> Result<Vec<TracePoint>, TransversalError> {
    if !sample.nullity.is_empty() {
        return Err(TransversalError::ExpectedEmptyNullity);
    }
    let spec = member.spec();
    let n = spec.n();
    let t = member.t();
    let m = bracket_weights(spec, &sample.w);
    let f = member.poly();
    let f0 = f.eval(&sample.w);
    let beta_max = matrix_a(spec, t, &m)
        .beta
        .iter()
        .fold(0.0, |acc: f64, &x| acc.max(x));

    let mut out = Vec::with_capacity(s_vals.len());
    let mut radii = vec![1.0; n];
    for &s in s_vals {
        if !(s > -1.0) {
            return Err(TransversalError::ParameterOutOfRange { s });
        }
        let hscale = 1.0 + (1.0 + s) * beta_max;
        let mut h = h_functions(spec, t, &m, &radii, s);
        let mut hnorm = h.iter().fold(0.0, |acc: f64, &x| acc.max(x.abs()));
        let mut converged = false;
        let mut iterations = 0;
        for it in 0..60 {
            iterations = it;
            if hnorm <= tol.newton * hscale {
                converged = true;
                break;
            }
            let pj = phi_jacobian(spec, t, &m, &radii);
            let Some(delta) = linalg::lu_solve(pj.a_dense(), h.clone()) else {
                break;
            };
            // Keep every radius strictly positive.
            let mut lambda = 1.0;
            let mut guard = 0;
            while radii.iter().zip(&delta).any(|(&r, &d)| r - lambda * d <= 0.0) && guard < 60 {
                lambda *= 0.5;
                guard += 1;
            }
            let mut accepted = false;
            for _ in 0..8 {
                let trial: Vec<f64> = radii.iter().zip(&delta).map(|(&r, &d)| r - lambda * d).collect();
                let th = h_functions(spec, t, &m, &trial, s);
                let tnorm = th.iter().fold(0.0, |acc: f64, &x| acc.max(x.abs()));
                if tnorm <= hnorm || lambda <= 1.0 / 256.0 {
                    radii = trial;
                    h = th;
                    hnorm = tnorm;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if hnorm <= tol.newton * hscale {
            converged = true;
        }
        let w: Vec<C64> = sample.w.iter().zip(&radii).map(|(c, &r)| c * r).collect();
        let residual = (f.eval(&w) - f0 * (s + 1.0)).norm();
        out.push(TracePoint {
            s,
            radii: radii.clone(),
            w,
            residual,
            converged,
            iterations,
        });
    }
    Ok(out)
}

/// Radii of one bamboo chain at a fixed parameter, solved exactly term by
/// term from the pinned top.
#[derive(Clone, Debug)]
pub struct BambooTrace {
    /// Variables of the chain, top last.
    pub vars: Vec<usize>,
    /// psi for each chain variable; the top entry is exactly 1.
    pub radii: Vec<f64>,
    /// Effective scaling multiplier passed down to each term.
    pub s_vals: Vec<f64>,
}

/// Solve one scalar term equation psi^a (u psi^{2b} + t) = mult (u + t)
/// for psi > 0; the left side is strictly increasing, so the root is
/// unique. `target_s` is the multiplier.
fn scalar_radius(
    a: u32,
    b: u32,
    t: f64,
    m: f64,
    target_s: f64,
    term: usize,
) -> Result<f64, TransversalError> {
    let u = (1.0 - t) * m;
    let beta = u + t;
    if !(beta > 0.0) {
        return Err(TransversalError::SolveFailed { term });
    }
    let eval = |p: f64| p.powi(a as i32) * (u * p.powi(2 * b as i32) + t) - target_s * beta;
    let deriv = |p: f64| {
        p.powi(a as i32 - 1) * (u * (a as f64 + 2.0 * b as f64) * p.powi(2 * b as i32) + a as f64 * t)
    };
    let guess = target_s.powf(1.0 / a as f64);
    let mut lo = guess.min(1.0);
    let mut hi = guess.max(1.0);
    let mut k = 0;
    while eval(lo) > 0.0 {
        lo *= 0.5;
        k += 1;
        if k > 100 {
            return Err(TransversalError::SolveFailed { term });
        }
    }
    k = 0;
    while eval(hi) < 0.0 {
        hi *= 2.0;
        k += 1;
        if k > 100 {
            return Err(TransversalError::SolveFailed { term });
        }
    }
    let mut iters = 0;
    while hi - lo > 1e-14 * hi.max(1.0) && iters < 200 {
        let mid = 0.5 * (lo + hi);
        if eval(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let mut root = 0.5 * (lo + hi);
    for _ in 0..2 {
        let d = deriv(root);
        if d > 0.0 {
            let next = root - eval(root) / d;
            if next > 0.0 {
                root = next;
            }
        }
    }
    Ok(root)
}

/// Exact chain radii at parameter s, back-substituted from the top. The
/// multipliers stay at least 1 for s >= 0, which forces every radius into
/// [1, s+1].
pub fn bamboo_radii(
    member: &FamilyMember,
    m: &[f64],
    comp: &BambooComponent,
    s: f64,
) -> Result<BambooTrace, TransversalError> {
    let spec = member.spec();
    let n = spec.n();
    let t = member.t();
    let len = comp.end - comp.start;
    let mut radii = vec![0.0; len + 1];
    radii[len] = 1.0;
    let mut s_vals = vec![0.0; len];
    for k in (0..len).rev() {
        let jm = (comp.start + k) % n;
        let sj = (s + 1.0) / radii[k + 1];
        if !(sj > 0.0) {
            return Err(TransversalError::ParameterOutOfRange { s: sj - 1.0 });
        }
        s_vals[k] = sj;
        radii[k] = scalar_radius(spec.a()[jm], spec.b()[jm], t, m[jm], sj, jm)?;
    }
    Ok(BambooTrace {
        vars: comp.vars(n),
        radii,
        s_vals,
    })
}

/// Smallest and largest singular value of the constraint matrix at a
/// sample, with the pass verdict at the given tolerance.
#[derive(Clone, Copy, Debug)]
pub struct DirectCheck {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub pass: bool,
}

pub fn direct_check(f: &MixedPolynomial, sample: &LinkSample, tol: &Tolerances) -> DirectCheck {
    let (sigma_max, sigma_min) = sampler::constraint_sigmas(f, &sample.w);
    DirectCheck {
        sigma_min,
        sigma_max,
        pass: sigma_min > tol.sigma_rel * sigma_max,
    }
}

/// Both verdicts for one link sample.
#[derive(Clone, Debug)]
pub struct SampleRecord {
    pub t: f64,
    pub r: f64,
    pub w: Vec<C64>,
    pub nullity: Vec<usize>,
    pub direct_pass: bool,
    pub sigma_min: f64,
    pub sigma_max: f64,
    /// Some(true) when the germ exists with positive radial speed.
    pub constructive_pass: Option<bool>,
    pub method: Option<GermMethod>,
    pub radial_derivative: Option<f64>,
    pub dr_ds: Option<Vec<f64>>,
    pub germ_error: Option<TransversalError>,
    /// Samples at t in {0, 1} take their verdict from the direct check
    /// alone; the curve construction is recorded but not binding there.
    pub endpoint: bool,
    pub pass: bool,
}

fn make_record(member: &FamilyMember, sample: &LinkSample, tol: &Tolerances) -> SampleRecord {
    let dc = direct_check(member.poly(), sample, tol);
    let endpoint = member.is_endpoint();
    let (method, radial_derivative, dr_ds, constructive_pass, germ_error) =
        match curve_germ(member, sample) {
            Ok(g) => (
                Some(g.method),
                Some(g.radial_derivative),
                Some(g.dr_ds),
                Some(g.radial_derivative > 0.0),
                None,
            ),
            Err(e) => (None, None, None, Some(false), Some(e)),
        };
    let pass = dc.pass && (endpoint || constructive_pass == Some(true));
    SampleRecord {
        t: sample.t,
        r: sample.r,
        w: sample.w.clone(),
        nullity: sample.nullity.iter().copied().collect(),
        direct_pass: dc.pass,
        sigma_min: dc.sigma_min,
        sigma_max: dc.sigma_max,
        constructive_pass,
        method,
        radial_derivative,
        dr_ds,
        germ_error,
        endpoint,
        pass,
    }
}

/// All samples drawn and judged in one (t, r) grid cell.
#[derive(Clone, Debug)]
pub struct CellOutcome {
    pub t: f64,
    pub r: f64,
    pub records: Vec<SampleRecord>,
    pub convergence_failures: usize,
    /// Nullity patterns rejected as structurally infeasible.
    pub infeasible_patterns: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertSummary {
    pub cells: usize,
    pub records: usize,
    pub direct_passes: usize,
    pub constructive_passes: usize,
    /// Interior records where the two verdicts differ.
    pub disagreements: usize,
    pub convergence_failures: usize,
    pub infeasible_patterns: usize,
    pub all_pass: bool,
    /// True when not a single record was produced.
    pub vacuous: bool,
}

#[derive(Clone, Debug)]
pub struct TransversalityCertificate {
    pub spec: CyclicFamilySpec,
    pub t_grid: Vec<f64>,
    pub r_list: Vec<f64>,
    pub cells: Vec<CellOutcome>,
    pub summary: CertSummary,
}

/// Size-k subsets of 0..n in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + (i - 1) {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Judge one (t, r) cell: a batch of unconstrained samples plus a smaller
/// batch for every feasible nullity pattern. Deterministic in `cell_seed`.
pub fn certify_cell(
    spec: &CyclicFamilySpec,
    t: f64,
    r: f64,
    samples_per_cell: u64,
    cell_seed: u64,
    tol: &Tolerances,
) -> Result<CellOutcome, FamilyError> {
    let member = make_member(spec, t)?;
    let n = spec.n();
    let mut records = Vec::new();
    let mut convergence_failures = 0usize;
    let mut infeasible_patterns = Vec::new();

    let batch = sampler::sample_link(&member, r, samples_per_cell, rng::derive_seed(cell_seed, 0), tol);
    convergence_failures += batch.failures.len();
    for s in &batch.samples {
        records.push(make_record(&member, s, tol));
    }

    let per_pattern = (samples_per_cell / 10).max(1);
    let mut pidx = 0u64;
    for size in 1..=n.saturating_sub(1).min(6) {
        for pattern in combinations(n, size) {
            let pseed = rng::derive_seed(cell_seed, 1 + pidx);
            pidx += 1;
            let nullity: BTreeSet<usize> = pattern.iter().copied().collect();
            let batch = sampler::sample_with_nullity(&member, r, &nullity, per_pattern, pseed, tol);
            if batch.infeasible.is_some() {
                infeasible_patterns.push(pattern);
                continue;
            }
            convergence_failures += batch.failures.len();
            for s in &batch.samples {
                records.push(make_record(&member, s, tol));
            }
        }
    }
    Ok(CellOutcome {
        t,
        r,
        records,
        convergence_failures,
        infeasible_patterns,
    })
}

/// Combine per-cell outcomes into a certificate.
pub fn assemble(
    spec: CyclicFamilySpec,
    t_grid: Vec<f64>,
    r_list: Vec<f64>,
    cells: Vec<CellOutcome>,
) -> TransversalityCertificate {
    let mut summary = CertSummary {
        cells: cells.len(),
        records: 0,
        direct_passes: 0,
        constructive_passes: 0,
        disagreements: 0,
        convergence_failures: 0,
        infeasible_patterns: 0,
        all_pass: true,
        vacuous: false,
    };
    for cell in &cells {
        summary.records += cell.records.len();
        summary.convergence_failures += cell.convergence_failures;
        summary.infeasible_patterns += cell.infeasible_patterns.len();
        for rec in &cell.records {
            if rec.direct_pass {
                summary.direct_passes += 1;
            }
            if rec.constructive_pass == Some(true) {
                summary.constructive_passes += 1;
            }
            if !rec.endpoint && rec.constructive_pass != Some(rec.direct_pass) {
                summary.disagreements += 1;
            }
            summary.all_pass &= rec.pass;
        }
    }
    summary.all_pass = summary.all_pass && summary.disagreements == 0;
    summary.vacuous = summary.records == 0;
    TransversalityCertificate {
        spec,
        t_grid,
        r_list,
        cells,
        summary,
    }
}

/// Certify the whole (t, r) grid. Cell seeds are derived from the base
/// seed and the cell position only, so cells can be recomputed in any
/// order with identical results.
pub fn certify(
    spec: &CyclicFamilySpec,
    t_grid: &[f64],
    r_list: &[f64],
    samples_per_cell: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<TransversalityCertificate, FamilyError> {
    let mut cells = Vec::new();
    for (ti, &t) in t_grid.iter().enumerate() {
        for (ri, &r) in r_list.iter().enumerate() {
            let cell_index = (ti * r_list.len() + ri) as u64;
            let cell_seed = rng::derive_seed(seed, cell_index);
            cells.push(certify_cell(spec, t, r, samples_per_cell, cell_seed, tol)?);
        }
    }
    Ok(assemble(spec.clone(), t_grid.to_vec(), r_list.to_vec(), cells))
}
