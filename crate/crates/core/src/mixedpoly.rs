//! Mixed polynomials: finite sums `f(z) = sum_i c_i z^{nu_i} zbar^{mu_i}`
//! in variables `z_1 .. z_n`, holomorphic and antiholomorphic exponents kept
//! separately. Exponent vectors are dense; n stays small here.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::C64;

/// `z^e` with the convention `0^0 = 1`.
pub fn cpowu(z: C64, e: u32) -> C64 {
    let mut acc = C64::new(1.0, 0.0);
    let mut base = z;
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedMonomial {
    pub coeff: C64,
    /// Holomorphic exponents, one per variable.
    pub nu: Vec<u32>,
    /// Antiholomorphic exponents, one per variable.
    pub mu: Vec<u32>,
}

impl MixedMonomial {
    pub fn total_degree(&self) -> u32 {
        self.nu.iter().sum::<u32>() + self.mu.iter().sum::<u32>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MixedPolyError {
    ZeroVariables,
    /// Monomial `index` has exponent vectors of the wrong length.
    LengthMismatch { index: usize },
}

impl core::fmt::Display for MixedPolyError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MixedPolyError::ZeroVariables => write!(f, "polynomial needs at least one variable"),
            MixedPolyError::LengthMismatch { index } => {
                write!(f, "monomial {index}: exponent vectors do not match the variable count")
            }
        }
    }
}

/// A mixed polynomial. Monomials are kept in first-seen order with equal
/// `(nu, mu)` pairs merged; exact zero coefficients are dropped, so the zero
/// polynomial has an empty monomial list.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedPolynomial {
    n: usize,
    monomials: Vec<MixedMonomial>,
}

impl MixedPolynomial {
    pub fn new(n: usize, monomials: Vec<MixedMonomial>) -> Result<Self, MixedPolyError> {
        if n == 0 {
            return Err(MixedPolyError::ZeroVariables);
        }
        let mut merged: Vec<MixedMonomial> = Vec::with_capacity(monomials.len());
        for (index, m) in monomials.into_iter().enumerate() {
            if m.nu.len() != n || m.mu.len() != n {
                return Err(MixedPolyError::LengthMismatch { index });
            }
            match merged.iter_mut().find(|o| o.nu == m.nu && o.mu == m.mu) {
                Some(o) => o.coeff += m.coeff,
                None => merged.push(m),
            }
        }
        merged.retain(|m| m.coeff.re != 0.0 || m.coeff.im != 0.0);
        Ok(MixedPolynomial { n, monomials: merged })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn monomials(&self) -> &[MixedMonomial] {
        &self.monomials
    }

    pub fn is_zero(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn max_total_degree(&self) -> u32 {
        self.monomials.iter().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    /// Variables that actually occur (some `nu + mu > 0`).
    pub fn support(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for m in &self.monomials {
            for j in 0..self.n {
                if m.nu[j] + m.mu[j] > 0 {
                    s.insert(j);
                }
            }
        }
        s
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        debug_assert_eq!(z.len(), self.n);
        let mut acc = C64::new(0.0, 0.0);
        for m in &self.monomials {
            let mut term = m.coeff;
            for j in 0..self.n {
                if m.nu[j] > 0 {
                    term *= cpowu(z[j], m.nu[j]);
                }
                if m.mu[j] > 0 {
                    term *= cpowu(z[j].conj(), m.mu[j]);
                }
            }
            acc += term;
        }
        acc
    }

    /// Wirtinger gradients `(df/dz_j, df/dzbar_j)`.
    pub fn wirtinger(&self, z: &[C64]) -> (Vec<C64>, Vec<C64>) {
        debug_assert_eq!(z.len(), self.n);
        let one = C64::new(1.0, 0.0);
        let mut dz = vec![C64::new(0.0, 0.0); self.n];
        let mut dzb = vec![C64::new(0.0, 0.0); self.n];
        let mut factors = vec![one; self.n];
        let mut prefix = vec![one; self.n + 1];
        let mut suffix = vec![one; self.n + 1];
        for m in &self.monomials {
            for j in 0..self.n {
                factors[j] = cpowu(z[j], m.nu[j]) * cpowu(z[j].conj(), m.mu[j]);
            }
            prefix[0] = one;
            for j in 0..self.n {
                prefix[j + 1] = prefix[j] * factors[j];
            }
            suffix[self.n] = one;
            for j in (0..self.n).rev() {
                suffix[j] = suffix[j + 1] * factors[j];
            }
            for j in 0..self.n {
                let rest = m.coeff * prefix[j] * suffix[j + 1];
                if m.nu[j] > 0 {
                    dz[j] += rest
                        * (m.nu[j] as f64)
                        * cpowu(z[j], m.nu[j] - 1)
                        * cpowu(z[j].conj(), m.mu[j]);
                }
                if m.mu[j] > 0 {
                    dzb[j] += rest
                        * (m.mu[j] as f64)
                        * cpowu(z[j], m.nu[j])
                        * cpowu(z[j].conj(), m.mu[j] - 1);
                }
            }
        }
        (dz, dzb)
    }

    /// Real 2 x 2n Jacobian of `(Re f, Im f)` in coordinates
    /// `(x_1, y_1, .., x_n, y_n)`, from the Wirtinger gradients:
    /// `df/dx = df/dz + df/dzbar`, `df/dy = i (df/dz - df/dzbar)`.
    pub fn real_jacobian(&self, z: &[C64]) -> Vec<Vec<f64>> {
        let (dz, dzb) = self.wirtinger(z);
        let mut rows = vec![vec![0.0; 2 * self.n]; 2];
        for j in 0..self.n {
            let fx = dz[j] + dzb[j];
            let fy = C64::new(0.0, 1.0) * (dz[j] - dzb[j]);
            rows[0][2 * j] = fx.re;
            rows[0][2 * j + 1] = fy.re;
            rows[1][2 * j] = fx.im;
            rows[1][2 * j + 1] = fy.im;
        }
        rows
    }

    /// Both singular values of the real Jacobian, descending.
    pub fn jacobian_singular_values(&self, z: &[C64]) -> (f64, f64) {
        let sv = linalg::singular_values(&self.real_jacobian(z));
        (sv[0], sv[1])
    }

    /// A point is mixed singular when the two real gradients are linearly
    /// dependent, i.e. the second singular value is (numerically) zero.
    /// `tol` is an absolute threshold on sigma_2; for the usual relative
    /// convention pass `1e-8 * sigma_1`.
    pub fn is_mixed_singular(&self, z: &[C64], tol: f64) -> bool {
        let (_, s2) = self.jacobian_singular_values(z);
        s2 <= tol
    }

    /// The complex conjugate polynomial: `conj_poly(f)(z) = conj(f(z))`.
    pub fn conj_poly(&self) -> Self {
        let monomials = self
            .monomials
            .iter()
            .map(|m| MixedMonomial { coeff: m.coeff.conj(), nu: m.mu.clone(), mu: m.nu.clone() })
            .collect();
        MixedPolynomial { n: self.n, monomials }
    }

    /// Substitute `z_i = 0` for all `i` in `vars`: monomials touching any of
    /// those variables drop out. Variable count is unchanged.
    pub fn zero_coordinates(&self, vars: &BTreeSet<usize>) -> Self {
        let monomials = self
            .monomials
            .iter()
            .filter(|m| !vars.iter().any(|&i| m.nu[i] + m.mu[i] > 0))
            .cloned()
            .collect();
        MixedPolynomial { n: self.n, monomials }
    }

    pub fn variable_graph(&self) -> InterconnGraph {
        let vertices: Vec<usize> = self.support().into_iter().collect();
        let mut edges = BTreeSet::new();
        for m in &self.monomials {
            let vs: Vec<usize> = (0..self.n).filter(|&j| m.nu[j] + m.mu[j] > 0).collect();
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    edges.insert((vs[i], vs[j]));
                }
            }
        }
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();

        let mut component_of = alloc::collections::BTreeMap::new();
        let mut components: Vec<Vec<usize>> = Vec::new();
        for &v in &vertices {
            if component_of.contains_key(&v) {
                continue;
            }
            let id = components.len();
            let mut comp = vec![v];
            component_of.insert(v, id);
            let mut queue = vec![v];
            while let Some(u) = queue.pop() {
                for &(x, y) in &edges {
                    let other = if x == u {
                        y
                    } else if y == u {
                        x
                    } else {
                        continue;
                    };
                    if !component_of.contains_key(&other) {
                        component_of.insert(other, id);
                        comp.push(other);
                        queue.push(other);
                    }
                }
            }
            comp.sort_unstable();
            components.push(comp);
        }

        let components = components
            .into_iter()
            .map(|verts| {
                let in_comp: BTreeSet<usize> = verts.iter().copied().collect();
                let comp_edges: Vec<&(usize, usize)> =
                    edges.iter().filter(|(x, _)| in_comp.contains(x)).collect();
                let e = comp_edges.len();
                let v = verts.len();
                let mut degree = alloc::collections::BTreeMap::new();
                for &&(x, y) in &comp_edges {
                    *degree.entry(x).or_insert(0usize) += 1;
                    *degree.entry(y).or_insert(0usize) += 1;
                }
                let max_deg = degree.values().copied().max().unwrap_or(0);
                let kind = if v == 1 {
                    ComponentKind::Isolated
                } else if e == v - 1 && max_deg <= 2 {
                    ComponentKind::Bamboo
                } else if e == v && max_deg == 2 {
                    ComponentKind::Cycle
                } else {
                    ComponentKind::Other
                };
                GraphComponent { vertices: verts, kind }
            })
            .collect();

        InterconnGraph { vertices, edges, components }
    }
}

/// Which variables appear together in some monomial. Vertices are the
/// variables occurring in `f`; an edge joins two variables sharing a
/// monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterconnGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<GraphComponent>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphComponent {
    pub vertices: Vec<usize>,
    pub kind: ComponentKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComponentKind {
    Isolated,
    /// A path: e = v - 1, degrees at most 2.
    Bamboo,
    /// A cycle: e = v, all degrees 2.
    Cycle,
    Other,
}
