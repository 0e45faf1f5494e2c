//! Exact linear algebra over the integers and rationals.
//!
//! Weight systems and torus-map exponents are defined by integer linear
//! systems and must come out exact; float elimination is not acceptable
//! there. Ranks and determinants use fraction-free (Bareiss) elimination on
//! `BigInt`, solves use Gauss-Jordan on `Ratio<BigInt>`.

use alloc::vec;
use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

pub type Rat = Ratio<BigInt>;

pub fn rat(n: i64, d: i64) -> Rat {
    Ratio::new(BigInt::from(n), BigInt::from(d))
}

fn big(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// Rank of an integer matrix, fraction-free elimination with full pivoting.
pub fn int_rank(rows: &[Vec<i64>]) -> usize {
    let mut a = big(rows);
    let m = a.len();
    if m == 0 {
        return 0;
    }
    let n = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    let mut row = 0;
    let mut col = 0;
    while row < m && col < n {
        // any nonzero pivot in the remaining block will do
        let mut pr = None;
        'search: for i in row..m {
            for j in col..n {
                if !a[i][j].is_zero() {
                    pr = Some((i, j));
                    break 'search;
                }
            }
        }
        let Some((pi, pj)) = pr else { break };
        a.swap(row, pi);
        if pj != col {
            for r in a.iter_mut() {
                r.swap(col, pj);
            }
        }
        for i in row + 1..m {
            for j in col + 1..n {
                let t = &a[i][j] * &a[row][col] - &a[i][col] * &a[row][j];
                a[i][j] = &t / &prev; // exact by the Bareiss identity
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[row][col].clone();
        rank += 1;
        row += 1;
        col += 1;
    }
    rank
}

/// Determinant of a square integer matrix (Bareiss).
pub fn int_det(rows: &[Vec<i64>]) -> BigInt {
    let mut a = big(rows);
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut prev = BigInt::one();
    let mut sign = 1i32;
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = &t / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Outcome of an exact linear solve of a (possibly non-square) system.
#[derive(Clone, Debug, PartialEq)]
pub enum LinSolve {
    Unique(Vec<Rat>),
    /// Coefficient rank below the number of unknowns.
    Underdetermined { rank: usize },
    /// No solution.
    Inconsistent,
}

/// Solve `a x = b` exactly, `a` an m-by-n integer matrix.
pub fn solve(rows: &[Vec<i64>], rhs: &[Rat]) -> LinSolve {
    let m = rows.len();
    debug_assert_eq!(rhs.len(), m);
    let n = if m == 0 { 0 } else { rows[0].len() };
    let mut a: Vec<Vec<Rat>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Rat::from(BigInt::from(x))).collect())
        .collect();
    let mut b: Vec<Rat> = rhs.to_vec();

    let mut pivot_col = vec![usize::MAX; m.min(n)];
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(row, p);
        b.swap(row, p);
        let inv = a[row][col].clone().recip();
        for j in col..n {
            let v = &a[row][j] * &inv;
            a[row][j] = v;
        }
        b[row] = &b[row] * &inv;
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..n {
                    let v = &a[i][j] - &(&f * &a[row][j]);
                    a[i][j] = v;
                }
                let v = &b[i] - &(&f * &b[row]);
                b[i] = v;
            }
        }
        pivot_col[row] = col;
        row += 1;
        if row == m {
            break;
        }
    }
    let rank = row;
    for i in rank..m {
        if !b[i].is_zero() {
            return LinSolve::Inconsistent;
        }
    }
    if rank < n {
        return LinSolve::Underdetermined { rank };
    }
    let mut x = vec![Rat::zero(); n];
    for i in 0..rank {
        x[pivot_col[i]] = b[i].clone();
    }
    LinSolve::Unique(x)
}

/// Solve `a X = b` for square nonsingular integer `a` and integer `b`
/// (column-wise). `None` when `a` is singular.
pub fn solve_matrix(a: &[Vec<i64>], b: &[Vec<i64>]) -> Option<Vec<Vec<Rat>>> {
    let n = a.len();
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            a[i].iter()
                .chain(b[i].iter())
                .map(|&x| Rat::from(BigInt::from(x)))
                .collect()
        })
        .collect();
    gauss_jordan(&mut aug, n)?;
    Some((0..n).map(|i| aug[i][n..].to_vec()).collect())
}

/// Invert a square rational matrix. `None` when singular.
pub fn invert(e: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = e.len();
    let mut aug: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row = e[i].clone();
            for j in 0..n {
                row.push(if i == j { Rat::one() } else { Rat::zero() });
            }
            row
        })
        .collect();
    gauss_jordan(&mut aug, n)?;
    Some((0..n).map(|i| aug[i][n..].to_vec()).collect())
}

/// Reduce the left n-by-n block of `aug` to the identity. `None` if singular.
fn gauss_jordan(aug: &mut [Vec<Rat>], n: usize) -> Option<()> {
    for col in 0..n {
        let p = (col..n).find(|&i| !aug[i][col].is_zero())?;
        aug.swap(col, p);
        let inv = aug[col][col].clone().recip();
        for v in aug[col].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..n {
            if i != col && !aug[i][col].is_zero() {
                let f = aug[i][col].clone();
                let (head, tail) = if i < col {
                    let (h, t) = aug.split_at_mut(col);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = aug.split_at_mut(i);
                    (&mut t[0], &h[col])
                };
                for (x, y) in head.iter_mut().zip(tail.iter()) {
                    let v = &*x - &(&f * y);
                    *x = v;
                }
            }
        }
    }
    Some(())
}

/// Scale a rational solution to the primitive integer weight direction:
/// multiply by the lcm of denominators, divide by the gcd of the entries.
/// Returns `None` if the vector is zero or an entry overflows i64.
pub fn primitive_integer_direction(x: &[Rat]) -> Option<Vec<i64>> {
    use num_integer::Integer;
    if x.iter().all(|v| v.is_zero()) {
        return None;
    }
    let mut l = BigInt::one();
    for v in x {
        l = l.lcm(v.denom());
    }
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    let mut g = BigInt::zero();
    for v in &ints {
        g = g.gcd(v);
    }
    debug_assert!(g.is_positive());
    let mut out = Vec::with_capacity(ints.len());
    for v in &ints {
        let w = v / &g;
        out.push(i64::try_from(&w).ok()?);
    }
    Some(out)
}
