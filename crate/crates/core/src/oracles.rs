//! Deliberately naive reference computations: dense Jacobi rotations,
//! quadratic formulas, compensated vertex-by-vertex sums. They share no
//! numerical code with the main paths.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{GraphFamily, Snapshot};
use crate::graph::WeightedGraph;
use crate::metric::Metric;

pub const BRUTE_EIGEN_LIMIT: usize = 12;
pub const BRUTE_SUM_LIMIT: usize = 10_000;
pub const BRUTE_SOLVE_LIMIT: usize = 400;

#[derive(Debug, Clone, Serialize)]
pub struct OracleResult {
    pub quantity: String,
    pub value: f64,
    pub method: String,
    pub tolerance: f64,
}

impl OracleResult {
    pub fn new(quantity: &str, value: f64, method: &str, tolerance: f64) -> Self {
        OracleResult {
            quantity: quantity.into(),
            value,
            method: method.into(),
            tolerance,
        }
    }

    pub fn agrees(&self, other: f64) -> bool {
        (self.value - other).abs() <= self.tolerance * self.value.abs().max(1.0)
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum().max(0.0) * 2.0 - 1.0;
                let t = t / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Full Dirichlet spectrum of `-Delta` on `omega` (at most 12 vertices).
pub fn brute_eigen(g: &WeightedGraph, omega: &[usize]) -> Result<Vec<f64>> {
    if omega.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if omega.len() > BRUTE_EIGEN_LIMIT {
        return Err(Error::ResourceCap {
            needed: omega.len() as u128,
            cap: BRUTE_EIGEN_LIMIT,
        });
    }
    let n = omega.len();
    let mut a = vec![vec![0.0; n]; n];
    for (i, &x) in omega.iter().enumerate() {
        for (j, &y) in omega.iter().enumerate() {
            a[i][j] = if i == j {
                g.degree(x) / g.mass(x)
            } else {
                -g.weight(x, y) / (g.mass(x) * g.mass(y)).sqrt()
            };
        }
    }
    Ok(jacobi_eigenvalues(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecurrenceKind {
    Barrier,
    Green,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecurrenceRoots {
    /// Roots `r` of `(N-1) r^2 - c r + 1 = 0`, ascending.
    pub roots: [f64; 2],
    /// The decaying root, `1/b` for the Green kernel.
    pub decay: f64,
    /// `1 / decay`.
    pub b: f64,
    /// `g(x_0, x_0)` for the Green kind.
    pub g0: Option<f64>,
}

/// Radial recurrences on `T_N`: `(N-1) r^2 - (alpha+1) N r + 1 = 0` for the
/// resolvent, `(N-1) r^2 - N r + 1 = 0` for harmonic barriers.
pub fn brute_recurrence(n: usize, kind: RecurrenceKind, alpha: f64) -> Result<RecurrenceRoots> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("N = {n} < 3")));
    }
    let nf = n as f64;
    let c = match kind {
        RecurrenceKind::Barrier => nf,
        RecurrenceKind::Green => (alpha + 1.0) * nf,
    };
    let a = nf - 1.0;
    let disc = (c * c - 4.0 * a).sqrt();
    // Product of roots is 1/a; take the small one from it to avoid cancellation.
    let big = (c + disc) / (2.0 * a);
    let small = 1.0 / (a * big);
    let g0 = match kind {
        // At the root: (alpha+1) N g0 - N g0 small = 1.
        RecurrenceKind::Green => Some(1.0 / (nf * (alpha + 1.0 - small))),
        RecurrenceKind::Barrier => None,
    };
    Ok(RecurrenceRoots {
        roots: [small, big],
        decay: small,
        b: 1.0 / small,
        g0,
    })
}

/// Neumaier-compensated sum.
pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `sum_{lo <= r(x) <= hi} f(x) m_x` over explicitly materialized vertices.
pub fn brute_sum(
    family: &GraphFamily,
    metric: &Metric,
    expression: impl Fn(&Snapshot, usize) -> f64,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    if hi < lo {
        return Ok(0.0);
    }
    let snap = family.materialize(metric, hi)?;
    let members: Vec<usize> = (0..snap.graph.len())
        .filter(|&x| snap.r[x] >= lo - 1e-9 && snap.r[x] <= hi + 1e-9)
        .collect();
    if members.len() > BRUTE_SUM_LIMIT {
        return Err(Error::ResourceCap {
            needed: members.len() as u128,
            cap: BRUTE_SUM_LIMIT,
        });
    }
    Ok(compensated_sum(
        members.iter().map(|&x| expression(&snap, x) * snap.graph.mass(x)),
    ))
}

/// Dense Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("nonempty");
        if a[piv][col] == 0.0 {
            return Err(Error::NonConvergence("singular system".into()));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..n {
                    a[row][k] -= f * a[col][k];
                }
                b[row] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Ok(x)
}

/// Truncated resolvent `(alpha M + D - W) g = e_{x0}` on the explicitly
/// materialized ball, by dense elimination. Returns `(id, r, g)` rows.
pub fn brute_resolvent(
    family: &GraphFamily,
    metric: &Metric,
    alpha: f64,
    radius: f64,
) -> Result<Vec<(String, f64, f64)>> {
    let snap = family.materialize(metric, radius)?;
    let ball = snap.ball();
    if ball.len() > BRUTE_SOLVE_LIMIT {
        return Err(Error::ResourceCap {
            needed: ball.len() as u128,
            cap: BRUTE_SOLVE_LIMIT,
        });
    }
    let g = &snap.graph;
    let pos = |x: usize| ball.iter().position(|&y| y == x);
    let n = ball.len();
    let mut a = vec![vec![0.0; n]; n];
    let mut b = vec![0.0; n];
    for (i, &x) in ball.iter().enumerate() {
        a[i][i] = alpha * g.mass(x) + g.degree(x);
        for nb in g.neighbors(x) {
            if let Some(j) = pos(nb.vertex) {
                a[i][j] -= nb.weight;
            }
        }
        if x == snap.root {
            b[i] = 1.0;
        }
    }
    let sol = gauss_solve(a, b)?;
    Ok(ball
        .iter()
        .zip(sol)
        .map(|(&x, v)| (g.id(x).to_string(), snap.r[x], v))
        .collect())
}
