//! Laplacian, carré du champ, quadratic-form identities and Dirichlet
//! spectral bottoms.

use std::collections::HashSet;

use serde::Serialize;

use crate::domain::{CellDomain, CellFunction};
use crate::error::{Error, Result};
use crate::family::{GraphFamily, Region};
use crate::graph::WeightedGraph;
use crate::linalg::smallest_eigenpair;
use crate::metric::Metric;

fn check_len(g: &WeightedGraph, f: &[f64]) -> Result<()> {
    if f.len() != g.len() {
        return Err(Error::InvalidParameter(format!(
            "function has {} values for {} vertices",
            f.len(),
            g.len()
        )));
    }
    Ok(())
}

/// `Delta f(x) = sum_y (w_xy / m_x)(f(y) - f(x))`.
pub fn laplacian_apply(g: &WeightedGraph, f: &[f64], x: usize) -> Result<f64> {
    check_len(g, f)?;
    g.check_complete(x)?;
    Ok(laplacian_unchecked(g, f, x))
}

fn laplacian_unchecked(g: &WeightedGraph, f: &[f64], x: usize) -> f64 {
    let fx = f[x];
    g.neighbors(x)
        .iter()
        .map(|n| n.weight * (f[n.vertex] - fx))
        .sum::<f64>()
        / g.mass(x)
}

/// `Gamma(f, h)(x) = 1/(2 m_x) sum_y w_xy (f(y) - f(x))(h(y) - h(x))`.
pub fn gamma_at(g: &WeightedGraph, f: &[f64], h: &[f64], x: usize) -> Result<f64> {
    check_len(g, f)?;
    check_len(g, h)?;
    g.check_complete(x)?;
    Ok(gamma_unchecked(g, f, h, x))
}

fn gamma_unchecked(g: &WeightedGraph, f: &[f64], h: &[f64], x: usize) -> f64 {
    g.neighbors(x)
        .iter()
        .map(|n| n.weight * (f[n.vertex] - f[x]) * (h[n.vertex] - h[x]))
        .sum::<f64>()
        / (2.0 * g.mass(x))
}

/// `Gamma(f, h)` at every vertex; all neighbor lists must be complete.
pub fn gamma(g: &WeightedGraph, f: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    (0..g.len()).map(|x| gamma_at(g, f, h, x)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Sum of absolute values of all terms on both sides.
    pub scale: f64,
}

impl IdentityResidual {
    pub fn within(&self, rel: f64) -> bool {
        self.residual <= rel * self.scale.max(f64::MIN_POSITIVE)
    }
}

/// Vertices where `h` or a neighbor of it is nonzero; all must be complete.
fn active_set(g: &WeightedGraph, h: &[f64]) -> Result<Vec<usize>> {
    let mut set = HashSet::new();
    for x in 0..g.len() {
        if h[x] != 0.0 {
            g.check_complete(x)?;
            set.insert(x);
            set.extend(g.neighbors(x).iter().map(|n| n.vertex));
        }
    }
    let mut out: Vec<usize> = set.into_iter().collect();
    out.sort_unstable();
    for &x in &out {
        g.check_complete(x)?;
    }
    Ok(out)
}

/// Residual of `1/2 sum_{x,y} w (grad f)(grad h) = -sum_x f(x) Delta h(x) m_x`
/// for finitely supported `h`.
pub fn green_identity_residual(g: &WeightedGraph, f: &[f64], h: &[f64]) -> Result<IdentityResidual> {
    check_len(g, f)?;
    check_len(g, h)?;
    let active = active_set(g, h)?;
    let (mut lhs, mut rhs, mut scale) = (0.0, 0.0, 0.0);
    for &x in &active {
        for n in g.neighbors(x) {
            let t = 0.5 * n.weight * (f[n.vertex] - f[x]) * (h[n.vertex] - h[x]);
            lhs += t;
            scale += t.abs();
        }
        let t = -f[x] * laplacian_unchecked(g, h, x) * g.mass(x);
        rhs += t;
        scale += t.abs();
    }
    Ok(IdentityResidual {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        scale,
    })
}

/// Residual of
/// `1/2 sum w |grad(fh)|^2 = sum f^2 Gamma(h) m - sum f Delta f h^2 m - 1/4 sum w |grad f|^2 |grad h|^2`
/// for finitely supported `h`.
pub fn form_identity_residual(g: &WeightedGraph, f: &[f64], h: &[f64]) -> Result<IdentityResidual> {
    check_len(g, f)?;
    check_len(g, h)?;
    let active = active_set(g, h)?;
    let (mut lhs, mut rhs, mut scale) = (0.0, 0.0, 0.0);
    for &x in &active {
        let mut cross = 0.0;
        for n in g.neighbors(x) {
            let y = n.vertex;
            let d = f[y] * h[y] - f[x] * h[x];
            let t = 0.5 * n.weight * d * d;
            lhs += t;
            scale += t;
            let df = f[y] - f[x];
            let dh = h[y] - h[x];
            cross += 0.25 * n.weight * df * df * dh * dh;
        }
        let m = g.mass(x);
        let t1 = f[x] * f[x] * gamma_unchecked(g, h, h, x) * m;
        let t2 = f[x] * laplacian_unchecked(g, f, x) * h[x] * h[x] * m;
        rhs += t1 - t2 - cross;
        scale += t1.abs() + t2.abs() + cross;
    }
    Ok(IdentityResidual {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
        scale,
    })
}

/// `Q(f) / ||f||^2` for finitely supported `f`.
pub fn rayleigh_quotient(g: &WeightedGraph, f: &[f64]) -> Result<f64> {
    check_len(g, f)?;
    let (mut q, mut norm) = (0.0, 0.0);
    for x in 0..g.len() {
        if f[x] == 0.0 {
            continue;
        }
        g.check_complete(x)?;
        norm += f[x] * f[x] * g.mass(x);
        for n in g.neighbors(x) {
            let d = f[n.vertex] - f[x];
            // Edges with both ends in the support are met twice.
            q += if f[n.vertex] == 0.0 { n.weight * d * d } else { 0.5 * n.weight * d * d };
        }
    }
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(q / norm)
}

/// Dirichlet eigenpair on a vertex set of a materialized graph.
#[derive(Debug, Clone, Serialize)]
pub struct DirichletBottom {
    pub mu1: f64,
    /// Eigenfunction on the listed vertices, `sum phi^2 m = 1`.
    pub vertices: Vec<String>,
    pub eigenfunction: Vec<f64>,
}

pub fn dirichlet_bottom(g: &WeightedGraph, omega: &[usize]) -> Result<DirichletBottom> {
    let r = vec![0.0; g.len()];
    let domain = CellDomain::from_graph(g, &Metric::combinatorial(), &r, omega, &HashSet::new())?;
    let (mu1, phi) = domain_bottom(&domain)?;
    Ok(DirichletBottom {
        mu1,
        vertices: omega.iter().map(|&x| g.id(x).to_string()).collect(),
        eigenfunction: phi,
    })
}

/// Bottom of the Dirichlet spectrum of a domain and its eigenfunction per
/// cell, normalized by `sum count m phi^2 = 1`.
pub fn domain_bottom(domain: &CellDomain) -> Result<(f64, Vec<f64>)> {
    let (mu, v) = smallest_eigenpair(&domain.dirichlet_operator())?;
    let phi = v
        .iter()
        .zip(domain.cells())
        .map(|(v, c)| v / (c.count * c.mass).sqrt())
        .collect();
    Ok((mu, phi))
}

/// Rayleigh quotient of a cell function vanishing off the domain.
pub fn domain_rayleigh(domain: &CellDomain, f: &[f64]) -> Result<f64> {
    let norm = domain.mass_norm2(f);
    if norm == 0.0 {
        return Err(Error::ZeroFunction);
    }
    Ok(domain.dirichlet_energy(f) / norm)
}

#[derive(Debug, Clone, Serialize)]
pub struct Defect {
    /// `min (Delta f + mu f)` over the domain.
    pub min: f64,
    pub witness: String,
}

/// `min_{x in Omega} (Delta f + mu f)(x)`; `f` must be nonnegative on
/// `Omega` and its boundary.
pub fn subharmonic_defect(g: &WeightedGraph, f: &[f64], mu: f64, omega: &[usize]) -> Result<Defect> {
    check_len(g, f)?;
    if omega.is_empty() {
        return Err(Error::EmptyDomain);
    }
    let mut best = Defect {
        min: f64::INFINITY,
        witness: String::new(),
    };
    for &x in omega {
        g.check_complete(x)?;
        for y in std::iter::once(x).chain(g.neighbors(x).iter().map(|n| n.vertex)) {
            if f[y] < 0.0 {
                return Err(Error::Precondition(format!(
                    "f({}) = {} is negative",
                    g.id(y),
                    f[y]
                )));
            }
        }
        let v = laplacian_unchecked(g, f, x) + mu * f[x];
        if v < best.min {
            best = Defect {
                min: v,
                witness: g.id(x).to_string(),
            };
        }
    }
    Ok(best)
}

/// Same as [`subharmonic_defect`] on a cell domain.
pub fn domain_defect(domain: &CellDomain, f: &CellFunction, mu: f64) -> Result<Defect> {
    if let Some(v) = f.cells.iter().chain(&f.boundary).find(|v| **v < 0.0) {
        return Err(Error::Precondition(format!("f takes the negative value {v}")));
    }
    let mut best = Defect {
        min: f64::INFINITY,
        witness: String::new(),
    };
    for i in 0..domain.len() {
        let v = domain.laplacian(f, i) + mu * f.cells[i];
        if v < best.min {
            best = Defect {
                min: v,
                witness: domain.cell(i).label.clone(),
            };
        }
    }
    Ok(best)
}

/// Exhaustion estimate of `mu_1` of a region.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralEstimate {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Richardson extrapolation under a `c / R^2` law from the last two radii.
    pub extrapolated: f64,
    /// `[lo, hi]`: `hi = mu_1(Pi_{R_max})` is a rigorous upper bound; `lo`
    /// subtracts twice the drift between consecutive extrapolations and is
    /// flagged as an estimate.
    pub interval: [f64; 2],
    pub lower_is_estimate: bool,
}

impl SpectralEstimate {
    pub fn conservative(&self) -> f64 {
        self.interval[0]
    }
}

pub fn spectral_bottom_estimate(
    family: &GraphFamily,
    metric: &Metric,
    region: &Region,
    radii: &[f64],
) -> Result<SpectralEstimate> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius schedule".into()));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must increase".into()));
    }
    let values = radii
        .iter()
        .map(|&r| domain_bottom(&family.domain(metric, region, r)?).map(|(mu, _)| mu))
        .collect::<Result<Vec<f64>>>()?;
    estimate_from_sequence(radii, &values)
}

pub fn estimate_from_sequence(radii: &[f64], values: &[f64]) -> Result<SpectralEstimate> {
    for (k, w) in values.windows(2).enumerate() {
        if w[1] > w[0] + 1e-12 * w[0].abs().max(1e-300) + 1e-15 {
            return Err(Error::NonMonotone(format!(
                "mu_1 rises from {} at R = {} to {} at R = {}",
                w[0],
                radii[k],
                w[1],
                radii[k + 1]
            )));
        }
    }
    let n = values.len();
    let hi = values[n - 1];
    let richardson = |i: usize, j: usize| {
        let (a, b) = (radii[i] * radii[i], radii[j] * radii[j]);
        if a == 0.0 && b == 0.0 {
            values[j]
        } else {
            (b * values[j] - a * values[i]) / (b - a)
        }
    };
    let (extrapolated, lo) = match n {
        1 => (hi, 0.0),
        2 => {
            let e = richardson(0, 1);
            (e, e - 2.0 * (hi - e).abs())
        }
        _ => {
            let e = richardson(n - 2, n - 1);
            let prev = richardson(n - 3, n - 2);
            (e, e - 2.0 * (e - prev).abs())
        }
    };
    let lo = lo.clamp(0.0, hi);
    Ok(SpectralEstimate {
        radii: radii.to_vec(),
        values: values.to_vec(),
        extrapolated: extrapolated.clamp(0.0, hi),
        interval: [lo, hi],
        lower_is_estimate: n > 1 && lo < hi,
    })
}
