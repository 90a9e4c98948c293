//! Resolvent kernels, harmonic Dirichlet problems, barriers and
//! parabolicity of ends.

use std::collections::HashMap;

use serde::Serialize;

use crate::decay::{
    a_mu, decay_slope, ls_slope, vanishing_trend, verify_decay, DecayProblem, DecayReport, Verdict,
};
use crate::domain::{CellDomain, CellFunction, Side};
use crate::error::{Error, Result};
use crate::family::{FamilyKind, GraphFamily, Region};
use crate::linalg::solve_spd;
use crate::metric::{Metric, MetricKind};
use crate::operators::{spectral_bottom_estimate, SpectralEstimate};

/// Relative residual accepted for the resolvent equation.
pub const RESOLVENT_RESIDUAL: f64 = 1e-10;

/// Solves the per-vertex system `(alpha m + D - W) u = b` on the cells,
/// where `b` is given per vertex.
fn solve_cells(domain: &CellDomain, alpha: f64, b: &[f64]) -> Result<Vec<f64>> {
    let sqrt_c: Vec<f64> = domain.cells().iter().map(|c| c.count.sqrt()).collect();
    let rhs: Vec<f64> = b.iter().zip(&sqrt_c).map(|(b, s)| b * s).collect();
    let y = solve_spd(&domain.operator(alpha), &rhs)?;
    Ok(y.iter().zip(&sqrt_c).map(|(y, s)| y / s).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelRow {
    pub id: String,
    pub r: f64,
    pub g: f64,
    pub bracket: f64,
}

/// `g_{alpha,R}(x_0, .)` on the cells of `B_R`.
#[derive(Debug, Clone, Serialize)]
pub struct ResolventKernel {
    pub alpha: f64,
    pub radius: f64,
    pub rows: Vec<KernelRow>,
    /// Largest relative residual of `(alpha - Delta) g = delta_{x0} / m_{x0}`.
    pub residual: f64,
}

impl ResolventKernel {
    pub fn value(&self, id: &str) -> Option<f64> {
        self.rows.iter().find(|r| r.id == id).map(|r| r.g)
    }
}

fn root_domain(family: &GraphFamily, metric: &Metric, radius: f64) -> Result<(CellDomain, usize)> {
    let domain = family.domain(metric, &Region::Whole, radius)?;
    let root = domain
        .cell_index(family.root())
        .ok_or_else(|| Error::UnknownVertex(family.root().to_string()))?;
    Ok((domain, root))
}

/// Dirichlet resolvent on `B_R`: `(alpha M + D - W) g = e_{x0}`.
pub fn resolvent_truncated(family: &GraphFamily, metric: &Metric, alpha: f64, radius: f64) -> Result<ResolventKernel> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
    }
    let (domain, root) = root_domain(family, metric, radius)?;
    if alpha == 0.0 && domain.boundary().is_empty() {
        return Err(Error::Precondition(
            "the truncation has no boundary, so the Green kernel does not exist".into(),
        ));
    }
    let mut b = vec![0.0; domain.len()];
    b[root] = 1.0;
    let g = solve_cells(&domain, alpha, &b)?;
    let gf = CellFunction {
        cells: g.clone(),
        boundary: vec![0.0; domain.boundary().len()],
    };
    let m_root = domain.cell(root).mass;
    let mut residual: f64 = 0.0;
    for i in 0..domain.len() {
        let target = if i == root { 1.0 / m_root } else { 0.0 };
        let lhs = alpha * g[i] - domain.laplacian(&gf, i);
        residual = residual.max((lhs - target).abs() * m_root);
    }
    if !(residual <= RESOLVENT_RESIDUAL) {
        return Err(Error::NonConvergence(format!(
            "resolvent residual {residual} exceeds {RESOLVENT_RESIDUAL}"
        )));
    }
    Ok(ResolventKernel {
        alpha,
        radius,
        rows: domain
            .cells()
            .iter()
            .zip(&g)
            .map(|(c, &v)| KernelRow {
                id: c.label.clone(),
                r: c.r,
                g: v,
                bracket: 0.0,
            })
            .collect(),
        residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventLimit {
    pub kernel: ResolventKernel,
    pub schedule: Vec<f64>,
    /// Largest relative increment on the window `r <= R_1` between
    /// consecutive truncations.
    pub increments: Vec<f64>,
    pub converged: bool,
    pub mu1: Option<SpectralEstimate>,
}

/// Limit of `g_{alpha,R}` along a truncation schedule. For `alpha = 0` the
/// spectrum must be bounded away from zero.
pub fn resolvent(family: &GraphFamily, metric: &Metric, alpha: f64, tol: f64, schedule: &[f64]) -> Result<ResolventLimit> {
    check_schedule(schedule)?;
    let mut mu1 = None;
    if alpha == 0.0 {
        if family.is_finite() {
            return Err(Error::Precondition(
                "finite graphs are parabolic; use alpha > 0".into(),
            ));
        }
        let est = spectral_bottom_estimate(family, metric, &Region::Whole, schedule)?;
        if est.conservative() <= 0.0 {
            return Err(Error::Precondition(
                "no evidence that the bottom of the spectrum is positive".into(),
            ));
        }
        mu1 = Some(est);
    }
    let window = schedule[0];
    let kernels = schedule
        .iter()
        .map(|&r| resolvent_truncated(family, metric, alpha, r))
        .collect::<Result<Vec<_>>>()?;
    let windowed = |k: &ResolventKernel| -> HashMap<String, f64> {
        k.rows
            .iter()
            .filter(|row| crate::domain::at_most(row.r, window))
            .map(|row| (row.id.clone(), row.g))
            .collect()
    };
    let maps: Vec<HashMap<String, f64>> = kernels.iter().map(windowed).collect();
    let mut increments = Vec::new();
    for w in maps.windows(2) {
        let mut inc: f64 = 0.0;
        for (id, &v0) in &w[0] {
            let v1 = w[1].get(id).copied().unwrap_or(0.0);
            if v1 + 1e-15 * v1.abs() < v0 {
                return Err(Error::NonMonotone(format!(
                    "g_R at `{id}` decreases from {v0} to {v1}"
                )));
            }
            inc = inc.max((v1 - v0).abs() / v1.abs().max(f64::MIN_POSITIVE));
        }
        increments.push(inc);
    }
    let converged = increments.last().is_none_or(|&i| i < tol);
    let mut kernel = kernels.last().expect("nonempty schedule").clone();
    if maps.len() >= 3 {
        let n = maps.len();
        for row in kernel.rows.iter_mut() {
            if let (Some(a), Some(b)) = (maps[n - 3].get(&row.id), maps[n - 2].get(&row.id)) {
                row.bracket = aitken_gap(*a, *b, row.g);
            }
        }
    }
    Ok(ResolventLimit {
        kernel,
        schedule: schedule.to_vec(),
        increments,
        converged,
        mu1,
    })
}

/// Distance from the last term to the geometric extrapolation of a
/// monotone sequence.
fn aitken_gap(a: f64, b: f64, c: f64) -> f64 {
    let (d1, d2) = (b - a, c - b);
    if d1 > 0.0 && d2 >= 0.0 && d2 < d1 {
        let q = d2 / d1;
        d2 * q / (1.0 - q)
    } else {
        0.0
    }
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() {
        return Err(Error::InvalidParameter("empty radius schedule".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("schedules must increase strictly".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolventDecayReport {
    pub alpha: f64,
    pub a: f64,
    pub mu1_interval: [f64; 2],
    pub rows: Vec<SlopeRow>,
    pub slope_fit: Option<f64>,
    pub expected_slope: f64,
    /// `-log(b^2 / (N-1))` on regular trees.
    pub tree_slope: Option<f64>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Annulus sums `sum_{A_R^{R+3s}} g_alpha^2(x_0, .) m` and their log-slope
/// against `-2a`, `a = a_{-alpha}(mu_1)`.
pub fn verify_resolvent_decay(
    family: &GraphFamily,
    metric: &Metric,
    alpha: f64,
    radii: &[f64],
    spectral_schedule: &[f64],
    tol: f64,
) -> Result<ResolventDecayReport> {
    check_schedule(radii)?;
    let s = family.jump_size(metric)?;
    let est = spectral_bottom_estimate(family, metric, &Region::Whole, spectral_schedule)?;
    let tree_slope = match family.kind() {
        FamilyKind::RegularTree { n } => {
            let b = tree_oracle(*n, alpha)?.b;
            Some(-(b * b / (*n as f64 - 1.0)).ln())
        }
        _ => None,
    };
    let mut report = ResolventDecayReport {
        alpha,
        a: f64::NAN,
        mu1_interval: est.interval,
        rows: Vec::new(),
        slope_fit: None,
        expected_slope: f64::NAN,
        tree_slope,
        verdict: Verdict::Inconclusive,
        note: None,
    };
    let mu1 = est.conservative();
    if mu1 <= 0.0 {
        report.note = Some("the spectral interval touches 0".into());
        return Ok(report);
    }
    report.a = a_mu(mu1, -alpha, s, metric.kind())?.a;
    report.expected_slope = -2.0 * report.a;
    let r_max = radii[radii.len() - 1];
    let truncation = r_max + 3.0 * s + 40.0 * s;
    let (domain, root) = root_domain(family, metric, truncation)?;
    let mut b = vec![0.0; domain.len()];
    b[root] = 1.0;
    let g = solve_cells(&domain, alpha, &b)?;
    for &r in radii {
        let sum = domain.annulus_sum(r, r + 3.0 * s, |i| g[i] * g[i]);
        report.rows.push(SlopeRow { r, sum });
    }
    let pts: Vec<(f64, f64)> = report.rows.iter().map(|row| (row.r, row.sum)).collect();
    report.slope_fit = fit_all(&pts);
    report.verdict = match report.slope_fit {
        Some(slope) if slope <= report.expected_slope * (1.0 - tol) => Verdict::Pass,
        Some(_) => Verdict::Fail,
        None => Verdict::Inconclusive,
    };
    Ok(report)
}

fn fit_all(rows: &[(f64, f64)]) -> Option<f64> {
    if rows.iter().any(|(_, v)| *v <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|(r, _)| *r).collect();
    let ys: Vec<f64> = rows.iter().map(|(_, v)| v.ln()).collect();
    ls_slope(&xs, &ys)
}

/// Solves `Delta u = 0` on the cells with `u` fixed on the boundary nodes.
pub fn harmonic_dirichlet(domain: &CellDomain, boundary: &[f64]) -> Result<CellFunction> {
    if boundary.len() != domain.boundary().len() {
        return Err(Error::InvalidParameter("boundary data length mismatch".into()));
    }
    if domain.boundary().is_empty() {
        return Err(Error::Precondition("the domain has no boundary".into()));
    }
    let b: Vec<f64> = (0..domain.len())
        .map(|i| {
            domain
                .boundary_links(i)
                .iter()
                .map(|l| l.weight * boundary[l.node])
                .sum()
        })
        .collect();
    let cells = solve_cells(domain, 0.0, &b)?;
    Ok(CellFunction {
        cells,
        boundary: boundary.to_vec(),
    })
}

/// Boundary data on a domain: `data(label)` on inner nodes, zero outside.
pub fn inner_data(domain: &CellDomain, data: impl Fn(&str) -> Result<f64>) -> Result<Vec<f64>> {
    domain
        .boundary()
        .iter()
        .map(|b| match b.side {
            Side::Inner => data(&b.label),
            Side::Outer => Ok(0.0),
        })
        .collect()
}

/// `f_R` on `Pi_R`: harmonic, `data` on `dPi`, zero beyond `R`.
pub fn harmonic_on_region(
    family: &GraphFamily,
    metric: &Metric,
    region: &Region,
    radius: f64,
    data: &dyn Fn(&str) -> Result<f64>,
) -> Result<(CellDomain, CellFunction)> {
    let domain = family.domain(metric, region, radius)?;
    let bd = inner_data(&domain, data)?;
    let f = harmonic_dirichlet(&domain, &bd)?;
    Ok((domain, f))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parabolicity {
    Parabolic,
    NonParabolic,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierProbe {
    #[serde(rename = "R")]
    pub r: f64,
    /// Minimum of the final `f_R` over `Pi_{R/2}^{R/2+3s}`.
    pub min: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierFunction {
    pub schedule: Vec<f64>,
    pub rows: Vec<KernelRow>,
    pub increments: Vec<f64>,
    pub converged: bool,
    pub probes: Vec<BarrierProbe>,
    pub evidence: Parabolicity,
    pub thresholds: String,
    #[serde(skip)]
    pub domain: CellDomain,
    #[serde(skip)]
    pub values: CellFunction,
}

/// Monotone limit of `f_R` with `f_R = 1` on `dPi`.
pub fn barrier(family: &GraphFamily, metric: &Metric, region: &Region, tol: f64, schedule: &[f64]) -> Result<BarrierFunction> {
    check_schedule(schedule)?;
    let s = family.jump_size(metric)?;
    let one = |_: &str| Ok(1.0);
    let window = schedule[0];
    let solves = schedule
        .iter()
        .map(|&r| harmonic_on_region(family, metric, region, r, &one))
        .collect::<Result<Vec<_>>>()?;
    let mut increments = Vec::new();
    for w in solves.windows(2) {
        let (d0, f0) = &w[0];
        let (d1, f1) = &w[1];
        let mut inc: f64 = 0.0;
        for (i, c) in d0.cells().iter().enumerate() {
            let j = d1
                .cell_index(&c.label)
                .ok_or_else(|| Error::UnknownVertex(c.label.clone()))?;
            if f1.cells[j] + 1e-13 < f0.cells[i] {
                return Err(Error::NonMonotone(format!(
                    "f_R at `{}` decreases from {} to {}",
                    c.label, f0.cells[i], f1.cells[j]
                )));
            }
            if crate::domain::at_most(c.r, window) {
                inc = inc.max(f1.cells[j] - f0.cells[i]);
            }
        }
        increments.push(inc);
    }
    let converged = increments.last().is_none_or(|&i| i < tol);
    let (domain, values) = solves.last().cloned().expect("nonempty schedule");
    let probes: Vec<BarrierProbe> = schedule
        .iter()
        .map(|&r| {
            let lo = r / 2.0;
            let min = domain
                .cells()
                .iter()
                .zip(&values.cells)
                .filter(|(c, _)| crate::domain::within(c.r, lo, lo + 3.0 * s))
                .map(|(_, v)| *v)
                .fold(f64::INFINITY, f64::min);
            BarrierProbe { r, min }
        })
        .filter(|p| p.min.is_finite())
        .collect();
    let mins: Vec<f64> = probes.iter().map(|p| p.min).collect();
    let n = mins.len();
    let evidence = if n >= 3 && mins[n - 1] < 0.5 && mins[n - 3] > mins[n - 2] && mins[n - 2] > mins[n - 1] {
        Parabolicity::NonParabolic
    } else if n >= 1 && converged && mins.iter().all(|m| 1.0 - m < tol) {
        Parabolicity::Parabolic
    } else {
        Parabolicity::Inconclusive
    };
    Ok(BarrierFunction {
        schedule: schedule.to_vec(),
        rows: domain
            .cells()
            .iter()
            .zip(&values.cells)
            .map(|(c, &v)| KernelRow {
                id: c.label.clone(),
                r: c.r,
                g: v,
                bracket: 0.0,
            })
            .collect(),
        increments,
        converged,
        probes,
        evidence,
        thresholds: format!(
            "non-parabolic: probe minimum below 0.5 and decreasing over the last three radii; \
             parabolic: converged and every probe within {tol} of 1"
        ),
        domain,
        values,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub name: String,
    pub verdict: Parabolicity,
    pub detail: String,
    pub values: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub verdict: Parabolicity,
    pub a: Option<f64>,
    pub mu1_interval: [f64; 2],
    pub criteria: Vec<Criterion>,
}

impl Classification {
    pub fn agreeing(&self) -> usize {
        self.criteria.iter().filter(|c| c.verdict == self.verdict).count()
    }
}

/// Parabolicity of an infinite region from volume growth, weighted annulus
/// sums and the barrier, with `a = a_0(mu_1(Pi))` taken conservatively.
pub fn classify_parabolic(
    family: &GraphFamily,
    metric: &Metric,
    region: &Region,
    radii: &[f64],
    spectral_schedule: &[f64],
    tol: f64,
) -> Result<Classification> {
    check_schedule(radii)?;
    if family.is_finite() {
        return Err(Error::Precondition("finite graphs have no ends".into()));
    }
    let s = family.jump_size(metric)?;
    let est = spectral_bottom_estimate(family, metric, region, spectral_schedule)?;
    let mu1 = est.conservative();
    let r_max = radii[radii.len() - 1];
    let domain = family.domain(metric, region, r_max + 3.0 * s + s)?;
    let unit = |_: usize| 1.0;
    let volumes: Vec<[f64; 2]> = radii
        .iter()
        .map(|&r| [r, domain.annulus_sum(r, r + 3.0 * s, unit)])
        .collect();
    let mut criteria = Vec::new();

    let masses: Vec<f64> = volumes.iter().map(|v| v[1]).collect();
    let n = masses.len();
    let total = if vanishing_trend(&masses) {
        Parabolicity::Parabolic
    } else if n >= 3 && masses[n - 3] <= masses[n - 2] && masses[n - 2] <= masses[n - 1] {
        Parabolicity::NonParabolic
    } else {
        Parabolicity::Inconclusive
    };
    criteria.push(Criterion {
        name: "total-volume".into(),
        verdict: total,
        detail: "finite volume iff annulus masses |Pi_R^{R+3s}| vanish along the samples".into(),
        values: volumes.clone(),
    });

    let a = if mu1 > 0.0 {
        Some(a_mu(mu1, 0.0, s, metric.kind())?.a)
    } else {
        None
    };
    if let Some(a) = a {
        let pts: Vec<(f64, f64)> = volumes.iter().map(|v| (v[0], v[1])).collect();
        let slope = fit_all(&pts);
        let verdict = match slope {
            Some(sl) if sl >= 2.0 * a * (1.0 - 0.05) => Parabolicity::NonParabolic,
            Some(sl) if sl <= -2.0 * a * (1.0 - 0.05) => Parabolicity::Parabolic,
            _ => Parabolicity::Inconclusive,
        };
        criteria.push(Criterion {
            name: "volume-growth-rate".into(),
            verdict,
            detail: format!(
                "log-slope of annulus masses {} against +-2a = +-{}",
                slope.map_or("undefined".into(), |v| v.to_string()),
                2.0 * a
            ),
            values: volumes.clone(),
        });
        let weighted: Vec<[f64; 2]> = radii
            .iter()
            .map(|&r| {
                [
                    r,
                    domain.annulus_sum(r, r + 3.0 * s, |i| (-2.0 * a * domain.cell(i).r).exp()),
                ]
            })
            .collect();
        let w: Vec<f64> = weighted.iter().map(|v| v[1]).collect();
        let verdict = if vanishing_trend(&w) {
            Parabolicity::Parabolic
        } else if w[w.len() - 1] >= 0.5 * w[0] && w[0] > 0.0 {
            Parabolicity::NonParabolic
        } else {
            Parabolicity::Inconclusive
        };
        criteria.push(Criterion {
            name: "weighted-annulus".into(),
            verdict,
            detail: "sum of e^{-2ar} m over annuli: vanishing vs bounded below by half its first value"
                .into(),
            values: weighted,
        });
    }

    let schedule: Vec<f64> = radii.iter().map(|&r| 2.0 * r).collect();
    let bar = barrier(family, metric, region, tol, &schedule)?;
    criteria.push(Criterion {
        name: "barrier".into(),
        verdict: bar.evidence,
        detail: bar.thresholds.clone(),
        values: bar.probes.iter().map(|p| [p.r, p.min]).collect(),
    });

    let decisive: Vec<Parabolicity> = criteria
        .iter()
        .map(|c| c.verdict)
        .filter(|v| *v != Parabolicity::Inconclusive)
        .collect();
    let verdict = if a.is_none() || decisive.len() < 2 || decisive.iter().any(|v| *v != decisive[0]) {
        Parabolicity::Inconclusive
    } else {
        decisive[0]
    };
    Ok(Classification {
        verdict,
        a,
        mu1_interval: est.interval,
        criteria,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HarmonicDecay {
    pub increments: Vec<f64>,
    pub report: DecayReport,
}

/// Decay of `|f|` for the harmonic limit `f = lim f_R` with boundary data
/// on `dPi`, checked against the decay estimate with `mu = 0`.
#[allow(clippy::too_many_arguments)]
pub fn harmonic_limit_decay(
    family: &GraphFamily,
    metric: &Metric,
    region: &Region,
    data: &dyn Fn(&str) -> Result<f64>,
    schedule: &[f64],
    spectral_schedule: &[f64],
    r0: f64,
    radii: &[f64],
    tol: f64,
) -> Result<HarmonicDecay> {
    check_schedule(schedule)?;
    let solves = schedule
        .iter()
        .map(|&r| harmonic_on_region(family, metric, region, r, data))
        .collect::<Result<Vec<_>>>()?;
    let scale = solves[0]
        .1
        .boundary
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let window = schedule[0];
    let mut increments = Vec::new();
    for w in solves.windows(2) {
        let (d0, f0) = &w[0];
        let (d1, f1) = &w[1];
        let mut inc: f64 = 0.0;
        for (i, c) in d0.cells().iter().enumerate() {
            if !crate::domain::at_most(c.r, window) {
                continue;
            }
            let j = d1
                .cell_index(&c.label)
                .ok_or_else(|| Error::UnknownVertex(c.label.clone()))?;
            inc = inc.max((f1.cells[j] - f0.cells[i]).abs() / scale);
        }
        increments.push(inc);
    }
    if increments.last().is_some_and(|&i| i >= tol) {
        return Err(Error::Precondition(format!(
            "f_R has not converged: last increment {} >= {tol}",
            increments.last().unwrap()
        )));
    }
    let est = spectral_bottom_estimate(family, metric, region, spectral_schedule)?;
    let (domain, f) = solves.last().expect("nonempty schedule");
    let abs = f.map(f64::abs);
    let report = verify_decay(&DecayProblem {
        domain,
        f: &abs,
        mu: 0.0,
        r0,
        radii,
        l_seq: &[],
        mu1: &est,
        s: family.jump_size(metric)?,
        kind: metric.kind(),
    })?;
    Ok(HarmonicDecay { increments, report })
}

/// Closed forms on the regular tree `T_N`.
#[derive(Debug, Clone, Serialize)]
pub struct TreeClosedForm {
    #[serde(rename = "N")]
    pub n: usize,
    pub alpha: f64,
    pub mu1: f64,
    pub b: f64,
    /// `g_alpha(x_0, x) = g0 * b^{-n}` at depth `n`.
    pub g0: f64,
    /// `a_{-alpha}(mu_1)` for the combinatorial distance.
    pub a: f64,
    pub entropy: f64,
    /// `|b + (N-1)/b - (alpha+1)N|`.
    pub b_identity_residual: f64,
}

impl TreeClosedForm {
    pub fn g(&self, depth: usize) -> f64 {
        self.g0 * self.b.powi(-(depth as i32))
    }
}

pub fn tree_oracle(n: usize, alpha: f64) -> Result<TreeClosedForm> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("tree degree N = {n} < 3")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
    }
    let nf = n as f64;
    let mu1 = 1.0 - 2.0 * (nf - 1.0).sqrt() / nf;
    let p = (alpha + 1.0) * nf;
    let b = 0.5 * (p + (p * p - 4.0 * nf + 4.0).sqrt());
    Ok(TreeClosedForm {
        n,
        alpha,
        mu1,
        b,
        g0: 1.0 / (nf * (alpha + 1.0 - 1.0 / b)),
        a: a_mu(mu1, -alpha, 1.0, MetricKind::Combinatorial)?.a,
        entropy: (nf - 1.0).ln(),
        b_identity_residual: (b + (nf - 1.0) / b - p).abs(),
    })
}

/// Log-slope of the largest six annulus sums, exported for reports.
pub fn tail_slope(rows: &[(f64, f64)]) -> Option<f64> {
    decay_slope(rows)
}
