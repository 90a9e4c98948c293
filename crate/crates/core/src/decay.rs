//! Decay rates, cut-off test functions, edgewise gradient bounds and the
//! l2 decay estimate for nonnegative `mu`-subharmonic functions on ends.

use serde::Serialize;

use crate::domain::{CellDomain, CellFunction, Endpoint, Side};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::metric::{lipschitz_constant, LipschitzScope, Metric, MetricKind};
use crate::operators::{domain_defect, SpectralEstimate};

/// Relative slack allowed when comparing floating-point inequalities.
pub const INEQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRate {
    pub mu: f64,
    pub t: f64,
    pub s: f64,
    pub kind: MetricKind,
    pub a: f64,
}

/// The decay rate `a_mu(t)`.
///
/// For a general intrinsic metric `a = log(1 + s sqrt(2(t - mu))) / s`; for
/// the combinatorial distance
/// `a = log((1-mu)/(1-t)) + log(1 + sqrt(1 - ((1-t)/(1-mu))^2))`.
pub fn a_mu(t: f64, mu: f64, s: f64, kind: MetricKind) -> Result<DecayRate> {
    if !(t.is_finite() && mu.is_finite()) {
        return Err(Error::OutOfDomain(format!("t = {t}, mu = {mu}")));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::InvalidParameter(format!("jump size s = {s}")));
    }
    if t <= mu {
        return Err(Error::OutOfDomain(format!("need t > mu, got t = {t}, mu = {mu}")));
    }
    let a = match kind {
        MetricKind::PathLength => (s * (2.0 * (t - mu)).sqrt()).ln_1p() / s,
        MetricKind::Combinatorial => {
            if s != 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "the combinatorial distance has jump size 1, got {s}"
                )));
            }
            if t >= 1.0 {
                return Err(Error::OutOfDomain(format!("need t < 1, got {t}")));
            }
            let ratio = (1.0 - t) / (1.0 - mu);
            -ratio.ln() + (1.0 - ratio * ratio).sqrt().ln_1p()
        }
    };
    Ok(DecayRate { mu, t, s, kind, a })
}

/// Left side of the defining identity of `a`: `(e^{as}-1)^2/(2s^2)` or
/// `(e^a-1)^2/(1+e^{2a})`.
pub fn rate_identity(a: f64, s: f64, kind: MetricKind) -> f64 {
    match kind {
        MetricKind::PathLength => (a * s).exp_m1().powi(2) / (2.0 * s * s),
        MetricKind::Combinatorial => a0_inverse_unchecked(a),
    }
}

/// Right side of the defining identity: `t - mu` or `(t - mu)/(1 - mu)`.
pub fn rate_target(t: f64, mu: f64, kind: MetricKind) -> f64 {
    match kind {
        MetricKind::PathLength => t - mu,
        MetricKind::Combinatorial => (t - mu) / (1.0 - mu),
    }
}

fn a0_inverse_unchecked(x: f64) -> f64 {
    // (e^x - 1)^2 / (1 + e^{2x}) rewritten in e^{-x} to avoid overflow.
    let e = (-x).exp();
    (-(-x).exp_m1()).powi(2) / (1.0 + e * e)
}

/// `a_0^{-1}(x) = (e^x - 1)^2 / (1 + e^{2x})` for the combinatorial distance.
pub fn a0_inverse(x: f64) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::OutOfDomain(format!("need x > 0, got {x}")));
    }
    Ok(a0_inverse_unchecked(x))
}

/// Inverse of `t -> a_mu(t)` by bisection; works for both kinds.
pub fn a_inverse(x: f64, mu: f64, s: f64, kind: MetricKind) -> Result<f64> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::OutOfDomain(format!("need x > 0, got {x}")));
    }
    let rate = |t: f64| a_mu(t, mu, s, kind).map(|r| r.a);
    let mut lo = mu;
    let mut hi = match kind {
        MetricKind::Combinatorial => 1.0,
        MetricKind::PathLength => {
            let mut step = 1.0;
            while rate(mu + step)? < x {
                step *= 2.0;
                if !step.is_finite() {
                    return Err(Error::NonConvergence("inverse rate bracket".into()));
                }
            }
            mu + step
        }
    };
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if rate(mid)? < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `q(a) = (e^a - 1)^2 / (e^{2a} + 1)`.
pub fn q_factor(a: f64) -> f64 {
    a0_inverse_unchecked(a)
}

/// The radial cut-off `phi` and weight `h` of the decay argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffPair {
    pub r0: f64,
    pub r: f64,
    pub l: f64,
    pub s: f64,
    pub a: f64,
}

pub fn build_cutoffs(r0: f64, r: f64, l: f64, s: f64, a: f64) -> Result<CutoffPair> {
    if !(s > 0.0 && a > 0.0 && s.is_finite() && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("s = {s}, a = {a}")));
    }
    let eps = 1e-12 * (r0.abs() + r.abs() + l.abs() + s);
    if r < r0 + 3.0 * s - eps || l < r + 3.0 * s - eps {
        return Err(Error::InvalidParameter(format!(
            "cut-off radii need R >= R0 + 3s and L >= R + 3s, got R0 = {r0}, R = {r}, L = {l}, s = {s}"
        )));
    }
    Ok(CutoffPair { r0, r, l, s, a })
}

impl CutoffPair {
    /// Rises from 0 to 1 on `[R0+s, R0+2s]`, falls back on `[L+s, L+2s]`.
    pub fn phi(&self, t: f64) -> f64 {
        let (r0, l, s) = (self.r0, self.l, self.s);
        if t <= r0 + s {
            0.0
        } else if t <= r0 + 2.0 * s {
            (t - r0 - s) / s
        } else if t <= l + s {
            1.0
        } else if t <= l + 2.0 * s {
            (l + 2.0 * s - t) / s
        } else {
            0.0
        }
    }

    /// Slope `a` up to `R-s`, flat until `R+4s`, slope `-a` after.
    pub fn h(&self, t: f64) -> f64 {
        let (r, s, a) = (self.r, self.s, self.a);
        if t <= r - s {
            a * t
        } else if t <= r + 4.0 * s {
            a * (r - s)
        } else {
            -a * t + 2.0 * a * r + 3.0 * a * s
        }
    }

    /// Radial lifts onto a domain; `phi` vanishes on the inner boundary,
    /// which lies outside the end.
    pub fn lift(&self, domain: &CellDomain) -> (CellFunction, CellFunction) {
        let mut phi = CellFunction::radial(domain, |t| self.phi(t));
        for (v, node) in phi.boundary.iter_mut().zip(domain.boundary()) {
            if node.side == Side::Inner {
                *v = 0.0;
            }
        }
        (phi, CellFunction::radial(domain, |t| self.h(t)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeViolation {
    pub from: String,
    pub to: String,
    /// `min` for the jump-size bound, `sum` for the combinatorial bound.
    pub bound: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

fn edge_check(
    hx: f64,
    hy: f64,
    rho: f64,
    a: f64,
    s: f64,
    combinatorial: bool,
    mut report: impl FnMut(&'static str, f64, f64),
) {
    // (e^{h(y)} - e^{h(x)})^2 without cancellation.
    let lhs = (2.0 * hx.min(hy)).exp() * (hy - hx).abs().exp_m1().powi(2);
    let min_bound = (a * s).exp_m1().powi(2) / (s * s) * (2.0 * hx.min(hy)).exp() * rho * rho;
    if lhs > min_bound * (1.0 + INEQ_TOL) + f64::MIN_POSITIVE {
        report("min", lhs, min_bound);
    }
    if combinatorial {
        let sum_bound = q_factor(a) * ((2.0 * hx).exp() + (2.0 * hy).exp());
        if lhs > sum_bound * (1.0 + INEQ_TOL) + f64::MIN_POSITIVE {
            report("sum", lhs, sum_bound);
        }
    }
}

/// Checks `|grad e^h|^2 <= ((e^{as}-1)^2/s^2) min(e^{2h(x)}, e^{2h(y)}) rho^2`
/// on every edge and, for the combinatorial distance,
/// `|grad e^h|^2 <= q(a)(e^{2h(x)} + e^{2h(y)})`.
pub fn exp_gradient_bounds(
    g: &WeightedGraph,
    metric: &Metric,
    h: &[f64],
    a: f64,
    s: f64,
) -> Result<Vec<EdgeViolation>> {
    let lip = lipschitz_constant(g, metric, h, LipschitzScope::Edges)?;
    if !lip.zero_distance_pairs.is_empty() || lip.constant > a * (1.0 + INEQ_TOL) {
        return Err(Error::Precondition(format!(
            "Lipschitz constant {} exceeds a = {a}",
            lip.constant
        )));
    }
    let combinatorial = metric.kind() == MetricKind::Combinatorial;
    let mut out = Vec::new();
    for (x, y, _) in g.edges() {
        let rho = metric.edge_length(g, x, y)?;
        if rho > s * (1.0 + INEQ_TOL) {
            return Err(Error::Precondition(format!("edge length {rho} exceeds s = {s}")));
        }
        edge_check(h[x], h[y], rho, a, s, combinatorial, |bound, lhs, rhs| {
            out.push(EdgeViolation {
                from: g.id(x).to_string(),
                to: g.id(y).to_string(),
                bound,
                lhs,
                rhs,
            })
        });
    }
    Ok(out)
}

/// [`exp_gradient_bounds`] over the edges of a cell domain.
pub fn domain_exp_gradient_bounds(
    domain: &CellDomain,
    h: &CellFunction,
    a: f64,
    s: f64,
    kind: MetricKind,
) -> Result<Vec<EdgeViolation>> {
    let label = |e: Endpoint| match e {
        Endpoint::Cell(i) => domain.cell(i).label.clone(),
        Endpoint::Boundary(b) => domain.boundary()[b].label.clone(),
    };
    let mut out = Vec::new();
    for (i, e, _, rho) in domain.edges() {
        let (hx, hy) = (h.cells[i], h.at(e));
        if rho > s * (1.0 + INEQ_TOL) {
            return Err(Error::Precondition(format!("edge length {rho} exceeds s = {s}")));
        }
        if (hx - hy).abs() > a * rho * (1.0 + INEQ_TOL) + f64::MIN_POSITIVE {
            return Err(Error::Precondition(format!(
                "Lipschitz bound a = {a} fails on an edge of length {rho}"
            )));
        }
        edge_check(hx, hy, rho, a, s, kind == MetricKind::Combinatorial, |bound, lhs, rhs| {
            out.push(EdgeViolation {
                from: domain.cell(i).label.clone(),
                to: label(e),
                bound,
                lhs,
                rhs,
            })
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    PreconditionFailed,
    HypothesisNotMet,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisRow {
    #[serde(rename = "L")]
    pub l: f64,
    pub sum: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub a: f64,
    pub mu1_interval: [f64; 2],
    #[serde(rename = "C")]
    pub c: f64,
    pub rows: Vec<DecayRow>,
    pub verdict: Verdict,
    /// Least-squares slope of `log lhs` against `R` over the largest six radii.
    pub slope_fit: Option<f64>,
    /// `sum_{Pi_L^{L+3s}} f^2 e^{-2ar} m` along the `L` sequence.
    pub hypothesis: Vec<HypothesisRow>,
    pub hypothesis_vanishing: bool,
    pub precondition: Option<String>,
}

/// Inputs of [`verify_decay`]. The domain is `Pi_{R_max}` with its
/// boundary layer and must reach `max(radii, L) + 3s`.
#[derive(Debug, Clone, Copy)]
pub struct DecayProblem<'a> {
    pub domain: &'a CellDomain,
    pub f: &'a CellFunction,
    pub mu: f64,
    pub r0: f64,
    pub radii: &'a [f64],
    pub l_seq: &'a [f64],
    pub mu1: &'a SpectralEstimate,
    pub s: f64,
    pub kind: MetricKind,
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len();
    if n < 2 {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Some(sxy / sxx)
}

/// Slope of `log lhs` over the largest six radii with positive sums.
pub fn decay_slope(rows: &[(f64, f64)]) -> Option<f64> {
    let tail: Vec<&(f64, f64)> = rows.iter().rev().take(6).collect();
    if tail.iter().any(|(_, v)| *v <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = tail.iter().map(|(r, _)| *r).collect();
    let ys: Vec<f64> = tail.iter().map(|(_, v)| v.ln()).collect();
    ls_slope(&xs, &ys)
}

/// Whether a sampled sequence looks like it tends to zero: strictly
/// decreasing over the last three samples and at most 1% of its maximum.
pub fn vanishing_trend(values: &[f64]) -> bool {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return !values.is_empty();
    }
    let n = values.len();
    n >= 3
        && values[n - 3] > values[n - 2]
        && values[n - 2] > values[n - 1]
        && values[n - 1] <= 1e-2 * max
}

/// Checks `sum_{Pi_R^{R+3s}} f^2 m <= C e^{-2aR} sum_{Pi_{R0}^{R0+3s}} f^2 e^{2ar} m`
/// with `C = 7 e^{10as} / (s^2 (mu_1 - mu))` and `a = a_mu(mu_1)`, using the
/// conservative end of the `mu_1` interval.
pub fn verify_decay(p: &DecayProblem) -> Result<DecayReport> {
    if p.radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius schedule".into()));
    }
    let s = p.s;
    let mu1 = p.mu1.conservative();
    let mut report = DecayReport {
        a: f64::NAN,
        mu1_interval: p.mu1.interval,
        c: f64::NAN,
        rows: Vec::new(),
        verdict: Verdict::PreconditionFailed,
        slope_fit: None,
        hypothesis: Vec::new(),
        hypothesis_vanishing: false,
        precondition: None,
    };
    let fail = |mut r: DecayReport, why: String| {
        r.precondition = Some(why);
        Ok(r)
    };
    if !p.domain.is_intrinsic() {
        return fail(report, "the metric is not intrinsic on the domain".into());
    }
    let defect = match domain_defect(p.domain, p.f, p.mu) {
        Ok(d) => d,
        Err(e) => return fail(report, e.to_string()),
    };
    let scale = p.f.cells.iter().chain(&p.f.boundary).fold(0.0f64, |m, v| m.max(v.abs()));
    if defect.min < -1e-10 * scale.max(1.0) {
        return fail(
            report,
            format!(
                "Delta f + mu f = {} < 0 at `{}`",
                defect.min, defect.witness
            ),
        );
    }
    if let Some(rb) = p.domain.inner_boundary_radius() {
        if p.r0 < rb - 1e-12 {
            return fail(report, format!("R0 = {} is below max r on the end boundary = {rb}", p.r0));
        }
    }
    if p.radii.iter().any(|&r| r < p.r0 + 3.0 * s - 1e-12) {
        return fail(report, format!("radii must be at least R0 + 3s = {}", p.r0 + 3.0 * s));
    }
    let reach = p
        .radii
        .iter()
        .chain(p.l_seq)
        .fold(f64::NEG_INFINITY, |m, &r| m.max(r))
        + 3.0 * s;
    let outer_r = p
        .domain
        .boundary()
        .iter()
        .filter(|b| b.side == Side::Outer)
        .map(|b| b.r)
        .fold(f64::INFINITY, f64::min);
    if outer_r <= reach + 1e-12 {
        return fail(report, format!("the domain must extend beyond R + 3s = {reach}"));
    }
    if mu1 <= p.mu {
        return fail(
            report,
            format!("the conservative mu_1 = {mu1} does not exceed mu = {}", p.mu),
        );
    }
    let rate = match a_mu(mu1, p.mu, s, p.kind) {
        Ok(r) => r,
        Err(e) => return fail(report, e.to_string()),
    };
    let a = rate.a;
    let c = 7.0 * (10.0 * a * s).exp() / (s * s * (mu1 - p.mu));
    report.a = a;
    report.c = c;

    let f2 = |i: usize| p.f.cells[i] * p.f.cells[i];
    let r_of = |i: usize| p.domain.cell(i).r;
    let base = p
        .domain
        .annulus_sum(p.r0, p.r0 + 3.0 * s, |i| f2(i) * (2.0 * a * r_of(i)).exp());
    let mut pass = true;
    let mut samples = Vec::new();
    for &r in p.radii {
        let lhs = p.domain.annulus_sum(r, r + 3.0 * s, f2);
        let rhs = c * (-2.0 * a * r).exp() * base;
        pass &= lhs <= rhs * (1.0 + INEQ_TOL);
        samples.push((r, lhs));
        report.rows.push(DecayRow {
            r,
            lhs,
            rhs,
            ratio: if rhs > 0.0 { lhs / rhs } else if lhs == 0.0 { 0.0 } else { f64::INFINITY },
        });
    }
    report.slope_fit = decay_slope(&samples);

    let l_seq = if p.l_seq.is_empty() { p.radii } else { p.l_seq };
    for &l in l_seq {
        let sum = p
            .domain
            .annulus_sum(l, l + 3.0 * s, |i| f2(i) * (-2.0 * a * r_of(i)).exp());
        report.hypothesis.push(HypothesisRow { l, sum });
    }
    let sums: Vec<f64> = report.hypothesis.iter().map(|h| h.sum).collect();
    report.hypothesis_vanishing = vanishing_trend(&sums);
    report.verdict = if !report.hypothesis_vanishing {
        Verdict::HypothesisNotMet
    } else if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionRow {
    #[serde(rename = "R")]
    pub r: f64,
    /// `sum_{Pi_R^{R+3s}} f^2 e^{-2ar} m`.
    pub annulus: f64,
    /// `sum_{Pi_R} f^2 e^{-2ar} m`.
    pub ball: f64,
    /// Whether the annulus sum reaches a new minimum at this radius.
    pub new_low: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecayCondition {
    pub rows: Vec<ConditionRow>,
    /// Annulus sums tend to zero along the samples.
    pub subsequence_vanishing: bool,
    /// `ball / R` strictly decreasing over the last three samples.
    pub o_r_trend: bool,
    /// Pigeonhole check: the smallest annulus sum over disjoint windows is
    /// at most the largest ball sum divided by the number of windows.
    pub consistent: bool,
}

pub fn decay_condition(domain: &CellDomain, f: &CellFunction, a: f64, s: f64, radii: &[f64]) -> Result<DecayCondition> {
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("radii must increase".into()));
    }
    let weight = |i: usize| f.cells[i] * f.cells[i] * (-2.0 * a * domain.cell(i).r).exp();
    let mut rows: Vec<ConditionRow> = Vec::new();
    let mut low = f64::INFINITY;
    for &r in radii {
        let annulus = domain.annulus_sum(r, r + 3.0 * s, weight);
        let ball = domain.annulus_sum(0.0, r, weight);
        let new_low = annulus < low;
        low = low.min(annulus);
        rows.push(ConditionRow {
            r,
            annulus,
            ball,
            new_low,
        });
    }
    let annuli: Vec<f64> = rows.iter().map(|r| r.annulus).collect();
    let n = rows.len();
    let per_r: Vec<f64> = rows.iter().map(|r| r.ball / r.r.max(f64::MIN_POSITIVE)).collect();
    let o_r_trend = n >= 3 && per_r[n - 3] > per_r[n - 2] && per_r[n - 2] > per_r[n - 1];
    // Greedy choice of pairwise disjoint windows [R, R+3s].
    let mut windows = Vec::new();
    let mut next_free = f64::NEG_INFINITY;
    for row in &rows {
        if row.r > next_free {
            windows.push(row.annulus);
            next_free = row.r + 3.0 * s;
        }
    }
    let total = domain.annulus_sum(0.0, f64::MAX, weight);
    let consistent = windows.is_empty()
        || windows.iter().copied().fold(f64::INFINITY, f64::min)
            <= total / windows.len() as f64 * (1.0 + INEQ_TOL);
    Ok(DecayCondition {
        rows,
        subsequence_vanishing: vanishing_trend(&annuli),
        o_r_trend,
        consistent,
    })
}

/// Sum of `f^2 m` over `[lo, hi]`, inclusive.
pub fn annulus_mass(domain: &CellDomain, f: &CellFunction, lo: f64, hi: f64) -> f64 {
    domain.annulus_sum(lo, hi, |i| f.cells[i] * f.cells[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn general_rate_at_half() {
        let r = a_mu(0.5, 0.0, 1.0, MetricKind::PathLength).unwrap();
        assert!((r.a - LN_2).abs() < 1e-15);
    }

    #[test]
    fn combinatorial_rate_on_tree() {
        let t = 1.0 - 2.0 * 2f64.sqrt() / 3.0;
        let r = a_mu(t, 0.0, 1.0, MetricKind::Combinatorial).unwrap();
        assert!((r.a - 0.5 * LN_2).abs() < 1e-14);
        assert!((a0_inverse(0.5 * LN_2).unwrap() - t).abs() < 1e-15);
    }

    #[test]
    fn rate_domain_errors() {
        assert!(a_mu(1.0, 0.0, 1.0, MetricKind::Combinatorial).is_err());
        assert!(a_mu(0.1, 0.2, 1.0, MetricKind::PathLength).is_err());
        assert!(a0_inverse(0.0).is_err());
    }

    #[test]
    fn bisection_inverse_matches_closed_form() {
        for &x in &[0.01, 0.3, 1.0, 3.0] {
            let t = a_inverse(x, 0.0, 1.0, MetricKind::Combinatorial).unwrap();
            assert!((t - a0_inverse(x).unwrap()).abs() < 1e-13);
        }
        let t = a_inverse(LN_2, 0.0, 1.0, MetricKind::PathLength).unwrap();
        assert!((t - 0.5).abs() < 1e-13);
    }

    #[test]
    fn cutoff_profiles() {
        let c = build_cutoffs(1.0, 4.0, 7.0, 1.0, 0.5).unwrap();
        assert_eq!(c.phi(2.5), 0.5);
        assert_eq!(c.phi(1.5), 0.0);
        assert_eq!(c.phi(8.5), 0.5);
        assert_eq!(c.phi(9.5), 0.0);
        assert_eq!(c.h(4.0), 0.5 * 3.0);
        assert_eq!(c.h(8.0), 0.5 * 3.0);
        assert_eq!(c.h(9.0), 0.5 * 2.0);
        assert!(build_cutoffs(1.0, 3.0, 7.0, 1.0, 0.5).is_err());
        assert!(build_cutoffs(1.0, 4.0, 6.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn vanishing_needs_a_decreasing_tail() {
        assert!(vanishing_trend(&[1.0, 0.1, 0.01, 0.001]));
        assert!(!vanishing_trend(&[1.0, 1.0, 1.0]));
        assert!(vanishing_trend(&[0.0, 0.0]));
    }
}
