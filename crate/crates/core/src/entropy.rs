//! Volume entropy and the entropy bound on the essential spectrum.

use serde::Serialize;

use crate::decay::{a0_inverse, a_inverse, a_mu, ls_slope, Verdict};
use crate::domain::CellDomain;
use crate::error::{Error, Result};
use crate::family::{FamilyKind, GraphFamily, Region};
use crate::metric::{Metric, MetricKind};
use crate::operators::spectral_bottom_estimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    InfiniteVolume,
    FiniteVolume,
}

#[derive(Debug, Clone, Serialize)]
pub struct EntropyEstimate {
    pub regime: Regime,
    /// `(R, |B_R|)` for infinite volume, `(R, |V \ B_R|)` otherwise.
    pub samples: Vec<[f64; 2]>,
    /// `(1/R) log |B_R|` or `-(1/R) log |V \ B_R|`.
    pub quotients: Vec<f64>,
    /// Running minima of the quotients over the last half of the schedule.
    pub running_min: Vec<f64>,
    pub liminf_proxy: Option<f64>,
    /// Least-squares slope of `log` mass over the last half of the schedule.
    pub slope_fit: Option<f64>,
    /// The slope fit; `None` stands for `+infinity` when the tail vanishes.
    pub estimate: Option<f64>,
    pub note: Option<String>,
}

fn regime(family: &GraphFamily) -> Regime {
    match family.kind() {
        FamilyKind::RegularTree { .. } => Regime::InfiniteVolume,
        FamilyKind::WeightedRay { beta, .. } if *beta < 1.0 => Regime::FiniteVolume,
        FamilyKind::WeightedRay { .. } => Regime::InfiniteVolume,
        FamilyKind::FiniteFile { .. } => Regime::FiniteVolume,
    }
}

fn check_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.is_empty() || schedule[0] <= 0.0 {
        return Err(Error::InvalidParameter("radius schedule must be positive and nonempty".into()));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("schedules must increase strictly".into()));
    }
    Ok(())
}

/// `|V \ B_R|` summed directly over a far truncation, for every `R`.
fn tails(family: &GraphFamily, metric: &Metric, schedule: &[f64]) -> Result<Vec<f64>> {
    let r_max = schedule[schedule.len() - 1];
    let sum_beyond = |d: &CellDomain, r: f64| -> f64 {
        // Smallest terms first.
        let mut terms: Vec<f64> = d
            .cells()
            .iter()
            .filter(|c| !crate::domain::at_most(c.r, r))
            .map(|c| c.count * c.mass)
            .collect();
        terms.sort_by(f64::total_cmp);
        terms.iter().sum()
    };
    if family.is_finite() {
        let d = family.domain(metric, &Region::Whole, f64::MAX / 4.0)?;
        return Ok(schedule.iter().map(|&r| sum_beyond(&d, r)).collect());
    }
    let mut far = 2.0 * r_max + 10.0;
    let mut prev = sum_beyond(&family.domain(metric, &Region::Whole, far)?, r_max);
    for _ in 0..12 {
        far *= 2.0;
        let d = family.domain(metric, &Region::Whole, far)?;
        let cur = sum_beyond(&d, r_max);
        if (cur - prev).abs() <= 1e-14 * cur {
            return Ok(schedule.iter().map(|&r| sum_beyond(&d, r)).collect());
        }
        prev = cur;
    }
    Err(Error::Precondition(
        "declared masses are not summable: the tail volume does not converge".into(),
    ))
}

pub fn volume_entropy(family: &GraphFamily, metric: &Metric, schedule: &[f64]) -> Result<EntropyEstimate> {
    check_schedule(schedule)?;
    let regime = regime(family);
    let masses: Vec<f64> = match regime {
        Regime::InfiniteVolume => schedule
            .iter()
            .map(|&r| Ok(family.domain(metric, &Region::Whole, r)?.volume()))
            .collect::<Result<_>>()?,
        Regime::FiniteVolume => tails(family, metric, schedule)?,
    };
    if regime == Regime::InfiniteVolume && masses.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::NonMonotone(
            "ball volumes must increase strictly along the schedule".into(),
        ));
    }
    let samples: Vec<[f64; 2]> = schedule.iter().zip(&masses).map(|(&r, &m)| [r, m]).collect();
    let sign = match regime {
        Regime::InfiniteVolume => 1.0,
        Regime::FiniteVolume => -1.0,
    };
    let positive: Vec<[f64; 2]> = samples.iter().copied().filter(|s| s[1] > 0.0).collect();
    let quotients: Vec<f64> = positive.iter().map(|s| sign * s[1].ln() / s[0]).collect();
    let half = quotients.len() / 2;
    let mut running_min = Vec::new();
    for q in &quotients[half..] {
        let m = running_min.last().map_or(*q, |p: &f64| p.min(*q));
        running_min.push(m);
    }
    let tail = &positive[half..];
    let slope_fit = if tail.len() >= 2 {
        let xs: Vec<f64> = tail.iter().map(|s| s[0]).collect();
        let ys: Vec<f64> = tail.iter().map(|s| sign * s[1].ln()).collect();
        ls_slope(&xs, &ys)
    } else {
        None
    };
    let exhausted = positive.len() < samples.len();
    let note = if exhausted {
        Some("the tail volume reaches 0 on the schedule, so the entropy is +infinity".into())
    } else {
        None
    };
    Ok(EntropyEstimate {
        regime,
        samples,
        quotients,
        liminf_proxy: running_min.last().copied().filter(|_| !exhausted),
        running_min,
        slope_fit,
        estimate: if exhausted { None } else { slope_fit },
        note,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub eps: f64,
    pub a: f64,
    /// Constant fitted on the first half of the samples.
    #[serde(rename = "C")]
    pub c: f64,
    /// Whether the second half obeys the growth (or tail) bound.
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BrooksReport {
    pub entropy: EntropyEstimate,
    /// `(R_0, lower end of mu_1(V \ B_{R_0}))`.
    pub mu_e_grid: Vec<[f64; 2]>,
    pub mu_e_evidence: f64,
    pub mu_e_upper: f64,
    /// `a^{-1}(entropy / 2)`.
    pub bound: Option<f64>,
    pub residual: Option<f64>,
    pub growth: Vec<GrowthRow>,
    /// `|mu_1 - a_0^{-1}(log(N-1)/2)|` from closed forms on regular trees.
    pub closed_form_residual: Option<f64>,
    pub verdict: Verdict,
    pub note: Option<String>,
}

/// Checks `mu_e <= a^{-1}(entropy/2)` and the volume growth (or tail decay)
/// at rate `2 a_0(mu_e - eps)`.
pub fn brooks_check(
    family: &GraphFamily,
    metric: &Metric,
    r0_grid: &[f64],
    spectral_schedule: &[f64],
    eps_grid: &[f64],
    schedule: &[f64],
    tol: f64,
) -> Result<BrooksReport> {
    if r0_grid.is_empty() {
        return Err(Error::InvalidParameter("empty R_0 grid".into()));
    }
    let s = family.jump_size(metric)?;
    let kind = metric.kind();
    let probe = family.domain(metric, &Region::Whole, 4.0 * s)?;
    if !probe.is_intrinsic() {
        return Err(Error::Precondition("the metric is not intrinsic".into()));
    }
    let entropy = volume_entropy(family, metric, schedule)?;
    let closed_form_residual = match family.kind() {
        FamilyKind::RegularTree { n } if kind == MetricKind::Combinatorial => {
            let nf = *n as f64;
            let mu = 1.0 - 2.0 * (nf - 1.0).sqrt() / nf;
            Some((mu - a0_inverse(0.5 * (nf - 1.0).ln())?).abs())
        }
        _ => None,
    };
    let mut mu_e_grid = Vec::new();
    let mut mu_e_upper = f64::INFINITY;
    for &r0 in r0_grid {
        let radii: Vec<f64> = spectral_schedule.iter().map(|&r| r0 + r).collect();
        let est = spectral_bottom_estimate(family, metric, &Region::Outside { r0 }, &radii)?;
        mu_e_grid.push([r0, est.conservative()]);
        mu_e_upper = mu_e_upper.min(est.interval[1]);
    }
    let mu_e = mu_e_grid.iter().map(|v| v[1]).fold(0.0, f64::max);
    let mut report = BrooksReport {
        entropy,
        mu_e_grid,
        mu_e_evidence: mu_e,
        mu_e_upper,
        bound: None,
        residual: None,
        growth: Vec::new(),
        closed_form_residual,
        verdict: Verdict::Inconclusive,
        note: None,
    };
    if mu_e <= 0.0 {
        report.note = Some("the evidence interval for mu_e contains 0".into());
        return Ok(report);
    }
    let Some(tau) = report.entropy.estimate else {
        report.note = Some("infinite entropy: the bound is vacuous".into());
        report.verdict = Verdict::Pass;
        return Ok(report);
    };
    if tau <= 0.0 {
        report.note = Some(format!("entropy estimate {tau} is not positive"));
        return Ok(report);
    }
    let bound = match kind {
        MetricKind::Combinatorial => a0_inverse(0.5 * tau)?,
        MetricKind::PathLength => a_inverse(0.5 * tau, 0.0, s, kind)?,
    };
    report.bound = Some(bound);
    report.residual = Some((mu_e - bound).abs());

    let finite = report.entropy.regime == Regime::FiniteVolume;
    let samples = &report.entropy.samples;
    let half = samples.len() / 2;
    for &eps in eps_grid {
        if eps <= 0.0 || eps >= mu_e {
            continue;
        }
        let a = a_mu(mu_e - eps, 0.0, s, kind)?.a;
        let scaled: Vec<f64> = samples
            .iter()
            .map(|v| {
                if finite {
                    v[1] * (2.0 * a * v[0]).exp()
                } else {
                    v[1] * (-2.0 * a * v[0]).exp()
                }
            })
            .collect();
        let (fit, check) = scaled.split_at(half.max(1));
        let (c, holds) = if finite {
            let c = fit.iter().copied().fold(0.0, f64::max);
            (c, check.iter().all(|&v| v <= c * (1.0 + tol)))
        } else {
            let c = fit.iter().copied().fold(f64::INFINITY, f64::min);
            (c, check.iter().all(|&v| v >= c * (1.0 - tol)))
        };
        report.growth.push(GrowthRow { eps, a, c, holds });
    }
    let ok = mu_e <= bound * (1.0 + tol) && report.growth.iter().all(|g| g.holds);
    report.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
    Ok(report)
}
