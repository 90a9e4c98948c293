use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use posgraph::decay::{verify_decay, DecayProblem, Verdict};
use posgraph::domain::CellFunction;
use posgraph::entropy::{brooks_check, volume_entropy};
use posgraph::family::{resolve_metric, FamilyKind};
use posgraph::operators::{dirichlet_bottom, spectral_bottom_estimate};
use posgraph::oracles::brute_eigen;
use posgraph::potential::{classify_parabolic, harmonic_limit_decay, resolvent, tree_oracle, verify_resolvent_decay, Parabolicity};
use posgraph::{build_family, Error, FamilySpec, GraphFamily, Metric, MetricSpec, Region};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Command {
    Spectrum,
    Decay,
    Resolvent,
    Ends,
    Entropy,
    Oracle,
    Classify,
    ResolventDecay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Spectral bottoms, resolvent kernels, ends and decay estimates on weighted graphs.
#[derive(Debug, Parser)]
#[command(name = "posgraph", version)]
struct Cli {
    /// Family spec (JSON).
    #[arg(long)]
    family: PathBuf,
    /// Metric spec (JSON); the combinatorial distance if omitted.
    #[arg(long)]
    metric: Option<PathBuf>,
    #[arg(long, value_enum)]
    cmd: Command,
    /// Radius schedule `a:b:step`.
    #[arg(long)]
    radii: Option<String>,
    /// Truncation schedule for spectral estimates, `a:b:step`.
    #[arg(long)]
    spectral: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Comma-separated base set `Omega` of vertex ids.
    #[arg(long)]
    omega: Option<String>,
    /// Index of the end of `V \ Omega` to work on.
    #[arg(long)]
    end: Option<usize>,
    /// Function for `decay`: constant-1, barrier, harmonic, or a JSON file
    /// mapping vertex ids to values.
    #[arg(long, default_value = "barrier")]
    f: String,
    /// Boundary data for `--f harmonic`: JSON object of vertex ids to values.
    #[arg(long)]
    boundary: Option<PathBuf>,
    /// Inner radius `R0` of the decay estimate.
    #[arg(long)]
    r0: Option<f64>,
}

/// Failure classes mapped onto exit codes.
enum Failure {
    Config(String),
    Numeric(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() || matches!(e, Error::Precondition(_) | Error::OutOfDomain(_)) {
            Failure::Config(e.to_string())
        } else {
            Failure::Numeric(e.to_string())
        }
    }
}

/// Report plus its outcome class.
struct Outcome {
    body: String,
    code: u8,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if let Err(e) = emit(&cli, &out.body) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(out.code)
        }
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn emit(cli: &Cli, body: &str) -> std::io::Result<()> {
    match &cli.out {
        Some(p) => fs::write(p, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn parse_schedule(text: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::Config(format!("schedule `{text}` must read a:b:step with 0 <= a <= b, step > 0"));
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let [a, b, step] = parts[..] else { return Err(bad()) };
    if !(a >= 0.0 && b >= a && step > 0.0 && b.is_finite()) {
        return Err(bad());
    }
    let count = ((b - a) / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(bad());
    }
    Ok((0..=count).map(|k| a + k as f64 * step).collect())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn to_json(v: &impl serde::Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Failure::Numeric(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Pass => 0,
        Verdict::Fail => 3,
        Verdict::PreconditionFailed => 2,
        Verdict::HypothesisNotMet | Verdict::Inconclusive => 4,
    }
}

struct Ctx {
    family: GraphFamily,
    metric: Metric,
    s: f64,
}

impl Ctx {
    fn omega(&self, cli: &Cli) -> Option<Vec<String>> {
        cli.omega.as_ref().map(|o| o.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
    }

    /// The requested end, or the first end of `V \ {x_0}`.
    fn end(&self, cli: &Cli) -> Region {
        Region::End {
            omega: self.omega(cli).unwrap_or_else(|| vec![self.family.root().to_string()]),
            index: cli.end.unwrap_or(0),
        }
    }

    fn region(&self, cli: &Cli) -> Region {
        if cli.omega.is_some() || cli.end.is_some() {
            self.end(cli)
        } else {
            Region::Whole
        }
    }

    /// Default spectral schedule, shortened on trees so sphere counts stay
    /// representable.
    fn spectral(&self, cli: &Cli) -> Result<Vec<f64>, Failure> {
        if let Some(s) = &cli.spectral {
            return parse_schedule(s);
        }
        let mut levels = 320.0;
        if let FamilyKind::RegularTree { n } = self.family.kind() {
            levels = f64::min(levels, (250.0 / ((*n - 1) as f64).log10()).floor());
        }
        Ok([0.125, 0.25, 0.5, 1.0].iter().map(|f| (f * levels).floor() * self.s).collect())
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    if let Some(t) = cli.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Config(format!("tolerance must be positive, got {t}")));
        }
    }
    if cli.format == Format::Csv && cli.cmd != Command::Resolvent {
        return Err(Failure::Config("CSV output is only available for kernel dumps (--cmd resolvent)".into()));
    }
    let spec = FamilySpec::load(&cli.family)?;
    let family = build_family(&spec)?;
    let metric_spec: Option<MetricSpec> = cli.metric.as_deref().map(read_json).transpose()?;
    if matches!(metric_spec, Some(MetricSpec::Explicit { .. })) && !family.is_finite() {
        return Err(Failure::Config("explicit length tables are only accepted for graph files".into()));
    }
    let metric = resolve_metric(&family, metric_spec.as_ref())?;
    let s = family.jump_size(&metric)?;
    let ctx = Ctx { family, metric, s };
    let radii = |default: &str| parse_schedule(cli.radii.as_deref().unwrap_or(default));
    match cli.cmd {
        Command::Spectrum => spectrum(cli, &ctx, &radii("5:30:5")?),
        Command::Decay => decay(cli, &ctx, &radii("4:20:1")?),
        Command::Resolvent => kernel(cli, &ctx, &radii("10:40:10")?),
        Command::Ends => ends(cli, &ctx),
        Command::Entropy => entropy(cli, &ctx, &radii("1:30:1")?),
        Command::Oracle => oracle(cli, &ctx),
        Command::Classify => classify(cli, &ctx, &radii("4:24:1")?),
        Command::ResolventDecay => resolvent_decay(cli, &ctx, &radii("6:14:1")?),
    }
}

fn ok(v: &impl serde::Serialize) -> Result<Outcome, Failure> {
    Ok(Outcome { body: to_json(v)?, code: 0 })
}

fn spectrum(cli: &Cli, ctx: &Ctx, radii: &[f64]) -> Result<Outcome, Failure> {
    if let FamilyKind::FiniteFile { graph } = ctx.family.kind() {
        let omega: Vec<usize> = match ctx.omega(cli) {
            Some(ids) => ids.iter().map(|id| graph.require(id)).collect::<Result<_, _>>()?,
            None => (0..graph.len()).collect(),
        };
        let bottom = dirichlet_bottom(graph, &omega)?;
        let brute = if omega.len() <= posgraph::oracles::BRUTE_EIGEN_LIMIT {
            Some(brute_eigen(graph, &omega)?)
        } else {
            None
        };
        if let Some(ev) = &brute {
            if (ev[0] - bottom.mu1).abs() > 1e-9 {
                return Err(Failure::Numeric(format!(
                    "eigensolver disagrees with the dense cross-check: {} vs {}",
                    bottom.mu1, ev[0]
                )));
            }
        }
        return ok(&json!({
            "region": "omega",
            "omega": bottom.vertices,
            "mu1": bottom.mu1,
            "exact": true,
            "cross_check": brute,
            "eigenfunction": bottom.eigenfunction,
        }));
    }
    let region = ctx.region(cli);
    let est = spectral_bottom_estimate(&ctx.family, &ctx.metric, &region, radii)?;
    ok(&json!({
        "region": region_json(&region),
        "radii": est.radii,
        "values": est.values,
        "extrapolated": est.extrapolated,
        "interval": est.interval,
        "lower_is_estimate": est.lower_is_estimate,
        "interval_rule": "hi = mu_1 at the largest radius; lo = Richardson extrapolation under a c/R^2 law minus twice its drift",
    }))
}

fn region_json(region: &Region) -> Value {
    match region {
        Region::Whole => json!("whole"),
        Region::End { omega, index } => json!({"omega": omega, "end": index}),
        Region::Outside { r0 } => json!({"outside_ball": r0}),
    }
}

fn read_values(path: &Path) -> Result<HashMap<String, f64>, Failure> {
    read_json(path)
}

fn decay(cli: &Cli, ctx: &Ctx, radii: &[f64]) -> Result<Outcome, Failure> {
    if ctx.family.is_finite() {
        return Err(Failure::Config("finite graphs have no ends".into()));
    }
    let region = ctx.end(cli);
    let spectral = ctx.spectral(cli)?;
    let tol = cli.tol.unwrap_or(1e-6);
    let r_max = radii.last().copied().ok_or_else(|| Failure::Config("empty radius schedule".into()))?;
    let probe = ctx.family.domain(&ctx.metric, &region, ctx.s)?;
    let r0 = cli.r0.unwrap_or_else(|| probe.inner_boundary_radius().unwrap_or(0.0) + ctx.s);
    let (report, extra) = match cli.f.as_str() {
        "barrier" | "harmonic" => {
            let data: HashMap<String, f64> = match (&cli.boundary, cli.f.as_str()) {
                (Some(p), _) => read_values(p)?,
                (None, "harmonic") => {
                    return Err(Failure::Config("--f harmonic needs --boundary".into()));
                }
                _ => HashMap::new(),
            };
            let barrier = cli.f == "barrier";
            let lookup = move |id: &str| -> posgraph::Result<f64> {
                if barrier {
                    Ok(1.0)
                } else {
                    Ok(data.get(id).copied().unwrap_or(0.0))
                }
            };
            let base = r_max + 4.0 * ctx.s;
            let schedule = [base + 10.0 * ctx.s, base + 20.0 * ctx.s, base + 30.0 * ctx.s];
            let hd = harmonic_limit_decay(
                &ctx.family,
                &ctx.metric,
                &region,
                &lookup,
                &schedule,
                &spectral,
                r0,
                radii,
                tol.max(1e-3),
            )?;
            (hd.report, json!({"increments": hd.increments}))
        }
        other => {
            let est = spectral_bottom_estimate(&ctx.family, &ctx.metric, &region, &spectral)?;
            let domain = ctx.family.domain(&ctx.metric, &region, r_max + 4.0 * ctx.s)?;
            let f = if other == "constant-1" {
                CellFunction::constant(&domain, 1.0)
            } else {
                let values = read_values(Path::new(other))?;
                let mut f = CellFunction::zeros(&domain);
                for (i, c) in domain.cells().iter().enumerate() {
                    f.cells[i] = values.get(&c.label).copied().unwrap_or(0.0);
                }
                for (i, b) in domain.boundary().iter().enumerate() {
                    f.boundary[i] = values.get(&b.label).copied().unwrap_or(0.0);
                }
                f
            };
            let report = verify_decay(&DecayProblem {
                domain: &domain,
                f: &f,
                mu: cli.mu,
                r0,
                radii,
                l_seq: &[],
                mu1: &est,
                s: ctx.s,
                kind: ctx.metric.kind(),
            })?;
            (report, Value::Null)
        }
    };
    if let Some(why) = &report.precondition {
        eprintln!("{why}");
    }
    let mut body = serde_json::to_value(&report).map_err(|e| Failure::Numeric(e.to_string()))?;
    body["r0"] = json!(r0);
    body["f"] = json!(cli.f);
    if !extra.is_null() {
        body["limit"] = extra;
    }
    Ok(Outcome {
        body: to_json(&body)?,
        code: verdict_code(report.verdict),
    })
}

fn kernel(cli: &Cli, ctx: &Ctx, radii: &[f64]) -> Result<Outcome, Failure> {
    let tol = cli.tol.unwrap_or(1e-6);
    let lim = resolvent(&ctx.family, &ctx.metric, cli.alpha, tol, radii)?;
    let code = if lim.converged { 0 } else { 4 };
    if !lim.converged {
        eprintln!("resolvent limit not converged: increments {:?}", lim.increments);
    }
    let body = match cli.format {
        Format::Json => to_json(&lim)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["id", "r", "g", "bracket"]).map_err(|e| Failure::Numeric(e.to_string()))?;
            for row in &lim.kernel.rows {
                w.write_record([row.id.clone(), row.r.to_string(), row.g.to_string(), row.bracket.to_string()])
                    .map_err(|e| Failure::Numeric(e.to_string()))?;
            }
            String::from_utf8(w.into_inner().map_err(|e| Failure::Numeric(e.to_string()))?)
                .map_err(|e| Failure::Numeric(e.to_string()))?
        }
    };
    Ok(Outcome { body, code })
}

fn ends(cli: &Cli, ctx: &Ctx) -> Result<Outcome, Failure> {
    let omega = ctx.omega(cli).unwrap_or_else(|| vec![ctx.family.root().to_string()]);
    let ends = ctx.family.ends(&omega)?;
    let infinite = ends.iter().filter(|e| e.infinitude == posgraph::family::Infinitude::Infinite).count();
    ok(&json!({"omega": omega, "infinite": infinite, "ends": ends}))
}

fn entropy(cli: &Cli, ctx: &Ctx, radii: &[f64]) -> Result<Outcome, Failure> {
    let tol = cli.tol.unwrap_or(0.02);
    if ctx.family.is_finite() {
        let e = volume_entropy(&ctx.family, &ctx.metric, radii)?;
        return ok(&json!({
            "regime": e.regime,
            "samples": e.samples,
            "liminf_proxy": e.liminf_proxy,
            "slope_fit": e.slope_fit,
            "entropy": "infinity",
            "note": e.note,
            "brooks": Value::Null,
        }));
    }
    let spectral = ctx.spectral(cli)?;
    let r0_grid = [2.0 * ctx.s, 4.0 * ctx.s, 8.0 * ctx.s];
    let rep = brooks_check(&ctx.family, &ctx.metric, &r0_grid, &spectral, &[0.01, 0.005], radii, tol)?;
    let e = &rep.entropy;
    let body = json!({
        "regime": e.regime,
        "samples": e.samples,
        "liminf_proxy": e.liminf_proxy,
        "liminf_rule": "running minimum of the sampled quotients over the last half of the schedule",
        "slope_fit": e.slope_fit,
        "brooks": {
            "mu_e_evidence": rep.mu_e_evidence,
            "mu_e_grid": rep.mu_e_grid,
            "bound": rep.bound,
            "residual": rep.residual,
            "closed_form_residual": rep.closed_form_residual,
            "growth": rep.growth,
            "verdict": rep.verdict,
            "note": rep.note,
        },
    });
    Ok(Outcome {
        body: to_json(&body)?,
        code: verdict_code(rep.verdict),
    })
}

fn oracle(cli: &Cli, ctx: &Ctx) -> Result<Outcome, Failure> {
    match ctx.family.kind() {
        FamilyKind::RegularTree { n } => ok(&tree_oracle(*n, cli.alpha)?),
        _ => Err(Failure::Config("closed forms are available for regular trees only".into())),
    }
}

fn classify(cli: &Cli, ctx: &Ctx, radii: &[f64]) -> Result<Outcome, Failure> {
    let region = ctx.end(cli);
    let spectral = ctx.spectral(cli)?;
    let c = classify_parabolic(&ctx.family, &ctx.metric, &region, radii, &spectral, cli.tol.unwrap_or(1e-6))?;
    let code = if c.verdict == Parabolicity::Inconclusive { 4 } else { 0 };
    let mut body = serde_json::to_value(&c).map_err(|e| Failure::Numeric(e.to_string()))?;
    body["region"] = region_json(&region);
    Ok(Outcome { body: to_json(&body)?, code })
}

fn resolvent_decay(cli: &Cli, ctx: &Ctx, radii: &[f64]) -> Result<Outcome, Failure> {
    let spectral = ctx.spectral(cli)?;
    let rep = verify_resolvent_decay(&ctx.family, &ctx.metric, cli.alpha, radii, &spectral, cli.tol.unwrap_or(0.05))?;
    Ok(Outcome {
        body: to_json(&rep)?,
        code: verdict_code(rep.verdict),
    })
}
