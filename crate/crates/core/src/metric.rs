//! Intrinsic (pseudo-)metrics given by edge lengths and their path metric.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Relative tolerance of the intrinsic inequality check.
pub const INTRINSIC_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// The combinatorial graph distance `d` (jump size 1).
    Combinatorial,
    /// A general path metric built from edge lengths.
    PathLength,
}

#[derive(Debug, Clone, PartialEq)]
enum LengthRule {
    Unit,
    Uniform(f64),
    DefaultIntrinsic,
    Table(HashMap<(String, String), f64>),
}

/// Metric specification as read from disk.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MetricSpec {
    Combinatorial,
    DefaultIntrinsic,
    Explicit { lengths: Vec<LengthEntry> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LengthEntry {
    pub u: String,
    pub v: String,
    pub l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metric {
    kind: MetricKind,
    rule: LengthRule,
    declared_jump: Option<f64>,
}

impl Metric {
    pub fn combinatorial() -> Self {
        Metric {
            kind: MetricKind::Combinatorial,
            rule: LengthRule::Unit,
            declared_jump: None,
        }
    }

    pub fn uniform(length: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!("edge length {length}")));
        }
        Ok(Metric {
            kind: MetricKind::PathLength,
            rule: LengthRule::Uniform(length),
            declared_jump: None,
        })
    }

    pub fn explicit(entries: &[LengthEntry]) -> Result<Self> {
        let mut table = HashMap::with_capacity(entries.len());
        for e in entries {
            if !(e.l.is_finite() && e.l >= 0.0) {
                return Err(Error::MalformedSpec(format!(
                    "edge `{}`-`{}` has invalid length {}",
                    e.u, e.v, e.l
                )));
            }
            table.insert(ordered_key(&e.u, &e.v), e.l);
        }
        Ok(Metric {
            kind: MetricKind::PathLength,
            rule: LengthRule::Table(table),
            declared_jump: None,
        })
    }

    /// The edge-length rule of [`default_intrinsic`], without the
    /// reduction to `d`. Families use this when the jump size is declared.
    pub(crate) fn intrinsic_rule(kind: MetricKind, declared_jump: f64) -> Self {
        Metric {
            kind,
            rule: if kind == MetricKind::Combinatorial {
                LengthRule::Unit
            } else {
                LengthRule::DefaultIntrinsic
            },
            declared_jump: Some(declared_jump),
        }
    }

    pub fn from_spec(spec: &MetricSpec, g: &WeightedGraph) -> Result<Self> {
        match spec {
            MetricSpec::Combinatorial => Ok(Self::combinatorial()),
            MetricSpec::DefaultIntrinsic => default_intrinsic(g),
            MetricSpec::Explicit { lengths } => Self::explicit(lengths),
        }
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn edge_length(&self, g: &WeightedGraph, x: usize, y: usize) -> Result<f64> {
        match &self.rule {
            LengthRule::Unit => Ok(1.0),
            LengthRule::Uniform(l) => Ok(*l),
            LengthRule::DefaultIntrinsic => {
                intrinsic_length(g.mass(x), g.degree(x), g.mass(y), g.degree(y))
            }
            LengthRule::Table(table) => table
                .get(&ordered_key(g.id(x), g.id(y)))
                .copied()
                .ok_or_else(|| {
                    Error::MalformedSpec(format!("no length for edge `{}`-`{}`", g.id(x), g.id(y)))
                }),
        }
    }

    /// Length of an edge between two vertex classes described only by
    /// mass and weighted degree. Table metrics cannot be evaluated this way.
    pub fn class_length(&self, mx: f64, dx: f64, my: f64, dy: f64) -> Result<f64> {
        match &self.rule {
            LengthRule::Unit => Ok(1.0),
            LengthRule::Uniform(l) => Ok(*l),
            LengthRule::DefaultIntrinsic => intrinsic_length(mx, dx, my, dy),
            LengthRule::Table(_) => Err(Error::InvalidParameter(
                "explicit length tables are only accepted for finite graph files".into(),
            )),
        }
    }

    /// Shortest-path distances from `source` over materialized edges.
    pub fn distances(&self, g: &WeightedGraph, source: usize) -> Result<Vec<f64>> {
        if self.rule == LengthRule::Unit {
            return Ok(g
                .hop_distances(source)
                .into_iter()
                .map(|d| if d == usize::MAX { f64::INFINITY } else { d as f64 })
                .collect());
        }
        let mut dist = vec![f64::INFINITY; g.len()];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(HeapEntry(0.0, source));
        while let Some(HeapEntry(d, x)) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for n in g.neighbors(x) {
                let candidate = d + self.edge_length(g, x, n.vertex)?;
                if candidate < dist[n.vertex] {
                    dist[n.vertex] = candidate;
                    heap.push(HeapEntry(candidate, n.vertex));
                }
            }
        }
        Ok(dist)
    }
}

fn ordered_key(u: &str, v: &str) -> (String, String) {
    if u <= v {
        (u.to_string(), v.to_string())
    } else {
        (v.to_string(), u.to_string())
    }
}

pub(crate) fn intrinsic_length(mx: f64, dx: f64, my: f64, dy: f64) -> Result<f64> {
    if dx <= 0.0 || dy <= 0.0 {
        return Err(Error::Assumption("isolated vertex has no intrinsic edge length".into()));
    }
    Ok((mx / dx).sqrt().min((my / dy).sqrt()))
}

#[derive(PartialEq)]
struct HeapEntry(f64, usize);

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Canonical intrinsic metric: `l(x,y) = min(sqrt(m_x/deg_x), sqrt(m_y/deg_y))`.
///
/// When every edge length comes out as exactly 1 the result is the
/// combinatorial metric.
pub fn default_intrinsic(g: &WeightedGraph) -> Result<Metric> {
    for x in 0..g.len() {
        if g.degree(x) <= 0.0 {
            return Err(Error::Assumption(format!("vertex `{}` is isolated", g.id(x))));
        }
    }
    let rule = LengthRule::DefaultIntrinsic;
    let probe = Metric {
        kind: MetricKind::PathLength,
        rule,
        declared_jump: None,
    };
    let mut all_unit = true;
    for (x, y, _) in g.edges() {
        if (probe.edge_length(g, x, y)? - 1.0).abs() > INTRINSIC_TOL {
            all_unit = false;
            break;
        }
    }
    Ok(if all_unit { Metric::combinatorial() } else { probe })
}

#[derive(Debug, Clone, Serialize)]
pub struct IntrinsicReport {
    /// `(vertex id, m_x - sum_y w_xy rho(x,y)^2)` for every tested vertex.
    pub slacks: Vec<(String, f64)>,
    pub worst: f64,
    pub pass: bool,
}

/// Checks `sum_y w_xy rho^2(x,y) <= m_x` at every vertex of `g`.
pub fn verify_intrinsic(g: &WeightedGraph, metric: &Metric) -> Result<IntrinsicReport> {
    let all: Vec<usize> = (0..g.len()).collect();
    verify_intrinsic_at(g, metric, &all)
}

pub fn verify_intrinsic_at(
    g: &WeightedGraph,
    metric: &Metric,
    vertices: &[usize],
) -> Result<IntrinsicReport> {
    let mut slacks = Vec::with_capacity(vertices.len());
    let mut worst = f64::INFINITY;
    let mut pass = true;
    for &x in vertices {
        g.check_complete(x)?;
        let mut load = 0.0;
        for n in g.neighbors(x) {
            let l = metric.edge_length(g, x, n.vertex)?;
            load += n.weight * l * l;
        }
        let slack = g.mass(x) - load;
        if slack < -INTRINSIC_TOL * g.mass(x) {
            pass = false;
        }
        worst = worst.min(slack);
        slacks.push((g.id(x).to_string(), slack));
    }
    Ok(IntrinsicReport { slacks, worst, pass })
}

/// Jump size `s = sup_{x~y} rho(x,y)`.
pub fn jump_size(g: &WeightedGraph, metric: &Metric) -> Result<f64> {
    if let Some(s) = metric.declared_jump {
        return Ok(s);
    }
    let s = match &metric.rule {
        LengthRule::Unit => 1.0,
        LengthRule::Uniform(l) => *l,
        _ => {
            let mut s: f64 = 0.0;
            for (x, y, _) in g.edges() {
                s = s.max(metric.edge_length(g, x, y)?);
            }
            s
        }
    };
    if !s.is_finite() {
        return Err(Error::Assumption("unbounded jump size".into()));
    }
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LipschitzScope {
    /// Adjacent pairs only; enough for radial cut-offs.
    Edges,
    /// Every pair of vertices, via all-sources shortest paths.
    AllPairs,
}

#[derive(Debug, Clone, Serialize)]
pub struct LipschitzReport {
    pub constant: f64,
    /// Distinct pairs at distance zero on which `h` differs; excluded from
    /// the supremum.
    pub zero_distance_pairs: Vec<(String, String)>,
}

pub fn lipschitz_constant(
    g: &WeightedGraph,
    metric: &Metric,
    h: &[f64],
    scope: LipschitzScope,
) -> Result<LipschitzReport> {
    if h.len() != g.len() {
        return Err(Error::InvalidParameter("function length differs from graph".into()));
    }
    let mut constant: f64 = 0.0;
    let mut zero_distance_pairs = Vec::new();
    let mut visit = |x: usize, y: usize, rho: f64| {
        let diff = (h[x] - h[y]).abs();
        if rho > 0.0 {
            constant = constant.max(diff / rho);
        } else if diff > 0.0 {
            zero_distance_pairs.push((g.id(x).to_string(), g.id(y).to_string()));
        }
    };
    match scope {
        LipschitzScope::Edges => {
            for (x, y, _) in g.edges() {
                visit(x, y, metric.edge_length(g, x, y)?);
            }
        }
        LipschitzScope::AllPairs => {
            for x in 0..g.len() {
                let dist = metric.distances(g, x)?;
                for (y, &rho) in dist.iter().enumerate().skip(x + 1) {
                    if rho.is_finite() {
                        visit(x, y, rho);
                    }
                }
            }
        }
    }
    Ok(LipschitzReport {
        constant,
        zero_distance_pairs,
    })
}

/// `x -> profile(r(x))`.
pub fn radial_lift(r: &[f64], profile: impl Fn(f64) -> f64) -> Vec<f64> {
    r.iter().map(|&t| profile(t)).collect()
}
