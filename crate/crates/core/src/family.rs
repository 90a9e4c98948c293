//! Lazily materialized graph families and regions inside them.
//!
//! Regular trees and weighted rays are generated sphere by sphere from the
//! root. Their Dirichlet problems on radial regions (balls, complements of
//! balls, cones below a vertex) are assembled directly on the sphere
//! quotient, so radii far beyond the materialization budget stay cheap.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domain::{at_most, within, BoundaryLink, BoundaryNode, Cell, CellDomain, Link, Side};
use crate::error::{Error, Result};
use crate::graph::{GraphBuilder, WeightedGraph};
use crate::metric::{default_intrinsic, jump_size, Metric, MetricKind, MetricSpec};

pub const DEFAULT_BUDGET: usize = 4_000_000;
const MAX_LEVELS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MassLaw {
    /// `m_x = sum_y w_xy`.
    Normalized,
    /// `m_n = beta^n` on the ray.
    Explicit,
}

/// Family description as read from disk.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: String,
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<MassLaw>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Root vertex of a graph file; defaults to the first listed vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<String>,
}

impl FamilySpec {
    pub fn tree(n: usize) -> Self {
        FamilySpec {
            kind: "tree".into(),
            n: Some(n as i64),
            ..Default::default()
        }
    }

    pub fn ray(beta: f64, mass: MassLaw) -> Self {
        FamilySpec {
            kind: "ray".into(),
            beta: Some(beta),
            mass: Some(mass),
            ..Default::default()
        }
    }

    /// Reads a spec; a relative `path` is resolved against the spec's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let mut spec: FamilySpec = serde_json::from_str(&text)
            .map_err(|e| Error::MalformedSpec(format!("{}: {e}", path.display())))?;
        if let (Some(p), Some(dir)) = (&spec.path, path.parent()) {
            let p = PathBuf::from(p);
            if p.is_relative() {
                spec.path = Some(dir.join(p).display().to_string());
            }
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone)]
pub enum FamilyKind {
    RegularTree { n: usize },
    WeightedRay { beta: f64, mass: MassLaw },
    FiniteFile { graph: WeightedGraph },
}

#[derive(Debug, Clone)]
pub struct GraphFamily {
    kind: FamilyKind,
    root: String,
    budget: usize,
}

pub fn build_family(spec: &FamilySpec) -> Result<GraphFamily> {
    let kind = match spec.kind.as_str() {
        "tree" => {
            let n = spec
                .n
                .ok_or_else(|| Error::MalformedSpec("tree family needs `N`".into()))?;
            if n < 3 {
                return Err(Error::InvalidParameter(format!("tree degree N = {n} < 3")));
            }
            FamilyKind::RegularTree { n: n as usize }
        }
        "ray" => {
            let beta = spec
                .beta
                .ok_or_else(|| Error::MalformedSpec("ray family needs `beta`".into()))?;
            if !(beta.is_finite() && beta > 0.0) {
                return Err(Error::InvalidParameter(format!("ray weight ratio beta = {beta}")));
            }
            FamilyKind::WeightedRay {
                beta,
                mass: spec.mass.unwrap_or(MassLaw::Normalized),
            }
        }
        "file" => {
            let path = spec
                .path
                .as_ref()
                .ok_or_else(|| Error::MalformedSpec("file family needs `path`".into()))?;
            let graph = WeightedGraph::load(Path::new(path))?;
            if graph.is_empty() {
                return Err(Error::MalformedSpec("graph file has no vertices".into()));
            }
            FamilyKind::FiniteFile { graph }
        }
        other => {
            return Err(Error::MalformedSpec(format!("unknown family kind `{other}`")));
        }
    };
    let root = match (&kind, &spec.root) {
        (FamilyKind::FiniteFile { graph }, Some(r)) => {
            graph.require(r)?;
            r.clone()
        }
        (FamilyKind::FiniteFile { graph }, None) => graph.id(0).to_string(),
        (_, Some(_)) => {
            return Err(Error::MalformedSpec(
                "`root` is only accepted for graph files".into(),
            ))
        }
        (FamilyKind::RegularTree { .. }, None) => "o".into(),
        (FamilyKind::WeightedRay { .. }, None) => "0".into(),
    };
    Ok(GraphFamily {
        kind,
        root,
        budget: DEFAULT_BUDGET,
    })
}

/// Immutable materialized portion: a ball plus its boundary layer.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub graph: WeightedGraph,
    pub root: usize,
    /// Distance to the root per vertex.
    pub r: Vec<f64>,
    /// Hop depth per vertex.
    pub level: Vec<usize>,
    pub radius: f64,
}

impl Snapshot {
    pub fn ball(&self) -> Vec<usize> {
        (0..self.graph.len())
            .filter(|&x| at_most(self.r[x], self.radius))
            .collect()
    }
}

/// Region of the graph on which Dirichlet problems are posed.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Whole,
    /// The `index`-th infinite end with respect to `omega`.
    End { omega: Vec<String>, index: usize },
    /// `V \ B_{r0}`.
    Outside { r0: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Infinitude {
    Infinite,
    Finite,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct End {
    pub omega: Vec<String>,
    /// Materialized vertices of the component.
    pub vertices: Vec<String>,
    pub infinitude: Infinitude,
    /// `dPi`: outside vertices adjacent to the component.
    pub boundary: Vec<String>,
    /// Root of the full subtree forming the component, when it is one.
    pub apex: Option<String>,
}

impl GraphFamily {
    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, FamilyKind::FiniteFile { .. })
    }

    /// Whether every vertex satisfies `m_x = sum_y w_xy`.
    pub fn is_normalized(&self) -> bool {
        match &self.kind {
            FamilyKind::RegularTree { .. } => true,
            FamilyKind::WeightedRay { mass, .. } => *mass == MassLaw::Normalized,
            FamilyKind::FiniteFile { graph } => graph.is_normalized(),
        }
    }

    pub fn graph(&self) -> Option<&WeightedGraph> {
        match &self.kind {
            FamilyKind::FiniteFile { graph } => Some(graph),
            _ => None,
        }
    }

    /// Metric from a spec. Explicit tables need a finite file.
    pub fn metric(&self, spec: &MetricSpec) -> Result<Metric> {
        match (&self.kind, spec) {
            (FamilyKind::FiniteFile { graph }, _) => Metric::from_spec(spec, graph),
            (_, MetricSpec::Combinatorial) => Ok(Metric::combinatorial()),
            (_, MetricSpec::Explicit { .. }) => Err(Error::InvalidParameter(
                "explicit length tables are only accepted for finite graph files".into(),
            )),
            (FamilyKind::RegularTree { .. }, MetricSpec::DefaultIntrinsic) => {
                Ok(Metric::combinatorial())
            }
            (FamilyKind::WeightedRay { beta, mass }, MetricSpec::DefaultIntrinsic) => {
                match mass {
                    MassLaw::Normalized => Ok(Metric::combinatorial()),
                    // m_n / deg_n = beta / (1 + beta) for n >= 1 and the root
                    // edge takes the same minimum, so every edge has this length.
                    MassLaw::Explicit => Ok(Metric::intrinsic_rule(
                        MetricKind::PathLength,
                        (beta / (1.0 + beta)).sqrt(),
                    )),
                }
            }
        }
    }

    /// Jump size of `metric` on the whole family.
    pub fn jump_size(&self, metric: &Metric) -> Result<f64> {
        match &self.kind {
            FamilyKind::FiniteFile { graph } => jump_size(graph, metric),
            _ => {
                if metric.kind() == MetricKind::Combinatorial {
                    return Ok(1.0);
                }
                // Edge lengths depend on the level only and both families
                // are periodic from level 1 on.
                let ell = self.level_lengths(metric, 4)?;
                Ok(ell.into_iter().fold(0.0, f64::max))
            }
        }
    }

    // ---- sphere profile of radial families ----

    fn sphere_count(&self, k: usize) -> f64 {
        match self.kind {
            FamilyKind::RegularTree { n } => {
                if k == 0 {
                    1.0
                } else {
                    n as f64 * ((n - 1) as f64).powi(k as i32 - 1)
                }
            }
            _ => 1.0,
        }
    }

    fn cone_count(&self, apex: usize, k: usize) -> f64 {
        match self.kind {
            FamilyKind::RegularTree { n } => ((n - 1) as f64).powi((k - apex) as i32),
            _ => 1.0,
        }
    }

    /// Per-vertex weight from level `k` to level `k + 1`.
    fn up(&self, k: usize) -> f64 {
        match self.kind {
            FamilyKind::RegularTree { n } => {
                if k == 0 {
                    n as f64
                } else {
                    (n - 1) as f64
                }
            }
            FamilyKind::WeightedRay { beta, .. } => beta.powi(k as i32),
            FamilyKind::FiniteFile { .. } => unreachable!("files have no sphere profile"),
        }
    }

    /// Per-vertex weight from level `k` to level `k - 1`.
    fn down(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        match self.kind {
            FamilyKind::RegularTree { .. } => 1.0,
            FamilyKind::WeightedRay { beta, .. } => beta.powi(k as i32 - 1),
            FamilyKind::FiniteFile { .. } => unreachable!("files have no sphere profile"),
        }
    }

    fn level_degree(&self, k: usize) -> f64 {
        self.up(k) + self.down(k)
    }

    fn level_mass(&self, k: usize) -> f64 {
        match self.kind {
            FamilyKind::RegularTree { n } => n as f64,
            FamilyKind::WeightedRay { beta, mass } => match mass {
                MassLaw::Normalized => self.level_degree(k),
                MassLaw::Explicit => beta.powi(k as i32),
            },
            FamilyKind::FiniteFile { .. } => unreachable!("files have no sphere profile"),
        }
    }

    /// Edge lengths between consecutive levels `0..count`.
    fn level_lengths(&self, metric: &Metric, count: usize) -> Result<Vec<f64>> {
        (0..count)
            .map(|k| {
                metric.class_length(
                    self.level_mass(k),
                    self.level_degree(k),
                    self.level_mass(k + 1),
                    self.level_degree(k + 1),
                )
            })
            .collect()
    }

    /// Distances `r_0 = 0, r_1, ..., r_count` of the spheres.
    fn level_radii(&self, metric: &Metric, count: usize) -> Result<Vec<f64>> {
        let mut r = Vec::with_capacity(count + 1);
        r.push(0.0);
        for (k, l) in self.level_lengths(metric, count)?.into_iter().enumerate() {
            r.push(r[k] + l);
        }
        Ok(r)
    }

    /// Largest level whose distance is at most `radius`, with all radii up
    /// to one level past it.
    fn levels_within(&self, metric: &Metric, radius: f64) -> Result<(usize, Vec<f64>)> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("radius {radius}")));
        }
        let mut r = vec![0.0];
        let mut k = 0;
        loop {
            let l = self.level_lengths_at(metric, k)?;
            r.push(r[k] + l);
            if !at_most(r[k + 1], radius) {
                return Ok((k, r));
            }
            k += 1;
            if k > MAX_LEVELS {
                return Err(Error::ResourceCap {
                    needed: k as u128,
                    cap: MAX_LEVELS,
                });
            }
        }
    }

    fn level_lengths_at(&self, metric: &Metric, k: usize) -> Result<f64> {
        metric.class_length(
            self.level_mass(k),
            self.level_degree(k),
            self.level_mass(k + 1),
            self.level_degree(k + 1),
        )
    }

    /// Closed-form sphere distances `r_0..=r_count` of a radial family.
    pub fn sphere_radii(&self, metric: &Metric, count: usize) -> Result<Vec<f64>> {
        if self.is_finite() {
            return Err(Error::InvalidParameter("graph files have no sphere profile".into()));
        }
        self.level_radii(metric, count)
    }

    // ---- materialization ----

    /// The ball `B_R(x_0)` with its boundary layer.
    pub fn materialize(&self, metric: &Metric, radius: f64) -> Result<Snapshot> {
        match &self.kind {
            FamilyKind::FiniteFile { graph } => {
                if !(radius.is_finite() && radius >= 0.0) {
                    return Err(Error::InvalidParameter(format!("radius {radius}")));
                }
                let root = graph.require(&self.root)?;
                let r = metric.distances(graph, root)?;
                let level = graph.hop_distances(root);
                Ok(Snapshot {
                    graph: graph.clone(),
                    root,
                    r,
                    level,
                    radius,
                })
            }
            _ => {
                let (n, _) = self.levels_within(metric, radius)?;
                let mut snap = self.materialize_levels(metric, n)?;
                snap.radius = radius;
                Ok(snap)
            }
        }
    }

    /// Levels `0..=n` with full neighbor lists and level `n + 1` as frontier.
    fn materialize_levels(&self, metric: &Metric, n: usize) -> Result<Snapshot> {
        let needed: f64 = (0..=n + 1).map(|k| self.sphere_count(k)).sum();
        if !(needed <= self.budget as f64) {
            return Err(Error::ResourceCap {
                needed: if needed.is_finite() { needed as u128 } else { u128::MAX },
                cap: self.budget,
            });
        }
        let radii = self.level_radii(metric, n + 1)?;
        let mut builder = GraphBuilder::new();
        let mut r = Vec::new();
        let mut level = Vec::new();
        let mut current = vec![self.root.clone()];
        for k in 0..=n + 1 {
            let mut next = Vec::new();
            for id in &current {
                if k == n + 1 {
                    builder = builder.vertex_with_degree(id, self.level_mass(k), self.level_degree(k));
                } else {
                    builder = builder.vertex(id, self.level_mass(k));
                }
                r.push(radii[k]);
                level.push(k);
                if k <= n {
                    let children = self.children(id, k);
                    let w = self.up(k) / children.len() as f64;
                    for child in children {
                        builder = builder.edge(id, &child, w);
                        next.push(child);
                    }
                }
            }
            current = next;
        }
        Ok(Snapshot {
            graph: builder.build()?,
            root: 0,
            r,
            level,
            radius: radii[n],
        })
    }

    fn children(&self, id: &str, k: usize) -> Vec<String> {
        match self.kind {
            FamilyKind::RegularTree { n } => {
                let c = if k == 0 { n } else { n - 1 };
                (0..c).map(|j| format!("{id}.{j}")).collect()
            }
            _ => vec![(k + 1).to_string()],
        }
    }

    /// Level of a generated vertex id; validates the id.
    fn parse_level(&self, id: &str) -> Result<usize> {
        let bad = || Error::UnknownVertex(id.to_string());
        match self.kind {
            FamilyKind::RegularTree { n } => {
                let mut parts = id.split('.');
                if parts.next() != Some("o") {
                    return Err(bad());
                }
                let mut k = 0;
                for p in parts {
                    let j: usize = p.parse().map_err(|_| bad())?;
                    let limit = if k == 0 { n } else { n - 1 };
                    if j >= limit {
                        return Err(bad());
                    }
                    k += 1;
                }
                Ok(k)
            }
            FamilyKind::WeightedRay { .. } => id.parse().map_err(|_| bad()),
            FamilyKind::FiniteFile { .. } => unreachable!("files have no generated ids"),
        }
    }

    /// Representative vertex of sphere `k` below `apex` (at level `d`).
    fn representative(&self, apex: &str, d: usize, k: usize) -> String {
        match self.kind {
            FamilyKind::RegularTree { .. } => {
                let mut id = apex.to_string();
                for _ in d..k {
                    id.push_str(".0");
                }
                id
            }
            _ => k.to_string(),
        }
    }

    // ---- balls, annuli, ends ----

    pub fn ball(&self, metric: &Metric, radius: f64) -> Result<Vec<String>> {
        let snap = self.materialize(metric, radius)?;
        Ok(snap
            .ball()
            .into_iter()
            .map(|x| snap.graph.id(x).to_string())
            .collect())
    }

    pub fn annulus(&self, metric: &Metric, r1: f64, r2: f64) -> Result<Vec<String>> {
        if !(r1 >= 0.0 && r1 < r2) {
            return Err(Error::InvalidParameter(format!(
                "annulus needs 0 <= R1 < R2, got [{r1}, {r2}]"
            )));
        }
        let snap = self.materialize(metric, r2)?;
        Ok((0..snap.graph.len())
            .filter(|&x| within(snap.r[x], r1, r2))
            .map(|x| snap.graph.id(x).to_string())
            .collect())
    }

    /// Connected components of `V \ Omega`, infinite ones first in
    /// discovery order, then finite ones.
    pub fn ends(&self, omega: &[String]) -> Result<Vec<End>> {
        if omega.is_empty() {
            return Err(Error::InvalidParameter("the base set Omega must be nonempty".into()));
        }
        match &self.kind {
            FamilyKind::FiniteFile { graph } => {
                let removed = index_set(graph, omega)?;
                Ok(graph
                    .components_without(&removed)
                    .into_iter()
                    .map(|c| describe(graph, omega, &c, Infinitude::Finite, None))
                    .collect())
            }
            _ => {
                let depth = omega
                    .iter()
                    .map(|id| self.parse_level(id))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .max()
                    .unwrap_or(0);
                let first = self.radial_components(omega, depth + 1)?;
                let second = self.radial_components(omega, depth + 2)?;
                let shape = |ends: &[End]| {
                    ends.iter()
                        .map(|e| (e.infinitude, e.boundary.clone(), e.apex.clone()))
                        .collect::<Vec<_>>()
                };
                if shape(&first) != shape(&second) {
                    return Err(Error::Precondition(
                        "components of V \\ Omega change between consecutive materializations"
                            .into(),
                    ));
                }
                Ok(first)
            }
        }
    }

    fn radial_components(&self, omega: &[String], levels: usize) -> Result<Vec<End>> {
        let snap = self.materialize_levels(&Metric::combinatorial(), levels)?;
        let g = &snap.graph;
        let removed = index_set(g, omega)?;
        let mut infinite = Vec::new();
        let mut finite = Vec::new();
        for comp in g.components_without(&removed) {
            let reaches_frontier = comp.iter().any(|&x| !g.is_complete(x));
            let apex = if reaches_frontier {
                self.cone_apex(&snap, &comp, levels + 1)
            } else {
                None
            };
            let tag = if reaches_frontier {
                Infinitude::Infinite
            } else {
                Infinitude::Finite
            };
            let end = describe(g, omega, &comp, tag, apex);
            if reaches_frontier {
                infinite.push(end);
            } else {
                finite.push(end);
            }
        }
        infinite.extend(finite);
        Ok(infinite)
    }

    fn cone_apex(&self, snap: &Snapshot, comp: &[usize], top: usize) -> Option<String> {
        let min_level = comp.iter().map(|&x| snap.level[x]).min()?;
        let tops: Vec<usize> = comp
            .iter()
            .copied()
            .filter(|&x| snap.level[x] == min_level)
            .collect();
        if tops.len() != 1 || min_level == 0 {
            return None;
        }
        let expected: f64 = (min_level..=top).map(|k| self.cone_count(min_level, k)).sum();
        (comp.len() as f64 == expected).then(|| snap.graph.id(tops[0]).to_string())
    }

    /// Parent id of a tree or ray vertex.
    fn parent(&self, id: &str) -> Option<String> {
        match self.kind {
            FamilyKind::RegularTree { .. } => id.rfind('.').map(|i| id[..i].to_string()),
            _ => id.parse::<usize>().ok().filter(|&k| k > 0).map(|k| (k - 1).to_string()),
        }
    }

    // ---- Dirichlet domains ----

    /// `Pi_R`: the part of `region` within distance `radius` of the root,
    /// with its boundary layer.
    pub fn domain(&self, metric: &Metric, region: &Region, radius: f64) -> Result<CellDomain> {
        match (&self.kind, region) {
            (FamilyKind::FiniteFile { .. }, Region::End { .. }) => Err(Error::Precondition(
                "finite graphs have no ends".into(),
            )),
            (FamilyKind::FiniteFile { graph }, _) => {
                let snap = self.materialize(metric, radius)?;
                let r0 = match region {
                    Region::Outside { r0 } => *r0,
                    _ => -1.0,
                };
                let cells: Vec<usize> = (0..graph.len())
                    .filter(|&x| at_most(snap.r[x], radius) && !at_most(snap.r[x], r0))
                    .collect();
                let inner: HashSet<usize> =
                    (0..graph.len()).filter(|&x| at_most(snap.r[x], r0)).collect();
                CellDomain::from_graph(graph, metric, &snap.r, &cells, &inner)
            }
            (_, Region::Whole) => {
                let (n, _) = self.levels_within(metric, radius)?;
                self.chain(metric, 0, n, None)
            }
            (_, Region::Outside { r0 }) => {
                let (n0, _) = self.levels_within(metric, *r0)?;
                let (n, _) = self.levels_within(metric, radius)?;
                if n <= n0 {
                    return Err(Error::EmptyDomain);
                }
                self.chain(metric, n0 + 1, n, None)
            }
            (_, Region::End { omega, index }) => {
                let ends = self.ends(omega)?;
                let end = ends
                    .iter()
                    .filter(|e| e.infinitude == Infinitude::Infinite)
                    .nth(*index)
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("no infinite end with index {index}"))
                    })?;
                match &end.apex {
                    Some(apex) => {
                        let d = self.parse_level(apex)?;
                        let (n, _) = self.levels_within(metric, radius)?;
                        if n < d {
                            return Err(Error::EmptyDomain);
                        }
                        self.chain(metric, d, n, Some(apex))
                    }
                    None => self.materialized_end(metric, end, radius),
                }
            }
        }
    }

    /// Sphere chain on levels `lo..=hi`, optionally restricted to the cone
    /// below `apex` (which then sits at level `lo`).
    fn chain(&self, metric: &Metric, lo: usize, hi: usize, apex: Option<&String>) -> Result<CellDomain> {
        let radii = self.level_radii(metric, hi + 1)?;
        let lengths: Vec<f64> = radii.windows(2).map(|w| w[1] - w[0]).collect();
        let rep_root = apex.cloned().unwrap_or_else(|| self.root.clone());
        let rep_level = if apex.is_some() { lo } else { 0 };
        let count = |k: usize| match apex {
            Some(_) => self.cone_count(lo, k),
            None => self.sphere_count(k),
        };
        let mut cells = Vec::new();
        let mut links = Vec::new();
        let mut blinks = Vec::new();
        let mut boundary = Vec::new();
        if lo > 0 {
            let label = match apex {
                Some(a) => self.parent(a).expect("apex below the root has a parent"),
                None => self.representative(&rep_root, rep_level, lo - 1),
            };
            boundary.push(BoundaryNode {
                label,
                r: radii[lo - 1],
                side: Side::Inner,
            });
        }
        boundary.push(BoundaryNode {
            label: self.representative(&rep_root, rep_level, hi + 1),
            r: radii[hi + 1],
            side: Side::Outer,
        });
        let outer = boundary.len() - 1;
        for k in lo..=hi {
            let i = k - lo;
            cells.push(Cell {
                label: self.representative(&rep_root, rep_level, k),
                count: count(k),
                mass: self.level_mass(k),
                r: radii[k],
            });
            let mut inside = Vec::new();
            let mut outside = Vec::new();
            if k > lo {
                inside.push(Link {
                    to: i - 1,
                    weight: self.down(k),
                    length: lengths[k - 1],
                });
            } else if k > 0 {
                outside.push(BoundaryLink {
                    node: 0,
                    weight: self.down(k),
                    length: lengths[k - 1],
                });
            }
            if k < hi {
                inside.push(Link {
                    to: i + 1,
                    weight: self.up(k),
                    length: lengths[k],
                });
            } else {
                outside.push(BoundaryLink {
                    node: outer,
                    weight: self.up(k),
                    length: lengths[k],
                });
            }
            links.push(inside);
            blinks.push(outside);
        }
        CellDomain::from_parts(cells, links, boundary, blinks)
    }

    fn materialized_end(&self, metric: &Metric, end: &End, radius: f64) -> Result<CellDomain> {
        let snap = self.materialize(metric, radius)?;
        let g = &snap.graph;
        let removed = index_set(g, &end.omega)?;
        let members: HashSet<usize> = end.vertices.iter().filter_map(|id| g.index_of(id)).collect();
        let mut cells = Vec::new();
        for comp in g.components_without(&removed) {
            if comp.iter().any(|x| members.contains(x)) {
                cells.extend(comp.into_iter().filter(|&x| at_most(snap.r[x], radius)));
            }
        }
        cells.sort_unstable();
        CellDomain::from_graph(g, metric, &snap.r, &cells, &removed)
    }
}

fn index_set(g: &WeightedGraph, ids: &[String]) -> Result<HashSet<usize>> {
    ids.iter().map(|id| g.require(id)).collect()
}

fn describe(
    g: &WeightedGraph,
    omega: &[String],
    comp: &[usize],
    infinitude: Infinitude,
    apex: Option<String>,
) -> End {
    let inside: HashSet<usize> = comp.iter().copied().collect();
    let mut boundary: Vec<usize> = comp
        .iter()
        .flat_map(|&x| g.neighbors(x).iter().map(|n| n.vertex))
        .filter(|y| !inside.contains(y))
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    boundary.sort_unstable();
    End {
        omega: omega.to_vec(),
        vertices: comp.iter().map(|&x| g.id(x).to_string()).collect(),
        infinitude,
        boundary: boundary.into_iter().map(|x| g.id(x).to_string()).collect(),
        apex,
    }
}

/// `dK = {y not in K : y ~ x for some x in K}`; requires complete neighbor
/// lists on `K`.
pub fn vertex_boundary(g: &WeightedGraph, k: &[usize]) -> Result<Vec<usize>> {
    let inside: HashSet<usize> = k.iter().copied().collect();
    let mut out = HashSet::new();
    for &x in k {
        g.check_complete(x)?;
        out.extend(
            g.neighbors(x)
                .iter()
                .map(|n| n.vertex)
                .filter(|y| !inside.contains(y)),
        );
    }
    let mut out: Vec<usize> = out.into_iter().collect();
    out.sort_unstable();
    Ok(out)
}

/// Resolves a metric spec on the family, defaulting to the combinatorial
/// distance.
pub fn resolve_metric(family: &GraphFamily, spec: Option<&MetricSpec>) -> Result<Metric> {
    match spec {
        Some(s) => family.metric(s),
        None => Ok(Metric::combinatorial()),
    }
}

/// Default intrinsic metric of a graph file family; radial families use
/// their closed form.
pub fn default_metric(family: &GraphFamily) -> Result<Metric> {
    match family.kind() {
        FamilyKind::FiniteFile { graph } => default_intrinsic(graph),
        _ => family.metric(&MetricSpec::DefaultIntrinsic),
    }
}
