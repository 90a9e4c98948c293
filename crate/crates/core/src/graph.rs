//! Weighted graphs `(V, E, m, w)` with opaque string vertex ids.
//!
//! A [`WeightedGraph`] is an immutable snapshot: either a whole finite graph
//! loaded from a file, or the materialized portion of an infinite family.
//! In the latter case the outermost vertices may carry an incomplete
//! neighbor list; their full weighted degree is still recorded so that
//! metrics and Dirichlet operators can be evaluated without guessing.

use std::collections::{HashMap, HashSet, VecDeque};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One adjacency entry: neighbor index and edge weight `w_xy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub vertex: usize,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    mass: Vec<f64>,
    degree: Vec<f64>,
    complete: Vec<bool>,
    adjacency: Vec<Vec<Neighbor>>,
}

impl WeightedGraph {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, x: usize) -> &str {
        &self.ids[x]
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn mass(&self, x: usize) -> f64 {
        self.mass[x]
    }

    pub fn masses(&self) -> &[f64] {
        &self.mass
    }

    /// Full weighted degree `deg_w(x) = sum_y w_xy`, including edges to
    /// vertices that are not materialized in this snapshot.
    pub fn degree(&self, x: usize) -> f64 {
        self.degree[x]
    }

    /// Whether every neighbor of `x` is present in the snapshot.
    pub fn is_complete(&self, x: usize) -> bool {
        self.complete[x]
    }

    pub fn neighbors(&self, x: usize) -> &[Neighbor] {
        &self.adjacency[x]
    }

    pub fn weight(&self, x: usize, y: usize) -> f64 {
        self.adjacency[x]
            .iter()
            .find(|n| n.vertex == y)
            .map_or(0.0, |n| n.weight)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Unordered edges `(x, y, w)` with `x < y`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(x, nbrs)| {
            nbrs.iter()
                .filter(move |n| n.vertex > x)
                .map(move |n| (x, n.vertex, n.weight))
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// Whether every vertex satisfies `m_x = deg_w(x)` (relative 1e-12).
    pub fn is_normalized(&self) -> bool {
        self.mass
            .iter()
            .zip(&self.degree)
            .all(|(m, d)| (m - d).abs() <= 1e-12 * m.max(*d))
    }

    pub fn check_complete(&self, x: usize) -> Result<()> {
        if self.complete[x] {
            Ok(())
        } else {
            Err(Error::NotMaterialized(self.ids[x].clone()))
        }
    }

    /// BFS hop distances from `source`; `usize::MAX` marks unreachable.
    pub fn hop_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(x) = queue.pop_front() {
            for n in &self.adjacency[x] {
                if dist[n.vertex] == usize::MAX {
                    dist[n.vertex] = dist[x] + 1;
                    queue.push_back(n.vertex);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.hop_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Connected components of the subgraph induced on `V \ removed`,
    /// each sorted by vertex index, ordered by smallest member.
    pub fn components_without(&self, removed: &HashSet<usize>) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut components = Vec::new();
        for start in 0..self.len() {
            if seen[start] || removed.contains(&start) {
                continue;
            }
            seen[start] = true;
            let mut component = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(x) = queue.pop_front() {
                for n in &self.adjacency[x] {
                    if !seen[n.vertex] && !removed.contains(&n.vertex) {
                        seen[n.vertex] = true;
                        component.push(n.vertex);
                        queue.push_back(n.vertex);
                    }
                }
            }
            component.sort_unstable();
            components.push(component);
        }
        components
    }

    /// Restriction to `keep`; degrees of kept vertices stay the full
    /// degrees and completeness is cleared where a neighbor was dropped.
    pub fn restrict(&self, keep: &[usize]) -> WeightedGraph {
        let inside: HashSet<usize> = keep.iter().copied().collect();
        let mut builder = GraphBuilder::new();
        for &x in keep {
            builder = builder.vertex_with_degree(&self.ids[x], self.mass[x], self.degree[x]);
        }
        for (x, y, w) in self.edges() {
            if inside.contains(&x) && inside.contains(&y) {
                builder = builder.edge(&self.ids[x], &self.ids[y], w);
            }
        }
        let mut g = builder
            .build()
            .expect("restriction of a valid graph is valid");
        for &x in keep {
            let local = g.index[&self.ids[x]];
            g.complete[local] = self.complete[x]
                && self.adjacency[x].iter().all(|n| inside.contains(&n.vertex));
        }
        g
    }

    pub fn load(path: &Path) -> Result<WeightedGraph> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<WeightedGraph> {
        let file: GraphFile = serde_json::from_str(text)?;
        file.into_graph()
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self
                .ids
                .iter()
                .zip(&self.mass)
                .map(|(id, &m)| VertexEntry { id: id.clone(), m })
                .collect(),
            edges: self
                .edges()
                .map(|(x, y, w)| EdgeEntry {
                    u: self.ids[x].clone(),
                    v: self.ids[y].clone(),
                    w,
                })
                .collect(),
        }
    }
}

/// On-disk graph schema.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    pub m: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    pub w: f64,
}

impl GraphFile {
    pub fn into_graph(self) -> Result<WeightedGraph> {
        let mut builder = GraphBuilder::new();
        for v in &self.vertices {
            builder = builder.vertex(&v.id, v.m);
        }
        for e in &self.edges {
            builder = builder.edge(&e.u, &e.v, e.w);
        }
        builder.build()
    }
}

/// Incremental, validating constructor for [`WeightedGraph`].
#[derive(Debug, Default)]
pub struct GraphBuilder {
    vertices: Vec<(String, f64, Option<f64>)>,
    edges: Vec<(String, String, f64)>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(mut self, id: &str, mass: f64) -> Self {
        self.vertices.push((id.to_string(), mass, None));
        self
    }

    /// Vertex whose full weighted degree is known even though some of its
    /// edges will not be added (frontier of a materialized ball).
    pub fn vertex_with_degree(mut self, id: &str, mass: f64, degree: f64) -> Self {
        self.vertices.push((id.to_string(), mass, Some(degree)));
        self
    }

    pub fn edge(mut self, u: &str, v: &str, w: f64) -> Self {
        self.edges.push((u.to_string(), v.to_string(), w));
        self
    }

    pub fn build(self) -> Result<WeightedGraph> {
        let n = self.vertices.len();
        let mut ids = Vec::with_capacity(n);
        let mut index = HashMap::with_capacity(n);
        let mut mass = Vec::with_capacity(n);
        let mut declared = Vec::with_capacity(n);
        for (id, m, deg) in self.vertices {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::MalformedSpec(format!(
                    "vertex `{id}` has non-positive mass {m}"
                )));
            }
            if index.insert(id.clone(), ids.len()).is_some() {
                return Err(Error::MalformedSpec(format!("duplicate vertex `{id}`")));
            }
            ids.push(id);
            mass.push(m);
            declared.push(deg);
        }
        let mut adjacency: Vec<Vec<Neighbor>> = vec![Vec::new(); n];
        for (u, v, w) in self.edges {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::MalformedSpec(format!(
                    "edge `{u}`-`{v}` has non-positive weight {w}"
                )));
            }
            let x = *index.get(&u).ok_or_else(|| Error::UnknownVertex(u.clone()))?;
            let y = *index.get(&v).ok_or_else(|| Error::UnknownVertex(v.clone()))?;
            if x == y {
                return Err(Error::MalformedSpec(format!("self-loop at `{u}`")));
            }
            if adjacency[x].iter().any(|nb| nb.vertex == y) {
                return Err(Error::MalformedSpec(format!("multi-edge `{u}`-`{v}`")));
            }
            adjacency[x].push(Neighbor { vertex: y, weight: w });
            adjacency[y].push(Neighbor { vertex: x, weight: w });
        }
        let mut degree = Vec::with_capacity(n);
        let mut complete = Vec::with_capacity(n);
        for (x, nbrs) in adjacency.iter().enumerate() {
            let local: f64 = nbrs.iter().map(|nb| nb.weight).sum();
            match declared[x] {
                Some(d) => {
                    if local > d * (1.0 + 1e-12) + 1e-300 {
                        return Err(Error::MalformedSpec(format!(
                            "vertex `{}` declares degree {d} below its materialized edges {local}",
                            ids[x]
                        )));
                    }
                    complete.push((d - local).abs() <= 1e-12 * d);
                    degree.push(d);
                }
                None => {
                    complete.push(true);
                    degree.push(local);
                }
            }
        }
        Ok(WeightedGraph {
            ids,
            index,
            mass,
            degree,
            complete,
            adjacency,
        })
    }
}
