//! Finite Dirichlet domains.
//!
//! A [`CellDomain`] is the finite vertex set `Omega` on which a Dirichlet
//! problem lives, together with the vertices just outside it. Every cell
//! stands for `count` vertices that share mass, distance to the root and
//! per-vertex edge weights. Materialized graphs give cells of count 1; the
//! regular tree and the weighted ray reduce to one cell per sphere, which is
//! exact for functions invariant under the automorphisms fixing the root
//! (the bottom eigenfunction, resolvent kernels from the root, barriers).
//!
//! Boundary nodes carry Dirichlet data. `Inner` nodes form the interface
//! `dPi` to the removed finite set, `Outer` nodes lie beyond the truncation
//! radius and default to zero.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::SparseSym;
use crate::metric::Metric;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub label: String,
    pub count: f64,
    pub mass: f64,
    pub r: f64,
}

/// Edge bundle seen from one vertex of a cell: the total weight from that
/// vertex into cell `to` and the common edge length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Link {
    pub to: usize,
    pub weight: f64,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Inner,
    Outer,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryNode {
    pub label: String,
    pub r: f64,
    pub side: Side,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryLink {
    pub node: usize,
    pub weight: f64,
    pub length: f64,
}

/// One endpoint of an edge leaving a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Cell(usize),
    Boundary(usize),
}

#[derive(Debug, Clone)]
pub struct CellDomain {
    cells: Vec<Cell>,
    links: Vec<Vec<Link>>,
    boundary: Vec<BoundaryNode>,
    boundary_links: Vec<Vec<BoundaryLink>>,
}

/// Values on the cells and on the boundary nodes of a domain.
#[derive(Debug, Clone, PartialEq)]
pub struct CellFunction {
    pub cells: Vec<f64>,
    pub boundary: Vec<f64>,
}

impl CellFunction {
    pub fn zeros(domain: &CellDomain) -> Self {
        CellFunction {
            cells: vec![0.0; domain.len()],
            boundary: vec![0.0; domain.boundary().len()],
        }
    }

    pub fn constant(domain: &CellDomain, c: f64) -> Self {
        CellFunction {
            cells: vec![c; domain.len()],
            boundary: vec![c; domain.boundary().len()],
        }
    }

    /// `x -> profile(r(x))` on cells and boundary nodes alike.
    pub fn radial(domain: &CellDomain, profile: impl Fn(f64) -> f64) -> Self {
        CellFunction {
            cells: domain.cells.iter().map(|c| profile(c.r)).collect(),
            boundary: domain.boundary.iter().map(|b| profile(b.r)).collect(),
        }
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        CellFunction {
            cells: self.cells.iter().map(|&v| op(v)).collect(),
            boundary: self.boundary.iter().map(|&v| op(v)).collect(),
        }
    }

    pub fn at(&self, endpoint: Endpoint) -> f64 {
        match endpoint {
            Endpoint::Cell(i) => self.cells[i],
            Endpoint::Boundary(b) => self.boundary[b],
        }
    }

    /// Transfers values from `source` (defined on `from`) to `to` by label.
    /// Boundary nodes of `to` may be cells or boundary nodes of `from`.
    pub fn transfer(&self, from: &CellDomain, to: &CellDomain) -> Result<CellFunction> {
        let mut by_label: HashMap<&str, f64> = HashMap::new();
        for (cell, &v) in from.cells.iter().zip(&self.cells) {
            by_label.insert(&cell.label, v);
        }
        for (node, &v) in from.boundary.iter().zip(&self.boundary) {
            by_label.entry(&node.label).or_insert(v);
        }
        let lookup = |label: &str| {
            by_label
                .get(label)
                .copied()
                .ok_or_else(|| Error::UnknownVertex(label.to_string()))
        };
        Ok(CellFunction {
            cells: to.cells.iter().map(|c| lookup(&c.label)).collect::<Result<_>>()?,
            boundary: to
                .boundary
                .iter()
                .map(|b| lookup(&b.label))
                .collect::<Result<_>>()?,
        })
    }
}

impl CellDomain {
    pub(crate) fn from_parts(
        cells: Vec<Cell>,
        links: Vec<Vec<Link>>,
        boundary: Vec<BoundaryNode>,
        boundary_links: Vec<Vec<BoundaryLink>>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::EmptyDomain);
        }
        for c in &cells {
            if !(c.count.is_finite() && c.count > 0.0) {
                return Err(Error::Precondition(format!(
                    "vertex count {} of cell `{}` is not representable; use a smaller radius",
                    c.count, c.label
                )));
            }
        }
        Ok(CellDomain {
            cells,
            links,
            boundary,
            boundary_links,
        })
    }

    /// Domain on the vertex set `omega` of a materialized graph. Outside
    /// neighbors in `inner` become inner boundary nodes, all others outer.
    pub fn from_graph(
        g: &WeightedGraph,
        metric: &Metric,
        r: &[f64],
        omega: &[usize],
        inner: &HashSet<usize>,
    ) -> Result<Self> {
        if omega.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let mut local = HashMap::with_capacity(omega.len());
        for (i, &x) in omega.iter().enumerate() {
            g.check_complete(x)?;
            if local.insert(x, i).is_some() {
                return Err(Error::InvalidParameter(format!(
                    "vertex `{}` listed twice",
                    g.id(x)
                )));
            }
        }
        let mut boundary_index: HashMap<usize, usize> = HashMap::new();
        let mut boundary = Vec::new();
        let mut cells = Vec::with_capacity(omega.len());
        let mut links = Vec::with_capacity(omega.len());
        let mut boundary_links = Vec::with_capacity(omega.len());
        for &x in omega {
            cells.push(Cell {
                label: g.id(x).to_string(),
                count: 1.0,
                mass: g.mass(x),
                r: r[x],
            });
            let mut inside = Vec::new();
            let mut outside = Vec::new();
            for n in g.neighbors(x) {
                let length = metric.edge_length(g, x, n.vertex)?;
                if let Some(&j) = local.get(&n.vertex) {
                    inside.push(Link {
                        to: j,
                        weight: n.weight,
                        length,
                    });
                } else {
                    let node = *boundary_index.entry(n.vertex).or_insert_with(|| {
                        boundary.push(BoundaryNode {
                            label: g.id(n.vertex).to_string(),
                            r: r[n.vertex],
                            side: if inner.contains(&n.vertex) {
                                Side::Inner
                            } else {
                                Side::Outer
                            },
                        });
                        boundary.len() - 1
                    });
                    outside.push(BoundaryLink {
                        node,
                        weight: n.weight,
                        length,
                    });
                }
            }
            links.push(inside);
            boundary_links.push(outside);
        }
        Self::from_parts(cells, links, boundary, boundary_links)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn links(&self, i: usize) -> &[Link] {
        &self.links[i]
    }

    pub fn boundary(&self) -> &[BoundaryNode] {
        &self.boundary
    }

    pub fn boundary_links(&self, i: usize) -> &[BoundaryLink] {
        &self.boundary_links[i]
    }

    pub fn cell_index(&self, label: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.label == label)
    }

    /// Number of vertices represented.
    pub fn vertex_count(&self) -> f64 {
        self.cells.iter().map(|c| c.count).sum()
    }

    /// Whether some cell stands for more than one vertex.
    pub fn is_reduced(&self) -> bool {
        self.cells.iter().any(|c| c.count != 1.0)
    }

    /// Full weighted degree of a vertex of cell `i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.links[i].iter().map(|l| l.weight).sum::<f64>()
            + self.boundary_links[i].iter().map(|l| l.weight).sum::<f64>()
    }

    pub fn max_r(&self) -> f64 {
        self.cells.iter().map(|c| c.r).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest edge length touching the domain.
    pub fn max_length(&self) -> f64 {
        self.edges().map(|(_, _, _, l)| l).fold(0.0, f64::max)
    }

    /// Largest distance of an inner boundary node to the root.
    pub fn inner_boundary_radius(&self) -> Option<f64> {
        self.boundary
            .iter()
            .filter(|b| b.side == Side::Inner)
            .map(|b| b.r)
            .reduce(f64::max)
    }

    /// Every edge bundle leaving every cell as `(cell, endpoint, weight, length)`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Endpoint, f64, f64)> + '_ {
        (0..self.len()).flat_map(move |i| {
            self.links[i]
                .iter()
                .map(move |l| (i, Endpoint::Cell(l.to), l.weight, l.length))
                .chain(
                    self.boundary_links[i]
                        .iter()
                        .map(move |l| (i, Endpoint::Boundary(l.node), l.weight, l.length)),
                )
        })
    }

    pub fn endpoint_r(&self, e: Endpoint) -> f64 {
        match e {
            Endpoint::Cell(i) => self.cells[i].r,
            Endpoint::Boundary(b) => self.boundary[b].r,
        }
    }

    /// `m_x - sum_y w_xy rho^2(x,y)` per cell.
    pub fn intrinsic_slack(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| {
                let load: f64 = self.links[i]
                    .iter()
                    .map(|l| l.weight * l.length * l.length)
                    .chain(
                        self.boundary_links[i]
                            .iter()
                            .map(|l| l.weight * l.length * l.length),
                    )
                    .sum();
                self.cells[i].mass - load
            })
            .collect()
    }

    pub fn is_intrinsic(&self) -> bool {
        self.intrinsic_slack()
            .iter()
            .zip(&self.cells)
            .all(|(s, c)| *s >= -crate::metric::INTRINSIC_TOL * c.mass)
    }

    /// `Delta f` at a vertex of cell `i`.
    pub fn laplacian(&self, f: &CellFunction, i: usize) -> f64 {
        let fi = f.cells[i];
        let mut acc = 0.0;
        for l in &self.links[i] {
            acc += l.weight * (f.cells[l.to] - fi);
        }
        for l in &self.boundary_links[i] {
            acc += l.weight * (f.boundary[l.node] - fi);
        }
        acc / self.cells[i].mass
    }

    /// Symmetric form of the per-vertex operator `alpha m + D - W` on the
    /// cells, conjugated by `sqrt(count)` so that reduced domains stay
    /// symmetric: off-diagonal entries are `-w_ij sqrt(c_i / c_j)`.
    pub fn operator(&self, alpha: f64) -> SparseSym {
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(self.len());
        for i in 0..self.len() {
            let mut row: Vec<(usize, f64)> =
                vec![(i, alpha * self.cells[i].mass + self.degree(i))];
            for l in &self.links[i] {
                let v = -l.weight * (self.cells[i].count / self.cells[l.to].count).sqrt();
                match row.iter_mut().find(|(j, _)| *j == l.to) {
                    Some(entry) => entry.1 += v,
                    None => row.push((l.to, v)),
                }
            }
            rows.push(row);
        }
        SparseSym::from_rows(rows)
    }

    /// `M^{-1/2} K M^{-1/2}`, whose spectrum is the Dirichlet spectrum.
    pub fn dirichlet_operator(&self) -> SparseSym {
        let scale: Vec<f64> = self.cells.iter().map(|c| 1.0 / c.mass.sqrt()).collect();
        self.operator(0.0).scaled(&scale)
    }

    /// `Q(f) = 1/2 sum_{x,y} w_xy (f(y) - f(x))^2` with `f = 0` off the cells.
    pub fn dirichlet_energy(&self, f: &[f64]) -> f64 {
        let mut q = 0.0;
        for i in 0..self.len() {
            let c = self.cells[i].count;
            for l in &self.links[i] {
                let d = f[l.to] - f[i];
                q += 0.5 * c * l.weight * d * d;
            }
            for l in &self.boundary_links[i] {
                q += c * l.weight * f[i] * f[i];
            }
        }
        q
    }

    /// `sum f^2 m` over the cells.
    pub fn mass_norm2(&self, f: &[f64]) -> f64 {
        self.cells
            .iter()
            .zip(f)
            .map(|(c, v)| c.count * c.mass * v * v)
            .sum()
    }

    /// `sum_{x : lo <= r(x) <= hi} weight(x) m_x` with inclusive bounds.
    pub fn annulus_sum(&self, lo: f64, hi: f64, weight: impl Fn(usize) -> f64) -> f64 {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, c)| within(c.r, lo, hi))
            .map(|(i, c)| c.count * c.mass * weight(i))
            .sum()
    }

    /// Total `m`-measure of the cells.
    pub fn volume(&self) -> f64 {
        self.cells.iter().map(|c| c.count * c.mass).sum()
    }
}

/// Inclusive radius comparison with a relative slack absorbing round-off in
/// prefix sums of edge lengths.
pub fn within(r: f64, lo: f64, hi: f64) -> bool {
    let eps = 1e-9 * hi.abs().max(1.0);
    r >= lo - eps && r <= hi + eps
}

pub fn at_most(r: f64, radius: f64) -> bool {
    r <= radius + 1e-9 * radius.abs().max(1.0)
}
