#![allow(dead_code)]

use posgraph::{GraphBuilder, WeightedGraph};
use rand::rngs::StdRng;
use rand::Rng;

/// Connected random graph on `n` vertices: a random spanning tree plus
/// extra chords. Masses are normalized or random.
pub fn random_graph(rng: &mut StdRng, n: usize, normalized: bool) -> WeightedGraph {
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        edges.push((u, v, rng.random_range(0.1..3.0)));
    }
    let extra = rng.random_range(0..=n);
    for _ in 0..extra {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u != v && !edges.iter().any(|&(a, b, _)| (a, b) == (u, v) || (a, b) == (v, u)) {
            edges.push((u, v, rng.random_range(0.1..3.0)));
        }
    }
    let mut deg = vec![0.0; n];
    for &(u, v, w) in &edges {
        deg[u] += w;
        deg[v] += w;
    }
    let mut b = GraphBuilder::new();
    for (x, d) in deg.iter().enumerate() {
        let m = if normalized { *d } else { rng.random_range(0.2..5.0) };
        b = b.vertex(&format!("v{x}"), m);
    }
    for (u, v, w) in edges {
        b = b.edge(&format!("v{u}"), &format!("v{v}"), w);
    }
    b.build().unwrap()
}

pub fn random_vec(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-2.0..2.0)).collect()
}

/// Random vector supported on roughly half of the vertices.
pub fn random_sparse(rng: &mut StdRng, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random_bool(0.5) { rng.random_range(-2.0..2.0) } else { 0.0 })
        .collect()
}

/// Piecewise linear profile with slopes in `[-a, a]`.
pub fn lipschitz_profile(rng: &mut StdRng, a: f64, knots: usize, span: f64) -> impl Fn(f64) -> f64 {
    let step = span / knots as f64;
    let slopes: Vec<f64> = (0..=knots).map(|_| rng.random_range(-a..=a)).collect();
    let offset: f64 = rng.random_range(-3.0..3.0);
    move |t: f64| {
        let mut v = offset;
        let mut x = 0.0;
        for &s in &slopes {
            let len = (t - x).clamp(0.0, step);
            v += s * len;
            x += step;
            if t <= x {
                break;
            }
        }
        if t > x {
            v += slopes[slopes.len() - 1] * (t - x);
        }
        v
    }
}
