//! Acceptance criteria, run in order: the oracle gate first, then the
//! numerical criteria. Each check prints one PASS/FAIL line.

mod common;

use std::f64::consts::LN_2;
use std::time::Instant;

use posgraph::decay::{
    a0_inverse, a_inverse, a_mu, decay_condition, exp_gradient_bounds, q_factor, rate_identity, rate_target,
    verify_decay, DecayProblem, Verdict,
};
use posgraph::domain::{CellFunction, Side};
use posgraph::entropy::{brooks_check, volume_entropy};
use posgraph::family::vertex_boundary;
use posgraph::metric::{lipschitz_constant, verify_intrinsic_at, LipschitzScope};
use posgraph::operators::{
    dirichlet_bottom, domain_bottom, domain_defect, form_identity_residual, gamma_at, green_identity_residual,
    laplacian_apply, rayleigh_quotient, spectral_bottom_estimate,
};
use posgraph::oracles::{
    brute_eigen, brute_recurrence, brute_resolvent, brute_sum, jacobi_eigenvalues, OracleResult, RecurrenceKind,
};
use posgraph::potential::{
    barrier, classify_parabolic, harmonic_limit_decay, harmonic_on_region, resolvent, resolvent_truncated,
    tree_oracle, verify_resolvent_decay, Parabolicity,
};
use posgraph::{build_family, FamilySpec, GraphBuilder, GraphFamily, MassLaw, Metric, MetricKind, MetricSpec, Region};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Gate {
    criterion: &'static str,
    failures: Vec<String>,
    count: usize,
}

impl Gate {
    fn new(criterion: &'static str) -> Self {
        Gate {
            criterion,
            failures: Vec::new(),
            count: 0,
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        self.count += 1;
        println!("  [{}] {name}: {detail}", if ok { "ok" } else { "FAIL" });
        if !ok {
            self.failures.push(name.to_string());
        }
    }

    /// Oracle value against the frozen number and the main path.
    fn oracle(&mut self, o: &OracleResult, frozen: f64, main: f64) {
        let ok = o.agrees(frozen) && o.agrees(main);
        self.check(
            &o.quantity,
            ok,
            format!("oracle {} ({}) frozen {frozen} main {main} tol {}", o.value, o.method, o.tolerance),
        );
    }

    fn finish(self, start: Instant, limit_s: f64, all: &mut Vec<String>) -> bool {
        let secs = start.elapsed().as_secs_f64();
        let ok = self.failures.is_empty() && secs <= limit_s;
        println!(
            "{} {}: {} checks, {} failed, {secs:.2} s (limit {limit_s} s)",
            if ok { "PASS" } else { "FAIL" },
            self.criterion,
            self.count,
            self.failures.len()
        );
        if !ok {
            all.push(format!("{}: {:?}", self.criterion, self.failures));
        }
        ok
    }
}

fn tree(n: usize) -> GraphFamily {
    build_family(&FamilySpec::tree(n)).unwrap()
}

fn ray(mass: MassLaw) -> GraphFamily {
    build_family(&FamilySpec::ray(0.5, mass)).unwrap()
}

fn d() -> Metric {
    Metric::combinatorial()
}

fn root_end(root: &str) -> Region {
    Region::End {
        omega: vec![root.into()],
        index: 0,
    }
}

fn range(lo: usize, hi: usize) -> Vec<f64> {
    (lo..=hi).map(|r| r as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

const SPECTRAL: [f64; 4] = [60.0, 120.0, 240.0, 480.0];

fn mu_t3() -> f64 {
    1.0 - 2.0 * 2f64.sqrt() / 3.0
}

/// Two adjacent tree vertices, their other neighbors as frontier.
fn t3_pair() -> posgraph::WeightedGraph {
    let mut b = GraphBuilder::new().vertex("a", 3.0).vertex("b", 3.0).edge("a", "b", 1.0);
    for (c, p) in [("a1", "a"), ("a2", "a"), ("b1", "b"), ("b2", "b")] {
        b = b.vertex_with_degree(c, 3.0, 3.0).edge(c, p, 1.0);
    }
    b.build().unwrap()
}

fn criterion_8(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 8 (oracle gate)");
    let t3 = tree(3);

    // Counting on T_3: sphere sums from the explicit vertex list.
    for r in [1usize, 4, 8] {
        let snap = t3.materialize(&d(), r as f64).unwrap();
        let brute = OracleResult::new(&format!("|B_{r}| in T_3"), snap.ball().len() as f64, "enumeration", 0.0);
        let main = t3.domain(&d(), &Region::Whole, r as f64).unwrap().vertex_count();
        g.oracle(&brute, 3.0 * 2f64.powi(r as i32) - 2.0, main);
    }
    let ball2 = t3.ball(&d(), 2.0).unwrap();
    g.check("T_3 ball of radius 2", ball2.len() == 10, format!("{} vertices", ball2.len()));
    let ann = t3.annulus(&d(), 1.0, 2.0).unwrap();
    g.check("T_3 annulus [1,2]", ann.len() == 9, format!("{} vertices", ann.len()));
    for n in [1usize, 3, 6] {
        let lo = n as f64;
        let brute = brute_sum(&t3, &d(), |_, _| 1.0 / 3.0, lo, lo + 3.0).unwrap();
        let o = OracleResult::new(&format!("|A_{n}^{}| vertices in T_3", n + 3), brute, "compensated vertex sum", 1e-12);
        let main = t3.annulus(&d(), lo, lo + 3.0).unwrap().len() as f64;
        g.oracle(&o, 45.0 * 2f64.powi(n as i32 - 1), main);
        let mass = brute_sum(&t3, &d(), |_, _| 1.0, lo, lo + 3.0).unwrap();
        let o = OracleResult::new(&format!("mass of A_{n}^{} in T_3", n + 3), mass, "compensated vertex sum", 1e-12);
        let dom = t3.domain(&d(), &Region::Whole, lo + 4.0).unwrap();
        g.oracle(&o, 3.0 * 45.0 * 2f64.powi(n as i32 - 1), dom.annulus_sum(lo, lo + 3.0, |_| 1.0));
    }
    {
        let snap = t3.materialize(&d(), 3.0).unwrap();
        let k: Vec<usize> = snap.ball().into_iter().filter(|&x| snap.level[x] <= 2).collect();
        let vb = vertex_boundary(&snap.graph, &k).unwrap();
        let depth3 = vb.iter().all(|&x| snap.level[x] == 3);
        g.check("vertex boundary of B_2 in T_3", vb.len() == 12 && depth3, format!("{} vertices", vb.len()));
    }
    // Path metric on the explicit-mass ray: prefix sums of edge lengths.
    {
        let ray_e = ray(MassLaw::Explicit);
        let metric = ray_e.metric(&MetricSpec::DefaultIntrinsic).unwrap();
        let snap = ray_e.materialize(&metric, 10.0).unwrap();
        let k = 7usize;
        let mut r = 0.0;
        for n in 0..k {
            let x = snap.graph.require(&n.to_string()).unwrap();
            let y = snap.graph.require(&(n + 1).to_string()).unwrap();
            r += metric.edge_length(&snap.graph, x, y).unwrap();
        }
        let ball = ray_e.ball(&metric, r).unwrap();
        g.check(
            "ray prefix-sum ball",
            ball.len() == k + 1 && (r - k as f64 / 3f64.sqrt()).abs() < 1e-12,
            format!("R = {r}, {} vertices", ball.len()),
        );
    }
    // Intrinsic slack and default lengths.
    {
        let snap = t3.materialize(&d(), 3.0).unwrap();
        let inner: Vec<usize> = snap.ball().into_iter().filter(|&x| snap.level[x] < 3).collect();
        let rep = verify_intrinsic_at(&snap.graph, &Metric::uniform(2.0).unwrap(), &inner);
        let worst = rep.map(|r| r.worst).unwrap_or(f64::NAN);
        g.check("T_3 slack with lengths 2", worst == -9.0 && worst < 0.0, format!("worst slack {worst}"));
        let gq = GraphBuilder::new()
            .vertex_with_degree("x", 4.0, 1.0)
            .vertex_with_degree("y", 4.0, 1.0)
            .edge("x", "y", 1.0)
            .build()
            .unwrap();
        let m = posgraph::metric::default_intrinsic(&gq).unwrap();
        let l = m.edge_length(&gq, 0, 1).unwrap();
        let s = posgraph::metric::jump_size(&gq, &m).unwrap();
        g.check("default length for m = 4, deg = 1", l == 2.0 && s == 2.0, format!("l = {l}, s = {s}"));
        let (k, w) = (5usize, 0.7);
        let mut b = GraphBuilder::new().vertex("c", 1.0);
        for i in 0..k {
            b = b.vertex(&format!("l{i}"), 1.0).edge("c", &format!("l{i}"), w);
        }
        let star = b.build().unwrap();
        let m = posgraph::metric::default_intrinsic(&star).unwrap();
        let l = m.edge_length(&star, 0, 1).unwrap();
        let expect = 1.0 / (k as f64 * w).sqrt();
        g.check("star default length", (l - expect).abs() < 1e-15, format!("{l} vs {expect}"));
        let r = snap.r.clone();
        let lip = lipschitz_constant(&snap.graph, &d(), &r, LipschitzScope::AllPairs).unwrap();
        g.check("distance to root is 1-Lipschitz", lip.constant == 1.0, format!("{}", lip.constant));
    }
    // Local operators.
    {
        let snap = t3.materialize(&d(), 5.0).unwrap();
        let f: Vec<f64> = snap.level.iter().map(|&n| 0.5f64.powi(n as i32)).collect();
        // Barrier on the end under `o.0`: the root is its boundary.
        let interior: Vec<usize> = (0..snap.graph.len())
            .filter(|&x| snap.graph.id(x).starts_with("o.0") && snap.level[x] < 5)
            .collect();
        let worst = interior
            .iter()
            .map(|&x| laplacian_apply(&snap.graph, &f, x).unwrap().abs())
            .fold(0.0, f64::max);
        g.check("barrier 2^-n is harmonic in the end", worst < 1e-15, format!("max |Delta f| = {worst}"));
        let roots = brute_recurrence(3, RecurrenceKind::Barrier, 0.0).unwrap();
        g.oracle(
            &OracleResult::new("barrier decay root N = 3", roots.decay, "quadratic formula", 1e-15),
            0.5,
            0.5,
        );
        let dom = t3.domain(&d(), &root_end("o"), 20.0).unwrap();
        let fb = CellFunction::radial(&dom, |r| 0.5f64.powi(r as i32));
        let defect = domain_defect(&dom, &fb, 0.0).unwrap();
        g.check("barrier defect at mu = 0", defect.min.abs() < 1e-15, format!("{}", defect.min));
    }
    {
        let e = GraphBuilder::new()
            .vertex("x", 1.0)
            .vertex("y", 1.0)
            .edge("x", "y", 1.0)
            .build()
            .unwrap();
        let ind = [1.0, 0.0];
        let gm = gamma_at(&e, &ind, &ind, 0).unwrap();
        g.check("carre du champ of an indicator", gm == 0.5, format!("{gm}"));
        let f = [0.3, -1.1];
        let gr = green_identity_residual(&e, &f, &f).unwrap();
        let hand = 1.0 * (f[1] - f[0]) * (f[1] - f[0]);
        g.check(
            "Green identity on one edge",
            (gr.lhs - hand).abs() < 1e-15 && (gr.rhs - hand).abs() < 1e-15,
            format!("lhs {} rhs {} hand {hand}", gr.lhs, gr.rhs),
        );
    }
    {
        let p = t3_pair();
        let mut f = vec![0.0; p.len()];
        f[0] = 1.0;
        f[1] = 1.0;
        let q1 = rayleigh_quotient(&p, &f).unwrap();
        f[1] = -1.0;
        let q2 = rayleigh_quotient(&p, &f).unwrap();
        g.check(
            "Rayleigh quotients on a T_3 pair",
            (q1 - 2.0 / 3.0).abs() < 1e-15 && (q2 - 4.0 / 3.0).abs() < 1e-15,
            format!("{q1}, {q2}"),
        );
        let ev = brute_eigen(&p, &[0, 1]).unwrap();
        let main = dirichlet_bottom(&p, &[0, 1]).unwrap().mu1;
        g.oracle(&OracleResult::new("mu_1 of a T_3 pair", ev[0], "Jacobi rotations", 1e-14), 2.0 / 3.0, main);
        g.check("top of the T_3 pair", (ev[1] - 4.0 / 3.0).abs() < 1e-14, format!("{}", ev[1]));
        let single = GraphBuilder::new()
            .vertex("x", 1.0)
            .vertex_with_degree("y", 1.0, 1.0)
            .edge("x", "y", 1.0)
            .build()
            .unwrap();
        let ev = brute_eigen(&single, &[0]).unwrap();
        g.check("single normalized vertex", ev == vec![1.0], format!("{ev:?}"));
        let path = GraphBuilder::new()
            .vertex_with_degree("a", 2.0, 2.0)
            .vertex("b", 2.0)
            .vertex("c", 2.0)
            .vertex("d", 2.0)
            .vertex_with_degree("e", 2.0, 2.0)
            .edge("a", "b", 1.0)
            .edge("b", "c", 1.0)
            .edge("c", "d", 1.0)
            .edge("d", "e", 1.0)
            .build()
            .unwrap();
        let ev = brute_eigen(&path, &[1, 2, 3]).unwrap();
        let main = dirichlet_bottom(&path, &[1, 2, 3]).unwrap().mu1;
        let closed = 1.0 - (std::f64::consts::PI / 4.0).cos();
        g.oracle(&OracleResult::new("mu_1 of a 3-path interior", ev[0], "Jacobi rotations", 1e-12), closed, main);
    }
    // Cone spectrum: tridiagonal Toeplitz with off-diagonal sqrt(2)/3.
    for levels in [10usize, 60] {
        let off = 2f64.sqrt() / 3.0;
        let mut a = vec![vec![0.0; levels]; levels];
        for i in 0..levels {
            a[i][i] = 1.0;
            if i + 1 < levels {
                a[i][i + 1] = -off;
                a[i + 1][i] = -off;
            }
        }
        let ev = jacobi_eigenvalues(a)[0];
        let closed = 1.0 - 2.0 * off * (std::f64::consts::PI / (levels as f64 + 1.0)).cos();
        let main = domain_bottom(&t3.domain(&d(), &root_end("o"), levels as f64).unwrap()).unwrap().0;
        g.oracle(
            &OracleResult::new(&format!("mu_1 of the T_3 end to depth {levels}"), ev, "Jacobi rotations", 1e-12),
            closed,
            main,
        );
    }
    {
        let est = spectral_bottom_estimate(&t3, &d(), &root_end("o"), &SPECTRAL).unwrap();
        let ok = est.interval[0] <= mu_t3() && mu_t3() <= est.interval[1] && rel(est.extrapolated, mu_t3()) < 1e-5;
        g.check(
            "T_3 end spectral limit",
            ok,
            format!("interval {:?}, extrapolated {}", est.interval, est.extrapolated),
        );
    }
    // Rates.
    {
        // (e^a - 1)^2 / 2 = 1/2 by bisection in the test.
        let (mut lo, mut hi) = (0.0f64, 5.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (mid.exp() - 1.0).powi(2) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let main = a_mu(0.5, 0.0, 1.0, MetricKind::PathLength).unwrap().a;
        g.oracle(&OracleResult::new("a_0(1/2), path kind, s = 1", lo, "bisection", 1e-14), LN_2, main);
        let x = 0.5 * LN_2;
        let hand = (2f64.sqrt() - 1.0).powi(2) / 3.0;
        g.oracle(
            &OracleResult::new("a_0^-1(ln 2 / 2)", hand, "hand evaluation", 1e-15),
            0.057_190_958_417_936_68,
            a0_inverse(x).unwrap(),
        );
        g.check("a_0^-1(ln 2 / 2) = mu_1(T_3)", (hand - mu_t3()).abs() < 1e-15, format!("{hand}"));
        let a = x;
        let mut worst: f64 = 0.0;
        for n in 0..30 {
            let n = n as f64;
            let lhs = ((a * (n + 1.0)).exp() - (a * n).exp()).powi(2);
            let rhs = q_factor(a) * ((2.0 * a * n).exp() + (2.0 * a * (n + 1.0)).exp());
            worst = worst.max(lhs / rhs);
        }
        g.check("single-edge bound for h = a r", worst <= 1.0 + 1e-12, format!("max ratio {worst}"));
    }
    // Decay of the barrier: annulus sums in closed form.
    {
        let dom = t3.domain(&d(), &Region::Whole, 14.0).unwrap();
        for n in [2usize, 6] {
            let lo = n as f64;
            let brute = brute_sum(&t3, &d(), |s, x| 0.25f64.powi(s.level[x] as i32), lo, lo + 3.0).unwrap();
            let closed: f64 = (0..4)
                .map(|k| 3.0 * 2f64.powi((n + k) as i32 - 1) * 3.0 * 0.25f64.powi((n + k) as i32))
                .sum();
            let main = dom.annulus_sum(lo, lo + 3.0, |i| 0.25f64.powi(dom.cell(i).r as i32));
            g.oracle(
                &OracleResult::new(&format!("barrier^2 mass on A_{n}^{}", n + 3), brute, "compensated vertex sum", 1e-13),
                closed,
                main,
            );
        }
    }
    {
        let a = 0.5 * LN_2;
        let dom = t3.domain(&d(), &root_end("o"), 40.0).unwrap();
        let radii = range(4, 30);
        let bar = decay_condition(&dom, &CellFunction::radial(&dom, |r| 0.5f64.powi(r as i32)), a, 1.0, &radii).unwrap();
        g.check("barrier weighted annulus sums vanish", bar.subsequence_vanishing, format!("last {}", bar.rows.last().unwrap().annulus));
        let one = decay_condition(&dom, &CellFunction::constant(&dom, 1.0), a, 1.0, &radii).unwrap();
        let sums: Vec<f64> = one.rows.iter().map(|r| r.annulus).collect();
        let flat = sums.iter().all(|v| rel(*v, sums[0]) < 1e-12);
        g.check("constant on T_3 end: weighted annulus sums constant", flat, format!("{} .. {}", sums[0], sums[sums.len() - 1]));
        let rdom = ray(MassLaw::Normalized).domain(&d(), &root_end("0"), 60.0).unwrap();
        let r1 = decay_condition(&rdom, &CellFunction::constant(&rdom, 1.0), a, 1.0, &radii).unwrap();
        g.check("constant on finite-volume ray: sums vanish", r1.subsequence_vanishing, format!("last {}", r1.rows.last().unwrap().annulus));
    }
    // Resolvent on trees.
    {
        let brute = brute_resolvent(&t3, &d(), 0.0, 6.0).unwrap();
        let main = resolvent_truncated(&t3, &d(), 0.0, 6.0).unwrap();
        let o = brute.iter().find(|r| r.0 == "o.0.0.0").unwrap().2;
        g.oracle(
            &OracleResult::new("truncated Green kernel at depth 3, R = 6", o, "dense elimination", 1e-12),
            {
                // Radial solve with zero at depth 7, by hand: g(n) = A 2^-n + B.
                let (a, b) = (2.0 / 3.0, -(2.0 / 3.0) * 2f64.powi(-7));
                a * 0.125 + b
            },
            main.value("o.0.0.0").unwrap(),
        );
        let r0 = brute_recurrence(3, RecurrenceKind::Green, 0.0).unwrap();
        let t = tree_oracle(3, 0.0).unwrap();
        g.oracle(&OracleResult::new("b for N = 3, alpha = 0", r0.b, "quadratic formula", 1e-15), 2.0, t.b);
        let k40 = resolvent_truncated(&t3, &d(), 0.0, 40.0).unwrap();
        g.oracle(
            &OracleResult::new("g_0 at depth 5 on T_3", r0.g0.unwrap() * r0.decay.powi(5), "recurrence", 1e-8),
            2.0 / 3.0 / 32.0,
            k40.rows[5].g,
        );
        let r1 = brute_recurrence(3, RecurrenceKind::Green, 1.0).unwrap();
        let t1 = tree_oracle(3, 1.0).unwrap();
        g.oracle(&OracleResult::new("b for N = 3, alpha = 1", r1.b, "quadratic formula", 1e-15), 3.0 + 7f64.sqrt(), t1.b);
        let k1 = resolvent_truncated(&t3, &d(), 1.0, 40.0).unwrap();
        let worst = (0..=10)
            .map(|n| rel(k1.rows[n].g, r1.g0.unwrap() * r1.decay.powi(n as i32)))
            .fold(0.0, f64::max);
        g.check("g_1 on T_3 against the recurrence", worst < 1e-8, format!("max rel err {worst:e}"));
        let b1 = 3.0 + 7f64.sqrt();
        g.check(
            "g_1 closed form b^-n / (3 (2 - 1/b))",
            rel(k1.rows[4].g, b1.powi(-4) / (3.0 * (2.0 - 1.0 / b1))) < 1e-8,
            format!("{}", k1.rows[4].g),
        );
        let r4 = brute_recurrence(4, RecurrenceKind::Green, 0.0).unwrap();
        let t4 = tree_oracle(4, 0.0).unwrap();
        g.oracle(&OracleResult::new("b for N = 4, alpha = 0", r4.b, "quadratic formula", 1e-15), 3.0, t4.b);
        g.oracle(&OracleResult::new("g_0(x_0, x_0) on T_4", r4.g0.unwrap(), "recurrence", 1e-15), 3.0 / 8.0, t4.g0);
        let r41 = brute_recurrence(4, RecurrenceKind::Green, 1.0).unwrap();
        g.oracle(
            &OracleResult::new("b for N = 4, alpha = 1", r41.b, "quadratic formula", 1e-15),
            (8.0 + 52f64.sqrt()) / 2.0,
            tree_oracle(4, 1.0).unwrap().b,
        );
        let lim = resolvent(&t3, &d(), 0.0, 1e-6, &[10.0, 20.0, 30.0, 40.0]).unwrap();
        let geometric = lim.increments.windows(2).all(|w| w[1] < 0.01 * w[0]);
        g.check("Green limit increments decay geometrically", lim.converged && geometric, format!("{:?}", lim.increments));
    }
    // Harmonic measures.
    {
        let one = |_: &str| Ok(1.0);
        let (dom, f) = harmonic_on_region(&t3, &d(), &root_end("o"), 25.0, &one).unwrap();
        let res = (0..dom.len()).map(|i| dom.laplacian(&f, i).abs()).fold(0.0, f64::max);
        let err = (0..10).map(|n| (f.cells[n] - 0.5f64.powi(n as i32 + 1)).abs()).fold(0.0, f64::max);
        g.check(
            "f_25 on the T_3 end",
            res < 1e-12 && err < 1e-6,
            format!("harmonic residual {res:e}, distance to 2^-n {err:e}"),
        );
        let rn = ray(MassLaw::Normalized);
        let (dom, f) = harmonic_on_region(&rn, &d(), &root_end("0"), 20.0, &one).unwrap();
        let outer = dom.boundary().iter().find(|b| b.side == Side::Outer).unwrap().r;
        let k = outer as i32;
        let worst = dom
            .cells()
            .iter()
            .zip(&f.cells)
            .map(|(c, v)| {
                let n = c.r as i32;
                let resist = (2f64.powi(n) - 1.0) / (2f64.powi(k) - 1.0);
                (v - (1.0 - resist)).abs()
            })
            .fold(0.0, f64::max);
        g.check("ray harmonic measure by resistance sums", worst < 1e-12, format!("max err {worst:e}"));
    }
    // Entropy.
    {
        let e = volume_entropy(&ray(MassLaw::Explicit), &d(), &range(1, 30)).unwrap();
        let direct: f64 = (11..200).map(|n| 0.5f64.powi(n)).sum();
        g.oracle(
            &OracleResult::new("tail of the explicit ray beyond 10", direct, "direct sum", 1e-14),
            2f64.powi(-10),
            e.samples[9][1],
        );
        g.check("finite-volume entropy", (e.estimate.unwrap() - LN_2).abs() < 1e-9, format!("{:?}", e.estimate));
        let mu4 = 1.0 - 3f64.sqrt() / 2.0;
        g.oracle(
            &OracleResult::new("a_0^-1(ln 3 / 2)", a0_inverse(0.5 * 3f64.ln()).unwrap(), "closed form", 1e-14),
            mu4,
            tree_oracle(4, 0.0).unwrap().mu1,
        );
    }
    g.finish(start, 120.0, all)
}

fn criterion_1(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 1 (tree spectrum)");
    let t3 = tree(3);
    let mut values = Vec::new();
    for r in [5.0, 10.0, 20.0, 30.0] {
        let mu = domain_bottom(&t3.domain(&d(), &Region::Whole, r).unwrap()).unwrap().0;
        values.push(mu);
    }
    let monotone = values.windows(2).all(|w| w[1] < w[0]);
    g.check("monotone over R = 5, 10, 20, 30", monotone, format!("{values:?}"));
    let v = values[3];
    g.check("R = 30 in (0.0571910, 0.0621910)", v > 0.0571910 && v < 0.0621910, format!("{v}"));
    // The reduced operator against the full ball at R = 10 (3070 vertices).
    let snap = t3.materialize(&d(), 10.0).unwrap();
    let full = dirichlet_bottom(&snap.graph, &snap.ball()).unwrap().mu1;
    g.check("radial reduction agrees with the full ball", (full - values[1]).abs() < 1e-9, format!("{full}"));
    g.finish(start, 60.0, all)
}

fn criterion_2(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 2 (Green kernel)");
    let k = resolvent_truncated(&tree(3), &d(), 0.0, 40.0).unwrap();
    for n in 0..=10 {
        let row = &k.rows[n];
        let exact = 2.0 / 3.0 * 0.5f64.powi(n as i32);
        g.check(&format!("depth {n}"), rel(row.g, exact) <= 1e-8 && row.r == n as f64, format!("{} vs {exact}", row.g));
    }
    g.finish(start, 60.0, all)
}

fn criterion_3(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 3 (resolvent decay sharpness)");
    let a = 0.5 * LN_2;
    let rep = verify_resolvent_decay(&tree(3), &d(), 0.0, &range(6, 14), &SPECTRAL, 0.05).unwrap();
    let slope = rep.slope_fit.unwrap_or(f64::NAN);
    g.check("slope against -2a, a = ln 2 / 2", rel(slope, -2.0 * a) <= 0.05, format!("{slope}"));
    g.check("verdict", rep.verdict == Verdict::Pass, format!("{:?}", rep.verdict));
    let rep1 = verify_resolvent_decay(&tree(3), &d(), 1.0, &range(6, 14), &SPECTRAL, 0.05).unwrap();
    let a1 = a_mu(mu_t3(), -1.0, 1.0, MetricKind::Combinatorial).unwrap().a;
    let s1 = rep1.slope_fit.unwrap_or(f64::NAN);
    g.check("alpha = 1 slope against -2 a_{-1}", rel(s1, -2.0 * a1) <= 0.05, format!("{s1} vs {}", -2.0 * a1));
    let rep4 = verify_resolvent_decay(&tree(4), &d(), 0.0, &range(6, 14), &SPECTRAL, 0.05).unwrap();
    let s4 = rep4.slope_fit.unwrap_or(f64::NAN);
    g.check("T_4 slope against -ln 3", rel(s4, -(3f64.ln())) <= 0.05, format!("{s4}"));
    g.finish(start, 60.0, all)
}

fn criterion_4(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 4 (decay estimate)");
    let t3 = tree(3);
    let region = root_end("o");
    let radii = range(4, 20);
    let dom = t3.domain(&d(), &region, 40.0).unwrap();
    let f = CellFunction::radial(&dom, |r| 0.5f64.powi(r as i32));
    let est = spectral_bottom_estimate(&t3, &d(), &region, &SPECTRAL).unwrap();
    let rep = verify_decay(&DecayProblem {
        domain: &dom,
        f: &f,
        mu: 0.0,
        r0: 1.0,
        radii: &radii,
        l_seq: &[],
        mu1: &est,
        s: 1.0,
        kind: MetricKind::Combinatorial,
    })
    .unwrap();
    let every = rep.rows.iter().all(|r| r.lhs <= r.rhs);
    g.check(
        "LHS <= C e^{-2aR} at every R in 4..20",
        rep.verdict == Verdict::Pass && every && rep.rows.len() == radii.len(),
        format!("verdict {:?}, max ratio {}", rep.verdict, rep.rows.iter().map(|r| r.ratio).fold(0.0, f64::max)),
    );
    let c_closed = 7.0 * (10.0 * rep.a).exp() / (rep.mu1_interval[0]);
    g.check("constant C = 7 e^{10as} / (s^2 (mu_1 - mu))", rel(rep.c, c_closed) < 1e-12, format!("{}", rep.c));
    let slope = rep.slope_fit.unwrap_or(f64::NAN);
    g.check("LHS slope against -2a, a = ln 2 / 2", rel(slope, -LN_2) <= 0.05, format!("{slope}"));

    let one = CellFunction::constant(&dom, 1.0);
    let rep = verify_decay(&DecayProblem {
        domain: &dom,
        f: &one,
        mu: 0.0,
        r0: 1.0,
        radii: &radii,
        l_seq: &[],
        mu1: &est,
        s: 1.0,
        kind: MetricKind::Combinatorial,
    })
    .unwrap();
    g.check("constant on the T_3 end", rep.verdict == Verdict::HypothesisNotMet, format!("{:?}", rep.verdict));

    let rn = ray(MassLaw::Normalized);
    let rdom = rn.domain(&d(), &root_end("0"), 60.0).unwrap();
    let rest = spectral_bottom_estimate(&rn, &d(), &root_end("0"), &SPECTRAL).unwrap();
    let rep = verify_decay(&DecayProblem {
        domain: &rdom,
        f: &CellFunction::constant(&rdom, 1.0),
        mu: 0.0,
        r0: 1.0,
        radii: &range(4, 40),
        l_seq: &[],
        mu1: &rest,
        s: 1.0,
        kind: MetricKind::Combinatorial,
    })
    .unwrap();
    g.check("constant on the parabolic ray end", rep.verdict == Verdict::Pass, format!("{:?}", rep.verdict));

    let hd = harmonic_limit_decay(&t3, &d(), &region, &|_| Ok(1.0), &[30.0, 40.0, 50.0], &SPECTRAL, 1.0, &radii, 1e-6)
        .unwrap();
    let s = hd.report.slope_fit.unwrap_or(f64::NAN);
    g.check(
        "harmonic limit with boundary 1",
        hd.report.verdict == Verdict::Pass && rel(s, -LN_2) <= 0.05,
        format!("{:?}, slope {s}", hd.report.verdict),
    );

    let omega: Vec<String> = ["o.0.0", "o.1.0", "o.2.0"].iter().map(|s| s.to_string()).collect();
    let ends = t3.ends(&omega).unwrap();
    let index = ends.iter().position(|e| e.vertices.iter().any(|v| v == "o")).unwrap();
    let mixed = Region::End { omega, index };
    let data = |id: &str| {
        Ok(match id {
            "o.0.0" => 1.0,
            "o.1.0" => -1.0,
            _ => 0.0,
        })
    };
    let hd = harmonic_limit_decay(&t3, &d(), &mixed, &data, &[11.0, 13.0, 15.0], &[9.0, 11.0, 13.0, 15.0], 2.0, &range(5, 10), 1e-3);
    match hd {
        Ok(hd) => g.check("sign-mixed data on a two-branch base set", hd.report.verdict == Verdict::Pass, format!("{:?}", hd.report.verdict)),
        Err(e) => g.check("sign-mixed data on a two-branch base set", false, e.to_string()),
    }
    g.finish(start, 120.0, all)
}

fn criterion_5(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 5 (parabolicity)");
    let radii = range(4, 24);
    for n in [3usize, 4, 5] {
        let c = classify_parabolic(&tree(n), &d(), &root_end("o"), &radii, &SPECTRAL, 1e-6).unwrap();
        g.check(
            &format!("T_{n} end"),
            c.verdict == Parabolicity::NonParabolic && c.agreeing() >= 2,
            format!("{:?} with {} agreeing", c.verdict, c.agreeing()),
        );
    }
    let c = classify_parabolic(&ray(MassLaw::Normalized), &d(), &root_end("0"), &radii, &SPECTRAL, 1e-6).unwrap();
    g.check(
        "2^-n weighted normalized ray",
        c.verdict == Parabolicity::Parabolic && c.agreeing() >= 2,
        format!("{:?} with {} agreeing", c.verdict, c.agreeing()),
    );
    let b = barrier(&tree(3), &d(), &root_end("o"), 1e-6, &[10.0, 20.0, 30.0]).unwrap();
    g.check("T_3 barrier infimum", b.evidence == Parabolicity::NonParabolic, format!("{:?}", b.probes));
    g.finish(start, 60.0, all)
}

fn criterion_6(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 6 (entropy bound equality)");
    let rep = brooks_check(&tree(3), &d(), &[2.0, 4.0, 8.0], &SPECTRAL, &[0.01, 0.005], &range(1, 30), 0.02).unwrap();
    let closed = rep.closed_form_residual.unwrap_or(f64::NAN);
    g.check("closed forms", closed <= 1e-9, format!("residual {closed:e}"));
    let bound = rep.bound.unwrap_or(f64::NAN);
    let r = rel(rep.mu_e_evidence, bound);
    g.check(
        "numeric mu_e against a_0^-1(entropy/2)",
        r <= 0.02,
        format!("mu_e {} bound {bound} rel {r:e}", rep.mu_e_evidence),
    );
    g.check("growth rows and inequality", rep.verdict == Verdict::Pass, format!("{:?}", rep.verdict));
    let t4 = brooks_check(&tree(4), &d(), &[2.0, 4.0], &SPECTRAL, &[0.01], &range(1, 20), 0.02).unwrap();
    g.check("T_4", t4.verdict == Verdict::Pass, format!("bound {:?} mu_e {}", t4.bound, t4.mu_e_evidence));
    let ray_e = ray(MassLaw::Explicit);
    let path = ray_e.metric(&MetricSpec::DefaultIntrinsic).unwrap();
    let rb = brooks_check(&ray_e, &path, &[2.0, 4.0], &SPECTRAL, &[0.01], &range(1, 20), 0.02).unwrap();
    let tail_ok = rb.growth.iter().all(|row| row.holds) && !rb.growth.is_empty();
    let slope = rb.entropy.slope_fit.unwrap_or(f64::NAN);
    let two_a = rb.growth.first().map_or(f64::NAN, |row| 2.0 * row.a);
    g.check("finite-volume ray tail", tail_ok && slope >= two_a, format!("slope {slope}, 2a {two_a}"));
    g.finish(start, 60.0, all)
}

fn criterion_7(all: &mut Vec<String>) -> bool {
    let start = Instant::now();
    let mut g = Gate::new("criterion 7 (identity property suite)");
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut green_worst, mut form_worst): (f64, f64) = (0.0, 0.0);
    for i in 0..100 {
        let n = rng.random_range(2..=50);
        let gr = common::random_graph(&mut rng, n, i % 2 == 0);
        let f = common::random_vec(&mut rng, n);
        let h = common::random_sparse(&mut rng, n);
        let a = green_identity_residual(&gr, &f, &h).unwrap();
        let b = form_identity_residual(&gr, &f, &h).unwrap();
        green_worst = green_worst.max(a.residual / a.scale.max(f64::MIN_POSITIVE));
        form_worst = form_worst.max(b.residual / b.scale.max(f64::MIN_POSITIVE));
    }
    g.check("Green identity on 100 graphs", green_worst <= 1e-12, format!("worst relative residual {green_worst:e}"));
    g.check("form identity on 100 graphs", form_worst <= 1e-12, format!("worst relative residual {form_worst:e}"));

    let mut violations = 0;
    let mut edges = 0;
    for i in 0..1000 {
        let n = rng.random_range(3..=20);
        let normalized = i % 2 == 0;
        let gr = common::random_graph(&mut rng, n, true);
        let metric = if normalized {
            Metric::combinatorial()
        } else {
            posgraph::metric::default_intrinsic(&common::random_graph(&mut rng, 2, false)).unwrap();
            posgraph::metric::default_intrinsic(&gr).unwrap()
        };
        let s = posgraph::metric::jump_size(&gr, &metric).unwrap();
        let a = rng.random_range(0.01..2.0);
        let r = metric.distances(&gr, 0).unwrap();
        let p = common::lipschitz_profile(&mut rng, a, 6, r.iter().copied().fold(0.0, f64::max) + 1.0);
        let h: Vec<f64> = r.iter().map(|&t| p(t)).collect();
        edges += gr.edge_count();
        violations += exp_gradient_bounds(&gr, &metric, &h, a, s).unwrap().len();
    }
    g.check("edgewise bounds on 1000 Lipschitz profiles", violations == 0, format!("{violations} violations over {edges} edges"));

    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let (kind, s) = if i % 2 == 0 {
            (MetricKind::Combinatorial, 1.0)
        } else {
            (MetricKind::PathLength, rng.random_range(0.1..3.0))
        };
        let mu = rng.random_range(-2.0..0.9);
        let t = match kind {
            MetricKind::Combinatorial => rng.random_range(mu..1.0),
            MetricKind::PathLength => mu + rng.random_range(1e-3..3.0),
        };
        if t <= mu {
            continue;
        }
        let a = a_mu(t, mu, s, kind).unwrap().a;
        let id = rel(rate_identity(a, s, kind), rate_target(t, mu, kind));
        let back = (a_inverse(a, mu, s, kind).unwrap() - t).abs() / t.abs().max(1.0);
        worst = worst.max(id).max(back);
    }
    g.check("rate round trips on 1000 inputs", worst <= 1e-12, format!("worst {worst:e}"));

    let mut max_mu: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(2..=12);
        let gr = common::random_graph(&mut rng, n, true);
        let (x, y, _) = gr.edges().next().unwrap();
        let mut omega = vec![x, y];
        for v in 0..n {
            if v != x && v != y && rng.random_bool(0.5) {
                omega.push(v);
            }
        }
        max_mu = max_mu.max(dirichlet_bottom(&gr, &omega).unwrap().mu1);
    }
    for n in [3usize, 4, 5] {
        for r in [1.0, 5.0] {
            max_mu = max_mu.max(domain_bottom(&tree(n).domain(&d(), &Region::Whole, r).unwrap()).unwrap().0);
        }
    }
    max_mu = max_mu.max(domain_bottom(&ray(MassLaw::Normalized).domain(&d(), &Region::Whole, 10.0).unwrap()).unwrap().0);
    g.check("mu_1 < 1 on normalized fixtures with an edge", max_mu < 1.0, format!("max {max_mu}"));
    g.finish(start, 120.0, all)
}

// Runs without the libtest harness so the per-criterion lines always show.
fn main() {
    let mut failures = Vec::new();
    if !criterion_8(&mut failures) {
        eprintln!("oracle gate failed; criteria 1-7 not run: {failures:?}");
        std::process::exit(1);
    }
    criterion_1(&mut failures);
    criterion_2(&mut failures);
    criterion_3(&mut failures);
    criterion_4(&mut failures);
    criterion_5(&mut failures);
    criterion_6(&mut failures);
    criterion_7(&mut failures);
    if !failures.is_empty() {
        eprintln!("failed: {failures:#?}");
        std::process::exit(1);
    }
    println!("acceptance: all criteria pass");
}
