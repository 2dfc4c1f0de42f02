//! The nine acceptance checks. Each returns an [`Outcome`] with a one-line
//! summary; nothing here panics on a failed check.

use std::time::{Duration, Instant};

use mcgap_core::carr_vempala::{decompose, min_alpha, CvOutcome, MinAlpha};
use mcgap_core::decomp::{enumerate, reduce_to_multicut, tree_family, verify_tree_properties};
use mcgap_core::generators::{
    amplify_one_sum, gen_cactus_gap, gen_cycle_gadget, gen_star_gap, random_connected, random_costs, random_pairs,
    random_tree,
};
use mcgap_core::graph::{one_sum, EdgeSet, Graph};
use mcgap_core::multicut::{
    extract_multiflow, gap, separate, solve_fractional, solve_fractional_with_master, solve_integral,
    MulticutInstance, PairSet, DEFAULT_NODE_BUDGET,
};
use mcgap_core::pload::{amplification_experiment, min_pload, min_pload_radius, project_onto_factor, Distribution};
use mcgap_core::rational::{self, int, ratio, Rational};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::oracles;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub details: String,
    pub elapsed: Duration,
}

pub const COUNT: usize = 9;

pub fn run(id: usize) -> Outcome {
    let start = Instant::now();
    let (title, result): (&'static str, Result<String, String>) = match id {
        1 => ("cactus fractional cost", cactus_fractional(start)),
        2 => ("cactus integral bound", cactus_integral()),
        3 => ("gadget load frontier", gadget_frontier()),
        4 => ("amplification counting step", amplification()),
        5 => ("tree layering suite", tree_suite(start)),
        6 => ("decomposition reduction equivalence", reduction_equivalence()),
        7 => ("solver oracle equivalence", solver_equivalence()),
        8 => ("convex decomposition", convex_decomposition()),
        9 => ("projection onto factors", projection()),
        _ => ("unknown", Err(format!("no criterion {id}"))),
    };
    let (pass, details) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Outcome {
        id,
        title,
        pass,
        details,
        elapsed: start.elapsed(),
    }
}

pub fn run_all() -> Vec<Outcome> {
    (1..=COUNT).map(run).collect()
}

fn rng(base: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(base + i as u64)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:.1?}, limit {limit:?}"))
}

/// Runs `check` on every index in parallel; the first failure wins.
fn for_each_seed(count: usize, check: impl Fn(usize) -> Result<(), String> + Sync) -> Result<(), String> {
    let failures: Vec<String> = (0..count)
        .into_par_iter()
        .filter_map(|i| check(i).err().map(|e| format!("case {i}: {e}")))
        .collect();
    match failures.into_iter().next() {
        None => Ok(()),
        Some(e) => Err(e),
    }
}

fn fmt(r: &Rational) -> String {
    rational::format(r)
}

fn cactus_fractional(start: Instant) -> Result<String, String> {
    let quarter = ratio(1, 4);
    for k in 1..=50usize {
        let c = gen_cactus_gap(k).map_err(|e| e.to_string())?;
        let g = c.instance.graph();
        let x = vec![quarter.clone(); g.edge_count()];
        let cost = c.instance.fractional_cost(&x);
        let expected = ratio(9 * (k * k) as i64, 4);
        ensure(cost == expected, || format!("k = {k}: cost {cost}, expected {expected}"))?;
        if k <= 10 {
            ensure(separate(&c.instance, &x).is_none(), || format!("k = {k}: x = 1/4 is separable"))?;
            let edges = oracles::edge_list(g);
            let dist = oracles::distances(g.vertex_count(), &edges);
            for (s, t) in c.instance.pairs() {
                ensure(dist[s][t] >= 4, || format!("k = {k}: pair ({s},{t}) at distance {}", dist[s][t]))?;
            }
        }
    }
    let mut lps = Vec::new();
    for k in 1..=3usize {
        let c = gen_cactus_gap(k).map_err(|e| e.to_string())?;
        let lp = solve_fractional(&c.instance).map_err(|e| e.to_string())?;
        let bound = ratio(9 * (k * k) as i64, 4);
        ensure(lp.value <= bound, || format!("k = {k}: OPT_LP {} > {bound}", lp.value))?;
        lps.push(format!("k={k}:{}", fmt(&lp.value)));
    }
    within(start, Duration::from_secs(30), "k = 1..50")?;
    Ok(format!("cost 9k^2/4 for k=1..50; OPT_LP {}", lps.join(" ")))
}

fn cactus_integral() -> Result<String, String> {
    let start = Instant::now();
    let c1 = gen_cactus_gap(1).map_err(|e| e.to_string())?;
    let g = c1.instance.graph();
    let brute = oracles::exhaustive_min_multicut(
        g.vertex_count(),
        &oracles::edge_list(g),
        c1.instance.costs(),
        &c1.instance.pairs(),
    );
    let r1 = gap(&c1.instance, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    ensure(r1.ip.optimal && r1.ip.solution.cost == brute, || {
        format!("k = 1: branch and bound {} vs exhaustive {brute}", r1.ip.solution.cost)
    })?;
    within(start, Duration::from_secs(1), "k = 1")?;

    let c2 = gen_cactus_gap(2).map_err(|e| e.to_string())?;
    let r2 = gap(&c2.instance, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
    ensure(r2.ip.optimal, || "k = 2: node budget exhausted".into())?;
    let mut rows = Vec::new();
    for (k, r) in [(1i64, &r1), (2, &r2)] {
        let ip = &r.ip.solution.cost;
        let floor = int(5 * k * k - 9 * k);
        ensure(*ip >= floor, || format!("k = {k}: OPT_IP {ip} < {floor}"))?;
        ensure(*ip >= r.lp.value, || format!("k = {k}: OPT_IP {ip} < OPT_LP {}", r.lp.value))?;
        let ratio = r.gap.as_ref().map_or_else(|| "n/a".into(), fmt);
        rows.push(format!("k={k}: IP {} LP {} gap {ratio}", fmt(ip), fmt(&r.lp.value)));
    }
    Ok(format!("{}; limit gap not reached at this size", rows.join("; ")))
}

fn gadget_frontier() -> Result<String, String> {
    let target = ratio(10, 9);
    let mut rows = Vec::new();
    for (w, limit) in [(2u64, Duration::from_secs(1)), (4, Duration::from_secs(120))] {
        let start = Instant::now();
        let gadget = gen_cycle_gadget(w).map_err(|e| e.to_string())?;
        let r = gadget.root();
        let k = w / 2;
        let res = min_pload_radius(&gadget.graph, r, w, k).map_err(|e| e.to_string())?;
        within(start, limit, &format!("w = {w}"))?;
        res.verify().map_err(|e| format!("w = {w}: {e}"))?;
        let edges = oracles::edge_list(&gadget.graph);
        let cert = oracles::check_load_certificate(
            gadget.graph.vertex_count(),
            &edges,
            r,
            w,
            k,
            &res.p,
            res.distribution.terms(),
            (&res.dual.lambda, &res.dual.mu, &res.dual.nu),
        );
        ensure(cert.family_size == res.family_size, || {
            format!("w = {w}: family has {} members, oracle finds {}", res.family_size, cert.family_size)
        })?;
        ensure(cert.primal_ok && cert.dual_ok && cert.dual_value == res.p, || {
            format!(
                "w = {w}: certificate rejected (primal {}, dual {}, dual value {})",
                cert.primal_ok, cert.dual_ok, cert.dual_value
            )
        })?;
        let wp = &res.p * int(w as i64);
        ensure(wp >= target, || format!("w = {w}: w*p = {wp} < 10/9"))?;
        rows.push(format!("w={w} k={k} p={} wp={} family={}", fmt(&res.p), fmt(&wp), res.family_size));
    }
    Ok(rows.join("; "))
}

fn amplification() -> Result<String, String> {
    let start = Instant::now();
    let w = 2;
    let gadget = gen_cycle_gadget(w).map_err(|e| e.to_string())?;
    let r = gadget.root();
    let ms = [1usize, 2, 3];
    let three = amplify_one_sum(&gadget.graph, r, 3).map_err(|e| e.to_string())?;
    // Smallest p for which every m-fold sum has a p-load distribution.
    let p = min_pload(&three.graph, w).map_err(|e| e.to_string())?.p;
    let rows = amplification_experiment(&gadget.graph, r, w, &p, &ms).map_err(|e| e.to_string())?;
    let z1 = rows[0].z.clone().ok_or("m = 1 infeasible")?;
    let mut literal = Vec::new();
    for row in &rows {
        let z = row.z.as_ref().ok_or_else(|| format!("m = {}: infeasible at p = {p}", row.m))?;
        let m = int(row.m as i64);
        ensure(row.counting_bound_holds(&z1), || format!("m = {}: z = {z}, m z_1 = {}", row.m, &m * &z1))?;
        ensure(*z == &m * &z1, || format!("m = {}: z = {z} is not m z_1 = {}", row.m, &m * &z1))?;
        let sum = amplify_one_sum(&gadget.graph, r, row.m).map_err(|e| e.to_string())?;
        let brute = oracles::brute_family(sum.graph.vertex_count(), &oracles::edge_list(&sum.graph), 2 * w, None);
        ensure(brute.len() == row.family_size, || {
            format!("m = {}: family {} vs oracle {}", row.m, row.family_size, brute.len())
        })?;
        literal.push(format!("m={} z_m={} m*z_m={}", row.m, fmt(z), fmt(&(&m * z))));
    }
    within(start, Duration::from_secs(300), "m = 1..3")?;
    Ok(format!(
        "p={}: m*z_1 <= z_m <= 1 and z_m = m*z_1 for m=1..3; {}",
        fmt(&p),
        literal.join(" ")
    ))
}

fn tree_suite(start: Instant) -> Result<String, String> {
    for_each_seed(200, |i| {
        let mut rng = rng(5_000, i);
        let n = rng.gen_range(2..=200);
        let tree = random_tree(n, &mut rng);
        let root = rng.gen_range(0..n);
        let edges = oracles::edge_list(&tree);
        let dist = oracles::distances(n, &edges);
        for w in [2u64, 4, 8] {
            verify_tree_properties(&tree, root, w).map_err(|e| format!("w = {w}: {e}"))?;
            let layers = tree_family(&tree, root, w).map_err(|e| e.to_string())?;
            ensure(layers.len() == w as usize, || format!("w = {w}: {} layers", layers.len()))?;
            let mut seen = vec![0usize; edges.len()];
            for (li, f) in layers.iter().enumerate() {
                let mut cut = vec![false; edges.len()];
                for e in f.iter() {
                    seen[e] += 1;
                    cut[e] = true;
                }
                let (diam, rad) = cut_metrics(n, &edges, &dist, &cut, root);
                ensure(diam < 2 * w, || format!("w = {w} layer {li}: diameter {diam}"))?;
                ensure(rad <= li as u64, || format!("w = {w} layer {li}: radius {rad}"))?;
            }
            ensure(seen.iter().all(|&c| c == 1), || format!("w = {w}: layers do not partition the edges"))?;
        }
        Ok(())
    })?;
    within(start, Duration::from_secs(60), "200 trees")?;
    Ok("200 trees, w in {2,4,8}: partition, load 1/w, diameter < 2w, radius <= i, cumulative mass".into())
}

/// Diameter and root radius after cutting, for edge counts beyond a mask.
fn cut_metrics(n: usize, edges: &[(usize, usize)], dist: &[Vec<u64>], cut: &[bool], root: usize) -> (u64, u64) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    for (e, &(u, v)) in edges.iter().enumerate() {
        if !cut[e] {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            parent[a] = b;
        }
    }
    let comp: Vec<usize> = (0..n).map(|v| find(&mut parent, v)).collect();
    let mut diam = 0;
    for a in 0..n {
        for b in a + 1..n {
            if comp[a] == comp[b] {
                diam = diam.max(dist[a][b]);
            }
        }
    }
    let rad = (0..n).filter(|&v| comp[v] == comp[root]).map(|v| dist[root][v]).max().unwrap_or(0);
    (diam, rad)
}

fn random_small_graph(rng: &mut ChaCha8Rng, max_edges: usize, max_n: usize) -> Graph {
    let n = rng.gen_range(3..=max_n);
    let room = max_edges.saturating_sub(n - 1);
    let extra = rng.gen_range(0..=room);
    random_connected(n, extra, rng)
}

fn reduction_equivalence() -> Result<String, String> {
    let checked = std::sync::atomic::AtomicUsize::new(0);
    for_each_seed(100, |i| {
        let mut rng = rng(6_000, i);
        let g = random_small_graph(&mut rng, 12, 8);
        let n = g.vertex_count();
        let m = g.edge_count();
        let edges = oracles::edge_list(&g);
        let dist = oracles::distances(n, &edges);
        for t in [2u64, 3, 4] {
            let (inst, frac) = reduce_to_multicut(&g, t, None).map_err(|e| e.to_string())?;
            ensure(separate(&inst, &frac.x).is_none(), || format!("t = {t}: l/t is separable"))?;
            let family = enumerate(&g, t, None).map_err(|e| e.to_string())?;
            for mask in 0..1u64 << m {
                let f = EdgeSet::from_mask(m, mask);
                let multicut = inst.is_feasible_multicut(&f).map_err(|e| e.to_string())?;
                let decomposition = g.is_t_diameter_decomposition(&f, t).map_err(|e| e.to_string())?;
                let oracle = oracles::diameter_after(n, &edges, &dist, mask) < t;
                let listed = family.position(mask).is_some();
                ensure(multicut == decomposition && decomposition == oracle && oracle == listed, || {
                    format!("t = {t}, mask {mask:#x}: multicut {multicut}, decomposition {decomposition}, oracle {oracle}, listed {listed}")
                })?;
            }
            checked.fetch_add(1 << m, std::sync::atomic::Ordering::Relaxed);
        }
        Ok(())
    })?;
    Ok(format!("{} subsets, zero discrepancies", checked.into_inner()))
}

fn random_instance(rng: &mut ChaCha8Rng, max_edges: usize, max_pairs: usize) -> MulticutInstance {
    let g = random_small_graph(rng, max_edges, 8);
    let count = rng.gen_range(1..=max_pairs);
    let pairs = random_pairs(g.vertex_count(), count, rng);
    let costs = random_costs(g.edge_count(), 5, rng);
    MulticutInstance::new(g, costs, PairSet::Explicit(pairs)).expect("connected graph, distinct endpoints")
}

fn solver_equivalence() -> Result<String, String> {
    for_each_seed(200, |i| {
        let mut rng = rng(7_000, i);
        let inst = random_instance(&mut rng, 16, 4);
        let g = inst.graph();
        let (n, edges, pairs) = (g.vertex_count(), oracles::edge_list(g), inst.pairs());
        let res = gap(&inst, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        let brute = oracles::exhaustive_min_multicut(n, &edges, inst.costs(), &pairs);
        ensure(res.ip.optimal && res.ip.solution.cost == brute, || {
            format!("IP {} vs exhaustive {brute}", res.ip.solution.cost)
        })?;
        let full = oracles::full_path_lp(n, &edges, inst.costs(), &pairs);
        ensure(res.lp.value == full, || format!("LP {} vs full path LP {full}", res.lp.value))?;
        let ratio = res.gap.clone().ok_or("no gap with positive LP")?;
        ensure(ratio >= Rational::one(), || format!("gap {ratio} < 1"))?;
        if pairs.len() <= 2 {
            ensure(ratio.is_one(), || format!("{} pairs but gap {ratio}", pairs.len()))?;
        }
        let (_, master) = solve_fractional_with_master(&inst).map_err(|e| e.to_string())?;
        let flow = extract_multiflow(&master);
        ensure(flow.verify(&inst) && flow.total == full, || format!("multiflow {} rejected", flow.total))?;
        Ok(())
    })?;
    Ok("200 instances: IP = exhaustive, LP = full path LP, gap >= 1, gap = 1 for <= 2 pairs, multiflow verified".into())
}

fn check_min_alpha(inst: &MulticutInstance, x: &[Rational]) -> Result<Rational, String> {
    let g = inst.graph();
    let (n, edges, pairs) = (g.vertex_count(), oracles::edge_list(g), inst.pairs());
    let (alpha, dec) = match min_alpha(inst, x, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())? {
        MinAlpha::Exact { alpha, decomposition } => (alpha, decomposition),
        MinAlpha::Bound { alpha, .. } => return Err(format!("only an upper bound {alpha}")),
    };
    dec.verify(inst, x)?;
    let brute = oracles::brute_min_alpha(n, &edges, &pairs, x);
    ensure(alpha == brute, || format!("min alpha {alpha} vs oracle {brute}"))?;
    let below = &alpha - ratio(1, 100);
    if below.is_positive() {
        match decompose(inst, x, &below, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())? {
            CvOutcome::Witness(wit) => {
                ensure(wit.verify(inst, x, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?, || {
                    "witness rejected by its own check".into()
                })?;
                ensure(oracles::witness_holds(n, &edges, &pairs, &wit.c, &wit.u), || {
                    "witness rejected by the oracle".into()
                })?;
                let cx: Rational = wit.c.iter().zip(x).map(|(c, xe)| c * xe).sum();
                ensure(&below * cx < wit.u, || "witness does not separate alpha x".into())?;
            }
            other => return Err(format!("alpha {below} below the minimum returned {other:?}")),
        }
    }
    Ok(alpha)
}

fn convex_decomposition() -> Result<String, String> {
    let star = gen_star_gap(3).map_err(|e| e.to_string())?;
    let alpha = check_min_alpha(&star, &[ratio(1, 2), ratio(1, 2), ratio(1, 2)]).map_err(|e| format!("star: {e}"))?;
    ensure(alpha == ratio(4, 3), || format!("star: min alpha {alpha}"))?;
    let worst = std::sync::Mutex::new(Rational::zero());
    for_each_seed(50, |i| {
        let mut rng = rng(8_000, i);
        let n = rng.gen_range(3..=13);
        let tree = random_tree(n, &mut rng);
        let count = rng.gen_range(1..=4);
        let pairs = random_pairs(n, count, &mut rng);
        let costs = random_costs(n - 1, 5, &mut rng);
        let inst = MulticutInstance::new(tree, costs, PairSet::Explicit(pairs)).map_err(|e| e.to_string())?;
        let lp = solve_fractional(&inst).map_err(|e| e.to_string())?;
        let alpha = check_min_alpha(&inst, &lp.x)?;
        ensure(alpha <= int(2), || format!("min alpha {alpha} > 2"))?;
        let ip = solve_integral(&inst, DEFAULT_NODE_BUDGET).map_err(|e| e.to_string())?;
        ensure(&alpha * &lp.value >= ip.solution.cost, || {
            format!("alpha {alpha} below IP/LP = {}/{}", ip.solution.cost, lp.value)
        })?;
        let mut w = worst.lock().expect("not poisoned");
        if alpha > *w {
            *w = alpha;
        }
        Ok(())
    })?;
    Ok(format!(
        "star min alpha 4/3; 50 trees max min alpha {}; decompositions and witnesses verified",
        fmt(&worst.into_inner().expect("not poisoned"))
    ))
}

fn projection() -> Result<String, String> {
    for_each_seed(100, |i| {
        let mut rng = rng(9_000, i);
        let a = random_small_graph(&mut rng, 6, 5);
        let b = random_small_graph(&mut rng, 6, 5);
        let (ra, rb) = (rng.gen_range(0..a.vertex_count()), rng.gen_range(0..b.vertex_count()));
        let sum = one_sum(&[(&a, ra), (&b, rb)]).map_err(|e| e.to_string())?;
        let w = rng.gen_range(1..=2u64);
        let family = enumerate(&sum.graph, 2 * w, None).map_err(|e| e.to_string())?;
        let picks = rng.gen_range(1..=family.len().min(6));
        let mut terms = Vec::with_capacity(picks);
        let mut total = 0i64;
        for _ in 0..picks {
            let mask = family.masks()[rng.gen_range(0..family.len())];
            let weight = rng.gen_range(1..=9);
            total += weight;
            terms.push((mask, int(weight)));
        }
        let terms = terms.into_iter().map(|(mask, y)| (mask, y / int(total))).collect();
        let dist = Distribution::new(sum.graph.clone(), 2 * w, terms).map_err(|e| e.to_string())?;
        let loads = dist.edge_loads();
        let p = dist.max_load();
        for (idx, factor) in [&a, &b].into_iter().enumerate() {
            let proj = project_onto_factor(&dist, &sum, factor, idx).map_err(|e| format!("factor {idx}: {e}"))?;
            let fl = proj.edge_loads();
            for (h, &e) in sum.edge_maps[idx].iter().enumerate() {
                ensure(fl[h] == loads[e], || format!("factor {idx} edge {h}: load {} vs {}", fl[h], loads[e]))?;
            }
            ensure(proj.max_load() <= p, || format!("factor {idx}: max load above {p}"))?;
            let edges = oracles::edge_list(factor);
            let dist_f = oracles::distances(factor.vertex_count(), &edges);
            for (mask, _) in proj.terms() {
                let d = oracles::diameter_after(factor.vertex_count(), &edges, &dist_f, *mask);
                ensure(d < 2 * w, || format!("factor {idx}: projected member {mask:#x} has diameter {d}"))?;
            }
        }
        Ok(())
    })?;
    Ok("100 distributions on two-factor 1-sums: projections are p-load distributions with equal edge loads".into())
}
