//! Brute-force reference implementations. These only read the raw edge
//! list of a graph and recompute everything from scratch, so they share no
//! logic with the solvers they check.

use std::collections::{BTreeSet, VecDeque};

use mcgap_core::graph::Graph;
use mcgap_core::lp::{Domain, LinearProgram, LpOutcome, Relation, Sense};
use mcgap_core::rational::Rational;
use num_traits::{One, Zero};

pub type Edges = Vec<(usize, usize)>;

pub fn edge_list(g: &Graph) -> Edges {
    g.edges().iter().map(|e| (e.u, e.v)).collect()
}

fn adjacency(n: usize, edges: &[(usize, usize)], skip: u64) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        if i < 64 && skip >> i & 1 == 1 {
            continue;
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    adj
}

/// Unit-length BFS distances; `u64::MAX` when unreachable.
pub fn distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<u64>> {
    let adj = adjacency(n, edges, 0);
    (0..n)
        .map(|s| {
            let mut d = vec![u64::MAX; n];
            d[s] = 0;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v] {
                    if d[w] == u64::MAX {
                        d[w] = d[v] + 1;
                        q.push_back(w);
                    }
                }
            }
            d
        })
        .collect()
}

/// Component index per vertex after deleting the edges in `cut`.
pub fn components(n: usize, edges: &[(usize, usize)], cut: u64) -> Vec<usize> {
    let adj = adjacency(n, edges, cut);
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = next;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Largest full-graph distance inside a component of `G - cut`.
pub fn diameter_after(n: usize, edges: &[(usize, usize)], dist: &[Vec<u64>], cut: u64) -> u64 {
    let comp = components(n, edges, cut);
    let mut best = 0;
    for a in 0..n {
        for b in a + 1..n {
            if comp[a] == comp[b] {
                best = best.max(dist[a][b]);
            }
        }
    }
    best
}

/// Largest full-graph distance from `r` inside its component of `G - cut`.
pub fn radius_after(n: usize, edges: &[(usize, usize)], dist: &[Vec<u64>], cut: u64, r: usize) -> u64 {
    let comp = components(n, edges, cut);
    (0..n).filter(|&v| comp[v] == comp[r]).map(|v| dist[r][v]).max().unwrap_or(0)
}

pub fn separates(n: usize, edges: &[(usize, usize)], cut: u64, pairs: &[(usize, usize)]) -> bool {
    let comp = components(n, edges, cut);
    pairs.iter().all(|&(s, t)| comp[s] != comp[t])
}

fn mask_cost(mask: u64, costs: &[Rational]) -> Rational {
    costs
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, c)| c)
        .sum()
}

/// All subsets of the edges that separate every pair.
pub fn all_multicuts(n: usize, edges: &[(usize, usize)], pairs: &[(usize, usize)]) -> Vec<u64> {
    (0..1u64 << edges.len())
        .filter(|&mask| separates(n, edges, mask, pairs))
        .collect()
}

/// Inclusion-minimal multicuts.
pub fn minimal_multicuts(n: usize, edges: &[(usize, usize)], pairs: &[(usize, usize)]) -> Vec<u64> {
    let all: BTreeSet<u64> = all_multicuts(n, edges, pairs).into_iter().collect();
    all.iter()
        .copied()
        .filter(|&mask| (0..edges.len()).all(|b| mask >> b & 1 == 0 || !all.contains(&(mask ^ 1 << b))))
        .collect()
}

/// Minimum cost over every subset.
pub fn exhaustive_min_multicut(
    n: usize,
    edges: &[(usize, usize)],
    costs: &[Rational],
    pairs: &[(usize, usize)],
) -> Rational {
    all_multicuts(n, edges, pairs)
        .into_iter()
        .map(|mask| mask_cost(mask, costs))
        .min()
        .expect("the full edge set is a multicut")
}

/// Edge masks of every simple `s`-`t` path.
pub fn simple_paths(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> Vec<u64> {
    let mut adj = vec![Vec::new(); n];
    for (i, &(u, v)) in edges.iter().enumerate() {
        adj[u].push((v, i));
        adj[v].push((u, i));
    }
    let mut out = Vec::new();
    let mut visited = vec![false; n];
    fn walk(
        v: usize,
        t: usize,
        mask: u64,
        adj: &[Vec<(usize, usize)>],
        visited: &mut [bool],
        out: &mut Vec<u64>,
    ) {
        if v == t {
            out.push(mask);
            return;
        }
        visited[v] = true;
        for &(w, e) in &adj[v] {
            if !visited[w] {
                walk(w, t, mask | 1 << e, adj, visited, out);
            }
        }
        visited[v] = false;
    }
    walk(s, t, 0, &adj, &mut visited, &mut out);
    out
}

/// The path LP with every simple path of every pair written out.
pub fn full_path_lp(n: usize, edges: &[(usize, usize)], costs: &[Rational], pairs: &[(usize, usize)]) -> Rational {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let xs: Vec<_> = costs.iter().map(|c| lp.add_variable(Domain::NonNegative, c.clone())).collect();
    for &(s, t) in pairs {
        for mask in simple_paths(n, edges, s, t) {
            let row: Vec<_> = (0..edges.len())
                .filter(|&e| mask >> e & 1 == 1)
                .map(|e| (xs[e], Rational::one()))
                .collect();
            lp.add_row(&row, Relation::Ge, Rational::one()).expect("valid row");
        }
    }
    match lp.solve().expect("small LP") {
        LpOutcome::Optimal(sol) => sol.objective,
        other => panic!("path LP is feasible and bounded: {other:?}"),
    }
}

/// `1 / max sum y` with loads `<= x`, over every minimal multicut.
pub fn brute_min_alpha(n: usize, edges: &[(usize, usize)], pairs: &[(usize, usize)], x: &[Rational]) -> Rational {
    let cuts = minimal_multicuts(n, edges, pairs);
    let mut lp = LinearProgram::new(Sense::Maximize);
    let ys: Vec<_> = cuts.iter().map(|_| lp.add_variable(Domain::NonNegative, Rational::one())).collect();
    for (e, xe) in x.iter().enumerate() {
        let row: Vec<_> = cuts
            .iter()
            .zip(&ys)
            .filter(|(mask, _)| *mask >> e & 1 == 1)
            .map(|(_, &y)| (y, Rational::one()))
            .collect();
        lp.add_row(&row, Relation::Le, xe.clone()).expect("valid row");
    }
    match lp.solve().expect("small LP") {
        LpOutcome::Optimal(sol) => sol.objective.recip(),
        other => panic!("covering LP is feasible and bounded: {other:?}"),
    }
}

/// `c(F) >= u` for every multicut `F` (checked on minimal ones, which
/// suffices because `c >= 0`).
pub fn witness_holds(
    n: usize,
    edges: &[(usize, usize)],
    pairs: &[(usize, usize)],
    c: &[Rational],
    u: &Rational,
) -> bool {
    minimal_multicuts(n, edges, pairs)
        .into_iter()
        .all(|mask| mask_cost(mask, c) >= *u)
}

/// Every edge lies on at most one cycle: checked by enumerating the edge
/// sets of all simple cycles.
pub fn is_cactus(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut cycles: BTreeSet<u64> = BTreeSet::new();
    for (i, &(u, v)) in edges.iter().enumerate() {
        let rest: Vec<(usize, usize)> = edges.iter().copied().enumerate().filter(|&(j, _)| j != i).map(|(_, e)| e).collect();
        for mask in simple_paths(n, &rest, u, v) {
            // Re-index the path mask back to the original edge ids.
            let mut full = 1u64 << i;
            for (j, _) in rest.iter().enumerate() {
                if mask >> j & 1 == 1 {
                    full |= 1 << if j < i { j } else { j + 1 };
                }
            }
            cycles.insert(full);
        }
    }
    let mut seen = 0u64;
    for c in cycles {
        if seen & c != 0 {
            return false;
        }
        seen |= c;
    }
    true
}

/// Every `F` with `diam(F) < t` and (optionally) `rad_F(r) < k`, by
/// checking each subset directly.
pub fn brute_family(n: usize, edges: &[(usize, usize)], t: u64, root: Option<(usize, u64)>) -> Vec<u64> {
    let dist = distances(n, edges);
    (0..1u64 << edges.len())
        .filter(|&mask| {
            diameter_after(n, edges, &dist, mask) < t
                && root.is_none_or(|(r, k)| radius_after(n, edges, &dist, mask, r) < k)
        })
        .collect()
}

/// Outcome of checking a claimed optimum of the radius-constrained load LP.
pub struct LoadCertificate {
    pub family_size: usize,
    pub primal_ok: bool,
    pub dual_ok: bool,
    pub dual_value: Rational,
}

/// The LP is `min p` over the rooted family (`rad_F(r) < w`) with
/// `sum y = 1`, loads `<= p` and `sum_{rad_F(r) < k} y + (w-k) p >= 1`.
/// Its dual is `max lambda + nu` subject to `sum mu + (w-k) nu <= 1` and
/// `lambda - mu(F) + nu [rad_F(r) < k] <= 0` for every member, with
/// `mu, nu >= 0`. A primal point and a dual point that are both feasible
/// and have equal value prove optimality; both are checked here against a
/// family enumerated from scratch.
#[allow(clippy::too_many_arguments)]
pub fn check_load_certificate(
    n: usize,
    edges: &[(usize, usize)],
    r: usize,
    w: u64,
    k: u64,
    p: &Rational,
    y: &[(u64, Rational)],
    dual: (&Rational, &[Rational], &Rational),
) -> LoadCertificate {
    let m = edges.len();
    let dist = distances(n, edges);
    let family = brute_family(n, edges, 2 * w, Some((r, w)));
    let inner = |mask: u64| radius_after(n, edges, &dist, mask, r) < k;
    let slack = Rational::from_integer(((w - k) as i64).into());

    let total: Rational = y.iter().map(|(_, v)| v).sum();
    let members_ok = y
        .iter()
        .all(|(mask, v)| *v >= Rational::zero() && family.binary_search(mask).is_ok());
    let loads_ok = (0..m).all(|e| {
        let load: Rational = y.iter().filter(|(mask, _)| mask >> e & 1 == 1).map(|(_, v)| v).sum();
        load <= *p
    });
    let inner_mass: Rational = y.iter().filter(|(mask, _)| inner(*mask)).map(|(_, v)| v).sum();
    let primal_ok = members_ok && total.is_one() && loads_ok && inner_mass + &slack * p >= Rational::one();

    let (lambda, mu, nu) = dual;
    let mu_sum: Rational = mu.iter().sum();
    let dual_ok = mu.len() == m
        && *nu >= Rational::zero()
        && mu.iter().all(|v| *v >= Rational::zero())
        && mu_sum + &slack * nu <= Rational::one()
        && family.iter().all(|&mask| {
            let hit: Rational = (0..m).filter(|&e| mask >> e & 1 == 1).map(|e| &mu[e]).sum();
            let nu_term = if inner(mask) { nu.clone() } else { Rational::zero() };
            lambda - hit + nu_term <= Rational::zero()
        });
    LoadCertificate {
        family_size: family.len(),
        primal_ok,
        dual_ok,
        dual_value: lambda + nu,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcgap_core::rational::{int, ratio};

    #[test]
    fn star_oracles() {
        let edges = vec![(0, 1), (0, 2), (0, 3)];
        let pairs = vec![(1, 2), (1, 3), (2, 3)];
        let costs = vec![int(1); 3];
        assert_eq!(exhaustive_min_multicut(4, &edges, &costs, &pairs), int(2));
        assert_eq!(full_path_lp(4, &edges, &costs, &pairs), ratio(3, 2));
        assert_eq!(all_multicuts(4, &edges, &pairs).len(), 4);
        assert_eq!(minimal_multicuts(4, &edges, &pairs), vec![0b011, 0b101, 0b110]);
        assert_eq!(brute_min_alpha(4, &edges, &pairs, &vec![ratio(1, 2); 3]), ratio(4, 3));
    }

    #[test]
    fn cactus_oracle() {
        assert!(is_cactus(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]));
        assert!(!is_cactus(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]));
        assert!(is_cactus(5, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)]));
    }

    #[test]
    fn diameter_uses_full_graph_distances() {
        let c4 = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        let dist = distances(4, &c4);
        assert_eq!(diameter_after(4, &c4, &dist, 0b0001), 2);
        assert_eq!(radius_after(4, &c4, &dist, 0b0001, 0), 2);
    }

    #[test]
    fn load_certificate_accepts_and_rejects() {
        use mcgap_core::generators::gen_cycle_gadget;
        use mcgap_core::pload::min_pload_radius;
        let g = gen_cycle_gadget(2).unwrap();
        let res = min_pload_radius(&g.graph, g.root(), 2, 1).unwrap();
        let edges = edge_list(&g.graph);
        let n = g.graph.vertex_count();
        let d = &res.dual;
        let ok = check_load_certificate(n, &edges, g.root(), 2, 1, &res.p, res.distribution.terms(), (&d.lambda, &d.mu, &d.nu));
        assert!(ok.primal_ok && ok.dual_ok);
        assert_eq!(ok.dual_value, res.p);
        assert_eq!(ok.family_size, res.family_size);
        let lambda = &d.lambda + ratio(1, 100);
        let bad = check_load_certificate(n, &edges, g.root(), 2, 1, &res.p, res.distribution.terms(), (&lambda, &d.mu, &d.nu));
        assert!(!bad.dual_ok);
        let low = &res.p - ratio(1, 100);
        let bad = check_load_certificate(n, &edges, g.root(), 2, 1, &low, res.distribution.terms(), (&d.lambda, &d.mu, &d.nu));
        assert!(!bad.primal_ok);
    }
}
