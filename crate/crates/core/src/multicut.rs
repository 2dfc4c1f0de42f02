//! Minimum multicut: exact fractional optimum, exact integral optimum by
//! branch-and-bound, path-flow extraction and per-instance gaps.
//!
//! The path-constrained multicut LP `min c.x, x(P) >= 1` is solved through
//! its dual, the path-flow LP `max sum f_P, sum_{P ∋ e} f_P <= c(e)`: every
//! violated path found by separation becomes a new flow column, the
//! previous basis stays feasible, and the edge duals at the end are the
//! fractional multicut `x`.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::{DisjointSets, EdgeId, EdgeSet, Graph, GraphError, VertexId};
use crate::lp::{Domain, LinearProgram, LpError, LpOutcome, Relation, SolveStats};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MulticutError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("expected {expected} edge costs, found {found}")]
    CostCount { expected: usize, found: usize },
    #[error("edge {0} has a negative cost")]
    NegativeCost(EdgeId),
    #[error("pair ({0}, {0}) has identical endpoints")]
    TrivialPair(VertexId),
    #[error("pair ({0}, {1}) is not connected in the graph")]
    DisconnectedPair(VertexId, VertexId),
    #[error("fractional optimum is 0 with a non-empty pair set")]
    DegenerateGap,
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Source-sink pairs, either listed or defined by a distance threshold
/// (all `(u, v)` with `l(u, v) >= t`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairSet {
    Explicit(Vec<(VertexId, VertexId)>),
    AtDistance(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticutInstance {
    graph: Graph,
    costs: Vec<Rational>,
    pairs: PairSet,
}

impl MulticutInstance {
    /// Validates costs and pairs. Explicit pairs are canonicalised to
    /// `s < t`, sorted and deduplicated.
    pub fn new(graph: Graph, costs: Vec<Rational>, pairs: PairSet) -> Result<Self, MulticutError> {
        if costs.len() != graph.edge_count() {
            return Err(MulticutError::CostCount {
                expected: graph.edge_count(),
                found: costs.len(),
            });
        }
        if let Some(e) = costs.iter().position(|c| c.is_negative()) {
            return Err(MulticutError::NegativeCost(e));
        }
        let pairs = match pairs {
            PairSet::Explicit(list) => {
                let mut canon = BTreeSet::new();
                let labels = graph.component_labels(&EdgeSet::empty(graph.edge_count()))?;
                for (s, t) in list {
                    graph.check_vertex(s)?;
                    graph.check_vertex(t)?;
                    if s == t {
                        return Err(MulticutError::TrivialPair(s));
                    }
                    let (s, t) = (s.min(t), s.max(t));
                    if labels[s] != labels[t] {
                        return Err(MulticutError::DisconnectedPair(s, t));
                    }
                    canon.insert((s, t));
                }
                PairSet::Explicit(canon.into_iter().collect())
            }
            PairSet::AtDistance(0) => return Err(MulticutError::TrivialPair(0)),
            implicit => implicit,
        };
        Ok(Self { graph, costs, pairs })
    }

    pub fn with_unit_costs(graph: Graph, pairs: PairSet) -> Result<Self, MulticutError> {
        let costs = vec![Rational::one(); graph.edge_count()];
        Self::new(graph, costs, pairs)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn costs(&self) -> &[Rational] {
        &self.costs
    }

    pub fn pair_set(&self) -> &PairSet {
        &self.pairs
    }

    /// Explicit pair list, `s < t`, lexicographic.
    pub fn pairs(&self) -> Vec<(VertexId, VertexId)> {
        match &self.pairs {
            PairSet::Explicit(list) => list.clone(),
            PairSet::AtDistance(t) => {
                let table = self.graph.all_pairs();
                let n = self.graph.vertex_count();
                let mut out = Vec::new();
                for s in 0..n {
                    for v in s + 1..n {
                        if table.get(s, v).is_some_and(|d| d >= *t) {
                            out.push((s, v));
                        }
                    }
                }
                out
            }
        }
    }

    pub fn cost_of(&self, f: &EdgeSet) -> Rational {
        f.iter().map(|e| &self.costs[e]).sum()
    }

    /// `sum_e c(e) x(e)`.
    pub fn fractional_cost(&self, x: &[Rational]) -> Rational {
        self.costs.iter().zip(x).map(|(c, xe)| c * xe).sum()
    }

    /// Every pair lies in different components of `G - F`.
    pub fn is_feasible_multicut(&self, f: &EdgeSet) -> Result<bool, MulticutError> {
        let labels = self.graph.component_labels(f)?;
        Ok(match &self.pairs {
            PairSet::Explicit(list) => list.iter().all(|&(s, t)| labels[s] != labels[t]),
            PairSet::AtDistance(t) => {
                let table = self.graph.all_pairs();
                let n = self.graph.vertex_count();
                (0..n).all(|a| {
                    (a + 1..n).all(|b| labels[a] != labels[b] || table.get(a, b).is_none_or(|d| d < *t))
                })
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSolution {
    pub x: Vec<Rational>,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MulticutSolution {
    pub edges: EdgeSet,
    pub cost: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowPath {
    pub pair: (VertexId, VertexId),
    pub path: Path,
    pub flow: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiflowSolution {
    pub paths: Vec<FlowPath>,
    pub total: Rational,
}

impl MultiflowSolution {
    /// Per-edge flow within capacity, each path joins its pair, and the total
    /// matches.
    pub fn verify(&self, instance: &MulticutInstance) -> bool {
        let g = instance.graph();
        let mut load = vec![Rational::zero(); g.edge_count()];
        let mut total = Rational::zero();
        for fp in &self.paths {
            if fp.flow.is_negative() {
                return false;
            }
            let (s, t) = fp.pair;
            let ends = (fp.path.vertices.first(), fp.path.vertices.last());
            if ends != (Some(&s), Some(&t)) && ends != (Some(&t), Some(&s)) {
                return false;
            }
            for (w, &e) in fp.path.vertices.windows(2).zip(&fp.path.edges) {
                if g.edge_between(w[0], w[1]) != Some(e) {
                    return false;
                }
                load[e] += &fp.flow;
            }
            total += &fp.flow;
        }
        total == self.total && load.iter().zip(instance.costs()).all(|(l, c)| l <= c)
    }
}

/// Edge state inside branch-and-bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Fix {
    Free,
    /// In the multicut (`x = 1`); removed from the graph.
    Cut,
    /// Never cut (`x = 0`); zero length, unlimited capacity.
    Keep,
}

/// Final state of the path-flow master LP.
#[derive(Debug, Clone)]
pub struct MasterState {
    pub paths: Vec<((VertexId, VertexId), Path)>,
    pub flows: Vec<Rational>,
    pub x: Vec<Rational>,
    pub value: Rational,
    pub rounds: usize,
    pub stats: SolveStats,
}

struct Relaxation {
    /// `None` when some pair is joined by kept edges only.
    master: Option<MasterState>,
}

/// Shortest paths from `source` under exact rational lengths; `None` skips
/// an edge.
fn rational_dijkstra(
    graph: &Graph,
    source: VertexId,
    length: &dyn Fn(EdgeId) -> Option<Rational>,
) -> (Vec<Option<Rational>>, Vec<Option<(VertexId, EdgeId)>>) {
    let n = graph.vertex_count();
    let mut dist: Vec<Option<Rational>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    dist[source] = Some(Rational::zero());
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Rational::zero(), source)));
    while let Some(Reverse((d, v))) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for &(w, e) in graph.neighbors(v) {
            let Some(len) = length(e) else { continue };
            let nd = &d + len;
            if dist[w].as_ref().is_none_or(|cur| nd < *cur) {
                dist[w] = Some(nd.clone());
                pred[w] = Some((v, e));
                heap.push(Reverse((nd, w)));
            }
        }
    }
    (dist, pred)
}

fn trace(pred: &[Option<(VertexId, EdgeId)>], source: VertexId, target: VertexId) -> Path {
    let mut vertices = vec![target];
    let mut edges = Vec::new();
    let mut cur = target;
    while cur != source {
        let (p, e) = pred[cur].expect("target reachable");
        vertices.push(p);
        edges.push(e);
        cur = p;
    }
    vertices.reverse();
    edges.reverse();
    Path { vertices, edges }
}

/// Violated paths (x-length < 1), at most one per pair, in lexicographic
/// pair order.
fn violated_paths(
    graph: &Graph,
    pairs: &[(VertexId, VertexId)],
    length: &dyn Fn(EdgeId) -> Option<Rational>,
    first_only: bool,
) -> Vec<((VertexId, VertexId), Path)> {
    let mut out = Vec::new();
    let one = Rational::one();
    let mut i = 0;
    while i < pairs.len() {
        let s = pairs[i].0;
        let (dist, pred) = rational_dijkstra(graph, s, length);
        while i < pairs.len() && pairs[i].0 == s {
            let t = pairs[i].1;
            if dist[t].as_ref().is_some_and(|d| *d < one) {
                out.push(((s, t), trace(&pred, s, t)));
                if first_only {
                    return out;
                }
            }
            i += 1;
        }
    }
    out
}

/// The lexicographically smallest pair whose shortest path under `x` has
/// length `< 1`, with that path; `None` certifies `x` feasible.
pub fn separate(instance: &MulticutInstance, x: &[Rational]) -> Option<((VertexId, VertexId), Path)> {
    let pairs = instance.pairs();
    let length = |e: EdgeId| Some(x[e].clone());
    violated_paths(instance.graph(), &pairs, &length, true).pop()
}

fn solve_relaxation(
    graph: &Graph,
    pairs: &[(VertexId, VertexId)],
    costs: &[Rational],
    fixes: &[Fix],
) -> Result<Relaxation, MulticutError> {
    // A pair joined through kept edges cannot be cut at all.
    let mut keep = DisjointSets::new(graph.vertex_count());
    for (e, edge) in graph.edges().iter().enumerate() {
        if fixes[e] == Fix::Keep {
            keep.union(edge.u, edge.v);
        }
    }
    if pairs.iter().any(|&(s, t)| keep.find(s) == keep.find(t)) {
        return Ok(Relaxation { master: None });
    }
    let mut lp = LinearProgram::new(crate::lp::Sense::Maximize);
    let mut row_of = vec![None; graph.edge_count()];
    for e in 0..graph.edge_count() {
        if fixes[e] == Fix::Free {
            row_of[e] = Some(lp.add_row(&[], Relation::Le, costs[e].clone())?);
        }
    }
    let mut paths: Vec<((VertexId, VertexId), Path)> = Vec::new();
    let mut seen: HashSet<Vec<EdgeId>> = HashSet::new();
    let mut rounds = 0;
    let mut x = vec![Rational::zero(); graph.edge_count()];
    loop {
        rounds += 1;
        let outcome = lp.solve()?;
        let sol = match outcome {
            LpOutcome::Optimal(sol) => sol,
            other => {
                return Err(MulticutError::Invariant(format!(
                    "path-flow master is feasible and bounded, got {other:?}"
                )))
            }
        };
        for e in 0..graph.edge_count() {
            x[e] = match (fixes[e], row_of[e]) {
                (Fix::Free, Some(r)) => sol.duals[r].clone(),
                (Fix::Cut, _) => Rational::one(),
                _ => Rational::zero(),
            };
        }
        let length = |e: EdgeId| match fixes[e] {
            Fix::Cut => None,
            Fix::Keep => Some(Rational::zero()),
            Fix::Free => Some(x[e].clone()),
        };
        let mut added = false;
        for (pair, path) in violated_paths(graph, pairs, &length, false) {
            if !seen.insert(path.edges.clone()) {
                continue;
            }
            let entries: Vec<_> = path
                .edges
                .iter()
                .filter_map(|&e| row_of[e].map(|r| (r, Rational::one())))
                .collect();
            lp.add_column(Domain::NonNegative, Rational::one(), &entries)?;
            paths.push((pair, path));
            added = true;
        }
        if !added {
            return Ok(Relaxation {
                master: Some(MasterState {
                    paths,
                    flows: sol.values,
                    x,
                    value: sol.objective,
                    rounds,
                    stats: sol.stats,
                }),
            });
        }
    }
}

/// Exact `OPT_LP` with the final master state (used for flow extraction).
pub fn solve_fractional_with_master(
    instance: &MulticutInstance,
) -> Result<(FractionalSolution, MasterState), MulticutError> {
    let fixes = vec![Fix::Free; instance.graph.edge_count()];
    let pairs = instance.pairs();
    let relax = solve_relaxation(&instance.graph, &pairs, &instance.costs, &fixes)?;
    let master = relax
        .master
        .ok_or_else(|| MulticutError::Invariant("no fixed edges, yet unseparable".into()))?;
    let value = instance.fractional_cost(&master.x);
    if value != master.value {
        return Err(MulticutError::Invariant(format!(
            "multicut cost {value} differs from flow value {}",
            master.value
        )));
    }
    Ok((
        FractionalSolution {
            x: master.x.clone(),
            value,
        },
        master,
    ))
}

pub fn solve_fractional(instance: &MulticutInstance) -> Result<FractionalSolution, MulticutError> {
    solve_fractional_with_master(instance).map(|(sol, _)| sol)
}

/// Path flows of the final master: exactly the LP dual of the multicut LP.
pub fn extract_multiflow(master: &MasterState) -> MultiflowSolution {
    let paths: Vec<FlowPath> = master
        .paths
        .iter()
        .zip(&master.flows)
        .filter(|(_, f)| f.is_positive())
        .map(|((pair, path), f)| FlowPath {
            pair: *pair,
            path: path.clone(),
            flow: f.clone(),
        })
        .collect();
    let total = paths.iter().map(|p| &p.flow).sum();
    MultiflowSolution { paths, total }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralResult {
    pub solution: MulticutSolution,
    /// Proven optimal; otherwise `lower_bound` is the best proven bound.
    pub optimal: bool,
    pub lower_bound: Rational,
    pub nodes: usize,
}

/// Greedy multicut: repeatedly take the lexicographically smallest pair
/// still connected, walk a shortest path in `G - F`, and cut its cheapest
/// edge that may be cut; then drop redundant edges, most expensive first.
fn greedy_multicut(
    graph: &Graph,
    pairs: &[(VertexId, VertexId)],
    costs: &[Rational],
    fixes: &[Fix],
) -> Option<EdgeSet> {
    let m = graph.edge_count();
    let mut f = EdgeSet::from_ids(m, (0..m).filter(|&e| fixes[e] == Fix::Cut));
    let connected = |f: &EdgeSet| -> Option<(VertexId, VertexId)> {
        let labels = graph.component_labels(f).expect("edge set matches graph");
        pairs.iter().copied().find(|&(s, t)| labels[s] == labels[t])
    };
    while let Some((s, t)) = connected(&f) {
        let length = |e: EdgeId| (!f.contains(e)).then(|| Rational::from_integer(graph.edges()[e].length.into()));
        let (_, pred) = rational_dijkstra(graph, s, &length);
        let path = trace(&pred, s, t);
        let pick = path
            .edges
            .iter()
            .copied()
            .filter(|&e| fixes[e] == Fix::Free)
            .min_by(|&a, &b| costs[a].cmp(&costs[b]).then(a.cmp(&b)))?;
        f.insert(pick);
    }
    let mut removable: Vec<EdgeId> = f.iter().filter(|&e| fixes[e] == Fix::Free).collect();
    removable.sort_by(|&a, &b| costs[b].cmp(&costs[a]).then(b.cmp(&a)));
    for e in removable {
        f.remove(e);
        if connected(&f).is_some() {
            f.insert(e);
        }
    }
    Some(f)
}

struct Node {
    bound: Rational,
    seq: usize,
    fixes: Vec<Fix>,
    x: Vec<Rational>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.bound == other.bound && self.seq == other.seq
    }
}
impl Eq for Node {}
impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Node {
    // BinaryHeap is a max-heap: smallest bound first, then oldest node.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.bound.cmp(&self.bound).then(other.seq.cmp(&self.seq))
    }
}

/// Best-bound branch-and-bound over the path LP. Branches on the
/// fractional edge whose value is closest to 1/2 (lowest id on ties),
/// cut branch first.
fn branch_and_bound(
    graph: &Graph,
    pairs: &[(VertexId, VertexId)],
    costs: &[Rational],
    node_budget: usize,
) -> Result<IntegralResult, MulticutError> {
    let m = graph.edge_count();
    let root_fixes = vec![Fix::Free; m];
    let mut best = greedy_multicut(graph, pairs, costs, &root_fixes)
        .ok_or_else(|| MulticutError::Invariant("greedy failed without fixed edges".into()))?;
    let mut best_cost: Rational = best.iter().map(|e| &costs[e]).sum();
    let half = rational::ratio(1, 2);
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut nodes = 0usize;

    let mut evaluate = |fixes: Vec<Fix>, nodes: &mut usize| -> Result<Option<Node>, MulticutError> {
        *nodes += 1;
        let relax = solve_relaxation(graph, pairs, costs, &fixes)?;
        let Some(master) = relax.master else { return Ok(None) };
        let fixed_cost: Rational = (0..m).filter(|&e| fixes[e] == Fix::Cut).map(|e| &costs[e]).sum();
        seq += 1;
        Ok(Some(Node {
            bound: fixed_cost + master.value,
            seq,
            fixes,
            x: master.x,
        }))
    };

    if let Some(root) = evaluate(root_fixes, &mut nodes)? {
        heap.push(root);
    }
    while let Some(node) = heap.pop() {
        if node.bound >= best_cost {
            heap.clear();
            break;
        }
        let fractional = (0..m)
            .filter(|&e| node.fixes[e] == Fix::Free && node.x[e].is_positive() && node.x[e] < Rational::one())
            .min_by(|&a, &b| {
                let da = (&node.x[a] - &half).abs();
                let db = (&node.x[b] - &half).abs();
                da.cmp(&db).then(a.cmp(&b))
            });
        let Some(e) = fractional else {
            // All free values are 0 or >= 1: that support is a multicut
            // whose cost cannot exceed the bound.
            let f = EdgeSet::from_ids(
                m,
                (0..m).filter(|&e| node.fixes[e] == Fix::Cut || (node.fixes[e] == Fix::Free && node.x[e] >= Rational::one())),
            );
            let cost: Rational = f.iter().map(|e| &costs[e]).sum();
            if cost < best_cost {
                best = f;
                best_cost = cost;
            }
            continue;
        };
        if nodes >= node_budget {
            heap.push(node);
            break;
        }
        for fix in [Fix::Cut, Fix::Keep] {
            let mut fixes = node.fixes.clone();
            fixes[e] = fix;
            if let Some(child) = evaluate(fixes, &mut nodes)? {
                if child.bound < best_cost {
                    heap.push(child);
                }
            }
        }
    }
    let open_bound = heap.iter().map(|n| n.bound.clone()).min();
    let (optimal, lower_bound) = match open_bound {
        Some(b) if b < best_cost => (false, b),
        _ => (true, best_cost.clone()),
    };
    Ok(IntegralResult {
        solution: MulticutSolution {
            edges: best,
            cost: best_cost,
        },
        optimal,
        lower_bound,
        nodes,
    })
}

pub const DEFAULT_NODE_BUDGET: usize = 100_000;

/// Exact `OPT_IP`, or the incumbent with a proven lower bound when the node
/// budget runs out.
pub fn solve_integral(instance: &MulticutInstance, node_budget: usize) -> Result<IntegralResult, MulticutError> {
    let pairs = instance.pairs();
    let result = branch_and_bound(&instance.graph, &pairs, &instance.costs, node_budget)?;
    if !instance.is_feasible_multicut(&result.solution.edges)? {
        return Err(MulticutError::Invariant("incumbent is not a multicut".into()));
    }
    Ok(result)
}

/// Minimum multicut under substituted edge weights (pricing oracle).
pub fn min_weight_multicut(
    instance: &MulticutInstance,
    weights: &[Rational],
    node_budget: usize,
) -> Result<IntegralResult, MulticutError> {
    if weights.len() != instance.graph.edge_count() {
        return Err(MulticutError::CostCount {
            expected: instance.graph.edge_count(),
            found: weights.len(),
        });
    }
    if let Some(e) = weights.iter().position(|w| w.is_negative()) {
        return Err(MulticutError::NegativeCost(e));
    }
    let pairs = instance.pairs();
    branch_and_bound(&instance.graph, &pairs, weights, node_budget)
}

/// The greedy multicut alone (no fixed edges).
pub fn greedy_incumbent(instance: &MulticutInstance) -> MulticutSolution {
    let m = instance.graph.edge_count();
    let edges = greedy_multicut(&instance.graph, &instance.pairs(), &instance.costs, &vec![Fix::Free; m])
        .expect("no edge is fixed, so every pair path has a cuttable edge");
    let cost = instance.cost_of(&edges);
    MulticutSolution { edges, cost }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapResult {
    pub lp: FractionalSolution,
    pub ip: IntegralResult,
    /// `OPT_IP / OPT_LP`; `None` when the pair set is empty or the integral
    /// side is not proven optimal.
    pub gap: Option<Rational>,
}

/// `OPT_IP / OPT_LP` with both sides reported. Asserts weak duality.
pub fn gap(instance: &MulticutInstance, node_budget: usize) -> Result<GapResult, MulticutError> {
    let lp = solve_fractional(instance)?;
    let ip = solve_integral(instance, node_budget)?;
    if lp.value > ip.solution.cost {
        return Err(MulticutError::Invariant(format!(
            "OPT_LP {} exceeds OPT_IP {}",
            lp.value, ip.solution.cost
        )));
    }
    let has_pairs = !instance.pairs().is_empty();
    if has_pairs && lp.value.is_zero() {
        return Err(MulticutError::DegenerateGap);
    }
    let gap = (has_pairs && ip.optimal).then(|| &ip.solution.cost / &lp.value);
    Ok(GapResult { lp, ip, gap })
}
