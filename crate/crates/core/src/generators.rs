//! Instance constructors. Everything produced here has unit edge lengths.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::graph::{one_sum, EdgeId, EdgeSet, Graph, GraphError, OneSum, VertexId};
use crate::multicut::{MulticutError, MulticutInstance, PairSet};
use crate::rational::{int, Rational};

/// Above this `k` the cactus family keeps its pair set implicit.
pub const EXPLICIT_PAIR_LIMIT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Multicut(#[from] MulticutError),
    #[error("parameter {name} = {value} is out of range ({expected})")]
    Parameter {
        name: &'static str,
        value: u64,
        expected: &'static str,
    },
}

fn check(name: &'static str, value: u64, ok: bool, expected: &'static str) -> Result<(), GenError> {
    if ok {
        Ok(())
    } else {
        Err(GenError::Parameter { name, value, expected })
    }
}

/// The two-level cactus: copies of a 4-cycle with two pendant edges are
/// glued at one cycle vertex, hung from a hub by a single edge, and `k` such
/// blocks are glued at the hub.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CactusGapInstance {
    pub k: usize,
    pub instance: MulticutInstance,
    /// Edges at the hub (cost `k`).
    pub e1: EdgeSet,
    /// Edges one step from the hub (cost 2).
    pub e2: EdgeSet,
    /// Edges two steps from the hub (cost 1).
    pub e3: EdgeSet,
}

/// Vertex labels inside one cycle block: `v1`, `v2`, `v3`, `v4`, `v5`, `v6`.
fn cycle_block() -> Graph {
    Graph::from_edges(6, &[(0, 1), (0, 2), (1, 3), (2, 3), (1, 4), (2, 5)])
        .expect("static block is simple")
}

pub fn gen_cactus_gap(k: usize) -> Result<CactusGapInstance, GenError> {
    let pairs = if k <= EXPLICIT_PAIR_LIMIT { None } else { Some(PairSet::AtDistance(4)) };
    gen_cactus_gap_with(k, pairs)
}

/// As [`gen_cactus_gap`], with the pair representation chosen by the
/// caller (`None` means explicit).
pub fn gen_cactus_gap_with(k: usize, pairs: Option<PairSet>) -> Result<CactusGapInstance, GenError> {
    check("k", k as u64, k >= 1, ">= 1")?;
    let block = cycle_block();
    let copies: Vec<(&Graph, VertexId)> = (0..k).map(|_| (&block, 0)).collect();
    let fan = one_sum(&copies)?;
    let mut hung = fan.graph.clone();
    hung.clear_marks();
    let hub = hung.add_vertex();
    hung.add_edge(fan.main_vertex, hub, 1)?;
    let arms: Vec<(&Graph, VertexId)> = (0..k).map(|_| (&hung, hub)).collect();
    let whole = one_sum(&arms)?;
    let mut g = whole.graph;
    g.clear_marks();
    g.set_mark("v0", whole.main_vertex)?;
    for (i, vmap) in whole.vertex_maps.iter().enumerate() {
        g.set_mark(format!("v1[{}]", i + 1), vmap[fan.main_vertex])?;
        for (j, bmap) in fan.vertex_maps.iter().enumerate() {
            for (label, &local) in bmap.iter().enumerate().skip(1) {
                g.set_mark(format!("v{}[{},{}]", label + 1, i + 1, j + 1), vmap[local])?;
            }
        }
    }

    let hub_dist = g.distances_from(whole.main_vertex)?;
    let m = g.edge_count();
    let mut classes = [EdgeSet::empty(m), EdgeSet::empty(m), EdgeSet::empty(m)];
    let mut costs = Vec::with_capacity(m);
    for (e, edge) in g.edges().iter().enumerate() {
        let d = hub_dist[edge.u].min(hub_dist[edge.v]).expect("connected") as usize;
        classes[d].insert(e);
        costs.push(match d {
            0 => int(k as i64),
            1 => int(2),
            _ => int(1),
        });
    }
    let probe = MulticutInstance::new(g.clone(), costs.clone(), PairSet::AtDistance(4))?;
    let pairs = pairs.unwrap_or_else(|| PairSet::Explicit(probe.pairs()));
    let instance = MulticutInstance::new(g, costs, pairs)?;
    let [e1, e2, e3] = classes;
    Ok(CactusGapInstance { k, instance, e1, e2, e3 })
}

/// A `2w`-cycle through `r, u, r', v` (quarter arcs of `w/2`) with pendant
/// paths `u - u'` and `v - v'` of length `w/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleGadget {
    pub w: u64,
    pub graph: Graph,
    /// `r -> u`.
    pub p_u: Vec<EdgeId>,
    /// `u -> r'`.
    pub p_a: Vec<EdgeId>,
    /// `r' -> v`.
    pub p_b: Vec<EdgeId>,
    /// `v -> r`.
    pub p_v: Vec<EdgeId>,
    /// `u -> u'`.
    pub p_c: Vec<EdgeId>,
    /// `v -> v'`.
    pub p_d: Vec<EdgeId>,
}

impl CycleGadget {
    pub fn root(&self) -> VertexId {
        self.graph.mark("r").expect("gadget marks r")
    }

    /// Vertex sequence of a named path's edge list.
    pub fn path_vertices(&self, start: VertexId, edges: &[EdgeId]) -> Vec<VertexId> {
        let mut out = vec![start];
        for &e in edges {
            let last = *out.last().expect("non-empty");
            out.push(self.graph.edges()[e].other(last));
        }
        out
    }
}

pub fn gen_cycle_gadget(w: u64) -> Result<CycleGadget, GenError> {
    check("w", w, w >= 2 && w.is_multiple_of(2), "positive and even")?;
    let n = 2 * w as usize;
    let half = w as usize / 2;
    let mut g = Graph::cycle(n)?;
    let (r, u, rp, v) = (0, half, 2 * half, 3 * half);
    let ring: Vec<EdgeId> = (0..n).collect();
    let pendant = |g: &mut Graph, from: VertexId| -> Result<(Vec<EdgeId>, VertexId), GraphError> {
        let mut cur = from;
        let mut edges = Vec::with_capacity(half);
        for _ in 0..half {
            let next = g.add_vertex();
            edges.push(g.add_edge(cur, next, 1)?);
            cur = next;
        }
        Ok((edges, cur))
    };
    let (p_c, u_end) = pendant(&mut g, u)?;
    let (p_d, v_end) = pendant(&mut g, v)?;
    for (name, vertex) in [("r", r), ("u", u), ("r'", rp), ("v", v), ("u'", u_end), ("v'", v_end)] {
        g.set_mark(name, vertex)?;
    }
    Ok(CycleGadget {
        w,
        graph: g,
        p_u: ring[0..half].to_vec(),
        p_a: ring[half..2 * half].to_vec(),
        p_b: ring[2 * half..3 * half].to_vec(),
        p_v: ring[3 * half..].to_vec(),
        p_c,
        p_d,
    })
}

/// Star `K_{1,leaves}` with unit costs and every leaf pair as a pair.
pub fn gen_star_gap(leaves: usize) -> Result<MulticutInstance, GenError> {
    check("leaves", leaves as u64, leaves >= 1, ">= 1")?;
    let edges: Vec<(VertexId, VertexId)> = (1..=leaves).map(|l| (0, l)).collect();
    let g = Graph::from_edges(leaves + 1, &edges)?;
    let pairs = (1..=leaves)
        .flat_map(|a| (a + 1..=leaves).map(move |b| (a, b)))
        .collect();
    Ok(MulticutInstance::with_unit_costs(g, PairSet::Explicit(pairs))?)
}

/// Appends a pendant path of `len` unit edges at `v`; returns the graph and
/// the far endpoint (`v` itself when `len = 0`).
pub fn attach_path(g: &Graph, v: VertexId, len: usize) -> Result<(Graph, VertexId), GenError> {
    g.check_vertex(v)?;
    let mut out = g.clone();
    let mut cur = v;
    for _ in 0..len {
        let next = out.add_vertex();
        out.add_edge(cur, next, 1)?;
        cur = next;
    }
    Ok((out, cur))
}

/// `m` disjoint copies of `g` glued at their copies of `r`.
pub fn amplify_one_sum(g: &Graph, r: VertexId, m: usize) -> Result<OneSum, GenError> {
    check("m", m as u64, m >= 1, ">= 1")?;
    let parts: Vec<(&Graph, VertexId)> = (0..m).map(|_| (g, r)).collect();
    Ok(one_sum(&parts)?)
}

/// Uniform random recursive tree: vertex `i` attaches to a uniform earlier
/// vertex, then labels are shuffled.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Graph {
    let mut labels: Vec<VertexId> = (0..n).collect();
    labels.shuffle(rng);
    let mut g = Graph::new(n);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        g.add_edge(labels[i], labels[j], 1).expect("tree edges are simple");
    }
    g
}

/// Random connected simple graph: a random tree plus `extra` further edges
/// (fewer if the graph becomes complete).
pub fn random_connected<R: Rng + ?Sized>(n: usize, extra: usize, rng: &mut R) -> Graph {
    let mut g = random_tree(n, rng);
    let mut missing: Vec<(VertexId, VertexId)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| g.edge_between(a, b).is_none())
        .collect();
    missing.shuffle(rng);
    for &(a, b) in missing.iter().take(extra) {
        g.add_edge(a, b, 1).expect("edge was missing");
    }
    g
}

/// Up to `count` distinct random vertex pairs `s < t`.
pub fn random_pairs<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<(VertexId, VertexId)> {
    let mut all: Vec<(VertexId, VertexId)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    all.shuffle(rng);
    let chosen: BTreeSet<_> = all.into_iter().take(count).collect();
    chosen.into_iter().collect()
}

/// Random costs in `{1, .., max}`.
pub fn random_costs<R: Rng + ?Sized>(m: usize, max: i64, rng: &mut R) -> Vec<Rational> {
    (0..m).map(|_| int(rng.gen_range(1..=max))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cactus_gap_small() {
        let c = gen_cactus_gap(1).unwrap();
        let g = c.instance.graph();
        assert_eq!((g.vertex_count(), g.edge_count()), (7, 7));
        let (a, b) = (g.mark("v5[1,1]").unwrap(), g.mark("v6[1,1]").unwrap());
        assert_eq!(c.instance.pairs(), vec![(a.min(b), a.max(b))]);
        let x = vec![ratio(1, 4); 7];
        assert_eq!(c.instance.fractional_cost(&x), ratio(9, 4));
        assert!(g.is_cactus());
    }

    #[test]
    fn cactus_gap_classes() {
        for k in 1..=6usize {
            let c = gen_cactus_gap(k).unwrap();
            assert_eq!(c.e1.len(), k);
            assert_eq!(c.e2.len(), 2 * k * k);
            assert_eq!(c.e3.len(), 4 * k * k);
            let g = c.instance.graph();
            assert_eq!(g.vertex_count(), 1 + k * (1 + 5 * k));
            let m = g.edge_count();
            let x = vec![ratio(1, 4); m];
            assert_eq!(c.instance.fractional_cost(&x), ratio(9 * (k * k) as i64, 4));
            let v0 = g.mark("v0").unwrap();
            for e in c.e2.iter() {
                assert_eq!(g.dist_vertex_edge(v0, e).unwrap(), Some(1));
            }
            for e in c.e3.iter() {
                assert_eq!(g.dist_vertex_edge(v0, e).unwrap(), Some(2));
            }
        }
        assert!(gen_cactus_gap(3).unwrap().instance.graph().is_cactus());
        assert_eq!(gen_cactus_gap(3).unwrap().instance.graph().vertex_count(), 49);
    }

    #[test]
    fn cactus_gap_implicit_pairs_agree() {
        let explicit = gen_cactus_gap(2).unwrap();
        let implicit = gen_cactus_gap_with(2, Some(PairSet::AtDistance(4))).unwrap();
        assert_eq!(explicit.instance.pairs(), implicit.instance.pairs());
    }

    #[test]
    fn cycle_gadget_shape() {
        let g2 = gen_cycle_gadget(2).unwrap();
        assert_eq!(g2.graph.edge_count(), 6);
        let (a, b) = (g2.graph.mark("u'").unwrap(), g2.graph.mark("v'").unwrap());
        assert_eq!(g2.graph.shortest_dist(a, b).unwrap(), Some(4));
        let g4 = gen_cycle_gadget(4).unwrap();
        assert_eq!(g4.graph.edge_count(), 12);
        let (a, b) = (g4.graph.mark("u'").unwrap(), g4.graph.mark("v'").unwrap());
        assert_eq!(g4.graph.shortest_dist(a, b).unwrap(), Some(8));
        assert_eq!(
            g4.path_vertices(g4.root(), &g4.p_u).last(),
            Some(&g4.graph.mark("u").unwrap())
        );
        assert!(g4.graph.is_cactus());
        assert!(gen_cycle_gadget(3).is_err());
        assert!(gen_cycle_gadget(0).is_err());
    }

    #[test]
    fn star_and_pendants() {
        let s = gen_star_gap(3).unwrap();
        assert_eq!(s.pairs().len(), 3);
        let (g, far) = attach_path(&Graph::path(1), 1, 1).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(far, 2);
        let (same, v) = attach_path(&Graph::path(1), 0, 0).unwrap();
        assert_eq!((same, v), (Graph::path(1), 0));
    }

    #[test]
    fn amplification_counts() {
        let two = amplify_one_sum(&Graph::path(1), 0, 2).unwrap();
        assert_eq!(two.graph.edge_count(), 2);
        assert!(two.graph.is_tree());
        let gadget = gen_cycle_gadget(2).unwrap();
        let three = amplify_one_sum(&gadget.graph, gadget.root(), 3).unwrap();
        assert_eq!(three.graph.edge_count(), 18);
        assert!(three.graph.is_cactus());
    }

    #[test]
    fn random_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..30 {
            assert!(random_tree(n, &mut rng).is_tree());
            let g = random_connected(n, 3, &mut rng);
            assert!(g.is_connected());
            assert_eq!(g.edge_count(), (n - 1 + 3).min(n * (n - 1) / 2));
        }
        let pairs = random_pairs(5, 4, &mut rng);
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().all(|&(s, t)| s < t));
    }
}
