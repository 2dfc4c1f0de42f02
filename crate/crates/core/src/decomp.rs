//! Families of t-diameter decompositions, the tree layering construction and
//! the reduction from decompositions to multicut instances.

use num_traits::One;
use thiserror::Error;

use crate::graph::{DecompositionMetrics, EdgeId, EdgeSet, Graph, GraphError, VertexId};
use crate::multicut::{FractionalSolution, MulticutError, MulticutInstance, PairSet};
use crate::rational::{self, Rational};

pub const DEFAULT_EDGE_CAP: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecompError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Multicut(#[from] MulticutError),
    #[error("graph has {edges} edges; enumeration is capped at {cap}")]
    TooManyEdges { edges: usize, cap: usize },
    #[error("diameter bound must be positive")]
    ZeroBound,
    #[error("layer width must be positive")]
    ZeroWidth,
    #[error("{property} fails: {witness}")]
    Property { property: &'static str, witness: String },
}

/// Restriction to members with `rad_F(root) < k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RootFilter {
    pub root: VertexId,
    pub k: u64,
}

/// All edge sets `F` with `diam(F) < t` (optionally `rad_F(r) < k`), as
/// ascending bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionFamily {
    graph: Graph,
    t: u64,
    filter: Option<RootFilter>,
    members: Vec<u64>,
}

impl DecompositionFamily {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn filter(&self) -> Option<RootFilter> {
        self.filter
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn masks(&self) -> &[u64] {
        &self.members
    }

    pub fn member(&self, i: usize) -> EdgeSet {
        EdgeSet::from_mask(self.graph.edge_count(), self.members[i])
    }

    pub fn position(&self, mask: u64) -> Option<usize> {
        self.members.binary_search(&mask).ok()
    }

    /// `diam(F)` and `rad_F(root)` for every member, in member order.
    pub fn metrics(&self, root: Option<VertexId>) -> Vec<(u64, Option<u64>)> {
        let table = self.graph.all_pairs();
        let metrics = DecompositionMetrics::new(&self.graph, &table);
        self.members
            .iter()
            .map(|&mask| {
                (
                    metrics.diameter_of_mask(mask),
                    root.map(|r| metrics.radius_of_mask(r, mask)),
                )
            })
            .collect()
    }

    /// Members of this family that also satisfy `rad_F(root) < k`.
    pub fn radius_subfamily(&self, root: VertexId, k: u64) -> Vec<bool> {
        let table = self.graph.all_pairs();
        let metrics = DecompositionMetrics::new(&self.graph, &table);
        self.members
            .iter()
            .map(|&mask| metrics.radius_of_mask(root, mask) < k)
            .collect()
    }
}

/// Enumerates with the default edge cap.
pub fn enumerate(g: &Graph, t: u64, filter: Option<RootFilter>) -> Result<DecompositionFamily, DecompError> {
    enumerate_with_cap(g, t, filter, DEFAULT_EDGE_CAP)
}

/// Every qualifying subset in ascending mask order. Both conditions are
/// upward closed, so a mask is accepted without a check as soon as one of
/// its one-smaller subsets was.
pub fn enumerate_with_cap(
    g: &Graph,
    t: u64,
    filter: Option<RootFilter>,
    cap: usize,
) -> Result<DecompositionFamily, DecompError> {
    g.require_unit_lengths()?;
    let m = g.edge_count();
    if m > cap.min(63) {
        return Err(DecompError::TooManyEdges { edges: m, cap });
    }
    if t == 0 {
        return Err(DecompError::ZeroBound);
    }
    if let Some(f) = filter {
        g.check_vertex(f.root)?;
    }
    // F qualifies iff every pair below lands in different components of G - F.
    let table = g.all_pairs();
    let n = g.vertex_count();
    let mut forbidden = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if table.get(a, b).is_some_and(|d| d >= t) {
                forbidden.push((a, b));
            }
        }
    }
    if let Some(RootFilter { root, k }) = filter {
        for u in 0..n {
            if u != root && table.get(root, u).is_some_and(|d| d >= k) {
                forbidden.push((root.min(u), root.max(u)));
            }
        }
        if k == 0 {
            return Ok(DecompositionFamily {
                graph: g.clone(),
                t,
                filter,
                members: Vec::new(),
            });
        }
    }
    let ends: Vec<(VertexId, VertexId)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    let total = 1usize << m;
    let mut valid = vec![false; total];
    let mut members = Vec::new();
    let mut parent = vec![0usize; n];
    for mask in 0..total {
        let closed = (0..m).any(|b| mask >> b & 1 == 1 && valid[mask ^ (1 << b)]);
        let ok = closed || {
            for (v, p) in parent.iter_mut().enumerate() {
                *p = v;
            }
            for (e, &(u, v)) in ends.iter().enumerate() {
                if mask >> e & 1 == 0 {
                    let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
            forbidden
                .iter()
                .all(|&(a, b)| find(&mut parent, a) != find(&mut parent, b))
        };
        if ok {
            valid[mask] = true;
            members.push(mask as u64);
        }
    }
    Ok(DecompositionFamily {
        graph: g.clone(),
        t,
        filter,
        members,
    })
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// `F_i = { e : l(r, e) ≡ i (mod w) }` for `i = 0..w`.
pub fn tree_family(tree: &Graph, r: VertexId, w: u64) -> Result<Vec<EdgeSet>, DecompError> {
    if !tree.is_tree() {
        return Err(GraphError::NotATree.into());
    }
    tree.require_unit_lengths()?;
    tree.check_vertex(r)?;
    if w == 0 {
        return Err(DecompError::ZeroWidth);
    }
    let dist = tree.distances_from(r)?;
    let m = tree.edge_count();
    let mut family = vec![EdgeSet::empty(m); w as usize];
    for (e, edge) in tree.edges().iter().enumerate() {
        let d = dist[edge.u]
            .zip(dist[edge.v])
            .map(|(a, b)| a.min(b))
            .expect("trees are connected");
        family[(d % w) as usize].insert(e);
    }
    Ok(family)
}

/// The multicut instance whose pairs are all `(u, v)` with `l(u, v) >= t`,
/// together with the fractional solution `x(e) = l(e) / t`.
pub fn reduce_to_multicut(
    g: &Graph,
    t: u64,
    costs: Option<Vec<Rational>>,
) -> Result<(MulticutInstance, FractionalSolution), DecompError> {
    if t == 0 {
        return Err(DecompError::ZeroBound);
    }
    let costs = costs.unwrap_or_else(|| vec![Rational::one(); g.edge_count()]);
    let probe = MulticutInstance::new(g.clone(), costs.clone(), PairSet::AtDistance(t))?;
    let instance = MulticutInstance::new(g.clone(), costs, PairSet::Explicit(probe.pairs()))?;
    let tt = t as i64;
    let x: Vec<Rational> = g.edges().iter().map(|e| rational::ratio(e.length as i64, tt)).collect();
    let value = instance.fractional_cost(&x);
    Ok((instance, FractionalSolution { x, value }))
}

/// Checked facts about the uniform distribution over the tree layering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeReport {
    pub w: u64,
    /// `rad_{F_i}(r)` per layer.
    pub radii: Vec<u64>,
    /// `diam(F_i)` per layer.
    pub diameters: Vec<u64>,
    /// Per-edge load `sum_{F_i ∋ e} 1/w`.
    pub loads: Vec<Rational>,
    /// For `k = 1..=w`: `sum_{i<k} y_{F_i}`.
    pub cumulative: Vec<Rational>,
    /// For `k = 1..=w`: total mass of layers with `rad_{F_i}(r) < k`.
    pub radius_mass: Vec<Rational>,
}

/// Verifies the layering properties exactly; the first violation is
/// returned with a witness.
pub fn verify_tree_properties(tree: &Graph, r: VertexId, w: u64) -> Result<TreeReport, DecompError> {
    let family = tree_family(tree, r, w)?;
    let m = tree.edge_count();
    let share = rational::ratio(1, w as i64);
    let fail = |property, witness: String| Err(DecompError::Property { property, witness });

    let mut loads = vec![Rational::from_integer(0.into()); m];
    for f in &family {
        for e in f.iter() {
            loads[e] += &share;
        }
    }
    for (e, load) in loads.iter().enumerate() {
        if *load != share {
            return fail("partition", format!("edge {e} has load {load}"));
        }
    }

    let table = tree.all_pairs();
    let metrics = DecompositionMetrics::new(tree, &table);
    let mut radii = Vec::with_capacity(family.len());
    let mut diameters = Vec::with_capacity(family.len());
    for (i, f) in family.iter().enumerate() {
        let cut = |e: EdgeId| f.contains(e);
        let diam = metrics.diameter_where(cut);
        if diam >= 2 * w {
            return fail("diameter", format!("layer {i} has diameter {diam} >= {}", 2 * w));
        }
        let rad = metrics.radius_where(r, cut);
        if rad > i as u64 {
            return fail("root radius", format!("layer {i} has radius {rad} from the root"));
        }
        radii.push(rad);
        diameters.push(diam);
    }

    let mut cumulative = Vec::with_capacity(w as usize);
    let mut radius_mass = Vec::with_capacity(w as usize);
    for k in 1..=w {
        let sum = &share * Rational::from_integer((k as i64).into());
        let bound = Rational::one() - rational::ratio(2, 2 * w as i64) * Rational::from_integer(((w - k) as i64).into());
        if sum != bound {
            return fail("cumulative mass", format!("k = {k}: {sum} != {bound}"));
        }
        let mass = &share * Rational::from_integer((radii.iter().filter(|&&rad| rad < k).count() as i64).into());
        if mass < bound {
            return fail("radius mass", format!("k = {k}: {mass} < {bound}"));
        }
        cumulative.push(sum);
        radius_mass.push(mass);
    }
    Ok(TreeReport {
        w,
        radii,
        diameters,
        loads,
        cumulative,
        radius_mass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn ids(f: &EdgeSet) -> Vec<EdgeId> {
        f.iter().collect()
    }

    #[test]
    fn single_edge_needs_its_edge() {
        let fam = enumerate(&Graph::path(1), 1, None).unwrap();
        assert_eq!(fam.masks(), &[1]);
        let fam = enumerate(&Graph::path(1), 2, None).unwrap();
        assert_eq!(fam.masks(), &[0, 1]);
    }

    #[test]
    fn four_cycle_accepts_everything() {
        let fam = enumerate(&Graph::cycle(4).unwrap(), 4, None).unwrap();
        assert_eq!(fam.len(), 16);
        assert_eq!(fam.masks(), (0..16).collect::<Vec<u64>>().as_slice());
    }

    #[test]
    fn matches_predicate_exhaustively() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]).unwrap();
        for t in 1..5 {
            for filter in [None, Some(RootFilter { root: 0, k: 2 })] {
                let fam = enumerate(&g, t, filter).unwrap();
                let expect: Vec<u64> = (0..1u64 << 7)
                    .filter(|&mask| {
                        let f = EdgeSet::from_mask(7, mask);
                        g.is_t_diameter_decomposition(&f, t).unwrap()
                            && filter.is_none_or(|rf| g.radius_after(&f, rf.root).unwrap() < rf.k)
                    })
                    .collect();
                assert_eq!(fam.masks(), expect.as_slice(), "t = {t}, filter = {filter:?}");
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_with_cap(&Graph::path(5), 2, None, 4).unwrap_err();
        assert_eq!(err, DecompError::TooManyEdges { edges: 5, cap: 4 });
        let mut long = Graph::path(1);
        let far = long.add_vertex();
        long.add_edge(1, far, 2).unwrap();
        assert_eq!(enumerate(&long, 2, None).unwrap_err(), GraphError::NonUnitLengths.into());
    }

    #[test]
    fn tree_layers_on_a_path() {
        let fam = tree_family(&Graph::path(4), 0, 2).unwrap();
        assert_eq!(ids(&fam[0]), vec![0, 2]);
        assert_eq!(ids(&fam[1]), vec![1, 3]);
        let one = tree_family(&Graph::path(4), 0, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0], EdgeSet::full(4));
        assert_eq!(
            tree_family(&Graph::cycle(3).unwrap(), 0, 2).unwrap_err(),
            GraphError::NotATree.into()
        );
    }

    #[test]
    fn tree_report_on_a_path() {
        let rep = verify_tree_properties(&Graph::path(4), 0, 2).unwrap();
        assert_eq!(rep.loads, vec![ratio(1, 2); 4]);
        assert_eq!(rep.radii, vec![0, 1]);
        assert_eq!(rep.cumulative, vec![ratio(1, 2), ratio(1, 1)]);
    }

    #[test]
    fn tree_report_on_a_star() {
        let star = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let rep = verify_tree_properties(&star, 0, 2).unwrap();
        assert_eq!(rep.radii, vec![0, 1]);
        assert_eq!(rep.diameters, vec![0, 2]);
        let leaf = verify_tree_properties(&star, 3, 2).unwrap();
        assert_eq!(leaf.radii, vec![0, 1]);
        assert_eq!(leaf.diameters, vec![2, 1]);
    }

    #[test]
    fn reduction_pairs() {
        let (inst, x) = reduce_to_multicut(&Graph::path(3), 3, None).unwrap();
        assert_eq!(inst.pairs(), vec![(0, 3)]);
        assert_eq!(x.x, vec![ratio(1, 3); 3]);
        assert_eq!(x.value, ratio(1, 1));
        let (inst, _) = reduce_to_multicut(&Graph::cycle(4).unwrap(), 3, None).unwrap();
        assert!(inst.pairs().is_empty());
    }
}
