//! Simple undirected graphs with positive integer edge lengths.
//!
//! All distances are exact integers. Distances between vertices of a
//! component of `G - F` are always measured in the full graph `G`, never in
//! the subgraph induced by the component.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use thiserror::Error;

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid vertex id {0}")]
    InvalidVertex(VertexId),
    #[error("invalid edge id {0}")]
    InvalidEdge(EdgeId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("parallel edge between {0} and {1}")]
    ParallelEdge(VertexId, VertexId),
    #[error("edge lengths must be positive")]
    ZeroLength,
    #[error("edge set is over {found} edges but the graph has {expected}")]
    EdgeSetMismatch { expected: usize, found: usize },
    #[error("subdivision needs at least one part")]
    ZeroParts,
    #[error("1-sum of an empty list of graphs")]
    EmptyOneSum,
    #[error("unknown mark {0:?}")]
    UnknownMark(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error("operation requires unit edge lengths")]
    NonUnitLengths,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub length: u64,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Set of edge ids over a fixed edge universe `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeSet {
    universe: usize,
    words: Vec<u64>,
}

impl EdgeSet {
    pub fn empty(universe: usize) -> Self {
        Self {
            universe,
            words: vec![0; universe.div_ceil(64)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut set = Self::empty(universe);
        for e in 0..universe {
            set.insert(e);
        }
        set
    }

    pub fn from_ids<I: IntoIterator<Item = EdgeId>>(universe: usize, ids: I) -> Self {
        let mut set = Self::empty(universe);
        for e in ids {
            set.insert(e);
        }
        set
    }

    /// Bit `i` of `mask` selects edge `i`. Requires `universe <= 64`.
    pub fn from_mask(universe: usize, mask: u64) -> Self {
        assert!(universe <= 64, "mask form needs at most 64 edges");
        let mut set = Self::empty(universe);
        if universe > 0 {
            let keep = if universe == 64 { u64::MAX } else { (1u64 << universe) - 1 };
            set.words[0] = mask & keep;
        }
        set
    }

    pub fn to_mask(&self) -> Option<u64> {
        match self.words.len() {
            0 => Some(0),
            1 => Some(self.words[0]),
            _ => None,
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        e < self.universe && self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn insert(&mut self, e: EdgeId) {
        assert!(e < self.universe, "edge {e} outside universe {}", self.universe);
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn remove(&mut self, e: EdgeId) {
        if e < self.universe {
            self.words[e / 64] &= !(1 << (e % 64));
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &EdgeSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter().chain(std::iter::repeat(&0)))
            .all(|(a, b)| a & !b == 0)
    }

    /// Edge ids in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.universe).filter(move |&e| self.contains(e))
    }

    pub fn union(&self, other: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        out
    }
}

/// All-pairs distance table; `None` is +∞.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    dist: Vec<u64>,
}

const INF: u64 = u64::MAX;

impl DistanceTable {
    pub fn get(&self, u: VertexId, v: VertexId) -> Option<u64> {
        let d = self.dist[u * self.n + v];
        (d != INF).then_some(d)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    fn raw(&self, u: VertexId, v: VertexId) -> u64 {
        self.dist[u * self.n + v]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(VertexId, EdgeId)>>,
    marks: BTreeMap<String, VertexId>,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Self {
            vertex_count,
            edges: Vec::new(),
            adjacency: vec![Vec::new(); vertex_count],
            marks: BTreeMap::new(),
        }
    }

    /// Unit-length graph from an edge list.
    pub fn from_edges(vertex_count: usize, edges: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        let mut g = Self::new(vertex_count);
        for &(u, v) in edges {
            g.add_edge(u, v, 1)?;
        }
        Ok(g)
    }

    pub fn path(edge_count: usize) -> Self {
        let edges: Vec<_> = (0..edge_count).map(|i| (i, i + 1)).collect();
        Self::from_edges(edge_count + 1, &edges).expect("path is simple")
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Self::from_edges(n, &edges).expect("complete graph is simple")
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.adjacency.push(Vec::new());
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, length: u64) -> Result<EdgeId, GraphError> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if length == 0 {
            return Err(GraphError::ZeroLength);
        }
        if self.adjacency[u].iter().any(|&(w, _)| w == v) {
            return Err(GraphError::ParallelEdge(u.min(v), u.max(v)));
        }
        let id = self.edges.len();
        self.edges.push(Edge { u, v, length });
        self.adjacency[u].push((v, id));
        self.adjacency[v].push((u, id));
        Ok(id)
    }

    pub fn set_mark(&mut self, name: impl Into<String>, v: VertexId) -> Result<(), GraphError> {
        self.check_vertex(v)?;
        self.marks.insert(name.into(), v);
        Ok(())
    }

    pub fn mark(&self, name: &str) -> Result<VertexId, GraphError> {
        self.marks
            .get(name)
            .copied()
            .ok_or_else(|| GraphError::UnknownMark(name.to_string()))
    }

    pub fn marks(&self) -> &BTreeMap<String, VertexId> {
        &self.marks
    }

    pub fn clear_marks(&mut self) {
        self.marks.clear();
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Result<&Edge, GraphError> {
        self.edges.get(e).ok_or(GraphError::InvalidEdge(e))
    }

    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn edge_between(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        self.adjacency
            .get(u)?
            .iter()
            .find(|&&(w, _)| w == v)
            .map(|&(_, e)| e)
    }

    pub fn has_unit_lengths(&self) -> bool {
        self.edges.iter().all(|e| e.length == 1)
    }

    pub fn require_unit_lengths(&self) -> Result<(), GraphError> {
        if self.has_unit_lengths() {
            Ok(())
        } else {
            Err(GraphError::NonUnitLengths)
        }
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), GraphError> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(GraphError::InvalidVertex(v))
        }
    }

    pub fn check_edge_set(&self, f: &EdgeSet) -> Result<(), GraphError> {
        if f.universe() == self.edge_count() {
            Ok(())
        } else {
            Err(GraphError::EdgeSetMismatch {
                expected: self.edge_count(),
                found: f.universe(),
            })
        }
    }

    /// Single-source distances (Dijkstra; plain BFS when all lengths are 1).
    pub fn distances_from(&self, source: VertexId) -> Result<Vec<Option<u64>>, GraphError> {
        self.check_vertex(source)?;
        Ok(self
            .raw_distances_from(source)
            .into_iter()
            .map(|d| (d != INF).then_some(d))
            .collect())
    }

    fn raw_distances_from(&self, source: VertexId) -> Vec<u64> {
        let mut dist = vec![INF; self.vertex_count];
        dist[source] = 0;
        if self.has_unit_lengths() {
            let mut queue = VecDeque::from([source]);
            while let Some(x) = queue.pop_front() {
                for &(y, _) in &self.adjacency[x] {
                    if dist[y] == INF {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            return dist;
        }
        let mut heap = std::collections::BinaryHeap::new();
        heap.push(std::cmp::Reverse((0u64, source)));
        while let Some(std::cmp::Reverse((d, x))) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for &(y, e) in &self.adjacency[x] {
                let nd = d + self.edges[e].length;
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(std::cmp::Reverse((nd, y)));
                }
            }
        }
        dist
    }

    pub fn all_pairs(&self) -> DistanceTable {
        let n = self.vertex_count;
        let mut dist = Vec::with_capacity(n * n);
        for s in 0..n {
            dist.extend(self.raw_distances_from(s));
        }
        DistanceTable { n, dist }
    }

    /// Length-weighted shortest-path distance; `None` when disconnected.
    pub fn shortest_dist(&self, u: VertexId, v: VertexId) -> Result<Option<u64>, GraphError> {
        self.check_vertex(v)?;
        Ok(self.distances_from(u)?[v])
    }

    /// `min(l(v, x), l(v, y))` for `e = (x, y)`.
    pub fn dist_vertex_edge(&self, v: VertexId, e: EdgeId) -> Result<Option<u64>, GraphError> {
        let edge = *self.edge(e)?;
        let dist = self.distances_from(v)?;
        Ok(match (dist[edge.u], dist[edge.v]) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        })
    }

    /// Component label of every vertex in `G - F`; labels are the smallest
    /// vertex id of each component.
    pub fn component_labels(&self, f: &EdgeSet) -> Result<Vec<VertexId>, GraphError> {
        self.check_edge_set(f)?;
        Ok(self.labels_where(|e| f.contains(e)))
    }

    fn labels_where(&self, is_cut: impl Fn(EdgeId) -> bool) -> Vec<VertexId> {
        let mut dsu = DisjointSets::new(self.vertex_count);
        for (id, e) in self.edges.iter().enumerate() {
            if !is_cut(id) {
                dsu.union(e.u, e.v);
            }
        }
        (0..self.vertex_count).map(|v| dsu.find(v)).collect()
    }

    /// Vertex set of `C_F(v)`, ascending.
    pub fn component_of(&self, f: &EdgeSet, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(v)?;
        let labels = self.component_labels(f)?;
        Ok((0..self.vertex_count).filter(|&u| labels[u] == labels[v]).collect())
    }

    /// `rad_F(v)`: the largest G-distance from `v` to a vertex of `C_F(v)`.
    pub fn radius_after(&self, f: &EdgeSet, v: VertexId) -> Result<u64, GraphError> {
        let comp = self.component_of(f, v)?;
        let dist = self.raw_distances_from(v);
        Ok(comp.iter().map(|&u| dist[u]).max().unwrap_or(0))
    }

    /// `diam(F)`: the largest G-distance between two vertices sharing a
    /// component of `G - F`.
    pub fn decomposition_diameter(&self, f: &EdgeSet) -> Result<u64, GraphError> {
        self.check_edge_set(f)?;
        let table = self.all_pairs();
        Ok(DecompositionMetrics::new(self, &table).diameter_where(|e| f.contains(e)))
    }

    /// `diam(F) < t` (strict).
    pub fn is_t_diameter_decomposition(&self, f: &EdgeSet, t: u64) -> Result<bool, GraphError> {
        Ok(self.decomposition_diameter(f)? < t)
    }

    pub fn is_connected(&self) -> bool {
        let labels = self.labels_where(|_| false);
        labels.iter().all(|&l| l == labels[0])
    }

    pub fn is_tree(&self) -> bool {
        self.vertex_count > 0 && self.edge_count() + 1 == self.vertex_count && self.is_connected()
    }

    /// Replaces edge `e` by a path of `parts` unit edges through fresh
    /// vertices. The first segment keeps id `e`; the others are appended.
    pub fn subdivide(&self, e: EdgeId, parts: usize) -> Result<Subdivision, GraphError> {
        let edge = *self.edge(e)?;
        if parts == 0 {
            return Err(GraphError::ZeroParts);
        }
        let mut g = Graph::new(self.vertex_count);
        g.marks = self.marks.clone();
        let fresh: Vec<VertexId> = (1..parts).map(|_| g.add_vertex()).collect();
        let chain: Vec<VertexId> = std::iter::once(edge.u)
            .chain(fresh.iter().copied())
            .chain(std::iter::once(edge.v))
            .collect();
        for (id, old) in self.edges.iter().enumerate() {
            if id == e {
                g.add_edge(chain[0], chain[1], 1)?;
            } else {
                g.add_edge(old.u, old.v, old.length)?;
            }
        }
        let mut segments = vec![e];
        for w in chain[1..].windows(2) {
            segments.push(g.add_edge(w[0], w[1], 1)?);
        }
        let edge_map = (0..self.edge_count())
            .map(|id| if id == e { segments.clone() } else { vec![id] })
            .collect();
        Ok(Subdivision { graph: g, edge_map })
    }

    /// Subdivides every edge of length `L` into `L` unit edges.
    pub fn subdivide_to_unit(&self) -> Result<Subdivision, GraphError> {
        let mut current = self.clone();
        let mut edge_map: Vec<Vec<EdgeId>> = (0..self.edge_count()).map(|e| vec![e]).collect();
        for e in 0..self.edge_count() {
            let len = self.edges[e].length as usize;
            if len > 1 {
                let sub = current.subdivide(e, len)?;
                edge_map[e] = sub.edge_map[e].clone();
                current = sub.graph;
            }
        }
        Ok(Subdivision { graph: current, edge_map })
    }

    /// Every edge lies on at most one cycle: each biconnected block is a
    /// bridge or a simple cycle.
    pub fn is_cactus(&self) -> bool {
        blocks(self).iter().all(|block| {
            let mut vertices: Vec<VertexId> = block
                .iter()
                .flat_map(|&e| [self.edges[e].u, self.edges[e].v])
                .collect();
            vertices.sort_unstable();
            vertices.dedup();
            block.len() == 1 || block.len() == vertices.len()
        })
    }
}

#[derive(Debug, Clone)]
pub struct Subdivision {
    pub graph: Graph,
    /// Old edge id to the new edge ids replacing it, in path order.
    pub edge_map: Vec<Vec<EdgeId>>,
}

#[derive(Debug, Clone)]
pub struct OneSum {
    pub graph: Graph,
    /// Per input: old vertex id to new vertex id.
    pub vertex_maps: Vec<Vec<VertexId>>,
    /// Per input: old edge id to new edge id.
    pub edge_maps: Vec<Vec<EdgeId>>,
    pub main_vertex: VertexId,
}

/// Disjoint union of the inputs with all roots identified. The first input
/// keeps its vertex and edge ids; the others are appended in order. With
/// more than one input, marks are carried over as `name@i`.
pub fn one_sum(parts: &[(&Graph, VertexId)]) -> Result<OneSum, GraphError> {
    let (first, root) = *parts.first().ok_or(GraphError::EmptyOneSum)?;
    for &(g, r) in parts {
        g.check_vertex(r)?;
    }
    let mut graph = Graph::new(first.vertex_count);
    let mut vertex_maps = Vec::with_capacity(parts.len());
    let mut edge_maps = Vec::with_capacity(parts.len());
    for (i, &(g, r)) in parts.iter().enumerate() {
        let map: Vec<VertexId> = if i == 0 {
            (0..g.vertex_count).collect()
        } else {
            (0..g.vertex_count)
                .map(|v| if v == r { root } else { graph.add_vertex() })
                .collect()
        };
        let mut emap = Vec::with_capacity(g.edge_count());
        for e in &g.edges {
            emap.push(graph.add_edge(map[e.u], map[e.v], e.length)?);
        }
        for (name, &v) in &g.marks {
            let name = if parts.len() == 1 { name.clone() } else { format!("{name}@{i}") };
            graph.marks.insert(name, map[v]);
        }
        vertex_maps.push(map);
        edge_maps.push(emap);
    }
    Ok(OneSum {
        graph,
        vertex_maps,
        edge_maps,
        main_vertex: root,
    })
}

/// Precomputed distances for repeated diameter/radius queries against many
/// edge sets of one graph.
pub struct DecompositionMetrics<'a> {
    graph: &'a Graph,
    table: &'a DistanceTable,
}

impl<'a> DecompositionMetrics<'a> {
    pub fn new(graph: &'a Graph, table: &'a DistanceTable) -> Self {
        Self { graph, table }
    }

    pub fn diameter_where(&self, is_cut: impl Fn(EdgeId) -> bool) -> u64 {
        let labels = self.graph.labels_where(is_cut);
        let mut groups: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
        for (v, &l) in labels.iter().enumerate() {
            groups.entry(l).or_default().push(v);
        }
        let mut diam = 0;
        for members in groups.values() {
            for (i, &a) in members.iter().enumerate() {
                for &b in &members[i + 1..] {
                    diam = diam.max(self.table.raw(a, b));
                }
            }
        }
        diam
    }

    pub fn radius_where(&self, v: VertexId, is_cut: impl Fn(EdgeId) -> bool) -> u64 {
        let labels = self.graph.labels_where(is_cut);
        (0..self.graph.vertex_count)
            .filter(|&u| labels[u] == labels[v])
            .map(|u| self.table.raw(v, u))
            .max()
            .unwrap_or(0)
    }

    pub fn diameter_of_mask(&self, mask: u64) -> u64 {
        self.diameter_where(|e| mask >> e & 1 == 1)
    }

    pub fn radius_of_mask(&self, v: VertexId, mask: u64) -> u64 {
        self.radius_where(v, |e| mask >> e & 1 == 1)
    }
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Keeps the smaller root so labels are canonical.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi] = lo;
        }
    }
}

/// Biconnected blocks as edge lists (iterative Hopcroft–Tarjan).
fn blocks(g: &Graph) -> Vec<Vec<EdgeId>> {
    let n = g.vertex_count();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut timer = 0;
    let mut edge_stack: Vec<EdgeId> = Vec::new();
    let mut out = Vec::new();
    for start in 0..n {
        if disc[start] != usize::MAX {
            continue;
        }
        disc[start] = timer;
        low[start] = timer;
        timer += 1;
        // (vertex, parent edge, next neighbor index)
        let mut stack: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(start, None, 0)];
        while let Some(top) = stack.last_mut() {
            let (v, parent_edge, next) = *top;
            if let Some(&(w, e)) = g.neighbors(v).get(next) {
                top.2 += 1;
                if Some(e) == parent_edge {
                    continue;
                }
                if disc[w] == usize::MAX {
                    edge_stack.push(e);
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, Some(e), 0));
                } else if disc[w] < disc[v] {
                    edge_stack.push(e);
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let (Some(&(u, _, _)), Some(pe)) = (stack.last(), parent_edge) {
                    low[u] = low[u].min(low[v]);
                    if low[v] >= disc[u] {
                        let mut block = Vec::new();
                        while let Some(e) = edge_stack.pop() {
                            block.push(e);
                            if e == pe {
                                break;
                            }
                        }
                        out.push(block);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c4() -> Graph {
        Graph::cycle(4).unwrap()
    }

    #[test]
    fn distances_basic() {
        let g = Graph::path(1);
        assert_eq!(g.shortest_dist(0, 1).unwrap(), Some(1));
        assert_eq!(g.shortest_dist(1, 1).unwrap(), Some(0));
        let mut h = Graph::new(3);
        h.add_edge(0, 1, 1).unwrap();
        assert_eq!(h.shortest_dist(0, 2).unwrap(), None);
        assert_eq!(h.shortest_dist(0, 7), Err(GraphError::InvalidVertex(7)));
    }

    #[test]
    fn weighted_distances() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1, 5).unwrap();
        g.add_edge(1, 2, 1).unwrap();
        g.add_edge(0, 2, 2).unwrap();
        assert_eq!(g.shortest_dist(0, 1).unwrap(), Some(3));
    }

    #[test]
    fn rejects_non_simple_edges() {
        let mut g = Graph::new(2);
        assert_eq!(g.add_edge(0, 0, 1), Err(GraphError::SelfLoop(0)));
        g.add_edge(0, 1, 1).unwrap();
        assert_eq!(g.add_edge(1, 0, 1), Err(GraphError::ParallelEdge(0, 1)));
        assert_eq!(g.add_edge(0, 1, 0), Err(GraphError::ZeroLength));
    }

    #[test]
    fn vertex_edge_distance() {
        let g = Graph::path(2); // r=0, a=1, b=2
        assert_eq!(g.dist_vertex_edge(0, 1).unwrap(), Some(1));
        assert_eq!(g.dist_vertex_edge(1, 0).unwrap(), Some(0));
    }

    #[test]
    fn components() {
        let g = Graph::cycle(3).unwrap();
        let all = EdgeSet::full(3);
        assert_eq!(g.component_of(&all, 1).unwrap(), vec![1]);
        assert_eq!(g.component_of(&EdgeSet::empty(3), 1).unwrap(), vec![0, 1, 2]);
        let one = EdgeSet::from_ids(3, [0]);
        assert_eq!(g.component_of(&one, 2).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn radius_uses_full_graph_distances() {
        let g = c4();
        let f = EdgeSet::from_ids(4, [0]);
        for v in 0..4 {
            assert_eq!(g.radius_after(&f, v).unwrap(), 2);
        }
        assert_eq!(g.radius_after(&EdgeSet::full(4), 0).unwrap(), 0);
        assert_eq!(Graph::path(3).radius_after(&EdgeSet::empty(3), 0).unwrap(), 3);
    }

    #[test]
    fn diameters() {
        let g = Graph::cycle(6).unwrap();
        assert_eq!(g.decomposition_diameter(&EdgeSet::empty(6)).unwrap(), 3);
        assert_eq!(g.decomposition_diameter(&EdgeSet::full(6)).unwrap(), 0);
        assert!(g.is_t_diameter_decomposition(&EdgeSet::empty(6), 6).unwrap());
        assert!(g.is_t_diameter_decomposition(&EdgeSet::full(6), 1).unwrap());
        assert!(!g.is_t_diameter_decomposition(&EdgeSet::empty(6), 3).unwrap());
        assert!(g.decomposition_diameter(&EdgeSet::empty(5)).is_err());
    }

    #[test]
    fn subdivision() {
        let g = Graph::path(1);
        let s = g.subdivide(0, 3).unwrap();
        assert_eq!(s.graph.edge_count(), 3);
        assert_eq!(s.graph.shortest_dist(0, 1).unwrap(), Some(3));
        assert_eq!(s.edge_map[0].len(), 3);
        assert_eq!(g.subdivide(0, 1).unwrap().graph, g);
        assert_eq!(g.subdivide(0, 0).unwrap_err(), GraphError::ZeroParts);

        let mut c = Graph::cycle(3).unwrap();
        for e in 0..3 {
            c = c.subdivide(e, 2).unwrap().graph;
        }
        assert_eq!(c.edge_count(), 6);
        assert_eq!(c.vertex_count(), 6);
        assert!(c.is_cactus());
        assert_eq!(c.decomposition_diameter(&EdgeSet::empty(6)).unwrap(), 3);
    }

    #[test]
    fn unit_subdivision_keeps_distances() {
        let mut g = Graph::new(4);
        g.add_edge(0, 1, 3).unwrap();
        g.add_edge(1, 2, 2).unwrap();
        g.add_edge(0, 3, 1).unwrap();
        g.add_edge(3, 2, 7).unwrap();
        let s = g.subdivide_to_unit().unwrap();
        assert!(s.graph.has_unit_lengths());
        for u in 0..4 {
            for v in 0..4 {
                assert_eq!(g.shortest_dist(u, v).unwrap(), s.graph.shortest_dist(u, v).unwrap());
            }
        }
    }

    #[test]
    fn one_sums() {
        let e = Graph::path(1);
        let single = one_sum(&[(&e, 0)]).unwrap();
        assert_eq!(single.graph, e);
        let two = one_sum(&[(&e, 0), (&e, 0)]).unwrap();
        assert_eq!(two.graph.edge_count(), 2);
        assert_eq!(two.graph.vertex_count(), 3);
        assert_eq!(two.graph.shortest_dist(1, 2).unwrap(), Some(2));
        let star = one_sum(&[(&e, 0), (&e, 0), (&e, 0), (&e, 0)]).unwrap();
        assert_eq!(star.main_vertex, 0);
        assert_eq!(star.graph.neighbors(0).len(), 4);
        assert!(star.graph.is_tree());
        assert!(matches!(one_sum(&[]), Err(GraphError::EmptyOneSum)));
    }

    #[test]
    fn cactus_recognition() {
        assert!(Graph::path(5).is_cactus());
        assert!(!Graph::complete(4).is_cactus());
        assert!(Graph::cycle(5).unwrap().is_cactus());
        // two triangles sharing a vertex
        let bowtie = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)]).unwrap();
        assert!(bowtie.is_cactus());
        // two triangles sharing an edge
        let diamond = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 0), (1, 3), (3, 2)]).unwrap();
        assert!(!diamond.is_cactus());
    }

    #[test]
    fn edge_set_ops() {
        let mut s = EdgeSet::empty(70);
        s.insert(3);
        s.insert(65);
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![3, 65]);
        assert_eq!(s.len(), 2);
        assert!(s.to_mask().is_none());
        let m = EdgeSet::from_mask(5, 0b10110);
        assert_eq!(m.iter().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert!(m.is_subset(&EdgeSet::full(5)));
        assert!(!EdgeSet::full(5).is_subset(&m));
    }
}
