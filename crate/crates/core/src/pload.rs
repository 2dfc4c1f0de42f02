//! Load-minimizing distributions over decomposition families.
//!
//! A p-load distribution is a probability distribution over `2w`-diameter
//! decompositions in which every edge is cut with probability at most `p`.
//! The LPs here are built directly over enumerated families.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::decomp::{self, DecompError, DecompositionFamily, RootFilter};
use crate::graph::{DecompositionMetrics, EdgeId, Graph, GraphError, OneSum, VertexId};
use crate::lp::{Domain, LinearProgram, LpError, LpOutcome, Relation, Sense};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PloadError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("width must be positive")]
    ZeroWidth,
    #[error("radius bound {k} must lie in 1..={w}")]
    RadiusBound { k: u64, w: u64 },
    #[error("invalid distribution: {0}")]
    Distribution(String),
    #[error("not a shortest path of length {w} from the root: {reason}")]
    BadPath { w: u64, reason: String },
    #[error("projected member {mask:#x} has diameter {diameter} in the factor")]
    Projection { mask: u64, diameter: u64 },
    #[error("LP reported {0}, which is impossible for this model")]
    Unexpected(&'static str),
}

/// Probability mass over edge sets of one graph, all of them `t`-diameter
/// decompositions. Terms are sorted by mask with positive weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    graph: Graph,
    t: u64,
    terms: Vec<(u64, Rational)>,
}

impl Distribution {
    /// Merges duplicate masks, drops zero weights and checks `sum y = 1`,
    /// `y >= 0` and that every member is a `t`-diameter decomposition.
    pub fn new(graph: Graph, t: u64, terms: Vec<(u64, Rational)>) -> Result<Self, PloadError> {
        let m = graph.edge_count();
        let mut merged: BTreeMap<u64, Rational> = BTreeMap::new();
        for (mask, y) in terms {
            if y.is_negative() {
                return Err(PloadError::Distribution(format!("negative weight {y} on {mask:#x}")));
            }
            if m < 64 && mask >> m != 0 {
                return Err(PloadError::Distribution(format!("mask {mask:#x} exceeds {m} edges")));
            }
            *merged.entry(mask).or_insert_with(Rational::zero) += y;
        }
        let terms: Vec<(u64, Rational)> = merged.into_iter().filter(|(_, y)| !y.is_zero()).collect();
        let total: Rational = terms.iter().map(|(_, y)| y).sum();
        if !total.is_one() {
            return Err(PloadError::Distribution(format!("total mass {total}")));
        }
        let table = graph.all_pairs();
        let metrics = DecompositionMetrics::new(&graph, &table);
        for &(mask, _) in &terms {
            let d = metrics.diameter_of_mask(mask);
            if d >= t {
                return Err(PloadError::Distribution(format!("member {mask:#x} has diameter {d} >= {t}")));
            }
        }
        Ok(Self { graph, t, terms })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn terms(&self) -> &[(u64, Rational)] {
        &self.terms
    }

    /// `sum_{F ∋ e} y_F` per edge.
    pub fn edge_loads(&self) -> Vec<Rational> {
        let m = self.graph.edge_count();
        let mut loads = vec![Rational::zero(); m];
        for (mask, y) in &self.terms {
            for (e, load) in loads.iter_mut().enumerate() {
                if mask >> e & 1 == 1 {
                    *load += y;
                }
            }
        }
        loads
    }

    pub fn max_load(&self) -> Rational {
        self.edge_loads().into_iter().max().unwrap_or_else(Rational::zero)
    }

    pub fn mass_where(&self, pred: impl Fn(u64) -> bool) -> Rational {
        self.terms.iter().filter(|(mask, _)| pred(*mask)).map(|(_, y)| y).sum()
    }

    /// Mass of members with `rad_F(root) < k`.
    pub fn radius_mass(&self, root: VertexId, k: u64) -> Rational {
        let table = self.graph.all_pairs();
        let metrics = DecompositionMetrics::new(&self.graph, &table);
        self.mass_where(|mask| metrics.radius_of_mask(root, mask) < k)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PloadResult {
    pub p: Rational,
    pub w: u64,
    pub root: Option<VertexId>,
    pub k: Option<u64>,
    pub distribution: Distribution,
    pub family_size: usize,
    pub pivots: usize,
    pub dual: LoadDual,
}

/// Dual certificate of a load LP: `lambda` on the mass row, `mu(e) >= 0` on
/// the edge rows and `nu >= 0` on the radius row (0 when absent). Optimality
/// means `sum mu + (w - k) nu <= 1`, `lambda - mu(F) + nu [rad_F(r) < k] <= 0`
/// for every member, and `lambda + nu = p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadDual {
    pub lambda: Rational,
    pub mu: Vec<Rational>,
    pub nu: Rational,
}

impl PloadResult {
    /// Re-checks every constraint by direct evaluation.
    pub fn verify(&self) -> Result<(), String> {
        let dist = &self.distribution;
        if dist.t() != 2 * self.w {
            return Err(format!("distribution is over {}-diameter sets", dist.t()));
        }
        if let Some((e, load)) = dist.edge_loads().iter().enumerate().find(|(_, l)| **l > self.p) {
            return Err(format!("edge {e} has load {load} > {}", self.p));
        }
        if let Some(r) = self.root {
            let rooted = dist.radius_mass(r, self.w);
            if !rooted.is_one() {
                return Err(format!("only {rooted} of the mass has root radius < {}", self.w));
            }
            if let Some(k) = self.k {
                let mass = dist.radius_mass(r, k);
                let bound = Rational::one() - &self.p * int((self.w - k) as i64);
                if mass < bound {
                    return Err(format!("radius-{k} mass {mass} < {bound}"));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of an LP whose feasibility depends on the inputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility<T> {
    Feasible(T),
    /// Verified Farkas vector of the LP (rows: mass row, then edges).
    Infeasible { farkas: Vec<Rational> },
}

fn check_w(w: u64) -> Result<(), PloadError> {
    if w == 0 {
        Err(PloadError::ZeroWidth)
    } else {
        Ok(())
    }
}

/// Per-edge column lists of a family.
fn edge_members(family: &DecompositionFamily) -> Vec<Vec<usize>> {
    let m = family.graph().edge_count();
    let mut out = vec![Vec::new(); m];
    for (i, &mask) in family.masks().iter().enumerate() {
        for (e, list) in out.iter_mut().enumerate() {
            if mask >> e & 1 == 1 {
                list.push(i);
            }
        }
    }
    out
}

/// `min p` over distributions on `family` with edge loads `<= p`, plus
/// `sum_{rad_F(root) < k} y_F + (w - k) p >= 1` when `radius` is given.
fn min_load_lp(
    family: &DecompositionFamily,
    w: u64,
    radius: Option<(VertexId, u64)>,
) -> Result<PloadResult, PloadError> {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let p = lp.add_variable(Domain::NonNegative, Rational::one());
    let ys: Vec<_> = (0..family.len())
        .map(|_| lp.add_variable(Domain::NonNegative, Rational::zero()))
        .collect();
    let all: Vec<_> = ys.iter().map(|&y| (y, Rational::one())).collect();
    let mass_row = lp.add_row(&all, Relation::Eq, Rational::one())?;
    let mut edge_rows = Vec::new();
    for list in edge_members(family) {
        let mut row: Vec<_> = list.iter().map(|&i| (ys[i], Rational::one())).collect();
        row.push((p, -Rational::one()));
        edge_rows.push(lp.add_row(&row, Relation::Le, Rational::zero())?);
    }
    let mut radius_row = None;
    if let Some((root, k)) = radius {
        let inside = family.radius_subfamily(root, k);
        let mut row: Vec<_> = inside
            .iter()
            .zip(&ys)
            .filter(|(ok, _)| **ok)
            .map(|(_, &y)| (y, Rational::one()))
            .collect();
        row.push((p, int((w - k) as i64)));
        radius_row = Some(lp.add_row(&row, Relation::Ge, Rational::one())?);
    }
    let sol = match lp.solve()? {
        LpOutcome::Optimal(sol) => sol,
        LpOutcome::Infeasible { .. } => return Err(PloadError::Unexpected("infeasible")),
        LpOutcome::Unbounded { .. } => return Err(PloadError::Unexpected("unbounded")),
    };
    let terms = family
        .masks()
        .iter()
        .zip(&ys)
        .map(|(&mask, &y)| (mask, sol.values[y].clone()))
        .collect();
    let distribution = Distribution::new(family.graph().clone(), 2 * w, terms)?;
    let dual = LoadDual {
        lambda: sol.duals[mass_row].clone(),
        mu: edge_rows.iter().map(|&r| -&sol.duals[r]).collect(),
        nu: radius_row.map_or_else(Rational::zero, |r| sol.duals[r].clone()),
    };
    Ok(PloadResult {
        p: sol.values[p].clone(),
        w,
        root: radius.map(|(r, _)| r),
        k: radius.map(|(_, k)| k),
        distribution,
        family_size: family.len(),
        pivots: sol.stats.pivots,
        dual,
    })
}

/// Smallest `p` admitting a p-load distribution over `ℱ_{2w}(G)`.
pub fn min_pload(g: &Graph, w: u64) -> Result<PloadResult, PloadError> {
    check_w(w)?;
    let family = decomp::enumerate(g, 2 * w, None)?;
    min_pload_on(&family, w)
}

pub fn min_pload_on(family: &DecompositionFamily, w: u64) -> Result<PloadResult, PloadError> {
    check_w(w)?;
    let mut res = min_load_lp(family, w, None)?;
    res.root = None;
    Ok(res)
}

/// As [`min_pload`] with support restricted to members with
/// `rad_F(r) < w`.
pub fn min_pload_rooted(g: &Graph, r: VertexId, w: u64) -> Result<PloadResult, PloadError> {
    min_pload_radius(g, r, w, w)
}

/// Rooted support, loads `<= p`, and at least `1 - p (w - k)` of the mass on
/// members with `rad_F(r) < k`; minimizes `p`.
pub fn min_pload_radius(g: &Graph, r: VertexId, w: u64, k: u64) -> Result<PloadResult, PloadError> {
    check_w(w)?;
    let family = decomp::enumerate(g, 2 * w, Some(RootFilter { root: r, k: w }))?;
    min_pload_radius_on(&family, w, k)
}

/// [`min_pload_radius`] over an already enumerated rooted family.
pub fn min_pload_radius_on(family: &DecompositionFamily, w: u64, k: u64) -> Result<PloadResult, PloadError> {
    check_w(w)?;
    if k == 0 || k > w {
        return Err(PloadError::RadiusBound { k, w });
    }
    let root = match family.filter() {
        Some(RootFilter { root, k: fk }) if fk == w && family.t() == 2 * w => root,
        _ => {
            return Err(PloadError::Distribution(
                "family must be the rooted 2w-diameter family".into(),
            ))
        }
    };
    let radius = (k < w).then_some((root, k));
    let mut res = min_load_lp(family, w, radius)?;
    res.root = Some(root);
    res.k = Some(k);
    Ok(res)
}

/// Escaping mass: the least probability a p-load distribution over
/// `ℱ_{2w}(G)` must put on members with `rad_F(r) >= w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscapeMass {
    pub z: Rational,
    pub distribution: Distribution,
    pub family_size: usize,
    pub pivots: usize,
}

pub fn mass_outside_rooted(
    g: &Graph,
    r: VertexId,
    w: u64,
    p: &Rational,
) -> Result<Feasibility<EscapeMass>, PloadError> {
    check_w(w)?;
    g.check_vertex(r)?;
    let family = decomp::enumerate(g, 2 * w, None)?;
    mass_outside_rooted_on(&family, r, w, p)
}

pub fn mass_outside_rooted_on(
    family: &DecompositionFamily,
    r: VertexId,
    w: u64,
    p: &Rational,
) -> Result<Feasibility<EscapeMass>, PloadError> {
    check_w(w)?;
    let inside = family.radius_subfamily(r, w);
    let mut lp = LinearProgram::new(Sense::Minimize);
    let ys: Vec<_> = inside
        .iter()
        .map(|&ok| lp.add_variable(Domain::NonNegative, if ok { Rational::zero() } else { Rational::one() }))
        .collect();
    let all: Vec<_> = ys.iter().map(|&y| (y, Rational::one())).collect();
    lp.add_row(&all, Relation::Eq, Rational::one())?;
    for list in edge_members(family) {
        let row: Vec<_> = list.iter().map(|&i| (ys[i], Rational::one())).collect();
        lp.add_row(&row, Relation::Le, p.clone())?;
    }
    match lp.solve()? {
        LpOutcome::Optimal(sol) => {
            let terms = family
                .masks()
                .iter()
                .zip(&ys)
                .map(|(&mask, &y)| (mask, sol.values[y].clone()))
                .collect();
            Ok(Feasibility::Feasible(EscapeMass {
                z: sol.objective,
                distribution: Distribution::new(family.graph().clone(), 2 * w, terms)?,
                family_size: family.len(),
                pivots: sol.stats.pivots,
            }))
        }
        LpOutcome::Infeasible { farkas, .. } => Ok(Feasibility::Infeasible { farkas }),
        LpOutcome::Unbounded { .. } => Err(PloadError::Unexpected("unbounded")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AmplificationRow {
    pub m: usize,
    pub edges: usize,
    pub family_size: usize,
    /// `None` when no p-load distribution exists on the m-fold sum.
    pub z: Option<Rational>,
    pub pivots: usize,
}

impl AmplificationRow {
    /// `m z_1 <= z_m <= 1` given the single-copy value `z_1`: the events
    /// "the root's component reaches distance `w` inside copy `i`" are
    /// disjoint. Vacuous when infeasible.
    pub fn counting_bound_holds(&self, z1: &Rational) -> bool {
        self.z
            .as_ref()
            .is_none_or(|z| z1 * int(self.m as i64) <= *z && *z <= Rational::one())
    }
}

/// Escaping mass on the `m`-fold 1-sum at its main vertex, for each `m`.
pub fn amplification_experiment(
    g: &Graph,
    r: VertexId,
    w: u64,
    p: &Rational,
    ms: &[usize],
) -> Result<Vec<AmplificationRow>, PloadError> {
    let mut rows = Vec::with_capacity(ms.len());
    for &m in ms {
        let sum = crate::generators::amplify_one_sum(g, r, m)
            .map_err(|e| PloadError::Distribution(e.to_string()))?;
        let family = decomp::enumerate(&sum.graph, 2 * w, None)?;
        let outcome = mass_outside_rooted_on(&family, sum.main_vertex, w, p)?;
        let (z, pivots) = match outcome {
            Feasibility::Feasible(esc) => (Some(esc.z), esc.pivots),
            Feasibility::Infeasible { .. } => (None, 0),
        };
        rows.push(AmplificationRow {
            m,
            edges: sum.graph.edge_count(),
            family_size: family.len(),
            z,
            pivots,
        });
    }
    Ok(rows)
}

/// Masses along a root path of a rooted distribution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathHitReport {
    /// `max_e load(e)` of the distribution.
    pub p: Rational,
    /// Mass of members meeting the path.
    pub hit_mass: Rational,
    /// Mass of members meeting the path at least twice.
    pub double_mass: Rational,
    /// `w p - 1`.
    pub bound: Rational,
}

impl PathHitReport {
    pub fn holds(&self) -> bool {
        self.hit_mass.is_one() && self.double_mass <= self.bound
    }
}

/// For a shortest path of length `w` from `r` (edge list in order):
/// every member meets it, and the mass meeting it twice or more is at most
/// `w p - 1`.
pub fn path_hit_check(
    dist: &Distribution,
    r: VertexId,
    w: u64,
    path: &[EdgeId],
) -> Result<PathHitReport, PloadError> {
    let g = dist.graph();
    let bad = |reason: String| PloadError::BadPath { w, reason };
    if path.len() as u64 != w {
        return Err(bad(format!("{} edges", path.len())));
    }
    let mut cur = r;
    for &e in path {
        let edge = g.edge(e)?;
        if edge.u != cur && edge.v != cur {
            return Err(bad(format!("edge {e} does not continue the walk at {cur}")));
        }
        cur = edge.other(cur);
    }
    if g.shortest_dist(r, cur)? != Some(w) {
        return Err(bad(format!("endpoint {cur} is closer than {w}")));
    }
    let mut path_mask = 0u64;
    for &e in path {
        path_mask |= 1 << e;
    }
    let p = dist.max_load();
    Ok(PathHitReport {
        hit_mass: dist.mass_where(|mask| mask & path_mask != 0),
        double_mass: dist.mass_where(|mask| (mask & path_mask).count_ones() >= 2),
        bound: &p * int(w as i64) - Rational::one(),
        p,
    })
}

/// Restriction of a distribution on a 1-sum to one factor:
/// `y'_F = sum_{F' : F' ∩ E(H) = F} y_{F'}`. `edge_map[h]` is the id in the
/// sum of the factor's edge `h`.
pub fn project(dist: &Distribution, factor: &Graph, edge_map: &[EdgeId]) -> Result<Distribution, PloadError> {
    if edge_map.len() != factor.edge_count() {
        return Err(GraphError::EdgeSetMismatch {
            expected: factor.edge_count(),
            found: edge_map.len(),
        }
        .into());
    }
    let mut merged: BTreeMap<u64, Rational> = BTreeMap::new();
    for (mask, y) in dist.terms() {
        let mut local = 0u64;
        for (h, &e) in edge_map.iter().enumerate() {
            if mask >> e & 1 == 1 {
                local |= 1 << h;
            }
        }
        *merged.entry(local).or_insert_with(Rational::zero) += y;
    }
    let table = factor.all_pairs();
    let metrics = DecompositionMetrics::new(factor, &table);
    for &mask in merged.keys() {
        let diameter = metrics.diameter_of_mask(mask);
        if diameter >= dist.t() {
            return Err(PloadError::Projection { mask, diameter });
        }
    }
    Distribution::new(factor.clone(), dist.t(), merged.into_iter().collect())
}

/// Projection onto input `i` of a 1-sum.
pub fn project_onto_factor(dist: &Distribution, sum: &OneSum, factor: &Graph, i: usize) -> Result<Distribution, PloadError> {
    project(dist, factor, &sum.edge_maps[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_cycle_gadget;
    use crate::rational::ratio;

    #[test]
    fn cycle_needs_no_cuts() {
        for w in 2..=3 {
            let res = min_pload(&Graph::cycle(2 * w as usize).unwrap(), w).unwrap();
            assert_eq!(res.p, int(0));
            res.verify().unwrap();
        }
        assert_eq!(min_pload(&Graph::path(1), 1).unwrap().p, int(0));
    }

    #[test]
    fn path_of_length_2w() {
        // One cut anywhere in the middle suffices, so half of 1/w.
        for w in 2..=3u64 {
            let res = min_pload(&Graph::path(2 * w as usize), w).unwrap();
            assert_eq!(res.p, ratio(1, 2 * w as i64));
            res.verify().unwrap();
        }
    }

    #[test]
    fn rooted_cycle_is_positive() {
        let res = min_pload_rooted(&Graph::cycle(4).unwrap(), 0, 2).unwrap();
        assert!(res.p.is_positive());
        res.verify().unwrap();
        let same = min_pload_radius(&Graph::cycle(4).unwrap(), 0, 2, 2).unwrap();
        assert_eq!(same.p, res.p);
    }

    #[test]
    fn relaxation_ordering() {
        let g = gen_cycle_gadget(2).unwrap();
        let r = g.root();
        let plain = min_pload(&g.graph, 2).unwrap();
        let rooted = min_pload_rooted(&g.graph, r, 2).unwrap();
        let radius = min_pload_radius(&g.graph, r, 2, 1).unwrap();
        assert!(plain.p <= rooted.p && rooted.p <= radius.p);
        for res in [&plain, &rooted, &radius] {
            res.verify().unwrap();
        }
    }

    #[test]
    fn copies_escape_disjointly() {
        let g = gen_cycle_gadget(2).unwrap();
        let rows = amplification_experiment(&g.graph, g.root(), 2, &ratio(3, 8), &[1, 2]).unwrap();
        let z1 = rows[0].z.clone().unwrap();
        assert_eq!(z1, ratio(1, 2));
        assert_eq!(rows[1].z, Some(int(1)));
        assert!(rows.iter().all(|r| r.counting_bound_holds(&z1)));
        assert!(!rows[1].counting_bound_holds(&ratio(3, 4)));
    }

    #[test]
    fn full_cut_has_no_escape() {
        let g = Graph::path(3);
        match mass_outside_rooted(&g, 0, 1, &int(1)).unwrap() {
            Feasibility::Feasible(esc) => assert_eq!(esc.z, int(0)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            mass_outside_rooted(&g, 0, 1, &int(0)).unwrap(),
            Feasibility::Infeasible { .. }
        ));
    }

    #[test]
    fn path_hits() {
        let g = Graph::path(4);
        let dist = Distribution::new(g.clone(), 4, vec![(0b0101, ratio(1, 2)), (0b1010, ratio(1, 2))]).unwrap();
        let rep = path_hit_check(&dist, 0, 2, &[0, 1]).unwrap();
        assert_eq!(rep.hit_mass, int(1));
        assert_eq!(rep.double_mass, int(0));
        assert_eq!(rep.bound, int(0));
        assert!(rep.holds());
        assert!(path_hit_check(&dist, 0, 2, &[0]).is_err());
        assert!(path_hit_check(&dist, 0, 2, &[0, 2]).is_err());
    }

    #[test]
    fn distribution_validation() {
        let g = Graph::path(2);
        assert!(Distribution::new(g.clone(), 2, vec![(0b11, ratio(1, 2))]).is_err());
        assert!(Distribution::new(g.clone(), 2, vec![(0b00, int(1))]).is_err());
        let d = Distribution::new(g, 3, vec![(0b01, ratio(1, 2)), (0b01, ratio(1, 2))]).unwrap();
        assert_eq!(d.terms().len(), 1);
    }

    #[test]
    fn projection_identity_and_single() {
        let g = Graph::path(2);
        let d = Distribution::new(g.clone(), 2, vec![(0b11, int(1))]).unwrap();
        assert_eq!(project(&d, &g, &[0, 1]).unwrap(), d);
        let h = Graph::path(1);
        let single = project(&d, &h, &[1]).unwrap();
        assert_eq!(single.terms(), &[(0b1, int(1))]);
    }
}
