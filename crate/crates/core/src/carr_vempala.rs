//! Writing `alpha * x` as a dominating convex combination of integral
//! multicuts, by column generation over multicuts.
//!
//! The master is `max sum_F y_F` subject to `sum_{F ∋ e} y_F <= alpha x(e)`.
//! Its edge duals `c` price new columns through the exact minimum-weight
//! multicut; a column enters while `c(F) < 1`. A master value of at least 1
//! yields the decomposition. An optimum below 1 comes with duals `c` such
//! that every multicut has `c(F) >= 1 > alpha c.x`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::graph::EdgeSet;
use crate::lp::{Domain, LinearProgram, LpError, LpOutcome, Relation, Sense};
use crate::multicut::{self, MulticutError, MulticutInstance, MulticutSolution};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CvError {
    #[error(transparent)]
    Multicut(#[from] MulticutError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("x has {found} entries for {expected} edges")]
    Length { expected: usize, found: usize },
    #[error("x is not a feasible fractional multicut (pair {0:?} is too close)")]
    InfeasibleX((usize, usize)),
    #[error("alpha must be positive")]
    NonPositiveAlpha,
    #[error("no multicut avoids the edges where x is 0; no alpha works")]
    NoAlpha,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexDecomposition {
    pub alpha: Rational,
    pub terms: Vec<(MulticutSolution, Rational)>,
}

impl ConvexDecomposition {
    /// Weights sum to 1, every term is a multicut, and every edge load is at
    /// most `alpha x(e)`.
    pub fn verify(&self, instance: &MulticutInstance, x: &[Rational]) -> Result<(), String> {
        let total: Rational = self.terms.iter().map(|(_, y)| y).sum();
        if !total.is_one() {
            return Err(format!("weights sum to {total}"));
        }
        let mut load = vec![Rational::zero(); x.len()];
        for (i, (f, y)) in self.terms.iter().enumerate() {
            if y.is_negative() {
                return Err(format!("term {i} has weight {y}"));
            }
            if !instance.is_feasible_multicut(&f.edges).map_err(|e| e.to_string())? {
                return Err(format!("term {i} is not a multicut"));
            }
            for e in f.edges.iter() {
                load[e] += y;
            }
        }
        for (e, (l, xe)) in load.iter().zip(x).enumerate() {
            if *l > &self.alpha * xe {
                return Err(format!("edge {e} carries {l} > {} * {xe}", self.alpha));
            }
        }
        Ok(())
    }
}

/// Edge weights `c >= 0` and a bound `u` with `c(F) >= u` for every
/// multicut `F` but `alpha c.x < u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FarkasWitness {
    pub alpha: Rational,
    pub c: Vec<Rational>,
    pub u: Rational,
}

impl FarkasWitness {
    /// Checks `c >= 0` and `alpha c.x < u`, then that the minimum-weight
    /// multicut under `c` costs at least `u` (exact branch-and-bound).
    pub fn verify(&self, instance: &MulticutInstance, x: &[Rational], node_budget: usize) -> Result<bool, CvError> {
        if self.c.iter().any(|c| c.is_negative()) {
            return Ok(false);
        }
        let cx: Rational = self.c.iter().zip(x).map(|(c, xe)| c * xe).sum();
        if &self.alpha * cx >= self.u {
            return Ok(false);
        }
        let best = multicut::min_weight_multicut(instance, &self.c, node_budget)?;
        Ok(best.lower_bound >= self.u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CvOutcome {
    Decomposition(ConvexDecomposition),
    Witness(FarkasWitness),
    /// Pricing ran out of nodes before proving either side.
    Inconclusive { master_value: Rational },
}

struct Master {
    value: Rational,
    duals: Vec<Rational>,
    columns: Vec<MulticutSolution>,
    weights: Vec<Rational>,
    complete: bool,
}

fn check_x(instance: &MulticutInstance, x: &[Rational]) -> Result<(), CvError> {
    let m = instance.graph().edge_count();
    if x.len() != m {
        return Err(CvError::Length { expected: m, found: x.len() });
    }
    if let Some((pair, _)) = multicut::separate(instance, x) {
        return Err(CvError::InfeasibleX(pair));
    }
    Ok(())
}

/// Runs column generation on `max sum y` with capacities `cap`. Stops early
/// once the master value reaches `stop_at`.
fn run_master(
    instance: &MulticutInstance,
    cap: &[Rational],
    stop_at: Option<&Rational>,
    node_budget: usize,
) -> Result<Master, CvError> {
    let m = cap.len();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let rows: Vec<_> = cap
        .iter()
        .map(|c| lp.add_row(&[], Relation::Le, c.clone()))
        .collect::<Result<_, _>>()?;
    let mut columns: Vec<MulticutSolution> = Vec::new();
    let add = |lp: &mut LinearProgram, f: MulticutSolution, columns: &mut Vec<MulticutSolution>| -> Result<(), CvError> {
        let entries: Vec<_> = f.edges.iter().map(|e| (rows[e], Rational::one())).collect();
        lp.add_column(Domain::NonNegative, Rational::one(), &entries)?;
        columns.push(f);
        Ok(())
    };
    add(&mut lp, multicut::greedy_incumbent(instance), &mut columns)?;
    loop {
        let sol = match lp.solve()? {
            LpOutcome::Optimal(sol) => sol,
            _ => unreachable!("y = 0 is feasible and sum y is capped by every column's edge"),
        };
        let weights = sol.values.clone();
        if stop_at.is_some_and(|s| sol.objective >= *s) {
            return Ok(Master {
                value: sol.objective,
                duals: sol.duals,
                columns,
                weights,
                complete: true,
            });
        }
        let c: Vec<Rational> = (0..m).map(|e| sol.duals[rows[e]].clone()).collect();
        let priced = multicut::min_weight_multicut(instance, &c, node_budget)?;
        if priced.solution.cost < Rational::one() {
            if columns.iter().any(|f| f.edges == priced.solution.edges) {
                return Err(MulticutError::Invariant("pricing returned an existing column".into()).into());
            }
            let cost = instance.cost_of(&priced.solution.edges);
            add(
                &mut lp,
                MulticutSolution {
                    edges: priced.solution.edges,
                    cost,
                },
                &mut columns,
            )?;
            continue;
        }
        return Ok(Master {
            value: sol.objective,
            duals: c,
            columns,
            weights,
            complete: priced.lower_bound >= Rational::one(),
        });
    }
}

fn decomposition(master: &Master, alpha: Rational, scale: &Rational) -> ConvexDecomposition {
    let terms = master
        .columns
        .iter()
        .zip(&master.weights)
        .filter(|(_, y)| y.is_positive())
        .map(|(f, y)| (f.clone(), y / scale))
        .collect();
    ConvexDecomposition { alpha, terms }
}

/// Decomposition of `alpha x`, or a witness that none exists.
pub fn decompose(
    instance: &MulticutInstance,
    x: &[Rational],
    alpha: &Rational,
    node_budget: usize,
) -> Result<CvOutcome, CvError> {
    check_x(instance, x)?;
    if !alpha.is_positive() {
        return Err(CvError::NonPositiveAlpha);
    }
    if instance.pairs().is_empty() {
        let empty = MulticutSolution {
            edges: EdgeSet::empty(x.len()),
            cost: Rational::zero(),
        };
        return Ok(CvOutcome::Decomposition(ConvexDecomposition {
            alpha: alpha.clone(),
            terms: vec![(empty, Rational::one())],
        }));
    }
    let cap: Vec<Rational> = x.iter().map(|xe| alpha * xe).collect();
    let one = Rational::one();
    let master = run_master(instance, &cap, Some(&one), node_budget)?;
    if master.value >= one {
        return Ok(CvOutcome::Decomposition(decomposition(&master, alpha.clone(), &master.value)));
    }
    if !master.complete {
        return Ok(CvOutcome::Inconclusive {
            master_value: master.value,
        });
    }
    Ok(CvOutcome::Witness(FarkasWitness {
        alpha: alpha.clone(),
        c: master.duals,
        u: one,
    }))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MinAlpha {
    Exact {
        alpha: Rational,
        decomposition: ConvexDecomposition,
    },
    /// Pricing budget ran out; `alpha` is an upper bound with its
    /// decomposition.
    Bound {
        alpha: Rational,
        decomposition: ConvexDecomposition,
    },
}

/// Smallest `alpha` for which `alpha x` dominates a convex combination of
/// multicuts: `1 / V` where `V = max sum y` with loads `<= x`.
pub fn min_alpha(instance: &MulticutInstance, x: &[Rational], node_budget: usize) -> Result<MinAlpha, CvError> {
    check_x(instance, x)?;
    if instance.pairs().is_empty() {
        let empty = MulticutSolution {
            edges: EdgeSet::empty(x.len()),
            cost: Rational::zero(),
        };
        let decomposition = ConvexDecomposition {
            alpha: Rational::zero(),
            terms: vec![(empty, Rational::one())],
        };
        return Ok(MinAlpha::Exact {
            alpha: Rational::zero(),
            decomposition,
        });
    }
    let master = run_master(instance, x, None, node_budget)?;
    if !master.value.is_positive() {
        return Err(CvError::NoAlpha);
    }
    let alpha = master.value.recip();
    let decomposition = decomposition(&master, alpha.clone(), &master.value);
    Ok(if master.complete {
        MinAlpha::Exact { alpha, decomposition }
    } else {
        MinAlpha::Bound { alpha, decomposition }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_star_gap;
    use crate::graph::Graph;
    use crate::multicut::PairSet;
    use crate::rational::{int, ratio};

    const BUDGET: usize = 10_000;

    #[test]
    fn single_edge() {
        let inst = MulticutInstance::with_unit_costs(Graph::path(1), PairSet::Explicit(vec![(0, 1)])).unwrap();
        match decompose(&inst, &[int(1)], &int(1), BUDGET).unwrap() {
            CvOutcome::Decomposition(d) => {
                assert_eq!(d.terms.len(), 1);
                assert_eq!(d.terms[0].0.edges, EdgeSet::full(1));
                assert_eq!(d.terms[0].1, int(1));
            }
            other => panic!("{other:?}"),
        }
        match min_alpha(&inst, &[int(1)], BUDGET).unwrap() {
            MinAlpha::Exact { alpha, .. } => assert_eq!(alpha, int(1)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn star_threshold() {
        let inst = gen_star_gap(3).unwrap();
        let x = vec![ratio(1, 2); 3];
        match decompose(&inst, &x, &ratio(4, 3), BUDGET).unwrap() {
            CvOutcome::Decomposition(d) => {
                d.verify(&inst, &x).unwrap();
                assert_eq!(d.terms.len(), 3);
                assert!(d.terms.iter().all(|(f, y)| f.edges.len() == 2 && *y == ratio(1, 3)));
            }
            other => panic!("{other:?}"),
        }
        match decompose(&inst, &x, &ratio(5, 4), BUDGET).unwrap() {
            CvOutcome::Witness(w) => assert!(w.verify(&inst, &x, BUDGET).unwrap()),
            other => panic!("{other:?}"),
        }
        match min_alpha(&inst, &x, BUDGET).unwrap() {
            MinAlpha::Exact { alpha, decomposition } => {
                assert_eq!(alpha, ratio(4, 3));
                decomposition.verify(&inst, &x).unwrap();
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_input() {
        let inst = gen_star_gap(3).unwrap();
        assert!(matches!(
            decompose(&inst, &vec![ratio(1, 4); 3], &int(2), BUDGET),
            Err(CvError::InfeasibleX(_))
        ));
        assert_eq!(
            decompose(&inst, &vec![int(1); 3], &int(0), BUDGET).unwrap_err(),
            CvError::NonPositiveAlpha
        );
    }
}
