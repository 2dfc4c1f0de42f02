//! Exact rational linear programming.
//!
//! A revised primal simplex over [`Rational`] with Bland's rule (lowest
//! eligible index enters, lowest basic index leaves on ratio ties). Rows and
//! columns can be appended between solves; the last optimal basis is reused
//! when it is still primal feasible, which is what cutting-plane and
//! column-generation loops rely on.
//!
//! Sign conventions:
//! * duals are shadow prices, `d(objective) / d(rhs_i)`;
//! * a Farkas certificate `y` is indexed by row with `y_i >= 0` on `<=`
//!   rows, `y_i <= 0` on `>=` rows and free on `=` rows, and satisfies
//!   `y^T A_j >= 0` for every non-negative variable, `y^T A_j = 0` for every
//!   free variable and `y^T b < 0`. Writing every row as `<=` turns this
//!   into the textbook `A^T u >= 0, u >= 0, b^T u < 0`.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};

pub type VarId = usize;
pub type RowId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("variable {0} does not exist")]
    UnknownVariable(VarId),
    #[error("row {0} does not exist")]
    UnknownRow(RowId),
    #[error("pivot limit {0} reached")]
    PivotLimit(usize),
    #[error("basis repeated during phase {0}")]
    Cycling(u8),
    #[error("certificate check failed: {0}")]
    Certificate(String),
}

#[derive(Debug, Clone)]
struct Variable {
    domain: Domain,
    objective: Rational,
    entries: Vec<(RowId, Rational)>,
}

#[derive(Debug, Clone)]
struct Row {
    relation: Relation,
    rhs: Rational,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub pivots: usize,
    pub phase_one_pivots: usize,
    pub warm_started: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalSolution {
    pub values: Vec<Rational>,
    pub objective: Rational,
    pub duals: Vec<Rational>,
    pub stats: SolveStats,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(OptimalSolution),
    Infeasible { farkas: Vec<Rational>, stats: SolveStats },
    Unbounded { ray: Vec<Rational>, stats: SolveStats },
}

impl LpOutcome {
    pub fn optimal(&self) -> Option<&OptimalSolution> {
        match self {
            LpOutcome::Optimal(sol) => Some(sol),
            _ => None,
        }
    }

    pub fn stats(&self) -> &SolveStats {
        match self {
            LpOutcome::Optimal(sol) => &sol.stats,
            LpOutcome::Infeasible { stats, .. } | LpOutcome::Unbounded { stats, .. } => stats,
        }
    }
}

/// Per-constraint duals of an optimal outcome.
pub fn dual_values(outcome: &LpOutcome) -> Option<&[Rational]> {
    outcome.optimal().map(|sol| sol.duals.as_slice())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum ColKey {
    Structural { var: VarId, negated: bool },
    Slack(RowId),
    Artificial(RowId),
}

#[derive(Debug, Clone)]
struct WarmBasis {
    keys: Vec<ColKey>,
    binv: Vec<Vec<Rational>>,
    rows: usize,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    sense: Sense,
    vars: Vec<Variable>,
    rows: Vec<Row>,
    max_pivots: usize,
    warm: Option<WarmBasis>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> Self {
        Self {
            sense,
            vars: Vec::new(),
            rows: Vec::new(),
            max_pivots: 1_000_000,
            warm: None,
        }
    }

    pub fn set_max_pivots(&mut self, max_pivots: usize) {
        self.max_pivots = max_pivots;
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Adds a variable with no constraint entries yet.
    pub fn add_variable(&mut self, domain: Domain, objective: Rational) -> VarId {
        self.vars.push(Variable {
            domain,
            objective,
            entries: Vec::new(),
        });
        self.vars.len() - 1
    }

    /// Adds a variable together with its entries in existing rows. The
    /// current basis stays valid, so the next solve warm-starts.
    pub fn add_column(
        &mut self,
        domain: Domain,
        objective: Rational,
        entries: &[(RowId, Rational)],
    ) -> Result<VarId, LpError> {
        if let Some(&(r, _)) = entries.iter().find(|(r, _)| *r >= self.rows.len()) {
            return Err(LpError::UnknownRow(r));
        }
        let id = self.add_variable(domain, objective);
        self.vars[id].entries = merge_entries(entries.iter().cloned());
        Ok(id)
    }

    pub fn add_row(
        &mut self,
        coefficients: &[(VarId, Rational)],
        relation: Relation,
        rhs: Rational,
    ) -> Result<RowId, LpError> {
        if let Some(&(v, _)) = coefficients.iter().find(|(v, _)| *v >= self.vars.len()) {
            return Err(LpError::UnknownVariable(v));
        }
        let row = self.rows.len();
        self.rows.push(Row { relation, rhs });
        for (var, coef) in merge_entries(coefficients.iter().cloned()) {
            self.vars[var].entries.push((row, coef));
        }
        Ok(row)
    }

    pub fn objective_coefficient(&self, var: VarId) -> &Rational {
        &self.vars[var].objective
    }

    pub fn row_activity(&self, row: RowId, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (j, var) in self.vars.iter().enumerate() {
            for (r, a) in &var.entries {
                if *r == row {
                    acc += a * &values[j];
                }
            }
        }
        acc
    }

    fn row_activities(&self, values: &[Rational]) -> Vec<Rational> {
        let mut acts = vec![Rational::zero(); self.rows.len()];
        for (var, x) in self.vars.iter().zip(values) {
            if x.is_zero() {
                continue;
            }
            for (r, a) in &var.entries {
                acts[*r] += a * x;
            }
        }
        acts
    }

    fn column_dot(&self, var: VarId, y: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (r, a) in &self.vars[var].entries {
            acc += a * &y[*r];
        }
        acc
    }

    /// Line-oriented text dump: one variable or constraint per line.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        let _ = writeln!(out, "lp {sense} vars {} rows {}", self.vars.len(), self.rows.len());
        for (j, var) in self.vars.iter().enumerate() {
            let dom = match var.domain {
                Domain::NonNegative => ">=0",
                Domain::Free => "free",
            };
            let _ = writeln!(out, "var x{j} {dom} obj {}", rational::format(&var.objective));
        }
        let mut terms: Vec<Vec<(VarId, &Rational)>> = vec![Vec::new(); self.rows.len()];
        for (j, var) in self.vars.iter().enumerate() {
            for (r, a) in &var.entries {
                terms[*r].push((j, a));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            let lhs: Vec<String> = terms[i]
                .iter()
                .map(|(j, a)| format!("{} x{j}", rational::format(a)))
                .collect();
            let lhs = if lhs.is_empty() { "0".to_string() } else { lhs.join(" + ") };
            let _ = writeln!(
                out,
                "row r{i}: {lhs} {} {}",
                row.relation.symbol(),
                rational::format(&row.rhs)
            );
        }
        out
    }

    pub fn solve(&mut self) -> Result<LpOutcome, LpError> {
        let outcome = Simplex::build(self).run(self)?;
        if cfg!(debug_assertions) {
            self.certify(&outcome)?;
        }
        Ok(outcome)
    }

    /// Exact check of an outcome against this program, independent of the
    /// simplex path: primal and dual feasibility with equal objectives for
    /// optima, the Farkas conditions for infeasibility, and the recession
    /// conditions for unbounded rays.
    pub fn certify(&self, outcome: &LpOutcome) -> Result<(), LpError> {
        let fail = |msg: String| Err(LpError::Certificate(msg));
        match outcome {
            LpOutcome::Optimal(sol) => {
                let x = &sol.values;
                if x.len() != self.vars.len() || sol.duals.len() != self.rows.len() {
                    return fail("dimension mismatch".into());
                }
                for (j, var) in self.vars.iter().enumerate() {
                    if var.domain == Domain::NonNegative && x[j].is_negative() {
                        return fail(format!("x{j} negative"));
                    }
                }
                let acts = self.row_activities(x);
                for (i, row) in self.rows.iter().enumerate() {
                    let ok = match row.relation {
                        Relation::Le => acts[i] <= row.rhs,
                        Relation::Ge => acts[i] >= row.rhs,
                        Relation::Eq => acts[i] == row.rhs,
                    };
                    if !ok {
                        return fail(format!("row {i} violated"));
                    }
                }
                // Work in minimisation form: flip everything for max.
                let flip = if self.sense == Sense::Maximize { -Rational::one() } else { Rational::one() };
                let y: Vec<Rational> = sol.duals.iter().map(|d| d * &flip).collect();
                for (i, row) in self.rows.iter().enumerate() {
                    let ok = match row.relation {
                        Relation::Le => !y[i].is_positive(),
                        Relation::Ge => !y[i].is_negative(),
                        Relation::Eq => true,
                    };
                    if !ok {
                        return fail(format!("dual of row {i} has the wrong sign"));
                    }
                }
                for (j, var) in self.vars.iter().enumerate() {
                    let reduced = &var.objective * &flip - self.column_dot(j, &y);
                    let ok = match var.domain {
                        Domain::NonNegative => !reduced.is_negative(),
                        Domain::Free => reduced.is_zero(),
                    };
                    if !ok {
                        return fail(format!("reduced cost of x{j} infeasible"));
                    }
                }
                let primal: Rational = self.vars.iter().zip(x).map(|(v, xv)| &v.objective * xv).sum();
                let dual: Rational = self.rows.iter().zip(&sol.duals).map(|(r, d)| &r.rhs * d).sum();
                if primal != sol.objective || dual != sol.objective {
                    return fail(format!(
                        "objectives disagree: primal {primal}, dual {dual}, reported {}",
                        sol.objective
                    ));
                }
                Ok(())
            }
            LpOutcome::Infeasible { farkas, .. } => {
                if self.verify_farkas(farkas) {
                    Ok(())
                } else {
                    fail("Farkas vector does not certify infeasibility".into())
                }
            }
            LpOutcome::Unbounded { ray, .. } => {
                if ray.len() != self.vars.len() {
                    return fail("ray dimension mismatch".into());
                }
                for (j, var) in self.vars.iter().enumerate() {
                    if var.domain == Domain::NonNegative && ray[j].is_negative() {
                        return fail(format!("ray leaves the domain of x{j}"));
                    }
                }
                let acts = self.row_activities(ray);
                for (i, row) in self.rows.iter().enumerate() {
                    let ok = match row.relation {
                        Relation::Le => !acts[i].is_positive(),
                        Relation::Ge => !acts[i].is_negative(),
                        Relation::Eq => acts[i].is_zero(),
                    };
                    if !ok {
                        return fail(format!("ray breaks row {i}"));
                    }
                }
                let gain: Rational = self.vars.iter().zip(ray).map(|(v, d)| &v.objective * d).sum();
                let improving = match self.sense {
                    Sense::Minimize => gain.is_negative(),
                    Sense::Maximize => gain.is_positive(),
                };
                if improving {
                    Ok(())
                } else {
                    fail("ray does not improve the objective".into())
                }
            }
        }
    }

    /// Checks the Farkas conditions documented at the module level.
    pub fn verify_farkas(&self, y: &[Rational]) -> bool {
        if y.len() != self.rows.len() {
            return false;
        }
        let signs_ok = self.rows.iter().zip(y).all(|(row, yi)| match row.relation {
            Relation::Le => !yi.is_negative(),
            Relation::Ge => !yi.is_positive(),
            Relation::Eq => true,
        });
        let columns_ok = (0..self.vars.len()).all(|j| {
            let dot = self.column_dot(j, y);
            match self.vars[j].domain {
                Domain::NonNegative => !dot.is_negative(),
                Domain::Free => dot.is_zero(),
            }
        });
        let rhs: Rational = self.rows.iter().zip(y).map(|(r, yi)| &r.rhs * yi).sum();
        signs_ok && columns_ok && rhs.is_negative()
    }
}

fn merge_entries<K: Ord + Copy>(entries: impl Iterator<Item = (K, Rational)>) -> Vec<(K, Rational)> {
    let mut v: Vec<(K, Rational)> = entries.collect();
    v.sort_by_key(|a| a.0);
    let mut out: Vec<(K, Rational)> = Vec::with_capacity(v.len());
    for (k, a) in v {
        match out.last_mut() {
            Some((lk, la)) if *lk == k => *la += a,
            _ => out.push((k, a)),
        }
    }
    out.retain(|(_, a)| !a.is_zero());
    out
}

/// A standard-form column: entries are in normalized row orientation
/// (every right-hand side non-negative).
struct StdColumn {
    key: ColKey,
    cost: Rational,
    int_cost: Option<i64>,
    entries: Vec<(usize, Rational)>,
    int_entries: Option<Vec<(usize, i64)>>,
}

impl StdColumn {
    fn new(key: ColKey, cost: Rational, entries: Vec<(usize, Rational)>) -> Self {
        let int_cost = rational::to_i64(&cost);
        let int_entries = entries
            .iter()
            .map(|(r, a)| rational::to_i64(a).map(|a| (*r, a)))
            .collect();
        Self {
            key,
            cost,
            int_cost,
            entries,
            int_entries,
        }
    }
}

struct Simplex {
    cols: Vec<StdColumn>,
    rhs: Vec<Rational>,
    row_sign: Vec<bool>, // true when the row was negated
    m: usize,
}

/// Duals scaled to a common denominator so pricing integral columns needs
/// only machine arithmetic.
struct ScaledDuals {
    scale: i128,
    numerators: Vec<i128>,
}

impl ScaledDuals {
    fn new(pi: &[Rational]) -> Option<Self> {
        let mut lcm = BigInt::one();
        for p in pi {
            lcm = lcm.lcm(p.denom());
        }
        let scale = lcm.to_i128()?;
        let numerators = pi
            .iter()
            .map(|p| (p.numer() * (&lcm / p.denom())).to_i128())
            .collect::<Option<Vec<_>>>()?;
        Some(Self { scale, numerators })
    }

    /// Sign of `cost - pi . column`, or `None` on overflow.
    fn reduced_sign(&self, col: &StdColumn, cost_override: Option<i64>) -> Option<std::cmp::Ordering> {
        let entries = col.int_entries.as_ref()?;
        let cost = cost_override.or(col.int_cost)?;
        let mut acc = (cost as i128).checked_mul(self.scale)?;
        for &(r, a) in entries {
            acc = acc.checked_sub(self.numerators[r].checked_mul(a as i128)?)?;
        }
        Some(acc.cmp(&0))
    }
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let m = lp.rows.len();
        let row_sign: Vec<bool> = lp.rows.iter().map(|r| r.rhs.is_negative()).collect();
        let rhs: Vec<Rational> = lp.rows.iter().map(|r| r.rhs.abs()).collect();
        let orient = |r: usize, a: &Rational| if row_sign[r] { -a } else { a.clone() };
        let sense = if lp.sense == Sense::Maximize { -Rational::one() } else { Rational::one() };
        let mut cols = Vec::new();
        for (j, var) in lp.vars.iter().enumerate() {
            let entries: Vec<(usize, Rational)> = var.entries.iter().map(|(r, a)| (*r, orient(*r, a))).collect();
            let cost = &var.objective * &sense;
            if var.domain == Domain::Free {
                cols.push(StdColumn::new(
                    ColKey::Structural { var: j, negated: false },
                    cost.clone(),
                    entries.clone(),
                ));
                cols.push(StdColumn::new(
                    ColKey::Structural { var: j, negated: true },
                    -cost,
                    entries.into_iter().map(|(r, a)| (r, -a)).collect(),
                ));
            } else {
                cols.push(StdColumn::new(ColKey::Structural { var: j, negated: false }, cost, entries));
            }
        }
        for (i, row) in lp.rows.iter().enumerate() {
            let rel = if row_sign[i] { row.relation.flipped() } else { row.relation };
            match rel {
                Relation::Le => cols.push(StdColumn::new(ColKey::Slack(i), Rational::zero(), vec![(i, Rational::one())])),
                Relation::Ge => cols.push(StdColumn::new(ColKey::Slack(i), Rational::zero(), vec![(i, -Rational::one())])),
                Relation::Eq => {}
            }
        }
        Self { cols, rhs, row_sign, m }
    }

    fn column_of(&self, key: ColKey) -> Option<usize> {
        self.cols.iter().position(|c| c.key == key)
    }

    fn run(mut self, lp: &mut LinearProgram) -> Result<LpOutcome, LpError> {
        let mut stats = SolveStats::default();
        if let Some(basis) = self.warm_basis(lp) {
            stats.warm_started = true;
            return self.phase_two(lp, basis, stats);
        }
        // Cold start: slack where it has a +1 coefficient, artificial otherwise.
        let mut basis = Vec::with_capacity(self.m);
        let mut artificial_rows = Vec::new();
        for i in 0..self.m {
            match self.column_of(ColKey::Slack(i)) {
                Some(c) if self.cols[c].entries[0].1.is_positive() => basis.push(c),
                _ => {
                    artificial_rows.push(i);
                    self.cols.push(StdColumn::new(ColKey::Artificial(i), Rational::one(), vec![(i, Rational::one())]));
                    basis.push(self.cols.len() - 1);
                }
            }
        }
        let identity = (0..self.m)
            .map(|i| (0..self.m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        let mut basis = Basis {
            cols: basis,
            binv: identity,
            xb: self.rhs.clone(),
        };
        if !artificial_rows.is_empty() {
            let is_art: Vec<bool> = self.cols.iter().map(|c| matches!(c.key, ColKey::Artificial(_))).collect();
            let cost = |j: usize| if is_art[j] { Rational::one() } else { Rational::zero() };
            let int_cost = |j: usize| Some(i64::from(is_art[j]));
            let result = self.iterate(&mut basis, &cost, &int_cost, false, lp.max_pivots, &mut stats, 1)?;
            stats.phase_one_pivots = stats.pivots;
            debug_assert!(result.is_none(), "phase one is bounded");
            let infeasibility: Rational = basis
                .cols
                .iter()
                .zip(&basis.xb)
                .filter(|(c, _)| is_art[**c])
                .map(|(_, x)| x.clone())
                .sum();
            if infeasibility.is_positive() {
                let pi = self.duals(&basis, &cost);
                let farkas = pi
                    .iter()
                    .enumerate()
                    .map(|(i, p)| if self.row_sign[i] { p.clone() } else { -p })
                    .collect();
                lp.warm = None;
                return Ok(LpOutcome::Infeasible { farkas, stats });
            }
            self.drive_out_artificials(&mut basis, &is_art);
        }
        self.phase_two(lp, basis, stats)
    }

    /// Reuses the previous basis if its columns still exist and it is
    /// primal feasible for the current rows.
    fn warm_basis(&self, lp: &LinearProgram) -> Option<Basis> {
        let warm = lp.warm.as_ref()?;
        let mut keys = warm.keys.clone();
        if keys.iter().any(|k| matches!(k, ColKey::Artificial(_))) {
            return None;
        }
        let binv = if warm.rows == self.m {
            warm.binv.clone()
        } else {
            for i in warm.rows..self.m {
                keys.push(ColKey::Slack(i));
            }
            let cols: Option<Vec<usize>> = keys.iter().map(|k| self.column_of(*k)).collect();
            invert(&self.dense_basis(&cols?))?
        };
        let cols: Vec<usize> = keys.iter().map(|k| self.column_of(*k)).collect::<Option<_>>()?;
        let xb: Vec<Rational> = binv.iter().map(|row| dot(row, &self.rhs)).collect();
        if xb.iter().any(|x| x.is_negative()) {
            return None;
        }
        Some(Basis { cols, binv, xb })
    }

    fn dense_basis(&self, cols: &[usize]) -> Vec<Vec<Rational>> {
        let mut b = vec![vec![Rational::zero(); self.m]; self.m];
        for (k, &c) in cols.iter().enumerate() {
            for (r, a) in &self.cols[c].entries {
                b[*r][k] = a.clone();
            }
        }
        b
    }

    fn drive_out_artificials(&self, basis: &mut Basis, is_art: &[bool]) {
        for pos in 0..self.m {
            if !is_art[basis.cols[pos]] {
                continue;
            }
            let in_basis: HashSet<usize> = basis.cols.iter().copied().collect();
            let entering = (0..self.cols.len())
                .filter(|j| !is_art[*j] && !in_basis.contains(j))
                .find(|&j| !self.row_entry(&basis.binv[pos], j).is_zero());
            if let Some(j) = entering {
                let u = self.ftran(&basis.binv, j);
                pivot(basis, pos, j, &u);
            }
            // Otherwise the row is redundant: the artificial stays basic at 0
            // and no eligible column can ever move it.
        }
    }

    fn row_entry(&self, binv_row: &[Rational], j: usize) -> Rational {
        self.cols[j].entries.iter().map(|(r, a)| a * &binv_row[*r]).sum()
    }

    fn ftran(&self, binv: &[Vec<Rational>], j: usize) -> Vec<Rational> {
        binv.iter().map(|row| self.row_entry(row, j)).collect()
    }

    fn duals(&self, basis: &Basis, cost: &dyn Fn(usize) -> Rational) -> Vec<Rational> {
        let cb: Vec<Rational> = basis.cols.iter().map(|&c| cost(c)).collect();
        (0..self.m)
            .map(|k| {
                cb.iter()
                    .zip(&basis.binv)
                    .filter(|(c, _)| !c.is_zero())
                    .map(|(c, row)| c * &row[k])
                    .sum()
            })
            .collect()
    }

    /// Runs Bland pivots until optimal (`Ok(None)`) or unbounded
    /// (`Ok(Some(entering column and direction))`).
    #[allow(clippy::too_many_arguments)]
    fn iterate(
        &self,
        basis: &mut Basis,
        cost: &dyn Fn(usize) -> Rational,
        int_cost: &dyn Fn(usize) -> Option<i64>,
        exclude_artificial: bool,
        max_pivots: usize,
        stats: &mut SolveStats,
        phase: u8,
    ) -> Result<Option<(usize, Vec<Rational>)>, LpError> {
        let mut seen: HashSet<u64> = HashSet::new();
        loop {
            if cfg!(debug_assertions) && !seen.insert(basis_hash(&basis.cols)) {
                return Err(LpError::Cycling(phase));
            }
            let pi = self.duals(basis, cost);
            let scaled = ScaledDuals::new(&pi);
            let mut is_basic = vec![false; self.cols.len()];
            for &c in &basis.cols {
                is_basic[c] = true;
            }
            let entering = (0..self.cols.len()).find(|&j| {
                if is_basic[j] || (exclude_artificial && matches!(self.cols[j].key, ColKey::Artificial(_))) {
                    return false;
                }
                let col = &self.cols[j];
                if let Some(sign) = scaled.as_ref().and_then(|s| s.reduced_sign(col, int_cost(j))) {
                    return sign == std::cmp::Ordering::Less;
                }
                let dot: Rational = col.entries.iter().map(|(r, a)| a * &pi[*r]).sum();
                (cost(j) - dot).is_negative()
            });
            let Some(q) = entering else {
                return Ok(None);
            };
            let u = self.ftran(&basis.binv, q);
            let mut leave: Option<(usize, Rational)> = None;
            for (i, ui) in u.iter().enumerate() {
                if !ui.is_positive() {
                    continue;
                }
                let ratio = &basis.xb[i] / ui;
                let better = match &leave {
                    None => true,
                    Some((l, best)) => ratio < *best || (ratio == *best && basis.cols[i] < basis.cols[*l]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return Ok(Some((q, u)));
            };
            if stats.pivots >= max_pivots {
                return Err(LpError::PivotLimit(max_pivots));
            }
            stats.pivots += 1;
            pivot(basis, r, q, &u);
        }
    }

    fn phase_two(&self, lp: &mut LinearProgram, mut basis: Basis, mut stats: SolveStats) -> Result<LpOutcome, LpError> {
        let cost = |j: usize| match self.cols[j].key {
            ColKey::Artificial(_) => Rational::zero(),
            _ => self.cols[j].cost.clone(),
        };
        let int_cost = |j: usize| match self.cols[j].key {
            ColKey::Artificial(_) => Some(0),
            _ => self.cols[j].int_cost,
        };
        let result = self.iterate(&mut basis, &cost, &int_cost, true, lp.max_pivots, &mut stats, 2)?;
        let n = lp.vars.len();
        let to_original = |std: &[(usize, Rational)]| {
            let mut values = vec![Rational::zero(); n];
            for (c, x) in std {
                if let ColKey::Structural { var, negated } = self.cols[*c].key {
                    if negated {
                        values[var] -= x;
                    } else {
                        values[var] += x;
                    }
                }
            }
            values
        };
        if let Some((q, u)) = result {
            let mut dir = vec![(q, Rational::one())];
            dir.extend(basis.cols.iter().zip(&u).map(|(&c, ui)| (c, -ui)));
            lp.warm = None;
            return Ok(LpOutcome::Unbounded {
                ray: to_original(&dir),
                stats,
            });
        }
        let point: Vec<(usize, Rational)> = basis.cols.iter().copied().zip(basis.xb.iter().cloned()).collect();
        let values = to_original(&point);
        let objective: Rational = lp.vars.iter().zip(&values).map(|(v, x)| &v.objective * x).sum();
        let pi = self.duals(&basis, &cost);
        let flip = lp.sense == Sense::Maximize;
        let duals = pi
            .iter()
            .enumerate()
            .map(|(i, p)| if self.row_sign[i] != flip { -p } else { p.clone() })
            .collect();
        lp.warm = Some(WarmBasis {
            keys: basis.cols.iter().map(|&c| self.cols[c].key).collect(),
            binv: basis.binv,
            rows: self.m,
        });
        Ok(LpOutcome::Optimal(OptimalSolution {
            values,
            objective,
            duals,
            stats,
        }))
    }
}

struct Basis {
    cols: Vec<usize>,
    binv: Vec<Vec<Rational>>,
    xb: Vec<Rational>,
}

fn pivot(basis: &mut Basis, r: usize, q: usize, u: &[Rational]) {
    let inv = u[r].recip();
    for a in basis.binv[r].iter_mut() {
        *a *= &inv;
    }
    basis.xb[r] *= &inv;
    let pivot_row = basis.binv[r].clone();
    let pivot_x = basis.xb[r].clone();
    for (i, ui) in u.iter().enumerate() {
        if i == r || ui.is_zero() {
            continue;
        }
        for (a, p) in basis.binv[i].iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *a -= ui * p;
            }
        }
        basis.xb[i] -= ui * &pivot_x;
    }
    basis.cols[r] = q;
}

fn basis_hash(cols: &[usize]) -> u64 {
    let mut sorted = cols.to_vec();
    sorted.sort_unstable();
    let mut h = DefaultHasher::new();
    sorted.hash(&mut h);
    h.finish()
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, y)| x * y).sum()
}

/// Exact Gauss-Jordan inverse; `None` when singular.
fn invert(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, p);
        inv.swap(col, p);
        let f = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &f;
        }
        for x in inv[col].iter_mut() {
            *x *= &f;
        }
        let (prow, pinv) = (a[col].clone(), inv[col].clone());
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for (x, p) in a[r].iter_mut().zip(&prow) {
                *x -= &factor * p;
            }
            for (x, p) in inv[r].iter_mut().zip(&pinv) {
                *x -= &factor * p;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn optimal(outcome: &LpOutcome) -> &OptimalSolution {
        outcome.optimal().expect("optimal")
    }

    #[test]
    fn bounded_maximum() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(Domain::NonNegative, int(1));
        lp.add_row(&[(x, int(1))], Relation::Le, int(3)).unwrap();
        let out = lp.solve().unwrap();
        let sol = optimal(&out);
        assert_eq!(sol.values, vec![int(3)]);
        assert_eq!(sol.objective, int(3));
        assert_eq!(sol.duals, vec![int(1)]);
    }

    #[test]
    fn infeasible_has_farkas_vector() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable(Domain::NonNegative, int(0));
        lp.add_row(&[(x, int(1))], Relation::Le, int(-1)).unwrap();
        match lp.solve().unwrap() {
            LpOutcome::Infeasible { farkas, .. } => {
                assert_eq!(farkas, vec![int(1)]);
                assert!(lp.verify_farkas(&farkas));
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(Domain::NonNegative, int(1));
        let y = lp.add_variable(Domain::NonNegative, int(0));
        lp.add_row(&[(x, int(1)), (y, int(-1))], Relation::Le, int(2)).unwrap();
        let out = lp.solve().unwrap();
        assert!(matches!(out, LpOutcome::Unbounded { .. }));
        lp.certify(&out).unwrap();
    }

    #[test]
    fn free_variables_split() {
        // min x s.t. x >= -5, x free
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable(Domain::Free, int(1));
        lp.add_row(&[(x, int(1))], Relation::Ge, int(-5)).unwrap();
        let out = lp.solve().unwrap();
        assert_eq!(optimal(&out).values, vec![int(-5)]);
        assert_eq!(optimal(&out).duals, vec![int(1)]);
    }

    #[test]
    fn equality_and_mixed_rows() {
        // min 2a + 3b s.t. a + b = 4, a - b <= 1, b >= 1/2
        let mut lp = LinearProgram::new(Sense::Minimize);
        let a = lp.add_variable(Domain::NonNegative, int(2));
        let b = lp.add_variable(Domain::NonNegative, int(3));
        lp.add_row(&[(a, int(1)), (b, int(1))], Relation::Eq, int(4)).unwrap();
        lp.add_row(&[(a, int(1)), (b, int(-1))], Relation::Le, int(1)).unwrap();
        lp.add_row(&[(b, int(1))], Relation::Ge, ratio(1, 2)).unwrap();
        let out = lp.solve().unwrap();
        let sol = optimal(&out);
        assert_eq!(sol.values, vec![ratio(5, 2), ratio(3, 2)]);
        assert_eq!(sol.objective, ratio(19, 2));
        assert_eq!(sol.duals[2], int(0));
    }

    #[test]
    fn added_rows_and_columns() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_variable(Domain::NonNegative, int(1));
        lp.add_row(&[(x, int(1))], Relation::Le, int(3)).unwrap();
        assert_eq!(optimal(&lp.solve().unwrap()).objective, int(3));
        // redundant row keeps the optimum and the basis
        lp.add_row(&[(x, int(1))], Relation::Le, int(10)).unwrap();
        let out = lp.solve().unwrap();
        assert_eq!(optimal(&out).objective, int(3));
        assert!(out.stats().warm_started);
        // violated row x <= 1
        lp.add_row(&[(x, int(1))], Relation::Le, int(1)).unwrap();
        let out = lp.solve().unwrap();
        assert_eq!(optimal(&out).objective, int(1));
        assert!(!out.stats().warm_started);
    }

    #[test]
    fn column_generation_improves_master() {
        // min 3a + b + c  s.t. a + b >= 1, a + c >= 1 (a, b, c >= 0)
        let mut lp = LinearProgram::new(Sense::Minimize);
        let r0 = lp.add_row(&[], Relation::Ge, int(1)).unwrap();
        let r1 = lp.add_row(&[], Relation::Ge, int(1)).unwrap();
        lp.add_column(Domain::NonNegative, int(3), &[(r0, int(1)), (r1, int(1))]).unwrap();
        let first = optimal(&lp.solve().unwrap()).clone();
        assert_eq!(first.objective, int(3));
        // y0 + y1 = 3, so b or c prices out negative
        assert!((int(1) - &first.duals[r0]).is_negative() || (int(1) - &first.duals[r1]).is_negative());
        lp.add_column(Domain::NonNegative, int(1), &[(r0, int(1))]).unwrap();
        lp.add_column(Domain::NonNegative, int(1), &[(r1, int(1))]).unwrap();
        let out = lp.solve().unwrap();
        assert!(out.stats().warm_started);
        assert!(optimal(&out).objective < first.objective);
        assert_eq!(optimal(&out).objective, int(2));
        assert_eq!(lp.add_column(Domain::NonNegative, int(1), &[(9, int(1))]), Err(LpError::UnknownRow(9)));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's classic cycling example, in minimisation form.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x: Vec<VarId> = [ratio(-3, 4), int(150), ratio(-1, 50), int(6)]
            .into_iter()
            .map(|c| lp.add_variable(Domain::NonNegative, c))
            .collect();
        lp.add_row(&[(x[0], ratio(1, 4)), (x[1], int(-60)), (x[2], ratio(-1, 25)), (x[3], int(9))], Relation::Le, int(0)).unwrap();
        lp.add_row(&[(x[0], ratio(1, 2)), (x[1], int(-90)), (x[2], ratio(-1, 50)), (x[3], int(3))], Relation::Le, int(0)).unwrap();
        lp.add_row(&[(x[2], int(1))], Relation::Le, int(1)).unwrap();
        let out = lp.solve().unwrap();
        assert_eq!(optimal(&out).objective, ratio(-1, 20));
    }

    #[test]
    fn dump_format() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_variable(Domain::NonNegative, ratio(1, 2));
        lp.add_row(&[(x, ratio(2, 3))], Relation::Ge, int(1)).unwrap();
        let text = lp.dump();
        assert!(text.contains("var x0 >=0 obj 1/2"));
        assert!(text.contains("row r0: 2/3 x0 >= 1"));
    }
}
