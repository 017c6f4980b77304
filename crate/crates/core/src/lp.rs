//! Exact rational linear programming.
//!
//! A dense-tableau two-phase simplex over [`Rational`]. Every returned
//! optimum is re-checked against the original model with exact arithmetic
//! before it is handed back. [`IncrementalSolver`] keeps the optimal tableau
//! around so that constraints can be appended and the model re-optimised with
//! the dual simplex, which is what column-fixing loops want.

use std::fmt;

use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

/// A sparse linear constraint `Σ coeff·x (rel) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Constraint {
        Constraint { coeffs, relation, rhs }
    }

    fn lhs(&self, values: &[Rational]) -> Rational {
        self.coeffs.iter().map(|(j, a)| a * &values[*j]).sum()
    }

    fn holds(&self, values: &[Rational]) -> bool {
        let lhs = self.lhs(values);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Eq => lhs == self.rhs,
            Relation::Ge => lhs >= self.rhs,
        }
    }
}

/// Variable bounds; `None` means unbounded in that direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarBounds {
    pub lower: Option<Rational>,
    pub upper: Option<Rational>,
}

impl VarBounds {
    pub fn non_negative() -> VarBounds {
        VarBounds { lower: Some(Rational::zero()), upper: None }
    }

    pub fn free() -> VarBounds {
        VarBounds { lower: None, upper: None }
    }

    pub fn between(lower: Rational, upper: Rational) -> VarBounds {
        VarBounds { lower: Some(lower), upper: Some(upper) }
    }

    fn contains(&self, v: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| l <= v) && self.upper.as_ref().is_none_or(|u| v <= u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBounds>,
    pub names: Vec<String>,
}

impl LinearProgram {
    pub fn new(sense: Sense) -> LinearProgram {
        LinearProgram {
            sense,
            objective: Vec::new(),
            constraints: Vec::new(),
            bounds: Vec::new(),
            names: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Adds a variable and returns its index.
    pub fn add_var(&mut self, name: impl Into<String>, cost: Rational, bounds: VarBounds) -> usize {
        self.objective.push(cost);
        self.bounds.push(bounds);
        self.names.push(name.into());
        self.objective.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::Malformed(format!(
                "{} variables but {} bound entries",
                n,
                self.bounds.len()
            )));
        }
        if !self.names.is_empty() && self.names.len() != n {
            return Err(LpError::Malformed(format!("{} variables but {} names", n, self.names.len())));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            validate_constraint(c, n).map_err(|e| LpError::Malformed(format!("constraint {i}: {e}")))?;
        }
        Ok(())
    }

    fn name(&self, j: usize) -> String {
        self.names.get(j).cloned().unwrap_or_else(|| format!("x{j}"))
    }

    pub fn objective_value(&self, values: &[Rational]) -> Rational {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// True when `values` satisfies every constraint and bound exactly.
    pub fn is_feasible(&self, values: &[Rational]) -> bool {
        values.len() == self.num_vars()
            && self.bounds.iter().zip(values).all(|(b, v)| b.contains(v))
            && self.constraints.iter().all(|c| c.holds(values))
    }
}

fn validate_constraint(c: &Constraint, n: usize) -> Result<(), String> {
    match c.coeffs.iter().find(|(j, _)| *j >= n) {
        Some((j, _)) => Err(format!("references variable {j} of {n}")),
        None => Ok(()),
    }
}

impl fmt::Display for LinearProgram {
    /// Human-readable dump in an LP-file-like layout.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term_list = |f: &mut fmt::Formatter<'_>, terms: &mut dyn Iterator<Item = (usize, &Rational)>| {
            let mut first = true;
            for (j, a) in terms {
                if a.is_zero() {
                    continue;
                }
                let (sign, mag) = if a.is_negative() { ("-", -a) } else { ("+", a.clone()) };
                if first {
                    if sign == "-" {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                if mag != Rational::one() {
                    write!(f, "{mag} ")?;
                }
                write!(f, "{}", self.name(j))?;
                first = false;
            }
            if first {
                write!(f, "0")?;
            }
            Ok(())
        };
        writeln!(f, "{}", if self.sense == Sense::Minimize { "minimize" } else { "maximize" })?;
        write!(f, "  obj: ")?;
        term_list(f, &mut self.objective.iter().enumerate())?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, c) in self.constraints.iter().enumerate() {
            write!(f, "  c{i}: ")?;
            term_list(f, &mut c.coeffs.iter().map(|(j, a)| (*j, a)))?;
            writeln!(f, " {} {}", c.relation, c.rhs)?;
        }
        writeln!(f, "bounds")?;
        for (j, b) in self.bounds.iter().enumerate() {
            let name = self.name(j);
            match (&b.lower, &b.upper) {
                (None, None) => writeln!(f, "  {name} free")?,
                (Some(l), None) => writeln!(f, "  {name} >= {l}")?,
                (None, Some(u)) => writeln!(f, "  {name} <= {u}")?,
                (Some(l), Some(u)) => writeln!(f, "  {l} <= {name} <= {u}")?,
            }
        }
        writeln!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Variable values; empty unless `status` is `Optimal`.
    pub values: Vec<Rational>,
    /// Objective value; zero unless `status` is `Optimal`.
    pub objective: Rational,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> LpSolution {
        LpSolution { status, values: Vec::new(), objective: Rational::zero() }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("value {value} for variable {index} lies outside its bounds")]
    OutOfBounds { index: usize, value: Rational },
    #[error("incremental re-solve requires an optimal base model (status {0:?})")]
    NotOptimal(LpStatus),
    #[error("internal solver error: {0}")]
    Internal(String),
}

/// Entering-variable selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Smallest-index entering and leaving variables throughout.
    Bland,
    /// Largest violation first. After a run of degenerate steps the solver
    /// switches to the smallest-index rule until the objective moves again,
    /// which keeps the method finite.
    #[default]
    DantzigWithBlandFallback,
}

/// Returns a copy of `lp` in which variable `index` is pinned to `value`.
pub fn fix_variable(lp: &LinearProgram, index: usize, value: Rational) -> Result<LinearProgram, LpError> {
    let bounds = lp
        .bounds
        .get(index)
        .ok_or_else(|| LpError::Malformed(format!("no variable {index}")))?;
    if !bounds.contains(&value) {
        return Err(LpError::OutOfBounds { index, value });
    }
    let mut out = lp.clone();
    out.bounds[index] = VarBounds::between(value.clone(), value);
    Ok(out)
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, PivotRule::default())
}

pub fn solve_with(lp: &LinearProgram, rule: PivotRule) -> Result<LpSolution, LpError> {
    IncrementalSolver::with_rule(lp, rule).map(|(_, sol)| sol)
}

/// How an original variable is expressed through tableau columns.
#[derive(Debug, Clone)]
enum VarMap {
    Fixed(Rational),
    /// `x = offset + col`
    Lower { col: usize, offset: Rational },
    /// `x = offset - col`
    Upper { col: usize, offset: Rational },
    /// `x = pos - neg`
    Split { pos: usize, neg: usize },
}

impl VarMap {
    /// Adds `coef · x` to a standard-form row; returns the constant part.
    fn expand(&self, coef: &Rational, row: &mut [Rational]) -> Rational {
        match self {
            VarMap::Fixed(v) => coef * v,
            VarMap::Lower { col, offset } => {
                row[*col] += coef;
                coef * offset
            }
            VarMap::Upper { col, offset } => {
                row[*col] -= coef;
                coef * offset
            }
            VarMap::Split { pos, neg } => {
                row[*pos] += coef;
                row[*neg] -= coef;
                Rational::zero()
            }
        }
    }
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const STALL_LIMIT: usize = 64;

#[derive(Debug, Clone)]
struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced costs (minimisation form).
    cost: Vec<Rational>,
    /// Current objective value of the minimisation form.
    value: Rational,
}

enum PrimalOutcome {
    Optimal,
    Unbounded,
}

enum DualOutcome {
    Optimal,
    Infeasible,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.cost.len()
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let piv = self.rows[r][q].clone();
        if piv != Rational::one() {
            let inv = piv.recip();
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            self.rhs[r] *= &inv;
        }
        let nz: Vec<(usize, Rational)> = self.rows[r]
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        let pivot_rhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][q].is_zero() {
                continue;
            }
            let f = self.rows[i][q].clone();
            let row = &mut self.rows[i];
            for (j, v) in &nz {
                row[*j].sub_mul_assign(&f, v);
            }
            self.rhs[i].sub_mul_assign(&f, &pivot_rhs);
        }
        if !self.cost[q].is_zero() {
            let f = self.cost[q].clone();
            for (j, v) in &nz {
                self.cost[*j].sub_mul_assign(&f, v);
            }
            self.value += &f * &pivot_rhs;
        }
        self.basis[r] = q;
    }

    /// Primal ratio test. Ties go to the smallest basic index under Bland's rule
    /// and to the largest pivot otherwise.
    fn leaving_row(&self, q: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (i, row) in self.rows.iter().enumerate() {
            let a = &row[q];
            if !a.is_positive() {
                continue;
            }
            let ratio = &self.rhs[i] / a;
            let better = match &best {
                None => true,
                Some((bi, br)) => {
                    ratio < *br
                        || (ratio == *br
                            && if bland { self.basis[i] < self.basis[*bi] } else { *a > self.rows[*bi][q] })
                }
            };
            if better {
                best = Some((i, ratio));
            }
        }
        best.map(|(i, _)| i)
    }

    fn primal(&mut self, rule: PivotRule, allowed: usize) -> PrimalOutcome {
        let mut stall = 0usize;
        loop {
            let bland = rule == PivotRule::Bland || stall >= STALL_LIMIT;
            let q = if bland {
                (0..allowed).find(|&j| self.cost[j].is_negative())
            } else {
                (0..allowed).filter(|&j| self.cost[j].is_negative()).min_by(|&a, &b| self.cost[a].cmp(&self.cost[b]))
            };
            let Some(q) = q else {
                return PrimalOutcome::Optimal;
            };
            let Some(r) = self.leaving_row(q, bland) else {
                return PrimalOutcome::Unbounded;
            };
            stall = if self.rhs[r].is_zero() { stall + 1 } else { 0 };
            self.pivot(r, q);
        }
    }

    /// Dual ratio test. Ties go to the smallest column under Bland's rule and
    /// to the largest otherwise, which favours slacks of recently added rows.
    fn entering_col_dual(&self, r: usize, bland: bool) -> Option<usize> {
        let mut best: Option<(usize, Rational)> = None;
        for (j, a) in self.rows[r].iter().enumerate() {
            if !a.is_negative() {
                continue;
            }
            let ratio = &self.cost[j] / &-a;
            let better = match &best {
                None => true,
                Some((_, br)) => ratio < *br || (!bland && ratio == *br),
            };
            if better {
                best = Some((j, ratio));
            }
        }
        best.map(|(j, _)| j)
    }

    fn dual(&mut self, rule: PivotRule) -> DualOutcome {
        let mut stall = 0usize;
        loop {
            let bland = rule == PivotRule::Bland || stall >= STALL_LIMIT;
            let negative = (0..self.rows.len()).filter(|&i| self.rhs[i].is_negative());
            let r = if bland {
                negative.min_by_key(|&i| self.basis[i])
            } else {
                negative.min_by(|&a, &b| self.rhs[a].cmp(&self.rhs[b]).then(self.basis[a].cmp(&self.basis[b])))
            };
            let Some(r) = r else {
                return DualOutcome::Optimal;
            };
            let Some(q) = self.entering_col_dual(r, bland) else {
                return DualOutcome::Infeasible;
            };
            stall = if self.cost[q].is_zero() { stall + 1 } else { 0 };
            self.pivot(r, q);
        }
    }
}

/// A solved model whose tableau can absorb additional constraints.
#[derive(Debug, Clone)]
pub struct IncrementalSolver {
    model: LinearProgram,
    map: Vec<VarMap>,
    /// Constant added to the tableau objective to recover the model objective (minimisation form).
    obj_offset: Rational,
    tableau: Tableau,
    status: LpStatus,
    rule: PivotRule,
}

impl IncrementalSolver {
    pub fn new(lp: &LinearProgram) -> Result<(IncrementalSolver, LpSolution), LpError> {
        IncrementalSolver::with_rule(lp, PivotRule::default())
    }

    pub fn with_rule(lp: &LinearProgram, rule: PivotRule) -> Result<(IncrementalSolver, LpSolution), LpError> {
        lp.validate()?;
        let mut map = Vec::with_capacity(lp.num_vars());
        let mut ncols = 0usize;
        let mut bound_rows: Vec<(usize, Rational)> = Vec::new();
        let mut trivially_infeasible = false;
        for b in &lp.bounds {
            let m = match (&b.lower, &b.upper) {
                (Some(l), Some(u)) if l == u => VarMap::Fixed(l.clone()),
                (Some(l), Some(u)) => {
                    if l > u {
                        trivially_infeasible = true;
                    }
                    bound_rows.push((ncols, u - l));
                    ncols += 1;
                    VarMap::Lower { col: ncols - 1, offset: l.clone() }
                }
                (Some(l), None) => {
                    ncols += 1;
                    VarMap::Lower { col: ncols - 1, offset: l.clone() }
                }
                (None, Some(u)) => {
                    ncols += 1;
                    VarMap::Upper { col: ncols - 1, offset: u.clone() }
                }
                (None, None) => {
                    ncols += 2;
                    VarMap::Split { pos: ncols - 2, neg: ncols - 1 }
                }
            };
            map.push(m);
        }
        let structural = ncols;

        // Minimisation-form costs over structural columns.
        let flip = if lp.sense == Sense::Maximize { -Rational::one() } else { Rational::one() };
        let mut cost = vec![Rational::zero(); structural];
        let mut obj_offset = Rational::zero();
        for (j, c) in lp.objective.iter().enumerate() {
            let c = c * &flip;
            obj_offset += map[j].expand(&c, &mut cost);
        }

        // Rows over structural columns, normalised to rhs >= 0.
        let mut raw: Vec<(Vec<Rational>, Relation, Rational)> = Vec::new();
        for c in &lp.constraints {
            let mut row = vec![Rational::zero(); structural];
            let mut constant = Rational::zero();
            for (j, a) in &c.coeffs {
                constant += map[*j].expand(a, &mut row);
            }
            raw.push((row, c.relation, &c.rhs - &constant));
        }
        for (col, width) in bound_rows {
            let mut row = vec![Rational::zero(); structural];
            row[col] = Rational::one();
            raw.push((row, Relation::Le, width));
        }
        if trivially_infeasible {
            let solver = IncrementalSolver {
                model: lp.clone(),
                map,
                obj_offset,
                tableau: Tableau {
                    rows: Vec::new(),
                    rhs: Vec::new(),
                    basis: Vec::new(),
                    cost: Vec::new(),
                    value: Rational::zero(),
                },
                status: LpStatus::Infeasible,
                rule,
            };
            return Ok((solver, LpSolution::without_point(LpStatus::Infeasible)));
        }
        for (row, rel, rhs) in raw.iter_mut() {
            if rhs.is_negative() {
                for v in row.iter_mut() {
                    *v = -&*v;
                }
                *rhs = -&*rhs;
                *rel = match rel {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
            }
        }
        let n_slack = raw.iter().filter(|(_, rel, _)| *rel != Relation::Eq).count();
        let n_art = raw.iter().filter(|(_, rel, _)| *rel != Relation::Le).count();
        let total = structural + n_slack + n_art;
        let mut rows = Vec::with_capacity(raw.len());
        let mut rhs = Vec::with_capacity(raw.len());
        let mut basis = Vec::with_capacity(raw.len());
        let (mut next_slack, mut next_art) = (structural, structural + n_slack);
        for (mut row, rel, b) in raw {
            row.resize(total, Rational::zero());
            match rel {
                Relation::Le => {
                    row[next_slack] = Rational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -Rational::one();
                    next_slack += 1;
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = Rational::one();
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            rows.push(row);
            rhs.push(b);
        }
        let art_start = structural + n_slack;

        // Phase 1: minimise the sum of artificials.
        let mut p1_cost = vec![Rational::zero(); total];
        let mut p1_value = Rational::zero();
        for (i, &bv) in basis.iter().enumerate() {
            if bv >= art_start {
                for (j, a) in rows[i].iter().enumerate() {
                    if j < art_start && !a.is_zero() {
                        p1_cost[j] -= a;
                    }
                }
                p1_value += &rhs[i];
            }
        }
        let mut tab = Tableau { rows, rhs, basis, cost: p1_cost, value: p1_value };
        if n_art > 0 {
            match tab.primal(rule, art_start) {
                PrimalOutcome::Optimal => {}
                PrimalOutcome::Unbounded => {
                    return Err(LpError::Internal("phase one reported unbounded".into()));
                }
            }
            if tab.value.is_positive() {
                let solver = IncrementalSolver {
                    model: lp.clone(),
                    map,
                    obj_offset,
                    tableau: tab,
                    status: LpStatus::Infeasible,
                    rule,
                };
                return Ok((solver, LpSolution::without_point(LpStatus::Infeasible)));
            }
            // Drive remaining (zero-valued) artificials out of the basis.
            let mut i = 0;
            while i < tab.rows.len() {
                if tab.basis[i] >= art_start {
                    match (0..art_start).find(|&j| !tab.rows[i][j].is_zero()) {
                        Some(j) => {
                            tab.pivot(i, j);
                            i += 1;
                        }
                        None => {
                            tab.rows.remove(i);
                            tab.rhs.remove(i);
                            tab.basis.remove(i);
                        }
                    }
                } else {
                    i += 1;
                }
            }
            for row in tab.rows.iter_mut() {
                row.truncate(art_start);
            }
        }

        // Phase 2 reduced costs.
        let mut full_cost = cost;
        full_cost.resize(art_start, Rational::zero());
        let mut value = Rational::zero();
        let mut reduced = full_cost.clone();
        for (i, &bv) in tab.basis.iter().enumerate() {
            let cb = &full_cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (j, a) in tab.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    reduced[j].sub_mul_assign(cb, a);
                }
            }
            value += cb * &tab.rhs[i];
        }
        tab.cost = reduced;
        tab.value = value;

        let status = match tab.primal(rule, art_start) {
            PrimalOutcome::Optimal => LpStatus::Optimal,
            PrimalOutcome::Unbounded => LpStatus::Unbounded,
        };
        let mut solver = IncrementalSolver { model: lp.clone(), map, obj_offset, tableau: tab, status, rule };
        let sol = solver.solution()?;
        Ok((solver, sol))
    }

    pub fn status(&self) -> LpStatus {
        self.status
    }

    pub fn model(&self) -> &LinearProgram {
        &self.model
    }

    fn column_values(&self) -> Vec<Rational> {
        let mut vals = vec![Rational::zero(); self.tableau.ncols()];
        for (i, &bv) in self.tableau.basis.iter().enumerate() {
            vals[bv] = self.tableau.rhs[i].clone();
        }
        vals
    }

    fn solution(&mut self) -> Result<LpSolution, LpError> {
        if self.status != LpStatus::Optimal {
            return Ok(LpSolution::without_point(self.status));
        }
        let cols = self.column_values();
        let values: Vec<Rational> = self
            .map
            .iter()
            .map(|m| match m {
                VarMap::Fixed(v) => v.clone(),
                VarMap::Lower { col, offset } => offset + &cols[*col],
                VarMap::Upper { col, offset } => offset - &cols[*col],
                VarMap::Split { pos, neg } => &cols[*pos] - &cols[*neg],
            })
            .collect();
        if !self.model.is_feasible(&values) {
            return Err(LpError::Internal("optimal point fails the exact residual check".into()));
        }
        let objective = self.model.objective_value(&values);
        let tableau_objective = &self.tableau.value + &self.obj_offset;
        let expected = if self.model.sense == Sense::Maximize { -tableau_objective } else { tableau_objective };
        if objective != expected {
            return Err(LpError::Internal(format!(
                "objective mismatch: point gives {objective}, tableau {expected}"
            )));
        }
        Ok(LpSolution { status: LpStatus::Optimal, values, objective })
    }

    /// Current optimal objective, or `None` when the model is not optimal.
    pub fn objective(&self) -> Option<Rational> {
        if self.status != LpStatus::Optimal {
            return None;
        }
        let v = &self.tableau.value + &self.obj_offset;
        Some(if self.model.sense == Sense::Maximize { -v } else { v })
    }

    /// Appends a constraint and re-optimises from the current basis.
    pub fn add_constraint(&mut self, c: Constraint) -> Result<LpSolution, LpError> {
        match self.status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => {
                validate_constraint(&c, self.model.num_vars()).map_err(LpError::Malformed)?;
                self.model.constraints.push(c);
                return Ok(LpSolution::without_point(LpStatus::Infeasible));
            }
            LpStatus::Unbounded => return Err(LpError::NotOptimal(LpStatus::Unbounded)),
        }
        validate_constraint(&c, self.model.num_vars()).map_err(LpError::Malformed)?;
        let ncols = self.tableau.ncols();
        let mut row = vec![Rational::zero(); ncols];
        let mut constant = Rational::zero();
        for (j, a) in &c.coeffs {
            constant += self.map[*j].expand(a, &mut row);
        }
        let rhs = &c.rhs - &constant;
        let halves: Vec<(Vec<Rational>, Rational)> = match c.relation {
            Relation::Le => vec![(row, rhs)],
            Relation::Ge => vec![(row.iter().map(|v| -v).collect(), -rhs)],
            Relation::Eq => {
                let neg = row.iter().map(|v| -v).collect();
                vec![(row, rhs.clone()), (neg, -rhs)]
            }
        };
        self.model.constraints.push(c);
        for (row, rhs) in halves {
            self.append_le_row(row, rhs);
        }
        self.status = match self.tableau.dual(self.rule) {
            DualOutcome::Optimal => LpStatus::Optimal,
            DualOutcome::Infeasible => LpStatus::Infeasible,
        };
        self.solution()
    }

    fn append_le_row(&mut self, mut row: Vec<Rational>, mut rhs: Rational) {
        let tab = &mut self.tableau;
        let slack = tab.ncols();
        for r in tab.rows.iter_mut() {
            r.push(Rational::zero());
        }
        tab.cost.push(Rational::zero());
        row.push(Rational::one());
        for i in 0..tab.rows.len() {
            let bv = tab.basis[i];
            if row[bv].is_zero() {
                continue;
            }
            let f = row[bv].clone();
            for (j, a) in tab.rows[i].iter().enumerate() {
                if !a.is_zero() {
                    row[j].sub_mul_assign(&f, a);
                }
            }
            rhs.sub_mul_assign(&f, &tab.rhs[i]);
        }
        tab.rows.push(row);
        tab.rhs.push(rhs);
        tab.basis.push(slack);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> Rational {
        Rational::from_int(v)
    }

    /// maximize 2x + y s.t. x + y <= 3, x <= 2, x, y >= 0
    fn example() -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", q(2), VarBounds::non_negative());
        let y = lp.add_var("y", q(1), VarBounds::non_negative());
        lp.add_constraint(vec![(x, q(1)), (y, q(1))], Relation::Le, q(3));
        lp.add_constraint(vec![(x, q(1))], Relation::Le, q(2));
        lp
    }

    #[test]
    fn small_maximisation() {
        let sol = solve(&example()).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.objective, q(5));
        assert_eq!(sol.values, vec![q(2), q(1)]);
    }

    #[test]
    fn contradictory_bounds_are_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", q(1), VarBounds::free());
        lp.add_constraint(vec![(x, q(1))], Relation::Ge, q(1));
        lp.add_constraint(vec![(x, q(1))], Relation::Le, q(0));
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        lp.add_var("x", q(1), VarBounds::non_negative());
        assert_eq!(solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn fixing_variables() {
        let lp = example();
        let fixed = fix_variable(&lp, 0, q(2)).unwrap();
        assert_eq!(solve(&fixed).unwrap().objective, q(5));
        let zero = fix_variable(&lp, 0, q(0)).unwrap();
        let sol = solve(&zero).unwrap();
        assert_eq!(sol.objective, q(3));
        assert_eq!(sol.values, vec![q(0), q(3)]);
        let mut capped = lp.clone();
        capped.bounds[0] = VarBounds::between(q(0), q(2));
        assert!(matches!(fix_variable(&capped, 0, q(3)), Err(LpError::OutOfBounds { .. })));
    }

    #[test]
    fn malformed_index_is_rejected() {
        let mut lp = example();
        lp.add_constraint(vec![(7, q(1))], Relation::Le, q(1));
        assert!(matches!(solve(&lp), Err(LpError::Malformed(_))));
    }

    #[test]
    fn equality_and_free_variables() {
        // minimize |shift| style: min t s.t. t >= x - 3, t >= 3 - x, x = 1, t free
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", q(0), VarBounds::free());
        let t = lp.add_var("t", q(1), VarBounds::free());
        lp.add_constraint(vec![(t, q(1)), (x, q(-1))], Relation::Ge, q(-3));
        lp.add_constraint(vec![(t, q(1)), (x, q(1))], Relation::Ge, q(3));
        lp.add_constraint(vec![(x, q(1))], Relation::Eq, q(1));
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, q(2));
        assert_eq!(sol.values, vec![q(1), q(2)]);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_var("x", q(1), VarBounds::non_negative());
        let y = lp.add_var("y", q(2), VarBounds::non_negative());
        lp.add_constraint(vec![(x, q(1)), (y, q(1))], Relation::Eq, q(4));
        lp.add_constraint(vec![(x, q(2)), (y, q(2))], Relation::Eq, q(8));
        let sol = solve(&lp).unwrap();
        assert_eq!(sol.objective, q(4));
    }

    #[test]
    fn incremental_matches_cold_solve() {
        let lp = example();
        let (mut inc, _) = IncrementalSolver::new(&lp).unwrap();
        let cut = Constraint::new(vec![(0, q(1))], Relation::Le, q(1));
        let warm = inc.add_constraint(cut.clone()).unwrap();
        let mut cold_model = lp.clone();
        cold_model.constraints.push(cut);
        let cold = solve(&cold_model).unwrap();
        assert_eq!(warm.objective, cold.objective);
        assert_eq!(warm.objective, q(4));
        let infeasible = inc.add_constraint(Constraint::new(vec![(1, q(1))], Relation::Ge, q(5))).unwrap();
        assert_eq!(infeasible.status, LpStatus::Infeasible);
    }

    #[test]
    fn incremental_equality_cut() {
        let (mut inc, _) = IncrementalSolver::new(&example()).unwrap();
        let sol = inc.add_constraint(Constraint::new(vec![(1, q(1))], Relation::Eq, q(3))).unwrap();
        assert_eq!(sol.objective, q(3));
        assert_eq!(sol.values, vec![q(0), q(3)]);
    }

    #[test]
    fn bland_and_hybrid_agree() {
        let lp = example();
        let a = solve_with(&lp, PivotRule::Bland).unwrap();
        let b = solve_with(&lp, PivotRule::DantzigWithBlandFallback).unwrap();
        assert_eq!(a.objective, b.objective);
    }

    #[test]
    fn dump_is_readable() {
        let text = example().to_string();
        assert!(text.contains("maximize"));
        assert!(text.contains("c0: x + y <= 3"));
        assert!(text.contains("x >= 0"));
    }
}
