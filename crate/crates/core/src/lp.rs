//! Dense two-phase primal simplex with exact results.
//!
//! Pivoting uses Dantzig's rule with a lexicographic ratio test and falls
//! back to Bland's smallest-index rule while progress stalls, so the method
//! terminates on degenerate problems without perturbation. Infeasibility and
//! unboundedness are ordinary outcomes, not errors.
//!
//! Exact pivoting is fraction-free over big integers. Before it starts, a
//! floating-point copy is solved and the exact tableau is moved straight to
//! its final basis; exact pivoting then certifies optimality from there, so
//! the floats only ever propose.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use log::trace;
use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::{Extended, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Debug)]
struct Row<F> {
    coeffs: Vec<(usize, F)>,
    relation: Relation,
    rhs: F,
}

/// A linear program in "natural" form: variables are either nonnegative or
/// free, constraints are sparse rows with `<=`, `>=` or `=`.
#[derive(Clone, Debug)]
pub struct LinearProgram<F> {
    sense: Sense,
    objective: Vec<F>,
    free: Vec<bool>,
    rows: Vec<Row<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome<F> {
    Optimal { value: F, x: Vec<F> },
    Infeasible,
    Unbounded,
}

impl<F: Scalar> LpOutcome<F> {
    /// Optimal value on the extended line: infeasible minimizations are
    /// `+inf`, unbounded ones `-inf` (and symmetrically for maximization).
    pub fn value(&self, sense: Sense) -> Extended<F> {
        match (self, sense) {
            (LpOutcome::Optimal { value, .. }, _) => Extended::Finite(value.clone()),
            (LpOutcome::Infeasible, Sense::Minimize) | (LpOutcome::Unbounded, Sense::Maximize) => {
                Extended::PosInf
            }
            (LpOutcome::Infeasible, Sense::Maximize) | (LpOutcome::Unbounded, Sense::Minimize) => {
                Extended::NegInf
            }
        }
    }

    pub fn solution(&self) -> Option<&[F]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

impl<F: Scalar> LinearProgram<F> {
    pub fn new(sense: Sense) -> Self {
        LinearProgram { sense, objective: Vec::new(), free: Vec::new(), rows: Vec::new() }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.rows.len()
    }

    /// Adds a variable with objective coefficient `cost`; returns its index.
    pub fn add_var(&mut self, cost: F, free: bool) -> usize {
        self.objective.push(cost);
        self.free.push(free);
        self.objective.len() - 1
    }

    pub fn add_nonneg(&mut self, cost: F) -> usize {
        self.add_var(cost, false)
    }

    pub fn add_free(&mut self, cost: F) -> usize {
        self.add_var(cost, true)
    }

    pub fn set_cost(&mut self, var: usize, cost: F) {
        self.objective[var] = cost;
    }

    /// Adds `sum coeffs[k].1 * x[coeffs[k].0]  (relation)  rhs`. Repeated
    /// indices are summed; zero coefficients are dropped.
    pub fn add_constraint(&mut self, coeffs: Vec<(usize, F)>, relation: Relation, rhs: F) {
        let mut merged: Vec<(usize, F)> = Vec::with_capacity(coeffs.len());
        let mut sorted = coeffs;
        sorted.sort_by_key(|(j, _)| *j);
        for (j, c) in sorted {
            assert!(j < self.objective.len(), "constraint references unknown variable {j}");
            match merged.last_mut() {
                Some((k, acc)) if *k == j => *acc = acc.clone() + c,
                _ => merged.push((j, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.rows.push(Row { coeffs: merged, relation, rhs });
    }

    pub fn solve(&self) -> LpOutcome<F> {
        self.solve_from(Start::Float)
    }

    fn solve_from(&self, start: Start) -> LpOutcome<F> {
        // a floating-point solve proposes a basis; the exact simplex starts
        // there, repairs it if rounding made it infeasible, and certifies it
        let form = StandardForm::build(self);
        let mut tableau = ExactTableau::new(&form);
        let hint = match start {
            Start::Float => FloatTableau::optimal_basis(&form),
            Start::Cold => None,
            Start::Basis(b) => Some(b),
        };
        if let Some(basis) = hint {
            tableau.crash(&basis);
            tableau.repair();
        }
        let columns: Vec<F> = match tableau.run(usize::MAX) {
            Status::Infeasible => return LpOutcome::Infeasible,
            Status::Unbounded => return LpOutcome::Unbounded,
            Status::Stalled => unreachable!("exact pivoting has no cap"),
            Status::Optimal => tableau
                .structural_values()
                .iter()
                .map(|v| F::from_big(v).expect("LP solution fits the scalar type"))
                .collect(),
        };
        let mut x = Vec::with_capacity(self.num_vars());
        let mut col = 0;
        for &free in &self.free {
            if free {
                x.push(columns[col].clone() - columns[col + 1].clone());
                col += 2;
            } else {
                x.push(columns[col].clone());
                col += 1;
            }
        }
        let value = self
            .objective
            .iter()
            .zip(&x)
            .fold(F::zero(), |acc, (c, v)| acc + c.clone() * v.clone());
        LpOutcome::Optimal { value, x }
    }

    /// Checks a candidate point against every constraint exactly.
    pub fn is_feasible(&self, x: &[F]) -> bool {
        if x.len() != self.num_vars() {
            return false;
        }
        if x.iter().zip(&self.free).any(|(v, &free)| !free && v.is_negative()) {
            return false;
        }
        self.rows.iter().all(|row| {
            let lhs = row
                .coeffs
                .iter()
                .fold(F::zero(), |acc, (j, c)| acc + c.clone() * x[*j].clone());
            match row.relation {
                Relation::Le => lhs <= row.rhs,
                Relation::Ge => lhs >= row.rhs,
                Relation::Eq => lhs == row.rhs,
            }
        })
    }
}

/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// the pivot cap was hit
    Stalled,
}

/// `A x = b, x >= 0, b >= 0` for minimization. Columns are the structural
/// (split) variables, then one slack per inequality, then one artificial
/// per `>=` or `=` row; the starting basis consists of unit columns.
struct StandardForm {
    /// rows of `A`, each `ncols + 1` long with `b` last
    rows: Vec<Vec<BigRational>>,
    /// costs of the structural columns
    costs: Vec<BigRational>,
    basis: Vec<usize>,
    structural: usize,
    artificial_start: usize,
    ncols: usize,
}

impl StandardForm {
    fn build<F: Scalar>(lp: &LinearProgram<F>) -> Self {
        // structural columns: free variables are split into x+ and x-
        let mut col_of = Vec::with_capacity(lp.num_vars());
        let mut costs = Vec::new();
        let flip = lp.sense == Sense::Maximize;
        for (j, &free) in lp.free.iter().enumerate() {
            col_of.push(costs.len());
            let c = lp.objective[j].to_big();
            let c = if flip { -c } else { c };
            if free {
                costs.push(c.clone());
                costs.push(-c);
            } else {
                costs.push(c);
            }
        }
        let structural = costs.len();

        // normalize to nonnegative right-hand sides
        let mut normalized: Vec<(Vec<(usize, BigRational)>, Relation, BigRational)> = Vec::with_capacity(lp.rows.len());
        for row in &lp.rows {
            let mut coeffs = Vec::with_capacity(row.coeffs.len() * 2);
            for (j, c) in &row.coeffs {
                let c = c.to_big();
                if lp.free[*j] {
                    coeffs.push((col_of[*j] + 1, -c.clone()));
                }
                coeffs.push((col_of[*j], c));
            }
            let rhs = row.rhs.to_big();
            // `a.x >= 0` becomes `-a.x <= 0`, which needs no artificial
            let flip_zero = rhs.is_zero() && row.relation == Relation::Ge;
            if rhs.is_negative() || flip_zero {
                let relation = match row.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                let coeffs = coeffs.into_iter().map(|(j, c)| (j, -c)).collect();
                normalized.push((coeffs, relation, -rhs));
            } else {
                normalized.push((coeffs, row.relation, rhs));
            }
        }

        let slack_count = normalized.iter().filter(|(_, r, _)| *r != Relation::Eq).count();
        let artificial_count = normalized.iter().filter(|(_, r, _)| *r != Relation::Le).count();
        let artificial_start = structural + slack_count;
        let ncols = artificial_start + artificial_count;

        let mut rows = Vec::with_capacity(normalized.len());
        let mut basis = Vec::with_capacity(normalized.len());
        let mut next_slack = structural;
        let mut next_artificial = artificial_start;
        for (coeffs, relation, rhs) in normalized {
            let mut row = vec![BigRational::zero(); ncols + 1];
            for (j, c) in coeffs {
                row[j] = c;
            }
            row[ncols] = rhs;
            match relation {
                Relation::Le => {
                    row[next_slack] = BigRational::one();
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -BigRational::one();
                    next_slack += 1;
                    row[next_artificial] = BigRational::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
                Relation::Eq => {
                    row[next_artificial] = BigRational::one();
                    basis.push(next_artificial);
                    next_artificial += 1;
                }
            }
            rows.push(row);
        }
        StandardForm { rows, costs, basis, structural, artificial_start, ncols }
    }
}

/// The two-phase driver, written once against the sign and ratio queries
/// both tableaux answer.
trait Simplex {
    /// Sign tests are exact, so Bland's rule is safe against cycling.
    const EXACT: bool;

    fn rows(&self) -> usize;
    fn ncols(&self) -> usize;
    fn artificial_start(&self) -> usize;
    fn basis(&self) -> &[usize];
    fn reduced_negative(&self, j: usize) -> bool;
    /// reduced cost of `j` below that of `k`
    fn reduced_below(&self, j: usize, k: usize) -> bool;
    fn entry_positive(&self, i: usize, j: usize) -> bool;
    fn entry_nonzero(&self, i: usize, j: usize) -> bool;
    /// `b_i / a_i,col` against `b_k / a_k,col`, both entries positive
    fn compare_ratio(&self, i: usize, k: usize, col: usize) -> Ordering;
    fn rhs_zero(&self, i: usize) -> bool;
    /// Rows divided by their `col` entries, compared over the starting basis
    /// columns. These hold the rows of the basis inverse, so distinct rows
    /// never tie.
    fn lex_less(&self, i: usize, k: usize, col: usize) -> bool;
    fn pivot(&mut self, r: usize, c: usize);
    /// Installs reduced costs for the phase-one or phase-two objective.
    fn price(&mut self, phase_one: bool);
    fn objective_zero(&self) -> bool;

    fn run(&mut self, cap: usize) -> Status {
        let mut budget = cap;
        if self.artificial_start() < self.ncols() {
            self.price(true);
            match self.optimize(self.ncols(), &mut budget) {
                Status::Optimal => {}
                // bounded below by zero, so only rounding gets here
                Status::Unbounded => return Status::Stalled,
                other => return other,
            }
            if !self.objective_zero() {
                return Status::Infeasible;
            }
            self.expel_artificials();
        }
        self.price(false);
        self.optimize(self.artificial_start(), &mut budget)
    }

    /// Pivots to optimality with entering candidates restricted to columns
    /// `< limit`, spending at most `budget` pivots.
    ///
    /// Entering columns follow Dantzig's most negative reduced cost and ties
    /// in the ratio test are broken lexicographically, which cannot cycle
    /// from the starting basis. A long run of degenerate pivots (possible
    /// after a warm start) hands over to Bland's rule until the objective
    /// moves again; a cycle consists of degenerate pivots only, and Bland's
    /// rule cannot cycle. Floating-point tableaux pick a random improving
    /// column instead, since rounding can defeat Bland.
    fn optimize(&mut self, limit: usize, budget: &mut usize) -> Status {
        let mut pivots = 0usize;
        let mut degenerate_run = 0usize;
        let mut bland = false;
        let mut rng: u64 = 0x9e37_79b9_7f4a_7c15;
        loop {
            let entering = if bland && Self::EXACT {
                (0..limit).find(|&j| self.reduced_negative(j))
            } else if bland {
                let candidates: Vec<usize> = (0..limit).filter(|&j| self.reduced_negative(j)).collect();
                (!candidates.is_empty()).then(|| {
                    rng ^= rng << 13;
                    rng ^= rng >> 7;
                    rng ^= rng << 17;
                    candidates[(rng % candidates.len() as u64) as usize]
                })
            } else {
                let mut best: Option<usize> = None;
                for j in 0..limit {
                    if self.reduced_negative(j) && best.is_none_or(|b| self.reduced_below(j, b)) {
                        best = Some(j);
                    }
                }
                best
            };
            let Some(col) = entering else {
                trace!("simplex converged after {pivots} pivots");
                return Status::Optimal;
            };
            if *budget == 0 {
                return Status::Stalled;
            }
            *budget -= 1;
            let mut leaving: Option<usize> = None;
            for i in 0..self.rows() {
                if !self.entry_positive(i, col) {
                    continue;
                }
                let better = match leaving {
                    None => true,
                    Some(k) => match self.compare_ratio(i, k, col) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal if bland => self.basis()[i] < self.basis()[k],
                        Ordering::Equal => self.lex_less(i, k, col),
                    },
                };
                if better {
                    leaving = Some(i);
                }
            }
            let Some(row) = leaving else {
                return Status::Unbounded;
            };
            if self.rhs_zero(row) {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_LIMIT && Self::EXACT {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = false;
            }
            self.pivot(row, col);
            pivots += 1;
        }
    }

    /// After a successful phase one every artificial still in the basis sits
    /// at zero. Pivot it out on any nonzero non-artificial entry. Rows
    /// without one are redundant; their artificial stays basic at zero and,
    /// having no nonzero entry in a real column, never leaves again.
    fn expel_artificials(&mut self) {
        for r in 0..self.rows() {
            if self.basis()[r] < self.artificial_start() {
                continue;
            }
            if let Some(j) = (0..self.artificial_start()).find(|&j| self.entry_nonzero(r, j)) {
                self.pivot(r, j);
            }
        }
    }
}

/// Fraction-free exact tableau (Edmonds' integer-preserving pivoting).
///
/// Every stored entry is an integer; the true tableau is `rows / det`,
/// where `det` is the determinant of the current basis and may be negative.
/// A pivot multiplies and divides exactly, so no gcd is ever taken.
struct ExactTableau {
    rows: Vec<Vec<BigInt>>,
    /// `det` times the reduced costs; the last entry is minus the objective
    obj: Vec<BigInt>,
    det: BigInt,
    basis: Vec<usize>,
    unit: Vec<usize>,
    /// structural costs scaled to integers by a positive factor
    costs: Vec<BigInt>,
    structural: usize,
    artificial_start: usize,
    ncols: usize,
}

fn lcm_of_denominators<'a>(values: impl Iterator<Item = &'a BigRational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

impl ExactTableau {
    fn new(form: &StandardForm) -> Self {
        // scale each row's structural part and right-hand side to integers;
        // slack and artificial entries stay at +-1 (this rescales those
        // variables only)
        let rows = form
            .rows
            .iter()
            .map(|row| {
                let scale = lcm_of_denominators(row[..form.structural].iter().chain(std::iter::once(&row[form.ncols])));
                row.iter()
                    .enumerate()
                    .map(|(j, v)| {
                        if j < form.structural || j == form.ncols {
                            (v * &scale).to_integer()
                        } else {
                            v.to_integer()
                        }
                    })
                    .collect()
            })
            .collect();
        let scale = lcm_of_denominators(form.costs.iter());
        let costs = form.costs.iter().map(|c| (c * &scale).to_integer()).collect();
        ExactTableau {
            rows,
            obj: Vec::new(),
            det: BigInt::one(),
            basis: form.basis.clone(),
            unit: form.basis.clone(),
            costs,
            structural: form.structural,
            artificial_start: form.artificial_start,
            ncols: form.ncols,
        }
    }

    /// Sign of the true value `x / det`.
    fn sign(&self, x: &BigInt) -> Ordering {
        let s = x.sign_cmp();
        if self.det.is_negative() {
            s.reverse()
        } else {
            s
        }
    }

    /// Pivots the given columns into the basis wherever they are exactly
    /// independent.
    fn crash(&mut self, target: &[usize]) {
        let wanted: BTreeSet<usize> = target.iter().copied().collect();
        for &j in target {
            if self.basis.contains(&j) {
                continue;
            }
            let r = (0..self.rows.len()).find(|&r| !wanted.contains(&self.basis[r]) && !self.rows[r][j].is_zero());
            if let Some(r) = r {
                self.pivot(r, j);
            }
        }
    }

    /// Restores a feasible basis after [`Self::crash`]: a new artificial
    /// column with entry `-1` in every row whose basic value is negative is
    /// pivoted in on the most negative row, which leaves every basic value
    /// nonnegative. Phase one then drives it back to zero.
    fn repair(&mut self) {
        let n = self.ncols;
        let negative: Vec<usize> = (0..self.rows.len()).filter(|&i| self.sign(&self.rows[i][n]) == Ordering::Less).collect();
        let Some(&worst) = negative.iter().min_by(|&&i, &&k| {
            // true values rows[.][n] / det, compared without dividing
            let c = self.rows[i][n].cmp(&self.rows[k][n]);
            if self.det.is_negative() {
                c.reverse()
            } else {
                c
            }
        }) else {
            return;
        };
        trace!("repairing {} infeasible rows", negative.len());
        let minus_det = -self.det.clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            let entry = if negative.contains(&i) { minus_det.clone() } else { BigInt::zero() };
            row.insert(n, entry);
        }
        self.ncols += 1;
        self.pivot(worst, n);
    }

    fn structural_values(&self) -> Vec<BigRational> {
        let mut values = vec![BigRational::zero(); self.structural];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.structural {
                values[b] = BigRational::new(self.rows[i][self.ncols].clone(), self.det.clone());
            }
        }
        values
    }
}

trait SignCmp {
    fn sign_cmp(&self) -> Ordering;
}

impl SignCmp for BigInt {
    fn sign_cmp(&self) -> Ordering {
        match self.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

impl Simplex for ExactTableau {
    const EXACT: bool = true;

    fn rows(&self) -> usize {
        self.rows.len()
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn artificial_start(&self) -> usize {
        self.artificial_start
    }
    fn basis(&self) -> &[usize] {
        &self.basis
    }
    fn reduced_negative(&self, j: usize) -> bool {
        self.sign(&self.obj[j]) == Ordering::Less
    }
    fn reduced_below(&self, j: usize, k: usize) -> bool {
        if self.det.is_negative() {
            self.obj[j] > self.obj[k]
        } else {
            self.obj[j] < self.obj[k]
        }
    }
    fn entry_positive(&self, i: usize, j: usize) -> bool {
        self.sign(&self.rows[i][j]) == Ordering::Greater
    }
    fn entry_nonzero(&self, i: usize, j: usize) -> bool {
        !self.rows[i][j].is_zero()
    }
    fn compare_ratio(&self, i: usize, k: usize, col: usize) -> Ordering {
        // both column entries share the sign of det, so their product is
        // positive and cross-multiplying keeps the order
        let n = self.ncols;
        (&self.rows[i][n] * &self.rows[k][col]).cmp(&(&self.rows[k][n] * &self.rows[i][col]))
    }
    fn rhs_zero(&self, i: usize) -> bool {
        self.rows[i][self.ncols].is_zero()
    }
    fn lex_less(&self, i: usize, k: usize, col: usize) -> bool {
        for &u in &self.unit {
            match (&self.rows[i][u] * &self.rows[k][col]).cmp(&(&self.rows[k][u] * &self.rows[i][col])) {
                Ordering::Less => return true,
                Ordering::Greater => return false,
                Ordering::Equal => {}
            }
        }
        false
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        let prow = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| !prow[j].is_zero()).collect();
        let det = &self.det;
        let update = |row: &mut Vec<BigInt>| {
            let factor = row[c].clone();
            if factor.is_zero() {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = &*v * &p / det;
                    }
                }
            } else {
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = &*v * &p;
                    }
                }
                for &j in &nz {
                    row[j] -= &factor * &prow[j];
                }
                for v in row.iter_mut() {
                    if !v.is_zero() {
                        *v = &*v / det;
                    }
                }
            }
        };
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i != r {
                update(row);
            }
        }
        if !self.obj.is_empty() {
            update(&mut self.obj);
        }
        self.rows[r] = prow;
        self.det = p;
        self.basis[r] = c;
    }

    fn price(&mut self, phase_one: bool) {
        let cost = |j: usize| -> BigInt {
            if phase_one {
                if j >= self.artificial_start && j < self.ncols {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            } else if j < self.structural {
                self.costs[j].clone()
            } else {
                BigInt::zero()
            }
        };
        let mut obj: Vec<BigInt> = (0..=self.ncols).map(|j| if j < self.ncols { &self.det * cost(j) } else { BigInt::zero() }).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost(self.basis[i]);
            if cb.is_zero() {
                continue;
            }
            for (o, a) in obj.iter_mut().zip(row) {
                if !a.is_zero() {
                    *o -= &cb * a;
                }
            }
        }
        self.obj = obj;
    }

    fn objective_zero(&self) -> bool {
        self.obj[self.ncols].is_zero()
    }
}

const TOL: f64 = 1e-9;

/// Floating-point tableau used only to guess an optimal basis. Rows and
/// columns are equilibrated first; scaling leaves bases unchanged.
struct FloatTableau {
    rows: Vec<Vec<f64>>,
    obj: Vec<f64>,
    basis: Vec<usize>,
    unit: Vec<usize>,
    costs: Vec<f64>,
    structural: usize,
    artificial_start: usize,
    ncols: usize,
}

impl FloatTableau {
    fn new(form: &StandardForm) -> Option<Self> {
        let to_f64 = |v: &BigRational| v.to_f64().filter(|x| x.is_finite());
        let mut rows = Vec::with_capacity(form.rows.len());
        for row in &form.rows {
            rows.push(row.iter().map(to_f64).collect::<Option<Vec<f64>>>()?);
        }
        let mut costs = form.costs.iter().map(to_f64).collect::<Option<Vec<f64>>>()?;
        for row in &mut rows {
            let top = row[..form.ncols].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if top > 0.0 {
                row.iter_mut().for_each(|v| *v /= top);
            }
        }
        for j in 0..form.ncols {
            let top = rows.iter().fold(0.0f64, |m, r| m.max(r[j].abs()));
            if top > 0.0 {
                rows.iter_mut().for_each(|r| r[j] /= top);
                if j < form.structural {
                    costs[j] /= top;
                }
            }
        }
        let top = costs.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if top > 0.0 {
            costs.iter_mut().for_each(|v| *v /= top);
        }
        Some(FloatTableau {
            rows,
            obj: Vec::new(),
            basis: form.basis.clone(),
            unit: form.basis.clone(),
            costs,
            structural: form.structural,
            artificial_start: form.artificial_start,
            ncols: form.ncols,
        })
    }

    /// The final basis, if the float solve reaches an optimum.
    fn optimal_basis(form: &StandardForm) -> Option<Vec<usize>> {
        let mut t = FloatTableau::new(form)?;
        let cap = 20 * (t.rows.len() + t.ncols) + 1000;
        let st = t.run(cap);
        (st == Status::Optimal).then_some(t.basis)
    }
}

fn snap(v: f64) -> f64 {
    if v.abs() <= TOL {
        0.0
    } else {
        v
    }
}

impl Simplex for FloatTableau {
    const EXACT: bool = false;

    fn rows(&self) -> usize {
        self.rows.len()
    }
    fn ncols(&self) -> usize {
        self.ncols
    }
    fn artificial_start(&self) -> usize {
        self.artificial_start
    }
    fn basis(&self) -> &[usize] {
        &self.basis
    }
    fn reduced_negative(&self, j: usize) -> bool {
        self.obj[j] < -TOL
    }
    fn reduced_below(&self, j: usize, k: usize) -> bool {
        self.obj[j] < self.obj[k]
    }
    fn entry_positive(&self, i: usize, j: usize) -> bool {
        self.rows[i][j] > TOL
    }
    fn entry_nonzero(&self, i: usize, j: usize) -> bool {
        self.rows[i][j].abs() > TOL
    }
    fn compare_ratio(&self, i: usize, k: usize, col: usize) -> Ordering {
        let n = self.ncols;
        let a = self.rows[i][n] / self.rows[i][col];
        let b = self.rows[k][n] / self.rows[k][col];
        a.partial_cmp(&b).unwrap_or(Ordering::Equal)
    }
    fn rhs_zero(&self, i: usize) -> bool {
        self.rows[i][self.ncols].abs() <= TOL
    }
    fn lex_less(&self, i: usize, k: usize, col: usize) -> bool {
        for &u in &self.unit {
            let a = self.rows[i][u] / self.rows[i][col];
            let b = self.rows[k][u] / self.rows[k][col];
            if a < b - TOL {
                return true;
            }
            if b < a - TOL {
                return false;
            }
        }
        self.basis[i] < self.basis[k]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = 1.0 / self.rows[r][c];
        let mut prow = std::mem::take(&mut self.rows[r]);
        prow.iter_mut().for_each(|a| *a = snap(*a * inv));
        prow[c] = 1.0;
        let nz: Vec<usize> = (0..prow.len()).filter(|&j| prow[j] != 0.0).collect();
        for row in self.rows.iter_mut().chain(std::iter::once(&mut self.obj)) {
            if row.is_empty() || row[c] == 0.0 {
                continue;
            }
            let factor = row[c];
            for &j in &nz {
                row[j] = snap(row[j] - factor * prow[j]);
            }
            row[c] = 0.0;
        }
        self.rows[r] = prow;
        self.basis[r] = c;
    }

    fn price(&mut self, phase_one: bool) {
        let cost = |j: usize| {
            if phase_one {
                if j >= self.artificial_start && j < self.ncols {
                    1.0
                } else {
                    0.0
                }
            } else if j < self.structural {
                self.costs[j]
            } else {
                0.0
            }
        };
        let mut obj: Vec<f64> = (0..=self.ncols).map(|j| if j < self.ncols { cost(j) } else { 0.0 }).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let cb = cost(self.basis[i]);
            if cb != 0.0 {
                for (o, a) in obj.iter_mut().zip(row) {
                    *o -= cb * a;
                }
            }
        }
        self.obj = obj.into_iter().map(snap).collect();
    }

    fn objective_zero(&self) -> bool {
        self.obj[self.ncols].abs() <= TOL
    }
}

/// Where the exact simplex starts. Only `Float` is used outside tests; the
/// others pin the exact-only and the crash-and-repair paths.
#[cfg_attr(not(test), allow(dead_code))]
enum Start {
    Float,
    Cold,
    Basis(Vec<usize>),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_frac(n, d)
    }

    fn int(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn textbook_maximization() {
        // max 3x + 5y s.t. x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg(int(3));
        let y = lp.add_nonneg(int(5));
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(4));
        lp.add_constraint(vec![(y, int(2))], Relation::Le, int(12));
        lp.add_constraint(vec![(x, int(3)), (y, int(2))], Relation::Le, int(18));
        match lp.solve() {
            LpOutcome::Optimal { value, x: sol } => {
                assert_eq!(value, int(36));
                assert_eq!(sol, vec![int(2), int(6)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_free_variables() {
        // min x + y, x - y = 1/2, x free, y >= 1/3  ->  x = 5/6, y = 1/3
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_free(int(1));
        let y = lp.add_nonneg(int(1));
        lp.add_constraint(vec![(x, int(1)), (y, int(-1))], Relation::Eq, q(1, 2));
        lp.add_constraint(vec![(y, int(1))], Relation::Ge, q(1, 3));
        let out = lp.solve();
        assert_eq!(out, LpOutcome::Optimal { value: q(7, 6), x: vec![q(5, 6), q(1, 3)] });
    }

    #[test]
    fn negative_free_optimum() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_free(int(1));
        lp.add_constraint(vec![(x, int(1))], Relation::Ge, int(-7));
        assert_eq!(lp.solve().value(Sense::Minimize), Extended::Finite(int(-7)));
    }

    #[test]
    fn infeasible_and_unbounded() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_nonneg(int(1));
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(-1));
        assert_eq!(lp.solve(), LpOutcome::Infeasible);
        assert_eq!(lp.solve().value(Sense::Minimize), Extended::PosInf);

        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg(int(1));
        let y = lp.add_nonneg(int(0));
        lp.add_constraint(vec![(x, int(1)), (y, int(-1))], Relation::Le, int(1));
        assert_eq!(lp.solve(), LpOutcome::Unbounded);
        assert_eq!(lp.solve().value(Sense::Maximize), Extended::PosInf);
    }

    #[test]
    fn redundant_equalities_are_dropped() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg(int(1));
        let y = lp.add_nonneg(int(2));
        lp.add_constraint(vec![(x, int(1)), (y, int(1))], Relation::Eq, int(1));
        lp.add_constraint(vec![(x, int(2)), (y, int(2))], Relation::Eq, int(2));
        lp.add_constraint(vec![(x, int(-1)), (y, int(-1))], Relation::Eq, int(-1));
        assert_eq!(lp.solve(), LpOutcome::Optimal { value: int(2), x: vec![int(0), int(1)] });
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the largest-coefficient rule.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let v: Vec<usize> = [q(-3, 4), int(150), q(-1, 50), int(6)]
            .into_iter()
            .map(|c| lp.add_nonneg(c))
            .collect();
        lp.add_constraint(
            vec![(v[0], q(1, 4)), (v[1], int(-60)), (v[2], q(-1, 25)), (v[3], int(9))],
            Relation::Le,
            int(0),
        );
        lp.add_constraint(
            vec![(v[0], q(1, 2)), (v[1], int(-90)), (v[2], q(-1, 50)), (v[3], int(3))],
            Relation::Le,
            int(0),
        );
        lp.add_constraint(vec![(v[2], int(1))], Relation::Le, int(1));
        assert_eq!(lp.solve().value(Sense::Minimize), Extended::Finite(q(-1, 20)));
    }

    #[test]
    fn fixed_width_field() {
        use num_rational::Ratio;
        let mut lp: LinearProgram<Ratio<i64>> = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg(Ratio::from_integer(1));
        lp.add_constraint(vec![(x, Ratio::from_integer(3))], Relation::Le, Ratio::from_integer(2));
        assert_eq!(lp.solve().value(Sense::Maximize), Extended::Finite(Ratio::new(2, 3)));
    }

    type Row2 = ([i64; 2], i64);

    fn small_lp(cost: [i64; 2], rows: &[Row2]) -> LinearProgram<Rational> {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_nonneg(int(cost[0]));
        let y = lp.add_nonneg(int(cost[1]));
        for (a, b) in rows {
            lp.add_constraint(vec![(x, int(a[0])), (y, int(a[1]))], Relation::Le, int(*b));
        }
        // box keeps every instance bounded
        lp.add_constraint(vec![(x, int(1))], Relation::Le, int(10));
        lp.add_constraint(vec![(y, int(1))], Relation::Le, int(10));
        lp
    }

    // vertex enumeration: every pair of tight lines, kept if feasible
    fn brute_force(cost: [i64; 2], rows: &[Row2]) -> Option<Rational> {
        let mut lines: Vec<([i64; 2], i64)> = rows.to_vec();
        lines.extend([([1, 0], 10), ([0, 1], 10), ([-1, 0], 0), ([0, -1], 0)]);
        let mut best: Option<Rational> = None;
        for i in 0..lines.len() {
            for k in i + 1..lines.len() {
                let ([a, b], e) = lines[i];
                let ([c, d], f) = lines[k];
                let det = a * d - b * c;
                if det == 0 {
                    continue;
                }
                let px = q(e * d - b * f, det);
                let py = q(a * f - e * c, det);
                let feasible = lines.iter().all(|([u, v], w)| int(*u) * &px + int(*v) * &py <= int(*w));
                if feasible {
                    let val = int(cost[0]) * &px + int(cost[1]) * &py;
                    if best.as_ref().is_none_or(|b| val > *b) {
                        best = Some(val);
                    }
                }
            }
        }
        best
    }

    fn row() -> impl proptest::strategy::Strategy<Value = Row2> {
        use proptest::prelude::*;
        (prop::array::uniform2(-4i64..=4), -6i64..=12)
    }

    proptest::proptest! {
        #[test]
        fn starts_agree_with_vertex_enumeration(
            cost in proptest::array::uniform2(-5i64..=5),
            rows in proptest::collection::vec(row(), 1..5),
            hint in proptest::collection::vec(0usize..4, 0..3),
        ) {
            let lp = small_lp(cost, &rows);
            let expected = match brute_force(cost, &rows) {
                Some(v) => Extended::Finite(v),
                None => Extended::NegInf,
            };
            // structural columns 0 and 1, then the slacks of the first rows
            let hint: Vec<usize> = hint.into_iter().filter(|&j| j < 2 + rows.len()).collect();
            for start in [Start::Float, Start::Cold, Start::Basis(vec![0, 1]), Start::Basis(hint.clone())] {
                let out = lp.solve_from(start);
                if let LpOutcome::Optimal { x, .. } = &out {
                    proptest::prop_assert!(lp.is_feasible(x));
                }
                proptest::prop_assert_eq!(out.value(Sense::Maximize), expected.clone());
            }
        }
    }

    #[test]
    fn infeasible_crash_is_repaired() {
        // with both box rows tight the crash basis sits at (10, 10), outside x + y <= 4
        let rows = [([1, 1], 4), ([0, -1], 6)];
        let lp = small_lp([1, 2], &rows);
        let cold = lp.solve_from(Start::Cold);
        assert_eq!(lp.solve_from(Start::Basis(vec![0, 1, 2, 3])), cold);
        assert_eq!(cold.value(Sense::Maximize), Extended::Finite(int(8)));
    }
}
