//! Superhedging prices: the primal strategy LP, the dual LP over node
//! state-price vectors, certificate checks, and the full duality report.
//!
//! A state-price vector `m(v)` is `Q(v) Z_t(v)`: the path probability times
//! a consistent price. In these variables the supermartingale condition
//! `E_Q[y . dZ] <= 0` for `y in C_t` is linear.

use std::collections::BTreeMap;
use std::fmt;

pub mod semistatic;

use crate::cone::PolyhedralCone;
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::market::{MarketSpec, NodeId, OptionQuote};
use crate::positions::{dot_expr, eval_expr, Expr, TransferVars};
use crate::recursion::{
    backward_dual_cones, interior_diagnostic, strict_arbitrage_search, tilde_decomposition_check,
    InteriorDiagnostic, NaVerdict, RecursionResult,
};
use crate::scalar::{Extended, Scalar};
use crate::vector::Vector;

/// Which cones carry the transfers (primal) or state prices (dual).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConeChoice {
    /// The market's solvency cones `K_t` and their duals.
    K,
    /// The reduced cones of the backward recursion.
    KTilde,
}

impl ConeChoice {
    pub fn name(self) -> &'static str {
        match self {
            ConeChoice::K => "K",
            ConeChoice::KTilde => "K-tilde",
        }
    }
}

/// Primal cones for `choice`: `K_t` or `Kt_t`.
pub fn primal_cones<F: Scalar>(
    spec: &MarketSpec<F>,
    choice: ConeChoice,
    recursion: Option<&RecursionResult<F>>,
) -> Vec<PolyhedralCone<F>> {
    match choice {
        ConeChoice::K => spec.solvency_cones().to_vec(),
        ConeChoice::KTilde => match recursion {
            Some(r) => r.tilde_primal.clone(),
            None => backward_dual_cones(spec).tilde_primal,
        },
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HedgingStrategy<F: Scalar> {
    /// Initial capital in units of the numeraire.
    pub y: F,
    /// `k_t(v)` at non-polar nodes.
    pub transfers: BTreeMap<NodeId, Vector<F>>,
    /// `eta_t(v) = -(k_0 + ... + k_t)` at non-polar nodes.
    pub positions: BTreeMap<NodeId, Vector<F>>,
    /// Static holdings: buy quantities of each option, then sell quantities.
    pub statics: Vec<F>,
}

#[derive(Clone, Debug)]
pub struct PrimalResult<F: Scalar> {
    pub value: Extended<F>,
    pub strategy: Option<HedgingStrategy<F>>,
}

/// Static columns `phi_k - a_k e_d` (buy) and `-phi_k + b_k e_d` (sell).
pub(crate) fn static_columns<F: Scalar>(spec: &MarketSpec<F>, options: &[OptionQuote<F>]) -> Vec<Vec<Vector<F>>> {
    let d = spec.dim();
    let mut cols = Vec::with_capacity(2 * options.len());
    for o in options {
        cols.push(o.payoff.iter().map(|p| {
            let mut c = p.clone();
            c[d - 1] = c[d - 1].clone() - o.ask.clone();
            c
        }).collect());
    }
    for o in options {
        cols.push(o.payoff.iter().map(|p| {
            let mut c = p.neg();
            c[d - 1] = c[d - 1].clone() + o.bid.clone();
            c
        }).collect());
    }
    cols
}

/// Minimizes `y` subject to `y e_d + eta_T + Phi alpha - G in K_T` at the
/// non-polar leaves, with `k_t(v)` in `cones[v]` and `eta_t(v) in C_t(v)`.
pub fn primal_superhedge_with<F: Scalar>(
    spec: &MarketSpec<F>,
    cones: &[PolyhedralCone<F>],
    options: &[OptionQuote<F>],
) -> PrimalResult<F> {
    let tree = spec.tree();
    let polar = spec.polar();
    let d = spec.dim();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let y = lp.add_free(F::one());
    let transfers = TransferVars::new(&mut lp, tree, cones, |v| polar.is_non_polar(v));
    let columns = static_columns(spec, options);
    let alpha: Vec<usize> = columns.iter().map(|_| lp.add_nonneg(F::zero())).collect();
    let mut positions = Vec::new();
    for v in polar.non_polar_nodes() {
        let eta = transfers.position(tree, v);
        for n in spec.constraint(v).halfspaces() {
            lp.add_constraint(dot_expr(n, &eta), Relation::Ge, F::zero());
        }
        if tree.node(v).is_leaf() {
            for n in spec.solvency(v).halfspaces() {
                let mut row = dot_expr(n, &eta);
                row.push((y, n[d - 1].clone()));
                for (col, &a) in columns.iter().zip(&alpha) {
                    row.push((a, n.dot(&col[v])));
                }
                lp.add_constraint(row, Relation::Ge, n.dot(spec.payoff(v)));
            }
        }
        positions.push((v, eta));
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } => {
            let strategy = HedgingStrategy {
                y: x[y].clone(),
                transfers: positions
                    .iter()
                    .map(|(v, _)| (*v, transfers.transfer_value(&x, *v).expect("active node")))
                    .collect(),
                positions: positions.iter().map(|(v, e)| (*v, eval_expr(e, &x))).collect(),
                statics: alpha.iter().map(|&a| x[a].clone()).collect(),
            };
            PrimalResult { value: Extended::Finite(value), strategy: Some(strategy) }
        }
        LpOutcome::Infeasible => PrimalResult { value: Extended::PosInf, strategy: None },
        LpOutcome::Unbounded => PrimalResult { value: Extended::NegInf, strategy: None },
    }
}

pub fn primal_superhedge<F: Scalar>(
    spec: &MarketSpec<F>,
    choice: ConeChoice,
    recursion: Option<&RecursionResult<F>>,
) -> PrimalResult<F> {
    primal_superhedge_with(spec, &primal_cones(spec, choice, recursion), &[])
}

/// Where a certificate check failed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: String,
    pub what: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at node {}", self.what, self.node)
    }
}

impl std::error::Error for Violation {}

fn violation<F: Scalar>(spec: &MarketSpec<F>, v: NodeId, what: &str) -> Violation {
    Violation { node: spec.tree().node(v).id.clone(), what: what.to_string() }
}

/// Re-checks a strategy against explicit transfer cones and option quotes.
pub fn verify_superhedge_with<F: Scalar>(
    spec: &MarketSpec<F>,
    cones: &[PolyhedralCone<F>],
    options: &[OptionQuote<F>],
    strategy: &HedgingStrategy<F>,
) -> Result<(), Violation> {
    let tree = spec.tree();
    let polar = spec.polar();
    let d = spec.dim();
    let columns = static_columns(spec, options);
    if strategy.statics.len() != columns.len() || strategy.statics.iter().any(|a| a.is_negative()) {
        return Err(violation(spec, tree.root(), "static holdings are malformed"));
    }
    let zero = Vector::zeros(d);
    for v in polar.non_polar_nodes() {
        let k = strategy.transfers.get(&v).unwrap_or(&zero);
        if k.dim() != d || !cones[v].contains(k) {
            return Err(violation(spec, v, "transfer outside the solvency cone"));
        }
        let mut eta = Vector::zeros(d);
        for a in tree.path(v) {
            eta = eta.sub(strategy.transfers.get(&a).unwrap_or(&zero));
        }
        if strategy.positions.get(&v).is_some_and(|p| *p != eta) {
            return Err(violation(spec, v, "position does not match the transfers"));
        }
        if !spec.constraint(v).contains(&eta) {
            return Err(violation(spec, v, "position violates the portfolio constraint"));
        }
        if tree.node(v).is_leaf() {
            let mut terminal = eta.sub(spec.payoff(v));
            terminal[d - 1] = terminal[d - 1].clone() + strategy.y.clone();
            for (col, a) in columns.iter().zip(&strategy.statics) {
                terminal.add_scaled(a, &col[v]);
            }
            if !spec.solvency(v).contains(&terminal) {
                return Err(violation(spec, v, "terminal position is not solvent"));
            }
        }
    }
    Ok(())
}

/// Re-checks every strategy invariant with transfers in `K_t`.
pub fn verify_superhedge<F: Scalar>(spec: &MarketSpec<F>, strategy: &HedgingStrategy<F>) -> Result<(), Violation> {
    verify_superhedge_with(spec, spec.solvency_cones(), spec.options(), strategy)
}

/// Node state-price vectors at the non-polar nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceSystem<F: Scalar> {
    pub m: BTreeMap<NodeId, Vector<F>>,
}

#[derive(Clone, Debug)]
pub struct DualResult<F: Scalar> {
    pub value: Extended<F>,
    pub price_system: Option<PriceSystem<F>>,
}

/// Dual cones for `choice`: `K_t*` or `Kt_t*`.
pub fn dual_cones<F: Scalar>(
    spec: &MarketSpec<F>,
    choice: ConeChoice,
    recursion: Option<&RecursionResult<F>>,
) -> Vec<PolyhedralCone<F>> {
    match choice {
        ConeChoice::K => spec.solvency_cones().iter().map(|k| k.dual()).collect(),
        ConeChoice::KTilde => match recursion {
            Some(r) => r.tilde_dual.clone(),
            None => backward_dual_cones(spec).tilde_dual,
        },
    }
}

/// The dual feasible set without option quotes: `m(v)` as a nonnegative
/// combination of the generators of `dual_cones[v]`, the root numeraire
/// normalization, the numeraire martingale and the constrained
/// supermartingale rows. With `priced`, the objective is `sum G(l) . m(l)`.
pub(crate) fn dual_program<F: Scalar>(
    spec: &MarketSpec<F>,
    dual_cones: &[PolyhedralCone<F>],
    priced: bool,
) -> (LinearProgram<F>, BTreeMap<NodeId, Expr<F>>) {
    let tree = spec.tree();
    let polar = spec.polar();
    let d = spec.dim();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let nodes = polar.non_polar_nodes();
    let mut vars: BTreeMap<NodeId, Expr<F>> = BTreeMap::new();
    for &v in &nodes {
        let leaf = tree.node(v).is_leaf();
        let mut expr: Expr<F> = vec![Vec::new(); d];
        for g in dual_cones[v].generators() {
            let cost = if leaf && priced { spec.payoff(v).dot(g) } else { F::zero() };
            let lam = lp.add_nonneg(cost);
            for (i, c) in g.iter().enumerate() {
                if !c.is_zero() {
                    expr[i].push((lam, c.clone()));
                }
            }
        }
        vars.insert(v, expr);
    }
    for &v in &nodes {
        let m = &vars[&v];
        if v == tree.root() {
            lp.add_constraint(m[d - 1].clone(), Relation::Eq, F::one());
        }
        if tree.node(v).is_leaf() {
            continue;
        }
        let charged: Vec<&Expr<F>> = tree.charged_children(v).iter().map(|c| &vars[c]).collect();
        let mut numeraire: Vec<(usize, F)> = m[d - 1].iter().map(|(i, c)| (*i, -c.clone())).collect();
        for c in &charged {
            numeraire.extend(c[d - 1].iter().cloned());
        }
        lp.add_constraint(numeraire, Relation::Eq, F::zero());
        for y in spec.constraint(v).generators() {
            let mut row: Vec<(usize, F)> = dot_expr(y, m).into_iter().map(|(i, c)| (i, -c)).collect();
            for c in &charged {
                row.extend(dot_expr(y, c));
            }
            lp.add_constraint(row, Relation::Le, F::zero());
        }
    }
    (lp, vars)
}

/// `sum_l phi(l) . m(l)` over the non-polar leaves.
pub(crate) fn option_value_row<F: Scalar>(
    spec: &MarketSpec<F>,
    vars: &BTreeMap<NodeId, Expr<F>>,
    option: &OptionQuote<F>,
) -> Vec<(usize, F)> {
    let mut row = Vec::new();
    for &l in spec.tree().leaves() {
        if let Some(m) = vars.get(&l) {
            row.extend(dot_expr(&option.payoff[l], m));
        }
    }
    row
}

/// Maximizes `sum G(l) . m(l)` over price systems with `m(v)` in
/// `dual_cones[v]` and option valuations in the closed quote intervals.
pub fn dual_scps_with<F: Scalar>(
    spec: &MarketSpec<F>,
    dual_cones: &[PolyhedralCone<F>],
    options: &[OptionQuote<F>],
) -> DualResult<F> {
    let (mut lp, vars) = dual_program(spec, dual_cones, true);
    for o in options {
        let row = option_value_row(spec, &vars, o);
        lp.add_constraint(row.clone(), Relation::Ge, o.bid.clone());
        lp.add_constraint(row, Relation::Le, o.ask.clone());
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } => {
            let m = vars.iter().map(|(v, expr)| (*v, eval_expr(expr, &x))).collect();
            DualResult { value: Extended::Finite(value), price_system: Some(PriceSystem { m }) }
        }
        LpOutcome::Infeasible => DualResult { value: Extended::NegInf, price_system: None },
        LpOutcome::Unbounded => DualResult { value: Extended::PosInf, price_system: None },
    }
}

pub fn dual_scps<F: Scalar>(
    spec: &MarketSpec<F>,
    choice: ConeChoice,
    recursion: Option<&RecursionResult<F>>,
) -> DualResult<F> {
    dual_scps_with(spec, &dual_cones(spec, choice, recursion), &[])
}

/// Checks the price-system invariants against explicit dual cones.
pub fn check_price_system<F: Scalar>(
    spec: &MarketSpec<F>,
    dual_cones: &[PolyhedralCone<F>],
    m: &PriceSystem<F>,
) -> Result<(), Violation> {
    let tree = spec.tree();
    let polar = spec.polar();
    let d = spec.dim();
    for v in polar.non_polar_nodes() {
        let mv = m.m.get(&v).ok_or_else(|| violation(spec, v, "missing state-price vector"))?;
        if !dual_cones[v].contains(mv) {
            return Err(violation(spec, v, "state prices outside the dual cone"));
        }
        if v == tree.root() && !mv[d - 1].is_one() {
            return Err(violation(spec, v, "numeraire not normalized at the root"));
        }
        if tree.node(v).is_leaf() {
            continue;
        }
        let mut sum = Vector::zeros(d);
        for c in tree.charged_children(v) {
            sum = sum.add(m.m.get(&c).ok_or_else(|| violation(spec, c, "missing state-price vector"))?);
        }
        if sum[d - 1] != mv[d - 1] {
            return Err(violation(spec, v, "numeraire is not a martingale"));
        }
        let drift = sum.sub(mv);
        if spec.constraint(v).generators().iter().any(|y| y.dot(&drift).is_positive()) {
            return Err(violation(spec, v, "constrained supermartingale condition fails"));
        }
    }
    Ok(())
}

/// A price system in probability-and-price form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scps<F: Scalar> {
    /// `Z_t(v) = m(v) / m^d(v)` where the node carries mass.
    pub z: BTreeMap<NodeId, Vector<F>>,
    /// `Q` on the non-polar leaves.
    pub q: BTreeMap<NodeId, F>,
    /// `E_Q[G . Z_T]`.
    pub expectation: F,
}

pub fn recover_scps<F: Scalar>(spec: &MarketSpec<F>, m: &PriceSystem<F>) -> Result<Scps<F>, Violation> {
    check_price_system(spec, &dual_cones(spec, ConeChoice::K, None), m)?;
    let tree = spec.tree();
    let d = spec.dim();
    let mut z = BTreeMap::new();
    for (&v, mv) in &m.m {
        if mv[d - 1].is_positive() {
            z.insert(v, mv.scale(&(F::one() / mv[d - 1].clone())));
        } else if !mv.is_zero() {
            return Err(violation(spec, v, "prices without probability mass"));
        }
    }
    let mut q = BTreeMap::new();
    let mut total = F::zero();
    let mut expectation = F::zero();
    let mut direct = F::zero();
    for &l in tree.leaves() {
        if let Some(ml) = m.m.get(&l) {
            let p = ml[d - 1].clone();
            total = total + p.clone();
            if let Some(zl) = z.get(&l) {
                expectation = expectation + p.clone() * spec.payoff(l).dot(zl);
            }
            direct = direct + spec.payoff(l).dot(ml);
            q.insert(l, p);
        }
    }
    if !total.is_one() || expectation != direct {
        return Err(violation(spec, tree.root(), "leaf probabilities do not form a measure"));
    }
    Ok(Scps { z, q, expectation })
}

pub(crate) fn gap<F: Scalar>(primal: &Extended<F>, dual: &Extended<F>) -> Option<F> {
    match (primal, dual) {
        (Extended::Finite(p), Extended::Finite(q)) => Some(p.clone() - q.clone()),
        _ => None,
    }
}

/// The full duality chain for one market.
#[derive(Clone, Debug)]
pub struct DualityReport<F: Scalar> {
    pub na: NaVerdict<F>,
    pub interior: InteriorDiagnostic,
    pub decomposition_holds: bool,
    /// Prices and certificates; skipped under strict arbitrage.
    pub pricing: Option<PricingReport<F>>,
}

#[derive(Clone, Debug)]
pub struct PricingReport<F: Scalar> {
    pub primal_k: PrimalResult<F>,
    pub primal_tilde: PrimalResult<F>,
    pub dual_tilde: DualResult<F>,
    pub dual_k: DualResult<F>,
    /// `primal_k - dual_tilde` when both are finite.
    pub gap: Option<F>,
    pub reduction_identity: bool,
    pub duals_agree: bool,
    pub strategy_check: Option<Result<(), Violation>>,
    pub price_system_check: Option<Result<(), Violation>>,
}

impl<F: Scalar> PricingReport<F> {
    /// Every asserted identity holds.
    pub fn consistent(&self) -> bool {
        let finite_gap_zero = match &self.gap {
            Some(g) => g.is_zero(),
            None => self.primal_k.value == self.dual_tilde.value,
        };
        finite_gap_zero
            && self.reduction_identity
            && self.duals_agree
            && self.strategy_check.as_ref().is_none_or(|r| r.is_ok())
            && self.price_system_check.as_ref().is_none_or(|r| r.is_ok())
    }
}

impl<F: Scalar> DualityReport<F> {
    /// All asserted identities hold (vacuously true under strict arbitrage).
    pub fn consistent(&self) -> bool {
        match &self.pricing {
            None => !self.na.passes(),
            Some(p) => p.consistent() && self.interior.necessary_condition_holds(),
        }
    }
}

/// Prices `spec` (with its options, if any) with both cone families on both
/// sides and cross-checks the results.
pub fn pricing_report<F: Scalar>(spec: &MarketSpec<F>, recursion: &RecursionResult<F>) -> PricingReport<F> {
    let options = spec.options();
    let primal_k = primal_superhedge_with(spec, spec.solvency_cones(), options);
    let primal_tilde = primal_superhedge_with(spec, &recursion.tilde_primal, options);
    let k_duals = dual_cones(spec, ConeChoice::K, None);
    let dual_tilde = dual_scps_with(spec, &recursion.tilde_dual, options);
    let dual_k = dual_scps_with(spec, &k_duals, options);
    let gap = gap(&primal_k.value, &dual_tilde.value);
    let reduction_identity = primal_k.value == primal_tilde.value;
    let duals_agree = dual_k.value == dual_tilde.value;
    let strategy_check = primal_k
        .strategy
        .as_ref()
        .map(|s| verify_superhedge_with(spec, spec.solvency_cones(), options, s));
    let price_system_check =
        dual_tilde.price_system.as_ref().map(|m| check_price_system(spec, &recursion.tilde_dual, m));
    PricingReport {
        primal_k,
        primal_tilde,
        dual_tilde,
        dual_k,
        gap,
        reduction_identity,
        duals_agree,
        strategy_check,
        price_system_check,
    }
}

pub fn duality_report<F: Scalar>(spec: &MarketSpec<F>) -> DualityReport<F> {
    let recursion = backward_dual_cones(spec);
    let na = strict_arbitrage_search(spec);
    let interior = interior_diagnostic(&recursion);
    let decomposition_holds = tilde_decomposition_check(&recursion, spec);
    let pricing = na.passes().then(|| pricing_report(spec, &recursion));
    DualityReport { na, interior, decomposition_holds, pricing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{instance_a, instance_b, na2_counterexample};
    use crate::market::TreeBuilder;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_frac(n, d)
    }

    fn fin(n: i64, d: i64) -> Extended<Rational> {
        Extended::Finite(q(n, d))
    }

    #[test]
    fn instance_a_prices() {
        let spec = instance_a();
        let p = primal_superhedge(&spec, ConeChoice::K, None);
        assert_eq!(p.value, fin(2, 1));
        assert!(verify_superhedge(&spec, p.strategy.as_ref().unwrap()).is_ok());
        assert_eq!(primal_superhedge(&spec, ConeChoice::KTilde, None).value, fin(2, 1));
        let dual = dual_scps(&spec, ConeChoice::KTilde, None);
        assert_eq!(dual.value, fin(2, 1));
        let m = dual.price_system.unwrap();
        let scps = recover_scps(&spec, &m).unwrap();
        assert_eq!(scps.expectation, q(2, 1));
        assert_eq!(scps.q.values().fold(q(0, 1), |a, b| a + b.clone()), q(1, 1));
    }

    #[test]
    fn cash_claims_price_at_face_value() {
        let spec = instance_a();
        let cash = spec.with_payoff(vec![Vector::zeros(2), Vector::from_ints(&[0, 5]), Vector::from_ints(&[0, 5])]);
        let p = primal_superhedge(&cash, ConeChoice::K, None);
        assert_eq!(p.value, fin(5, 1));
        assert!(p.strategy.unwrap().transfers.values().all(|k| k.is_zero()));
        assert_eq!(dual_scps(&cash, ConeChoice::K, None).value, fin(5, 1));
    }

    #[test]
    fn solvent_liabilities_cost_nothing() {
        let spec = instance_a();
        let g = spec.with_payoff(vec![Vector::zeros(2), Vector::from_ints(&[-1, 0]), Vector::from_ints(&[0, -3])]);
        let p = primal_superhedge(&g, ConeChoice::K, None).value;
        assert!(p <= fin(0, 1));
    }

    #[test]
    fn tampered_strategy_is_rejected() {
        let spec = instance_a();
        let mut s = primal_superhedge(&spec, ConeChoice::K, None).strategy.unwrap();
        let nonzero = *s.transfers.iter().find(|(_, k)| !k.is_zero()).unwrap().0;
        let k = s.transfers.get_mut(&nonzero).unwrap();
        *k = k.neg();
        s.positions.clear();
        assert!(verify_superhedge(&spec, &s).is_err());
        let zero = HedgingStrategy { y: q(0, 1), transfers: BTreeMap::new(), positions: BTreeMap::new(), statics: vec![] };
        let none = spec.with_payoff(vec![Vector::zeros(2); 3]);
        assert!(verify_superhedge(&none, &zero).is_ok());
    }

    #[test]
    fn deterministic_tree_dual() {
        let mut b = TreeBuilder::new("r");
        b.child(0, "a");
        b.kernels(0, vec![vec![q(1, 1)]]);
        let tree = b.build(1).unwrap();
        let k = crate::instances::section_cone(q(1, 2), q(2, 1));
        let spec = MarketSpec::new(
            2,
            tree,
            vec![k.clone(), k],
            vec![PolyhedralCone::full(2); 2],
            vec![Vector::zeros(2), Vector::from_ints(&[0, 7])],
        )
        .unwrap();
        let dual = dual_scps(&spec, ConeChoice::K, None);
        assert_eq!(dual.value, fin(7, 1));
        let scps = recover_scps(&spec, dual.price_system.as_ref().unwrap()).unwrap();
        assert_eq!(scps.q.get(&1), Some(&q(1, 1)));
    }

    #[test]
    fn reports() {
        let r = duality_report(&instance_a());
        assert!(r.na.passes());
        assert_eq!(r.pricing.as_ref().unwrap().gap, Some(q(0, 1)));
        assert!(r.consistent());
        let r = duality_report(&na2_counterexample());
        assert!(r.na.passes() && r.consistent());
        let r = duality_report(&instance_b());
        assert!(!r.na.passes() && r.pricing.is_none());
        let zero = instance_a().with_payoff(vec![Vector::zeros(2); 3]);
        let p = duality_report(&zero).pricing.unwrap();
        assert_eq!(p.primal_k.value, fin(0, 1));
        assert_eq!(p.dual_tilde.value, fin(0, 1));
    }
}
