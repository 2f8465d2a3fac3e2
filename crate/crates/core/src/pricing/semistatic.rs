//! Semi-static trading: dynamic strategies plus buy-and-hold positions in
//! finitely many quoted options.
//!
//! Options enter as the columns `phi_k - a_k e_d` (bought at the ask) and
//! `-phi_k + b_k e_d` (sold at the bid), each with a nonnegative holding.

use std::collections::BTreeMap;

use crate::lp::{LpOutcome, Relation, Sense};
use crate::market::{MarketSpec, NodeId, OptionQuote};
use crate::positions::{dot_expr, eval_expr, TransferVars};
use crate::recursion::{strict_arbitrage_search, ArbitrageWitness, NaVerdict};
use crate::scalar::{Extended, Scalar};
use crate::vector::Vector;

use super::{
    check_price_system, dual_cones, dual_program, dual_scps_with, gap, option_value_row, primal_superhedge_with,
    static_columns, verify_superhedge_with, ConeChoice, DualResult, PriceSystem, PrimalResult, Violation,
};

/// A zero-cost dynamic strategy that, together with a nonzero static
/// position, ends solvent in every non-polar scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StaticArbitrage<F: Scalar> {
    pub transfers: BTreeMap<NodeId, Vector<F>>,
    /// `eta_T + Phi alpha` at the non-polar leaves.
    pub terminal: BTreeMap<NodeId, Vector<F>>,
    /// Buy quantities of each option, then sell quantities.
    pub statics: Vec<F>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemiStaticVerdict<F: Scalar> {
    Pass,
    /// The dynamic market alone admits a strict arbitrage.
    Dynamic(ArbitrageWitness<F>),
    /// Some nonzero static position is part of a solvent zero-cost strategy.
    Static(StaticArbitrage<F>),
}

impl<F: Scalar> SemiStaticVerdict<F> {
    pub fn passes(&self) -> bool {
        matches!(self, SemiStaticVerdict::Pass)
    }
}

/// No strict arbitrage with options: the dynamic market passes and
/// `eta_T + Phi alpha in K_T` forces `alpha = 0`.
///
/// The static part maximizes `sum alpha` subject to `sum alpha <= 1`, with
/// positions kept in `C_t` at every non-polar node.
pub fn na_semistatic_check<F: Scalar>(spec: &MarketSpec<F>, options: &[OptionQuote<F>]) -> SemiStaticVerdict<F> {
    if let NaVerdict::Fail(w) = strict_arbitrage_search(spec) {
        return SemiStaticVerdict::Dynamic(w);
    }
    if options.is_empty() {
        return SemiStaticVerdict::Pass;
    }
    let tree = spec.tree();
    let polar = spec.polar();
    let mut lp = crate::lp::LinearProgram::new(Sense::Maximize);
    let transfers = TransferVars::new(&mut lp, tree, spec.solvency_cones(), |v| polar.is_non_polar(v));
    let columns = static_columns(spec, options);
    let alpha: Vec<usize> = columns.iter().map(|_| lp.add_nonneg(F::one())).collect();
    let mut terminal = Vec::new();
    for v in polar.non_polar_nodes() {
        let mut eta = transfers.position(tree, v);
        for n in spec.constraint(v).halfspaces() {
            lp.add_constraint(dot_expr(n, &eta), Relation::Ge, F::zero());
        }
        if tree.node(v).is_leaf() {
            for (col, &a) in columns.iter().zip(&alpha) {
                for (i, c) in col[v].iter().enumerate() {
                    if !c.is_zero() {
                        eta[i].push((a, c.clone()));
                    }
                }
            }
            for n in spec.solvency(v).halfspaces() {
                lp.add_constraint(dot_expr(n, &eta), Relation::Ge, F::zero());
            }
            terminal.push((v, eta));
        }
    }
    lp.add_constraint(alpha.iter().map(|&a| (a, F::one())).collect(), Relation::Le, F::one());
    match lp.solve() {
        LpOutcome::Optimal { value, x } if value.is_positive() => SemiStaticVerdict::Static(StaticArbitrage {
            transfers: (0..tree.len()).filter_map(|v| transfers.transfer_value(&x, v).map(|k| (v, k))).collect(),
            terminal: terminal.iter().map(|(v, e)| (*v, eval_expr(e, &x))).collect(),
            statics: alpha.iter().map(|&a| x[a].clone()).collect(),
        }),
        _ => SemiStaticVerdict::Pass,
    }
}

/// Re-checks a static arbitrage by exact cone membership.
pub fn verify_static_arbitrage<F: Scalar>(
    spec: &MarketSpec<F>,
    options: &[OptionQuote<F>],
    w: &StaticArbitrage<F>,
) -> bool {
    let tree = spec.tree();
    let polar = spec.polar();
    let zero = Vector::zeros(spec.dim());
    let columns = static_columns(spec, options);
    if w.statics.len() != columns.len() || w.statics.iter().any(|a| a.is_negative()) {
        return false;
    }
    if w.statics.iter().all(|a| a.is_zero()) {
        return false;
    }
    polar.non_polar_nodes().into_iter().all(|v| {
        let k = w.transfers.get(&v).unwrap_or(&zero);
        if !spec.solvency(v).contains(k) {
            return false;
        }
        let eta = tree.path(v).iter().fold(Vector::zeros(spec.dim()), |acc, a| acc.sub(w.transfers.get(a).unwrap_or(&zero)));
        if !spec.constraint(v).contains(&eta) {
            return false;
        }
        if !tree.node(v).is_leaf() {
            return true;
        }
        let mut end = eta;
        for (col, a) in columns.iter().zip(&w.statics) {
            end.add_scaled(a, &col[v]);
        }
        w.terminal.get(&v) == Some(&end) && spec.solvency(v).contains(&end)
    })
}

/// The largest `delta <= 1` such that some price system in the closed dual
/// cones values every option within `[b_k + delta, a_k - delta]`. A
/// negative margin means every price system misprices some option; a
/// positive one is a Slater point for the semi-static dual. `None` only if
/// the dynamic dual itself is infeasible.
pub fn slater_margin<F: Scalar>(spec: &MarketSpec<F>, options: &[OptionQuote<F>]) -> Option<F> {
    let (mut lp, vars) = dual_program(spec, &dual_cones(spec, ConeChoice::K, None), false);
    let delta = lp.add_free(F::one());
    lp.add_constraint(vec![(delta, F::one())], Relation::Le, F::one());
    for o in options {
        let row = option_value_row(spec, &vars, o);
        let mut lower = row.clone();
        lower.push((delta, -F::one()));
        lp.add_constraint(lower, Relation::Ge, o.bid.clone());
        let mut upper = row;
        upper.push((delta, F::one()));
        lp.add_constraint(upper, Relation::Le, o.ask.clone());
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Some(value),
        _ => None,
    }
}

/// Checks a price system against the closed quote intervals.
pub fn check_option_prices<F: Scalar>(
    spec: &MarketSpec<F>,
    options: &[OptionQuote<F>],
    m: &PriceSystem<F>,
) -> Result<(), Violation> {
    for (k, o) in options.iter().enumerate() {
        let value = spec
            .tree()
            .leaves()
            .iter()
            .filter_map(|l| m.m.get(l).map(|ml| o.payoff[*l].dot(ml)))
            .fold(F::zero(), |acc, x| acc + x);
        if value < o.bid || value > o.ask {
            return Err(Violation {
                node: spec.tree().node(spec.tree().root()).id.clone(),
                what: format!("option {k} priced outside its quotes"),
            });
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SemiStaticReport<F: Scalar> {
    pub na: SemiStaticVerdict<F>,
    pub slater_margin: Option<F>,
    pub primal: PrimalResult<F>,
    pub dual: DualResult<F>,
    /// `primal - dual` when both are finite.
    pub gap: Option<F>,
    pub strategy_check: Option<Result<(), Violation>>,
    pub price_system_check: Option<Result<(), Violation>>,
}

impl<F: Scalar> SemiStaticReport<F> {
    /// A Slater point exists.
    pub fn slater(&self) -> bool {
        self.slater_margin.as_ref().is_some_and(|d| d.is_positive())
    }

    /// Zero gap and valid certificates wherever duality is claimed.
    pub fn consistent(&self) -> bool {
        if !self.na.passes() || !self.slater() {
            return true;
        }
        let zero_gap = match &self.gap {
            Some(g) => g.is_zero(),
            None => self.primal.value == self.dual.value,
        };
        zero_gap
            && self.strategy_check.as_ref().is_none_or(|r| r.is_ok())
            && self.price_system_check.as_ref().is_none_or(|r| r.is_ok())
    }
}

/// Primal and dual semi-static prices in the market's own cones, with the
/// no-arbitrage and Slater diagnostics.
pub fn semistatic_price<F: Scalar>(spec: &MarketSpec<F>, options: &[OptionQuote<F>]) -> SemiStaticReport<F> {
    let na = na_semistatic_check(spec, options);
    let slater_margin = slater_margin(spec, options);
    let primal = primal_superhedge_with(spec, spec.solvency_cones(), options);
    let duals = dual_cones(spec, ConeChoice::K, None);
    let dual = dual_scps_with(spec, &duals, options);
    let strategy_check =
        primal.strategy.as_ref().map(|s| verify_superhedge_with(spec, spec.solvency_cones(), options, s));
    let price_system_check = dual
        .price_system
        .as_ref()
        .map(|m| check_price_system(spec, &duals, m).and_then(|_| check_option_prices(spec, options, m)));
    let gap = gap(&primal.value, &dual.value);
    SemiStaticReport { na, slater_margin, primal, dual, gap, strategy_check, price_system_check }
}

/// The dynamic-only price, for monotonicity checks.
pub fn dynamic_price<F: Scalar>(spec: &MarketSpec<F>) -> Extended<F> {
    primal_superhedge_with(spec, spec.solvency_cones(), &[]).value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::instance_a;
    use crate::Rational;
    use num_traits::Signed;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_frac(n, d)
    }

    fn option(payoff: Vec<[i64; 2]>, bid: Rational, ask: Rational) -> OptionQuote<Rational> {
        OptionQuote { payoff: payoff.iter().map(|p| Vector::from_ints(p)).collect(), bid, ask }
    }

    #[test]
    fn no_options_reduces_to_dynamic() {
        let spec = instance_a();
        let r = semistatic_price(&spec, &[]);
        assert!(r.na.passes());
        assert_eq!(r.primal.value, dynamic_price(&spec));
        assert_eq!(r.dual.value, Extended::Finite(q(2, 1)));
        assert_eq!(r.slater_margin, Some(q(1, 1)));
    }

    #[test]
    fn buying_the_claim_itself_caps_the_price() {
        let spec = instance_a();
        let claim = option(vec![[0, 0], [1, 0], [0, 0]], q(3, 2), q(3, 2));
        let r = semistatic_price(&spec, std::slice::from_ref(&claim));
        assert!(r.primal.value <= Extended::Finite(q(3, 2)));
        // bid = ask is a static round trip at zero cost
        assert!(matches!(r.na, SemiStaticVerdict::Static(_)));
    }

    #[test]
    fn wide_spread_keeps_duality() {
        let spec = instance_a();
        let claim = option(vec![[0, 0], [0, 0], [1, 0]], q(1, 10), q(1, 1));
        let r = semistatic_price(&spec, std::slice::from_ref(&claim));
        assert!(r.na.passes());
        assert!(r.slater());
        assert_eq!(r.gap, Some(q(0, 1)));
        assert!(r.consistent());
        assert!(r.primal.value <= dynamic_price(&spec));
    }

    #[test]
    fn cheap_ask_is_a_free_lunch() {
        let spec = instance_a();
        // pays one unit of the numeraire at u for a price below any valuation
        let lo = dual_scps_with(&spec.with_payoff(vec![Vector::zeros(2), Vector::from_ints(&[0, 1]), Vector::from_ints(&[0, 1])]), &dual_cones(&spec, ConeChoice::K, None), &[]).value;
        assert_eq!(lo, Extended::Finite(q(1, 1)));
        let cash = option(vec![[0, 0], [0, 1], [0, 1]], q(1, 4), q(1, 2));
        match na_semistatic_check(&spec, std::slice::from_ref(&cash)) {
            SemiStaticVerdict::Static(w) => assert!(verify_static_arbitrage(&spec, std::slice::from_ref(&cash), &w)),
            other => panic!("expected a static arbitrage, got {other:?}"),
        }
        assert!(!slater_margin(&spec, &[cash]).unwrap().is_positive());
    }
}
