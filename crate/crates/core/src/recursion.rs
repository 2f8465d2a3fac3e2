//! Backward dual-cone recursion, interior diagnostics and the No Strict
//! Arbitrage decision.
//!
//! At a non-polar node `v` with charged children `mu`,
//! `Kt*(v) = K*(v) ∩ (cone(∪ Kt*(mu)) + C*(v))`, starting from `Kt* = K*`
//! at the leaves. Polar nodes keep `K*`.

use std::collections::BTreeMap;

use crate::cone::PolyhedralCone;
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::market::{MarketSpec, NodeId, PolarClassification};
use crate::positions::{dot_expr, eval_expr, TransferVars};
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Clone, Debug)]
pub struct RecursionResult<F: Scalar> {
    pub tilde_dual: Vec<PolyhedralCone<F>>,
    pub tilde_primal: Vec<PolyhedralCone<F>>,
    /// Conic hull of the children's reduced dual cones, at non-polar inner nodes.
    pub gamma_hull: Vec<Option<PolyhedralCone<F>>>,
    pub empty_interior_nodes: Vec<NodeId>,
    pub polar: PolarClassification,
}

pub fn backward_dual_cones<F: Scalar>(spec: &MarketSpec<F>) -> RecursionResult<F> {
    let tree = spec.tree();
    let polar = spec.polar();
    let n = tree.len();
    let mut tilde_dual: Vec<Option<PolyhedralCone<F>>> = vec![None; n];
    let mut gamma_hull = vec![None; n];
    // children come after parents in node order
    for v in (0..n).rev() {
        let k_dual = spec.solvency(v).dual();
        if tree.node(v).is_leaf() || polar.is_polar(v) {
            tilde_dual[v] = Some(k_dual);
            continue;
        }
        let charged = tree.charged_children(v);
        let hull = PolyhedralCone::conic_hull_of_union(charged.iter().map(|&c| tilde_dual[c].as_ref().expect("children first")))
            .expect("stochastic kernels charge a child");
        let widened = hull.minkowski_sum(&spec.constraint(v).dual()).expect("same dimension");
        tilde_dual[v] = Some(k_dual.intersect(&widened).expect("same dimension"));
        gamma_hull[v] = Some(hull);
    }
    let tilde_dual: Vec<PolyhedralCone<F>> = tilde_dual.into_iter().map(|c| c.expect("filled")).collect();
    let tilde_primal = tilde_dual.iter().map(|c| c.dual()).collect();
    let empty_interior_nodes = (0..n)
        .filter(|&v| polar.is_non_polar(v) && !tilde_dual[v].has_nonempty_interior())
        .collect();
    RecursionResult { tilde_dual, tilde_primal, gamma_hull, empty_interior_nodes, polar }
}

/// Checks `Kt(v) = K(v) + (Gamma*(v) ∩ C(v))` at every non-polar node
/// (`Kt = K` at leaves).
pub fn tilde_decomposition_check<F: Scalar>(result: &RecursionResult<F>, spec: &MarketSpec<F>) -> bool {
    (0..spec.tree().len()).filter(|&v| result.polar.is_non_polar(v)).all(|v| {
        let expected = match &result.gamma_hull[v] {
            None => spec.solvency(v).clone(),
            Some(h) => {
                let part = h.dual().intersect(spec.constraint(v)).expect("same dimension");
                spec.solvency(v).minkowski_sum(&part).expect("same dimension")
            }
        };
        expected == result.tilde_primal[v]
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InteriorDiagnostic {
    pub flagged: Vec<NodeId>,
}

impl InteriorDiagnostic {
    pub fn necessary_condition_holds(&self) -> bool {
        self.flagged.is_empty()
    }

    pub fn message(&self) -> &'static str {
        if self.flagged.is_empty() {
            "necessary condition for NA^s holds"
        } else {
            "NA^s necessarily fails: a reduced dual cone has empty interior"
        }
    }
}

pub fn interior_diagnostic<F: Scalar>(result: &RecursionResult<F>) -> InteriorDiagnostic {
    InteriorDiagnostic { flagged: result.empty_interior_nodes.clone() }
}

/// A nonzero solvent position reachable at zero cost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArbitrageWitness<F: Scalar> {
    pub time: usize,
    /// `k_s(v)` for the non-polar nodes up to `time`.
    pub transfers: BTreeMap<NodeId, Vector<F>>,
    /// `xi(v) = -(sum of transfers on the path)` at the non-polar time-`time` nodes.
    pub positions: BTreeMap<NodeId, Vector<F>>,
    pub nonzero_node: NodeId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NaVerdict<F: Scalar> {
    Pass,
    Fail(ArbitrageWitness<F>),
}

impl<F: Scalar> NaVerdict<F> {
    pub fn passes(&self) -> bool {
        matches!(self, NaVerdict::Pass)
    }

    pub fn witness(&self) -> Option<&ArbitrageWitness<F>> {
        match self {
            NaVerdict::Pass => None,
            NaVerdict::Fail(w) => Some(w),
        }
    }
}

struct AdmissibleLp<'a, F: Scalar> {
    lp: LinearProgram<F>,
    transfers: TransferVars<'a, F>,
    positions: Vec<(NodeId, crate::positions::Expr<F>)>,
}

/// Zero-cost families up to time `t` with `xi in C_t ∩ K_t` at the non-polar
/// time-`t` nodes, normalized by `sum of coefficients <= 1`.
fn admissible_lp<'a, F: Scalar>(
    spec: &'a MarketSpec<F>,
    polar: &PolarClassification,
    t: usize,
    sense: Sense,
) -> AdmissibleLp<'a, F> {
    let tree = spec.tree();
    let mut lp = LinearProgram::new(sense);
    let transfers = TransferVars::new(&mut lp, tree, spec.solvency_cones(), |v| {
        polar.is_non_polar(v) && tree.node(v).time <= t
    });
    let mut positions = Vec::new();
    for &v in tree.level(t) {
        if polar.is_polar(v) {
            continue;
        }
        let xi = transfers.position(tree, v);
        for n in spec.constraint(v).halfspaces().iter().chain(spec.solvency(v).halfspaces()) {
            lp.add_constraint(dot_expr(n, &xi), Relation::Ge, F::zero());
        }
        positions.push((v, xi));
    }
    let all: Vec<(usize, F)> = transfers.all_vars().map(|v| (v, F::one())).collect();
    lp.add_constraint(all, Relation::Le, F::one());
    AdmissibleLp { lp, transfers, positions }
}

fn extract_witness<F: Scalar>(
    spec: &MarketSpec<F>,
    adm: &AdmissibleLp<'_, F>,
    t: usize,
    x: &[F],
) -> Option<ArbitrageWitness<F>> {
    let tree = spec.tree();
    let positions: BTreeMap<NodeId, Vector<F>> =
        adm.positions.iter().map(|(v, e)| (*v, eval_expr(e, x))).collect();
    let nonzero_node = positions.iter().find(|(_, xi)| !xi.is_zero()).map(|(v, _)| *v)?;
    let transfers = (0..tree.len())
        .filter_map(|v| adm.transfers.transfer_value(x, v).map(|k| (v, k)))
        .collect();
    Some(ArbitrageWitness { time: t, transfers, positions, nonzero_node })
}

/// Decides NA^s time by time. Each time uses a single LP whose objective
/// pairs `xi(v)` with an interior point of `K_t*(v)`; since such a point is
/// strictly positive on `K_t(v) \ {0}`, the optimum is positive exactly when
/// some admissible solvent position is nonzero.
pub fn strict_arbitrage_search<F: Scalar>(spec: &MarketSpec<F>) -> NaVerdict<F> {
    let polar = spec.polar();
    for t in 0..=spec.horizon() {
        let mut adm = admissible_lp(spec, &polar, t, Sense::Maximize);
        let mut costs: BTreeMap<usize, F> = BTreeMap::new();
        for (v, xi) in &adm.positions {
            // generators of K*(v) are the facet normals of K(v); their sum is
            // interior because K*(v) is full-dimensional
            let w = spec
                .solvency(*v)
                .halfspaces()
                .iter()
                .fold(Vector::zeros(spec.dim()), |acc, n| acc.add(n));
            for (var, c) in dot_expr(&w, xi) {
                let e = costs.entry(var).or_insert_with(F::zero);
                *e = e.clone() + c;
            }
        }
        for (var, c) in costs {
            adm.lp.set_cost(var, c);
        }
        if let LpOutcome::Optimal { value, x } = adm.lp.solve() {
            if value.is_positive() {
                let w = extract_witness(spec, &adm, t, &x).expect("positive objective has a nonzero position");
                log::debug!("strict arbitrage at time {t}");
                return NaVerdict::Fail(w);
            }
        }
    }
    NaVerdict::Pass
}

/// The coordinatewise decision procedure: for every non-polar time-`t`
/// node, coordinate and sign, maximize `±xi^i(v)`. Slower than
/// [`strict_arbitrage_search`] but built from the raw definition.
pub fn strict_arbitrage_search_coordinatewise<F: Scalar>(spec: &MarketSpec<F>) -> NaVerdict<F> {
    let polar = spec.polar();
    for t in 0..=spec.horizon() {
        let base = admissible_lp(spec, &polar, t, Sense::Maximize);
        for (_, xi) in &base.positions {
            for coord in xi {
                for sign in [F::one(), -F::one()] {
                    let mut lp = base.lp.clone();
                    for (var, c) in coord {
                        lp.set_cost(*var, sign.clone() * c.clone());
                    }
                    if let LpOutcome::Optimal { value, x } = lp.solve() {
                        if value.is_positive() {
                            return NaVerdict::Fail(extract_witness(spec, &base, t, &x).expect("nonzero"));
                        }
                    }
                }
            }
        }
    }
    NaVerdict::Pass
}

/// Re-checks every witness invariant by exact cone membership.
pub fn verify_witness<F: Scalar>(spec: &MarketSpec<F>, w: &ArbitrageWitness<F>) -> bool {
    let tree = spec.tree();
    let polar = spec.polar();
    let zero = Vector::zeros(spec.dim());
    for (&v, k) in &w.transfers {
        if tree.node(v).time > w.time || !spec.solvency(v).contains(k) {
            return false;
        }
    }
    for &v in tree.level(w.time) {
        if polar.is_polar(v) {
            continue;
        }
        let mut xi = Vector::zeros(spec.dim());
        for a in tree.path(v) {
            xi = xi.sub(w.transfers.get(&a).unwrap_or(&zero));
        }
        if w.positions.get(&v) != Some(&xi) || !spec.constraint(v).contains(&xi) || !spec.solvency(v).contains(&xi) {
            return false;
        }
    }
    w.positions.get(&w.nonzero_node).is_some_and(|xi| !xi.is_zero())
}
