//! The fictitious frictionless market on an enlarged state space.
//!
//! Every non-polar node `v` gets finitely many price atoms inside the
//! section `{y in Kt*(v) : y^d = 1}`: the section's vertices pulled toward
//! an interior point `c` by a factor `epsilon`, the point `c` itself, and
//! `c + r / epsilon` for each ray `r` of an unbounded section. The enlarged
//! market trades these prices without friction. Because prices and claims
//! depend only on the current `(node, atom)`, strategies and measures are
//! taken on that lattice rather than on full paths.
//!
//! Portfolio constraints act on the risky coordinates only: `H` is
//! admissible at `v` when some numeraire holding completes it to a point of
//! `C(v)`. The numeraire has constant price, so its holding never enters
//! the gains.

use std::fmt;

use crate::cone::ConeSection;
use crate::lp::{LinearProgram, LpOutcome, Relation, Sense};
use crate::market::{MarketSpec, NodeId};
use crate::pricing::{primal_superhedge, ConeChoice};
use crate::recursion::RecursionResult;
use crate::scalar::{Extended, Scalar};
use crate::vector::Vector;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EnlargeError {
    /// `Kt*(v)` has empty interior at a non-polar node.
    EmptyInterior { node: String },
    NonPositiveEpsilon,
}

impl fmt::Display for EnlargeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnlargeError::EmptyInterior { node } => {
                write!(f, "reduced dual cone has empty interior at node {node}; no strict arbitrage is not established")
            }
            EnlargeError::NonPositiveEpsilon => write!(f, "epsilon must be positive"),
        }
    }
}

impl std::error::Error for EnlargeError {}

#[derive(Clone, Debug)]
pub struct EnlargedMarket<F: Scalar> {
    spec: MarketSpec<F>,
    pub epsilon: F,
    /// Price vectors with last coordinate 1, per node; empty at polar nodes.
    pub atoms: Vec<Vec<Vector<F>>>,
    pub centers: Vec<Option<Vector<F>>>,
    pub sections: Vec<Option<ConeSection<F>>>,
}

impl<F: Scalar> EnlargedMarket<F> {
    pub fn spec(&self) -> &MarketSpec<F> {
        &self.spec
    }

    /// The first `d - 1` coordinates of each atom.
    pub fn theta(&self, node: NodeId) -> Vec<Vec<F>> {
        let d = self.spec.dim();
        self.atoms[node].iter().map(|a| a[..d - 1].to_vec()).collect()
    }

    /// `G(l) . S(l, theta)` at every leaf atom.
    pub fn claim_values(&self) -> Vec<Vec<F>> {
        let tree = self.spec.tree();
        (0..tree.len())
            .map(|v| {
                if tree.node(v).is_leaf() {
                    self.atoms[v].iter().map(|a| self.spec.payoff(v).dot(a)).collect()
                } else {
                    Vec::new()
                }
            })
            .collect()
    }

    fn active(&self, v: NodeId) -> bool {
        !self.atoms[v].is_empty()
    }

    fn children(&self, v: NodeId) -> Vec<NodeId> {
        self.spec.tree().charged_children(v).into_iter().filter(|&c| self.active(c)).collect()
    }
}

fn push_unique<F: Scalar>(atoms: &mut Vec<Vector<F>>, a: Vector<F>) {
    if !atoms.contains(&a) {
        atoms.push(a);
    }
}

/// Places the price atoms. Every non-polar node needs a reduced dual cone
/// with nonempty interior, which strict no-arbitrage guarantees.
pub fn build_enlarged_market<F: Scalar>(
    spec: &MarketSpec<F>,
    recursion: &RecursionResult<F>,
    epsilon: F,
) -> Result<EnlargedMarket<F>, EnlargeError> {
    if !epsilon.is_positive() {
        return Err(EnlargeError::NonPositiveEpsilon);
    }
    let tree = spec.tree();
    let d = spec.dim();
    let n = tree.len();
    let mut atoms = vec![Vec::new(); n];
    let mut centers = vec![None; n];
    let mut sections = vec![None; n];
    let keep = F::one() - epsilon.clone();
    let stretch = F::one() / epsilon.clone();
    for v in recursion.polar.non_polar_nodes() {
        let cone = &recursion.tilde_dual[v];
        let empty = || EnlargeError::EmptyInterior { node: tree.node(v).id.clone() };
        let w = cone.interior_witness().ok_or_else(empty)?;
        let c = w.scale(&(F::one() / w[d - 1].clone()));
        let section = cone.normalized_section(d - 1).map_err(|_| empty())?;
        let mut list = Vec::new();
        for u in &section.vertices {
            push_unique(&mut list, u.scale(&keep).add(&c.scale(&epsilon)));
        }
        push_unique(&mut list, c.clone());
        for r in &section.rays {
            push_unique(&mut list, c.add(&r.scale(&stretch)));
        }
        atoms[v] = list;
        centers[v] = Some(c);
        sections[v] = Some(section);
    }
    Ok(EnlargedMarket { spec: spec.clone(), epsilon, atoms, centers, sections })
}

/// Every atom lies strictly inside the reduced dual cone of its node.
pub fn atoms_interior<F: Scalar>(enlarged: &EnlargedMarket<F>, recursion: &RecursionResult<F>) -> bool {
    (0..enlarged.atoms.len())
        .all(|v| enlarged.atoms[v].iter().all(|a| recursion.tilde_dual[v].contains_in_interior(a)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyClass {
    /// Holdings may depend on the current atom.
    Randomized,
    /// Holdings depend on the node only and must stay finite-cost against
    /// every price in the section.
    Consistent,
}

/// Generator coefficients for one admissible holding at `v`.
fn holding<F: Scalar>(lp: &mut LinearProgram<F>, spec: &MarketSpec<F>, v: NodeId) -> Vec<(usize, Vector<F>)> {
    spec.constraint(v).generators().iter().map(|g| (lp.add_nonneg(F::zero()), g.clone())).collect()
}

/// `h . x` over the risky coordinates (the numeraire increment is zero).
fn gain_row<F: Scalar>(h: &[(usize, Vector<F>)], x: &Vector<F>) -> Vec<(usize, F)> {
    h.iter().map(|(var, g)| (*var, g.dot(x))).filter(|(_, c)| !c.is_zero()).collect()
}

/// Superhedging price of `g` (indexed by leaf, then atom) in the enlarged
/// market: minimize `y` such that `y + (H o S)_T >= g` along every lattice
/// path.
pub fn frictionless_superhedge<F: Scalar>(
    enlarged: &EnlargedMarket<F>,
    g: &[Vec<F>],
    class: StrategyClass,
) -> Extended<F> {
    let spec = enlarged.spec();
    let tree = spec.tree();
    let root = tree.root();
    let mut lp = LinearProgram::new(Sense::Minimize);
    let y = lp.add_free(F::one());
    // w[v][j] is the capital needed at (v, j); constants at the leaves
    let mut w: Vec<Vec<Option<usize>>> = vec![Vec::new(); tree.len()];
    for v in 0..tree.len() {
        if enlarged.active(v) && !tree.node(v).is_leaf() {
            w[v] = enlarged.atoms[v].iter().map(|_| Some(lp.add_free(F::zero()))).collect();
        } else {
            w[v] = vec![None; enlarged.atoms[v].len()];
        }
    }
    let value_term = |v: NodeId, j: usize, sign: F| -> (Vec<(usize, F)>, F) {
        match w[v][j] {
            Some(var) => (vec![(var, sign)], F::zero()),
            None => (Vec::new(), sign * g[v][j].clone()),
        }
    };
    for j in 0..enlarged.atoms[root].len() {
        let (mut row, c) = value_term(root, j, -F::one());
        row.push((y, F::one()));
        lp.add_constraint(row, Relation::Ge, -c);
    }
    let mut shared: Vec<Option<Vec<(usize, Vector<F>)>>> = vec![None; tree.len()];
    for v in 0..tree.len() {
        if !enlarged.active(v) || tree.node(v).is_leaf() {
            continue;
        }
        let children = enlarged.children(v);
        if class == StrategyClass::Consistent {
            let h = holding(&mut lp, spec, v);
            // finite self-financing cost: the change in holdings may not
            // gain along any ray of the section
            let section = enlarged.sections[v].as_ref().expect("active node has a section");
            for r in &section.rays {
                let mut row = gain_row(&h, r);
                if let Some(prev) = tree.node(v).parent.and_then(|p| shared[p].as_ref()) {
                    row.extend(gain_row(prev, r).into_iter().map(|(i, c)| (i, -c)));
                }
                lp.add_constraint(row, Relation::Le, F::zero());
            }
            shared[v] = Some(h);
        }
        for (j, s) in enlarged.atoms[v].iter().enumerate() {
            let h = match class {
                StrategyClass::Consistent => shared[v].clone().expect("set above"),
                StrategyClass::Randomized => holding(&mut lp, spec, v),
            };
            for &mu in &children {
                for (i, next) in enlarged.atoms[mu].iter().enumerate() {
                    let (mut row, mut rhs) = value_term(v, j, F::one());
                    rhs = -rhs;
                    let (child, c) = value_term(mu, i, -F::one());
                    row.extend(child);
                    rhs = rhs - c;
                    row.extend(gain_row(&h, &next.sub(s)));
                    lp.add_constraint(row, Relation::Ge, rhs);
                }
            }
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Extended::Finite(value),
        LpOutcome::Infeasible => Extended::PosInf,
        LpOutcome::Unbounded => Extended::NegInf,
    }
}

/// Backward induction: at each `(v, j)` the largest expected continuation
/// value over one-step measures on the children's atoms under which every
/// admissible holding is a supermartingale. Returns the value at the worst
/// root atom.
pub fn dp_value<F: Scalar>(enlarged: &EnlargedMarket<F>, g: &[Vec<F>]) -> Extended<F> {
    let values = dp_values(enlarged, g);
    let root = enlarged.spec().tree().root();
    values[root].iter().max().cloned().unwrap_or(Extended::NegInf)
}

/// The value function on every `(node, atom)`.
pub fn dp_values<F: Scalar>(enlarged: &EnlargedMarket<F>, g: &[Vec<F>]) -> Vec<Vec<Extended<F>>> {
    let spec = enlarged.spec();
    let tree = spec.tree();
    let mut values: Vec<Vec<Extended<F>>> = vec![Vec::new(); tree.len()];
    for v in (0..tree.len()).rev() {
        if !enlarged.active(v) {
            continue;
        }
        if tree.node(v).is_leaf() {
            values[v] = g[v].iter().cloned().map(Extended::Finite).collect();
            continue;
        }
        let support: Vec<(&Vector<F>, F)> = enlarged
            .children(v)
            .into_iter()
            .flat_map(|mu| {
                enlarged.atoms[mu].iter().zip(&values[mu]).filter_map(|(a, x)| x.finite().map(|x| (a, x.clone())))
            })
            .collect();
        values[v] = enlarged.atoms[v].iter().map(|s| one_step_sup(spec, v, s, &support)).collect();
    }
    values
}

fn one_step_sup<F: Scalar>(spec: &MarketSpec<F>, v: NodeId, s: &Vector<F>, support: &[(&Vector<F>, F)]) -> Extended<F> {
    if support.is_empty() {
        return Extended::NegInf;
    }
    let mut lp = LinearProgram::new(Sense::Maximize);
    let p: Vec<usize> = support.iter().map(|(_, x)| lp.add_nonneg(x.clone())).collect();
    lp.add_constraint(p.iter().map(|&i| (i, F::one())).collect(), Relation::Eq, F::one());
    for y in spec.constraint(v).generators() {
        let row = p.iter().zip(support).map(|(&i, (a, _))| (i, y.dot(&a.sub(s)))).filter(|(_, c)| !c.is_zero()).collect();
        lp.add_constraint(row, Relation::Le, F::zero());
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Extended::Finite(value),
        LpOutcome::Infeasible => Extended::NegInf,
        LpOutcome::Unbounded => Extended::PosInf,
    }
}

/// The dual of the enlarged market as one LP: a probability on the root
/// atoms and one-step transition masses between lattice nodes, under which
/// every admissible holding is a supermartingale. Maximizes `E[g]`.
pub fn dual_epsilon<F: Scalar>(enlarged: &EnlargedMarket<F>, g: &[Vec<F>]) -> Extended<F> {
    let spec = enlarged.spec();
    let tree = spec.tree();
    let root = tree.root();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let mut mass: Vec<Vec<usize>> = vec![Vec::new(); tree.len()];
    for v in 0..tree.len() {
        let leaf = tree.node(v).is_leaf();
        mass[v] = (0..enlarged.atoms[v].len())
            .map(|j| lp.add_nonneg(if leaf { g[v][j].clone() } else { F::zero() }))
            .collect();
    }
    lp.add_constraint(mass[root].iter().map(|&m| (m, F::one())).collect(), Relation::Eq, F::one());
    let mut inflow: Vec<Vec<Vec<(usize, F)>>> =
        (0..tree.len()).map(|v| vec![Vec::new(); enlarged.atoms[v].len()]).collect();
    for v in 0..tree.len() {
        if !enlarged.active(v) || tree.node(v).is_leaf() {
            continue;
        }
        let children = enlarged.children(v);
        for (j, s) in enlarged.atoms[v].iter().enumerate() {
            let mut out = vec![(mass[v][j], -F::one())];
            let mut flows = Vec::new();
            for &mu in &children {
                for (i, next) in enlarged.atoms[mu].iter().enumerate() {
                    let f = lp.add_nonneg(F::zero());
                    out.push((f, F::one()));
                    inflow[mu][i].push((f, F::one()));
                    flows.push((f, next.sub(s)));
                }
            }
            lp.add_constraint(out, Relation::Eq, F::zero());
            for y in spec.constraint(v).generators() {
                let row = flows.iter().map(|(f, dx)| (*f, y.dot(dx))).filter(|(_, c)| !c.is_zero()).collect();
                lp.add_constraint(row, Relation::Le, F::zero());
            }
        }
    }
    for v in 0..tree.len() {
        if v == root {
            continue;
        }
        for (j, terms) in inflow[v].iter().enumerate() {
            let mut row = terms.clone();
            row.push((mass[v][j], -F::one()));
            lp.add_constraint(row, Relation::Eq, F::zero());
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => Extended::Finite(value),
        LpOutcome::Infeasible => Extended::NegInf,
        LpOutcome::Unbounded => Extended::PosInf,
    }
}

/// `(node, atom)` pairs where some admissible holding gains weakly in every
/// next state and strictly in one.
pub fn one_step_arbitrage<F: Scalar>(enlarged: &EnlargedMarket<F>) -> Vec<(NodeId, usize)> {
    let spec = enlarged.spec();
    let tree = spec.tree();
    let mut failures = Vec::new();
    for v in 0..tree.len() {
        if !enlarged.active(v) || tree.node(v).is_leaf() {
            continue;
        }
        let moves: Vec<&Vector<F>> = enlarged.children(v).into_iter().flat_map(|mu| enlarged.atoms[mu].iter()).collect();
        for (j, s) in enlarged.atoms[v].iter().enumerate() {
            let mut lp = LinearProgram::new(Sense::Maximize);
            let h = holding(&mut lp, spec, v);
            let mut total = Vector::zeros(spec.dim());
            for next in &moves {
                let dx = next.sub(s);
                let row = gain_row(&h, &dx);
                lp.add_constraint(row.clone(), Relation::Ge, F::zero());
                lp.add_constraint(row, Relation::Le, F::one());
                total = total.add(&dx);
            }
            for (var, c) in gain_row(&h, &total) {
                lp.set_cost(var, c);
            }
            if let LpOutcome::Optimal { value, .. } = lp.solve() {
                if value.is_positive() {
                    failures.push((v, j));
                }
            }
        }
    }
    failures
}

/// Results for one `epsilon`.
#[derive(Clone, Debug)]
pub struct EpsilonRun<F: Scalar> {
    pub epsilon: F,
    pub atom_count: usize,
    pub atoms_interior: bool,
    pub randomized: Extended<F>,
    pub consistent: Extended<F>,
    pub dp: Extended<F>,
    pub dual: Extended<F>,
    /// `pi_K - randomized` when both are finite.
    pub gap: Option<F>,
    pub sandwich: bool,
    pub one_step_failures: Vec<(NodeId, usize)>,
}

#[derive(Clone, Debug)]
pub struct EqualityReport<F: Scalar> {
    pub primal_k: Extended<F>,
    pub runs: Vec<EpsilonRun<F>>,
    /// Gaps never increase along the schedule.
    pub gaps_nonincreasing: bool,
}

impl<F: Scalar> EqualityReport<F> {
    /// `dual_eps <= randomized <= pi_K` on every run, with atoms inside the
    /// reduced dual cones.
    pub fn sandwich_holds(&self) -> bool {
        self.runs.iter().all(|r| r.sandwich && r.atoms_interior)
    }

    pub fn one_step_clean(&self) -> bool {
        self.runs.iter().all(|r| r.one_step_failures.is_empty())
    }

    pub fn classes_agree(&self) -> bool {
        self.runs.iter().all(|r| r.randomized == r.consistent)
    }

    pub fn dp_agrees(&self) -> bool {
        self.runs.iter().all(|r| r.randomized == r.dp)
    }
}

/// Builds the enlargement for every `epsilon` of the schedule and compares
/// its prices with the frictional price `pi_K`.
pub fn equality_check<F: Scalar>(
    spec: &MarketSpec<F>,
    recursion: &RecursionResult<F>,
    schedule: &[F],
) -> Result<EqualityReport<F>, EnlargeError> {
    let primal_k = primal_superhedge(spec, ConeChoice::K, Some(recursion)).value;
    let mut runs = Vec::with_capacity(schedule.len());
    for eps in schedule {
        let enlarged = build_enlarged_market(spec, recursion, eps.clone())?;
        let g = enlarged.claim_values();
        let randomized = frictionless_superhedge(&enlarged, &g, StrategyClass::Randomized);
        let consistent = frictionless_superhedge(&enlarged, &g, StrategyClass::Consistent);
        let dp = dp_value(&enlarged, &g);
        let dual = dual_epsilon(&enlarged, &g);
        let gap = match (&primal_k, &randomized) {
            (Extended::Finite(p), Extended::Finite(r)) => Some(p.clone() - r.clone()),
            _ => None,
        };
        let sandwich = dual <= randomized && randomized <= primal_k;
        runs.push(EpsilonRun {
            epsilon: eps.clone(),
            atom_count: enlarged.atoms.iter().map(Vec::len).sum(),
            atoms_interior: atoms_interior(&enlarged, recursion),
            randomized,
            consistent,
            dp,
            dual,
            gap,
            sandwich,
            one_step_failures: one_step_arbitrage(&enlarged),
        });
    }
    let gaps_nonincreasing = runs.windows(2).all(|w| match (&w[0].gap, &w[1].gap) {
        (Some(a), Some(b)) => b <= a,
        _ => true,
    });
    Ok(EqualityReport { primal_k, runs, gaps_nonincreasing })
}
