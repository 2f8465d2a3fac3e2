//! Linear-program columns for transfer processes `k_s(v) in K_s(v)` written
//! as nonnegative combinations of cone generators, and the cumulative
//! positions `eta_t = -(k_0 + ... + k_t)` they induce along tree paths.

use crate::cone::PolyhedralCone;
use crate::lp::LinearProgram;
use crate::market::{NodeId, ScenarioTree};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// A linear form in the LP variables, one per coordinate.
pub(crate) type Expr<F> = Vec<Vec<(usize, F)>>;

pub(crate) struct TransferVars<'a, F: Scalar> {
    cones: &'a [PolyhedralCone<F>],
    vars: Vec<Option<Vec<usize>>>,
    dim: usize,
}

impl<'a, F: Scalar> TransferVars<'a, F> {
    /// Adds generator coefficients for every node accepted by `active`.
    pub fn new(
        lp: &mut LinearProgram<F>,
        tree: &ScenarioTree<F>,
        cones: &'a [PolyhedralCone<F>],
        active: impl Fn(NodeId) -> bool,
    ) -> Self {
        let dim = cones[0].dim();
        let vars = (0..tree.len())
            .map(|v| active(v).then(|| cones[v].generators().iter().map(|_| lp.add_nonneg(F::zero())).collect()))
            .collect();
        TransferVars { cones, vars, dim }
    }

    pub fn all_vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.vars.iter().flatten().flatten().copied()
    }

    fn add_transfer(&self, node: NodeId, sign: &F, expr: &mut Expr<F>) {
        if let Some(vars) = &self.vars[node] {
            for (&v, g) in vars.iter().zip(self.cones[node].generators()) {
                for (i, c) in g.iter().enumerate() {
                    if !c.is_zero() {
                        expr[i].push((v, sign.clone() * c.clone()));
                    }
                }
            }
        }
    }

    pub fn zero_expr(&self) -> Expr<F> {
        vec![Vec::new(); self.dim]
    }

    /// `-(sum of transfers along the root path of node)`.
    pub fn position(&self, tree: &ScenarioTree<F>, node: NodeId) -> Expr<F> {
        let mut expr = self.zero_expr();
        let minus = -F::one();
        for v in tree.path(node) {
            self.add_transfer(v, &minus, &mut expr);
        }
        expr
    }

    pub fn transfer_value(&self, x: &[F], node: NodeId) -> Option<Vector<F>> {
        let vars = self.vars[node].as_ref()?;
        let mut k = Vector::zeros(self.dim);
        for (&v, g) in vars.iter().zip(self.cones[node].generators()) {
            if !x[v].is_zero() {
                k.add_scaled(&x[v], g);
            }
        }
        Some(k)
    }
}

/// `n . expr`, as LP coefficients.
pub(crate) fn dot_expr<F: Scalar>(n: &Vector<F>, expr: &Expr<F>) -> Vec<(usize, F)> {
    let mut out = Vec::new();
    for (c, terms) in n.iter().zip(expr) {
        if c.is_zero() {
            continue;
        }
        for (v, a) in terms {
            out.push((*v, c.clone() * a.clone()));
        }
    }
    out
}

pub(crate) fn eval_expr<F: Scalar>(expr: &Expr<F>, x: &[F]) -> Vector<F> {
    Vector::new(
        expr.iter()
            .map(|terms| terms.iter().fold(F::zero(), |acc, (v, a)| acc + a.clone() * x[*v].clone()))
            .collect(),
    )
}
