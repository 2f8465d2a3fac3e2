//! Scenario trees with finite prior sets, per-node solvency and constraint
//! cones, terminal payoffs, and the market file format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cone::{ConeError, PolyhedralCone};
use crate::scalar::Scalar;
use crate::vector::Vector;

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("non-rational numeric literal {literal} in {context}")]
    NonRational { literal: String, context: String },
    #[error("{what} at node {node}")]
    Invariant { node: String, what: String },
    #[error("malformed market: {0}")]
    Structure(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
}

impl MarketError {
    fn invariant(node: &str, what: impl Into<String>) -> Self {
        MarketError::Invariant { node: node.to_string(), what: what.into() }
    }
}

pub type NodeId = usize;

#[derive(Clone, Debug)]
pub struct Node<F> {
    pub id: String,
    pub time: usize,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Probability vectors over `children`, in the same order.
    pub kernels: Vec<Vec<F>>,
}

impl<F: Scalar> Node<F> {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// A finite event tree. Nodes are stored parents-first; the root is node 0.
#[derive(Clone, Debug)]
pub struct ScenarioTree<F> {
    horizon: usize,
    nodes: Vec<Node<F>>,
    levels: Vec<Vec<NodeId>>,
}

/// Incremental construction of a [`ScenarioTree`].
#[derive(Debug)]
pub struct TreeBuilder<F> {
    nodes: Vec<Node<F>>,
}

impl<F: Scalar> TreeBuilder<F> {
    pub fn new(root: impl Into<String>) -> Self {
        TreeBuilder {
            nodes: vec![Node {
                id: root.into(),
                time: 0,
                parent: None,
                children: Vec::new(),
                kernels: Vec::new(),
            }],
        }
    }

    pub fn child(&mut self, parent: NodeId, id: impl Into<String>) -> NodeId {
        let idx = self.nodes.len();
        let time = self.nodes[parent].time + 1;
        self.nodes.push(Node { id: id.into(), time, parent: Some(parent), children: Vec::new(), kernels: Vec::new() });
        self.nodes[parent].children.push(idx);
        idx
    }

    /// Sets the prior kernels of `node`, each aligned with its children.
    pub fn kernels(&mut self, node: NodeId, kernels: Vec<Vec<F>>) -> &mut Self {
        self.nodes[node].kernels = kernels;
        self
    }

    pub fn build(self, horizon: usize) -> Result<ScenarioTree<F>, MarketError> {
        ScenarioTree::from_nodes(horizon, self.nodes)
    }
}

impl<F: Scalar> ScenarioTree<F> {
    /// Validates and reorders `nodes` (any order whose parents resolve) into a tree.
    pub fn from_nodes(horizon: usize, nodes: Vec<Node<F>>) -> Result<Self, MarketError> {
        if horizon == 0 {
            return Err(MarketError::Structure("horizon must be at least 1".into()));
        }
        let roots: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].parent.is_none()).collect();
        if roots.len() != 1 {
            return Err(MarketError::Structure(format!("expected exactly one root, found {}", roots.len())));
        }
        let mut seen = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if seen.insert(n.id.clone(), i).is_some() {
                return Err(MarketError::Structure(format!("duplicate node id {}", n.id)));
            }
        }
        // breadth-first renumbering from the root
        let mut order = vec![roots[0]];
        let mut head = 0;
        while head < order.len() {
            let u = order[head];
            head += 1;
            for &c in &nodes[u].children {
                if nodes.get(c).and_then(|n| n.parent) != Some(u) {
                    return Err(MarketError::Structure(format!("inconsistent parent link below {}", nodes[u].id)));
                }
                order.push(c);
            }
            if order.len() > nodes.len() {
                return Err(MarketError::Structure("cycle in node links".into()));
            }
        }
        if order.len() != nodes.len() {
            return Err(MarketError::Structure("some nodes are not reachable from the root".into()));
        }
        let mut new_index = vec![0; nodes.len()];
        for (new, &old) in order.iter().enumerate() {
            new_index[old] = new;
        }
        let mut slots: Vec<Option<Node<F>>> = nodes.into_iter().map(Some).collect();
        let mut out = Vec::with_capacity(order.len());
        for &old in &order {
            let mut n = slots[old].take().expect("each node visited once");
            n.parent = n.parent.map(|p| new_index[p]);
            n.children = n.children.iter().map(|&c| new_index[c]).collect();
            out.push(n);
        }
        let mut levels = vec![Vec::new(); horizon + 1];
        for (i, n) in out.iter().enumerate() {
            let expected = n.parent.map_or(0, |p| out[p].time + 1);
            if n.time != expected {
                return Err(MarketError::invariant(&n.id, format!("time {} should be {}", n.time, expected)));
            }
            if n.time > horizon {
                return Err(MarketError::invariant(&n.id, "node beyond the horizon"));
            }
            if n.is_leaf() && n.time != horizon {
                return Err(MarketError::invariant(&n.id, "leaf before the horizon"));
            }
            if n.is_leaf() {
                if !n.kernels.is_empty() {
                    return Err(MarketError::invariant(&n.id, "kernels given at a leaf"));
                }
            } else {
                if n.kernels.is_empty() {
                    return Err(MarketError::invariant(&n.id, "no prior kernels"));
                }
                for k in &n.kernels {
                    let stochastic = k.len() == n.children.len()
                        && k.iter().all(|p| !p.is_negative())
                        && k.iter().fold(F::zero(), |a, p| a + p.clone()).is_one();
                    if !stochastic {
                        return Err(MarketError::invariant(&n.id, "kernel not stochastic"));
                    }
                }
            }
            levels[n.time].push(i);
        }
        Ok(ScenarioTree { horizon, nodes: out, levels })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node<F> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    pub fn level(&self, t: usize) -> &[NodeId] {
        &self.levels[t]
    }

    pub fn leaves(&self) -> &[NodeId] {
        &self.levels[self.horizon]
    }

    pub fn find(&self, id: &str) -> Option<NodeId> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Ancestors of `node` from the root down to and including `node`.
    pub fn path(&self, node: NodeId) -> Vec<NodeId> {
        let mut p = vec![node];
        let mut cur = node;
        while let Some(parent) = self.nodes[cur].parent {
            p.push(parent);
            cur = parent;
        }
        p.reverse();
        p
    }

    /// Children given positive probability by at least one kernel.
    pub fn charged_children(&self, node: NodeId) -> Vec<NodeId> {
        let n = &self.nodes[node];
        n.children
            .iter()
            .enumerate()
            .filter(|(j, _)| n.kernels.iter().any(|k| k[*j].is_positive()))
            .map(|(_, &c)| c)
            .collect()
    }
}

/// Partition of the nodes into polar (null under every prior) and non-polar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolarClassification {
    non_polar: Vec<bool>,
}

impl PolarClassification {
    pub fn is_polar(&self, node: NodeId) -> bool {
        !self.non_polar[node]
    }

    pub fn is_non_polar(&self, node: NodeId) -> bool {
        self.non_polar[node]
    }

    pub fn polar_nodes(&self) -> Vec<NodeId> {
        (0..self.non_polar.len()).filter(|&i| !self.non_polar[i]).collect()
    }

    pub fn non_polar_nodes(&self) -> Vec<NodeId> {
        (0..self.non_polar.len()).filter(|&i| self.non_polar[i]).collect()
    }
}

pub fn polar_classification<F: Scalar>(tree: &ScenarioTree<F>) -> PolarClassification {
    let mut non_polar = vec![false; tree.len()];
    non_polar[tree.root()] = true;
    // parents precede children
    for u in 0..tree.len() {
        if non_polar[u] {
            for c in tree.charged_children(u) {
                non_polar[c] = true;
            }
        }
    }
    PolarClassification { non_polar }
}

/// Closed conic hull of the cones attached to the charged children of `node`.
pub fn quasi_sure_support<F: Scalar>(
    tree: &ScenarioTree<F>,
    node: NodeId,
    family: &[PolyhedralCone<F>],
) -> Result<PolyhedralCone<F>, MarketError> {
    let charged = tree.charged_children(node);
    PolyhedralCone::conic_hull_of_union(charged.iter().map(|&c| &family[c])).map_err(MarketError::from)
}

/// Cone generated by `e_i` and `pi[i][j] e_i - e_j`.
pub fn solvency_from_bidask<F: Scalar>(pi: &[Vec<F>]) -> Result<PolyhedralCone<F>, MarketError> {
    let d = pi.len();
    let mut gens = Vec::with_capacity(d * d);
    for (i, row) in pi.iter().enumerate() {
        if row.len() != d {
            return Err(MarketError::Structure("bid-ask matrix is not square".into()));
        }
        if !row[i].is_one() {
            return Err(MarketError::Structure("bid-ask matrix diagonal must be 1".into()));
        }
        gens.push(Vector::unit(d, i));
        for (j, p) in row.iter().enumerate() {
            if !p.is_positive() {
                return Err(MarketError::Structure("bid-ask entries must be positive".into()));
            }
            if i != j {
                let mut g = Vector::unit(d, i).scale(p);
                g[j] = -F::one();
                gens.push(g);
            }
        }
    }
    Ok(PolyhedralCone::from_generators(d, gens)?)
}

/// A static claim quoted at `bid`/`ask`, paying `payoff[leaf]` in physical units.
#[derive(Clone)]
pub struct OptionQuote<F> {
    pub payoff: Vec<Vector<F>>,
    pub bid: F,
    pub ask: F,
}

#[derive(Clone)]
pub struct MarketSpec<F> {
    dim: usize,
    tree: ScenarioTree<F>,
    solvency: Vec<PolyhedralCone<F>>,
    constraint: Vec<PolyhedralCone<F>>,
    payoff: Vec<Vector<F>>,
    options: Vec<OptionQuote<F>>,
}

impl<F: Scalar> fmt::Debug for OptionQuote<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OptionQuote").field("bid", &self.bid).field("ask", &self.ask).finish_non_exhaustive()
    }
}

impl<F: Scalar> fmt::Debug for MarketSpec<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarketSpec")
            .field("dim", &self.dim)
            .field("horizon", &self.tree.horizon())
            .field("nodes", &self.tree.len())
            .field("options", &self.options.len())
            .finish()
    }
}

impl<F: Scalar> MarketSpec<F> {
    /// Builds and validates a market. `payoff` is indexed by node; entries at
    /// non-leaf nodes are ignored.
    pub fn new(
        dim: usize,
        tree: ScenarioTree<F>,
        solvency: Vec<PolyhedralCone<F>>,
        constraint: Vec<PolyhedralCone<F>>,
        payoff: Vec<Vector<F>>,
    ) -> Result<Self, MarketError> {
        let spec = Self::assemble(dim, tree, solvency, constraint, payoff)?;
        spec.check_numeraire_line()?;
        Ok(spec)
    }

    /// Like [`MarketSpec::new`] but without requiring `span(e_d)` inside
    /// each constraint cone (the input to [`bar_extension`]).
    pub fn new_general(
        dim: usize,
        tree: ScenarioTree<F>,
        solvency: Vec<PolyhedralCone<F>>,
        constraint: Vec<PolyhedralCone<F>>,
        payoff: Vec<Vector<F>>,
    ) -> Result<Self, MarketError> {
        Self::assemble(dim, tree, solvency, constraint, payoff)
    }

    fn assemble(
        dim: usize,
        tree: ScenarioTree<F>,
        solvency: Vec<PolyhedralCone<F>>,
        constraint: Vec<PolyhedralCone<F>>,
        payoff: Vec<Vector<F>>,
    ) -> Result<Self, MarketError> {
        if dim < 2 {
            return Err(MarketError::Structure("dimension must be at least 2".into()));
        }
        let n = tree.len();
        if solvency.len() != n || constraint.len() != n || payoff.len() != n {
            return Err(MarketError::Structure("per-node data does not match the tree".into()));
        }
        let orthant = PolyhedralCone::orthant(dim);
        for (i, node) in tree.nodes().iter().enumerate() {
            let id = &node.id;
            for (cone, what) in [(&solvency[i], "solvency"), (&constraint[i], "constraint")] {
                if cone.dim() != dim {
                    return Err(MarketError::invariant(id, format!("{what} cone has the wrong dimension")));
                }
            }
            if node.is_leaf() && payoff[i].dim() != dim {
                return Err(MarketError::invariant(id, "payoff has the wrong dimension"));
            }
            if !orthant.is_subset(&solvency[i]) {
                return Err(MarketError::invariant(id, "solvency cone does not contain the nonnegative orthant"));
            }
            if !solvency[i].dual().has_nonempty_interior() {
                return Err(MarketError::invariant(id, "efficient friction violated"));
            }
            for &c in &node.children {
                if !constraint[i].is_subset(&constraint[c]) {
                    return Err(MarketError::invariant(
                        id,
                        format!("constraint cone not contained in that of child {}", tree.node(c).id),
                    ));
                }
            }
        }
        Ok(MarketSpec { dim, tree, solvency, constraint, payoff, options: Vec::new() })
    }

    fn check_numeraire_line(&self) -> Result<(), MarketError> {
        let e = Vector::unit(self.dim, self.dim - 1);
        for (i, c) in self.constraint.iter().enumerate() {
            if !c.contains(&e) || !c.contains(&e.neg()) {
                return Err(MarketError::invariant(
                    &self.tree.node(i).id,
                    "constraint cone does not contain the numeraire line",
                ));
            }
        }
        Ok(())
    }

    /// Attaches static option quotes.
    pub fn with_options(mut self, options: Vec<OptionQuote<F>>) -> Result<Self, MarketError> {
        for (k, o) in options.iter().enumerate() {
            if o.bid > o.ask {
                return Err(MarketError::Structure(format!("option {k} has bid above ask")));
            }
            if o.payoff.len() != self.tree.len() {
                return Err(MarketError::Structure(format!("option {k} payoff does not match the tree")));
            }
            for &l in self.tree.leaves() {
                if o.payoff[l].dim() != self.dim {
                    return Err(MarketError::invariant(&self.tree.node(l).id, format!("option {k} payoff has the wrong dimension")));
                }
            }
        }
        self.options = options;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn tree(&self) -> &ScenarioTree<F> {
        &self.tree
    }

    pub fn horizon(&self) -> usize {
        self.tree.horizon()
    }

    pub fn solvency(&self, node: NodeId) -> &PolyhedralCone<F> {
        &self.solvency[node]
    }

    pub fn solvency_cones(&self) -> &[PolyhedralCone<F>] {
        &self.solvency
    }

    pub fn constraint(&self, node: NodeId) -> &PolyhedralCone<F> {
        &self.constraint[node]
    }

    pub fn payoff(&self, leaf: NodeId) -> &Vector<F> {
        &self.payoff[leaf]
    }

    pub fn payoffs(&self) -> &[Vector<F>] {
        &self.payoff
    }

    pub fn options(&self) -> &[OptionQuote<F>] {
        &self.options
    }

    pub fn polar(&self) -> PolarClassification {
        polar_classification(&self.tree)
    }

    /// Same market with a different terminal payoff.
    pub fn with_payoff(&self, payoff: Vec<Vector<F>>) -> Self {
        assert_eq!(payoff.len(), self.tree.len());
        MarketSpec { payoff, ..self.clone() }
    }

    /// Same market with the option list replaced without validation of
    /// quotes beyond shape.
    pub fn without_options(&self) -> Self {
        MarketSpec { options: Vec::new(), ..self.clone() }
    }
}

/// `K x R_+`, `C x R` and `G` padded with a zero; the appended coordinate
/// becomes the numeraire.
pub fn bar_extension<F: Scalar>(spec: &MarketSpec<F>) -> MarketSpec<F> {
    let solvency = spec.solvency.iter().map(|k| k.times_halfline()).collect();
    let constraint = spec.constraint.iter().map(|c| c.times_line()).collect();
    let payoff = spec.payoff.iter().map(|g| g.extended(F::zero())).collect();
    let options = spec
        .options
        .iter()
        .map(|o| OptionQuote {
            payoff: o.payoff.iter().map(|g| g.extended(F::zero())).collect(),
            bid: o.bid.clone(),
            ask: o.ask.clone(),
        })
        .collect();
    MarketSpec::new(spec.dim + 1, spec.tree.clone(), solvency, constraint, payoff)
        .and_then(|m| m.with_options(options))
        .expect("extension of a valid market is valid")
}

// ---------------------------------------------------------------------------
// File format

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketFile {
    dimension: usize,
    horizon: usize,
    nodes: Vec<NodeFile>,
    cones: BTreeMap<String, ConeFile>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    constraints: BTreeMap<String, ConstraintFile>,
    payoff: BTreeMap<String, Vec<Value>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    options: Vec<OptionFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeFile {
    id: String,
    time: usize,
    parent: Option<String>,
    #[serde(default)]
    kernels: Vec<Vec<KernelEntry>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelEntry {
    child: String,
    prob: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum ConeFile {
    Generators(Vec<Vec<Value>>),
    Halfspaces(Vec<Vec<Value>>),
    BidAsk(Vec<Vec<Value>>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConstraintFile {
    Named(String),
    Cone(ConeFile),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionFile {
    payoff: BTreeMap<String, Vec<Value>>,
    bid: Value,
    ask: Value,
}

fn rational<F: Scalar>(v: &Value, context: &str) -> Result<F, MarketError> {
    let parsed = match v {
        Value::String(s) => F::parse_exact(s),
        Value::Number(n) if n.is_i64() => Some(F::from_int(n.as_i64().expect("checked"))),
        _ => None,
    };
    parsed.ok_or_else(|| MarketError::NonRational {
        literal: match v {
            Value::String(s) => format!("{s:?}"),
            other => other.to_string(),
        },
        context: context.to_string(),
    })
}

fn rational_vector<F: Scalar>(v: &[Value], dim: usize, context: &str) -> Result<Vector<F>, MarketError> {
    if v.len() != dim {
        return Err(MarketError::Structure(format!("{context}: expected {dim} entries, found {}", v.len())));
    }
    Ok(Vector::new(v.iter().map(|x| rational(x, context)).collect::<Result<_, _>>()?))
}

fn rational_matrix<F: Scalar>(rows: &[Vec<Value>], dim: usize, context: &str) -> Result<Vec<Vector<F>>, MarketError> {
    rows.iter().map(|r| rational_vector(r, dim, context)).collect()
}

fn cone_from_file<F: Scalar>(c: &ConeFile, dim: usize, context: &str) -> Result<PolyhedralCone<F>, MarketError> {
    match c {
        ConeFile::Generators(rows) => Ok(PolyhedralCone::from_generators(dim, rational_matrix(rows, dim, context)?)?),
        ConeFile::Halfspaces(rows) => Ok(PolyhedralCone::from_halfspaces(dim, rational_matrix(rows, dim, context)?)?),
        ConeFile::BidAsk(rows) => {
            if rows.len() != dim {
                return Err(MarketError::Structure(format!("{context}: bid-ask matrix must be {dim}x{dim}")));
            }
            let pi: Vec<Vec<F>> =
                rational_matrix(rows, dim, context)?.into_iter().map(Vector::into_inner).collect();
            solvency_from_bidask(&pi)
        }
    }
}

fn strings<F: Scalar>(v: &Vector<F>) -> Vec<Value> {
    v.iter().map(|x| Value::String(x.to_string())).collect()
}

impl<F: Scalar> MarketSpec<F> {
    pub fn from_json_str(text: &str) -> Result<Self, MarketError> {
        let file: MarketFile = serde_json::from_str(text).map_err(|e| MarketError::Parse(e.to_string()))?;
        Self::from_file(file)
    }

    fn from_file(file: MarketFile) -> Result<Self, MarketError> {
        let dim = file.dimension;
        let index: HashMap<&str, usize> =
            file.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut nodes: Vec<Node<F>> = Vec::with_capacity(file.nodes.len());
        for n in &file.nodes {
            let parent = match &n.parent {
                None => None,
                Some(p) => Some(
                    *index
                        .get(p.as_str())
                        .ok_or_else(|| MarketError::invariant(&n.id, format!("unknown parent {p}")))?,
                ),
            };
            nodes.push(Node { id: n.id.clone(), time: n.time, parent, children: Vec::new(), kernels: Vec::new() });
        }
        for i in 0..nodes.len() {
            if let Some(p) = nodes[i].parent {
                nodes[p].children.push(i);
            }
        }
        for (i, n) in file.nodes.iter().enumerate() {
            let children = nodes[i].children.clone();
            let mut kernels = Vec::with_capacity(n.kernels.len());
            for k in &n.kernels {
                let mut probs = vec![F::zero(); children.len()];
                for e in k {
                    let pos = index
                        .get(e.child.as_str())
                        .and_then(|c| children.iter().position(|x| x == c))
                        .ok_or_else(|| MarketError::invariant(&n.id, format!("kernel names {} which is not a child", e.child)))?;
                    let p = rational::<F>(&e.prob, &format!("kernel at node {}", n.id))?;
                    probs[pos] = probs[pos].clone() + p;
                }
                kernels.push(probs);
            }
            nodes[i].kernels = kernels;
        }
        let tree = ScenarioTree::from_nodes(file.horizon, nodes)?;

        let known = |id: &String, what: &str| -> Result<(), MarketError> {
            match tree.find(id) {
                Some(_) => Ok(()),
                None => Err(MarketError::Structure(format!("{what} given for unknown node {id}"))),
            }
        };
        for id in file.cones.keys() {
            known(id, "cone")?;
        }
        for id in file.constraints.keys() {
            known(id, "constraint")?;
        }
        for id in file.payoff.keys() {
            known(id, "payoff")?;
        }

        let mut solvency = Vec::with_capacity(tree.len());
        let mut constraint = Vec::with_capacity(tree.len());
        let mut payoff = Vec::with_capacity(tree.len());
        for node in tree.nodes() {
            let id = &node.id;
            let k = file.cones.get(id).ok_or_else(|| MarketError::invariant(id, "missing solvency cone"))?;
            solvency.push(cone_from_file(k, dim, &format!("cone of node {id}"))?);
            constraint.push(match file.constraints.get(id) {
                None => PolyhedralCone::full(dim),
                Some(ConstraintFile::Named(name)) if name == "unconstrained" => PolyhedralCone::full(dim),
                Some(ConstraintFile::Named(name)) => {
                    return Err(MarketError::invariant(id, format!("unknown constraint {name:?}")))
                }
                Some(ConstraintFile::Cone(c)) => cone_from_file(c, dim, &format!("constraint of node {id}"))?,
            });
            payoff.push(if node.is_leaf() {
                let g = file.payoff.get(id).ok_or_else(|| MarketError::invariant(id, "missing payoff"))?;
                rational_vector(g, dim, &format!("payoff of node {id}"))?
            } else if file.payoff.contains_key(id) {
                return Err(MarketError::invariant(id, "payoff given at a non-leaf node"));
            } else {
                Vector::zeros(dim)
            });
        }
        let spec = MarketSpec::new(dim, tree, solvency, constraint, payoff)?;

        let mut options = Vec::with_capacity(file.options.len());
        for (k, o) in file.options.iter().enumerate() {
            let context = format!("option {k}");
            let mut payoff = vec![Vector::zeros(dim); spec.tree.len()];
            for (id, g) in &o.payoff {
                let node = spec.tree.find(id).ok_or_else(|| MarketError::Structure(format!("{context} pays at unknown node {id}")))?;
                if !spec.tree.node(node).is_leaf() {
                    return Err(MarketError::invariant(id, format!("{context} pays at a non-leaf node")));
                }
                payoff[node] = rational_vector(g, dim, &context)?;
            }
            options.push(OptionQuote { payoff, bid: rational(&o.bid, &context)?, ask: rational(&o.ask, &context)? });
        }
        spec.with_options(options)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, MarketError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| MarketError::Io { path: path.display().to_string(), source })?;
        Self::from_json_str(&text)
    }

    fn to_file(&self) -> MarketFile {
        let tree = &self.tree;
        let nodes = tree
            .nodes()
            .iter()
            .map(|n| NodeFile {
                id: n.id.clone(),
                time: n.time,
                parent: n.parent.map(|p| tree.node(p).id.clone()),
                kernels: n
                    .kernels
                    .iter()
                    .map(|k| {
                        n.children
                            .iter()
                            .zip(k)
                            .map(|(&c, p)| KernelEntry { child: tree.node(c).id.clone(), prob: Value::String(p.to_string()) })
                            .collect()
                    })
                    .collect(),
            })
            .collect();
        let matrix = |rows: &[Vector<F>]| rows.iter().map(strings).collect::<Vec<_>>();
        let full = PolyhedralCone::full(self.dim);
        let mut cones = BTreeMap::new();
        let mut constraints = BTreeMap::new();
        let mut payoff = BTreeMap::new();
        for (i, n) in tree.nodes().iter().enumerate() {
            cones.insert(n.id.clone(), ConeFile::Generators(matrix(self.solvency[i].generators())));
            let c = &self.constraint[i];
            if *c != full {
                constraints.insert(n.id.clone(), ConstraintFile::Cone(ConeFile::Halfspaces(matrix(c.halfspaces()))));
            }
            if n.is_leaf() {
                payoff.insert(n.id.clone(), strings(&self.payoff[i]));
            }
        }
        let options = self
            .options
            .iter()
            .map(|o| OptionFile {
                payoff: tree.leaves().iter().map(|&l| (tree.node(l).id.clone(), strings(&o.payoff[l]))).collect(),
                bid: Value::String(o.bid.to_string()),
                ask: Value::String(o.ask.to_string()),
            })
            .collect();
        MarketFile { dimension: self.dim, horizon: tree.horizon(), nodes, cones, constraints, payoff, options }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("market serializes") + "\n"
    }

    /// Set equality of every component, with cones compared as sets.
    pub fn same_market(&self, other: &Self) -> bool {
        let (a, b) = (&self.tree, &other.tree);
        self.dim == other.dim
            && a.horizon() == b.horizon()
            && a.len() == b.len()
            && a.nodes().iter().zip(b.nodes()).all(|(x, y)| {
                x.id == y.id
                    && x.time == y.time
                    && x.parent == y.parent
                    && x.children == y.children
                    && x.kernels == y.kernels
            })
            && self.solvency == other.solvency
            && self.constraint == other.constraint
            && a.leaves().iter().all(|&l| self.payoff[l] == other.payoff[l])
            && self.options.len() == other.options.len()
            && self.options.iter().zip(&other.options).all(|(x, y)| {
                x.bid == y.bid && x.ask == y.ask && a.leaves().iter().all(|&l| x.payoff[l] == y.payoff[l])
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_frac(n, d)
    }

    fn bidask(p12: Rational, p21: Rational) -> PolyhedralCone<Rational> {
        solvency_from_bidask(&[vec![q(1, 1), p12], vec![p21, q(1, 1)]]).unwrap()
    }

    #[test]
    fn bidask_cones() {
        let k = bidask(q(1, 1), q(1, 1));
        assert_eq!(k, PolyhedralCone::from_halfspaces(2, vec![Vector::from_ints(&[1, 1])]).unwrap());
        assert!(!k.dual().has_nonempty_interior());
        let k = bidask(q(2, 1), q(2, 1));
        assert_eq!(
            k.dual(),
            PolyhedralCone::from_generators(2, vec![Vector::from_ints(&[1, 2]), Vector::from_ints(&[2, 1])]).unwrap()
        );
        let s = bidask(q(2, 3), q(3, 1)).dual().normalized_section(1).unwrap();
        assert_eq!(s.vertices, vec![Vector::new(vec![q(3, 2), q(1, 1)]), Vector::new(vec![q(3, 1), q(1, 1)])]);
        assert!(solvency_from_bidask(&[vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]).is_err());
        assert!(solvency_from_bidask(&[vec![q(1, 1), q(0, 1)], vec![q(1, 1), q(1, 1)]]).is_err());
    }

    fn two_child_tree(kernels: Vec<Vec<Rational>>) -> ScenarioTree<Rational> {
        let mut b = TreeBuilder::new("root");
        b.child(0, "u");
        b.child(0, "w");
        b.kernels(0, kernels);
        b.build(1).unwrap()
    }

    #[test]
    fn polar_sets() {
        let t = two_child_tree(vec![vec![q(1, 1), q(0, 1)]]);
        let p = polar_classification(&t);
        assert_eq!(p.polar_nodes(), vec![2]);
        let t = two_child_tree(vec![vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert!(polar_classification(&t).polar_nodes().is_empty());

        let mut b = TreeBuilder::new("r");
        let u = b.child(0, "u");
        let w = b.child(0, "w");
        let uu = b.child(u, "uu");
        let ww = b.child(w, "ww");
        b.kernels(0, vec![vec![q(0, 1), q(1, 1)]]).kernels(u, vec![vec![q(1, 1)]]).kernels(w, vec![vec![q(1, 1)]]);
        let t = b.build(2).unwrap();
        let p = polar_classification(&t);
        assert!(p.is_polar(u) && p.is_polar(uu));
        assert!(p.is_non_polar(w) && p.is_non_polar(ww));
    }

    #[test]
    fn tree_validation() {
        let mut b = TreeBuilder::<Rational>::new("root");
        b.child(0, "u");
        b.child(0, "w");
        b.kernels(0, vec![vec![q(1, 2), q(2, 5)]]);
        let err = b.build(1).unwrap_err();
        assert_eq!(err.to_string(), "kernel not stochastic at node root");

        let mut b = TreeBuilder::<Rational>::new("root");
        b.child(0, "u");
        b.kernels(0, vec![vec![q(1, 1)]]);
        assert!(b.build(2).is_err());
    }

    #[test]
    fn support_hull() {
        let t = two_child_tree(vec![vec![q(1, 2), q(1, 2)]]);
        let family = vec![bidask(q(2, 1), q(2, 1)).dual(), bidask(q(2, 3), q(3, 1)).dual(), bidask(q(4, 1), q(1, 2)).dual()];
        let h = quasi_sure_support(&t, 0, &family).unwrap();
        let s = h.normalized_section(1).unwrap();
        assert_eq!(s.vertices, vec![Vector::new(vec![q(1, 4), q(1, 1)]), Vector::new(vec![q(3, 1), q(1, 1)])]);
        let t = two_child_tree(vec![vec![q(1, 1), q(0, 1)]]);
        assert_eq!(quasi_sure_support(&t, 0, &family).unwrap(), family[1]);
    }

    #[test]
    fn bar_extension_of_constrained_market() {
        let mut b = TreeBuilder::new("root");
        b.child(0, "u");
        b.kernels(0, vec![vec![q(1, 1)]]);
        let tree = b.build(1).unwrap();
        let k = bidask(q(2, 1), q(2, 1));
        let c = PolyhedralCone::ray(Vector::from_ints(&[1, 0]));
        let g = vec![Vector::zeros(2), Vector::from_ints(&[1, 0])];
        assert!(MarketSpec::new(2, tree.clone(), vec![k.clone(), k.clone()], vec![c.clone(), c.clone()], g.clone()).is_err());
        let spec = MarketSpec::new_general(2, tree, vec![k.clone(), k], vec![c.clone(), c], g).unwrap();
        let ext = bar_extension(&spec);
        assert_eq!(ext.dim(), 3);
        let expected = PolyhedralCone::from_generators(
            3,
            vec![Vector::from_ints(&[1, 0, 0]), Vector::from_ints(&[0, 0, 1]), Vector::from_ints(&[0, 0, -1])],
        )
        .unwrap();
        assert_eq!(*ext.constraint(0), expected);
        assert_eq!(*ext.payoff(1), Vector::from_ints(&[1, 0, 0]));
    }

    const FILE: &str = r#"{
        "dimension": 2,
        "horizon": 1,
        "nodes": [
            {"id": "root", "time": 0, "parent": null,
             "kernels": [[{"child": "u", "prob": "1/2"}, {"child": "w", "prob": "1/2"}]]},
            {"id": "u", "time": 1, "parent": "root"},
            {"id": "w", "time": 1, "parent": "root"}
        ],
        "cones": {
            "root": {"bid_ask": [["1", "2"], ["2", "1"]]},
            "u": {"bid_ask": [["1", "2/3"], ["3", "1"]]},
            "w": {"generators": [["1", "0"], ["0", "1"], ["4", "-1"], ["-1", "1/2"]]}
        },
        "payoff": {"u": ["1", "0"], "w": ["0", "0"]}
    }"#;

    #[test]
    fn load_and_round_trip() {
        let spec = MarketSpec::<Rational>::from_json_str(FILE).unwrap();
        assert_eq!(spec.tree().len(), 3);
        let again = MarketSpec::<Rational>::from_json_str(&spec.to_json_string()).unwrap();
        assert!(spec.same_market(&again));
        assert_eq!(again.to_json_string(), spec.to_json_string());
    }

    #[test]
    fn loader_errors() {
        let bad = FILE.replace(r#""prob": "1/2"}, {"child": "w", "prob": "1/2"}"#, r#""prob": "1/2"}, {"child": "w", "prob": "2/5"}"#);
        let err = MarketSpec::<Rational>::from_json_str(&bad).unwrap_err();
        assert_eq!(err.to_string(), "kernel not stochastic at node root");

        let bad = FILE.replace(r#"{"bid_ask": [["1", "2"], ["2", "1"]]}"#, r#"{"halfspaces": [["1", "1"]]}"#);
        let err = MarketSpec::<Rational>::from_json_str(&bad).unwrap_err();
        assert_eq!(err.to_string(), "efficient friction violated at node root");

        let bad = FILE.replace(r#""prob": "1/2"}, {"#, r#""prob": 0.5}, {"#);
        assert!(matches!(MarketSpec::<Rational>::from_json_str(&bad), Err(MarketError::NonRational { .. })));

        let bad = FILE.replace(r#""payoff": {"u": ["1", "0"], "#, r#""payoff": {"#);
        assert_eq!(MarketSpec::<Rational>::from_json_str(&bad).unwrap_err().to_string(), "missing payoff at node u");
    }
}
