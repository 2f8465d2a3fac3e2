//! Seeded random markets for property tests and benchmarks.
//!
//! Mid prices follow a multiplicative walk with the last asset as numeraire;
//! bid-ask rates are mid-price ratios widened by random proportional
//! spreads, so the mid price is always strictly inside `K*`. Constraint
//! cones are cut out by normals orthogonal to `e_d`; children keep a subset
//! of their parent's normals, which makes the cones grow along paths.

use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cone::PolyhedralCone;
use crate::market::{solvency_from_bidask, MarketSpec, NodeId, OptionQuote, TreeBuilder};
use crate::scalar::Scalar;
use crate::vector::Vector;
use crate::{Cone, Market, Rational};

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub dims: Vec<usize>,
    pub horizons: Vec<usize>,
    pub max_children: usize,
    pub max_kernels: usize,
    /// Branching is cut back once the tree would exceed this many nodes.
    pub max_nodes: usize,
    /// Probability that the root carries portfolio constraints.
    pub constrained: f64,
    /// Shift every child of one inner node far above its parent's price
    /// band, which forces an empty-interior reduced dual cone there.
    pub force_empty_interior: bool,
    /// Probability that a node's children straddle its mid price: the
    /// second child mirrors the first child's move and both are charged,
    /// so the parent mid lies in the hull of the children's mids. Other
    /// nodes move freely and often admit arbitrage.
    pub straddle: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            dims: vec![2, 3, 4],
            horizons: vec![1, 2, 3],
            max_children: 3,
            max_kernels: 3,
            max_nodes: 16,
            constrained: 0.5,
            force_empty_interior: false,
            straddle: 0.9,
        }
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from_frac(n, d)
}

// closed under m -> 2 - m
const MOVES: [(i64, i64); 7] = [(1, 2), (2, 3), (4, 5), (1, 1), (6, 5), (4, 3), (3, 2)];
const SPREADS: [(i64, i64); 5] = [(1, 10), (1, 5), (1, 4), (1, 3), (1, 2)];

fn pick<T: Copy>(rng: &mut ChaCha8Rng, xs: &[T]) -> T {
    *xs.choose(rng).expect("nonempty")
}

fn bidask_cone(rng: &mut ChaCha8Rng, mid: &[Rational]) -> Cone {
    let d = mid.len();
    let pi: Vec<Vec<Rational>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        q(1, 1)
                    } else {
                        let (a, b) = pick(rng, &SPREADS);
                        mid[j].clone() / mid[i].clone() * (q(1, 1) + q(a, b))
                    }
                })
                .collect()
        })
        .collect();
    solvency_from_bidask(&pi).expect("positive rates")
}

fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<i64> {
    let mut weights: Vec<i64> = (0..n).map(|_| if rng.gen_bool(0.25) { 0 } else { rng.gen_range(1..=3) }).collect();
    if weights.iter().all(|&w| w == 0) {
        weights[rng.gen_range(0..n)] = 1;
    }
    weights
}

fn normalize(weights: Vec<i64>) -> Vec<Rational> {
    let total: i64 = weights.iter().sum();
    weights.into_iter().map(|w| q(w, total)).collect()
}

fn random_normal(rng: &mut ChaCha8Rng, d: usize) -> Vector<Rational> {
    loop {
        let v: Vec<i64> = (0..d).map(|i| if i + 1 == d { 0 } else { rng.gen_range(-1..=2) }).collect();
        if v.iter().any(|&x| x != 0) {
            return Vector::from_ints(&v);
        }
    }
}

fn random_payoff(rng: &mut ChaCha8Rng, d: usize) -> Vector<Rational> {
    Vector::new((0..d).map(|_| q(rng.gen_range(-6..=6), 2)).collect())
}

/// A random valid market; the same seed always gives the same market.
pub fn random_market(seed: u64, cfg: &GeneratorConfig) -> Market {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = pick(&mut rng, &cfg.dims);
    let horizon = pick(&mut rng, &cfg.horizons);

    let mut b = TreeBuilder::new("n0");
    let mut mids: Vec<Vec<Rational>> = vec![(0..d).map(|i| if i + 1 == d { q(1, 1) } else { q(rng.gen_range(2..=8), 4) }).collect()];
    let mut normals: Vec<Vec<Vector<Rational>>> = vec![if rng.gen_bool(cfg.constrained) {
        (0..rng.gen_range(1..=2)).map(|_| random_normal(&mut rng, d)).collect()
    } else {
        Vec::new()
    }];
    let mut times = vec![0usize];
    let mut frontier: Vec<NodeId> = vec![0];
    let mut count = 1;
    let mut forced = false;
    for t in 0..horizon {
        let mut next = Vec::new();
        let remaining_levels = horizon - t;
        for (pos, &v) in frontier.iter().enumerate() {
            // leave room for at least one child per remaining frontier node and level
            let others = frontier.len() - pos - 1 + next.len();
            let budget = cfg.max_nodes.saturating_sub(count + others * remaining_levels) / remaining_levels;
            let max_children = cfg.max_children.min(budget.max(1));
            let n_children = rng.gen_range(1..=max_children);
            let force_here = cfg.force_empty_interior && !forced && (t + 1 == horizon || rng.gen_bool(0.5));
            let straddle = !force_here && rng.gen_bool(cfg.straddle);
            let mut first_moves: Vec<Rational> = Vec::new();
            for k in 0..n_children {
                let id = format!("n{}", count);
                let c = b.child(v, id);
                count += 1;
                let mut moves = Vec::with_capacity(d);
                for i in 0..d {
                    let m = if i + 1 == d {
                        q(1, 1)
                    } else if force_here && i == 0 {
                        q(4, 1)
                    } else if straddle && n_children == 1 {
                        q(1, 1)
                    } else if straddle && k == 1 {
                        q(2, 1) - first_moves[i].clone()
                    } else {
                        let (a, b) = pick(&mut rng, &MOVES);
                        q(a, b)
                    };
                    moves.push(m);
                }
                let mid = mids[v].iter().zip(&moves).map(|(s, m)| s.clone() * m.clone()).collect();
                if k == 0 {
                    first_moves = moves;
                }
                mids.push(mid);
                normals.push(normals[v].iter().filter(|_| rng.gen_bool(0.75)).cloned().collect());
                times.push(t + 1);
                next.push(c);
            }
            if force_here {
                forced = true;
            }
            let n_kernels = rng.gen_range(1..=cfg.max_kernels);
            let mut weights: Vec<Vec<i64>> = (0..n_kernels).map(|_| random_weights(&mut rng, n_children)).collect();
            if straddle {
                for c in 0..n_children.min(2) {
                    if weights.iter().all(|w| w[c] == 0) {
                        let k = rng.gen_range(0..n_kernels);
                        weights[k][c] = 1;
                    }
                }
            }
            let kernels = weights.into_iter().map(normalize).collect();
            b.kernels(v, kernels);
        }
        frontier = next;
    }
    let tree = b.build(horizon).expect("generated tree is valid");
    let n = tree.len();
    let solvency: Vec<Cone> = (0..n).map(|v| bidask_cone(&mut rng, &mids[v])).collect();
    let constraint: Vec<Cone> = (0..n)
        .map(|v| PolyhedralCone::from_halfspaces(d, normals[v].clone()).expect("dimension"))
        .collect();
    let payoff = (0..n).map(|v| if times[v] == horizon { random_payoff(&mut rng, d) } else { Vector::zeros(d) }).collect();
    MarketSpec::new(d, tree, solvency, constraint, payoff).expect("generated market is valid")
}

/// Random claims paying at the leaves, in physical units.
pub fn random_claim(seed: u64, spec: &Market) -> Vec<Vector<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dim();
    spec.tree()
        .nodes()
        .iter()
        .map(|n| if n.is_leaf() { random_payoff(&mut rng, d) } else { Vector::zeros(d) })
        .collect()
}

/// Options whose quotes sit strictly inside the no-arbitrage band `[lo, hi]`
/// given by the caller for each claim.
pub fn quotes_inside(payoffs: Vec<Vec<Vector<Rational>>>, bands: &[(Rational, Rational)], seed: u64) -> Vec<OptionQuote<Rational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    payoffs
        .into_iter()
        .zip(bands)
        .map(|(payoff, (lo, hi))| {
            let width = hi.clone() - lo.clone();
            let (bid, ask) = if width.is_positive() {
                let a = q(rng.gen_range(1..=3), 8);
                let b = q(rng.gen_range(5..=7), 8);
                (lo.clone() + width.clone() * a, lo.clone() + width * b)
            } else {
                (lo.clone() - q(1, 2), hi.clone() + q(1, 2))
            };
            OptionQuote { payoff, bid, ask }
        })
        .collect()
}
