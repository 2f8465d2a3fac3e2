//! Small reference markets used by the tests, the documentation and the
//! bundled instance files.

use crate::market::{solvency_from_bidask, MarketSpec, TreeBuilder};
use crate::scalar::Scalar;
use crate::vector::Vector;
use crate::{Cone, Market, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_frac(n, d)
}

/// Two-asset bid-ask cone whose dual section (second coordinate 1) is
/// `[1/p12, p21]`.
pub fn bidask2(p12: Rational, p21: Rational) -> Cone {
    solvency_from_bidask(&[vec![q(1, 1), p12], vec![p21, q(1, 1)]]).expect("positive entries")
}

/// Two-asset solvency cone whose dual section is `[lo, hi]`.
pub fn section_cone(lo: Rational, hi: Rational) -> Cone {
    bidask2(Rational::from_int(1) / lo, hi)
}

/// One-period, two-asset, unconstrained market. `children` lists the
/// child id, its dual section and its payoff.
pub fn one_period(
    root_section: (Rational, Rational),
    children: &[(&str, (Rational, Rational), [i64; 2])],
    kernels: Vec<Vec<Rational>>,
) -> Market {
    let mut b = TreeBuilder::new("root");
    for (id, _, _) in children {
        b.child(0, *id);
    }
    b.kernels(0, kernels);
    let tree = b.build(1).expect("valid one-period tree");
    let mut solvency = vec![section_cone(root_section.0, root_section.1)];
    let mut payoff = vec![Vector::zeros(2)];
    for (_, (lo, hi), g) in children {
        solvency.push(section_cone(lo.clone(), hi.clone()));
        payoff.push(Vector::from_ints(g));
    }
    let n = tree.len();
    MarketSpec::new(2, tree, solvency, vec![Cone::full(2); n], payoff).expect("valid market")
}

/// Root section `[1/2, 2]`; children `u` with `[3/2, 3]` and `w` with
/// `[1/4, 1/2]`, both charged; claim `(1, 0)` at `u` and nothing at `w`.
pub fn instance_a() -> Market {
    one_period(
        (q(1, 2), q(2, 1)),
        &[("u", (q(3, 2), q(3, 1)), [1, 0]), ("w", (q(1, 4), q(1, 2)), [0, 0])],
        vec![vec![q(1, 2), q(1, 2)]],
    )
}

/// Root section `[1/2, 2]` with a single child priced in `[3, 4]`: buying
/// the first asset at time 0 is a strict arbitrage.
pub fn instance_b() -> Market {
    one_period((q(1, 2), q(2, 1)), &[("v", (q(3, 1), q(4, 1)), [1, 0])], vec![vec![q(1, 1)]])
}

/// Root section `[1/2, 2]`, children `u` with `[1, 3]` and `w` with
/// `[1, 4]`. The children's dual cones do not cover the root's, so some
/// position is solvent at time 1 in every scenario without being solvent
/// at time 0; yet no strict arbitrage exists.
pub fn na2_counterexample() -> Market {
    one_period(
        (q(1, 2), q(2, 1)),
        &[("u", (q(1, 1), q(3, 1)), [2, -1]), ("w", (q(1, 1), q(4, 1)), [-1, 3])],
        vec![vec![q(1, 3), q(2, 3)], vec![q(1, 1), q(0, 1)]],
    )
}
