use friction::{Cone, LinearProgram, LpOutcome, RVector, Rational, Relation, Representation, Scalar, Sense};
use proptest::prelude::*;

fn vector(dim: usize) -> impl Strategy<Value = RVector> {
    prop::collection::vec(-3i64..=3, dim).prop_map(|c| RVector::from_ints(&c))
}

fn generated(dim: usize) -> impl Strategy<Value = Cone> {
    prop::collection::vec(vector(dim), 1..=5).prop_map(move |g| Cone::from_generators(dim, g).unwrap())
}

fn cut_out(dim: usize) -> impl Strategy<Value = Cone> {
    prop::collection::vec(vector(dim), 0..=4).prop_map(move |h| Cone::from_halfspaces(dim, h).unwrap())
}

fn any_cone(dim: usize) -> impl Strategy<Value = Cone> {
    prop_oneof![generated(dim), cut_out(dim)]
}

fn pair() -> impl Strategy<Value = (Cone, Cone, RVector)> {
    (2usize..=4).prop_flat_map(|d| (any_cone(d), any_cone(d), vector(d)))
}

// x is a nonnegative combination of the generators, decided by an LP
fn in_span(c: &Cone, x: &RVector) -> bool {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let vars: Vec<usize> = c.generators().iter().map(|_| lp.add_nonneg(Rational::from_int(0))).collect();
    for i in 0..c.dim() {
        let row = vars.iter().zip(c.generators()).map(|(&v, g)| (v, g[i].clone())).collect();
        lp.add_constraint(row, Relation::Eq, x[i].clone());
    }
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

// x = a + b with a, b cut out by the halfspaces of their cones
fn in_sum_by_halfspaces(a: &Cone, b: &Cone, x: &RVector) -> bool {
    let mut lp = LinearProgram::new(Sense::Minimize);
    let zero = || Rational::from_int(0);
    let av: Vec<usize> = (0..x.dim()).map(|_| lp.add_free(zero())).collect();
    let bv: Vec<usize> = (0..x.dim()).map(|_| lp.add_free(zero())).collect();
    for (vars, cone) in [(&av, a), (&bv, b)] {
        for n in cone.halfspaces() {
            lp.add_constraint(vars.iter().zip(n.iter()).map(|(&v, c)| (v, c.clone())).collect(), Relation::Ge, zero());
        }
    }
    for i in 0..x.dim() {
        lp.add_constraint(vec![(av[i], Rational::from_int(1)), (bv[i], Rational::from_int(1))], Relation::Eq, x[i].clone());
    }
    matches!(lp.solve(), LpOutcome::Optimal { .. })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn double_dual_is_identity(c in (2usize..=4).prop_flat_map(any_cone)) {
        prop_assert!(c.dual().dual().same_set(&c));
    }

    #[test]
    fn representations_round_trip(c in (2usize..=4).prop_flat_map(any_cone)) {
        let h = c.convert(Representation::Halfspaces);
        let v = c.convert(Representation::Generators);
        let from_h = Cone::from_halfspaces(c.dim(), h.halfspaces().to_vec()).unwrap();
        let from_v = Cone::from_generators(c.dim(), v.generators().to_vec()).unwrap();
        prop_assert!(from_h.same_set(&c) && from_v.same_set(&c));
        for g in v.generators() {
            for a in h.halfspaces() {
                prop_assert!(a.dot(g) >= Rational::from_int(0));
            }
        }
    }

    #[test]
    fn dual_of_sum_is_intersection_of_duals((a, b, _) in pair()) {
        let lhs = a.minkowski_sum(&b).unwrap().dual();
        let rhs = a.dual().intersect(&b.dual()).unwrap();
        prop_assert!(lhs.same_set(&rhs));
    }

    #[test]
    fn hull_of_union_is_sum((a, b, x) in pair()) {
        let hull = Cone::conic_hull_of_union([&a, &b]).unwrap();
        prop_assert!(hull.same_set(&a.minkowski_sum(&b).unwrap()));
        prop_assert!(a.is_subset(&hull) && b.is_subset(&hull));
        prop_assert_eq!(hull.contains(&x), in_sum_by_halfspaces(&a, &b, &x));
    }

    #[test]
    fn membership_matches_lp_oracle(
        (c, x) in (2usize..=4).prop_flat_map(|d| (any_cone(d), vector(d)))
    ) {
        prop_assert_eq!(c.contains(&x), in_span(&c, &x));
        if c.contains_in_interior(&x) {
            prop_assert!(c.contains(&x));
        }
    }
}
