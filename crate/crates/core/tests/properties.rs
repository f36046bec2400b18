use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use afkit_core::dimension::{
    diagram_to_system, ehs_realize, ehs_realize_with_endo, shen_solve, telescope, validate_diagram,
    validate_endomorphism, verify_certificate, BratteliDiagram, Cone, OrderedStagedSystem,
};
use afkit_core::eplag::{
    divisibility_fingerprint, tree_to_eplag, verify_certificate as verify_member, EplagGroup, Membership,
    PrimeLabeledGraph, Tree,
};
use afkit_core::invariants::{
    crossed_product_invariant, d_p_absorbing, group_to_invariant, kp_isomorphic, o_infty_st_absorbing,
    FingerprintBounds, GroupDescriptor,
};
use afkit_core::limits::{LimitElement, StagedSystem};
use afkit_core::rordam::{rordam_pair, rordam_verify};
use afkit_core::schreier::{coset_representative, schreier_generators, FreeWord, KernelOracle, SubgroupOracle};
use afkit_core::{smith_normal_form, FgAbelianGroup, IntMatrix, Truth};

fn matrix(max_dim: usize, max_entry: i64) -> impl Strategy<Value = IntMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(proptest::collection::vec(-max_entry..=max_entry, c), r).prop_map(move |rows| {
            let rows = rows.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect();
            IntMatrix::from_rows(rows, c).unwrap()
        })
    })
}

fn group() -> impl Strategy<Value = FgAbelianGroup> {
    (1usize..=3).prop_flat_map(|n| {
        proptest::collection::vec(proptest::collection::vec(-6i64..=6, n), 0..=3).prop_map(move |rows| {
            let rows: Vec<Vec<BigInt>> = rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
            FgAbelianGroup::new(n, IntMatrix::from_rows(rows, n).unwrap()).unwrap()
        })
    })
}

fn finite_group() -> impl Strategy<Value = FgAbelianGroup> {
    proptest::collection::vec(1u64..=5, 1..=2).prop_map(|orders| {
        let f: Vec<BigInt> = orders.into_iter().map(BigInt::from).collect();
        FgAbelianGroup::new(f.len(), IntMatrix::diagonal(&f)).unwrap()
    })
}

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7])
}

fn simplicial_system() -> impl Strategy<Value = OrderedStagedSystem> {
    prop::sample::select(vec![
        vec![vec![1i64]],
        vec![vec![2]],
        vec![vec![1, 1], vec![1, 0]],
        vec![vec![2, 1], vec![1, 1]],
        vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]],
    ])
    .prop_map(|rows| {
        let n = rows.len();
        let m = IntMatrix::from_rows(
            rows.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect(),
            n,
        )
        .unwrap();
        let s = StagedSystem::stationary(m).unwrap();
        OrderedStagedSystem::new(s, Cone::Simplicial, LimitElement::new(0, vec![BigInt::one(); n])).unwrap()
    })
}

/// Brute force on a finite `Z/a x Z/b`: whether `x -> n x` is onto, and
/// whether it is one-to-one.
fn brute_times_n(orders: &[u64], n: u64) -> (bool, bool) {
    let elements: Vec<Vec<u64>> = orders.iter().fold(vec![vec![]], |acc, &o| {
        acc.into_iter()
            .flat_map(|v| {
                (0..o).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect()
    });
    let times = |v: &Vec<u64>| -> Vec<u64> { v.iter().zip(orders).map(|(&x, &o)| (x * n) % o).collect() };
    let image: BTreeSet<Vec<u64>> = elements.iter().map(times).collect();
    let onto = elements.iter().all(|e| image.contains(e));
    let kernel = elements.iter().filter(|e| times(e).iter().all(|&x| x == 0)).count();
    (onto, kernel == 1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_transforms_and_chain(m in matrix(4, 6)) {
        let f = smith_normal_form(&m);
        prop_assert_eq!(f.u.checked_mul(&m).unwrap().checked_mul(&f.v).unwrap(), f.s.clone());
        prop_assert!(f.u.checked_mul(&f.u_inv).unwrap() == IntMatrix::identity(m.rows()));
        prop_assert!(f.v.checked_mul(&f.v_inv).unwrap() == IntMatrix::identity(m.cols()));
        let d = f.diagonal();
        for w in d.windows(2) {
            let divides = if w[0].is_zero() { w[1].is_zero() } else { (&w[1] % &w[0]).is_zero() };
            prop_assert!(divides);
        }
        prop_assert!(d.iter().all(|x| !x.is_negative()));
    }

    #[test]
    fn quotients(g in group()) {
        let n = g.num_generators();
        let all: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect();
        prop_assert!(g.quotient_by(&all).unwrap().is_trivial());
        prop_assert!(g.quotient_by(&[]).unwrap().is_isomorphic(&g));
        prop_assert!(g.canonical().is_isomorphic(&g));
    }

    #[test]
    fn divisibility_matches_brute_force(orders in proptest::collection::vec(1u64..=7, 1..=2), n in 1u64..=12) {
        let f: Vec<BigInt> = orders.iter().map(|&o| BigInt::from(o)).collect();
        let g = FgAbelianGroup::new(f.len(), IntMatrix::diagonal(&f)).unwrap();
        let (onto, injective) = brute_times_n(&orders, n);
        prop_assert_eq!(g.is_n_divisible(n), onto);
        prop_assert_eq!(g.is_uniquely_n_divisible(n), onto && injective);
    }

    #[test]
    fn unique_divisibility_implies_divisibility(g in group(), n in 1u64..=12) {
        if g.is_uniquely_n_divisible(n) {
            prop_assert!(g.is_n_divisible(n));
        }
    }

    #[test]
    fn localization_is_idempotent(g in group(), p in prime()) {
        let once = g.localize(p).unwrap();
        let twice = once.localize(p).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn push_is_functorial(v in proptest::collection::vec(-5i64..=5, 2), a in 0usize..3, b in 0usize..3) {
        let s = StagedSystem::stationary(IntMatrix::from_i64(&[&[2, 1], &[1, 1]])).unwrap();
        let e = LimitElement::from_i64(0, &v);
        let direct = s.push(&e, a + b).unwrap();
        let stepwise = s.push(&s.push(&e, a).unwrap(), a + b).unwrap();
        prop_assert_eq!(direct, stepwise);
    }

    #[test]
    fn limit_equal_is_an_equivalence(
        x in proptest::collection::vec(-3i64..=3, 2),
        y in proptest::collection::vec(-3i64..=3, 2),
        z in proptest::collection::vec(-3i64..=3, 2),
        sx in 0usize..3, sy in 0usize..3, sz in 0usize..3,
    ) {
        let s = StagedSystem::stationary(IntMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap();
        let (a, b, c) = (LimitElement::from_i64(sx, &x), LimitElement::from_i64(sy, &y), LimitElement::from_i64(sz, &z));
        prop_assert_eq!(s.limit_equal(&a, &a, 4).unwrap(), Truth::True);
        let ab = s.limit_equal(&a, &b, 4).unwrap();
        prop_assert_eq!(ab, s.limit_equal(&b, &a, 4).unwrap());
        let bc = s.limit_equal(&b, &c, 4).unwrap();
        if ab == Truth::True && bc == Truth::True {
            prop_assert_eq!(s.limit_equal(&a, &c, 4).unwrap(), Truth::True);
        }
    }

    #[test]
    fn injective_systems_decide(x in proptest::collection::vec(-4i64..=4, 2), y in proptest::collection::vec(-4i64..=4, 2), s1 in 0usize..3) {
        let s = StagedSystem::prefix_tail(
            vec![IntMatrix::from_i64(&[&[1, 0], &[0, 3]])],
            vec![IntMatrix::from_i64(&[&[2, 1], &[1, 1]])],
        ).unwrap();
        prop_assert!(s.is_injective());
        let t = s.limit_equal(&LimitElement::from_i64(s1, &x), &LimitElement::from_i64(0, &y), 1).unwrap();
        prop_assert!(t != Truth::Unknown);
    }

    #[test]
    fn alpha_infinity_round_trip(v in proptest::collection::vec(-5i64..=5, 2), stage in 0usize..4) {
        let s = StagedSystem::stationary(IntMatrix::from_i64(&[&[2, 1], &[0, 1]])).unwrap();
        let e = LimitElement::from_i64(stage, &v);
        let back = s.alpha_infinity_apply(&s.alpha_infinity_inverse(&e).unwrap()).unwrap();
        prop_assert_eq!(s.limit_equal(&back, &e, 4).unwrap(), Truth::True);
        let fwd = s.alpha_infinity_inverse(&s.alpha_infinity_apply(&e).unwrap()).unwrap();
        prop_assert_eq!(s.limit_equal(&fwd, &e, 4).unwrap(), Truth::True);
    }

    #[test]
    fn rordam_cokernel_is_the_group(orders in proptest::collection::vec(0u64..=6, 1..=2), width in 2usize..=4) {
        let f: Vec<BigInt> = orders.iter().map(|&o| BigInt::from(o)).collect();
        let g = FgAbelianGroup::new(f.len(), IntMatrix::diagonal(&f)).unwrap();
        let pair = rordam_pair(&g, width).unwrap();
        prop_assert!(pair.kernel_data_check());
        prop_assert!(rordam_verify(&pair, &g, 3).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn schreier_generators_lie_in_the_kernel(r in 1usize..=2, m in 2u64..=3) {
        let h = KernelOracle::cyclic(r, m);
        let gens = schreier_generators(&h, m as usize, r);
        prop_assert!(gens.iter().all(|w| h.contains(w)));
        prop_assert_eq!(gens.len(), m as usize * (r - 1) + 1);
    }

    #[test]
    fn coset_representative_is_idempotent(syl in proptest::collection::vec((0usize..2, -2i64..=2), 0..4), m in 2u64..=3) {
        let h = KernelOracle::cyclic(2, m);
        let a = FreeWord::from_syllables(syl);
        let rep = coset_representative(&h, &a, 2);
        prop_assert_eq!(coset_representative(&h, &rep, 2), rep.clone());
        prop_assert!(h.contains(&rep.mul(&a.inverse())));
    }

    #[test]
    fn shen_certificates_reverify(d in simplicial_system(), k in 1usize..=5) {
        let theta = d.enumerate_positives(k);
        let cert = shen_solve(&d, &theta, 32).unwrap();
        prop_assert!(verify_certificate(&d, &theta, &cert).unwrap().ok());
    }

    #[test]
    fn ehs_identities(d in simplicial_system(), depth in 1usize..=4) {
        let pos = d.enumerate_positives(depth);
        let r = ehs_realize(&d, &pos, depth, 32).unwrap();
        prop_assert!(validate_diagram(&r.diagram).is_empty());
        for (n, t) in r.theta.iter().enumerate().take(depth) {
            let m = r.diagram.incidence(n).unwrap();
            for (i, x) in t.iter().enumerate() {
                let top = r.theta[n + 1].iter().map(|e| e.stage).max().unwrap_or(0);
                let mut sum = vec![BigInt::zero(); d.system.stage_rank(top)];
                for (j, y) in r.theta[n + 1].iter().enumerate() {
                    for (a, b) in sum.iter_mut().zip(d.system.push(y, top).unwrap().vector) {
                        *a += &m[(i, j)] * b;
                    }
                }
                prop_assert_eq!(d.system.limit_equal(x, &LimitElement::new(top, sum), 8).unwrap(), Truth::True);
            }
        }
        for (c, cert) in r.certificates.iter().zip(&r.shen_inputs) {
            prop_assert!(verify_certificate(&d, cert, c).unwrap().ok());
        }
    }

    #[test]
    fn ehs_endomorphisms_validate(k in 1i64..=4, depth in 1usize..=3) {
        let s = StagedSystem::stationary(IntMatrix::identity(1)).unwrap();
        let d = OrderedStagedSystem::new(s, Cone::Simplicial, LimitElement::from_i64(0, &[1])).unwrap();
        let phi = afkit_core::limits::LimitEndomorphism::stationary(0, IntMatrix::from_i64(&[&[k]]));
        let r = ehs_realize_with_endo(&d, &phi, &d.enumerate_positives(depth), depth, 16).unwrap();
        prop_assert!(validate_endomorphism(&r.diagram, &r.endomorphism).unwrap());
    }

    #[test]
    fn telescoping_preserves_the_limit(v in proptest::collection::vec(-4i64..=4, 2), j in 1usize..3) {
        let d = BratteliDiagram::from_incidences(
            vec![IntMatrix::from_i64(&[&[1, 1]])],
            vec![IntMatrix::from_i64(&[&[1, 1], &[1, 0]])],
            8,
        ).unwrap();
        let cuts = [0, 2, 4, 6];
        let t = telescope(&d, &cuts).unwrap();
        prop_assert!(validate_diagram(&t).is_empty());
        let orig = diagram_to_system(&d).unwrap();
        let tele = diagram_to_system(&t).unwrap();
        let x = LimitElement::from_i64(j, &v);
        let pushed = tele.system.push(&x, j + 1).unwrap();
        let same = orig.system.push(&LimitElement::from_i64(cuts[j], &v), cuts[j + 1]).unwrap();
        prop_assert_eq!(pushed.vector, same.vector);
    }

    #[test]
    fn membership_is_monotone_and_certified(num in -6i64..=6, den_exp in 0u32..=2, b in 1u32..=3) {
        let g = EplagGroup::new(PrimeLabeledGraph::new(
            vec!["v".into(), "w".into()],
            vec![3, 11],
            vec![(0, 1)],
            vec![7],
            [5].into(),
        ).unwrap());
        let den = BigInt::from(15u64.pow(den_exp) * 7);
        let x = vec![BigRational::new(BigInt::from(num), den.clone()), BigRational::new(BigInt::from(num), den)];
        if let Membership::Member { certificate } = g.membership(&x, b).unwrap() {
            prop_assert!(verify_member(&x, &certificate));
            prop_assert!(g.membership(&x, b + 1).unwrap().is_member());
        }
        for gen in g.generators(b) {
            prop_assert!(g.membership(&gen.to_qvector(2), b).unwrap().is_member());
        }
    }

    #[test]
    fn fingerprints_forget_names(perm in Just((0usize..5).collect::<Vec<_>>()).prop_shuffle()) {
        let tree = Tree { children: vec![Tree::chain(1), Tree::leaf(), Tree::leaf()] };
        let g = tree_to_eplag(&tree, &[3].into()).unwrap();
        let h = EplagGroup::new(g.graph.permuted(&perm).unwrap());
        prop_assert_eq!(divisibility_fingerprint(&g, 12, 2).unwrap(), divisibility_fingerprint(&h, 12, 2).unwrap());
    }

    #[test]
    fn kp_reflexive_and_symmetric(a in group(), b in group()) {
        let ia = group_to_invariant(GroupDescriptor::Fg(a));
        let ib = group_to_invariant(GroupDescriptor::Fg(b));
        let bounds = FingerprintBounds::default();
        prop_assert_eq!(kp_isomorphic(&ia, &ia, bounds).unwrap(), Truth::True);
        prop_assert_eq!(kp_isomorphic(&ia, &ib, bounds).unwrap(), kp_isomorphic(&ib, &ia, bounds).unwrap());
        prop_assert!(o_infty_st_absorbing(&ia).unwrap());
    }

    #[test]
    fn d_p_matches_crossed_product(g in finite_group(), p in prime()) {
        let inv = group_to_invariant(GroupDescriptor::Fg(g.clone()));
        let cross = crossed_product_invariant(&inv, p).unwrap();
        let same = kp_isomorphic(&cross, &inv, FingerprintBounds::default()).unwrap() == Truth::True;
        prop_assert_eq!(d_p_absorbing(&g, p).unwrap(), same);
    }

    #[test]
    fn d_p_matches_crossed_product_with_free_part(g in group(), p in prime()) {
        let inv = group_to_invariant(GroupDescriptor::Fg(g.clone()));
        let cross = crossed_product_invariant(&inv, p).unwrap();
        let same = kp_isomorphic(&cross, &inv, FingerprintBounds::default()).unwrap() == Truth::True;
        prop_assert_eq!(d_p_absorbing(&g, p).unwrap(), same);
    }
}

#[test]
fn gcd_of_orders_decides_unique_divisibility() {
    for o in 1u64..=12 {
        let g = FgAbelianGroup::cyclic(o);
        for n in 1u64..=12 {
            assert_eq!(g.is_uniquely_n_divisible(n), o.gcd(&n) == 1, "Z/{o}, n={n}");
        }
    }
}
