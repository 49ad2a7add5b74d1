use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hyperseq::calculus::{
    check_derivation, default_limits, fuzz_derivations, search, CalculusSpec, FuzzConfig, Limits, System,
};
use hyperseq::decide::{decide, default_decide_limits, verify_branch, DecideSystem, Verdict};
use hyperseq::kripke::{
    bounded_validity, branches, check_frame_class, countermodels_hypersequent, FrameClass, KripkeFrame,
    KripkeModel,
};
use hyperseq::ps4::{copy_branch, ps4_countermodel, random_ps4_model, Ps4Model, Truth3, Vector};
use hyperseq::syntax::{
    parse_formula, parse_hypersequent, subformula_closure, Atom, Formula, Hypersequent, Sequent, Side,
};
use hyperseq::transform::translate;

fn formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![Just("p"), Just("q"), Just("r")].prop_map(Formula::atom);
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::boxed),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
    .boxed()
}

fn pq_formula(depth: u32) -> BoxedStrategy<Formula> {
    let leaf = prop_oneof![Just("p"), Just("q")].prop_map(Formula::atom);
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::neg),
            inner.clone().prop_map(Formula::boxed),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::or(a, b)),
        ]
    })
    .boxed()
}

fn sequent(f: impl Strategy<Value = Formula> + Clone) -> impl Strategy<Value = Sequent> {
    (prop::collection::vec(f.clone(), 0..3), prop::collection::vec(f, 0..3))
        .prop_map(|(l, r)| Sequent::new(l, r))
}

fn hypersequent(max: usize, f: impl Strategy<Value = Formula> + Clone) -> impl Strategy<Value = Hypersequent> {
    prop::collection::vec(sequent(f), 1..=max).prop_map(|c| Hypersequent::new(c).unwrap())
}

fn depth(f: &Formula) -> usize {
    f.depth()
}

/// Random frame rows on `n` worlds.
fn frame(max: usize) -> impl Strategy<Value = KripkeFrame> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(0u64..(1 << n), n).prop_map(KripkeFrame::from_rows)
    })
}

fn model(max: usize) -> impl Strategy<Value = KripkeModel> {
    frame(max).prop_flat_map(|fr| {
        let n = fr.len();
        (Just(fr), prop::collection::vec(0u64..(1 << n), 3)).prop_map(|(fr, bits)| {
            let val = ["p", "q", "r"].iter().map(|a| Atom::new(a)).zip(bits).collect();
            KripkeModel::new(fr, val)
        })
    })
}

fn close(rows: &[u64], reflexive: bool, symmetric: bool, transitive: bool) -> KripkeFrame {
    let n = rows.len();
    let mut r = rows.to_vec();
    if reflexive {
        for (i, row) in r.iter_mut().enumerate() {
            *row |= 1 << i;
        }
    }
    if symmetric {
        for a in 0..n {
            for b in 0..n {
                if r[a] >> b & 1 == 1 {
                    r[b] |= 1 << a;
                }
            }
        }
    }
    let fr = KripkeFrame::from_rows(r);
    if transitive {
        fr.transitive_closure()
    } else {
        fr
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn formula_print_parse_round_trip(f in formula(6)) {
        prop_assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
    }

    #[test]
    fn hypersequent_print_parse_round_trip(h in hypersequent(4, formula(4))) {
        prop_assert_eq!(parse_hypersequent(&h.to_string()).unwrap(), h);
    }

    #[test]
    fn sequent_sides_are_sets(s in sequent(formula(3)), f in formula(3), left in any::<bool>()) {
        let side = if left { Side::Left } else { Side::Right };
        let once = s.with(side, f.clone());
        prop_assert_eq!(once.with(side, f), once);
    }

    #[test]
    fn closure_is_no_larger_than_the_tree(f in formula(6)) {
        prop_assert!(subformula_closure(&f).len() <= f.size());
        prop_assert!(depth(&f) <= 6);
    }

    #[test]
    fn boolean_laws_hold_at_every_world(m in model(4), a in formula(3), b in formula(3)) {
        for w in 0..m.frame.len() {
            let e = |f: &Formula| m.eval_at(w, f).unwrap();
            prop_assert_eq!(e(&a.clone().neg().neg()), e(&a));
            prop_assert_eq!(
                e(&Formula::and(a.clone(), b.clone()).neg()),
                e(&Formula::or(a.clone().neg(), b.clone().neg()))
            );
            prop_assert_eq!(
                e(&Formula::or(a.clone(), b.clone()).neg()),
                e(&Formula::and(a.clone().neg(), b.clone().neg()))
            );
        }
    }

    #[test]
    fn frame_classes_are_monotone(rows in prop::collection::vec(0u64..32, 1..=5)) {
        let n = rows.len();
        let rows: Vec<u64> = rows.iter().map(|r| r & ((1 << n) - 1)).collect();
        let s4 = close(&rows, true, false, true);
        prop_assert!(check_frame_class(&s4, FrameClass::S4).is_ok());
        prop_assert!(check_frame_class(&s4, FrameClass::K4).is_ok());
        prop_assert!(check_frame_class(&s4, FrameClass::T).is_ok());
        let b = close(&rows, true, true, false);
        prop_assert!(check_frame_class(&b, FrameClass::B).is_ok());
        prop_assert!(check_frame_class(&b, FrameClass::KB).is_ok());
        prop_assert!(check_frame_class(&b, FrameClass::T).is_ok());
    }

    #[test]
    fn countermodel_branches_self_check(m in model(4), h in hypersequent(3, formula(3))) {
        if let Some(b) = countermodels_hypersequent(&m, &h).unwrap() {
            prop_assert_eq!(b.len(), h.len());
            for w in b.windows(2) {
                prop_assert!(m.frame.rel(w[0], w[1]));
            }
            for (s, &w) in h.components().iter().zip(&b) {
                for f in &s.left {
                    prop_assert!(m.eval_at(w, f).unwrap());
                }
                for f in &s.right {
                    prop_assert!(!m.eval_at(w, f).unwrap());
                }
            }
        }
    }

    #[test]
    fn translation_is_equivalent(m in model(4), h in hypersequent(3, formula(3))) {
        let t = translate(&h);
        prop_assume!(t.is_ok());
        let i = t.unwrap().formula;
        let branch = countermodels_hypersequent(&m, &h).unwrap().is_some();
        let falsified = (0..m.frame.len()).any(|w| !m.eval_at(w, &i).unwrap());
        prop_assert_eq!(branch, falsified);
    }
}

fn two_valued(m: &Ps4Model, bits: &[u64]) -> (Ps4Model, KripkeModel) {
    let all = (1u64 << m.frame.len()) - 1;
    let atoms: Vec<Atom> = m.val.keys().cloned().collect();
    let val3: BTreeMap<Atom, Vector> = atoms
        .iter()
        .zip(bits)
        .map(|(a, &t)| (a.clone(), Vector { t: t & all, f: !t & all }))
        .collect();
    let val2 = atoms.iter().cloned().zip(bits.iter().map(|t| t & all)).collect();
    (
        Ps4Model::new(m.frame.clone(), val3),
        KripkeModel::new(m.frame.r_frame().clone(), val2),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn ps4_collapses_to_kripke_without_gaps(seed in any::<u64>(), bits in prop::collection::vec(any::<u64>(), 2), f in pq_formula(4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_ps4_model(&mut rng, 5, &[Atom::new("p"), Atom::new("q")]);
        let (m3, m2) = two_valued(&m, &bits);
        for w in 0..m.frame.len() {
            let expected = if m2.eval_at(w, &f).unwrap() { Truth3::True } else { Truth3::False };
            prop_assert_eq!(m3.eval3_at(w, &f), expected);
        }
    }

    #[test]
    fn s_preserves_defined_values(seed in any::<u64>(), f in pq_formula(4)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_ps4_model(&mut rng, 5, &[Atom::new("p"), Atom::new("q")]);
        let n = m.frame.len();
        for x in 0..n {
            for y in 0..n {
                let vx = m.eval3_at(x, &f);
                if m.frame.s(x, y) && vx != Truth3::Unknown {
                    prop_assert_eq!(m.eval3_at(y, &f), vx);
                }
            }
        }
    }

    #[test]
    fn every_branch_can_be_copied(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_ps4_model(&mut rng, 5, &[Atom::new("p")]);
        for len in 3..=4 {
            for b in branches(m.frame.r_frame(), len) {
                for i in 2..len {
                    let out = copy_branch(&m, &b, i);
                    prop_assert!(out.is_ok(), "{:?} at {}: {:?}", b, i, out);
                    let out = out.unwrap();
                    prop_assert_eq!(out.len(), len - 1);
                    for w in out.windows(2) {
                        prop_assert!(m.frame.r(w[0], w[1]));
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fuzzed_rk4_rs4_ends_have_no_ps4_countermodel(seed in any::<u64>(), rs4 in any::<bool>()) {
        let sys = if rs4 { System::RS4 } else { System::RK4 };
        let spec = CalculusSpec::system(sys);
        let cfg = FuzzConfig { count: 5, seed, ..FuzzConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let models: Vec<Ps4Model> = (0..40)
            .map(|_| random_ps4_model(&mut rng, 5, &[Atom::new("p"), Atom::new("q")]))
            .collect();
        for d in fuzz_derivations(&spec, &cfg) {
            prop_assert!(!d.uses(hyperseq::calculus::RuleId::Cut));
            for m in &models {
                prop_assert_eq!(ps4_countermodel(m, d.end()), None, "{}", d.end());
            }
        }
    }

    #[test]
    fn fuzzed_ends_have_no_kripke_countermodel(seed in any::<u64>(), k in 0usize..9) {
        let sys = System::ALL[k];
        let spec = CalculusSpec::system(sys);
        let cfg = FuzzConfig { count: 2, max_depth: 8, seed, ..FuzzConfig::default() };
        for d in fuzz_derivations(&spec, &cfg) {
            check_derivation(&d, &spec).unwrap();
            let v = bounded_validity(d.end(), sys.frame_class(), 4);
            prop_assert!(v.is_valid(), "{} in {:?}: {:?}", d.end(), sys, v);
        }
    }

    #[test]
    fn search_results_check_and_repeat(h in hypersequent(2, pq_formula(2)), k in 0usize..9) {
        let sys = System::ALL[k];
        let spec = CalculusSpec::system(sys);
        let limits = Limits { max_states: 5_000, ..default_limits(&h) };
        let (a, _) = search(&h, &spec, limits);
        let (b, _) = search(&h, &spec, limits);
        prop_assert_eq!(a.label(), b.label());
        if let Some(d) = a.proof() {
            prop_assert_eq!(Some(d), b.proof());
            prop_assert_eq!(d.end(), &h);
            check_derivation(d, &spec).unwrap();
            prop_assert!(d.all_formulas().is_subset(&h.subformulas()));
            let v = bounded_validity(&h, sys.frame_class(), 3);
            prop_assert!(v.is_valid());
        }
    }

    #[test]
    fn decide_verdicts_are_certified(h in hypersequent(2, pq_formula(3)), rs4 in any::<bool>()) {
        let sys = if rs4 { DecideSystem::RS4Cut } else { DecideSystem::RK4Cut };
        let (v, _) = decide(&h, sys, default_decide_limits(&h)).unwrap();
        let b = bounded_validity(&h, sys.frame_class(), 4);
        match v {
            Verdict::Valid(d) => {
                check_derivation(&d, &sys.spec()).unwrap();
                prop_assert!(b.is_valid(), "{}", h);
            }
            Verdict::Invalid { model, branch } => {
                prop_assert!(check_frame_class(&model.frame, sys.frame_class()).is_ok());
                prop_assert!(verify_branch(&model, &h, &branch).is_ok());
            }
            Verdict::Unknown => prop_assert!(false, "unknown on {}", h),
        }
    }
}
