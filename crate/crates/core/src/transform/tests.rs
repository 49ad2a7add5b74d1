use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::invert::invert_counted;
use super::*;
use crate::calculus::{
    check_derivation, default_limits, fuzz_derivations, search, CalculusSpec, Derivation, FuzzConfig,
    Limits, RuleId, System,
};
use crate::corpus::{atoms, random_hypersequent};
use crate::kripke::{enumerate_frames, valuations, FrameClass, KripkeModel};
use crate::syntax::{parse_formula, parse_hypersequent, Atom, Side};

fn h(s: &str) -> Hypersequent {
    parse_hypersequent(s).unwrap()
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn proof(goal: &str, sys: System) -> Derivation {
    let g = h(goal);
    let (out, _) = search(&g, &CalculusSpec::system(sys), default_limits(&g));
    out.proof().cloned().unwrap_or_else(|| panic!("{goal}: {}", out.label()))
}

#[test]
fn translation_examples() {
    assert_eq!(translate(&h("p => q")).unwrap().formula, f("~p | q"));
    assert_eq!(translate(&h("=> p")).unwrap().formula, f("p"));
    assert_eq!(translate(&h("p, q =>")).unwrap().formula, f("~(p & q)"));
    let j = h("=> p // => [](~[][]p & ~[][]q) // => q");
    assert_eq!(
        translate(&j).unwrap().formula,
        f("p | [] ( [](~[][]p & ~[][]q) | []q)")
    );
    let c = h("[]~[](p & q) => // []p => // []q =>");
    assert_eq!(
        translate(&c).unwrap().formula,
        f("~[]~[](p & q) | []( ~[]p | []~[]q )")
    );
    assert!(matches!(
        translate(&h("=> p // =>")),
        Err(TransformError::EmptyComponent(1))
    ));
    assert_eq!(translate(&j).unwrap().trace.len(), 3);
}

#[test]
fn ec_from_merge_examples() {
    let d = Derivation::id(&Atom::new("p")).ewr().weaken_to(&h("p => p // p => p")).unwrap();
    let m = ec_from_merge(&d).unwrap();
    assert_eq!(m.end(), &h("p => p"));
    check_derivation(&m, &CalculusSpec::system(System::RTB).with_rules(&[RuleId::Merge])).unwrap();
    assert!(ec_from_merge(&Derivation::id(&Atom::new("p"))).is_err());
}

#[test]
fn eliminate_merge_small_cases() {
    let d = Derivation::id(&Atom::new("p")).ewr();
    let e = eliminate_merge(&d, 0).unwrap();
    assert_eq!(e.end(), &h("p => p"));

    // BoxL with its main components merged turns into T
    let d = Derivation::id(&Atom::new("p"))
        .ewl()
        .apply(RuleId::BoxL, 0, Some(f("[]p")))
        .unwrap();
    assert_eq!(d.end(), &h("[]p => // => p"));
    let e = eliminate_merge(&d, 0).unwrap();
    assert_eq!(e.end(), &h("[]p => p"));
    assert_eq!(e.rule.rule, RuleId::T);
    check_derivation(&e, &CalculusSpec::system(System::RTB)).unwrap();

    assert!(eliminate_merge(&Derivation::id(&Atom::new("p")), 0).is_err());
}

#[test]
fn eliminate_merge_on_fuzzed_rtb() {
    let spec = CalculusSpec::system(System::RTB);
    let cfg = FuzzConfig {
        count: 1500,
        max_depth: 6,
        seed: 11,
        ..FuzzConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut done = 0;
    for d in fuzz_derivations(&spec, &cfg) {
        let n = d.end().len();
        if n < 2 {
            continue;
        }
        let i = rng.gen_range(0..n - 1);
        let e = eliminate_merge(&d, i).unwrap();
        assert_eq!(e.end(), &d.end().merged(i));
        check_derivation(&e, &spec).unwrap();
        assert!(!e.uses(RuleId::Merge));
        done += 1;
    }
    assert!(done >= 200, "only {done} multi-component derivations");
}

#[test]
fn invert_box_on_final_component() {
    let d = proof("[]p => []p", System::RK4);
    let spec = CalculusSpec::system(System::RK4);
    let e = invert(&d, &spec, InvertItem::Box, 0, &f("[]p")).unwrap();
    assert_eq!(e.end(), &h("[]p => // => p"));
    assert!(invert(&d, &spec, InvertItem::Or, 0, &f("[]p")).is_err());
}

#[test]
fn invert_items_on_search_proofs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ats = atoms(&["p", "q"]);
    let mut checked = [0usize; 4];
    let mut fallbacks = 0;
    for sys in [System::RK4, System::RS4] {
        let spec = CalculusSpec::system(sys);
        for _ in 0..300 {
            let g = random_hypersequent(&mut rng, 2, 3, &ats);
            let limits = Limits {
                max_states: 20_000,
                ..default_limits(&g)
            };
            let Some(d) = search(&g, &spec, limits).0.proof().cloned() else {
                continue;
            };
            for (k, s) in g.components().iter().enumerate() {
                for (side, x) in s.right.iter().map(|x| (Side::Right, x)).chain(s.left.iter().map(|x| (Side::Left, x))) {
                    let item = match (side, x) {
                        (Side::Right, Formula::Or(..)) => InvertItem::Or,
                        (Side::Left, Formula::And(..)) => InvertItem::And,
                        (Side::Right, Formula::Neg(..)) => InvertItem::Neg,
                        (Side::Right, Formula::Box(..)) if k + 1 == g.len() => InvertItem::Box,
                        _ => continue,
                    };
                    let (e, fb) = invert_counted(&d, &spec, item, k, x).unwrap();
                    fallbacks += fb;
                    check_derivation(&e, &spec).unwrap();
                    checked[item as usize - 1] += 1;
                }
            }
        }
    }
    eprintln!("inversions per item {checked:?}, search fallbacks {fallbacks}");
    assert!(checked.iter().all(|&c| c > 0));
}

#[test]
fn translation_proofs_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ats = atoms(&["p", "q"]);
    let mut n = 0;
    for sys in [System::RK4, System::RS4] {
        let spec = CalculusSpec::system(sys);
        for _ in 0..200 {
            let g = random_hypersequent(&mut rng, 3, 2, &ats);
            let limits = Limits {
                max_states: 20_000,
                ..default_limits(&g)
            };
            let Some(d) = search(&g, &spec, limits).0.proof().cloned() else {
                continue;
            };
            let t = proof_of_translation(&d, &spec).unwrap();
            let i = translate(&g).unwrap().formula;
            assert_eq!(t.end(), &Hypersequent::single(Sequent::new([], [i])));
            let back = proof_from_translation(&t, &g, &spec).unwrap();
            assert_eq!(back.end(), &g);
            check_derivation(&back, &spec).unwrap();
            n += 1;
        }
    }
    assert!(n > 20, "{n}");
}

#[test]
fn translation_rejected_with_sym() {
    let d = proof("p => p", System::RKB);
    let spec = CalculusSpec::system(System::RKB);
    let t = proof_of_translation(&d, &spec).unwrap();
    assert!(matches!(
        proof_from_translation(&t, &h("p => p"), &spec),
        Err(TransformError::Rule(RuleId::Sym))
    ));
}

#[test]
fn translation_is_semantically_equivalent() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ats = atoms(&["p", "q"]);
    for _ in 0..40 {
        let g = random_hypersequent(&mut rng, 3, 2, &ats);
        let i = translate(&g).unwrap().formula;
        let ga: Vec<Atom> = g.atoms().into_iter().collect();
        for n in 1..=3 {
            for frame in enumerate_frames(FrameClass::K, n) {
                for val in valuations(&ga, n) {
                    let m = KripkeModel::new(frame.clone(), val);
                    let has_branch = crate::kripke::countermodels_hypersequent(&m, &g).unwrap().is_some();
                    let refutes = (0..n).any(|w| !m.eval_at(w, &i).unwrap());
                    assert_eq!(has_branch, refutes, "{g}");
                }
            }
        }
    }
}
