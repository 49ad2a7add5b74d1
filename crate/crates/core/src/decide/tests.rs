use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::calculus::check_derivation;
use crate::corpus::{atoms, random_hypersequent};
use crate::kripke::bounded_validity;
use crate::syntax::parse_hypersequent;

fn run(goal: &str, sys: DecideSystem) -> Verdict {
    let g = parse_hypersequent(goal).unwrap();
    let (v, _) = decide(&g, sys, default_decide_limits(&g)).unwrap();
    match &v {
        Verdict::Valid(d) => {
            assert_eq!(d.end(), &g);
            check_derivation(d, &sys.spec()).unwrap();
        }
        Verdict::Invalid { model, branch } => {
            check_frame_class(&model.frame, sys.frame_class()).unwrap();
            verify_branch(model, &g, branch).unwrap();
        }
        Verdict::Unknown => {}
    }
    v
}

#[test]
fn identity_of_compound_formulas() {
    let spec = CalculusSpec::system(System::RK);
    for f in ["~p", "[]p", "p & []~q", "[](p | ~[]q)"] {
        let phi = crate::syntax::parse_formula(f).unwrap();
        let d = Derivation::identity(&phi);
        assert_eq!(d.end(), &Hypersequent::single(Sequent::new([phi.clone()], [phi])));
        check_derivation(&d, &spec).unwrap();
    }
}

#[test]
fn small_verdicts() {
    for sys in [DecideSystem::RK4Cut, DecideSystem::RS4Cut] {
        assert_eq!(run("p => p", sys).label(), "valid");
        assert_eq!(run("[]p => [][]p", sys).label(), "valid");
        assert_eq!(run("=> [](p | ~p)", sys).label(), "valid");
        match run("=> p", sys) {
            Verdict::Invalid { model, branch } => {
                assert_eq!(model.frame.len(), 1);
                assert_eq!(branch, vec![0]);
            }
            other => panic!("{}", other.label()),
        }
    }
    assert_eq!(run("[]p => p", DecideSystem::RK4Cut).label(), "invalid");
    assert_eq!(run("[]p => p", DecideSystem::RS4Cut).label(), "valid");
    assert_eq!(run("~[]p => []~[]p", DecideSystem::RS4Cut).label(), "invalid");
}

#[test]
fn c_is_valid_with_cut() {
    let c = "=> ~[]~[](p & q) | []( ~[]p | []~[]q )";
    for sys in [DecideSystem::RK4Cut, DecideSystem::RS4Cut] {
        let v = run(c, sys);
        assert_eq!(v.label(), "valid", "{sys}");
        let Verdict::Valid(d) = v else { unreachable!() };
        assert!(d.uses(RuleId::Cut));
    }
    assert_eq!(run("[]~[](p & q) => // []p => // []q =>", DecideSystem::RS4Cut).label(), "valid");
}

#[test]
fn agrees_with_bounded_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let ats = atoms(&["p", "q"]);
    for _ in 0..60 {
        let g = random_hypersequent(&mut rng, 2, 2, &ats);
        for sys in [DecideSystem::RK4Cut, DecideSystem::RS4Cut] {
            let (v, _) = decide(&g, sys, default_decide_limits(&g)).unwrap();
            let b = bounded_validity(&g, sys.frame_class(), 3);
            match v {
                Verdict::Valid(d) => {
                    check_derivation(&d, &sys.spec()).unwrap();
                    assert!(b.is_valid(), "{g} {sys}");
                }
                Verdict::Invalid { model, branch } => verify_branch(&model, &g, &branch).unwrap(),
                Verdict::Unknown => panic!("{g} {sys} unknown"),
            }
        }
    }
}
