use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::syntax::{parse_formula, parse_hypersequent};

/// Direct strong Kleene evaluation on single truth values.
fn oracle(m: &Ps4Model, w: usize, f: &Formula) -> Truth3 {
    use Truth3::*;
    match f {
        Formula::Atom(a) => m.atom_value(w, a),
        Formula::Neg(a) => match oracle(m, w, a) {
            True => False,
            False => True,
            Unknown => Unknown,
        },
        Formula::And(a, b) => match (oracle(m, w, a), oracle(m, w, b)) {
            (True, True) => True,
            (False, _) | (_, False) => False,
            _ => Unknown,
        },
        Formula::Or(a, b) => match (oracle(m, w, a), oracle(m, w, b)) {
            (False, False) => False,
            (True, _) | (_, True) => True,
            _ => Unknown,
        },
        Formula::Box(a) => {
            let vals: Vec<Truth3> = (0..m.frame.len())
                .filter(|&y| m.frame.r(w, y))
                .map(|y| oracle(m, y, a))
                .collect();
            if vals.iter().all(|&v| v == True) {
                True
            } else if vals.contains(&False) {
                False
            } else {
                Unknown
            }
        }
    }
}

/// Brute-force condition check straight from the quantifier structure.
fn oracle_frame_ok(fr: &Ps4Frame) -> bool {
    let n = fr.len();
    let ws = || 0..n;
    ws().all(|x| fr.s(x, x) && fr.r(x, x))
        && ws().all(|x| {
            ws().all(|y| {
                ws().all(|z| {
                    let pt = !(fr.r(x, y) && fr.r(y, z)) || ws().any(|w| fr.r(x, w) && fr.s(z, w));
                    let forth = !(fr.r(x, y) && fr.s(x, z)) || ws().any(|w| fr.r(z, w) && fr.s(y, w));
                    let back = !(fr.s(x, y) && fr.r(y, z)) || ws().any(|u| fr.r(x, u) && fr.s(u, z));
                    pt && forth && back
                })
            })
        })
}

fn fig5_world(name: &str) -> usize {
    builtin_fig5_model().frame.index_of(name).unwrap()
}

fn c_formula() -> Formula {
    parse_formula("~[]~[](p & q) | []( ~[]p | []~[]q )").unwrap()
}

#[test]
fn kleene_clauses() {
    let fr = Ps4Frame::new(vec!["w".into()], &[(0, 0)], &[(0, 0)]).unwrap();
    let mut val = BTreeMap::new();
    val.insert(Atom::new("q"), Vector { t: 1, f: 0 });
    let m = Ps4Model::new(fr.clone(), val);
    assert_eq!(m.eval3("w", &parse_formula("~p").unwrap()).unwrap(), Truth3::Unknown);
    let mut val = BTreeMap::new();
    val.insert(Atom::new("p"), Vector { t: 0, f: 1 });
    let m = Ps4Model::new(fr, val);
    assert_eq!(m.eval3("w", &parse_formula("p & q").unwrap()).unwrap(), Truth3::False);
    assert!(m.eval3("x", &parse_formula("p").unwrap()).is_err());
}

#[test]
fn fig5_values() {
    let m = builtin_fig5_model();
    let pq = parse_formula("p & q").unwrap();
    assert_eq!(m.eval3("m", &pq).unwrap(), Truth3::Unknown);
    assert_eq!(m.eval3("i", &c_formula()).unwrap(), Truth3::False);
    let a = parse_formula("[]~[](p & q)").unwrap();
    assert_eq!(m.eval3("i", &a).unwrap(), Truth3::True);
    assert_eq!(m.eval3("j", &parse_formula("[]p").unwrap()).unwrap(), Truth3::True);
    assert_eq!(m.eval3("k", &parse_formula("[]q").unwrap()).unwrap(), Truth3::True);
    for w in 0..m.frame.len() {
        for f in c_formula().subformula_closure() {
            assert_eq!(m.eval3_at(w, &f), oracle(&m, w, &f), "{f} at {w}");
        }
    }
}

#[test]
fn fig5_frame_and_preservation() {
    let m = builtin_fig5_model();
    assert_eq!(check_ps4_frame(&m.frame), Ok(()));
    assert!(oracle_frame_ok(&m.frame));
    assert_eq!(check_s_preservation(&m, 0), Ok(()));
    assert_eq!(check_s_preservation(&m, 4), Ok(()));
}

#[test]
fn fig5_countermodels() {
    let m = builtin_fig5_model();
    let c = Hypersequent::single(crate::syntax::Sequent::new([], [c_formula()]));
    assert_eq!(ps4_countermodel(&m, &c), Some(vec![fig5_world("i")]));
    let h = parse_hypersequent("[]~[](p&q) => // []p => // []q =>").unwrap();
    assert_eq!(
        ps4_countermodel(&m, &h),
        Some(vec![fig5_world("i"), fig5_world("j"), fig5_world("k")])
    );
    assert_eq!(ps4_countermodel(&m, &parse_hypersequent("p => p").unwrap()), None);
}

#[test]
fn bullet_list_variant_loses_countermodel() {
    // replacing i->j by i->k leaves j unreachable from i
    let good = builtin_fig5_model();
    let ix = |c: &str| good.frame.index_of(c).unwrap();
    let mut r = good.frame.r_rows().to_vec();
    r[ix("i")] &= !(1 << ix("j"));
    r[ix("i")] |= 1 << ix("k");
    let bad = Ps4Model::new(
        Ps4Frame::from_rows(r, good.frame.s_rows().to_vec()),
        good.val.clone(),
    );
    let a = parse_formula("[]~[](p & q)").unwrap();
    assert_eq!(bad.eval3_at(ix("i"), &a), Truth3::Unknown);
    let c = Hypersequent::single(crate::syntax::Sequent::new([], [c_formula()]));
    assert_eq!(ps4_countermodel(&bad, &c), None);
}

#[test]
fn frame_violations() {
    let single = Ps4Frame::new(vec!["x".into()], &[(0, 0)], &[(0, 0)]).unwrap();
    assert_eq!(check_ps4_frame(&single), Ok(()));
    let names = vec!["x".into(), "y".into(), "z".into()];
    let refl = [(0, 0), (1, 1), (2, 2)];
    let mut r = refl.to_vec();
    r.extend([(0, 1), (1, 2)]);
    let fr = Ps4Frame::new(names, &r, &refl).unwrap();
    let v = check_ps4_frame(&fr).unwrap_err();
    assert_eq!(v.condition, Ps4Condition::PseudoTransitivity);
    assert_eq!(v.worlds, vec![0, 1, 2]);
    assert!(!oracle_frame_ok(&fr));
}

#[test]
fn preservation_failure_at_atoms() {
    let fr = Ps4Frame::new(vec!["x".into(), "y".into()], &[(0, 0), (1, 1)], &[(0, 0), (1, 1), (0, 1)]).unwrap();
    let mut val = BTreeMap::new();
    val.insert(Atom::new("p"), Vector { t: 0b01, f: 0b10 });
    let m = Ps4Model::new(fr, val);
    let e = check_s_preservation(&m, 0).unwrap_err();
    assert_eq!((e.x, e.y), (0, 1));
    assert_eq!(e.formula, Formula::atom("p"));
}

#[test]
fn identity_s_preserves_everything() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let mut m = random_ps4_model(&mut rng, 4, &[Atom::new("p"), Atom::new("q")]);
        let n = m.frame.len();
        let s: Vec<u64> = (0..n).map(|i| 1 << i).collect();
        let mut r = m.frame.r_rows().to_vec();
        saturate(&mut r, &s);
        m.frame = Ps4Frame::from_rows(r, s);
        assert_eq!(check_s_preservation(&m, 3), Ok(()));
    }
}

#[test]
fn copy_branch_examples() {
    let m = builtin_fig5_model();
    let w = fig5_world;
    let out = copy_branch(&m, &[w("i"), w("j"), w("k")], 2).unwrap();
    assert_eq!(out, vec![w("i"), w("n")]);
    let looped = copy_branch(&m, &[w("i"), w("i"), w("i")], 2).unwrap();
    assert_eq!(looped, vec![w("i"), w("i")]);
    assert!(matches!(
        copy_branch(&m, &[w("i"), w("j")], 1),
        Err(CopyBranchError::IndexOutOfRange { .. })
    ));
    assert!(matches!(
        copy_branch(&m, &[w("i"), w("k"), w("m")], 2),
        Err(CopyBranchError::NotABranch(1))
    ));
}

#[test]
fn generated_models_satisfy_conditions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let m = random_ps4_model(&mut rng, 5, &[Atom::new("p"), Atom::new("q")]);
        assert!(oracle_frame_ok(&m.frame), "{m:?}");
        for x in 0..m.frame.len() {
            for y in 0..m.frame.len() {
                if m.frame.s(x, y) {
                    assert!(m.info_below(x, y));
                }
            }
        }
    }
}

#[test]
fn model_json_round_trip() {
    let m = builtin_fig5_model();
    let s = serde_json::to_string(&m).unwrap();
    assert!(s.contains(r#""m":{"p":"*","q":1}"#));
    let back: Ps4Model = serde_json::from_str(&s).unwrap();
    assert_eq!(back, m);
}
