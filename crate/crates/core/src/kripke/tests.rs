use std::collections::HashSet;

use super::*;
use crate::syntax::{parse_formula, parse_hypersequent};

fn frame(n: usize, rel: &[(usize, usize)]) -> KripkeFrame {
    let names = (0..n).map(|i| format!("w{i}")).collect();
    KripkeFrame::new(names, rel).unwrap()
}

fn model(n: usize, rel: &[(usize, usize)], val: &[(&str, u64)]) -> KripkeModel {
    let val = val.iter().map(|(a, b)| (Atom::new(a), *b)).collect();
    KripkeModel::new(frame(n, rel), val)
}

#[test]
fn eval_box_cases() {
    let p = parse_formula("[]p").unwrap();
    assert!(model(1, &[(0, 0)], &[("p", 1)]).eval("w0", &p).unwrap());
    assert!(model(1, &[], &[("p", 0)]).eval("w0", &p).unwrap());
    assert!(!model(2, &[(0, 1)], &[("p", 0b01)]).eval("w0", &p).unwrap());
}

#[test]
fn eval_errors() {
    let m = model(1, &[], &[("p", 1)]);
    assert!(matches!(
        m.eval("nope", &parse_formula("p").unwrap()),
        Err(KripkeError::UnknownWorld(_))
    ));
    assert!(matches!(
        m.eval("w0", &parse_formula("q").unwrap()),
        Err(KripkeError::UnvaluedAtom { .. })
    ));
}

#[test]
fn frame_classes() {
    assert!(check_frame_class(&frame(2, &[(0, 1)]), FrameClass::K4).is_ok());
    let v = check_frame_class(&frame(3, &[(0, 1), (1, 2)]), FrameClass::K4).unwrap_err();
    assert_eq!(v.condition, Condition::Transitive);
    assert_eq!(v.worlds, vec![0, 1, 2]);
    // i j k m with the drawn edges plus i->m
    let fig = frame(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)]);
    assert!(check_frame_class(&fig, FrameClass::K4).is_ok());
    let drawn = frame(4, &[(0, 1), (1, 2), (2, 3), (0, 2), (1, 3)]);
    assert!(check_frame_class(&drawn, FrameClass::K4).is_err());
    assert_eq!(drawn.transitive_closure(), fig);
    assert!(check_frame_class(&frame(1, &[]), FrameClass::D).is_err());
    assert!(check_frame_class(&frame(2, &[(0, 1), (1, 1)]), FrameClass::D).is_ok());
}

#[test]
fn branch_enumeration() {
    assert_eq!(branches(&frame(1, &[]), 2).count(), 0);
    let b: Vec<_> = branches(&frame(1, &[(0, 0)]), 3).collect();
    assert_eq!(b, vec![vec![0, 0, 0]]);
    let cyc = frame(2, &[(0, 1), (1, 0)]);
    let b: Vec<_> = branches(&cyc, 2).collect();
    assert_eq!(b, vec![vec![0, 1], vec![1, 0]]);
}

#[test]
fn branch_enumeration_matches_product_filter() {
    let fr = frame(3, &[(0, 1), (1, 2), (2, 0), (1, 1), (0, 2)]);
    for n in 1..=4 {
        let got: Vec<_> = branches(&fr, n).collect();
        let mut want = Vec::new();
        for code in 0..3usize.pow(n as u32) {
            let seq: Vec<usize> = (0..n).map(|i| code / 3usize.pow((n - 1 - i) as u32) % 3).collect();
            if seq.windows(2).all(|w| fr.rel(w[0], w[1])) {
                want.push(seq);
            }
        }
        assert_eq!(got, want);
    }
}

#[test]
fn hypersequent_countermodels() {
    let id = parse_hypersequent("p => p").unwrap();
    let m = model(2, &[(0, 1), (1, 1)], &[("p", 0b10)]);
    assert_eq!(countermodels_hypersequent(&m, &id).unwrap(), None);
    let h = parse_hypersequent("=> p").unwrap();
    let m = model(1, &[], &[("p", 0)]);
    assert_eq!(countermodels_hypersequent(&m, &h).unwrap(), Some(vec![0]));
    let h2 = parse_hypersequent("p => // => p").unwrap();
    let m = model(3, &[(0, 1), (0, 2)], &[("p", 0b101)]);
    assert_eq!(countermodels_hypersequent(&m, &h2).unwrap(), Some(vec![0, 1]));
}

#[test]
fn countermodel_result_self_checks() {
    let h = parse_hypersequent("[]p => q // p => // => []q").unwrap();
    for fr in enumerate_frames(FrameClass::K, 3) {
        let atoms: Vec<_> = h.atoms().into_iter().collect();
        for val in valuations(&atoms, 3) {
            let m = KripkeModel::new(fr.clone(), val);
            if let Some(b) = countermodels_hypersequent(&m, &h).unwrap() {
                for (s, &w) in h.components().iter().zip(&b) {
                    assert!(s.left.iter().all(|f| m.eval_at(w, f).unwrap()));
                    assert!(s.right.iter().all(|f| !m.eval_at(w, f).unwrap()));
                }
                assert!(b.windows(2).all(|x| fr.rel(x[0], x[1])));
            } else {
                let any = branches(&fr, h.len()).any(|b| {
                    h.components().iter().zip(&b).all(|(s, &w)| {
                        s.left.iter().all(|f| m.eval_at(w, f).unwrap())
                            && s.right.iter().all(|f| !m.eval_at(w, f).unwrap())
                    })
                });
                assert!(!any);
            }
        }
    }
}

/// Canonical form by trying every permutation, independent of the
/// signature-refined search used by the enumerator.
fn naive_canonical(rows: &[u64]) -> u64 {
    let n = rows.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    loop {
        let mut enc = 0u64;
        for a in 0..n {
            for b in 0..n {
                if rows[a] >> b & 1 == 1 {
                    enc |= 1 << (perm[a] * n + perm[b]);
                }
            }
        }
        best = best.min(enc);
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best
}

fn brute_force_classes(class: FrameClass, n: usize) -> usize {
    let mut seen = HashSet::new();
    for enc in 0..1u64 << (n * n) {
        let rows: Vec<u64> = (0..n).map(|a| (enc >> (a * n)) & ((1 << n) - 1)).collect();
        let fr = KripkeFrame::from_rows(rows.clone());
        if check_frame_class(&fr, class).is_ok() {
            seen.insert(naive_canonical(&rows));
        }
    }
    seen.len()
}

#[test]
fn enumeration_counts_match_brute_force() {
    for class in FrameClass::ALL {
        for n in 1..=3 {
            assert_eq!(
                enumerate_frames(class, n).len(),
                brute_force_classes(class, n),
                "{class} at {n}"
            );
        }
    }
    assert_eq!(enumerate_frames(FrameClass::K, 4).len(), brute_force_classes(FrameClass::K, 4));
}

#[test]
fn enumeration_counts_known_sequences() {
    // unlabeled preorders and transitive relations
    let s4: Vec<usize> = (1..=5).map(|n| enumerate_frames(FrameClass::S4, n).len()).collect();
    assert_eq!(s4, vec![1, 3, 9, 33, 139]);
    let k4: Vec<usize> = (1..=4).map(|n| enumerate_frames(FrameClass::K4, n).len()).collect();
    assert_eq!(k4, vec![2, 8, 39, 242]);
    let s5: Vec<usize> = (1..=5).map(|n| enumerate_frames(FrameClass::S5, n).len()).collect();
    assert_eq!(s5, vec![1, 2, 3, 5, 7]);
}

#[test]
fn enumerated_frames_are_pairwise_non_isomorphic() {
    let frames = enumerate_frames(FrameClass::KB, 4);
    let canon: HashSet<u64> = frames.iter().map(|f| naive_canonical(f.rows())).collect();
    assert_eq!(canon.len(), frames.len());
}

#[test]
fn bounded_validity_examples() {
    let taut = parse_hypersequent("=> p | ~p").unwrap();
    assert!(bounded_validity(&taut, FrameClass::K, 3).is_valid());
    let bp = parse_hypersequent("=> []p").unwrap();
    match bounded_validity(&bp, FrameClass::K, 1) {
        BoundedVerdict::Countermodel { model, branch } => {
            assert_eq!(branch, vec![0]);
            assert!(model.frame.rel(0, 0));
            assert!(!model.eval_at(0, &parse_formula("p").unwrap()).unwrap());
        }
        v => panic!("expected countermodel, got {v:?}"),
    }
    // 4 fails on a non-transitive frame
    let four = parse_hypersequent("[]p => [][]p").unwrap();
    assert!(!bounded_validity(&four, FrameClass::K, 3).is_valid());
    assert!(bounded_validity(&four, FrameClass::K4, 4).is_valid());
}

#[test]
fn model_json_round_trip() {
    let m = model(2, &[(0, 1), (1, 1)], &[("p", 0b10), ("q", 0b01)]);
    let s = serde_json::to_string(&m).unwrap();
    assert_eq!(
        s,
        r#"{"worlds":["w0","w1"],"rel":[["w0","w1"],["w1","w1"]],"val":{"w0":{"p":0,"q":1},"w1":{"p":1,"q":0}}}"#
    );
    let back: KripkeModel = serde_json::from_str(&s).unwrap();
    assert_eq!(back, m);
    let partial = r#"{"worlds":["a","b"],"rel":[],"val":{"a":{"p":1}}}"#;
    assert!(serde_json::from_str::<KripkeModel>(partial).is_err());
}
