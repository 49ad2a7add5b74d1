//! The eleven replication checks shared by the `replicate` command and the
//! acceptance test target.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{
    check_derivation, default_limits, fuzz_derivations, search, CalculusSpec, Derivation, FuzzConfig,
    Limits, RuleId, SearchOutcome, System,
};
use crate::corpus::{atoms, random_hypersequent};
use crate::decide::{decide, default_decide_limits, verify_branch, DecideSystem, Verdict};
use crate::kripke::{bounded_validity, branches, check_frame_class, equivalent_up_to, FrameClass};
use crate::named::{hyper, ij_derivation, BOX_DIST, BOX_DIST_CONVERSE, J, J_PRIME};
use crate::ps4::{
    builtin_fig5_model, check_ps4_frame, check_s_preservation, copy_branch, ps4_countermodel,
    random_ps4_model,
};
use crate::syntax::{parse_hypersequent, Hypersequent};
use crate::transform::{
    ec_from_merge, eliminate_merge, proof_from_translation, proof_of_translation, translate,
};

pub const IJ_GOLDEN: &str = include_str!("../golden/ij_rkb.json");
pub const IJ_GOLDEN_PATH: &str = "crates/core/golden/ij_rkb.json";

/// Bound for the Kripke enumerations of criteria 6 and 7.
pub const VALIDITY_BOUND: usize = 5;
/// Bound for the decide cross-check of criterion 9.
pub const ORACLE_BOUND: usize = 4;
/// Bound for the semantic equivalence of criterion 10.
pub const TRANSLATION_BOUND: usize = 4;
/// State cap for the corpus searches of criterion 10.
pub const CORPUS_SEARCH_STATES: usize = 20_000;

pub const CRITERIA: usize = 11;

#[derive(Debug, Clone, Serialize)]
pub struct Entry {
    pub criterion: usize,
    pub claim: &'static str,
    pub locus: &'static str,
    pub passed: bool,
    pub verdict: String,
    pub evidence: String,
    pub wall_seconds: f64,
    pub budget_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub passed: bool,
    pub total_seconds: f64,
    pub budget_seconds: f64,
    pub limits: serde_json::Value,
    pub entries: Vec<Entry>,
}

struct Meta {
    claim: &'static str,
    locus: &'static str,
    evidence: &'static str,
    budget: u64,
}

const META: [Meta; CRITERIA] = [
    Meta {
        claim: "RKB-derivation-of-IJ",
        locus: "Section 5, derivation of => I(J)",
        evidence: IJ_GOLDEN_PATH,
        budget: 1,
    },
    Meta {
        claim: "J-unprovable-RTB-RKB-RB",
        locus: "Lemmas RTBinvalid, RKBinvalid, RBinvalid",
        evidence: "search on J with default limits",
        budget: 30,
    },
    Meta {
        claim: "RTB-merge-admissible",
        locus: "Merge and EC admissibility in RTB",
        evidence: "fuzzed RTB corpus, seed 11",
        budget: 60,
    },
    Meta {
        claim: "PS4-countermodel-to-C",
        locus: "Lemma PS4invalid, six-point model",
        evidence: "builtin six-point PS4 model",
        budget: 5,
    },
    Meta {
        claim: "PS4-soundness",
        locus: "Lemmas PS4sound, PK4sound",
        evidence: "fuzzed RK4/RS4 corpus, seeds 5 and 6",
        budget: 60,
    },
    Meta {
        claim: "RS4-cut-free-incompleteness",
        locus: "Theorems RS4hinc, RK4hinc",
        evidence: "decide certificates for C",
        budget: 180,
    },
    Meta {
        claim: "J-valid-KB-B-bounded",
        locus: "Lemmas {KB}valid, Bvalid (bounded)",
        evidence: "Kripke enumeration up to 5 worlds",
        budget: 60,
    },
    Meta {
        claim: "PS4-information-and-branch-preservation",
        locus: "Lemmas InfoPre, branchpres",
        evidence: "1000 generated PS4 models, seed 8",
        budget: 60,
    },
    Meta {
        claim: "decide-oracle-equivalence",
        locus: "Appendix A decision procedure",
        evidence: "200-item corpus, seed 9",
        budget: 120,
    },
    Meta {
        claim: "translation-theorem",
        locus: "Theorem |- H iff |- => I(H), Section 5 footnote",
        evidence: "100-item corpus, seed 10",
        budget: 120,
    },
    Meta {
        claim: "RKB-concrete-cut-failure",
        locus: "Section 5 footnote, J' and box distribution",
        evidence: "crates/core/golden/box_dist_rkb.json, crates/core/golden/box_dist_converse_rkb.json",
        budget: 60,
    },
];

pub const TOTAL_BUDGET_SECONDS: f64 = 600.0;

/// The embedded default limits, for auditing unprovability verdicts.
pub fn limits_description() -> serde_json::Value {
    serde_json::json!({
        "search": {
            "max_components": "goal components + goal boxes + 1",
            "max_depth": default_limits(&hyper("j")).max_depth,
            "max_states": default_limits(&hyper("j")).max_states,
        },
        "decide": {
            "max_components": "goal components + 2 * subformulas + 2",
            "max_depth": default_decide_limits(&hyper("c")).max_depth,
            "max_states": default_decide_limits(&hyper("c")).max_states,
        },
        "corpus_search_states": CORPUS_SEARCH_STATES,
        "validity_bound": VALIDITY_BOUND,
        "oracle_bound": ORACLE_BOUND,
        "translation_bound": TRANSLATION_BOUND,
    })
}

/// Runs one criterion (1-based).
pub fn run_criterion(n: usize) -> Entry {
    assert!((1..=CRITERIA).contains(&n), "no criterion {n}");
    let meta = &META[n - 1];
    let start = Instant::now();
    let result = match n {
        1 => golden_ij(),
        2 => j_unprovable(),
        3 => merge_admissible(),
        4 => fig5_countermodel(),
        5 => ps4_soundness(),
        6 => incompleteness(),
        7 => j_bounded_valid(),
        8 => preservation(),
        9 => oracle_equivalence(),
        10 => translation_theorem(),
        _ => cut_failure(),
    };
    let wall = start.elapsed();
    let budget = Duration::from_secs(meta.budget);
    let (passed, mut verdict) = match result {
        Ok(v) => (true, v),
        Err(e) => (false, format!("FAILED: {e}")),
    };
    let passed = passed && wall <= budget;
    if wall > budget {
        verdict.push_str(" (over time budget)");
    }
    Entry {
        criterion: n,
        claim: meta.claim,
        locus: meta.locus,
        passed,
        verdict,
        evidence: meta.evidence.to_string(),
        wall_seconds: wall.as_secs_f64(),
        budget_seconds: budget.as_secs_f64(),
    }
}

pub fn run_all() -> Report {
    let start = Instant::now();
    let entries: Vec<Entry> = (1..=CRITERIA).map(run_criterion).collect();
    let total = start.elapsed().as_secs_f64();
    Report {
        passed: entries.iter().all(|e| e.passed) && total <= TOTAL_BUDGET_SECONDS,
        total_seconds: total,
        budget_seconds: TOTAL_BUDGET_SECONDS,
        limits: limits_description(),
        entries,
    }
}

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn h(s: &str) -> Hypersequent {
    parse_hypersequent(s).expect("built-in hypersequent parses")
}

fn spec(sys: System) -> CalculusSpec {
    CalculusSpec::system(sys)
}

fn golden_ij() -> Check {
    let d = Derivation::from_json(IJ_GOLDEN).map_err(|e| e.to_string())?;
    ensure!(d == ij_derivation(), "shipped file differs from the builder");
    ensure!(!d.uses(RuleId::Cut), "derivation uses Cut");
    let i = translate(&hyper("j")).map_err(|e| e.to_string())?.formula;
    ensure!(d.end() == &Hypersequent::single(crate::syntax::Sequent::new([], [i])), "end is not => I(J)");
    check_derivation(&d, &spec(System::RKB)).map_err(|e| e.to_string())?;
    let rk = check_derivation(&d, &spec(System::RK));
    ensure!(rk.is_err(), "derivation unexpectedly checks in RK");
    Ok(format!("{} nodes check in RKB; RK rejects: {}", d.size(), rk.unwrap_err()))
}

fn j_unprovable() -> Check {
    let j = hyper("j");
    let mut out = Vec::new();
    for sys in [System::RTB, System::RKB] {
        let (o, stats) = search(&j, &spec(sys), default_limits(&j));
        ensure!(
            matches!(o, SearchOutcome::UnprovableExhausted),
            "{sys:?}: {}",
            o.label()
        );
        out.push(format!("{sys:?} {} ({} states)", o.label(), stats.states));
    }
    Ok(format!("J: {}", out.join(", ")))
}

fn merge_admissible() -> Check {
    let rtb = spec(System::RTB);
    let merge = spec(System::RTB).with_rules(&[RuleId::Merge]);
    let cfg = FuzzConfig {
        count: 1500,
        max_depth: 6,
        seed: 11,
        ..FuzzConfig::default()
    };
    let corpus: Vec<Derivation> = fuzz_derivations(&rtb, &cfg)
        .into_iter()
        .filter(|d| d.end().len() >= 2)
        .collect();
    ensure!(corpus.len() >= 200, "only {} multi-component derivations", corpus.len());
    let failures: Vec<String> = corpus
        .par_iter()
        .enumerate()
        .filter_map(|(k, d)| merge_case(d, k % (d.end().len() - 1), &rtb, &merge).err())
        .collect();
    ensure!(failures.is_empty(), "{} failures, first: {}", failures.len(), failures[0]);
    Ok(format!("{} derivations, Merge eliminated and EC composed in all", corpus.len()))
}

fn merge_case(d: &Derivation, i: usize, rtb: &CalculusSpec, merge: &CalculusSpec) -> Result<(), String> {
    let end = d.end();
    let e = eliminate_merge(d, i).map_err(|e| format!("{end}: {e}"))?;
    ensure!(e.end() == &end.merged(i), "{end}: wrong end {}", e.end());
    ensure!(!e.uses(RuleId::Merge), "{end}: Merge left");
    check_derivation(&e, rtb).map_err(|e| format!("{end}: {e}"))?;
    // weaken components i and i+1 to their union, then contract
    let union = end.merged(i).components()[i].clone();
    let mut comps = end.components().to_vec();
    comps[i] = union.clone();
    comps[i + 1] = union;
    let dup = Hypersequent::new(comps).map_err(|e| e.to_string())?;
    let dd = d.clone().weaken_to(&dup).map_err(|e| e.to_string())?;
    let m = ec_from_merge(&dd).map_err(|e| format!("{dup}: {e}"))?;
    check_derivation(&m, merge).map_err(|e| format!("{dup}: {e}"))?;
    let first = (0..dup.len() - 1)
        .find(|&k| dup.components()[k] == dup.components()[k + 1])
        .expect("components i and i+1 are equal");
    let c = eliminate_merge(&dd, first).map_err(|e| format!("{dup}: {e}"))?;
    ensure!(c.end() == m.end(), "{dup}: contraction ends differ");
    check_derivation(&c, rtb).map_err(|e| format!("{dup}: {e}"))
}

fn fig5_countermodel() -> Check {
    let m = builtin_fig5_model();
    check_ps4_frame(&m.frame).map_err(|v| format!("{v:?}"))?;
    for depth in [0, 4] {
        check_s_preservation(&m, depth).map_err(|v| format!("depth {depth}: {v:?}"))?;
    }
    let names = |b: Option<Vec<usize>>| -> Option<Vec<String>> {
        b.map(|b| b.iter().map(|&w| m.frame.name(w).to_string()).collect())
    };
    let c = names(ps4_countermodel(&m, &hyper("c")));
    ensure!(c == Some(vec!["i".to_string()]), "C: {c:?}");
    let ch = names(ps4_countermodel(&m, &hyper("c-hyper")));
    ensure!(ch == Some(vec!["i".into(), "j".into(), "k".into()]), "C-hyper: {ch:?}");
    Ok("frame and S-preservation (depth 0, 4) hold; C refuted at (i), C-hyper along (i,j,k)".into())
}

fn ps4_soundness() -> Check {
    let ats = atoms(&["p", "q"]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let models: Vec<_> = (0..200).map(|_| random_ps4_model(&mut rng, 5, &ats)).collect();
    let mut total = 0;
    for (sys, seed) in [(System::RK4, 5), (System::RS4, 6)] {
        let sp = spec(sys);
        let cfg = FuzzConfig {
            count: 500,
            seed,
            ..FuzzConfig::default()
        };
        let corpus = fuzz_derivations(&sp, &cfg);
        let bad: Vec<String> = corpus
            .par_iter()
            .filter_map(|d| {
                if let Err(e) = check_derivation(d, &sp) {
                    return Some(format!("{}: {e}", d.end()));
                }
                models
                    .iter()
                    .position(|m| ps4_countermodel(m, d.end()).is_some())
                    .map(|k| format!("{} refuted in model {k}", d.end()))
            })
            .collect();
        ensure!(bad.is_empty(), "{sys:?}: {} failures, first: {}", bad.len(), bad[0]);
        total += corpus.len();
    }
    Ok(format!("{total} derivations x {} PS4 models, no countermodel", models.len()))
}

fn incompleteness() -> Check {
    let c = hyper("c");
    let mut parts = Vec::new();
    for sys in [DecideSystem::RS4Cut, DecideSystem::RK4Cut] {
        let (v, _) = decide(&c, sys, default_decide_limits(&c)).map_err(|e| e.to_string())?;
        let Verdict::Valid(d) = v else {
            return Err(format!("decide(C, {sys}) = {}", v.label()));
        };
        check_derivation(&d, &sys.spec()).map_err(|e| format!("{sys}: {e}"))?;
        parts.push(format!("decide(C, {sys}) = valid ({} nodes)", d.size()));
    }
    let m = builtin_fig5_model();
    ensure!(ps4_countermodel(&m, &c).is_some(), "C has no PS4 countermodel");
    for class in [FrameClass::S4, FrameClass::K4] {
        let b = bounded_validity(&c, class, VALIDITY_BOUND);
        ensure!(b.is_valid(), "{class:?} countermodel to C: {b:?}");
    }
    parts.push(format!("no S4/K4 countermodel up to {VALIDITY_BOUND} worlds; PS4 countermodel exists"));
    Ok(parts.join("; "))
}

fn j_bounded_valid() -> Check {
    let j = hyper("j");
    for class in [FrameClass::KB, FrameClass::B] {
        let b = bounded_validity(&j, class, VALIDITY_BOUND);
        ensure!(b.is_valid(), "{class:?} countermodel to J: {b:?}");
    }
    Ok(format!(
        "bounded: no KB and no B countermodel to J up to {VALIDITY_BOUND} worlds"
    ))
}

fn preservation() -> Check {
    let ats = atoms(&["p", "q"]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let models: Vec<_> = (0..1000).map(|_| random_ps4_model(&mut rng, 5, &ats)).collect();
    let copies: Result<Vec<usize>, String> = models
        .par_iter()
        .enumerate()
        .map(|(k, m)| {
            check_s_preservation(m, 4).map_err(|v| format!("model {k}: {v:?}"))?;
            let fr = &m.frame;
            let mut n = 0;
            for b in branches(fr.r_frame(), 4) {
                for i in 2..4 {
                    let out = copy_branch(m, &b, i).map_err(|e| format!("model {k} {b:?} {i}: {e}"))?;
                    let ok = out.len() == 3
                        && out[..i - 1] == b[..i - 1]
                        && out.windows(2).all(|w| fr.r(w[0], w[1]))
                        && (i - 1..3).all(|j| fr.s(b[j + 1], out[j]) && m.info_below(b[j + 1], out[j]));
                    ensure!(ok, "model {k}: bad copy {out:?} of {b:?} at {i}");
                    n += 1;
                }
            }
            Ok(n)
        })
        .collect();
    let copies: usize = copies?.iter().sum();
    Ok(format!(
        "{} models: S-preservation to depth 4 and {copies} branch copies, zero violations",
        models.len()
    ))
}

fn oracle_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ats = atoms(&["p", "q"]);
    let corpus: Vec<Hypersequent> = (0..200).map(|_| random_hypersequent(&mut rng, 2, 3, &ats)).collect();
    let mut counts = [0usize; 2];
    for sys in [DecideSystem::RK4Cut, DecideSystem::RS4Cut] {
        let res: Result<Vec<bool>, String> = corpus
            .par_iter()
            .map(|g| {
                let (v, _) = decide(g, sys, default_decide_limits(g)).map_err(|e| format!("{g} {sys}: {e}"))?;
                let b = bounded_validity(g, sys.frame_class(), ORACLE_BOUND);
                match v {
                    Verdict::Valid(d) => {
                        check_derivation(&d, &sys.spec()).map_err(|e| format!("{g} {sys}: {e}"))?;
                        ensure!(b.is_valid(), "{g} {sys}: valid but bounded countermodel");
                        Ok(true)
                    }
                    Verdict::Invalid { model, branch } => {
                        check_frame_class(&model.frame, sys.frame_class())
                            .map_err(|e| format!("{g} {sys}: {e:?}"))?;
                        verify_branch(&model, g, &branch).map_err(|e| format!("{g} {sys}: {e}"))?;
                        Ok(false)
                    }
                    Verdict::Unknown => Err(format!("{g} {sys}: unknown")),
                }
            })
            .collect();
        for valid in res? {
            counts[valid as usize] += 1;
        }
    }
    Ok(format!(
        "{} verdicts agree ({} valid, {} invalid with verified models)",
        counts[0] + counts[1],
        counts[1],
        counts[0]
    ))
}

fn translation_theorem() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let ats = atoms(&["p", "q"]);
    let corpus: Vec<Hypersequent> = (0..100).map(|_| random_hypersequent(&mut rng, 3, 2, &ats)).collect();
    let mut proved = 0;
    for sys in [System::RK4, System::RS4] {
        let sp = spec(sys);
        let res: Result<Vec<bool>, String> = corpus
            .par_iter()
            .map(|g| {
                let limits = Limits {
                    max_states: CORPUS_SEARCH_STATES,
                    ..default_limits(g)
                };
                let Some(d) = search(g, &sp, limits).0.proof().cloned() else {
                    return Ok(false);
                };
                let t = proof_of_translation(&d, &sp).map_err(|e| format!("{g} {sys:?}: {e}"))?;
                check_derivation(&t, &sp).map_err(|e| format!("{g} {sys:?}: {e}"))?;
                let back = proof_from_translation(&t, g, &sp).map_err(|e| format!("{g} {sys:?}: {e}"))?;
                ensure!(back.end() == g, "{g} {sys:?}: wrong end {}", back.end());
                check_derivation(&back, &sp).map_err(|e| format!("{g} {sys:?}: {e}"))?;
                Ok(true)
            })
            .collect();
        proved += res?.iter().filter(|&&b| b).count();
    }
    ensure!(proved > 0, "no corpus item was proved");
    let models: Result<Vec<u64>, String> = corpus
        .iter()
        .map(|g| {
            let i = translate(g).map_err(|e| e.to_string())?.formula;
            equivalent_up_to(g, &i, FrameClass::K, TRANSLATION_BOUND)
                .map_err(|m| format!("{g} and I differ on {m:?}"))
        })
        .collect();
    let models: u64 = models?.iter().sum();
    Ok(format!(
        "{proved} cut-free proofs translated both ways; {} items equivalent over {models} models",
        corpus.len()
    ))
}

fn cut_failure() -> Check {
    let rkb = spec(System::RKB);
    let mut parts = Vec::new();
    for goal in [J_PRIME, BOX_DIST, BOX_DIST_CONVERSE] {
        let g = h(goal);
        let (o, _) = search(&g, &rkb, default_limits(&g));
        let d = o.proof().ok_or_else(|| format!("{goal}: {}", o.label()))?;
        ensure!(!d.uses(RuleId::Cut), "{goal}: uses Cut");
        check_derivation(d, &rkb).map_err(|e| format!("{goal}: {e}"))?;
        parts.push(format!("{goal}: proof ({} nodes)", d.size()));
    }
    let j = h(J);
    let (o, _) = search(&j, &rkb, default_limits(&j));
    ensure!(matches!(o, SearchOutcome::UnprovableExhausted), "J: {}", o.label());
    parts.push("J: unprovable-exhausted".into());
    Ok(parts.join("; "))
}
