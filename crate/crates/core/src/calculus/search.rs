//! Cut-free backwards proof search.
//!
//! Logical rules are read backwards with the main formula kept in the
//! premise, which makes every one of them invertible: the premise is a
//! weakening of the conclusion. They are therefore applied eagerly, one
//! formula at a time, without branching over alternatives. Only once no
//! logical rule adds anything does the search branch, over BoxR on a box in
//! the last succedent, deletion of a component (the backwards reading of
//! EWL/EWR/EW together with internal weakening), and the structural rules of
//! the system. Provability is upward closed under adding formulas, so this
//! loses no proofs.

use super::engine::{Engine, EngineStats, Expansion, ProofTree};
use super::{CalculusSpec, Derivation, RuleApp, RuleId};
use crate::syntax::{Atom, Formula, Hypersequent, Sequent, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_components: usize,
    pub max_depth: usize,
    pub max_states: usize,
}

/// Components: goal components plus goal boxes plus one.
pub fn default_limits(goal: &Hypersequent) -> Limits {
    Limits {
        max_components: goal.len() + goal.box_count() + 1,
        max_depth: 64,
        max_states: 400_000,
    }
}

pub type SearchStats = EngineStats;

#[derive(Debug, Clone)]
pub enum SearchOutcome {
    Proof(Box<Derivation>),
    /// Every reachable state was explored and none of the limits cut
    /// anything off.
    UnprovableExhausted,
    UnknownLimitHit,
}

impl SearchOutcome {
    pub fn proof(&self) -> Option<&Derivation> {
        match self {
            SearchOutcome::Proof(d) => Some(d),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Proof(_) => "proof",
            SearchOutcome::UnprovableExhausted => "unprovable-exhausted",
            SearchOutcome::UnknownLimitHit => "unknown-limit-hit",
        }
    }
}

#[derive(Clone)]
enum Move {
    Closed(usize, Atom),
    /// Non-branching logical steps, applied in order, each adding one formula.
    Chain(Vec<RuleApp>),
    Branch(RuleApp),
    BoxR(Formula),
    DeleteFirst,
    DeleteLast,
    DeleteAt(usize),
    Sym,
    EE(usize),
    EC(usize),
    MergeDup(usize),
    Drop,
}

/// The premise of a non-branching logical step read backwards with the main
/// formula retained.
pub(crate) fn retained_premise(h: &Hypersequent, app: &RuleApp) -> Hypersequent {
    let s = app.component;
    let f = app.principal.as_ref().expect("logical step has a main formula");
    let (a, b) = match f {
        Formula::Neg(a) | Formula::Box(a) => (a.as_ref(), None),
        Formula::And(a, b) | Formula::Or(a, b) => (a.as_ref(), Some(b.as_ref())),
        Formula::Atom(_) => unreachable!(),
    };
    match app.rule {
        RuleId::NegL => h.with_formula(s, Side::Right, a.clone()),
        RuleId::NegR => h.with_formula(s, Side::Left, a.clone()),
        RuleId::AndL1 | RuleId::T => h.with_formula(s, Side::Left, a.clone()),
        RuleId::AndL2 => h.with_formula(s, Side::Left, b.unwrap().clone()),
        RuleId::OrR1 => h.with_formula(s, Side::Right, a.clone()),
        RuleId::OrR2 => h.with_formula(s, Side::Right, b.unwrap().clone()),
        RuleId::BoxL => h.with_formula(s + 1, Side::Left, a.clone()),
        other => unreachable!("{other} is not a unary logical step"),
    }
}

/// First logical step that would add a formula, skipping branching rules.
pub(crate) fn forced_step(h: &Hypersequent, t_enabled: bool) -> Option<RuleApp> {
    let n = h.len();
    for (c, s) in h.components().iter().enumerate() {
        for f in &s.left {
            let step = match f {
                Formula::Neg(a) if !s.right.contains(a) => Some(RuleId::NegL),
                Formula::And(a, _) if !s.left.contains(a) => Some(RuleId::AndL1),
                Formula::And(_, b) if !s.left.contains(b) => Some(RuleId::AndL2),
                Formula::Box(a) if c + 1 < n && !h.components()[c + 1].left.contains(a) => {
                    Some(RuleId::BoxL)
                }
                Formula::Box(a) if t_enabled && !s.left.contains(a) => Some(RuleId::T),
                _ => None,
            };
            if let Some(rule) = step {
                return Some(RuleApp::with_principal(rule, c, f.clone()));
            }
        }
        for f in &s.right {
            let step = match f {
                Formula::Neg(a) if !s.left.contains(a) => Some(RuleId::NegR),
                Formula::Or(a, _) if !s.right.contains(a) => Some(RuleId::OrR1),
                Formula::Or(_, b) if !s.right.contains(b) => Some(RuleId::OrR2),
                _ => None,
            };
            if let Some(rule) = step {
                return Some(RuleApp::with_principal(rule, c, f.clone()));
            }
        }
    }
    // T may still be pending behind a BoxL on the same box
    if t_enabled {
        for (c, s) in h.components().iter().enumerate() {
            for f in &s.left {
                if let Formula::Box(a) = f {
                    if !s.left.contains(a) {
                        return Some(RuleApp::with_principal(RuleId::T, c, f.clone()));
                    }
                }
            }
        }
    }
    None
}

/// First branching step (AndR / OrL) neither of whose premises is already
/// contained in `h`.
pub(crate) fn branching_step(h: &Hypersequent) -> Option<(RuleApp, Hypersequent, Hypersequent)> {
    for (c, s) in h.components().iter().enumerate() {
        for f in &s.right {
            if let Formula::And(a, b) = f {
                if !s.right.contains(a) && !s.right.contains(b) {
                    return Some((
                        RuleApp::with_principal(RuleId::AndR, c, f.clone()),
                        h.with_formula(c, Side::Right, a.as_ref().clone()),
                        h.with_formula(c, Side::Right, b.as_ref().clone()),
                    ));
                }
            }
        }
        for f in &s.left {
            if let Formula::Or(a, b) = f {
                if !s.left.contains(a) && !s.left.contains(b) {
                    return Some((
                        RuleApp::with_principal(RuleId::OrL, c, f.clone()),
                        h.with_formula(c, Side::Left, a.as_ref().clone()),
                        h.with_formula(c, Side::Left, b.as_ref().clone()),
                    ));
                }
            }
        }
    }
    None
}

/// Runs forced steps to saturation; returns the steps and the result.
pub(crate) fn saturate(h: &Hypersequent, t_enabled: bool) -> (Vec<RuleApp>, Hypersequent) {
    let mut steps = Vec::new();
    let mut cur = h.clone();
    while let Some(app) = forced_step(&cur, t_enabled) {
        cur = retained_premise(&cur, &app);
        steps.push(app);
    }
    (steps, cur)
}

fn expand(spec: &CalculusSpec, h: &Hypersequent) -> Expansion<Move> {
    if let Some((c, p)) = h.shared_atom() {
        return Expansion::closed(Move::Closed(c, p));
    }
    let (steps, sat) = saturate(h, spec.enabled(RuleId::T));
    if !steps.is_empty() {
        return Expansion::alts(vec![(Move::Chain(steps), vec![sat])]);
    }
    if let Some((app, p1, p2)) = branching_step(h) {
        return Expansion::alts(vec![(Move::Branch(app), vec![p1, p2])]);
    }
    let n = h.len();
    let mut alts = Vec::new();
    for f in &h.last().right {
        if let Formula::Box(a) = f {
            let prem = h.appended(Sequent::new([], [a.as_ref().clone()]));
            alts.push((Move::BoxR(f.clone()), vec![prem]));
        }
    }
    if n >= 2 {
        alts.push((Move::DeleteFirst, vec![h.without_component(0).unwrap()]));
        alts.push((Move::DeleteLast, vec![h.without_component(n - 1).unwrap()]));
        if spec.enabled(RuleId::EW) {
            for i in 1..n - 1 {
                alts.push((Move::DeleteAt(i), vec![h.without_component(i).unwrap()]));
            }
        }
        if spec.enabled(RuleId::Sym) {
            let r = h.reversed();
            if r != *h {
                alts.push((Move::Sym, vec![r]));
            }
        }
        if spec.enabled(RuleId::EE) {
            for i in 0..n - 1 {
                if h.components()[i] != h.components()[i + 1] {
                    alts.push((Move::EE(i), vec![h.swapped(i)]));
                }
            }
        }
    }
    let dup = if spec.enabled(RuleId::EC) {
        Some(true)
    } else if spec.enabled(RuleId::Merge) {
        Some(false)
    } else {
        None
    };
    if let Some(ec) = dup {
        for i in 0..n {
            let prem = h.inserted(i, h.components()[i].clone());
            let mv = if ec { Move::EC(i) } else { Move::MergeDup(i) };
            alts.push((mv, vec![prem]));
        }
    }
    if spec.enabled(RuleId::Drop) {
        alts.push((Move::Drop, vec![h.appended(Sequent::empty())]));
    }
    Expansion::alts(alts)
}

/// Proof of `h` from `p ⇒ p` sitting in component `c`: Id, internal
/// weakening, and external weakening on both ends.
pub(crate) fn closed_proof(h: &Hypersequent, c: usize, p: &Atom) -> Derivation {
    let comps = h.components();
    let mut d = Derivation::id(p)
        .weaken_to(&Hypersequent::single(comps[c].clone()))
        .expect("component contains p => p");
    let mut cur = vec![comps[c].clone()];
    for j in (0..c).rev() {
        d = d.ewl();
        cur.insert(0, comps[j].clone());
        d = d.weaken_to(&Hypersequent::from_vec(cur.clone())).unwrap();
    }
    for comp in &comps[c + 1..] {
        d = d.ewr();
        cur.push(comp.clone());
        d = d.weaken_to(&Hypersequent::from_vec(cur.clone())).unwrap();
    }
    d
}

/// Replays retained logical steps from `h` upwards: the derivation of the
/// last intermediate hypersequent is `top`.
pub(crate) fn replay_chain(h: &Hypersequent, steps: &[RuleApp], top: Derivation) -> Derivation {
    let mut hs = vec![h.clone()];
    for app in steps {
        let next = retained_premise(hs.last().unwrap(), app);
        hs.push(next);
    }
    let mut d = top;
    for (k, app) in steps.iter().enumerate().rev() {
        d = Derivation::node(hs[k].clone(), app.clone(), vec![d]);
    }
    d
}

fn emit(tree: ProofTree<Move>) -> Derivation {
    let h = tree.h;
    let n = h.len();
    let mut kids = tree.children.into_iter().map(emit);
    let mut one = || kids.next().expect("premise");
    match tree.mv {
        Move::Closed(c, p) => closed_proof(&h, c, &p),
        Move::Chain(steps) => replay_chain(&h, &steps, one()),
        Move::Branch(app) => {
            let a = one();
            let b = one();
            Derivation::node(h, app, vec![a, b])
        }
        Move::BoxR(f) => Derivation::node(h, RuleApp::with_principal(RuleId::BoxR, n - 1, f), vec![one()]),
        Move::DeleteFirst => one().ewl().weaken_to(&h).unwrap(),
        Move::DeleteLast => one().ewr().weaken_to(&h).unwrap(),
        Move::DeleteAt(i) => one().ew(i).weaken_to(&h).unwrap(),
        Move::Sym => Derivation::node(h, RuleApp::new(RuleId::Sym, 0), vec![one()]),
        Move::EE(i) => Derivation::node(h, RuleApp::pair(RuleId::EE, i), vec![one()]),
        Move::EC(i) => Derivation::node(h, RuleApp::pair(RuleId::EC, i), vec![one()]),
        Move::MergeDup(i) => Derivation::node(h, RuleApp::pair(RuleId::Merge, i), vec![one()]),
        Move::Drop => Derivation::node(h, RuleApp::new(RuleId::Drop, n), vec![one()]),
    }
}

/// Exhaustive cut-free backwards search. Cut is never applied, whatever the
/// spec says.
pub fn search(goal: &Hypersequent, spec: &CalculusSpec, limits: Limits) -> (SearchOutcome, SearchStats) {
    let mut engine = Engine::new();
    let found = engine.run(
        goal,
        limits.max_components,
        limits.max_depth,
        limits.max_states,
        |h| expand(spec, h),
    );
    let stats = engine.stats;
    let outcome = match found {
        Some(tree) => SearchOutcome::Proof(Box::new(emit(tree))),
        None if stats.limited() => SearchOutcome::UnknownLimitHit,
        None => SearchOutcome::UnprovableExhausted,
    };
    (outcome, stats)
}
