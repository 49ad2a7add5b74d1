//! Decision procedure for RK4 and RS4 with Cut.
//!
//! Backwards saturation as in cut-free search, plus the derived rule BoxL′
//! (a box on the left of a component puts its argument on the left of every
//! later component, and for RS4 of the same component). BoxL′ is emitted as a
//! Cut against a derivation of `□φ ⇒ // … // ⇒ φ`, so every valid verdict
//! ships a derivation checkable in RK4+Cut or RS4+Cut. A saturated state whose
//! last component repeats an earlier one is blocked. When the goal is not
//! proven, a countermodel is read off the explored states: each world is the
//! last component of an unprovable saturated chain, its successors come from
//! the BoxR alternatives, and blocked chains loop back to the repeated
//! component. The accessibility relation is the transitive (RK4) or
//! reflexive-transitive (RS4) closure, and the result is checked before it is
//! returned.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::calculus::{
    branching_step, closed_proof, forced_step, retained_premise, CalculusSpec, Derivation, Engine,
    Expansion, ProofTree, RuleApp, RuleId, SearchStats as EngineStats, System,
};
use crate::kripke::{check_frame_class, FrameClass, KripkeFrame, KripkeModel, MAX_WORLDS};
use crate::syntax::{Atom, Formula, Hypersequent, Sequent, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecideSystem {
    RK4Cut,
    RS4Cut,
}

impl DecideSystem {
    pub fn spec(self) -> CalculusSpec {
        match self {
            DecideSystem::RK4Cut => CalculusSpec::system(System::RK4).with_cut(),
            DecideSystem::RS4Cut => CalculusSpec::system(System::RS4).with_cut(),
        }
    }

    pub fn frame_class(self) -> FrameClass {
        match self {
            DecideSystem::RK4Cut => FrameClass::K4,
            DecideSystem::RS4Cut => FrameClass::S4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecideSystem::RK4Cut => "RK4Cut",
            DecideSystem::RS4Cut => "RS4Cut",
        }
    }

    fn reflexive(self) -> bool {
        self == DecideSystem::RS4Cut
    }
}

impl fmt::Display for DecideSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DecideSystem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rk4cut" | "rk4" => Ok(DecideSystem::RK4Cut),
            "rs4cut" | "rs4" => Ok(DecideSystem::RS4Cut),
            _ => Err(format!("unknown system `{s}` (expected rk4cut or rs4cut)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecideLimits {
    pub max_components: usize,
    pub max_depth: usize,
    pub max_states: usize,
}

pub fn default_decide_limits(goal: &Hypersequent) -> DecideLimits {
    DecideLimits {
        max_components: goal.len() + 2 * goal.subformulas().len() + 2,
        max_depth: 400,
        max_states: 400_000,
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    Valid(Box<Derivation>),
    Invalid { model: KripkeModel, branch: Vec<usize> },
    Unknown,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Valid(_) => "valid",
            Verdict::Invalid { .. } => "invalid",
            Verdict::Unknown => "unknown",
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DecideError {
    #[error("countermodel extraction failed: {0}")]
    Extraction(String),
    #[error("countermodel would need more than {MAX_WORLDS} worlds")]
    TooManyWorlds,
}

/// One forced saturation step.
#[derive(Debug, Clone)]
pub(crate) enum Step {
    Rule(RuleApp),
    /// `□φ` on the left of `from` puts `φ` on the left of `to`.
    Far { from: usize, to: usize, phi: Formula },
}

#[derive(Debug, Clone)]
enum Move {
    Closed(usize, Atom),
    Chain(Vec<Step>),
    Branch(RuleApp),
    BoxR(Formula),
    DeleteLast,
}

fn step_premise(h: &Hypersequent, step: &Step) -> Hypersequent {
    match step {
        Step::Rule(app) => retained_premise(h, app),
        Step::Far { to, phi, .. } => h.with_formula(*to, Side::Left, phi.clone()),
    }
}

fn next_step(h: &Hypersequent, sys: DecideSystem) -> Option<Step> {
    if let Some(app) = forced_step(h, false) {
        return Some(Step::Rule(app));
    }
    let comps = h.components();
    for (from, c) in comps.iter().enumerate() {
        for f in &c.left {
            let Formula::Box(phi) = f else { continue };
            let start = if sys.reflexive() { from } else { from + 1 };
            for (to, t) in comps.iter().enumerate().skip(start) {
                if !t.left.contains(phi.as_ref()) {
                    return Some(Step::Far {
                        from,
                        to,
                        phi: phi.as_ref().clone(),
                    });
                }
            }
        }
    }
    None
}

fn saturate_steps(h: &Hypersequent, sys: DecideSystem) -> (Vec<Step>, Hypersequent) {
    let mut steps = Vec::new();
    let mut cur = h.clone();
    while let Some(s) = next_step(&cur, sys) {
        cur = step_premise(&cur, &s);
        steps.push(s);
    }
    (steps, cur)
}

/// Index of an earlier component equal to the last one.
fn repeat_of_last(h: &Hypersequent) -> Option<usize> {
    let comps = h.components();
    let last = comps.last()?;
    comps[..comps.len() - 1].iter().position(|c| c == last)
}

struct Decider {
    sys: DecideSystem,
    goal_len: usize,
    engine: Engine<Move>,
}

impl Decider {
    fn blocked(&self, h: &Hypersequent) -> Option<usize> {
        if h.len() > self.goal_len {
            repeat_of_last(h)
        } else {
            None
        }
    }

    fn expand(sys: DecideSystem, goal_len: usize, h: &Hypersequent) -> Expansion<Move> {
        if let Some((c, p)) = h.shared_atom() {
            return Expansion::closed(Move::Closed(c, p));
        }
        let (steps, sat) = saturate_steps(h, sys);
        if !steps.is_empty() {
            return Expansion::alts(vec![(Move::Chain(steps), vec![sat])]);
        }
        if let Some((app, p1, p2)) = branching_step(h) {
            return Expansion::alts(vec![(Move::Branch(app), vec![p1, p2])]);
        }
        if h.len() > goal_len && repeat_of_last(h).is_some() {
            return Expansion::alts(vec![]);
        }
        let mut alts = Vec::new();
        for f in &h.last().right {
            if let Formula::Box(a) = f {
                let prem = h.appended(Sequent::new([], [a.as_ref().clone()]));
                alts.push((Move::BoxR(f.clone()), vec![prem]));
            }
        }
        if h.len() >= 2 {
            alts.push((Move::DeleteLast, vec![h.without_component(h.len() - 1).unwrap()]));
        }
        Expansion::alts(alts)
    }

    /// Follows forced and branching steps from an unproven state to an
    /// unproven saturated one.
    fn settle(&self, mut i: usize) -> Result<usize, DecideError> {
        loop {
            let mut next = None;
            for (mv, prems) in self.engine.alternatives(i) {
                if matches!(mv, Move::Chain(_) | Move::Branch(_)) {
                    next = prems.iter().copied().find(|&j| !self.engine.proven(j));
                    if next.is_none() {
                        return Err(DecideError::Extraction(format!(
                            "{} has no unproven premise",
                            self.engine.state(i)
                        )));
                    }
                }
            }
            match next {
                Some(j) => i = j,
                None => return Ok(i),
            }
        }
    }

    fn extract(&self, goal: &Hypersequent) -> Result<(KripkeModel, Vec<usize>), DecideError> {
        let err = |m: String| DecideError::Extraction(m);
        let root = self.engine.id_of(goal).ok_or_else(|| err("goal was not explored".into()))?;
        let top = self.settle(root)?;
        let chain0 = self.engine.state(top).clone();
        let n = chain0.len();

        let mut worlds: Vec<Hypersequent> = Vec::new();
        let mut index: HashMap<Hypersequent, usize> = HashMap::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        let mut branch = Vec::new();
        let mut queue = Vec::new();

        // prefixes of the saturated goal form the branch
        let mut prefixes = Vec::new();
        let mut cur = top;
        loop {
            prefixes.push(cur);
            if self.engine.state(cur).len() == 1 {
                break;
            }
            let del = self
                .engine
                .alternatives(cur)
                .find(|(mv, _)| matches!(mv, Move::DeleteLast))
                .map(|(_, p)| p[0])
                .ok_or_else(|| err(format!("{} lacks a prefix state", self.engine.state(cur))))?;
            cur = self.settle(del)?;
        }
        prefixes.reverse();
        if prefixes.len() != n {
            return Err(err("prefix chain has the wrong length".into()));
        }
        for &s in &prefixes {
            let w = worlds.len();
            worlds.push(self.engine.state(s).clone());
            index.insert(self.engine.state(s).clone(), w);
            branch.push(w);
            queue.push((w, s));
        }
        for k in 1..n {
            edges.push((branch[k - 1], branch[k]));
        }

        while let Some((w, s)) = queue.pop() {
            let kids: Vec<usize> = self
                .engine
                .alternatives(s)
                .filter(|(mv, _)| matches!(mv, Move::BoxR(_)))
                .map(|(_, p)| p[0])
                .collect();
            for j in kids {
                if self.engine.proven(j) {
                    return Err(err(format!("BoxR premise {} is proven", self.engine.state(j))));
                }
                let t = self.settle(j)?;
                let th = self.engine.state(t).clone();
                let target = if let Some(b) = self.blocked(&th) {
                    let ancestor = th.prefix(b);
                    *index
                        .get(&ancestor)
                        .ok_or_else(|| err(format!("blocked chain {th} has no world for {ancestor}")))?
                } else if let Some(&u) = index.get(&th) {
                    u
                } else {
                    let u = worlds.len();
                    if u >= MAX_WORLDS {
                        return Err(DecideError::TooManyWorlds);
                    }
                    worlds.push(th.clone());
                    index.insert(th, u);
                    queue.push((u, t));
                    u
                };
                edges.push((w, target));
            }
        }

        let m = worlds.len();
        let mut frame = KripkeFrame::new((0..m).map(|i| format!("w{i}")).collect(), &edges)
            .map_err(|e| err(e.to_string()))?
            .transitive_closure();
        if self.sys.reflexive() {
            let mut rows = frame.rows().to_vec();
            for (i, r) in rows.iter_mut().enumerate() {
                *r |= 1u64 << i;
            }
            frame = KripkeFrame::from_rows(rows);
        }
        let mut val: BTreeMap<Atom, u64> = goal.atoms().into_iter().map(|a| (a, 0)).collect();
        for (w, chain) in worlds.iter().enumerate() {
            for f in &chain.last().left {
                if let Formula::Atom(a) = f {
                    *val.entry(a.clone()).or_insert(0) |= 1u64 << w;
                }
            }
        }
        let model = KripkeModel::new(frame, val);
        check_frame_class(&model.frame, self.sys.frame_class())
            .map_err(|v| err(format!("extracted frame violates {v:?}")))?;
        verify_branch(&model, goal, &branch).map_err(err)?;
        Ok((model, branch))
    }
}

/// Checks that `branch` is an R-path along which every component of `h` is
/// false.
pub fn verify_branch(model: &KripkeModel, h: &Hypersequent, branch: &[usize]) -> Result<(), String> {
    if branch.len() != h.len() {
        return Err("branch length differs from the number of components".into());
    }
    for k in 1..branch.len() {
        if !model.frame.rel(branch[k - 1], branch[k]) {
            return Err(format!("worlds {} and {} are not related", branch[k - 1], branch[k]));
        }
    }
    for (s, &w) in h.components().iter().zip(branch) {
        for f in &s.left {
            if !model.eval_at(w, f).map_err(|e| e.to_string())? {
                return Err(format!("{f} is not true at world {w}"));
            }
        }
        for f in &s.right {
            if model.eval_at(w, f).map_err(|e| e.to_string())? {
                return Err(format!("{f} is not false at world {w}"));
            }
        }
    }
    Ok(())
}

/// `□φ ⇒ // ∅ … ∅ // ⇒ φ` with `gap` empty components in between.
fn box_reach(phi: &Formula, gap: usize) -> Derivation {
    let mut d = Derivation::identity(phi)
        .ewl()
        .apply(RuleId::BoxL, 0, Some(phi.clone().boxed()))
        .expect("BoxL on an identity");
    for _ in 0..gap {
        d = d.ew(1);
    }
    d
}

/// `□φ ⇒ φ` using EC.
fn box_refl(phi: &Formula) -> Derivation {
    let d = box_reach(phi, 0);
    let s = Sequent::new([phi.clone().boxed()], [phi.clone()]);
    let d = d
        .weaken_to(&Hypersequent::new(vec![s.clone(), s.clone()]).unwrap())
        .expect("weakening");
    Derivation::infer(Hypersequent::single(s), RuleApp::pair(RuleId::EC, 0), vec![d]).expect("EC")
}

/// Derivation of `h` from `above`, a derivation of `h` with `φ` added to the
/// left of component `to`, by Cut against the BoxL′ simulation.
pub fn far_step(h: &Hypersequent, from: usize, to: usize, phi: &Formula, above: Derivation) -> Derivation {
    let mut left = if from == to {
        box_refl(phi)
    } else {
        box_reach(phi, to - from - 1)
    };
    for _ in 0..from {
        left = left.ewl();
    }
    while left.end().len() < h.len() {
        left = left.ewr();
    }
    let left = left
        .weaken_to(&h.with_formula(to, Side::Right, phi.clone()))
        .expect("context contains the box");
    Derivation::node(
        h.clone(),
        RuleApp::with_principal(RuleId::Cut, to, phi.clone()),
        vec![left, above],
    )
}

fn emit(tree: ProofTree<Move>) -> Derivation {
    let h = tree.h;
    let n = h.len();
    let mut kids = tree.children.into_iter().map(emit);
    let mut one = || kids.next().expect("premise");
    match tree.mv {
        Move::Closed(c, p) => closed_proof(&h, c, &p),
        Move::Chain(steps) => {
            let mut hs = vec![h];
            for s in &steps {
                let next = step_premise(hs.last().unwrap(), s);
                hs.push(next);
            }
            let mut d = one();
            for (k, s) in steps.iter().enumerate().rev() {
                d = emit_step(&hs[k], s, d);
            }
            d
        }
        Move::Branch(app) => {
            let a = one();
            let b = one();
            Derivation::node(h, app, vec![a, b])
        }
        Move::BoxR(f) => Derivation::node(h, RuleApp::with_principal(RuleId::BoxR, n - 1, f), vec![one()]),
        Move::DeleteLast => one().ewr().weaken_to(&h).expect("weakening"),
    }
}

pub(crate) fn emit_step(h: &Hypersequent, step: &Step, above: Derivation) -> Derivation {
    match step {
        Step::Rule(app) => Derivation::node(h.clone(), app.clone(), vec![above]),
        Step::Far { from, to, phi } => far_step(h, *from, *to, phi, above),
    }
}

/// Decides `goal` in RK4+Cut or RS4+Cut.
pub fn decide(
    goal: &Hypersequent,
    sys: DecideSystem,
    limits: DecideLimits,
) -> Result<(Verdict, EngineStats), DecideError> {
    let mut dec = Decider {
        sys,
        goal_len: goal.len(),
        engine: Engine::new(),
    };
    let goal_len = goal.len();
    let found = dec.engine.run(
        goal,
        limits.max_components,
        limits.max_depth,
        limits.max_states,
        |h| Decider::expand(sys, goal_len, h),
    );
    let stats = dec.engine.stats;
    let verdict = match found {
        Some(tree) => Verdict::Valid(Box::new(emit(tree))),
        None if stats.limited() => Verdict::Unknown,
        None => {
            let (model, branch) = dec.extract(goal)?;
            Verdict::Invalid { model, branch }
        }
    };
    Ok((verdict, stats))
}

#[cfg(test)]
mod tests;
