use super::invert::{invert, InvertItem};
use super::{big_and, big_or, canonical_order_vec, sequent_formula, translate, TransformError};
use crate::calculus::{
    check_derivation, replay_chain, retained_premise, CalculusSpec, Derivation, RuleApp, RuleId,
};
use crate::syntax::{Formula, Hypersequent, Sequent, Side};

/// Backwards steps that take `⇒ A` in component `k`, where `A` is the
/// translation of `s`, up to `Γ ⇒ Δ` plus intermediate formulas.
fn unpack(k: usize, s: &Sequent, a: &Formula, steps: &mut Vec<RuleApp>) {
    let step = |rule, f: &Formula, steps: &mut Vec<RuleApp>| {
        steps.push(RuleApp::with_principal(rule, k, f.clone()))
    };
    let g = big_and(&s.left);
    let d = big_or(&s.right);
    let neg = |g: &Formula, steps: &mut Vec<RuleApp>| {
        step(RuleId::NegR, &g.clone().neg(), steps);
        let items = canonical_order_vec(&s.left);
        chain(k, &items, RuleId::AndL1, RuleId::AndL2, Formula::and, steps);
    };
    match (&g, &d) {
        (Some(g), Some(_)) => {
            step(RuleId::OrR1, a, steps);
            step(RuleId::OrR2, a, steps);
            neg(g, steps);
            let items = canonical_order_vec(&s.right);
            chain(k, &items, RuleId::OrR1, RuleId::OrR2, Formula::or, steps);
        }
        (Some(g), None) => neg(g, steps),
        (None, Some(_)) => {
            let items = canonical_order_vec(&s.right);
            chain(k, &items, RuleId::OrR1, RuleId::OrR2, Formula::or, steps);
        }
        (None, None) => unreachable!("empty components are rejected by translate"),
    }
}

/// Splits the right-nested fold of `items` down to its members.
fn chain(
    k: usize,
    items: &[Formula],
    first: RuleId,
    second: RuleId,
    op: fn(Formula, Formula) -> Formula,
    steps: &mut Vec<RuleApp>,
) {
    for i in 0..items.len().saturating_sub(1) {
        let rest = fold_from(&items[i + 1..], op);
        let f = op(items[i].clone(), rest);
        steps.push(RuleApp::with_principal(first, k, f.clone()));
        steps.push(RuleApp::with_principal(second, k, f));
    }
}

fn fold_from(items: &[Formula], op: fn(Formula, Formula) -> Formula) -> Formula {
    let mut it = items.iter().rev().cloned();
    let last = it.next().expect("non-empty");
    it.fold(last, |acc, f| op(f, acc))
}

/// Translations of the suffixes of `h`: `tails[k]` is `I` of components `k..`.
fn tails(h: &Hypersequent) -> Result<Vec<Formula>, TransformError> {
    let n = h.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let rest = Hypersequent::new(h.components()[k..].to_vec()).expect("non-empty");
        out.push(translate(&rest)?.formula);
    }
    Ok(out)
}

/// Extends a derivation of `H` to one of `⇒ I(H)` using only connective
/// rules and BoxR.
pub fn proof_of_translation(d: &Derivation, spec: &CalculusSpec) -> Result<Derivation, TransformError> {
    check_derivation(d, spec)?;
    let h = d.end().clone();
    let tails = tails(&h)?;
    let goal = Hypersequent::single(Sequent::new([], [tails[0].clone()]));
    let out = build(d, &h, &tails, goal, 0)?;
    check_derivation(&out, spec)?;
    Ok(out)
}

fn build(
    d: &Derivation,
    h: &Hypersequent,
    tails: &[Formula],
    cur: Hypersequent,
    k: usize,
) -> Result<Derivation, TransformError> {
    let n = h.len();
    let s = &h.components()[k];
    let a = sequent_formula(s).ok_or(TransformError::EmptyComponent(k))?;
    let mut steps = Vec::new();
    if k + 1 < n {
        steps.push(RuleApp::with_principal(RuleId::OrR1, k, tails[k].clone()));
        steps.push(RuleApp::with_principal(RuleId::OrR2, k, tails[k].clone()));
    }
    unpack(k, s, &a, &mut steps);
    let mut top = cur.clone();
    for app in &steps {
        top = retained_premise(&top, app);
    }
    let above = if k + 1 < n {
        let boxed = tails[k + 1].clone().boxed();
        let next = top.appended(Sequent::new([], [tails[k + 1].clone()]));
        let p = build(d, h, tails, next, k + 1)?;
        Derivation::infer(top, RuleApp::with_principal(RuleId::BoxR, k, boxed), vec![p])?
    } else {
        d.clone().weaken_to(&top)?
    };
    Ok(replay_chain(&cur, &steps, above))
}

/// From a derivation of `⇒ I(h)`, a derivation of `h` itself, by the
/// inversions for ∨ and □ on the final component followed by ∨, ¬ and ∧
/// within each component. Systems with Sym are rejected.
pub fn proof_from_translation(
    d: &Derivation,
    h: &Hypersequent,
    spec: &CalculusSpec,
) -> Result<Derivation, TransformError> {
    if spec.enabled(RuleId::Sym) {
        return Err(TransformError::Rule(RuleId::Sym));
    }
    let tails = tails(h)?;
    let expected = Hypersequent::single(Sequent::new([], [tails[0].clone()]));
    if d.end() != &expected {
        return Err(TransformError::Shape(format!(
            "{} is not {expected}",
            d.end()
        )));
    }
    check_derivation(d, spec)?;
    let n = h.len();
    let comps = h.components();
    let mut cur = d.clone();
    let genuine = |k: usize, side: Side, f: &Formula| comps[k].side(side).contains(f);
    // Peel `A_k ∨ □I_k+1` off the final component.
    for k in 0..n - 1 {
        let boxed = tails[k + 1].clone().boxed();
        cur = open(cur, spec, InvertItem::Or, k, &tails[k], genuine(k, Side::Right, &tails[k]))?;
        cur = open(cur, spec, InvertItem::Box, k, &boxed, genuine(k, Side::Right, &boxed))?;
    }
    for (k, s) in comps.iter().enumerate() {
        let g = big_and(&s.left);
        let dj = big_or(&s.right);
        if let (Some(g), Some(dj)) = (&g, &dj) {
            let a = Formula::implies(g.clone(), dj.clone());
            cur = open(cur, spec, InvertItem::Or, k, &a, genuine(k, Side::Right, &a))?;
        }
        if let Some(g) = &g {
            let ng = g.clone().neg();
            cur = open(cur, spec, InvertItem::Neg, k, &ng, genuine(k, Side::Right, &ng))?;
            let items = canonical_order_vec(&s.left);
            for i in 0..items.len().saturating_sub(1) {
                let f = Formula::and(items[i].clone(), fold_from(&items[i + 1..], Formula::and));
                cur = open(cur, spec, InvertItem::And, k, &f, genuine(k, Side::Left, &f))?;
            }
        }
        if dj.is_some() {
            let items = canonical_order_vec(&s.right);
            for i in 0..items.len().saturating_sub(1) {
                let f = Formula::or(items[i].clone(), fold_from(&items[i + 1..], Formula::or));
                cur = open(cur, spec, InvertItem::Or, k, &f, genuine(k, Side::Right, &f))?;
            }
        }
    }
    if cur.end() != h {
        cur = cur
            .weaken_to(h)
            .map_err(|_| TransformError::Stuck(h.to_string()))?;
    }
    Ok(cur)
}

/// Inverts `f`, or, when `f` also belongs to the target sequent, only adds
/// its parts by weakening.
fn open(
    d: Derivation,
    spec: &CalculusSpec,
    item: InvertItem,
    k: usize,
    f: &Formula,
    keep: bool,
) -> Result<Derivation, TransformError> {
    let side = if item == InvertItem::And { Side::Left } else { Side::Right };
    if !keep && d.end().components()[k].side(side).contains(f) {
        return invert(&d, spec, item, k, f);
    }
    let h = d.end().clone();
    let target = match (item, f) {
        (InvertItem::Or, Formula::Or(a, b)) => h
            .with_formula(k, Side::Right, a.as_ref().clone())
            .with_formula(k, Side::Right, b.as_ref().clone()),
        (InvertItem::And, Formula::And(a, b)) => h
            .with_formula(k, Side::Left, a.as_ref().clone())
            .with_formula(k, Side::Left, b.as_ref().clone()),
        (InvertItem::Neg, Formula::Neg(a)) => h.with_formula(k, Side::Left, a.as_ref().clone()),
        (InvertItem::Box, Formula::Box(a)) => {
            return Ok(d.ewr().weaken(k + 1, Side::Right, a.as_ref().clone()))
        }
        _ => unreachable!("shapes are built above"),
    };
    Ok(d.weaken_to(&target)?)
}
