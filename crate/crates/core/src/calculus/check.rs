use std::collections::BTreeSet;
use std::fmt;

use super::{CalculusSpec, Derivation, RuleApp, RuleId};
use crate::syntax::{Formula, FormulaSet, Hypersequent, Sequent, Side};

/// Why a single inference fails to match its schema.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{message}")]
pub struct StepError {
    pub message: String,
}

impl StepError {
    pub(crate) fn new(message: impl Into<String>) -> Self {
        StepError {
            message: message.into(),
        }
    }
}

/// A failing node: `path` lists premise indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct CheckError {
    pub path: Vec<usize>,
    pub rule: RuleId,
    pub conclusion: String,
    pub message: String,
}

impl fmt::Display for CheckError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path: Vec<String> = self.path.iter().map(|i| i.to_string()).collect();
        write!(
            f,
            "node [{}] ({} concluding {}): {}",
            path.join("."),
            self.rule,
            self.conclusion,
            self.message
        )
    }
}

type Res = Result<(), StepError>;

fn fail<T>(msg: impl Into<String>) -> Result<T, StepError> {
    Err(StepError::new(msg))
}

fn show(set: &FormulaSet) -> String {
    let v: Vec<String> = crate::syntax::canonical_order(set).iter().map(|f| f.to_string()).collect();
    format!("{{{}}}", v.join(", "))
}

/// Whether one context Γ exists with `set = Γ ∪ {extra}` for every pair.
///
/// Such a Γ exists iff every extra is present in its set and the formulas
/// outside the extras all lie in every set.
fn context_ok(pairs: &[(&FormulaSet, Option<&Formula>)]) -> bool {
    if pairs.iter().any(|(s, e)| e.is_some_and(|e| !s.contains(e))) {
        return false;
    }
    let rest: BTreeSet<&Formula> = pairs
        .iter()
        .flat_map(|(s, e)| s.iter().filter(move |f| Some(*f) != *e))
        .collect();
    pairs.iter().all(|(s, _)| rest.iter().all(|f| s.contains(*f)))
}

fn context(what: &str, pairs: &[(&FormulaSet, Option<&Formula>)]) -> Res {
    if context_ok(pairs) {
        return Ok(());
    }
    let detail: Vec<String> = pairs
        .iter()
        .map(|(s, e)| match e {
            Some(e) => format!("{} with {e}", show(s)),
            None => show(s),
        })
        .collect();
    fail(format!("{what} sides do not share a context: {}", detail.join(" / ")))
}

fn same(what: &str, a: &FormulaSet, b: &FormulaSet) -> Res {
    if a == b {
        Ok(())
    } else {
        fail(format!("{what} differs: {} vs {}", show(a), show(b)))
    }
}

fn same_hyper(a: &Hypersequent, b: &Hypersequent) -> Res {
    if a == b {
        Ok(())
    } else {
        fail(format!("expected premise {b}, found {a}"))
    }
}

/// Components other than those in `skip` must coincide position by position.
fn flanks_equal(c: &Hypersequent, ps: &[&Hypersequent], skip: &[usize]) -> Res {
    for p in ps {
        if p.len() != c.len() {
            return fail(format!("premise {p} has {} components, expected {}", p.len(), c.len()));
        }
        for (i, (x, y)) in c.components().iter().zip(p.components()).enumerate() {
            if !skip.contains(&i) && x != y {
                return fail(format!("component {i} changed: {y} above {x}"));
            }
        }
    }
    Ok(())
}

fn principal(app: &RuleApp) -> Result<&Formula, StepError> {
    app.principal
        .as_ref()
        .ok_or_else(|| StepError::new(format!("{} needs a main formula", app.rule)))
}

fn children(f: &Formula) -> (&Formula, Option<&Formula>) {
    match f {
        Formula::Neg(a) | Formula::Box(a) => (a, None),
        Formula::And(a, b) | Formula::Or(a, b) => (a, Some(b)),
        Formula::Atom(_) => (f, None),
    }
}

/// Checks one inference against its schema. Sequent sides are sets, so a
/// main formula may also appear in the premise context.
pub fn check_step(conclusion: &Hypersequent, app: &RuleApp, premises: &[&Hypersequent]) -> Res {
    use RuleId::*;
    let rule = app.rule;
    if premises.len() != rule.premise_count() {
        return fail(format!(
            "{rule} takes {} premise(s), got {}",
            rule.premise_count(),
            premises.len()
        ));
    }
    if let (Some(given), Some(expected)) = (app.side, rule.principal_side()) {
        if given != expected {
            return fail(format!("{rule} acts on the {expected:?} side"));
        }
    }
    let c = conclusion;
    let n = c.len();
    let s = app.component;
    let in_range = |i: usize| -> Res {
        if i < n {
            Ok(())
        } else {
            fail(format!("component {i} out of range for {n} components"))
        }
    };
    match rule {
        Id => {
            let Some(p) = app.principal.as_ref().map_or_else(
                || c.components()[0].left.iter().next().cloned(),
                |f| Some(f.clone()),
            ) else {
                return fail("Id conclusion is empty");
            };
            if !p.is_atom() {
                return fail(format!("Id needs an atom, got {p}"));
            }
            let want = Hypersequent::single(Sequent::new([p.clone()], [p]));
            if *c != want {
                return fail(format!("Id concludes {c}, expected {want}"));
            }
            Ok(())
        }
        EWL => {
            if n < 2 || !c.components()[0].is_empty() {
                return fail("EWL needs an empty first component and at least two components");
            }
            same_hyper(premises[0], &c.without_component(0).unwrap())
        }
        EWR => {
            if n < 2 || !c.last().is_empty() {
                return fail("EWR needs an empty last component and at least two components");
            }
            same_hyper(premises[0], &c.without_component(n - 1).unwrap())
        }
        EW => {
            in_range(s)?;
            if n < 2 || !c.components()[s].is_empty() {
                return fail(format!("EW needs an empty component at {s} and at least two components"));
            }
            same_hyper(premises[0], &c.without_component(s).unwrap())
        }
        TL | TR => {
            in_range(s)?;
            let side = if rule == TL { Side::Left } else { Side::Right };
            let phi = principal(app)?;
            flanks_equal(c, premises, &[s])?;
            let (cs, ps) = (&c.components()[s], &premises[0].components()[s]);
            same("untouched side", cs.side(side.flip()), ps.side(side.flip()))?;
            context("weakened", &[(cs.side(side), Some(phi)), (ps.side(side), None)])
        }
        BoxR => {
            if n == 0 || s != n - 1 {
                return fail(format!("BoxR acts on the last component ({}), not {s}", n - 1));
            }
            let bphi = principal(app)?;
            let Formula::Box(phi) = bphi else {
                return fail(format!("BoxR main formula {bphi} is not a box"));
            };
            let p = premises[0];
            if p.len() != n + 1 {
                return fail(format!("BoxR premise needs {} components, has {}", n + 1, p.len()));
            }
            let want_last = Sequent::new([], [phi.as_ref().clone()]);
            if *p.last() != want_last {
                return fail(format!("BoxR premise must end in {want_last}, ends in {}", p.last()));
            }
            let head = p.without_component(n).unwrap();
            flanks_equal(c, &[&head], &[s])?;
            let (cs, ps) = (&c.components()[s], &head.components()[s]);
            same("antecedent", &cs.left, &ps.left)?;
            context("succedent", &[(&cs.right, Some(bphi)), (&ps.right, None)])
        }
        BoxL => {
            if s + 1 >= n {
                return fail("BoxL needs a component after the left-main one");
            }
            if app.aux.is_some_and(|a| a != s + 1) {
                return fail("BoxL right-main component must follow the left-main one");
            }
            let bphi = principal(app)?;
            let Formula::Box(phi) = bphi else {
                return fail(format!("BoxL main formula {bphi} is not a box"));
            };
            flanks_equal(c, premises, &[s, s + 1])?;
            let p = premises[0];
            let (c1, p1) = (&c.components()[s], &p.components()[s]);
            let (c2, p2) = (&c.components()[s + 1], &p.components()[s + 1]);
            same("left-main succedent", &c1.right, &p1.right)?;
            context("left-main antecedent", &[(&c1.left, Some(bphi)), (&p1.left, None)])?;
            same("right-main succedent", &c2.right, &p2.right)?;
            context("right-main antecedent", &[(&c2.left, None), (&p2.left, Some(phi))])
        }
        NegL | NegR | AndL1 | AndL2 | OrR1 | OrR2 | T => {
            in_range(s)?;
            let f = principal(app)?;
            let (a, b) = children(f);
            let shape_ok = matches!(
                (rule, f),
                (NegL | NegR, Formula::Neg(_))
                    | (AndL1 | AndL2, Formula::And(..))
                    | (OrR1 | OrR2, Formula::Or(..))
                    | (T, Formula::Box(_))
            );
            if !shape_ok {
                return fail(format!("{rule} cannot have main formula {f}"));
            }
            flanks_equal(c, premises, &[s])?;
            let (cs, ps) = (&c.components()[s], &premises[0].components()[s]);
            let (main_side, active_side, active) = match rule {
                NegL => (Side::Left, Side::Right, a),
                NegR => (Side::Right, Side::Left, a),
                AndL1 | T => (Side::Left, Side::Left, a),
                AndL2 => (Side::Left, Side::Left, b.unwrap()),
                OrR1 => (Side::Right, Side::Right, a),
                _ => (Side::Right, Side::Right, b.unwrap()),
            };
            if main_side == active_side {
                same("other side", cs.side(main_side.flip()), ps.side(main_side.flip()))?;
                context(
                    "active",
                    &[(cs.side(main_side), Some(f)), (ps.side(main_side), Some(active))],
                )
            } else {
                context("main", &[(cs.side(main_side), Some(f)), (ps.side(main_side), None)])?;
                context(
                    "active",
                    &[(cs.side(active_side), None), (ps.side(active_side), Some(active))],
                )
            }
        }
        AndR | OrL => {
            in_range(s)?;
            let f = principal(app)?;
            let ok = matches!((rule, f), (AndR, Formula::And(..)) | (OrL, Formula::Or(..)));
            if !ok {
                return fail(format!("{rule} cannot have main formula {f}"));
            }
            let (a, b) = children(f);
            let b = b.unwrap();
            flanks_equal(c, premises, &[s])?;
            let side = if rule == AndR { Side::Right } else { Side::Left };
            let cs = &c.components()[s];
            let (p1, p2) = (&premises[0].components()[s], &premises[1].components()[s]);
            same("other side", cs.side(side.flip()), p1.side(side.flip()))?;
            same("other side", cs.side(side.flip()), p2.side(side.flip()))?;
            context(
                "active",
                &[(cs.side(side), Some(f)), (p1.side(side), Some(a)), (p2.side(side), Some(b))],
            )
        }
        Cut => {
            in_range(s)?;
            let phi = principal(app)?;
            flanks_equal(c, premises, &[s])?;
            let cs = &c.components()[s];
            let (p1, p2) = (&premises[0].components()[s], &premises[1].components()[s]);
            context("antecedent", &[(&cs.left, None), (&p1.left, None), (&p2.left, Some(phi))])?;
            context("succedent", &[(&cs.right, None), (&p1.right, Some(phi)), (&p2.right, None)])
        }
        EC => {
            in_range(s)?;
            let p = premises[0];
            if p.len() != n + 1 {
                return fail("EC premise must have one more component");
            }
            let dup = &c.components()[s];
            if &p.components()[s] != dup || &p.components()[s + 1] != dup {
                return fail(format!("EC premise must repeat {dup} at {s} and {}", s + 1));
            }
            same_hyper(&p.without_component(s + 1).unwrap(), c)
        }
        Merge => {
            in_range(s)?;
            let p = premises[0];
            if p.len() != n + 1 {
                return fail("Merge premise must have one more component");
            }
            same_hyper(&p.merged(s), c)
        }
        Sym => same_hyper(premises[0], &c.reversed()),
        EE => {
            if s + 1 >= n {
                return fail("EE needs two adjacent components");
            }
            same_hyper(premises[0], &c.swapped(s))
        }
        Drop => same_hyper(premises[0], &c.appended(Sequent::empty())),
    }
}

/// Checks that every rule is enabled and every node matches its schema.
pub fn check_derivation(d: &Derivation, spec: &CalculusSpec) -> Result<(), CheckError> {
    let mut stack: Vec<(&Derivation, Vec<usize>)> = vec![(d, vec![])];
    while let Some((node, path)) = stack.pop() {
        let err = |message: String| CheckError {
            path: path.clone(),
            rule: node.rule.rule,
            conclusion: node.conclusion.to_string(),
            message,
        };
        if !spec.enabled(node.rule.rule) {
            return Err(err(format!("{} is not a rule of {}", node.rule.rule, spec.name)));
        }
        let ends: Vec<&Hypersequent> = node.premises.iter().map(|p| &p.conclusion).collect();
        check_step(&node.conclusion, &node.rule, &ends).map_err(|e| err(e.message))?;
        for (i, p) in node.premises.iter().enumerate().rev() {
            let mut q = path.clone();
            q.push(i);
            stack.push((p, q));
        }
    }
    Ok(())
}
