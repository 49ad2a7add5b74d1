use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use super::check::{check_step, StepError};
use super::{RuleApp, RuleId};
use crate::syntax::{Atom, Formula, Hypersequent, Sequent, Side};

/// A rule-application tree; each node carries its conclusion.
#[derive(Clone, PartialEq, Eq)]
pub struct Derivation {
    pub conclusion: Hypersequent,
    pub rule: RuleApp,
    pub premises: Vec<Derivation>,
}

impl fmt::Debug for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Derivation {
    /// Builds a node after checking it against the rule schema.
    pub fn infer(
        conclusion: Hypersequent,
        rule: RuleApp,
        premises: Vec<Derivation>,
    ) -> Result<Derivation, StepError> {
        let ends: Vec<&Hypersequent> = premises.iter().map(|d| &d.conclusion).collect();
        check_step(&conclusion, &rule, &ends)?;
        Ok(Derivation {
            conclusion,
            rule,
            premises,
        })
    }

    /// Like [`Derivation::infer`] for internal callers whose step is correct by
    /// construction; the schema is still checked in debug builds.
    pub(crate) fn node(conclusion: Hypersequent, rule: RuleApp, premises: Vec<Derivation>) -> Derivation {
        if cfg!(debug_assertions) {
            let ends: Vec<&Hypersequent> = premises.iter().map(|d| &d.conclusion).collect();
            if let Err(e) = check_step(&conclusion, &rule, &ends) {
                panic!("internal step {rule} to {conclusion} rejected: {e}");
            }
        }
        Derivation {
            conclusion,
            rule,
            premises,
        }
    }

    pub fn id(p: &Atom) -> Derivation {
        let f = Formula::Atom(p.clone());
        Derivation {
            conclusion: Hypersequent::single(Sequent::new([f.clone()], [f.clone()])),
            rule: RuleApp {
                rule: RuleId::Id,
                component: 0,
                aux: None,
                principal: Some(f),
                side: None,
            },
            premises: vec![],
        }
    }

    /// A cut-free derivation of `φ ⇒ φ` in the base rules.
    pub fn identity(phi: &Formula) -> Derivation {
        let ok = "identity steps are well formed";
        match phi {
            Formula::Atom(p) => Derivation::id(p),
            Formula::Neg(a) => Derivation::identity(a)
                .apply(RuleId::NegL, 0, Some(phi.clone()))
                .and_then(|d| d.apply(RuleId::NegR, 0, Some(phi.clone())))
                .expect(ok),
            Formula::Box(a) => Derivation::identity(a)
                .ewl()
                .apply(RuleId::BoxL, 0, Some(phi.clone()))
                .and_then(|d| d.apply(RuleId::BoxR, 0, Some(phi.clone())))
                .expect(ok),
            Formula::And(a, b) => {
                let l = Derivation::identity(a).apply(RuleId::AndL1, 0, Some(phi.clone())).expect(ok);
                let r = Derivation::identity(b).apply(RuleId::AndL2, 0, Some(phi.clone())).expect(ok);
                l.apply2(r, RuleId::AndR, 0, phi.clone()).expect(ok)
            }
            Formula::Or(a, b) => {
                let l = Derivation::identity(a).apply(RuleId::OrR1, 0, Some(phi.clone())).expect(ok);
                let r = Derivation::identity(b).apply(RuleId::OrR2, 0, Some(phi.clone())).expect(ok);
                l.apply2(r, RuleId::OrL, 0, phi.clone()).expect(ok)
            }
        }
    }

    pub fn end(&self) -> &Hypersequent {
        &self.conclusion
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            n += 1;
            stack.extend(&d.premises);
        }
        n
    }

    /// Longest root-to-leaf path, counted in nodes.
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn rules_used(&self) -> BTreeSet<RuleId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.insert(d.rule.rule);
            stack.extend(&d.premises);
        }
        out
    }

    pub fn uses(&self, rule: RuleId) -> bool {
        self.rules_used().contains(&rule)
    }

    /// Every formula occurring in any node's conclusion.
    pub fn all_formulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(d) = stack.pop() {
            out.extend(d.conclusion.formulas().cloned());
            stack.extend(&d.premises);
        }
        out
    }

    fn unary(self, conclusion: Hypersequent, rule: RuleApp) -> Derivation {
        Derivation::node(conclusion, rule, vec![self])
    }

    pub fn ewl(self) -> Derivation {
        let h = self.conclusion.inserted(0, Sequent::empty());
        self.unary(h, RuleApp::new(RuleId::EWL, 0))
    }

    pub fn ewr(self) -> Derivation {
        let n = self.conclusion.len();
        let h = self.conclusion.appended(Sequent::empty());
        self.unary(h, RuleApp::new(RuleId::EWR, n))
    }

    /// Inserts an empty component at position `at`.
    pub fn ew(self, at: usize) -> Derivation {
        let h = self.conclusion.inserted(at, Sequent::empty());
        self.unary(h, RuleApp::new(RuleId::EW, at))
    }

    pub fn weaken(self, at: usize, side: Side, f: Formula) -> Derivation {
        let rule = match side {
            Side::Left => RuleId::TL,
            Side::Right => RuleId::TR,
        };
        let h = self.conclusion.with_formula(at, side, f.clone());
        self.unary(h, RuleApp::with_principal(rule, at, f))
    }

    /// Adds formulas one at a time until the end hypersequent equals `target`,
    /// which must extend it componentwise.
    pub fn weaken_to(self, target: &Hypersequent) -> Result<Derivation, StepError> {
        if !target.is_weakening_of(&self.conclusion) {
            return Err(StepError::new(format!(
                "{target} is not a weakening of {}",
                self.conclusion
            )));
        }
        let mut d = self;
        for (i, s) in target.components().iter().enumerate() {
            for side in [Side::Left, Side::Right] {
                let missing: Vec<Formula> = s
                    .side(side)
                    .iter()
                    .filter(|f| !d.conclusion.components()[i].side(side).contains(f))
                    .cloned()
                    .collect();
                for f in missing {
                    d = d.weaken(i, side, f);
                }
            }
        }
        Ok(d)
    }

    /// Applies a rule forwards, computing the usual conclusion in which the
    /// rule's active premise formulas are replaced by the main formula.
    pub fn apply(
        self,
        rule: RuleId,
        component: usize,
        principal: Option<Formula>,
    ) -> Result<Derivation, StepError> {
        let h = self.conclusion.clone();
        let app = match &principal {
            Some(p) => RuleApp::with_principal(rule, component, p.clone()),
            None => match rule {
                RuleId::EC | RuleId::EE | RuleId::Merge => RuleApp::pair(rule, component),
                _ => RuleApp::new(rule, component),
            },
        };
        let conclusion = forward_conclusion(&h, &app)
            .ok_or_else(|| StepError::new(format!("{app} does not apply to {h}")))?;
        Derivation::infer(conclusion, app, vec![self])
    }

    /// Binary rules: the conclusion is read off the first premise.
    pub fn apply2(
        self,
        other: Derivation,
        rule: RuleId,
        component: usize,
        principal: Formula,
    ) -> Result<Derivation, StepError> {
        let app = RuleApp::with_principal(rule, component, principal);
        let conclusion = forward_conclusion(&self.conclusion, &app)
            .ok_or_else(|| StepError::new(format!("{app} does not apply to {}", self.conclusion)))?;
        Derivation::infer(conclusion, app, vec![self, other])
    }

    /// Indented multi-line rendering, root first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![(self, 0usize)];
        while let Some((d, depth)) = stack.pop() {
            let _ = writeln!(out, "{:indent$}{}   ({})", "", d.conclusion, d.rule, indent = depth * 2);
            for p in d.premises.iter().rev() {
                stack.push((p, depth + 1));
            }
        }
        out
    }
}

fn sub(f: &Formula) -> Option<(&Formula, Option<&Formula>)> {
    match f {
        Formula::Neg(a) | Formula::Box(a) => Some((a, None)),
        Formula::And(a, b) | Formula::Or(a, b) => Some((a, Some(b))),
        Formula::Atom(_) => None,
    }
}

/// The conclusion obtained by applying `app` forwards to premise `h`
/// (the first premise for binary rules), or `None` if it cannot apply.
pub(crate) fn forward_conclusion(h: &Hypersequent, app: &RuleApp) -> Option<Hypersequent> {
    use RuleId::*;
    let s = app.component;
    let n = h.len();
    let p = app.principal.as_ref();
    let replace = |h: &Hypersequent, from: Side, old: &Formula, to: Side, new: &Formula| {
        let c = &h.components()[s];
        let mut c = c.without(from, old);
        c.side_mut(to).insert(new.clone());
        h.with_component(s, c)
    };
    Some(match app.rule {
        Id => return None,
        EWL => h.inserted(0, Sequent::empty()),
        EWR => h.appended(Sequent::empty()),
        EW if s <= n => h.inserted(s, Sequent::empty()),
        TL if s < n => h.with_formula(s, Side::Left, p?.clone()),
        TR if s < n => h.with_formula(s, Side::Right, p?.clone()),
        BoxR => {
            let Formula::Box(phi) = p? else { return None };
            let last = h.last();
            if n < 2 || !last.left.is_empty() || last.right.len() != 1 || !last.right.contains(phi) {
                return None;
            }
            let g = h.without_component(n - 1)?;
            g.with_formula(n - 2, Side::Right, p?.clone())
        }
        BoxL if s + 1 < n => {
            let Formula::Box(phi) = p? else { return None };
            h.without_formula(s + 1, Side::Left, phi)
                .with_formula(s, Side::Left, p?.clone())
        }
        NegL | NegR | AndL1 | AndL2 | OrR1 | OrR2 | T | AndR | OrL if s < n => {
            let pf = p?;
            let (a, b) = sub(pf)?;
            let ok_shape = matches!(
                (app.rule, pf),
                (NegL | NegR, Formula::Neg(_))
                    | (AndL1 | AndL2 | AndR, Formula::And(..))
                    | (OrR1 | OrR2 | OrL, Formula::Or(..))
                    | (T, Formula::Box(_))
            );
            if !ok_shape {
                return None;
            }
            match app.rule {
                NegL => replace(h, Side::Right, a, Side::Left, pf),
                NegR => replace(h, Side::Left, a, Side::Right, pf),
                AndL1 | T => replace(h, Side::Left, a, Side::Left, pf),
                AndL2 => replace(h, Side::Left, b?, Side::Left, pf),
                OrR1 | AndR => replace(h, Side::Right, a, Side::Right, pf),
                OrR2 => replace(h, Side::Right, b?, Side::Right, pf),
                OrL => replace(h, Side::Left, a, Side::Left, pf),
                _ => unreachable!(),
            }
        }
        Cut if s < n => h.without_formula(s, Side::Right, p?),
        EC if s + 1 < n && h.components()[s] == h.components()[s + 1] => h.without_component(s + 1)?,
        Merge if s + 1 < n => h.merged(s),
        Sym => h.reversed(),
        EE if s + 1 < n => h.swapped(s),
        Drop if n >= 2 && h.last().is_empty() => h.without_component(n - 1)?,
        _ => return None,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum DerivationFileError {
    #[error("malformed derivation: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleRepr {
    id: RuleId,
    component: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aux: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    principal: Option<Formula>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    side: Option<SideRepr>,
}

#[derive(Serialize, Deserialize, Clone, Copy)]
enum SideRepr {
    L,
    R,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DerivationRepr {
    conclusion: Hypersequent,
    rule: RuleRepr,
    premises: Vec<DerivationRepr>,
}

impl From<&Derivation> for DerivationRepr {
    fn from(d: &Derivation) -> Self {
        DerivationRepr {
            conclusion: d.conclusion.clone(),
            rule: RuleRepr {
                id: d.rule.rule,
                component: d.rule.component,
                aux: d.rule.aux,
                principal: d.rule.principal.clone(),
                side: d.rule.side.map(|s| match s {
                    Side::Left => SideRepr::L,
                    Side::Right => SideRepr::R,
                }),
            },
            premises: d.premises.iter().map(DerivationRepr::from).collect(),
        }
    }
}

impl From<DerivationRepr> for Derivation {
    fn from(r: DerivationRepr) -> Self {
        Derivation {
            conclusion: r.conclusion,
            rule: RuleApp {
                rule: r.rule.id,
                component: r.rule.component,
                aux: r.rule.aux,
                principal: r.rule.principal,
                side: r.rule.side.map(|s| match s {
                    SideRepr::L => Side::Left,
                    SideRepr::R => Side::Right,
                }),
            },
            premises: r.premises.into_iter().map(Derivation::from).collect(),
        }
    }
}

impl Serialize for Derivation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        DerivationRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Derivation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(DerivationRepr::deserialize(d)?.into())
    }
}

impl Derivation {
    /// Parses the JSON form without serde_json's default nesting limit, since
    /// derivations are routinely deeper than 128 levels.
    pub fn from_json(text: &str) -> Result<Derivation, DerivationFileError> {
        let mut de = serde_json::Deserializer::from_str(text);
        de.disable_recursion_limit();
        let d = Derivation::deserialize(&mut de)?;
        de.end()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("derivations always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations always serialize")
    }
}
