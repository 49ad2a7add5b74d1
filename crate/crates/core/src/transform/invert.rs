//! Inversion of ∨ on the right, ∧ on the left, ¬ on the right, and □ on the
//! right of the final component.
//!
//! The transformation follows the derivation upwards, tracking the component
//! positions that hold the inverted formula. At the rule that introduced it
//! the premise is used directly; at every other rule the transformed premises
//! are fed back into the same rule. Where a premise still needs the formula as
//! an active formula, its plain weakening is used instead. A node where
//! neither works (for □, mostly EW or EC acting next to the tracked
//! component) is rebuilt by cut-free search on its transformed conclusion.

use std::collections::BTreeSet;

use super::TransformError;
use crate::calculus::{
    check_derivation, default_limits, search, CalculusSpec, Derivation, RuleId, SearchOutcome,
};
use crate::syntax::{Formula, Hypersequent, Sequent, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvertItem {
    /// `Γ ⇒ Δ, φ∨ψ` to `Γ ⇒ Δ, φ, ψ`
    Or = 1,
    /// `Γ, φ∧ψ ⇒ Δ` to `Γ, φ, ψ ⇒ Δ`
    And = 2,
    /// `Γ ⇒ Δ, ¬φ` to `Γ, φ ⇒ Δ`
    Neg = 3,
    /// `H // Γ ⇒ Δ, □φ` to `H // Γ ⇒ Δ // ⇒ φ`
    Box = 4,
}

impl InvertItem {
    pub fn from_number(n: u8) -> Option<InvertItem> {
        match n {
            1 => Some(InvertItem::Or),
            2 => Some(InvertItem::And),
            3 => Some(InvertItem::Neg),
            4 => Some(InvertItem::Box),
            _ => None,
        }
    }

    fn side(self) -> Side {
        match self {
            InvertItem::And => Side::Left,
            _ => Side::Right,
        }
    }

    fn introducers(self) -> &'static [RuleId] {
        use RuleId::*;
        match self {
            InvertItem::Or => &[OrR1, OrR2, TR],
            InvertItem::And => &[AndL1, AndL2, TL],
            InvertItem::Neg => &[NegR, TR],
            InvertItem::Box => &[BoxR, TR],
        }
    }
}

type Pos = BTreeSet<usize>;

struct Inverter<'a> {
    item: InvertItem,
    x: Formula,
    parts: Vec<(Side, Formula)>,
    spec: &'a CalculusSpec,
    fallbacks: usize,
}

impl Inverter<'_> {
    fn holds(&self, h: &Hypersequent, k: usize) -> bool {
        h.get(k).is_some_and(|s| s.side(self.item.side()).contains(&self.x))
    }

    fn live(&self, h: &Hypersequent, pos: &Pos) -> Pos {
        pos.iter().copied().filter(|&k| self.holds(h, k)).collect()
    }

    /// Adds the parts at every live position, and removes the inverted
    /// formula unless `keep`.
    fn transform(&self, h: &Hypersequent, pos: &Pos, keep: bool) -> Hypersequent {
        let live = self.live(h, pos);
        let mut comps: Vec<Sequent> = h.components().to_vec();
        let mut append = false;
        for &k in &live {
            if !keep {
                comps[k].side_mut(self.item.side()).remove(&self.x);
            }
            if self.item == InvertItem::Box {
                let (_, phi) = &self.parts[0];
                if k + 1 < comps.len() {
                    comps[k + 1].right.insert(phi.clone());
                } else {
                    append = true;
                }
            } else {
                for (side, f) in &self.parts {
                    comps[k].side_mut(*side).insert(f.clone());
                }
            }
        }
        if append {
            comps.push(Sequent::new([], [self.parts[0].1.clone()]));
        }
        Hypersequent::new(comps).expect("non-empty")
    }

    fn lift(&self, d: Derivation, target: &Hypersequent) -> Option<Derivation> {
        if d.end() == target {
            return Some(d);
        }
        let d = if d.end().len() + 1 == target.len() { d.ewr() } else { d };
        d.weaken_to(target).ok()
    }

    fn premise_positions(&self, d: &Derivation, pos: &Pos) -> Vec<Pos> {
        use RuleId::*;
        let n = d.conclusion.len();
        let app = &d.rule;
        let i = app.component;
        let map = |f: &dyn Fn(usize) -> Vec<usize>| -> Pos { pos.iter().flat_map(|&k| f(k)).collect() };
        let one = match app.rule {
            EWL => map(&|k| if k == 0 { vec![] } else { vec![k - 1] }),
            EW => map(&|k| match k.cmp(&i) {
                std::cmp::Ordering::Less => vec![k],
                std::cmp::Ordering::Equal => vec![],
                std::cmp::Ordering::Greater => vec![k - 1],
            }),
            EC | Merge => map(&|k| match k.cmp(&i) {
                std::cmp::Ordering::Less => vec![k],
                std::cmp::Ordering::Equal => vec![k, k + 1],
                std::cmp::Ordering::Greater => vec![k + 1],
            }),
            Sym => map(&|k| vec![n - 1 - k]),
            EE => map(&|k| {
                if k == i {
                    vec![i + 1]
                } else if k == i + 1 {
                    vec![i]
                } else {
                    vec![k]
                }
            }),
            _ => pos.clone(),
        };
        vec![one; d.premises.len()]
    }

    fn run(&mut self, d: &Derivation, pos: &Pos) -> Result<Derivation, TransformError> {
        let live = self.live(&d.conclusion, pos);
        if live.is_empty() {
            return Ok(d.clone());
        }
        let target = self.transform(&d.conclusion, &live, false);
        let app = &d.rule;

        let introduces = self.item.introducers().contains(&app.rule)
            && app.principal.as_ref() == Some(&self.x)
            && live.contains(&app.component);
        if introduces {
            let p = &d.premises[0];
            let ppos: Pos = if app.rule == RuleId::BoxR {
                [p.conclusion.len() - 2].into()
            } else {
                live.clone()
            };
            let q = self.run(p, &ppos)?;
            if let Some(out) = self.lift(q, &target) {
                return Ok(out);
            }
            return self.fallback(&target);
        }

        // EWR whose new empty component is the one that would receive φ
        if app.rule == RuleId::EWR && self.item == InvertItem::Box {
            let n = d.conclusion.len();
            if live.contains(&(n - 2)) {
                let q = self.run(&d.premises[0], &live)?;
                if q.end() == &target {
                    return Ok(q);
                }
            }
        }

        let ppos = self.premise_positions(d, &live);
        let mut options: Vec<Vec<Derivation>> = Vec::new();
        for (p, pp) in d.premises.iter().zip(&ppos) {
            let mut opts = vec![self.run(p, pp)?];
            if !self.live(&p.conclusion, pp).is_empty() {
                let w = self.transform(&p.conclusion, pp, true);
                if let Some(wd) = self.lift(p.clone(), &w) {
                    opts.push(wd);
                }
            }
            options.push(opts);
        }
        let combos: Vec<Vec<Derivation>> = match options.len() {
            1 => options[0].iter().map(|a| vec![a.clone()]).collect(),
            2 => options[0]
                .iter()
                .flat_map(|a| options[1].iter().map(move |b| vec![a.clone(), b.clone()]))
                .collect(),
            _ => vec![],
        };
        for prems in combos {
            if let Ok(out) = Derivation::infer(target.clone(), app.clone(), prems) {
                return Ok(out);
            }
        }
        self.fallback(&target)
    }

    fn fallback(&mut self, target: &Hypersequent) -> Result<Derivation, TransformError> {
        self.fallbacks += 1;
        let cut_free = CalculusSpec {
            cut: false,
            ..self.spec.clone()
        };
        match search(target, &cut_free, default_limits(target)).0 {
            SearchOutcome::Proof(d) => Ok(*d),
            _ => Err(TransformError::Stuck(target.to_string())),
        }
    }
}

/// Applies inversion `item` to the occurrence of `formula` in `component`
/// of the end hypersequent of the cut-free derivation `d`.
pub fn invert(
    d: &Derivation,
    spec: &CalculusSpec,
    item: InvertItem,
    component: usize,
    formula: &Formula,
) -> Result<Derivation, TransformError> {
    invert_counted(d, spec, item, component, formula).map(|(d, _)| d)
}

/// [`invert`], also returning how many nodes had to be rebuilt by search.
pub(crate) fn invert_counted(
    d: &Derivation,
    spec: &CalculusSpec,
    item: InvertItem,
    component: usize,
    formula: &Formula,
) -> Result<(Derivation, usize), TransformError> {
    let h = d.end();
    let parts = match (item, formula) {
        (InvertItem::Or, Formula::Or(a, b)) => {
            vec![(Side::Right, a.as_ref().clone()), (Side::Right, b.as_ref().clone())]
        }
        (InvertItem::And, Formula::And(a, b)) => {
            vec![(Side::Left, a.as_ref().clone()), (Side::Left, b.as_ref().clone())]
        }
        (InvertItem::Neg, Formula::Neg(a)) => vec![(Side::Left, a.as_ref().clone())],
        (InvertItem::Box, Formula::Box(a)) => vec![(Side::Right, a.as_ref().clone())],
        _ => {
            return Err(TransformError::Shape(format!(
                "item {} does not apply to {formula}",
                item as u8
            )))
        }
    };
    if item == InvertItem::Box && component + 1 != h.len() {
        return Err(TransformError::Shape(
            "□ is only inverted in the final component".into(),
        ));
    }
    let present = h
        .get(component)
        .is_some_and(|s| s.side(item.side()).contains(formula));
    if !present {
        return Err(TransformError::Shape(format!(
            "{formula} is not in the {} side of component {component} of {h}",
            match item.side() {
                Side::Left => "left",
                Side::Right => "right",
            }
        )));
    }
    if d.uses(RuleId::Cut) {
        return Err(TransformError::Rule(RuleId::Cut));
    }
    check_derivation(d, spec)?;
    let mut inv = Inverter {
        item,
        x: formula.clone(),
        parts,
        spec,
        fallbacks: 0,
    };
    let out = inv.run(d, &[component].into())?;
    check_derivation(&out, spec)?;
    Ok((out, inv.fallbacks))
}
