use super::TransformError;
use crate::calculus::{check_derivation, CalculusSpec, Derivation, RuleApp, RuleId, System};

/// Extends `d` by one Merge on its first pair of equal adjacent components.
pub fn ec_from_merge(d: &Derivation) -> Result<Derivation, TransformError> {
    let h = d.end();
    let i = (0..h.len().saturating_sub(1))
        .find(|&i| h.components()[i] == h.components()[i + 1])
        .ok_or_else(|| TransformError::Shape(format!("{h} has no equal adjacent components")))?;
    Ok(Derivation::infer(h.merged(i), RuleApp::pair(RuleId::Merge, i), vec![d.clone()])?)
}

/// Turns an RTB derivation of `G // S_i // S_i+1 // G'` into one of
/// `G // S_i ∪ S_i+1 // G'` without using Merge.
pub fn eliminate_merge(d: &Derivation, i: usize) -> Result<Derivation, TransformError> {
    let n = d.end().len();
    if i + 1 >= n {
        return Err(TransformError::Shape(format!(
            "cannot merge components {i} and {} of a {n}-component hypersequent",
            i + 1
        )));
    }
    check_derivation(d, &CalculusSpec::system(System::RTB))?;
    elim(d, i)
}

fn shift(c: usize, i: usize) -> usize {
    if c <= i {
        c
    } else {
        c - 1
    }
}

fn elim(d: &Derivation, i: usize) -> Result<Derivation, TransformError> {
    use RuleId::*;
    let h = &d.conclusion;
    let n = h.len();
    let target = h.merged(i);
    let app = &d.rule;
    let s = app.component;
    let prem = |k: usize| &d.premises[k];
    let moved = |mut a: RuleApp, c: usize| {
        a.component = c;
        if a.aux.is_some() {
            a.aux = Some(c + 1);
        }
        a
    };
    let out = match app.rule {
        EWL if i == 0 => prem(0).clone(),
        EWL => elim(prem(0), i - 1)?.ewl(),
        EWR if i + 2 == n => prem(0).clone(),
        EWR => elim(prem(0), i)?.ewr(),
        TL | TR => elim(prem(0), i)?.weaken_to(&target)?,
        NegL | NegR | AndL1 | AndL2 | OrR1 | OrR2 | T => {
            let p = elim(prem(0), i)?;
            Derivation::infer(target, moved(app.clone(), shift(s, i)), vec![p])?
        }
        AndR | OrL => {
            let p = elim(prem(0), i)?;
            let q = elim(prem(1), i)?;
            Derivation::infer(target, moved(app.clone(), shift(s, i)), vec![p, q])?
        }
        BoxL if s == i => {
            // left-main and right-main fall into one component: T instead
            let p = elim(prem(0), i)?;
            let f = app.principal.clone().expect("BoxL has a main formula");
            Derivation::infer(target, RuleApp::with_principal(T, i, f), vec![p])?
        }
        BoxL => {
            let p = elim(prem(0), i)?;
            Derivation::infer(target, moved(app.clone(), shift(s, i)), vec![p])?
        }
        BoxR => {
            let p = elim(prem(0), i)?;
            let last = target.len() - 1;
            Derivation::infer(target, moved(app.clone(), last), vec![p])?
        }
        Sym => {
            let p = elim(prem(0), n - 2 - i)?;
            if target.len() == 1 {
                p
            } else {
                Derivation::infer(target, app.clone(), vec![p])?
            }
        }
        Id => unreachable!("axioms have one component"),
        other => return Err(TransformError::Rule(other)),
    };
    debug_assert_eq!(out.end(), &h.merged(i));
    Ok(out)
}

