//! Derivation-to-derivation transformations: Merge elimination in RTB, EC from
//! Merge, the inversion lemmas, and the formula translation of hypersequents
//! with proofs in both directions.

mod invert;
mod merge;
mod translation;

use crate::calculus::{CheckError, RuleId, StepError};
use crate::syntax::{canonical_order, Formula, FormulaSet, Hypersequent, Sequent};

pub use invert::{invert, InvertItem};
pub use merge::{ec_from_merge, eliminate_merge};
pub use translation::{proof_from_translation, proof_of_translation};

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("component {0} is empty and has no translation")]
    EmptyComponent(usize),
    #[error("input derivation does not check: {0}")]
    Invalid(#[from] CheckError),
    #[error("{0} is not allowed here")]
    Rule(RuleId),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no derivation of {0} could be built")]
    Stuck(String),
    #[error(transparent)]
    Step(#[from] StepError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslationResult {
    pub formula: Formula,
    /// One line per component, innermost last.
    pub trace: Vec<String>,
}

/// Right-nested conjunction in canonical order; `None` for the empty set.
pub(crate) fn big_and(set: &FormulaSet) -> Option<Formula> {
    fold(set, Formula::and)
}

pub(crate) fn big_or(set: &FormulaSet) -> Option<Formula> {
    fold(set, Formula::or)
}

fn fold(set: &FormulaSet, op: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    let items = canonical_order(set);
    let mut it = items.into_iter().rev().cloned();
    let last = it.next()?;
    Some(it.fold(last, |acc, f| op(f, acc)))
}

pub(crate) fn canonical_order_vec(set: &FormulaSet) -> Vec<Formula> {
    canonical_order(set).into_iter().cloned().collect()
}

/// `⋀Γ → ⋁Δ` with the empty sides dropped.
pub(crate) fn sequent_formula(s: &Sequent) -> Option<Formula> {
    match (big_and(&s.left), big_or(&s.right)) {
        (None, None) => None,
        (None, Some(d)) => Some(d),
        (Some(g), None) => Some(g.neg()),
        (Some(g), Some(d)) => Some(Formula::implies(g, d)),
    }
}

pub fn translate(h: &Hypersequent) -> Result<TranslationResult, TransformError> {
    let comps = h.components();
    let mut trace = Vec::new();
    let mut acc: Option<Formula> = None;
    for (i, s) in comps.iter().enumerate().rev() {
        let a = sequent_formula(s).ok_or(TransformError::EmptyComponent(i))?;
        trace.push(format!("I({s}) = {a}"));
        acc = Some(match acc {
            None => a,
            Some(rest) => Formula::or(a, rest.boxed()),
        });
    }
    trace.reverse();
    Ok(TranslationResult {
        formula: acc.expect("hypersequents are non-empty"),
        trace,
    })
}

#[cfg(test)]
mod tests;
