//! Formulas, sequents, hypersequents, and their text and JSON forms.

mod formula;
mod json;
mod parse;

pub use formula::{
    canonical_order, Atom, EmptyHypersequent, Formula, FormulaSet, Hypersequent, Sequent, Side,
};
pub use parse::{parse_formula, parse_hypersequent, parse_sequent, ParseError};

/// Smallest set containing `f` and closed under immediate subformulas.
pub fn subformula_closure(f: &Formula) -> FormulaSet {
    f.subformula_closure()
}

/// Maximum nesting of boxes in `f`.
pub fn modal_depth(f: &Formula) -> usize {
    f.modal_depth()
}
