//! Relational hypersequent calculi for normal modal logics: syntax, Kripke and
//! three-valued semantics, proof search and checking, proof transformations,
//! and a decision procedure for the transitive systems with cut.

pub mod calculus;
pub mod corpus;
pub mod decide;
pub mod kripke;
pub mod named;
pub mod ps4;
pub mod replicate;
pub mod syntax;
pub mod transform;
