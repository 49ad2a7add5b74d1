//! Seeded random formulas and hypersequents for test corpora.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::syntax::{Atom, Formula, Hypersequent, Sequent};

pub fn atoms(names: &[&str]) -> Vec<Atom> {
    names.iter().map(|n| Atom::new(n)).collect()
}

/// A formula of depth at most `depth`.
pub fn random_formula<R: Rng>(rng: &mut R, depth: usize, atoms: &[Atom]) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return Formula::Atom(atoms.choose(rng).expect("atoms").clone());
    }
    match rng.gen_range(0..4) {
        0 => random_formula(rng, depth - 1, atoms).neg(),
        1 => random_formula(rng, depth - 1, atoms).boxed(),
        2 => Formula::and(random_formula(rng, depth - 1, atoms), random_formula(rng, depth - 1, atoms)),
        _ => Formula::or(random_formula(rng, depth - 1, atoms), random_formula(rng, depth - 1, atoms)),
    }
}

/// A hypersequent with 1..=`max_components` components, each holding one or
/// two formulas and never empty.
pub fn random_hypersequent<R: Rng>(
    rng: &mut R,
    max_components: usize,
    depth: usize,
    atoms: &[Atom],
) -> Hypersequent {
    let n = rng.gen_range(1..=max_components);
    let comps = (0..n)
        .map(|_| {
            let mut s = Sequent::empty();
            let k = rng.gen_range(1..=2);
            for _ in 0..k {
                let f = random_formula(rng, depth, atoms);
                if rng.gen_bool(0.5) {
                    s.left.insert(f);
                } else {
                    s.right.insert(f);
                }
            }
            s
        })
        .collect();
    Hypersequent::new(comps).expect("non-empty")
}
