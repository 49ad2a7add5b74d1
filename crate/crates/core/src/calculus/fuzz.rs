//! Random derivations built forwards from identity axioms.
//!
//! Every step goes through [`Derivation::apply`] or [`Derivation::infer`], so
//! a generated tree is only kept if each node passes the rule schema. Cut is
//! never generated.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CalculusSpec, Derivation, RuleApp, RuleId};
use crate::syntax::{Atom, Formula, Hypersequent, Side};

#[derive(Debug, Clone)]
pub struct FuzzConfig {
    pub count: usize,
    /// Generator steps per derivation, not tree height.
    pub max_depth: usize,
    pub atoms: Vec<Atom>,
    pub seed: u64,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        FuzzConfig {
            count: 100,
            max_depth: 12,
            atoms: vec![Atom::new("p"), Atom::new("q")],
            seed: 0,
        }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    spec: &'a CalculusSpec,
    atoms: &'a [Atom],
}

impl Gen<'_> {
    fn atom(&mut self) -> Atom {
        self.atoms.choose(&mut self.rng).expect("at least one atom").clone()
    }

    fn formula(&mut self, depth: usize) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.4) {
            return Formula::Atom(self.atom());
        }
        match self.rng.gen_range(0..4) {
            0 => self.formula(depth - 1).neg(),
            1 => self.formula(depth - 1).boxed(),
            2 => Formula::and(self.formula(depth - 1), self.formula(depth - 1)),
            _ => Formula::or(self.formula(depth - 1), self.formula(depth - 1)),
        }
    }

    fn derivation(&mut self, budget: usize) -> Derivation {
        if budget == 0 || self.rng.gen_bool(0.1) {
            return Derivation::id(&self.atom());
        }
        if budget >= 2 && self.rng.gen_bool(0.15) {
            let a = self.derivation(budget / 2);
            let b = self.derivation(budget / 2);
            if let Some(d) = self.binary(a.clone(), b) {
                return d;
            }
            return a;
        }
        let d = self.derivation(budget - 1);
        self.unary(d)
    }

    fn unary(&mut self, d: Derivation) -> Derivation {
        let moves = self.candidates(d.end());
        if moves.is_empty() {
            return d;
        }
        let (rule, comp, principal) = moves.choose(&mut self.rng).unwrap().clone();
        match d.clone().apply(rule, comp, principal) {
            Ok(next) => next,
            Err(_) => d,
        }
    }

    fn candidates(&mut self, h: &Hypersequent) -> Vec<(RuleId, usize, Option<Formula>)> {
        use RuleId::*;
        let n = h.len();
        let mut out = Vec::new();
        for (s, c) in h.components().iter().enumerate() {
            for a in &c.right {
                out.push((NegL, s, Some(a.clone().neg())));
                let other = self.formula(1);
                out.push((OrR1, s, Some(Formula::or(a.clone(), other.clone()))));
                out.push((OrR2, s, Some(Formula::or(other, a.clone()))));
            }
            for a in &c.left {
                out.push((NegR, s, Some(a.clone().neg())));
                let other = self.formula(1);
                out.push((AndL1, s, Some(Formula::and(a.clone(), other.clone()))));
                out.push((AndL2, s, Some(Formula::and(other, a.clone()))));
                out.push((T, s, Some(a.clone().boxed())));
                if s > 0 {
                    out.push((BoxL, s - 1, Some(a.clone().boxed())));
                }
            }
            let f = self.formula(2);
            out.push((TL, s, Some(f)));
            let f = self.formula(2);
            out.push((TR, s, Some(f)));
        }
        let last = h.last();
        if n >= 2 && last.left.is_empty() && last.right.len() == 1 {
            let phi = last.right.iter().next().unwrap().clone();
            out.push((BoxR, n - 2, Some(phi.boxed())));
        }
        out.push((EWL, 0, None));
        out.push((EWR, n, None));
        out.push((EW, self.rng.gen_range(0..=n), None));
        out.push((Sym, 0, None));
        out.push((Drop, n - 1, None));
        for i in 0..n.saturating_sub(1) {
            out.push((EE, i, None));
            out.push((Merge, i, None));
            if h.components()[i] == h.components()[i + 1] {
                out.push((EC, i, None));
            }
        }
        out.retain(|(r, _, _)| self.spec.enabled(*r));
        out
    }

    /// AndR / OrL from two independent derivations, padded to equal length
    /// and weakened to a shared context.
    fn binary(&mut self, mut a: Derivation, mut b: Derivation) -> Option<Derivation> {
        while a.end().len() < b.end().len() {
            a = a.ewr();
        }
        while b.end().len() < a.end().len() {
            b = b.ewr();
        }
        let rule = if self.rng.gen_bool(0.5) { RuleId::AndR } else { RuleId::OrL };
        let side = if rule == RuleId::AndR { Side::Right } else { Side::Left };
        let n = a.end().len();
        let s = self.rng.gen_range(0..n);
        let fa = a.end().components()[s].side(side).iter().next()?.clone();
        let fb = b.end().components()[s].side(side).iter().next()?.clone();
        let main = if rule == RuleId::AndR {
            Formula::and(fa.clone(), fb.clone())
        } else {
            Formula::or(fa.clone(), fb.clone())
        };
        let union: Vec<_> = a
            .end()
            .components()
            .iter()
            .zip(b.end().components())
            .map(|(x, y)| x.union(y))
            .collect();
        let mut ta = union.clone();
        let mut tb = union.clone();
        if !a.end().components()[s].side(side).contains(&fb) {
            ta[s].side_mut(side).remove(&fb);
        }
        if !b.end().components()[s].side(side).contains(&fa) {
            tb[s].side_mut(side).remove(&fa);
        }
        let mut concl = union;
        concl[s] = ta[s].without(side, &fa).union(&tb[s].without(side, &fb));
        concl[s].side_mut(side).insert(main.clone());
        let a = a.weaken_to(&Hypersequent::from_vec(ta)).ok()?;
        let b = b.weaken_to(&Hypersequent::from_vec(tb)).ok()?;
        Derivation::infer(
            Hypersequent::from_vec(concl),
            RuleApp::with_principal(rule, s, main),
            vec![a, b],
        )
        .ok()
    }
}

/// `cfg.count` random derivations in `spec`, reproducible from `cfg.seed`.
pub fn fuzz_derivations(spec: &CalculusSpec, cfg: &FuzzConfig) -> Vec<Derivation> {
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        spec,
        atoms: &cfg.atoms,
    };
    (0..cfg.count).map(|_| gen.derivation(cfg.max_depth)).collect()
}
