//! Two-valued Kripke semantics and branch countermodels for hypersequents.

mod enumerate;
mod io;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::syntax::{Atom, Formula, Hypersequent};

pub use enumerate::{bounded_validity, enumerate_frames, equivalent_up_to, valuations, BoundedVerdict};
pub use io::ModelFileError;

/// Largest number of worlds a frame may have; relations are stored as bit rows.
pub const MAX_WORLDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KripkeError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("atom `{atom}` has no value at world `{world}`")]
    UnvaluedAtom { atom: String, world: String },
    #[error("frame has {0} worlds; at most {MAX_WORLDS} are supported")]
    TooManyWorlds(usize),
}

pub(crate) fn mask_all(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Finite frame; world `i` is named `names[i]` and `succ[i]` has bit `j` set
/// iff `i R j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KripkeFrame {
    names: Vec<String>,
    succ: Vec<u64>,
}

impl KripkeFrame {
    pub fn new(names: Vec<String>, rel: &[(usize, usize)]) -> Result<Self, KripkeError> {
        if names.len() > MAX_WORLDS {
            return Err(KripkeError::TooManyWorlds(names.len()));
        }
        let mut succ = vec![0u64; names.len()];
        for &(a, b) in rel {
            if a >= names.len() {
                return Err(KripkeError::UnknownWorld(a.to_string()));
            }
            if b >= names.len() {
                return Err(KripkeError::UnknownWorld(b.to_string()));
            }
            succ[a] |= 1 << b;
        }
        Ok(KripkeFrame { names, succ })
    }

    /// Frame on worlds `w0..w{n-1}` from raw bit rows.
    pub fn from_rows(succ: Vec<u64>) -> Self {
        assert!(succ.len() <= MAX_WORLDS);
        let names = (0..succ.len()).map(|i| format!("w{i}")).collect();
        KripkeFrame { names, succ }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, w: usize) -> &str {
        &self.names[w]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn rel(&self, a: usize, b: usize) -> bool {
        self.succ[a] >> b & 1 == 1
    }

    pub fn successors(&self, a: usize) -> u64 {
        self.succ[a]
    }

    pub fn rows(&self) -> &[u64] {
        &self.succ
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.rel(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Worlds with at least one successor in `set`.
    pub(crate) fn pre(&self, set: u64) -> u64 {
        let mut out = 0;
        for (a, row) in self.succ.iter().enumerate() {
            if row & set != 0 {
                out |= 1 << a;
            }
        }
        out
    }

    /// Worlds all of whose successors lie in `set`.
    pub(crate) fn box_pre(&self, set: u64) -> u64 {
        let mut out = 0;
        for (a, row) in self.succ.iter().enumerate() {
            if row & !set == 0 {
                out |= 1 << a;
            }
        }
        out
    }

    pub fn transitive_closure(&self) -> KripkeFrame {
        let mut succ = self.succ.clone();
        let n = succ.len();
        for k in 0..n {
            for i in 0..n {
                if succ[i] >> k & 1 == 1 {
                    succ[i] |= succ[k];
                }
            }
        }
        KripkeFrame {
            names: self.names.clone(),
            succ,
        }
    }
}

impl fmt::Debug for KripkeFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self
            .pairs()
            .into_iter()
            .map(|(a, b)| format!("{}->{}", self.names[a], self.names[b]))
            .collect();
        write!(f, "Frame[{}]", pairs.join(" "))
    }
}

/// Frame conditions of the normal systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameClass {
    K,
    D,
    T,
    KB,
    K4,
    B,
    S4,
    S5,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    Serial,
    Reflexive,
    Symmetric,
    Transitive,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Serial => "seriality",
            Condition::Reflexive => "reflexivity",
            Condition::Symmetric => "symmetry",
            Condition::Transitive => "transitivity",
        })
    }
}

impl FrameClass {
    pub const ALL: [FrameClass; 8] = [
        FrameClass::K,
        FrameClass::D,
        FrameClass::T,
        FrameClass::KB,
        FrameClass::K4,
        FrameClass::B,
        FrameClass::S4,
        FrameClass::S5,
    ];

    pub fn conditions(self) -> &'static [Condition] {
        use Condition::*;
        match self {
            FrameClass::K => &[],
            FrameClass::D => &[Serial],
            FrameClass::T => &[Reflexive],
            FrameClass::KB => &[Symmetric],
            FrameClass::K4 => &[Transitive],
            FrameClass::B => &[Reflexive, Symmetric],
            FrameClass::S4 => &[Reflexive, Transitive],
            FrameClass::S5 => &[Reflexive, Symmetric, Transitive],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameClass::K => "K",
            FrameClass::D => "D",
            FrameClass::T => "T",
            FrameClass::KB => "KB",
            FrameClass::K4 => "K4",
            FrameClass::B => "B",
            FrameClass::S4 => "S4",
            FrameClass::S5 => "S5",
        }
    }
}

impl fmt::Display for FrameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FrameClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        FrameClass::ALL
            .into_iter()
            .find(|c| c.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown frame class `{s}`"))
    }
}

/// A frame condition failing on the listed worlds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub worlds: Vec<usize>,
}

pub fn check_condition(fr: &KripkeFrame, c: Condition) -> Result<(), Violation> {
    let n = fr.len();
    let fail = |worlds: Vec<usize>| Err(Violation { condition: c, worlds });
    match c {
        Condition::Serial => {
            for w in 0..n {
                if fr.successors(w) == 0 {
                    return fail(vec![w]);
                }
            }
        }
        Condition::Reflexive => {
            for w in 0..n {
                if !fr.rel(w, w) {
                    return fail(vec![w]);
                }
            }
        }
        Condition::Symmetric => {
            for (a, b) in fr.pairs() {
                if !fr.rel(b, a) {
                    return fail(vec![a, b]);
                }
            }
        }
        Condition::Transitive => {
            for (a, b) in fr.pairs() {
                for c in 0..n {
                    if fr.rel(b, c) && !fr.rel(a, c) {
                        return fail(vec![a, b, c]);
                    }
                }
            }
        }
    }
    Ok(())
}

/// Checks every condition of `class`, reporting the first violation.
pub fn check_frame_class(fr: &KripkeFrame, class: FrameClass) -> Result<(), Violation> {
    class
        .conditions()
        .iter()
        .try_for_each(|&c| check_condition(fr, c))
}

/// A frame with a two-valued valuation; `val[a]` has bit `w` set iff atom `a`
/// is true at world `w`.
#[derive(Clone, PartialEq, Eq)]
pub struct KripkeModel {
    pub frame: KripkeFrame,
    pub val: BTreeMap<Atom, u64>,
}

impl fmt::Debug for KripkeModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} val{{", self.frame)?;
        for (a, bits) in &self.val {
            let ws: Vec<&str> = (0..self.frame.len())
                .filter(|w| bits >> w & 1 == 1)
                .map(|w| self.frame.name(w))
                .collect();
            write!(f, " {a}:[{}]", ws.join(","))?;
        }
        write!(f, " }}")
    }
}

impl KripkeModel {
    pub fn new(frame: KripkeFrame, val: BTreeMap<Atom, u64>) -> Self {
        KripkeModel { frame, val }
    }

    /// Set of worlds where `f` holds.
    pub fn truth_set(&self, f: &Formula) -> Result<u64, KripkeError> {
        let all = mask_all(self.frame.len());
        Ok(match f {
            Formula::Atom(a) => match self.val.get(a) {
                Some(bits) => bits & all,
                None => {
                    return Err(KripkeError::UnvaluedAtom {
                        atom: a.name().to_string(),
                        world: self.frame.names.first().cloned().unwrap_or_default(),
                    })
                }
            },
            Formula::Neg(a) => !self.truth_set(a)? & all,
            Formula::Box(a) => self.frame.box_pre(self.truth_set(a)?),
            Formula::And(a, b) => self.truth_set(a)? & self.truth_set(b)?,
            Formula::Or(a, b) => self.truth_set(a)? | self.truth_set(b)?,
        })
    }

    pub fn eval(&self, w: &str, f: &Formula) -> Result<bool, KripkeError> {
        let i = self
            .frame
            .index_of(w)
            .ok_or_else(|| KripkeError::UnknownWorld(w.to_string()))?;
        self.eval_at(i, f)
    }

    pub fn eval_at(&self, w: usize, f: &Formula) -> Result<bool, KripkeError> {
        if w >= self.frame.len() {
            return Err(KripkeError::UnknownWorld(w.to_string()));
        }
        Ok(self.truth_set(f)? >> w & 1 == 1)
    }

    /// Worlds at which the sequent `Γ ⇒ Δ` is refuted: all of Γ true, all of Δ false.
    pub fn refuting_set(&self, s: &crate::syntax::Sequent) -> Result<u64, KripkeError> {
        let mut m = mask_all(self.frame.len());
        for f in &s.left {
            m &= self.truth_set(f)?;
        }
        for f in &s.right {
            m &= !self.truth_set(f)?;
        }
        Ok(m)
    }
}

/// Iterator over all R-connected world sequences of a fixed length, in
/// lexicographic order.
pub struct Branches<'a> {
    frame: &'a KripkeFrame,
    n: usize,
    stack: Vec<usize>,
    started: bool,
}

impl<'a> Branches<'a> {
    fn candidates(&self, depth: usize) -> u64 {
        if depth == 0 {
            mask_all(self.frame.len())
        } else {
            self.frame.successors(self.stack[depth - 1])
        }
    }

    fn next_from(bits: u64, after: Option<usize>) -> Option<usize> {
        let masked = match after {
            None => bits,
            Some(a) if a >= 63 => 0,
            Some(a) => bits & !((1u64 << (a + 1)) - 1),
        };
        (masked != 0).then(|| masked.trailing_zeros() as usize)
    }

    /// Extends `stack` to full length choosing the least candidates;
    /// on failure backtracks. Returns false when exhausted.
    fn fill(&mut self, mut after: Option<usize>) -> bool {
        loop {
            let depth = self.stack.len();
            if depth == self.n {
                return true;
            }
            match Self::next_from(self.candidates(depth), after) {
                Some(w) => {
                    self.stack.push(w);
                    after = None;
                }
                None => match self.stack.pop() {
                    Some(prev) => after = Some(prev),
                    None => return false,
                },
            }
        }
    }
}

impl Iterator for Branches<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let ok = if !self.started {
            self.started = true;
            self.n > 0 && self.fill(None)
        } else {
            match self.stack.pop() {
                Some(last) => self.fill(Some(last)),
                None => false,
            }
        };
        ok.then(|| self.stack.clone())
    }
}

/// All sequences `w1..wn` with `wi R w(i+1)`.
pub fn branches(frame: &KripkeFrame, n: usize) -> Branches<'_> {
    Branches {
        frame,
        n,
        stack: Vec::with_capacity(n),
        started: false,
    }
}

/// Given per-position admissible world sets, the lexicographically least
/// R-branch through them.
pub(crate) fn first_branch(frame: &KripkeFrame, masks: &[u64]) -> Option<Vec<usize>> {
    let n = masks.len();
    let mut feasible = vec![0u64; n];
    feasible[n - 1] = masks[n - 1];
    for i in (0..n - 1).rev() {
        feasible[i] = masks[i] & frame.pre(feasible[i + 1]);
    }
    if feasible[0] == 0 {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    let mut cur = feasible[0].trailing_zeros() as usize;
    out.push(cur);
    for f in feasible.iter().skip(1) {
        let next = frame.successors(cur) & f;
        cur = next.trailing_zeros() as usize;
        out.push(cur);
    }
    Some(out)
}

/// A branch along which every component of `h` is refuted, if one exists.
pub fn countermodels_hypersequent(
    m: &KripkeModel,
    h: &Hypersequent,
) -> Result<Option<Vec<usize>>, KripkeError> {
    let masks = h
        .components()
        .iter()
        .map(|s| m.refuting_set(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(first_branch(&m.frame, &masks))
}

#[cfg(test)]
mod tests;
