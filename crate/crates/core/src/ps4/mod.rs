//! Three-valued pseudo-S4 semantics: two relations R and S, strong Kleene
//! evaluation, and the property checks used to refute cut-free provability.

mod generate;
mod io;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::kripke::{first_branch, mask_all, KripkeFrame, MAX_WORLDS};
use crate::syntax::{Atom, Formula, Hypersequent};

pub use generate::{random_ps4_model, saturate};
pub use io::Ps4FileError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth3 {
    True,
    Unknown,
    False,
}

impl fmt::Display for Truth3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth3::True => "1",
            Truth3::Unknown => "*",
            Truth3::False => "0",
        })
    }
}

/// Value of a formula at every world: bit `w` of `t` (resp. `f`) is set when
/// the formula is 1 (resp. 0) at `w`. Neither bit means `*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Vector {
    pub t: u64,
    pub f: u64,
}

impl Vector {
    pub fn at(self, w: usize) -> Truth3 {
        if self.t >> w & 1 == 1 {
            Truth3::True
        } else if self.f >> w & 1 == 1 {
            Truth3::False
        } else {
            Truth3::Unknown
        }
    }

    fn neg(self) -> Vector {
        Vector { t: self.f, f: self.t }
    }

    fn and(self, o: Vector) -> Vector {
        Vector {
            t: self.t & o.t,
            f: self.f | o.f,
        }
    }

    fn or(self, o: Vector) -> Vector {
        Vector {
            t: self.t | o.t,
            f: self.f & o.f,
        }
    }

    fn boxed(self, r: &KripkeFrame) -> Vector {
        Vector {
            t: r.box_pre(self.t),
            f: r.pre(self.f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Ps4Error {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("frame has {0} worlds; at most {MAX_WORLDS} are supported")]
    TooManyWorlds(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct Ps4Frame {
    r: KripkeFrame,
    s: Vec<u64>,
}

impl Ps4Frame {
    pub fn new(
        names: Vec<String>,
        rel_r: &[(usize, usize)],
        rel_s: &[(usize, usize)],
    ) -> Result<Self, Ps4Error> {
        let n = names.len();
        let r = KripkeFrame::new(names, rel_r).map_err(|e| match e {
            crate::kripke::KripkeError::TooManyWorlds(k) => Ps4Error::TooManyWorlds(k),
            other => Ps4Error::UnknownWorld(other.to_string()),
        })?;
        let mut s = vec![0u64; n];
        for &(a, b) in rel_s {
            if a >= n || b >= n {
                return Err(Ps4Error::UnknownWorld(a.max(b).to_string()));
            }
            s[a] |= 1 << b;
        }
        Ok(Ps4Frame { r, s })
    }

    pub(crate) fn from_rows(r: Vec<u64>, s: Vec<u64>) -> Self {
        Ps4Frame {
            r: KripkeFrame::from_rows(r),
            s,
        }
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn names(&self) -> &[String] {
        self.r.names()
    }

    pub fn name(&self, w: usize) -> &str {
        self.r.name(w)
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.r.index_of(name)
    }

    pub fn r(&self, a: usize, b: usize) -> bool {
        self.r.rel(a, b)
    }

    pub fn s(&self, a: usize, b: usize) -> bool {
        self.s[a] >> b & 1 == 1
    }

    pub fn r_frame(&self) -> &KripkeFrame {
        &self.r
    }

    pub fn r_rows(&self) -> &[u64] {
        self.r.rows()
    }

    pub fn s_rows(&self) -> &[u64] {
        &self.s
    }

    fn s_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.s(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

impl fmt::Debug for Ps4Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |pairs: Vec<(usize, usize)>| {
            pairs
                .into_iter()
                .filter(|(a, b)| a != b)
                .map(|(a, b)| format!("{}{}", self.name(a), self.name(b)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        write!(
            f,
            "R[{}] S[{}]",
            show(self.r.pairs()),
            show(self.s_pairs())
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ps4Condition {
    SReflexivity,
    RReflexivity,
    PseudoTransitivity,
    Forth,
    Back,
}

impl fmt::Display for Ps4Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ps4Condition::SReflexivity => "S reflexivity",
            Ps4Condition::RReflexivity => "R reflexivity",
            Ps4Condition::PseudoTransitivity => "pseudo-transitivity",
            Ps4Condition::Forth => "forth",
            Ps4Condition::Back => "back",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ps4Violation {
    pub condition: Ps4Condition,
    pub worlds: Vec<usize>,
}

fn bits(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        (x != 0).then(|| {
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            b
        })
    })
}

/// Witness sets for the existential conditions.
impl Ps4Frame {
    /// `{w | x R w and z S w}`
    fn pseudo_trans_witnesses(&self, x: usize, z: usize) -> u64 {
        self.r.successors(x) & self.s[z]
    }

    /// `{w | z R w and y S w}`
    fn forth_witnesses(&self, y: usize, z: usize) -> u64 {
        self.r.successors(z) & self.s[y]
    }

    /// `{y | x R y and y S w}`
    fn back_witnesses(&self, x: usize, w: usize) -> u64 {
        bits(self.r.successors(x))
            .filter(|&y| self.s(y, w))
            .fold(0, |acc, y| acc | 1 << y)
    }

    pub(crate) fn first_violation(&self) -> Option<Ps4Violation> {
        let n = self.len();
        let v = |condition, worlds| Some(Ps4Violation { condition, worlds });
        for x in 0..n {
            if !self.s(x, x) {
                return v(Ps4Condition::SReflexivity, vec![x]);
            }
        }
        for x in 0..n {
            if !self.r(x, x) {
                return v(Ps4Condition::RReflexivity, vec![x]);
            }
        }
        for x in 0..n {
            for y in bits(self.r.successors(x)) {
                for z in bits(self.r.successors(y)) {
                    if self.pseudo_trans_witnesses(x, z) == 0 {
                        return v(Ps4Condition::PseudoTransitivity, vec![x, y, z]);
                    }
                }
            }
        }
        for x in 0..n {
            for y in bits(self.r.successors(x)) {
                for z in bits(self.s[x]) {
                    if self.forth_witnesses(y, z) == 0 {
                        return v(Ps4Condition::Forth, vec![x, y, z]);
                    }
                }
            }
        }
        for x in 0..n {
            for z in bits(self.s[x]) {
                for w in bits(self.r.successors(z)) {
                    if self.back_witnesses(x, w) == 0 {
                        return v(Ps4Condition::Back, vec![x, z, w]);
                    }
                }
            }
        }
        None
    }
}

/// Verifies the five frame conditions, reporting the first failure.
pub fn check_ps4_frame(fr: &Ps4Frame) -> Result<(), Ps4Violation> {
    match fr.first_violation() {
        Some(v) => Err(v),
        None => Ok(()),
    }
}

/// A PS4 frame with a partial valuation. Atoms absent from `val`, or absent at
/// a world, take the value `*`.
#[derive(Clone, PartialEq, Eq)]
pub struct Ps4Model {
    pub frame: Ps4Frame,
    pub val: BTreeMap<Atom, Vector>,
}

impl fmt::Debug for Ps4Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} val{{", self.frame)?;
        for w in 0..self.frame.len() {
            write!(f, " {}:", self.frame.name(w))?;
            for (a, v) in &self.val {
                write!(f, "{a}={}", v.at(w))?;
            }
        }
        write!(f, " }}")
    }
}

impl Ps4Model {
    pub fn new(frame: Ps4Frame, val: BTreeMap<Atom, Vector>) -> Self {
        Ps4Model { frame, val }
    }

    pub fn vector(&self, f: &Formula) -> Vector {
        match f {
            Formula::Atom(a) => self
                .val
                .get(a)
                .copied()
                .unwrap_or(Vector { t: 0, f: 0 }),
            Formula::Neg(a) => self.vector(a).neg(),
            Formula::Box(a) => self.vector(a).boxed(&self.frame.r),
            Formula::And(a, b) => self.vector(a).and(self.vector(b)),
            Formula::Or(a, b) => self.vector(a).or(self.vector(b)),
        }
    }

    pub fn eval3(&self, w: &str, f: &Formula) -> Result<Truth3, Ps4Error> {
        let i = self
            .frame
            .index_of(w)
            .ok_or_else(|| Ps4Error::UnknownWorld(w.to_string()))?;
        Ok(self.vector(f).at(i))
    }

    pub fn eval3_at(&self, w: usize, f: &Formula) -> Truth3 {
        self.vector(f).at(w)
    }

    pub fn atom_value(&self, w: usize, a: &Atom) -> Truth3 {
        self.val.get(a).map_or(Truth3::Unknown, |v| v.at(w))
    }

    /// Whether every two-valued atom at `x` keeps its value at `y`.
    pub fn info_below(&self, x: usize, y: usize) -> bool {
        self.val.values().all(|v| match v.at(x) {
            Truth3::Unknown => true,
            t => v.at(y) == t,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PreservationFailure {
    pub x: usize,
    pub y: usize,
    pub formula: Formula,
}

/// Checks that S-related worlds agree on every defined value of every formula
/// over the model's atoms with connective depth at most `depth`.
///
/// Formulas are explored by their value vectors: two formulas with the same
/// vector behave identically under every connective, so one representative
/// per vector suffices and the check is exact.
pub fn check_s_preservation(m: &Ps4Model, depth: usize) -> Result<(), PreservationFailure> {
    let n = m.frame.len();
    let pairs = m.frame.s_pairs();
    let check = |v: Vector, f: &Formula| -> Result<(), PreservationFailure> {
        for &(x, y) in &pairs {
            let vx = v.at(x);
            if vx != Truth3::Unknown && v.at(y) != vx {
                return Err(PreservationFailure {
                    x,
                    y,
                    formula: f.clone(),
                });
            }
        }
        Ok(())
    };
    let mask = mask_all(n);
    let mut seen: HashMap<Vector, usize> = HashMap::new();
    let mut reps: Vec<(Vector, Formula)> = Vec::new();
    for a in m.val.keys() {
        let mut v = m.val[a];
        v.t &= mask;
        v.f &= mask;
        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(v) {
            check(v, &Formula::Atom(a.clone()))?;
            e.insert(reps.len());
            reps.push((v, Formula::Atom(a.clone())));
        }
    }
    for _ in 0..depth {
        let level = reps.len();
        let mut fresh: Vec<(Vector, Formula)> = Vec::new();
        let mut push = |v: Vector, f: Formula, fresh: &mut Vec<(Vector, Formula)>| {
            if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(v) {
                e.insert(level + fresh.len());
                fresh.push((v, f));
            }
        };
        for i in 0..level {
            let (v, f) = reps[i].clone();
            push(v.neg(), f.clone().neg(), &mut fresh);
            push(v.boxed(&m.frame.r), f.clone().boxed(), &mut fresh);
            for (w, g) in reps.iter().take(level) {
                push(v.and(*w), Formula::and(f.clone(), g.clone()), &mut fresh);
                push(v.or(*w), Formula::or(f.clone(), g.clone()), &mut fresh);
            }
        }
        if fresh.is_empty() {
            break;
        }
        for (v, f) in &fresh {
            check(*v, f)?;
        }
        reps.extend(fresh);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CopyBranchError {
    #[error("index {index} out of range for a branch of length {len} (need 2 <= i < length)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("not an R-branch at position {0}")]
    NotABranch(usize),
    #[error("frame violates {0}")]
    FrameViolation(Ps4Condition),
}

/// Removes the `i`-th world (1-based) of an R-branch and rebuilds the tail
/// through S-copies: the result is `w1..w(i-1), w'(i+1)..w'n` with
/// `w(i-1) R w'(i+1)` and `wj S w'j` for every `j > i`.
pub fn copy_branch(m: &Ps4Model, branch: &[usize], i: usize) -> Result<Vec<usize>, CopyBranchError> {
    let fr = &m.frame;
    let n = branch.len();
    if i < 2 || i >= n {
        return Err(CopyBranchError::IndexOutOfRange { index: i, len: n });
    }
    for (k, w) in branch.windows(2).enumerate() {
        if !fr.r(w[0], w[1]) {
            return Err(CopyBranchError::NotABranch(k + 1));
        }
    }
    let drop = i - 1;
    let mut out = branch[..drop].to_vec();
    let prev = branch[drop - 1];
    let next = branch[drop + 1];
    let first = fr.pseudo_trans_witnesses(prev, next);
    if first == 0 {
        return Err(CopyBranchError::FrameViolation(Ps4Condition::PseudoTransitivity));
    }
    let mut cur = first.trailing_zeros() as usize;
    out.push(cur);
    for &next in &branch[drop + 2..n] {
        // the previous original world R next, and S cur
        let ws = fr.forth_witnesses(next, cur);
        if ws == 0 {
            return Err(CopyBranchError::FrameViolation(Ps4Condition::Forth));
        }
        cur = ws.trailing_zeros() as usize;
        out.push(cur);
    }
    Ok(out)
}

/// A branch over R refuting every component: left formulas exactly 1, right
/// formulas exactly 0.
pub fn ps4_countermodel(m: &Ps4Model, h: &Hypersequent) -> Option<Vec<usize>> {
    let all = mask_all(m.frame.len());
    let masks: Vec<u64> = h
        .components()
        .iter()
        .map(|s| {
            let mut mask = all;
            for f in &s.left {
                mask &= m.vector(f).t;
            }
            for f in &s.right {
                mask &= m.vector(f).f;
            }
            mask
        })
        .collect();
    first_branch(&m.frame.r, &masks)
}

/// The six-point countermodel on worlds i, j, k, m, n, l.
pub fn builtin_fig5_model() -> Ps4Model {
    let names: Vec<String> = ["i", "j", "k", "m", "n", "l"].iter().map(|s| s.to_string()).collect();
    let ix = |c: &str| names.iter().position(|x| x == c).unwrap();
    let pairs = |list: &[(&str, &str)]| -> Vec<(usize, usize)> {
        let mut v: Vec<(usize, usize)> = (0..names.len()).map(|w| (w, w)).collect();
        v.extend(list.iter().map(|(a, b)| (ix(a), ix(b))));
        v
    };
    let r = pairs(&[("i", "j"), ("j", "k"), ("k", "m"), ("i", "n"), ("n", "l"), ("i", "l")]);
    let s = pairs(&[("m", "k"), ("m", "n"), ("m", "l"), ("k", "n")]);
    let frame = Ps4Frame::new(names.clone(), &r, &s).expect("valid frame");
    let set = |ws: &[&str]| ws.iter().fold(0u64, |acc, w| acc | 1 << ix(w));
    let mut val = BTreeMap::new();
    val.insert(
        Atom::new("p"),
        Vector {
            t: set(&["j", "k", "n"]),
            f: set(&["i", "l"]),
        },
    );
    val.insert(
        Atom::new("q"),
        Vector {
            t: set(&["k", "m", "n", "l"]),
            f: set(&["i", "j"]),
        },
    );
    Ps4Model::new(frame, val)
}

#[cfg(test)]
mod tests;
