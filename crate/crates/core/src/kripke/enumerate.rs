//! Exhaustive enumeration of small frames up to isomorphism, and bounded
//! countermodel search over them.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;

use super::{first_branch, mask_all, Condition, FrameClass, KripkeFrame, KripkeModel};
use crate::syntax::{Atom, Formula, Hypersequent};

/// Largest frame size accepted by the enumerator.
pub const MAX_ENUM_WORLDS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct Hereditary {
    refl: bool,
    sym: bool,
    trans: bool,
}

impl Hereditary {
    fn of(class: FrameClass) -> Self {
        let c = class.conditions();
        Hereditary {
            refl: c.contains(&Condition::Reflexive),
            sym: c.contains(&Condition::Symmetric),
            trans: c.contains(&Condition::Transitive),
        }
    }
}

fn encode(rows: &[u64], pos: &[usize]) -> u64 {
    let n = rows.len();
    let mut enc = 0u64;
    for (a, &row) in rows.iter().enumerate() {
        let mut bits = row;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            enc |= 1 << (pos[a] * n + pos[b]);
        }
    }
    enc
}

fn decode(enc: u64, n: usize) -> Vec<u64> {
    (0..n)
        .map(|a| (enc >> (a * n)) & mask_all(n))
        .collect()
}

/// Least encoding over all relabelings that list worlds in increasing
/// (loop, out-degree, in-degree) order. Isomorphic frames get equal values.
fn canonical(rows: &[u64]) -> u64 {
    let n = rows.len();
    let mut indeg = vec![0u32; n];
    for row in rows {
        for (b, d) in indeg.iter_mut().enumerate() {
            *d += (row >> b & 1) as u32;
        }
    }
    let sig = |v: usize| (rows[v] >> v & 1, rows[v].count_ones(), indeg[v]);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| sig(v));
    // groups of equal signature occupy contiguous slots
    let mut groups: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || sig(order[i]) != sig(order[start]) {
            groups.push((start, i));
            start = i;
        }
    }
    let mut pos = vec![0usize; n];
    let mut best = u64::MAX;
    permute_groups(rows, &mut order, &groups, 0, &mut pos, &mut best);
    best
}

fn permute_groups(
    rows: &[u64],
    order: &mut [usize],
    groups: &[(usize, usize)],
    g: usize,
    pos: &mut [usize],
    best: &mut u64,
) {
    if g == groups.len() {
        for (slot, &v) in order.iter().enumerate() {
            pos[v] = slot;
        }
        *best = (*best).min(encode(rows, pos));
        return;
    }
    let (lo, hi) = groups[g];
    heap_permute(rows, order, groups, g, lo, hi - lo, pos, best);
}

#[allow(clippy::too_many_arguments)]
fn heap_permute(
    rows: &[u64],
    order: &mut [usize],
    groups: &[(usize, usize)],
    g: usize,
    lo: usize,
    k: usize,
    pos: &mut [usize],
    best: &mut u64,
) {
    if k <= 1 {
        permute_groups(rows, order, groups, g + 1, pos, best);
        return;
    }
    for i in 0..k {
        heap_permute(rows, order, groups, g, lo, k - 1, pos, best);
        if i + 1 < k {
            if k.is_multiple_of(2) {
                order.swap(lo + i, lo + k - 1);
            } else {
                order.swap(lo, lo + k - 1);
            }
        }
    }
}

fn transitive(rows: &[u64]) -> bool {
    rows.iter().all(|&row| {
        let mut bits = row;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if rows[b] & !row != 0 {
                return false;
            }
        }
        true
    })
}

type Cache = Mutex<HashMap<(Hereditary, usize), Arc<Vec<u64>>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Canonical encodings of all frames on exactly `n` worlds satisfying the
/// hereditary conditions, sorted ascending.
fn canonical_level(h: Hereditary, n: usize) -> Arc<Vec<u64>> {
    if let Some(v) = cache().lock().unwrap().get(&(h, n)) {
        return v.clone();
    }
    let level: Vec<u64> = if n == 0 {
        vec![0]
    } else {
        let prev = canonical_level(h, n - 1);
        let old = n - 1;
        let found: HashSet<u64> = prev
            .par_iter()
            .flat_map_iter(|&enc| {
                let base = decode(enc, old);
                let mut out = Vec::new();
                let row_choices = 1u64 << old;
                let col_choices = if h.sym { 1 } else { 1u64 << old };
                for out_row in 0..row_choices {
                    for col in 0..col_choices {
                        let col = if h.sym { out_row } else { col };
                        for lp in 0..2u64 {
                            if h.refl && lp == 0 {
                                continue;
                            }
                            let mut rows: Vec<u64> = base
                                .iter()
                                .enumerate()
                                .map(|(a, &r)| r | ((col >> a & 1) << old))
                                .collect();
                            rows.push(out_row | (lp << old));
                            if h.trans && !transitive(&rows) {
                                continue;
                            }
                            out.push(canonical(&rows));
                        }
                    }
                }
                out
            })
            .collect();
        let mut v: Vec<u64> = found.into_iter().collect();
        v.sort_unstable();
        v
    };
    let arc = Arc::new(level);
    cache().lock().unwrap().insert((h, n), arc.clone());
    arc
}

/// One representative of every isomorphism class of frames in `class` with
/// exactly `n` worlds, in a fixed deterministic order.
pub fn enumerate_frames(class: FrameClass, n: usize) -> Vec<KripkeFrame> {
    assert!(n <= MAX_ENUM_WORLDS, "frame enumeration is limited to {MAX_ENUM_WORLDS} worlds");
    let serial = class.conditions().contains(&Condition::Serial);
    canonical_level(Hereditary::of(class), n)
        .iter()
        .map(|&enc| decode(enc, n))
        .filter(|rows| !serial || rows.iter().all(|&r| r != 0))
        .map(KripkeFrame::from_rows)
        .collect()
}

/// Every valuation of `atoms` over `n` worlds, in counting order.
pub fn valuations(atoms: &[Atom], n: usize) -> impl Iterator<Item = BTreeMap<Atom, u64>> + '_ {
    let bits = atoms.len() * n;
    assert!(bits < 64, "too many atom/world combinations");
    let mask = mask_all(n);
    (0..1u64 << bits).map(move |c| {
        atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), (c >> (i * n)) & mask))
            .collect()
    })
}

#[derive(Clone, Copy)]
enum Node {
    Atom(usize),
    Neg(usize),
    Box(usize),
    And(usize, usize),
    Or(usize, usize),
}

/// Formulas flattened into a shared node table so that a valuation can be
/// evaluated on every subformula in one pass.
pub(crate) struct Compiled {
    nodes: Vec<Node>,
    pub atoms: Vec<Atom>,
    index: HashMap<Formula, usize>,
}

impl Compiled {
    pub fn new<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Self {
        let mut c = Compiled {
            nodes: Vec::new(),
            atoms: Vec::new(),
            index: HashMap::new(),
        };
        for f in formulas {
            c.add(f);
        }
        c
    }

    fn add(&mut self, f: &Formula) -> usize {
        if let Some(&i) = self.index.get(f) {
            return i;
        }
        let node = match f {
            Formula::Atom(a) => {
                let k = match self.atoms.iter().position(|b| b == a) {
                    Some(k) => k,
                    None => {
                        self.atoms.push(a.clone());
                        self.atoms.len() - 1
                    }
                };
                Node::Atom(k)
            }
            Formula::Neg(a) => Node::Neg(self.add(a)),
            Formula::Box(a) => Node::Box(self.add(a)),
            Formula::And(a, b) => {
                let (x, y) = (self.add(a), self.add(b));
                Node::And(x, y)
            }
            Formula::Or(a, b) => {
                let (x, y) = (self.add(a), self.add(b));
                Node::Or(x, y)
            }
        };
        self.nodes.push(node);
        self.index.insert(f.clone(), self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn id(&self, f: &Formula) -> usize {
        self.index[f]
    }

    /// Truth sets of every node; `atom_sets[k]` is the truth set of `atoms[k]`.
    pub fn eval(&self, frame: &KripkeFrame, atom_sets: &[u64], out: &mut Vec<u64>) {
        let all = mask_all(frame.len());
        out.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Atom(k) => atom_sets[k],
                Node::Neg(a) => !out[a] & all,
                Node::Box(a) => frame.box_pre(out[a]),
                Node::And(a, b) => out[a] & out[b],
                Node::Or(a, b) => out[a] | out[b],
            };
            out.push(v);
        }
    }
}

/// Hypersequent compiled for repeated branch-countermodel checks.
pub(crate) struct CompiledHyper {
    pub compiled: Compiled,
    comps: Vec<(Vec<usize>, Vec<usize>)>,
}

impl CompiledHyper {
    pub fn new(h: &Hypersequent) -> Self {
        let compiled = Compiled::new(h.formulas());
        let comps = h
            .components()
            .iter()
            .map(|s| {
                (
                    s.left.iter().map(|f| compiled.id(f)).collect(),
                    s.right.iter().map(|f| compiled.id(f)).collect(),
                )
            })
            .collect();
        CompiledHyper { compiled, comps }
    }

    pub fn countermodel(
        &self,
        frame: &KripkeFrame,
        atom_sets: &[u64],
        scratch: &mut Vec<u64>,
    ) -> Option<Vec<usize>> {
        self.compiled.eval(frame, atom_sets, scratch);
        let all = mask_all(frame.len());
        let masks: Vec<u64> = self
            .comps
            .iter()
            .map(|(l, r)| {
                let mut m = all;
                for &i in l {
                    m &= scratch[i];
                }
                for &i in r {
                    m &= !scratch[i];
                }
                m
            })
            .collect();
        first_branch(frame, &masks)
    }
}

#[derive(Debug, Clone)]
pub enum BoundedVerdict {
    NoCountermodelUpToBound { frames: usize, models: u64 },
    Countermodel { model: KripkeModel, branch: Vec<usize> },
}

impl BoundedVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, BoundedVerdict::NoCountermodelUpToBound { .. })
    }
}

/// Searches all frames of `class` with at most `max_worlds` worlds (one per
/// isomorphism class) and all valuations over the atoms of `h` for a branch
/// countermodel. The first countermodel in enumeration order is returned.
pub fn bounded_validity(h: &Hypersequent, class: FrameClass, max_worlds: usize) -> BoundedVerdict {
    let ch = CompiledHyper::new(h);
    let k = ch.compiled.atoms.len();
    let mut frames_total = 0;
    let mut models = 0u64;
    for n in 1..=max_worlds {
        let frames = enumerate_frames(class, n);
        frames_total += frames.len();
        let per_frame = 1u64 << (k * n);
        models += per_frame * frames.len() as u64;
        let mask = mask_all(n);
        let hit = frames.par_iter().find_map_first(|fr| {
            let mut scratch = Vec::new();
            let mut sets = vec![0u64; k];
            for c in 0..per_frame {
                for (i, s) in sets.iter_mut().enumerate() {
                    *s = (c >> (i * n)) & mask;
                }
                if let Some(b) = ch.countermodel(fr, &sets, &mut scratch) {
                    return Some((fr.clone(), sets, b));
                }
            }
            None
        });
        if let Some((frame, sets, branch)) = hit {
            let val = ch.compiled.atoms.iter().cloned().zip(sets).collect();
            return BoundedVerdict::Countermodel {
                model: KripkeModel::new(frame, val),
                branch,
            };
        }
    }
    BoundedVerdict::NoCountermodelUpToBound {
        frames: frames_total,
        models,
    }
}

/// Compares `h` with a formula over every model of `class` up to
/// `max_worlds` worlds: `h` has a branch countermodel exactly when `phi` is
/// false somewhere. Returns the number of models compared, or the first model
/// where the two disagree.
pub fn equivalent_up_to(
    h: &Hypersequent,
    phi: &Formula,
    class: FrameClass,
    max_worlds: usize,
) -> Result<u64, KripkeModel> {
    let ch = CompiledHyper::new(h);
    let mut compiled = Compiled::new(h.formulas());
    let target = compiled.add(phi);
    let atoms = compiled.atoms.clone();
    let k = atoms.len();
    let pos_h: Vec<usize> = ch
        .compiled
        .atoms
        .iter()
        .map(|a| atoms.iter().position(|b| b == a).unwrap())
        .collect();
    let mut models = 0u64;
    for n in 1..=max_worlds {
        let frames = enumerate_frames(class, n);
        let per_frame = 1u64 << (k * n);
        models += per_frame * frames.len() as u64;
        let mask = mask_all(n);
        let bad = frames.par_iter().find_map_first(|fr| {
            let mut scratch = Vec::new();
            let mut sets = vec![0u64; k];
            let mut hs = vec![0u64; pos_h.len()];
            for c in 0..per_frame {
                for (i, s) in sets.iter_mut().enumerate() {
                    *s = (c >> (i * n)) & mask;
                }
                for (s, &i) in hs.iter_mut().zip(&pos_h) {
                    *s = sets[i];
                }
                let refuted = ch.countermodel(fr, &hs, &mut scratch).is_some();
                compiled.eval(fr, &sets, &mut scratch);
                if refuted != (scratch[target] != mask) {
                    return Some((fr.clone(), sets.clone()));
                }
            }
            None
        });
        if let Some((frame, sets)) = bad {
            return Err(KripkeModel::new(frame, atoms.iter().cloned().zip(sets).collect()));
        }
    }
    Ok(models)
}
