//! Least-fixpoint backwards search over a graph of hypersequent states.
//!
//! Each state offers alternatives; an alternative is a move together with the
//! premises it needs. A state is proven once all premises of one alternative
//! are proven. Because the state graph is explored as a graph, cycles (for
//! instance two Sym steps in a row) are harmless: a cycle never proves itself.

use std::collections::{HashMap, VecDeque};

use crate::syntax::Hypersequent;

pub(crate) struct Expansion<M> {
    /// Proven outright, e.g. by an axiom.
    pub closed: Option<M>,
    pub alts: Vec<(M, Vec<Hypersequent>)>,
    /// Some alternative was withheld because of a limit.
    pub truncated: bool,
}

impl<M> Expansion<M> {
    pub fn closed(m: M) -> Self {
        Expansion {
            closed: Some(m),
            alts: vec![],
            truncated: false,
        }
    }

    pub fn alts(alts: Vec<(M, Vec<Hypersequent>)>) -> Self {
        Expansion {
            closed: None,
            alts,
            truncated: false,
        }
    }
}

pub(crate) struct ProofTree<M> {
    pub h: Hypersequent,
    pub mv: M,
    pub children: Vec<ProofTree<M>>,
}

struct Alt<M> {
    mv: M,
    premises: Vec<usize>,
    remaining: usize,
}

enum Proven {
    No,
    Closed,
    By(usize),
}

struct Node<M> {
    h: Hypersequent,
    depth: usize,
    closed: Option<M>,
    alts: Vec<Alt<M>>,
    proven: Proven,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EngineStats {
    pub states: usize,
    pub expanded: usize,
    pub hit_components: bool,
    pub hit_depth: bool,
    pub hit_states: bool,
}

impl EngineStats {
    pub fn limited(&self) -> bool {
        self.hit_components || self.hit_depth || self.hit_states
    }
}

pub(crate) struct Engine<M> {
    nodes: Vec<Node<M>>,
    index: HashMap<Hypersequent, usize>,
    rev: Vec<Vec<(usize, usize)>>,
    queue: VecDeque<usize>,
    pub stats: EngineStats,
}

impl<M: Clone> Engine<M> {
    pub fn new() -> Self {
        Engine {
            nodes: Vec::new(),
            index: HashMap::new(),
            rev: Vec::new(),
            queue: VecDeque::new(),
            stats: EngineStats::default(),
        }
    }

    fn intern(&mut self, h: &Hypersequent, depth: usize) -> usize {
        if let Some(&i) = self.index.get(h) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(Node {
            h: h.clone(),
            depth,
            closed: None,
            alts: Vec::new(),
            proven: Proven::No,
        });
        self.rev.push(Vec::new());
        self.index.insert(h.clone(), i);
        self.queue.push_back(i);
        i
    }

    fn is_proven(&self, i: usize) -> bool {
        !matches!(self.nodes[i].proven, Proven::No)
    }

    fn mark(&mut self, i: usize, how: Proven) {
        let mut work = vec![(i, how)];
        while let Some((j, how)) = work.pop() {
            if self.is_proven(j) {
                continue;
            }
            self.nodes[j].proven = how;
            for k in 0..self.rev[j].len() {
                let (p, a) = self.rev[j][k];
                if self.is_proven(p) {
                    continue;
                }
                let alt = &mut self.nodes[p].alts[a];
                alt.remaining -= 1;
                if alt.remaining == 0 {
                    work.push((p, Proven::By(a)));
                }
            }
        }
    }

    /// Explores breadth-first from `goal` until it is proven, the reachable
    /// graph is exhausted, or a limit stops exploration.
    pub fn run(
        &mut self,
        goal: &Hypersequent,
        max_components: usize,
        max_depth: usize,
        max_states: usize,
        mut expand: impl FnMut(&Hypersequent) -> Expansion<M>,
    ) -> Option<ProofTree<M>> {
        let root = self.intern(goal, 0);
        while let Some(i) = self.queue.pop_front() {
            if self.is_proven(root) {
                break;
            }
            if self.is_proven(i) {
                continue;
            }
            let depth = self.nodes[i].depth;
            if depth >= max_depth {
                self.stats.hit_depth = true;
                continue;
            }
            if self.stats.expanded >= max_states {
                self.stats.hit_states = true;
                break;
            }
            self.stats.expanded += 1;
            let h = self.nodes[i].h.clone();
            let exp = expand(&h);
            if exp.truncated {
                self.stats.hit_components = true;
            }
            if let Some(m) = exp.closed {
                self.nodes[i].closed = Some(m);
                self.mark(i, Proven::Closed);
                continue;
            }
            for (mv, prems) in exp.alts {
                if prems.iter().any(|p| p.len() > max_components) {
                    self.stats.hit_components = true;
                    continue;
                }
                let mut ids: Vec<usize> = prems.iter().map(|p| self.intern(p, depth + 1)).collect();
                let premises = ids.clone();
                ids.sort_unstable();
                ids.dedup();
                let remaining = ids.iter().filter(|&&j| !self.is_proven(j)).count();
                let a = self.nodes[i].alts.len();
                self.nodes[i].alts.push(Alt {
                    mv,
                    premises,
                    remaining,
                });
                for &j in &ids {
                    if !self.is_proven(j) {
                        self.rev[j].push((i, a));
                    }
                }
                if remaining == 0 {
                    self.mark(i, Proven::By(a));
                    break;
                }
            }
        }
        self.stats.states = self.nodes.len();
        if self.is_proven(root) {
            Some(self.extract(root))
        } else {
            None
        }
    }

    pub fn id_of(&self, h: &Hypersequent) -> Option<usize> {
        self.index.get(h).copied()
    }

    pub fn proven(&self, i: usize) -> bool {
        self.is_proven(i)
    }

    pub fn state(&self, i: usize) -> &Hypersequent {
        &self.nodes[i].h
    }

    /// Registered alternatives of state `i` with their premise states.
    pub fn alternatives(&self, i: usize) -> impl Iterator<Item = (&M, &[usize])> {
        self.nodes[i].alts.iter().map(|a| (&a.mv, a.premises.as_slice()))
    }

    fn extract(&self, i: usize) -> ProofTree<M> {
        let node = &self.nodes[i];
        match node.proven {
            Proven::Closed => ProofTree {
                h: node.h.clone(),
                mv: node.closed.clone().expect("closed move"),
                children: vec![],
            },
            Proven::By(a) => {
                let alt = &node.alts[a];
                ProofTree {
                    h: node.h.clone(),
                    mv: alt.mv.clone(),
                    children: alt.premises.iter().map(|&j| self.extract(j)).collect(),
                }
            }
            Proven::No => unreachable!("extracting an unproven state"),
        }
    }
}
