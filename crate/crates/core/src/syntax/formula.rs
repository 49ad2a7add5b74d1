use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// An atomic proposition, identified by its name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Self {
        Atom(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A modal sentence over atoms with negation, box, conjunction and disjunction.
///
/// Children are reference counted so that cloning a formula (which the search
/// code does constantly) is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom(Atom),
    Neg(Arc<Formula>),
    Box(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(Atom::new(name))
    }

    pub fn neg(self) -> Self {
        Formula::Neg(Arc::new(self))
    }

    pub fn boxed(self) -> Self {
        Formula::Box(Arc::new(self))
    }

    pub fn and(left: Formula, right: Formula) -> Self {
        Formula::And(Arc::new(left), Arc::new(right))
    }

    pub fn or(left: Formula, right: Formula) -> Self {
        Formula::Or(Arc::new(left), Arc::new(right))
    }

    /// Material implication as the abbreviation `~a | b`.
    pub fn implies(antecedent: Formula, consequent: Formula) -> Self {
        Formula::or(antecedent.neg(), consequent)
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Formula::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Atom(_))
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Neg(a) | Formula::Box(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Maximum nesting of boxes.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Neg(a) => a.modal_depth(),
            Formula::Box(a) => 1 + a.modal_depth(),
            Formula::And(a, b) | Formula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
        }
    }

    /// Maximum nesting of any connective.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Neg(a) | Formula::Box(a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Total number of box occurrences.
    pub fn box_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Neg(a) => a.box_count(),
            Formula::Box(a) => 1 + a.box_count(),
            Formula::And(a, b) | Formula::Or(a, b) => a.box_count() + b.box_count(),
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub(crate) fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Neg(a) | Formula::Box(a) => a.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Atom(_) => vec![],
            Formula::Neg(a) | Formula::Box(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
        }
    }

    /// The smallest set containing `self` and closed under immediate subformulas.
    pub fn subformula_closure(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    pub(crate) fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if out.insert(self.clone()) {
            for c in self.children() {
                c.collect_subformulas(out);
            }
        }
    }

    /// Canonical ordering used for printing and serialization: by size, then
    /// by printed text.
    pub fn canonical_cmp(&self, other: &Formula) -> Ordering {
        self.size()
            .cmp(&other.size())
            .then_with(|| self.to_string().cmp(&other.to_string()))
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        // prec: 0 = top/or, 1 = and operand, 2 = prefix operand
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Neg(a) => {
                f.write_str("~")?;
                a.fmt_prec(f, 2)
            }
            Formula::Box(a) => {
                f.write_str("[]")?;
                a.fmt_prec(f, 2)
            }
            Formula::And(a, b) => {
                let paren = prec > 1;
                if paren {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 2)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Formula::Or(a, b) => {
                let paren = prec > 0;
                if paren {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 0)?;
                f.write_str(" | ")?;
                b.fmt_prec(f, 1)?;
                if paren {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub type FormulaSet = BTreeSet<Formula>;

/// Formulas of a set in canonical print order.
pub fn canonical_order(set: &FormulaSet) -> Vec<&Formula> {
    let mut v: Vec<&Formula> = set.iter().collect();
    v.sort_by(|a, b| a.canonical_cmp(b));
    v
}

/// Left or right side of a sequent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// An ordered pair of finite formula sets `left => right`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub left: FormulaSet,
    pub right: FormulaSet,
}

impl Sequent {
    pub fn new(
        left: impl IntoIterator<Item = Formula>,
        right: impl IntoIterator<Item = Formula>,
    ) -> Self {
        Sequent {
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Sequent::default()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty() && self.right.is_empty()
    }

    pub fn side(&self, side: Side) -> &FormulaSet {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut FormulaSet {
        match side {
            Side::Left => &mut self.left,
            Side::Right => &mut self.right,
        }
    }

    /// Returns a copy with `f` added to `side`.
    pub fn with(&self, side: Side, f: Formula) -> Self {
        let mut s = self.clone();
        s.side_mut(side).insert(f);
        s
    }

    /// Returns a copy with `f` removed from `side`.
    pub fn without(&self, side: Side, f: &Formula) -> Self {
        let mut s = self.clone();
        s.side_mut(side).remove(f);
        s
    }

    /// First atom (in set order) that occurs on both sides.
    pub fn shared_atom(&self) -> Option<&Atom> {
        self.left
            .iter()
            .filter_map(Formula::as_atom)
            .find(|a| self.right.contains(&Formula::Atom((*a).clone())))
    }

    /// Componentwise union of two sequents.
    pub fn union(&self, other: &Sequent) -> Sequent {
        Sequent {
            left: self.left.union(&other.left).cloned().collect(),
            right: self.right.union(&other.right).cloned().collect(),
        }
    }

    pub fn is_subset(&self, other: &Sequent) -> bool {
        self.left.is_subset(&other.left) && self.right.is_subset(&other.right)
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(self.right.iter())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |set: &FormulaSet| {
            canonical_order(set)
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        };
        let l = join(&self.left);
        let r = join(&self.right);
        match (l.is_empty(), r.is_empty()) {
            (true, true) => write!(f, "=>"),
            (true, false) => write!(f, "=> {r}"),
            (false, true) => write!(f, "{l} =>"),
            (false, false) => write!(f, "{l} => {r}"),
        }
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A non-empty finite sequence of sequents, read along a branch of worlds.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypersequent {
    components: Vec<Sequent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("a hypersequent needs at least one component")]
pub struct EmptyHypersequent;

impl Hypersequent {
    pub fn new(components: Vec<Sequent>) -> Result<Self, EmptyHypersequent> {
        if components.is_empty() {
            return Err(EmptyHypersequent);
        }
        Ok(Hypersequent { components })
    }

    /// Panics on an empty vector; for internal code that has already
    /// established non-emptiness.
    pub(crate) fn from_vec(components: Vec<Sequent>) -> Self {
        assert!(!components.is_empty(), "empty hypersequent");
        Hypersequent { components }
    }

    pub fn single(s: Sequent) -> Self {
        Hypersequent {
            components: vec![s],
        }
    }

    pub fn components(&self) -> &[Sequent] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Sequent> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Option<&Sequent> {
        self.components.get(i)
    }

    pub fn last(&self) -> &Sequent {
        self.components.last().expect("non-empty")
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.collect_atoms(&mut out);
        }
        out
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.components.iter().flat_map(|s| s.formulas())
    }

    /// Union of the subformula closures of every formula in the hypersequent.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.collect_subformulas(&mut out);
        }
        out
    }

    pub fn box_count(&self) -> usize {
        self.formulas().map(Formula::box_count).sum()
    }

    pub fn max_depth(&self) -> usize {
        self.formulas().map(Formula::depth).max().unwrap_or(0)
    }

    /// Copy with component `i` replaced.
    pub fn with_component(&self, i: usize, s: Sequent) -> Self {
        let mut c = self.components.clone();
        c[i] = s;
        Hypersequent { components: c }
    }

    /// Copy with `f` added to `side` of component `i`.
    pub fn with_formula(&self, i: usize, side: Side, f: Formula) -> Self {
        self.with_component(i, self.components[i].with(side, f))
    }

    pub fn without_formula(&self, i: usize, side: Side, f: &Formula) -> Self {
        self.with_component(i, self.components[i].without(side, f))
    }

    /// Copy with component `i` removed; `None` if that would leave nothing.
    pub fn without_component(&self, i: usize) -> Option<Self> {
        if self.components.len() < 2 {
            return None;
        }
        let mut c = self.components.clone();
        c.remove(i);
        Some(Hypersequent { components: c })
    }

    pub fn inserted(&self, i: usize, s: Sequent) -> Self {
        let mut c = self.components.clone();
        c.insert(i, s);
        Hypersequent { components: c }
    }

    pub fn appended(&self, s: Sequent) -> Self {
        self.inserted(self.components.len(), s)
    }

    pub fn reversed(&self) -> Self {
        let mut c = self.components.clone();
        c.reverse();
        Hypersequent { components: c }
    }

    pub fn swapped(&self, i: usize) -> Self {
        let mut c = self.components.clone();
        c.swap(i, i + 1);
        Hypersequent { components: c }
    }

    /// Components `0..=i`.
    pub fn prefix(&self, i: usize) -> Self {
        Hypersequent {
            components: self.components[..=i].to_vec(),
        }
    }

    /// Replace components `i` and `i + 1` by their union.
    pub fn merged(&self, i: usize) -> Self {
        let mut c = self.components.clone();
        let second = c.remove(i + 1);
        c[i] = c[i].union(&second);
        Hypersequent { components: c }
    }

    /// Componentwise inclusion between hypersequents of equal length.
    pub fn is_weakening_of(&self, smaller: &Hypersequent) -> bool {
        self.len() == smaller.len()
            && self
                .components
                .iter()
                .zip(&smaller.components)
                .all(|(big, small)| small.is_subset(big))
    }

    /// First component with an atom on both sides.
    pub fn shared_atom(&self) -> Option<(usize, Atom)> {
        self.components
            .iter()
            .enumerate()
            .find_map(|(i, s)| s.shared_atom().map(|a| (i, a.clone())))
    }
}

impl fmt::Display for Hypersequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" // ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Hypersequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<Sequent> for Hypersequent {
    fn from(s: Sequent) -> Self {
        Hypersequent::single(s)
    }
}
