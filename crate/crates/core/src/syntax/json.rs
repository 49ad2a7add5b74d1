//! Canonical JSON form of formulas, sequents and hypersequents.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::formula::{canonical_order, Formula, Hypersequent, Sequent};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
enum Repr {
    Atom(String),
    Neg(Box<Repr>),
    Box(Box<Repr>),
    And(Box<Repr>, Box<Repr>),
    Or(Box<Repr>, Box<Repr>),
}

impl From<&Formula> for Repr {
    fn from(f: &Formula) -> Self {
        match f {
            Formula::Atom(a) => Repr::Atom(a.name().to_string()),
            Formula::Neg(a) => Repr::Neg(Box::new(a.as_ref().into())),
            Formula::Box(a) => Repr::Box(Box::new(a.as_ref().into())),
            Formula::And(a, b) => Repr::And(Box::new(a.as_ref().into()), Box::new(b.as_ref().into())),
            Formula::Or(a, b) => Repr::Or(Box::new(a.as_ref().into()), Box::new(b.as_ref().into())),
        }
    }
}

impl From<Repr> for Formula {
    fn from(r: Repr) -> Self {
        match r {
            Repr::Atom(a) => Formula::atom(&a),
            Repr::Neg(a) => Formula::from(*a).neg(),
            Repr::Box(a) => Formula::from(*a).boxed(),
            Repr::And(a, b) => Formula::and((*a).into(), (*b).into()),
            Repr::Or(a, b) => Formula::or((*a).into(), (*b).into()),
        }
    }
}

impl Serialize for Formula {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Repr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Repr::deserialize(d)?.into())
    }
}

#[derive(Serialize)]
struct SequentOut<'a> {
    left: Vec<&'a Formula>,
    right: Vec<&'a Formula>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SequentIn {
    left: Vec<Formula>,
    right: Vec<Formula>,
}

impl Serialize for Sequent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        SequentOut {
            left: canonical_order(&self.left),
            right: canonical_order(&self.right),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Sequent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = SequentIn::deserialize(d)?;
        Ok(Sequent::new(r.left, r.right))
    }
}

#[derive(Serialize)]
struct HyperOut<'a> {
    components: &'a [Sequent],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HyperIn {
    components: Vec<Sequent>,
}

impl Serialize for Hypersequent {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        HyperOut {
            components: self.components(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Hypersequent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = HyperIn::deserialize(d)?;
        Hypersequent::new(r.components).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_hypersequent};

    #[test]
    fn formula_shape() {
        let f = parse_formula("~[](p & q)").unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"neg":{"box":{"and":[{"atom":"p"},{"atom":"q"}]}}}"#);
        let back: Formula = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn sequent_sides_sorted() {
        let h = parse_hypersequent("[]p, q, p => // => r").unwrap();
        let s = serde_json::to_string(&h).unwrap();
        assert_eq!(
            s,
            r#"{"components":[{"left":[{"atom":"p"},{"atom":"q"},{"box":{"atom":"p"}}],"right":[]},{"left":[],"right":[{"atom":"r"}]}]}"#
        );
        let back: Hypersequent = serde_json::from_str(&s).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn empty_components_rejected() {
        assert!(serde_json::from_str::<Hypersequent>(r#"{"components":[]}"#).is_err());
    }
}
