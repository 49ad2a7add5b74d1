use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Ps4Frame, Ps4Model, Truth3, Vector};
use crate::kripke::MAX_WORLDS;
use crate::syntax::Atom;

#[derive(Debug, thiserror::Error)]
pub enum Ps4FileError {
    #[error("unknown world `{0}`")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("bad truth value `{0}` (expected 0, 1 or \"*\")")]
    BadValue(String),
    #[error("too many worlds ({0}; at most {MAX_WORLDS})")]
    TooMany(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Value {
    Num(u8),
    Str(String),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Repr {
    worlds: Vec<String>,
    #[serde(rename = "relR")]
    rel_r: Vec<(String, String)>,
    #[serde(rename = "relS")]
    rel_s: Vec<(String, String)>,
    val: BTreeMap<String, BTreeMap<String, Value>>,
}

impl Serialize for Ps4Model {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let fr = &self.frame;
        let n = fr.len();
        let name = |w: usize| fr.name(w).to_string();
        let mut rel_r = Vec::new();
        let mut rel_s = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if fr.r(a, b) {
                    rel_r.push((name(a), name(b)));
                }
                if fr.s(a, b) {
                    rel_s.push((name(a), name(b)));
                }
            }
        }
        let val = (0..n)
            .map(|w| {
                let row = self
                    .val
                    .iter()
                    .map(|(a, v)| {
                        let x = match v.at(w) {
                            Truth3::True => Value::Num(1),
                            Truth3::False => Value::Num(0),
                            Truth3::Unknown => Value::Str("*".into()),
                        };
                        (a.name().to_string(), x)
                    })
                    .collect();
                (name(w), row)
            })
            .collect();
        Repr {
            worlds: fr.names().to_vec(),
            rel_r,
            rel_s,
            val,
        }
        .serialize(s)
    }
}

fn from_repr(r: Repr) -> Result<Ps4Model, Ps4FileError> {
    if r.worlds.len() > MAX_WORLDS {
        return Err(Ps4FileError::TooMany(r.worlds.len()));
    }
    let mut index = BTreeMap::new();
    for (i, w) in r.worlds.iter().enumerate() {
        if index.insert(w.clone(), i).is_some() {
            return Err(Ps4FileError::DuplicateWorld(w.clone()));
        }
    }
    let look = |w: &String| {
        index
            .get(w)
            .copied()
            .ok_or_else(|| Ps4FileError::UnknownWorld(w.clone()))
    };
    let conv = |pairs: &[(String, String)]| -> Result<Vec<(usize, usize)>, Ps4FileError> {
        pairs.iter().map(|(a, b)| Ok((look(a)?, look(b)?))).collect()
    };
    let frame = Ps4Frame::new(r.worlds.clone(), &conv(&r.rel_r)?, &conv(&r.rel_s)?)
        .map_err(|e| Ps4FileError::UnknownWorld(e.to_string()))?;
    let mut val: BTreeMap<Atom, Vector> = BTreeMap::new();
    for (w, row) in &r.val {
        let i = look(w)?;
        for (atom, v) in row {
            let e = val.entry(Atom::new(atom)).or_insert(Vector { t: 0, f: 0 });
            match v {
                Value::Num(1) => e.t |= 1 << i,
                Value::Num(0) => e.f |= 1 << i,
                Value::Str(s) if s == "*" => {}
                Value::Num(k) => return Err(Ps4FileError::BadValue(k.to_string())),
                Value::Str(s) => return Err(Ps4FileError::BadValue(s.clone())),
            }
        }
    }
    Ok(Ps4Model::new(frame, val))
}

impl<'de> Deserialize<'de> for Ps4Model {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_repr(Repr::deserialize(d)?).map_err(D::Error::custom)
    }
}
