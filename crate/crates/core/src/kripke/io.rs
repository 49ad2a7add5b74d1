use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{KripkeFrame, KripkeModel, MAX_WORLDS};
use crate::syntax::Atom;

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("unknown world `{0}` in relation")]
    UnknownWorld(String),
    #[error("duplicate world `{0}`")]
    DuplicateWorld(String),
    #[error("valuation for unknown world `{0}`")]
    UnknownValWorld(String),
    #[error("atom `{atom}` has no value at world `{world}`")]
    Partial { atom: String, world: String },
    #[error("bad truth value {0} (expected 0 or 1)")]
    BadValue(u8),
    #[error("too many worlds ({0}; at most {MAX_WORLDS})")]
    TooMany(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelRepr {
    worlds: Vec<String>,
    rel: Vec<(String, String)>,
    val: BTreeMap<String, BTreeMap<String, u8>>,
}

impl Serialize for KripkeModel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let fr = &self.frame;
        let rel = fr
            .pairs()
            .into_iter()
            .map(|(a, b)| (fr.name(a).to_string(), fr.name(b).to_string()))
            .collect();
        let val = (0..fr.len())
            .map(|w| {
                let row = self
                    .val
                    .iter()
                    .map(|(a, bits)| (a.name().to_string(), (bits >> w & 1) as u8))
                    .collect();
                (fr.name(w).to_string(), row)
            })
            .collect();
        ModelRepr {
            worlds: fr.names().to_vec(),
            rel,
            val,
        }
        .serialize(s)
    }
}

fn from_repr(r: ModelRepr) -> Result<KripkeModel, ModelFileError> {
    if r.worlds.len() > MAX_WORLDS {
        return Err(ModelFileError::TooMany(r.worlds.len()));
    }
    let mut index = BTreeMap::new();
    for (i, w) in r.worlds.iter().enumerate() {
        if index.insert(w.clone(), i).is_some() {
            return Err(ModelFileError::DuplicateWorld(w.clone()));
        }
    }
    let look = |w: &String| {
        index
            .get(w)
            .copied()
            .ok_or_else(|| ModelFileError::UnknownWorld(w.clone()))
    };
    let mut pairs = Vec::new();
    for (a, b) in &r.rel {
        pairs.push((look(a)?, look(b)?));
    }
    let frame = KripkeFrame::new(r.worlds.clone(), &pairs).expect("checked above");
    let mut val: BTreeMap<Atom, u64> = BTreeMap::new();
    let mut seen: BTreeMap<String, u64> = BTreeMap::new();
    for (w, row) in &r.val {
        let i = *index
            .get(w)
            .ok_or_else(|| ModelFileError::UnknownValWorld(w.clone()))?;
        for (atom, &v) in row {
            if v > 1 {
                return Err(ModelFileError::BadValue(v));
            }
            *seen.entry(atom.clone()).or_default() |= 1 << i;
            *val.entry(Atom::new(atom)).or_default() |= (v as u64) << i;
        }
    }
    let all = super::mask_all(r.worlds.len());
    for (atom, bits) in seen {
        if bits != all {
            let w = (0..r.worlds.len()).find(|w| bits >> w & 1 == 0).unwrap();
            return Err(ModelFileError::Partial {
                atom,
                world: r.worlds[w].clone(),
            });
        }
    }
    Ok(KripkeModel::new(frame, val))
}

impl<'de> Deserialize<'de> for KripkeModel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        from_repr(ModelRepr::deserialize(d)?).map_err(D::Error::custom)
    }
}
