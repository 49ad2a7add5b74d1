use std::collections::BTreeMap;

use rand::Rng;

use super::{bits, Ps4Frame, Ps4Model, Vector};
use crate::syntax::Atom;

/// Adds R-pairs until pseudo-transitivity, forth and back hold. Every repair
/// uses a world's own reflexive S-loop as the witness, so S never changes and
/// the loop terminates once R stops growing.
pub fn saturate(r: &mut [u64], s: &[u64]) {
    let n = r.len();
    for (x, row) in r.iter_mut().enumerate() {
        *row |= 1 << x;
    }
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in bits(r[x]) {
                for z in bits(r[y]) {
                    if r[x] & s[z] == 0 {
                        r[x] |= 1 << z;
                        changed = true;
                    }
                }
            }
            for y in bits(r[x]) {
                for z in bits(s[x]) {
                    if r[z] & s[y] == 0 {
                        r[z] |= 1 << y;
                        changed = true;
                    }
                }
            }
            for z in bits(s[x]) {
                for w in bits(r[z]) {
                    if !bits(r[x]).any(|y| s[y] >> w & 1 == 1) {
                        r[x] |= 1 << w;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

/// Random frame on `n` worlds: sparse random R and S seeds, reflexive loops,
/// then witness saturation.
fn random_frame<R: Rng>(rng: &mut R, n: usize) -> Ps4Frame {
    let mut r = vec![0u64; n];
    let mut s = vec![0u64; n];
    let pr = rng.gen_range(0.1..0.5);
    let ps = rng.gen_range(0.0..0.4);
    for a in 0..n {
        s[a] |= 1 << a;
        for b in 0..n {
            if a != b && rng.gen_bool(pr) {
                r[a] |= 1 << b;
            }
            if a != b && rng.gen_bool(ps) {
                s[a] |= 1 << b;
            }
        }
    }
    saturate(&mut r, &s);
    Ps4Frame::from_rows(r, s)
}

/// Reflexive-transitive closure of the S rows.
fn s_star(s: &[u64]) -> Vec<u64> {
    let mut c = s.to_vec();
    let n = c.len();
    for (i, row) in c.iter_mut().enumerate() {
        *row |= 1 << i;
    }
    for k in 0..n {
        for i in 0..n {
            if c[i] >> k & 1 == 1 {
                c[i] |= c[k];
            }
        }
    }
    c
}

/// Random model with at most `max_worlds` worlds over `atoms`. Each atom gets
/// a random candidate value per world; a world keeps its candidate only if
/// every S*-successor shares it, otherwise the atom is `*` there. This makes
/// S preserve every defined atom value.
pub fn random_ps4_model<R: Rng>(rng: &mut R, max_worlds: usize, atoms: &[Atom]) -> Ps4Model {
    let n = rng.gen_range(1..=max_worlds);
    let frame = random_frame(rng, n);
    let reach = s_star(frame.s_rows());
    let mut val = BTreeMap::new();
    for a in atoms {
        let uniform = rng.gen_bool(0.3);
        let cand: u64 = if uniform {
            if rng.gen_bool(0.5) {
                u64::MAX
            } else {
                0
            }
        } else {
            rng.gen()
        };
        let mut v = Vector { t: 0, f: 0 };
        for (x, &row) in reach.iter().enumerate() {
            if row & cand == row {
                v.t |= 1 << x;
            } else if row & cand == 0 {
                v.f |= 1 << x;
            }
        }
        val.insert(a.clone(), v);
    }
    Ps4Model::new(frame, val)
}
