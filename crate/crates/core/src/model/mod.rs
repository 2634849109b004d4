//! Virtual strings, arrow diagrams and their encodings.
//!
//! A string of rank `m` has `2m` slots numbered `0..2m` in the positive
//! direction of the core circle. Each arrow is a pair `(tail, head)` of slots.

mod code;
mod diagram;
mod families;
mod word;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use code::CanonicalCode;
pub use diagram::ArrowDiagram;
pub use families::{family4_permutation, lattice_permutation, lattice_string, parse_permutation, permutation_string};
pub use word::{bipartition_of, gauss_word_of, Bipartition, GaussWord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Endpoint {
    pub arrow: usize,
    pub head: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct VirtualString {
    arrows: Vec<(usize, usize)>,
    slots: Vec<Endpoint>,
}

/// Positively oriented arc between two slots. Its interior is the set of
/// slots met strictly between `from` and `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
}

impl Arc {
    pub fn new(from: usize, to: usize) -> Self {
        Arc { from, to }
    }

    pub fn contains(&self, n: usize, x: usize) -> bool {
        in_interior(n, self.from, self.to, x)
    }
}

/// Whether slot `x` lies strictly inside the positive arc from `a` to `b`
/// on a circle with `n` slots.
#[inline]
pub fn in_interior(n: usize, a: usize, b: usize, x: usize) -> bool {
    let d = (b + n - a) % n;
    let dx = (x + n - a) % n;
    dx > 0 && dx < d
}

pub(crate) fn arrow_name(i: usize) -> String {
    if i < 26 {
        ((b'a' + i as u8) as char).to_string()
    } else {
        format!("e{i}")
    }
}

/// Every string on `2m` labeled slots, one per oriented perfect matching.
/// Rotations and relabelings are not identified.
pub fn labeled_strings(m: usize) -> Vec<VirtualString> {
    fn rec(used: &mut [bool], cur: &mut Vec<(usize, usize)>, out: &mut Vec<VirtualString>) {
        let Some(i) = used.iter().position(|u| !u) else {
            out.push(VirtualString::from_arrows(cur.clone()).expect("perfect matching"));
            return;
        };
        used[i] = true;
        for j in i + 1..used.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            for arrow in [(i, j), (j, i)] {
                cur.push(arrow);
                rec(used, cur, out);
                cur.pop();
            }
            used[j] = false;
        }
        used[i] = false;
    }
    let mut out = Vec::new();
    rec(&mut vec![false; 2 * m], &mut Vec::new(), &mut out);
    out
}

impl VirtualString {
    pub fn trivial() -> Self {
        VirtualString { arrows: Vec::new(), slots: Vec::new() }
    }

    /// Builds a string from `(tail, head)` slot pairs.
    pub fn from_arrows(arrows: Vec<(usize, usize)>) -> Result<Self> {
        let n = 2 * arrows.len();
        let mut slots: Vec<Option<Endpoint>> = vec![None; n];
        for (i, &(t, h)) in arrows.iter().enumerate() {
            if t == h {
                return Err(Error::Invalid(format!("arrow {i} has tail = head = {t}")));
            }
            for (s, head) in [(t, false), (h, true)] {
                if s >= n {
                    return Err(Error::Invalid(format!("slot {s} out of range 0..{n}")));
                }
                if slots[s].is_some() {
                    return Err(Error::Invalid(format!("slot {s} used twice")));
                }
                slots[s] = Some(Endpoint { arrow: i, head });
            }
        }
        let slots = slots.into_iter().map(|s| s.expect("perfect pairing")).collect();
        Ok(VirtualString { arrows, slots })
    }

    /// Builds a string from a slot sequence of `(key, is_head)` tokens.
    /// Each key must occur once as a tail and once as a head. Arrows are
    /// numbered by increasing key.
    pub fn from_sequence(seq: &[(usize, bool)]) -> Result<Self> {
        let mut keys: Vec<usize> = seq.iter().map(|&(k, _)| k).collect();
        keys.sort_unstable();
        keys.dedup();
        let index: HashMap<usize, usize> = keys.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let mut tails = vec![None; keys.len()];
        let mut heads = vec![None; keys.len()];
        for (s, &(k, head)) in seq.iter().enumerate() {
            let slot = if head { &mut heads[index[&k]] } else { &mut tails[index[&k]] };
            if slot.replace(s).is_some() {
                return Err(Error::Invalid(format!("arrow {k} has two {}s", if head { "head" } else { "tail" })));
            }
        }
        let mut arrows = Vec::with_capacity(keys.len());
        for i in 0..keys.len() {
            match (tails[i], heads[i]) {
                (Some(t), Some(h)) => arrows.push((t, h)),
                _ => return Err(Error::Invalid(format!("arrow {} lacks a tail or a head", keys[i]))),
            }
        }
        VirtualString::from_arrows(arrows)
    }

    /// Parses the token form, e.g. `x' y z' x z y'`: `NAME` marks a tail and
    /// `NAME'` a head. A JSON object in the export format is accepted too.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Ok(ArrowDiagram::from_json(text)?.into_string());
        }
        let (seq, signs) = parse_tokens(text)?;
        if signs.iter().any(|s| s.is_some()) {
            return Err(Error::Parse("signs are only allowed in arrow diagrams".into()));
        }
        VirtualString::from_sequence(&seq)
    }

    pub fn rank(&self) -> usize {
        self.arrows.len()
    }

    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn arrow(&self, e: usize) -> Result<(usize, usize)> {
        self.arrows.get(e).copied().ok_or(Error::NoSuchArrow(e))
    }

    pub fn slot(&self, s: usize) -> Endpoint {
        self.slots[s]
    }

    pub fn slots(&self) -> &[Endpoint] {
        &self.slots
    }

    /// The slot at the other end of the arrow through `s`.
    pub fn partner(&self, s: usize) -> usize {
        let Endpoint { arrow, head } = self.slots[s];
        let (t, h) = self.arrows[arrow];
        if head { t } else { h }
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn in_interior(&self, a: usize, b: usize, x: usize) -> bool {
        in_interior(self.n_slots(), a, b, x)
    }

    /// +1 if `f` links `e` positively, -1 if negatively, 0 if unlinked.
    /// `f = (c,d)` links `e = (a,b)` positively when `c` lies inside `ab`
    /// and `d` inside `ba`.
    pub fn link_sign(&self, e: usize, f: usize) -> i64 {
        if e == f {
            return 0;
        }
        let (a, b) = self.arrows[e];
        let (c, d) = self.arrows[f];
        let c_in_ab = self.in_interior(a, b, c);
        let d_in_ab = self.in_interior(a, b, d);
        match (c_in_ab, d_in_ab) {
            (true, false) => 1,
            (false, true) => -1,
            _ => 0,
        }
    }

    pub fn linked(&self, e: usize, f: usize) -> bool {
        self.link_sign(e, f) != 0
    }

    /// Relabels slots so that the new slot 0 is the old slot `k`.
    pub fn rotate(&self, k: usize) -> Self {
        let n = self.n_slots();
        if n == 0 {
            return self.clone();
        }
        let k = k % n;
        let arrows = self.arrows.iter().map(|&(t, h)| ((t + n - k) % n, (h + n - k) % n)).collect();
        VirtualString::from_arrows(arrows).expect("rotation keeps the pairing")
    }

    /// The same arrows on the core circle with reversed orientation.
    pub fn opposite(&self) -> Self {
        let n = self.n_slots();
        let arrows = self.arrows.iter().map(|&(t, h)| (n - 1 - t, n - 1 - h)).collect();
        VirtualString::from_arrows(arrows).expect("reflection keeps the pairing")
    }

    /// Every arrow reversed.
    pub fn inverse(&self) -> Self {
        let arrows = self.arrows.iter().map(|&(t, h)| (h, t)).collect();
        VirtualString::from_arrows(arrows).expect("reversal keeps the pairing")
    }

    /// Slots of `self` followed by the slots of `other` on one circle.
    pub fn product(&self, other: &VirtualString) -> Self {
        let off = self.n_slots();
        let mut arrows = self.arrows.clone();
        arrows.extend(other.arrows.iter().map(|&(t, h)| (t + off, h + off)));
        VirtualString::from_arrows(arrows).expect("concatenation keeps the pairing")
    }

    /// Replaces each arrow by `p` nested parallel copies.
    pub fn cable(&self, p: usize) -> Result<Self> {
        if p == 0 {
            return Err(Error::Precondition("cable multiplicity must be positive".into()));
        }
        let mut arrows = Vec::with_capacity(p * self.rank());
        for &(t, h) in &self.arrows {
            for j in 0..p {
                arrows.push((t * p + j, h * p + (p - 1 - j)));
            }
        }
        VirtualString::from_arrows(arrows)
    }

    /// Keeps only the arrows selected by `keep`, preserving their order.
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        let seq: Vec<(usize, bool)> =
            self.slots.iter().filter(|ep| keep(ep.arrow)).map(|ep| (ep.arrow, ep.head)).collect();
        VirtualString::from_sequence(&seq).expect("sub-pairing of a pairing")
    }

    pub fn code(&self) -> CanonicalCode {
        CanonicalCode::of_string(self)
    }

    pub fn is_homeomorphic(&self, other: &VirtualString) -> bool {
        self.rank() == other.rank() && self.code() == other.code()
    }

    /// Token rendering with arrows named `a`, `b`, ... in index order.
    pub fn render(&self) -> String {
        self.slots
            .iter()
            .map(|ep| if ep.head { format!("{}'", arrow_name(ep.arrow)) } else { arrow_name(ep.arrow) })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StringJson {
            rank: self.rank(),
            arrows: self.arrows.iter().map(|&(t, h)| [t, h]).collect(),
            signs: None,
        })
        .expect("plain data")
    }
}

impl fmt::Display for VirtualString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct StringJson {
    pub rank: usize,
    pub arrows: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signs: Option<Vec<i8>>,
}

/// Splits token text into a `(name index, is_head)` sequence plus an
/// optional sign per name (written on the tail token as `+` or `-`).
pub(crate) fn parse_tokens(text: &str) -> Result<(Vec<(usize, bool)>, Vec<Option<i8>>)> {
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut signs: Vec<Option<i8>> = Vec::new();
    let mut seq = Vec::new();
    for tok in text.split_whitespace() {
        let (body, head) = match tok.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (tok, false),
        };
        let (body, sign) = if head {
            (body, None)
        } else if let Some(b) = body.strip_suffix('+') {
            (b, Some(1))
        } else if let Some(b) = body.strip_suffix('-').or_else(|| body.strip_suffix('\u{2212}')) {
            (b, Some(-1))
        } else {
            (body, None)
        };
        if body.is_empty() {
            return Err(Error::Parse(format!("empty arrow name in token {tok:?}")));
        }
        if body.contains(['\'', '+', '-']) {
            return Err(Error::Parse(format!("malformed token {tok:?}")));
        }
        let next = names.len();
        let id = *names.entry(body.to_string()).or_insert(next);
        if id == signs.len() {
            signs.push(None);
        }
        if sign.is_some() {
            signs[id] = sign;
        }
        if seq.iter().any(|&(k, h)| k == id && h == head) {
            return Err(Error::Parse(format!(
                "arrow {body:?} has two {}s",
                if head { "head" } else { "tail" }
            )));
        }
        seq.push((id, head));
    }
    for (name, &id) in &names {
        let tails = seq.iter().filter(|&&(k, h)| k == id && !h).count();
        let heads = seq.iter().filter(|&&(k, h)| k == id && h).count();
        if tails != 1 || heads != 1 {
            return Err(Error::Parse(format!("arrow {name:?} needs exactly one tail and one head")));
        }
    }
    Ok((seq, signs))
}
