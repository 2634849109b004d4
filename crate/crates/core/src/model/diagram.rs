use std::fmt;

use super::{arrow_name, parse_tokens, CanonicalCode, StringJson, VirtualString};
use crate::error::{Error, Result};

/// A virtual string with a sign `+1` or `-1` on every arrow.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrowDiagram {
    string: VirtualString,
    signs: Vec<i8>,
}

impl ArrowDiagram {
    pub fn new(string: VirtualString, signs: Vec<i8>) -> Result<Self> {
        if signs.len() != string.rank() {
            return Err(Error::Invalid(format!("{} signs for {} arrows", signs.len(), string.rank())));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Invalid("signs must be +1 or -1".into()));
        }
        Ok(ArrowDiagram { string, signs })
    }

    pub fn trivial() -> Self {
        ArrowDiagram { string: VirtualString::trivial(), signs: Vec::new() }
    }

    /// Lifts a string with sign `+` on every arrow.
    pub fn positive(string: VirtualString) -> Self {
        let signs = vec![1; string.rank()];
        ArrowDiagram { string, signs }
    }

    /// Token form with signs on tails, e.g. `a+ b- a' b'`. Unsigned tails
    /// default to `+`. JSON input is accepted as well.
    pub fn parse(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return ArrowDiagram::from_json(text);
        }
        let (seq, signs) = parse_tokens(text)?;
        let string = VirtualString::from_sequence(&seq)?;
        let signs = signs.into_iter().map(|s| s.unwrap_or(1)).collect();
        ArrowDiagram::new(string, signs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: StringJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if j.arrows.len() != j.rank {
            return Err(Error::Parse(format!("rank {} but {} arrows", j.rank, j.arrows.len())));
        }
        let string = VirtualString::from_arrows(j.arrows.iter().map(|a| (a[0], a[1])).collect())?;
        let signs = j.signs.unwrap_or_else(|| vec![1; j.rank]);
        ArrowDiagram::new(string, signs)
    }

    pub fn string(&self) -> &VirtualString {
        &self.string
    }

    pub fn into_string(self) -> VirtualString {
        self.string
    }

    pub fn underlying(&self) -> VirtualString {
        self.string.clone()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, e: usize) -> i8 {
        self.signs[e]
    }

    pub fn rank(&self) -> usize {
        self.string.rank()
    }

    pub fn with_sign(&self, e: usize, sign: i8) -> Self {
        let mut d = self.clone();
        d.signs[e] = sign;
        d
    }

    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> Self {
        let kept: Vec<usize> = (0..self.rank()).filter(|&e| keep(e)).collect();
        let string = self.string.restrict(|e| kept.binary_search(&e).is_ok());
        let signs = kept.iter().map(|&e| self.signs[e]).collect();
        ArrowDiagram { string, signs }
    }

    pub fn code(&self) -> CanonicalCode {
        CanonicalCode::of_diagram(self)
    }

    pub fn render(&self) -> String {
        self.string
            .slots()
            .iter()
            .map(|ep| {
                let name = arrow_name(ep.arrow);
                if ep.head {
                    format!("{name}'")
                } else {
                    format!("{name}{}", if self.signs[ep.arrow] > 0 { '+' } else { '-' })
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(StringJson {
            rank: self.rank(),
            arrows: self.string.arrows().iter().map(|&(t, h)| [t, h]).collect(),
            signs: Some(self.signs.clone()),
        })
        .expect("plain data")
    }
}

impl fmt::Display for ArrowDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
