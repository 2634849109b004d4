use std::collections::HashMap;
use std::fmt;

use super::VirtualString;
use crate::error::{Error, Result};

/// A circular word in which every letter occurs exactly twice.
///
/// Letters are indices into `names`; names are sorted (shorter first, then
/// lexicographically) so that index order is the natural letter order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussWord {
    letters: Vec<usize>,
    names: Vec<String>,
}

/// An unordered pair `{X, Y}` of letter sets, stored as a part index per
/// letter with letter 0 always in part 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    part: Vec<u8>,
}

fn name_key(s: &str) -> (usize, &str) {
    (s.len(), s)
}

impl GaussWord {
    /// Letters are single characters, or comma-separated names when the
    /// text contains a comma.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let raw: Vec<String> = if text.contains(',') {
            text.split(',').map(|t| t.trim().to_string()).collect()
        } else {
            text.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_string()).collect()
        };
        if raw.iter().any(|t| t.is_empty()) {
            return Err(Error::Parse("empty letter".into()));
        }
        let mut names: Vec<String> = raw.clone();
        names.sort_by(|a, b| name_key(a).cmp(&name_key(b)));
        names.dedup();
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let letters: Vec<usize> = raw.iter().map(|t| index[t.as_str()]).collect();
        GaussWord::new(letters, names)
    }

    pub fn new(letters: Vec<usize>, names: Vec<String>) -> Result<Self> {
        let mut count = vec![0usize; names.len()];
        for &l in &letters {
            if l >= names.len() {
                return Err(Error::Invalid(format!("letter index {l} out of range")));
            }
            count[l] += 1;
        }
        if let Some(i) = count.iter().position(|&c| c != 2) {
            return Err(Error::Parse(format!("letter {:?} occurs {} times", names[i], count[i])));
        }
        Ok(GaussWord { letters, names })
    }

    /// Word over letters `0..k` named `1..=k`.
    pub fn from_letters(letters: Vec<usize>) -> Result<Self> {
        let k = letters.iter().map(|&l| l + 1).max().unwrap_or(0);
        GaussWord::new(letters, (1..=k).map(|i| i.to_string()).collect())
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn alphabet_size(&self) -> usize {
        self.names.len()
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Positions of the two occurrences of each letter.
    pub fn positions(&self) -> Vec<(usize, usize)> {
        let mut pos = vec![(usize::MAX, usize::MAX); self.names.len()];
        for (i, &l) in self.letters.iter().enumerate() {
            if pos[l].0 == usize::MAX {
                pos[l].0 = i;
            } else {
                pos[l].1 = i;
            }
        }
        pos
    }

    pub fn rotate(&self, k: usize) -> Self {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let letters = (0..n).map(|i| self.letters[(i + k) % n]).collect();
        GaussWord { letters, names: self.names.clone() }
    }
}

impl fmt::Display for GaussWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let multi = self.names.iter().any(|n| n.chars().count() != 1);
        let parts: Vec<&str> = self.letters.iter().map(|&l| self.names[l].as_str()).collect();
        f.write_str(&parts.join(if multi { "," } else { "" }))
    }
}

impl Bipartition {
    /// `in_y[i]` says whether letter `i` lies in the second part before
    /// normalization.
    pub fn from_membership(in_y: &[bool]) -> Self {
        let flip = in_y.first().copied().unwrap_or(false);
        Bipartition { part: in_y.iter().map(|&b| (b != flip) as u8).collect() }
    }

    pub fn len(&self) -> usize {
        self.part.len()
    }

    pub fn is_empty(&self) -> bool {
        self.part.is_empty()
    }

    pub fn same_part(&self, i: usize, j: usize) -> bool {
        self.part[i] == self.part[j]
    }

    pub fn part_of(&self, i: usize) -> u8 {
        self.part[i]
    }

    /// The two parts as letter index lists; the first holds letter 0.
    pub fn parts(&self) -> (Vec<usize>, Vec<usize>) {
        let x = (0..self.part.len()).filter(|&i| self.part[i] == 0).collect();
        let y = (0..self.part.len()).filter(|&i| self.part[i] == 1).collect();
        (x, y)
    }

    /// Parses `X|Y` against the alphabet of `w`, e.g. `13|24` or `a,b|c`.
    pub fn parse(text: &str, w: &GaussWord) -> Result<Self> {
        let (x, y) = text.split_once('|').ok_or_else(|| Error::Parse("bipartition needs the form X|Y".into()))?;
        let side = |s: &str| -> Vec<String> {
            let s = s.trim();
            if s.contains(',') {
                s.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect()
            } else {
                s.chars().filter(|c| !c.is_whitespace()).map(|c| c.to_string()).collect()
            }
        };
        let mut member: Vec<Option<bool>> = vec![None; w.alphabet_size()];
        for (names, in_y) in [(side(x), false), (side(y), true)] {
            for n in names {
                let i = w
                    .names()
                    .iter()
                    .position(|m| *m == n)
                    .ok_or_else(|| Error::Parse(format!("letter {n:?} is not in the word")))?;
                if member[i].replace(in_y).is_some() {
                    return Err(Error::Parse(format!("letter {n:?} listed twice")));
                }
            }
        }
        let member: Vec<bool> = member
            .into_iter()
            .enumerate()
            .map(|(i, m)| m.ok_or_else(|| Error::Parse(format!("letter {:?} missing", w.names()[i]))))
            .collect::<Result<_>>()?;
        Ok(Bipartition::from_membership(&member))
    }

    pub fn render(&self, w: &GaussWord) -> String {
        let multi = w.names().iter().any(|n| n.chars().count() != 1);
        let sep = if multi { "," } else { "" };
        let (x, y) = self.parts();
        let join = |v: &[usize]| v.iter().map(|&i| w.names()[i].as_str()).collect::<Vec<_>>().join(sep);
        format!("{}|{}", join(&x), join(&y))
    }
}

/// The Gauss word read off the slots; arrow `i` becomes letter `i+1`.
pub fn gauss_word_of(s: &VirtualString) -> GaussWord {
    GaussWord::from_letters(s.slots().iter().map(|ep| ep.arrow).collect()).expect("each arrow has two endpoints")
}

/// Arrows are equivalent when their tails are separated by an odd number
/// of endpoints, i.e. when the tail slots have equal parity.
pub fn bipartition_of(s: &VirtualString) -> Bipartition {
    let member: Vec<bool> = s.arrows().iter().map(|&(t, _)| t % 2 == 1).collect();
    Bipartition::from_membership(&member)
}
