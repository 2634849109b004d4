use std::fmt;

use super::{arrow_name, ArrowDiagram, Endpoint, VirtualString};

/// Rotation- and relabeling-invariant form of a string or arrow diagram.
///
/// Token `2*k + r` stands for arrow `k` (numbered by first occurrence) with
/// role `r` (0 = tail, 1 = head). The code is the lexicographic minimum over
/// all rotations; reflection is not quotiented.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct CanonicalCode {
    tokens: Vec<u16>,
    signs: Vec<i8>,
}

impl CanonicalCode {
    pub fn of_string(s: &VirtualString) -> Self {
        canonical(s.slots(), None)
    }

    pub fn of_diagram(d: &ArrowDiagram) -> Self {
        canonical(d.string().slots(), Some(d.signs()))
    }

    pub fn tokens(&self) -> &[u16] {
        &self.tokens
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn rank(&self) -> usize {
        self.tokens.len() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The representative string whose slot sequence is the code itself.
    pub fn decode(&self) -> VirtualString {
        let seq: Vec<(usize, bool)> = self.tokens.iter().map(|&t| ((t >> 1) as usize, t & 1 == 1)).collect();
        VirtualString::from_sequence(&seq).expect("codes encode valid strings")
    }

    pub fn decode_diagram(&self) -> ArrowDiagram {
        let s = self.decode();
        let signs = if self.signs.is_empty() { vec![1; s.rank()] } else { self.signs.clone() };
        ArrowDiagram::new(s, signs).expect("codes encode valid diagrams")
    }
}

fn canonical(slots: &[Endpoint], signs: Option<&[i8]>) -> CanonicalCode {
    let n = slots.len();
    let m = n / 2;
    if n == 0 {
        return CanonicalCode::default();
    }
    let mut best: Option<(Vec<u16>, Vec<i8>)> = None;
    let mut label = vec![u16::MAX; m];
    let mut order: Vec<usize> = Vec::with_capacity(m);
    let mut cand: Vec<u16> = Vec::with_capacity(n);
    for r in 0..n {
        label.iter_mut().for_each(|l| *l = u16::MAX);
        order.clear();
        cand.clear();
        // 0: undecided, 1: candidate already smaller
        let mut smaller = best.is_none();
        let mut worse = false;
        for i in 0..n {
            let ep = slots[(r + i) % n];
            if label[ep.arrow] == u16::MAX {
                label[ep.arrow] = order.len() as u16;
                order.push(ep.arrow);
            }
            let tok = 2 * label[ep.arrow] + ep.head as u16;
            if !smaller {
                let b = best.as_ref().unwrap().0[i];
                if tok > b {
                    worse = true;
                    break;
                }
                if tok < b {
                    smaller = true;
                }
            }
            cand.push(tok);
        }
        if worse {
            continue;
        }
        let cand_signs: Vec<i8> = match signs {
            Some(sg) => order.iter().map(|&a| sg[a]).collect(),
            None => Vec::new(),
        };
        let take = match &best {
            None => true,
            Some((bt, bs)) => smaller || (cand == *bt && cand_signs < *bs),
        };
        if take {
            best = Some((cand.clone(), cand_signs));
        }
    }
    let (tokens, signs) = best.expect("n > 0");
    CanonicalCode { tokens, signs }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tokens.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self
            .tokens
            .iter()
            .map(|&t| {
                let k = (t >> 1) as usize;
                if t & 1 == 1 {
                    format!("{}'", arrow_name(k))
                } else if self.signs.is_empty() {
                    arrow_name(k)
                } else {
                    format!("{}{}", arrow_name(k), if self.signs[k] > 0 { '+' } else { '-' })
                }
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}
