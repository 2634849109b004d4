//! Gauss words on the 2-sphere: interlacement, the parity conditions,
//! compatible bipartitions and homeomorphism of sphere curves.

use crate::error::{Error, Result};
use crate::model::{Bipartition, GaussWord, VirtualString};

/// Default alphabet limit for listing compatible bipartitions.
pub const BIPARTITION_LIMIT: usize = 20;

/// `w_i` for every letter, stored as an adjacency matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterlacementData {
    adj: Vec<Vec<bool>>,
}

impl InterlacementData {
    pub fn of(w: &GaussWord) -> Self {
        let k = w.alphabet_size();
        let pos = w.positions();
        let mut adj = vec![vec![false; k]; k];
        for i in 0..k {
            let (p, q) = pos[i];
            let mut seen = vec![0u8; k];
            for &l in &w.letters()[p + 1..q] {
                seen[l] += 1;
            }
            for j in 0..k {
                adj[i][j] = seen[j] == 1;
            }
        }
        InterlacementData { adj }
    }

    pub fn size(&self) -> usize {
        self.adj.len()
    }

    pub fn interlaced(&self, i: usize, j: usize) -> bool {
        self.adj[i][j]
    }

    /// Letters interlaced with `i`.
    pub fn set(&self, i: usize) -> Vec<usize> {
        (0..self.size()).filter(|&j| self.adj[i][j]).collect()
    }

    /// `#(w_i ∩ w_j)`.
    pub fn common(&self, i: usize, j: usize) -> usize {
        (0..self.size()).filter(|&x| self.adj[i][x] && self.adj[j][x]).count()
    }

    /// Connected components of the interlacement graph, as a component
    /// index per letter, plus the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let k = self.size();
        let mut comp = vec![usize::MAX; k];
        let mut c = 0;
        for start in 0..k {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = c;
            while let Some(i) = stack.pop() {
                for j in 0..k {
                    if self.adj[i][j] && comp[j] == usize::MAX {
                        comp[j] = c;
                        stack.push(j);
                    }
                }
            }
            c += 1;
        }
        (comp, c)
    }
}

/// Every `w_i` has an even number of letters.
pub fn condition_i(w: &GaussWord) -> bool {
    let d = InterlacementData::of(w);
    (0..d.size()).all(|i| d.set(i).len() % 2 == 0)
}

/// `#(w_i ∩ w_j)` is even whenever `i ≠ j` are not interlaced.
pub fn condition_ii(w: &GaussWord) -> bool {
    let d = InterlacementData::of(w);
    let k = d.size();
    (0..k).all(|i| (i + 1..k).all(|j| d.interlaced(i, j) || d.common(i, j) % 2 == 0))
}

fn check_size(w: &GaussWord, bip: &Bipartition) -> Result<()> {
    if bip.len() != w.alphabet_size() {
        return Err(Error::Invalid(format!(
            "bipartition covers {} letters, the word has {}",
            bip.len(),
            w.alphabet_size()
        )));
    }
    Ok(())
}

/// For interlaced `i, j`: `#(w_i ∩ w_j)` is odd exactly when `i` and `j`
/// lie in the same part.
pub fn compatible(w: &GaussWord, bip: &Bipartition) -> Result<bool> {
    check_size(w, bip)?;
    let d = InterlacementData::of(w);
    let k = d.size();
    Ok((0..k).all(|i| {
        (i + 1..k).all(|j| !d.interlaced(i, j) || (d.common(i, j) % 2 == 1) == bip.same_part(i, j))
    }))
}

/// Part assignment forced by the parity constraints, one free choice per
/// component (the component's first letter goes to part 0). `None` if the
/// constraints contradict each other.
fn propagate(d: &InterlacementData) -> Option<(Vec<bool>, Vec<usize>, usize)> {
    let (comp, c) = d.components();
    let k = d.size();
    let mut side: Vec<Option<bool>> = vec![None; k];
    for start in 0..k {
        if side[start].is_some() {
            continue;
        }
        side[start] = Some(false);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let si = side[i].expect("assigned before push");
            for j in 0..k {
                if !d.interlaced(i, j) {
                    continue;
                }
                let same = d.common(i, j) % 2 == 1;
                let want = if same { si } else { !si };
                match side[j] {
                    None => {
                        side[j] = Some(want);
                        stack.push(j);
                    }
                    Some(v) if v != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    Some((side.into_iter().map(|s| s.expect("all assigned")).collect(), comp, c))
}

pub fn has_compatible_bipartition(w: &GaussWord) -> bool {
    propagate(&InterlacementData::of(w)).is_some()
}

/// All compatible bipartitions: none, or `2^(c-1)` for `c` components of
/// the interlacement graph (one, the empty one, for the empty word).
pub fn compatible_bipartitions(w: &GaussWord, limit: usize) -> Result<Vec<Bipartition>> {
    let k = w.alphabet_size();
    if k > limit {
        return Err(Error::LimitExceeded { what: format!("alphabet of {k} letters"), limit });
    }
    let d = InterlacementData::of(w);
    let Some((base, comp, c)) = propagate(&d) else { return Ok(Vec::new()) };
    if c == 0 {
        return Ok(vec![Bipartition::from_membership(&[])]);
    }
    // component 0 contains letter 0 and stays put
    let mut out: Vec<Bipartition> = (0..1u64 << (c - 1))
        .map(|flips| {
            let member: Vec<bool> = (0..k).map(|i| base[i] ^ (comp[i] > 0 && flips >> (comp[i] - 1) & 1 == 1)).collect();
            Bipartition::from_membership(&member)
        })
        .collect();
    out.sort();
    Ok(out)
}

pub fn realizable_on_sphere(w: &GaussWord, bip: &Bipartition) -> Result<bool> {
    Ok(condition_i(w) && condition_ii(w) && compatible(w, bip)?)
}

/// Rosenstiehl's criterion.
pub fn realizable(w: &GaussWord) -> bool {
    condition_i(w) && condition_ii(w) && has_compatible_bipartition(w)
}

/// The string with Gauss word `w` and bipartition `bip`: letters of the
/// part holding letter 0 get their tail at the odd (1-based) position.
pub fn string_from_word(w: &GaussWord, bip: &Bipartition) -> Result<VirtualString> {
    check_size(w, bip)?;
    if !condition_i(w) {
        return Err(Error::Precondition("some letter is interlaced with an odd number of letters".into()));
    }
    let arrows = w
        .positions()
        .into_iter()
        .enumerate()
        .map(|(i, (p, q))| {
            let (even, odd) = if p % 2 == 0 { (p, q) } else { (q, p) };
            if bip.part_of(i) == 0 {
                (even, odd)
            } else {
                (odd, even)
            }
        })
        .collect();
    VirtualString::from_arrows(arrows)
}

/// No rotation of `w` is a concatenation of two nonempty Gauss words.
pub fn irreducible(w: &GaussWord) -> bool {
    let n = w.len();
    if n == 0 {
        return false;
    }
    let pos = w.positions();
    for start in 0..n {
        for len in (2..n).step_by(2) {
            // a closed segment holds both occurrences of each of its letters
            let inside = |x: usize| (x + n - start) % n < len;
            let closed = (0..len).all(|t| {
                let l = w.letters()[(start + t) % n];
                inside(pos[l].0) && inside(pos[l].1)
            });
            if closed {
                return false;
            }
        }
    }
    true
}

/// First-occurrence relabeling of a letter sequence.
fn normal_letters(letters: &[usize], k: usize) -> (Vec<usize>, Vec<usize>) {
    let mut map = vec![usize::MAX; k];
    let mut next = 0;
    let seq = letters
        .iter()
        .map(|&l| {
            if map[l] == usize::MAX {
                map[l] = next;
                next += 1;
            }
            map[l]
        })
        .collect();
    (seq, map)
}

/// Whether two sphere-realizable pairs agree up to rotation and relabeling.
pub fn sphere_curves_homeomorphic(a: (&GaussWord, &Bipartition), b: (&GaussWord, &Bipartition)) -> Result<bool> {
    for (w, bip) in [a, b] {
        if !realizable_on_sphere(w, bip)? {
            return Err(Error::Precondition(format!("({w}, {}) is not realizable on the sphere", bip.render(w))));
        }
    }
    let (w1, b1) = a;
    let (w2, b2) = b;
    let k = w1.alphabet_size();
    if k != w2.alphabet_size() {
        return Ok(false);
    }
    let (target, map2) = normal_letters(w2.letters(), k);
    for r in 0..w1.len().max(1) {
        let rot = w1.rotate(r);
        let (seq, map1) = normal_letters(rot.letters(), k);
        if seq != target {
            continue;
        }
        // letter x of w1 corresponds to the letter of w2 with the same label
        let mut inv2 = vec![0; k];
        for (l, &m) in map2.iter().enumerate() {
            inv2[m] = l;
        }
        let phi: Vec<usize> = (0..k).map(|x| inv2[map1[x]]).collect();
        if (0..k).all(|x| b1.same_part(0, x) == b2.same_part(phi[0], phi[x])) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::genus;
    use crate::model::{bipartition_of, gauss_word_of, labeled_strings};
    use std::collections::BTreeSet;

    fn word(s: &str) -> GaussWord {
        GaussWord::parse(s).unwrap()
    }

    #[test]
    fn reference_words() {
        for s in ["1231245345", "1231435425"] {
            assert!(condition_i(&word(s)));
            assert!(!condition_ii(&word(s)));
        }
        let w = word("123456214365");
        assert!(condition_i(&w) && condition_ii(&w));
        assert!(compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap().is_empty());
        assert!(!realizable(&w));
        assert!(!condition_i(&word("1212")));
        let w = word("1122");
        assert!(realizable(&w));
        assert_eq!(compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap().len(), 2);
        let e = word("");
        assert!(realizable(&e));
        assert_eq!(compatible_bipartitions(&e, BIPARTITION_LIMIT).unwrap().len(), 1);
        assert!(compatible(&e, &Bipartition::from_membership(&[])).unwrap());
    }

    #[test]
    fn irreducibility() {
        assert!(irreducible(&word("1212")));
        assert!(!irreducible(&word("1221")));
        assert!(!irreducible(&word("")));
        assert!(!irreducible(&word("1122")));
        assert!(irreducible(&word("11")));
    }

    #[test]
    fn rejects_mismatched_bipartition() {
        let w = word("1122");
        assert!(compatible(&w, &Bipartition::from_membership(&[false])).is_err());
        assert!(compatible_bipartitions(&word("1122"), 1).unwrap_err().is_limit());
        assert!(string_from_word(&word("1212"), &Bipartition::from_membership(&[false, false])).is_err());
    }

    /// Every Gauss word on `k` letters up to relabeling.
    fn words(k: usize) -> Vec<GaussWord> {
        labeled_strings(k)
            .into_iter()
            .filter(|s| s.arrows().iter().all(|&(t, h)| t < h))
            .map(|s| gauss_word_of(&s))
            .collect()
    }

    fn all_bipartitions(k: usize) -> Vec<Bipartition> {
        let mut v: Vec<Bipartition> = (0..1u32 << k)
            .map(|mask| Bipartition::from_membership(&(0..k).map(|i| mask >> i & 1 == 1).collect::<Vec<_>>()))
            .collect();
        v.sort();
        v.dedup();
        v
    }

    fn concat(parts: &[&GaussWord]) -> GaussWord {
        let mut letters = Vec::new();
        let mut off = 0;
        for w in parts {
            letters.extend(w.letters().iter().map(|l| l + off));
            off += w.alphabet_size();
        }
        GaussWord::from_letters(letters).unwrap()
    }

    #[test]
    fn concatenations_count_factors() {
        let irr: Vec<GaussWord> = (1..5).flat_map(words).filter(|w| irreducible(w) && realizable(w)).collect();
        assert!(irr.len() >= 3, "{}", irr.len());
        for a in &irr {
            for b in &irr {
                let w = concat(&[a, b]);
                assert_eq!(compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap().len(), 2, "{w}");
                for c in irr.iter().take(3) {
                    let w = concat(&[a, b, c]);
                    assert_eq!(compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap().len(), 4, "{w}");
                }
            }
        }
    }

    #[test]
    fn propagation_matches_brute_force() {
        for k in 0..6 {
            for w in words(k) {
                let fast = compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap();
                let slow: Vec<Bipartition> =
                    all_bipartitions(k).into_iter().filter(|b| compatible(&w, b).unwrap()).collect();
                assert_eq!(fast, slow, "{w}");
                if !slow.is_empty() {
                    let (_, c) = InterlacementData::of(&w).components();
                    assert_eq!(slow.len(), 1 << c.saturating_sub(1));
                }
                if irreducible(&w) {
                    assert_eq!(InterlacementData::of(&w).components().1, 1);
                    assert!(slow.len() <= 1);
                }
            }
        }
    }

    #[test]
    fn realizability_matches_genus() {
        for k in 0..6 {
            for w in words(k) {
                if !condition_i(&w) {
                    continue;
                }
                let mut any = false;
                for b in all_bipartitions(k) {
                    let s = string_from_word(&w, &b).unwrap();
                    assert_eq!(gauss_word_of(&s).letters(), w.letters());
                    assert_eq!(bipartition_of(&s), b);
                    let flat = genus(&s) == 0;
                    assert_eq!(realizable_on_sphere(&w, &b).unwrap(), flat, "{w} {}", b.render(&w));
                    any |= flat;
                }
                assert_eq!(realizable(&w), any, "{w}");
            }
        }
    }

    #[test]
    fn string_bipartitions_have_two_classes() {
        for s in labeled_strings(3) {
            let b = bipartition_of(&s);
            let (x, y) = b.parts();
            assert_eq!(x.len() + y.len(), 3);
            // q(e,f): heads minus tails on the arc from e's tail (excluded)
            // to f's tail (included)
            let n = s.n_slots();
            let q = |e: usize, f: usize| -> i64 {
                let (a, _) = s.arrows()[e];
                let (c, _) = s.arrows()[f];
                if e == f {
                    return 0;
                }
                let mut v = 0;
                let mut x = a;
                while x != c {
                    x = (x + 1) % n;
                    v += if s.slot(x).head { 1 } else { -1 };
                }
                v
            };
            for e in 0..3 {
                for f in 0..3 {
                    assert_eq!(q(e, f).rem_euclid(2) == 0, b.same_part(e, f));
                    assert_eq!(q(e, f) + q(f, e), 0);
                    for g in 0..3 {
                        assert_eq!(q(e, f) + q(f, g) + q(g, e), 0);
                    }
                }
            }
        }
    }

    #[test]
    fn homeomorphism_of_sphere_curves() {
        let w = word("1122");
        let bs = compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap();
        assert!(sphere_curves_homeomorphic((&w, &bs[0]), (&w, &bs[0])).unwrap());
        assert!(!sphere_curves_homeomorphic((&w, &bs[0]), (&w, &bs[1])).unwrap());
        let rotated = word("2211");
        let b = Bipartition::parse("1|2", &rotated).unwrap();
        let b0 = Bipartition::parse("1|2", &w).unwrap();
        assert!(sphere_curves_homeomorphic((&w, &b0), (&rotated, &b)).unwrap());
        let bad = word("1212");
        assert!(sphere_curves_homeomorphic((&bad, &Bipartition::from_membership(&[false, false])), (&w, &b0)).is_err());
        // irreducible words: the word decides
        let mut seen = BTreeSet::new();
        for w in words(4) {
            if irreducible(&w) && realizable(&w) {
                let b = &compatible_bipartitions(&w, BIPARTITION_LIMIT).unwrap()[0];
                let r = w.rotate(3);
                let rb = &compatible_bipartitions(&r, BIPARTITION_LIMIT).unwrap()[0];
                assert!(sphere_curves_homeomorphic((&w, b), (&r, rb)).unwrap());
                seen.insert(w.to_string());
            }
        }
        assert!(!seen.is_empty());
    }
}
