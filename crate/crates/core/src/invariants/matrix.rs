use std::fmt;

use super::rank::rank;
use super::upoly::UPolynomial;
use crate::error::{Error, Result};

/// Default bound on `#G` for the genus `σ`.
pub const SIGMA_LIMIT: usize = 13;

/// A based skew-symmetric matrix `(G, s, b)` with `s` at index 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasedMatrix {
    b: Vec<Vec<i64>>,
}

/// One elementary reduction available on a based matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reduction {
    Annihilating(usize),
    Core(usize),
    Complementary(usize, usize),
}

impl Reduction {
    fn removed(&self) -> Vec<usize> {
        match *self {
            Reduction::Annihilating(g) | Reduction::Core(g) => vec![g],
            Reduction::Complementary(g, h) => vec![g, h],
        }
    }
}

/// Canonical form of a based matrix up to isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatrixKey {
    size: usize,
    seq: Vec<i64>,
}

impl BasedMatrix {
    pub fn new(b: Vec<Vec<i64>>) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::Invalid("a based matrix contains at least s".into()));
        }
        for (i, row) in b.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid("matrix is not square".into()));
            }
            for j in 0..n {
                if row[j] != -b[j][i] {
                    return Err(Error::Invalid(format!("not skew-symmetric at ({i},{j})")));
                }
            }
        }
        Ok(BasedMatrix { b })
    }

    pub fn trivial() -> Self {
        BasedMatrix { b: vec![vec![0]] }
    }

    /// `#G`, counting the basepoint.
    pub fn size(&self) -> usize {
        self.b.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.size() == 1
    }

    pub fn get(&self, g: usize, h: usize) -> i64 {
        self.b[g][h]
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn rank(&self) -> usize {
        rank(&self.b)
    }

    /// `u_T = Σ sign(b(e,s)) t^|b(e,s)|`.
    pub fn u_polynomial(&self) -> UPolynomial {
        UPolynomial::from_terms(
            (1..self.size()).map(|e| self.b[e][0]).filter(|&k| k != 0).map(|k| (k.unsigned_abs() as u32, k.signum())),
        )
    }

    /// `#{g : b(g,s) = k}`.
    pub fn v_k(&self, k: i64) -> usize {
        (0..self.size()).filter(|&g| self.b[g][0] == k).count()
    }

    /// `#{g : b(g,s) = k and the multiset {b(g,h)}_{h≠s} equals a}`.
    pub fn v_k_a(&self, k: i64, a: &[i64]) -> usize {
        let mut want = a.to_vec();
        want.sort_unstable();
        (0..self.size()).filter(|&g| self.b[g][0] == k && self.row_multiset(g) == want).count()
    }

    fn row_multiset(&self, g: usize) -> Vec<i64> {
        let mut r: Vec<i64> = self.b[g][1..].to_vec();
        r.sort_unstable();
        r
    }

    pub fn negate(&self) -> Self {
        BasedMatrix { b: self.b.iter().map(|r| r.iter().map(|&x| -x).collect()).collect() }
    }

    /// `T⁻`: `b⁻(s,h) = -b(s,h)` and `b⁻(g,h) = b(g,h) + b(s,g) - b(s,h)`.
    pub fn minus(&self) -> Self {
        let n = self.size();
        let mut b = vec![vec![0; n]; n];
        for g in 0..n {
            for h in 0..n {
                b[g][h] = if g == 0 || h == 0 {
                    -self.b[g][h]
                } else if g == h {
                    0
                } else {
                    self.b[g][h] + self.b[0][g] - self.b[0][h]
                };
            }
        }
        BasedMatrix { b }
    }

    /// Glues the two basepoints; elements of different summands pair to 0.
    pub fn direct_sum(&self, other: &BasedMatrix) -> Self {
        let n1 = self.size();
        let n = n1 + other.size() - 1;
        let mut b = vec![vec![0; n]; n];
        let idx2 = |g: usize| if g == 0 { 0 } else { g + n1 - 1 };
        for g in 0..n1 {
            for h in 0..n1 {
                b[g][h] = self.b[g][h];
            }
        }
        for g in 0..other.size() {
            for h in 0..other.size() {
                if g == 0 && h == 0 {
                    continue;
                }
                b[idx2(g)][idx2(h)] = other.b[g][h];
            }
        }
        BasedMatrix { b }
    }

    /// Relabels non-basepoint elements: new element `i` is old `perm[i]`,
    /// with `perm[0] = 0`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm[0], 0);
        let b = perm.iter().map(|&g| perm.iter().map(|&h| self.b[g][h]).collect()).collect();
        BasedMatrix { b }
    }

    pub fn remove(&self, gone: &[usize]) -> Self {
        let keep: Vec<usize> = (0..self.size()).filter(|g| !gone.contains(g)).collect();
        let b = keep.iter().map(|&g| keep.iter().map(|&h| self.b[g][h]).collect()).collect();
        BasedMatrix { b }
    }

    /// Adds an annihilating element.
    pub fn extend_m1(&self) -> Self {
        self.extend_with(&vec![0; self.size()])
    }

    /// Adds a core element.
    pub fn extend_m2(&self) -> Self {
        let row = self.b[0].clone();
        self.extend_with(&row)
    }

    /// Adds a complementary pair `g1, g2` with `b(g1,h) = x[h]` for the old
    /// elements `h` (including `s`).
    pub fn extend_m3(&self, x: &[i64]) -> Self {
        assert_eq!(x.len(), self.size());
        let n = self.size();
        let t = self.extend_with(x);
        let row2: Vec<i64> = (0..n).map(|h| self.b[0][h] - x[h]).collect();
        let mut b = t.b;
        for row in b.iter_mut() {
            row.push(0);
        }
        b.push(vec![0; n + 2]);
        for h in 0..n {
            b[n + 1][h] = row2[h];
            b[h][n + 1] = -row2[h];
        }
        b[n][n + 1] = x[0];
        b[n + 1][n] = -x[0];
        BasedMatrix { b }
    }

    fn extend_with(&self, row: &[i64]) -> Self {
        let mut b = self.b.clone();
        for (h, r) in b.iter_mut().enumerate() {
            r.push(-row[h]);
        }
        let mut last = row.to_vec();
        last.push(0);
        b.push(last);
        BasedMatrix { b }
    }

    /// All single reductions currently available.
    pub fn reductions(&self) -> Vec<Reduction> {
        let n = self.size();
        let mut out = Vec::new();
        for g in 1..n {
            if self.b[g].iter().all(|&x| x == 0) {
                out.push(Reduction::Annihilating(g));
            } else if self.b[g] == self.b[0] {
                out.push(Reduction::Core(g));
            }
        }
        for g in 1..n {
            for h in g + 1..n {
                if (0..n).all(|k| self.b[g][k] + self.b[h][k] == self.b[0][k]) {
                    out.push(Reduction::Complementary(g, h));
                }
            }
        }
        out
    }

    pub fn apply_reduction(&self, r: Reduction) -> Self {
        self.remove(&r.removed())
    }

    pub fn is_primitive(&self) -> bool {
        self.reductions().is_empty()
    }

    /// Removes annihilating elements, core elements and complementary pairs
    /// until none remain.
    pub fn primitive_reduce(&self) -> Self {
        self.primitive_reduce_by(|_| 0)
    }

    /// Same as [`primitive_reduce`](Self::primitive_reduce) with the removal
    /// chosen by `pick` among the available ones.
    pub fn primitive_reduce_by(&self, mut pick: impl FnMut(&[Reduction]) -> usize) -> Self {
        let mut t = self.clone();
        loop {
            let rs = t.reductions();
            if rs.is_empty() {
                return t;
            }
            let i = pick(&rs).min(rs.len() - 1);
            t = t.apply_reduction(rs[i]);
        }
    }

    /// Canonical form: the lexicographically least description over all
    /// orderings of `G - {s}`. Element `k` contributes its signature
    /// `(b(g,s), sorted row)` followed by its pairings with elements placed
    /// before it.
    pub fn canonical_key(&self) -> MatrixKey {
        let n = self.size();
        let sig: Vec<Vec<i64>> = (0..n)
            .map(|g| {
                let mut v = vec![self.b[g][0]];
                let mut r = self.b[g].clone();
                r.sort_unstable();
                v.extend(r);
                v
            })
            .collect();
        let mut search = KeySearch { t: self, sig: &sig, best: None, cur: Vec::new(), order: vec![0] };
        let mut used = vec![false; n];
        used[0] = true;
        search.run(&mut used);
        MatrixKey { size: n, seq: search.best.unwrap_or_default() }
    }

    pub fn isomorphic(&self, other: &BasedMatrix) -> bool {
        self.size() == other.size() && self.canonical_key() == other.canonical_key()
    }

    /// Partitions of `G` into blocks of size at most 2 with `{s}` a block;
    /// `σ` is half the least rank of the block matrices.
    pub fn sigma(&self, limit: usize) -> Result<usize> {
        let n = self.size();
        if n > limit {
            return Err(Error::LimitExceeded { what: format!("based matrix of size {n}"), limit });
        }
        let mut best = self.rank() / 2;
        let mut blocks: Vec<Vec<usize>> = vec![vec![0]];
        let mut used = vec![false; n];
        used[0] = true;
        self.sigma_rec(&mut used, &mut blocks, &mut best);
        Ok(best)
    }

    fn sigma_rec(&self, used: &mut [bool], blocks: &mut Vec<Vec<usize>>, best: &mut usize) {
        if *best == 0 {
            return;
        }
        let Some(i) = used.iter().position(|u| !u) else {
            let k = blocks.len();
            let m: Vec<Vec<i64>> = (0..k)
                .map(|x| {
                    (0..k).map(|y| blocks[x].iter().flat_map(|&g| blocks[y].iter().map(move |&h| (g, h))).map(|(g, h)| self.b[g][h]).sum()).collect()
                })
                .collect();
            let s = rank(&m) / 2;
            if s < *best {
                *best = s;
            }
            return;
        };
        used[i] = true;
        blocks.push(vec![i]);
        self.sigma_rec(used, blocks, best);
        blocks.pop();
        for j in i + 1..used.len() {
            if !used[j] {
                used[j] = true;
                blocks.push(vec![i, j]);
                self.sigma_rec(used, blocks, best);
                blocks.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }

    pub fn is_hyperbolic(&self, limit: usize) -> Result<bool> {
        Ok(self.sigma(limit)? == 0)
    }
}

struct KeySearch<'a> {
    t: &'a BasedMatrix,
    sig: &'a [Vec<i64>],
    best: Option<Vec<i64>>,
    cur: Vec<i64>,
    order: Vec<usize>,
}

impl KeySearch<'_> {
    fn entry(&self, g: usize) -> Vec<i64> {
        let mut v = self.sig[g].clone();
        v.extend(self.order[1..].iter().map(|&h| self.t.b[g][h]));
        v
    }

    fn run(&mut self, used: &mut [bool]) {
        let n = used.len();
        if self.order.len() == n {
            if self.best.as_ref().map_or(true, |b| self.cur < *b) {
                self.best = Some(self.cur.clone());
            }
            return;
        }
        let mut cands: Vec<(Vec<i64>, usize)> = (0..n).filter(|&g| !used[g]).map(|g| (self.entry(g), g)).collect();
        cands.sort();
        let least = cands[0].0.clone();
        let mut tried: Vec<usize> = Vec::new();
        for (e, g) in cands {
            if e != least {
                break;
            }
            // swapping twins is an automorphism, so one of them suffices
            if tried.iter().any(|&h| self.twins(g, h)) {
                continue;
            }
            tried.push(g);
            let len = self.cur.len();
            self.cur.extend_from_slice(&e);
            if let Some(b) = &self.best {
                let k = self.cur.len().min(b.len());
                if self.cur[..k] > b[..k] {
                    self.cur.truncate(len);
                    continue;
                }
            }
            used[g] = true;
            self.order.push(g);
            self.run(used);
            self.order.pop();
            used[g] = false;
            self.cur.truncate(len);
        }
    }

    fn twins(&self, g: usize, h: usize) -> bool {
        let b = &self.t.b;
        b[g][h] == 0 && (0..b.len()).all(|x| x == g || x == h || b[g][x] == b[h][x])
    }
}

impl fmt::Display for BasedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.b.iter().flatten().map(|x| x.to_string().len()).max().unwrap_or(1);
        for (i, row) in self.b.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>w$}")).collect();
            write!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> BasedMatrix {
        BasedMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rejects_non_skew() {
        assert!(BasedMatrix::new(vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(BasedMatrix::new(vec![]).is_err());
    }

    #[test]
    fn minus_and_negate_are_commuting_involutions() {
        let t = m(&[&[0, -2, 0, -1, 3], &[2, 0, 1, 0, 3], &[0, -1, 0, 0, 2], &[1, 0, 0, 0, 1], &[-3, -3, -2, -1, 0]]);
        assert_eq!(t.minus().minus(), t);
        assert_eq!(t.negate().minus(), t.minus().negate());
        assert!(BasedMatrix::new(t.minus().rows().to_vec()).is_ok());
    }

    #[test]
    fn extensions_reduce_back() {
        let t = m(&[&[0, -2, 0, -1, 3], &[2, 0, 1, 0, 3], &[0, -1, 0, 0, 2], &[1, 0, 0, 0, 1], &[-3, -3, -2, -1, 0]]);
        assert!(t.is_primitive());
        let big = t.extend_m1().extend_m2().extend_m3(&[1, 2, -1, 0, 4, 0, 5]);
        assert_eq!(big.size(), 9);
        assert!(BasedMatrix::new(big.rows().to_vec()).is_ok());
        assert!(big.primitive_reduce().isomorphic(&t));
    }

    #[test]
    fn isomorphism_ignores_order() {
        let t = m(&[&[0, -1, 1, -1, 1], &[1, 0, 1, -1, 1], &[-1, -1, 0, -1, 1], &[1, 1, 1, 0, 1], &[-1, -1, -1, -1, 0]]);
        let p = t.permute(&[0, 3, 1, 4, 2]);
        assert!(t.isomorphic(&p));
        assert!(BasedMatrix::trivial().isomorphic(&BasedMatrix::trivial()));
    }

    #[test]
    fn sum_with_negative_is_hyperbolic() {
        let t = m(&[&[0, -1, 1, -1, 1], &[1, 0, 1, -1, 1], &[-1, -1, 0, -1, 1], &[1, 1, 1, 0, 1], &[-1, -1, -1, -1, 0]]);
        let h = t.direct_sum(&t.negate());
        assert_eq!(h.size(), 9);
        assert!(h.is_hyperbolic(SIGMA_LIMIT).unwrap());
        assert!(t.is_hyperbolic(SIGMA_LIMIT).unwrap());
        assert!(!m(&[&[0, -1], &[1, 0]]).is_hyperbolic(SIGMA_LIMIT).unwrap());
        assert!(BasedMatrix::trivial().is_hyperbolic(SIGMA_LIMIT).unwrap());
    }

    #[test]
    fn sigma_limit() {
        let t = BasedMatrix::trivial();
        let mut big = t.clone();
        for _ in 0..14 {
            big = big.extend_m1();
        }
        assert!(big.sigma(SIGMA_LIMIT).unwrap_err().is_limit());
    }
}
