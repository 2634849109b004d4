//! The weight η on oriented forests, labelings of arrow diagrams, the
//! polynomial ∇ of an arrow diagram, surgery along unlinked arrows and ζ.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::homotopy::Normalizer;
use crate::model::{ArrowDiagram, CanonicalCode, VirtualString};

/// Largest arrow diagram accepted by [`nabla`] and [`zeta`] by default.
pub const SKEIN_LIMIT: usize = 8;

/// Finite oriented graph whose underlying graph is a forest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrientedForest {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl OrientedForest {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut uf: Vec<usize> = (0..vertices).collect();
        fn root(uf: &mut [usize], mut x: usize) -> usize {
            while uf[x] != x {
                uf[x] = uf[uf[x]];
                x = uf[x];
            }
            x
        }
        for &(a, b) in &edges {
            if a >= vertices || b >= vertices {
                return Err(Error::Invalid(format!("edge ({a},{b}) leaves the {vertices} vertices")));
            }
            let (ra, rb) = (root(&mut uf, a), root(&mut uf, b));
            if ra == rb {
                return Err(Error::Invalid("the underlying graph has a cycle".into()));
            }
            uf[ra] = rb;
        }
        Ok(OrientedForest { vertices, edges })
    }

    pub fn point() -> Self {
        OrientedForest { vertices: 1, edges: Vec::new() }
    }

    /// Edge list such as `a>b b>c d`; a bare name adds an isolated vertex.
    pub fn parse(text: &str) -> Result<Self> {
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut id = |name: &str| -> Result<usize> {
            if name.is_empty() {
                return Err(Error::Parse("empty vertex name".into()));
            }
            let n = names.len();
            Ok(*names.entry(name.to_string()).or_insert(n))
        };
        let mut edges = Vec::new();
        for tok in text.split_whitespace() {
            match tok.split_once('>') {
                Some((a, b)) => {
                    let (a, b) = (id(a)?, id(b)?);
                    if a == b {
                        return Err(Error::Parse(format!("loop at {tok}")));
                    }
                    edges.push((a, b));
                }
                None => {
                    id(tok)?;
                }
            }
        }
        if names.is_empty() {
            return Err(Error::Parse("no vertices".into()));
        }
        OrientedForest::new(names.len(), edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn component_count(&self) -> usize {
        self.vertices - self.edges.len()
    }

    pub fn is_tree(&self) -> bool {
        self.vertices > 0 && self.component_count() == 1
    }

    /// `#C_n`: surjections onto `1..=n` that increase along every edge.
    pub fn count_increasing_surjections(&self, n: usize) -> BigInt {
        let v = self.vertices;
        if n == 0 || n > v {
            return BigInt::from(u8::from(n == 0 && v == 0));
        }
        assert!(v < 28, "forest too large to count");
        let mut preds = vec![0u32; v];
        for &(a, b) in &self.edges {
            preds[b] |= 1 << a;
        }
        let full = (1u32 << v) - 1;
        // ways[mask]: number of ways to fill the first k layers using exactly `mask`
        let mut ways: HashMap<u32, BigInt> = HashMap::from([(0, BigInt::one())]);
        for _ in 0..n {
            let mut next: HashMap<u32, BigInt> = HashMap::new();
            for (&done, c) in &ways {
                // vertices whose predecessors all sit in earlier layers
                let ready = (0..v)
                    .filter(|&x| done & (1 << x) == 0 && preds[x] & !done == 0)
                    .fold(0u32, |m, x| m | (1 << x));
                let mut layer = ready;
                while layer != 0 {
                    *next.entry(done | layer).or_insert_with(BigInt::zero) += c;
                    layer = (layer - 1) & ready;
                }
            }
            ways = next;
        }
        ways.remove(&full).unwrap_or_else(BigInt::zero)
    }
}

/// `η(F) = Σ_n (-1)^(n+1)/n · #C_n(F)`.
pub fn eta(f: &OrientedForest) -> BigRational {
    (1..=f.vertex_count())
        .map(|n| {
            let sign = if n % 2 == 1 { 1 } else { -1 };
            BigRational::new(BigInt::from(sign) * f.count_increasing_surjections(n), BigInt::from(n))
        })
        .sum()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

/// Edges of a diagram on `N` slots: edge `i` runs from slot `i` to slot
/// `i+1`, so slot `x` has incoming edge `x-1` and outgoing edge `x`. The
/// trivial diagram has a single edge.
fn edge_count(s: &VirtualString) -> usize {
    s.n_slots().max(1)
}

fn incoming(s: &VirtualString, x: usize) -> usize {
    (x + s.n_slots() - 1) % s.n_slots()
}

/// A map from the edges of a diagram to `1..=n` obeying the arrow rule.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Labeling {
    pub labels: Vec<usize>,
    pub cutting: Vec<usize>,
}

impl Labeling {
    pub fn negative_cuts(&self, d: &ArrowDiagram) -> usize {
        self.cutting.iter().filter(|&&e| d.sign(e) < 0).count()
    }

    /// The string keeping arrows whose four adjacent edges carry `label`.
    pub fn piece(&self, d: &ArrowDiagram, label: usize) -> VirtualString {
        let s = d.string();
        s.restrict(|e| {
            let (a, b) = s.arrows()[e];
            [incoming(s, a), a, incoming(s, b), b].iter().all(|&x| self.labels[x] == label)
        })
    }
}

/// Checks the rule for arrow `e`: returns `Some(cutting)` when it holds.
fn arrow_rule(d: &ArrowDiagram, labels: &[usize], e: usize) -> Option<bool> {
    let s = d.string();
    let (a, b) = s.arrows()[e];
    let (am, ap, bm, bp) = (labels[incoming(s, a)], labels[a], labels[incoming(s, b)], labels[b]);
    if am == ap && bm == bp {
        return Some(false);
    }
    let ordered = if d.sign(e) > 0 { am > ap } else { am < ap };
    (ap == bm && am == bp && ordered).then_some(true)
}

/// Every `n`-labeling of `d`, by backtracking over the edges.
pub fn enumerate_labelings(d: &ArrowDiagram, n: usize) -> Vec<Labeling> {
    let s = d.string();
    let k = edge_count(s);
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    // each arrow is checked once its last adjacent edge has a label
    let mut due: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (e, &(a, b)) in s.arrows().iter().enumerate() {
        let last = [incoming(s, a), a, incoming(s, b), b].into_iter().max().expect("four edges");
        due[last].push(e);
    }
    let mut labels = vec![0; k];
    fn go(d: &ArrowDiagram, n: usize, due: &[Vec<usize>], labels: &mut Vec<usize>, i: usize, out: &mut Vec<Labeling>) {
        if i == labels.len() {
            let cutting = (0..d.rank()).filter(|&e| arrow_rule(d, labels, e) == Some(true)).collect();
            out.push(Labeling { labels: labels.clone(), cutting });
            return;
        }
        for l in 1..=n {
            labels[i] = l;
            if due[i].iter().all(|&e| arrow_rule(d, labels, e).is_some()) {
                go(d, n, due, labels, i + 1, out);
            }
        }
        labels[i] = 0;
    }
    go(d, n, &due, &mut labels, 0, &mut out);
    out
}

fn pairwise_unlinked(s: &VirtualString, set: &[usize]) -> bool {
    set.iter().enumerate().all(|(i, &e)| set[i + 1..].iter().all(|&f| !s.linked(e, f)))
}

/// `lbl_n(D)`: surjective labelings with `n-1` pairwise unlinked cutting
/// arrows.
pub fn lbl(d: &ArrowDiagram, n: usize) -> Vec<Labeling> {
    enumerate_labelings(d, n)
        .into_iter()
        .filter(|f| {
            let mut seen = vec![false; n + 1];
            f.labels.iter().for_each(|&l| seen[l] = true);
            seen[1..].iter().all(|&x| x) && f.cutting.len() + 1 == n && pairwise_unlinked(d.string(), &f.cutting)
        })
        .collect()
}

/// Sets of pairwise unlinked arrows, the empty set first.
pub fn special_subsets(s: &VirtualString) -> Vec<Vec<usize>> {
    let m = s.rank();
    let mut out = vec![Vec::new()];
    for e in 0..m {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|set| set.iter().all(|&f| !s.linked(e, f)))
            .map(|set| {
                let mut t = set.clone();
                t.push(e);
                t
            })
            .collect();
        out.extend(grown);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Region of every edge after surgery along all arrows of `set`, and the
/// number of regions.
fn regions(s: &VirtualString, set: &[usize]) -> (Vec<usize>, usize) {
    let k = edge_count(s);
    let n = s.n_slots();
    let mut cut = vec![false; n];
    for &e in set {
        let (a, b) = s.arrows()[e];
        cut[a] = true;
        cut[b] = true;
    }
    let mut region = vec![usize::MAX; k];
    let mut count = 0;
    for start in 0..k {
        if region[start] != usize::MAX {
            continue;
        }
        let mut edge = start;
        while region[edge] == usize::MAX {
            region[edge] = count;
            if n == 0 {
                break;
            }
            let x = (edge + 1) % n;
            edge = if cut[x] { s.partner(x) } else { x };
        }
        count += 1;
    }
    (region, count)
}

/// `(α¹, α²)`: the strings on the two circles left by surgery along `e`,
/// first the one through the arc leaving the tail.
pub fn surgery(s: &VirtualString, e: usize) -> Result<(VirtualString, VirtualString)> {
    let (a, b) = s.arrow(e)?;
    let inside = |x: usize, y: usize| {
        move |f: usize| {
            let (c, d) = s.arrows()[f];
            s.in_interior(x, y, c) && s.in_interior(x, y, d)
        }
    };
    Ok((s.restrict(inside(a, b)), s.restrict(inside(b, a))))
}

/// The graph `Γ_F` and the strings `D^F_1, ..., D^F_n` left by surgery
/// along every arrow of `set`. Vertex `i` is the circle carrying string `i`;
/// each arrow `(a,b)` of `set` gives an edge from the circle through the arc
/// leaving `a` to the circle through the arc leaving `b`.
pub fn surgery_tree(s: &VirtualString, set: &[usize]) -> Result<(OrientedForest, Vec<VirtualString>)> {
    for &e in set {
        s.arrow(e)?;
    }
    if !pairwise_unlinked(s, set) {
        return Err(Error::Precondition("surgery arrows must be pairwise unlinked".into()));
    }
    let (region, count) = regions(s, set);
    let mut edges = Vec::with_capacity(set.len());
    for &e in set {
        let (a, b) = s.arrows()[e];
        edges.push((region[a], region[b]));
    }
    let n = s.n_slots();
    let in_set = |e: usize| set.contains(&e);
    let mut pieces = Vec::with_capacity(count);
    for r in 0..count {
        // walk the new circle, collecting the endpoints of surviving arrows
        let start = region.iter().position(|&x| x == r).expect("region has an edge");
        let mut seq = Vec::new();
        let mut edge = start;
        loop {
            if n == 0 {
                break;
            }
            let x = (edge + 1) % n;
            let ep = s.slot(x);
            if in_set(ep.arrow) {
                edge = s.partner(x);
            } else {
                let other = s.partner(x);
                if region[other] == r {
                    seq.push((ep.arrow, ep.head));
                }
                edge = x;
            }
            if edge == start {
                break;
            }
        }
        pieces.push(VirtualString::from_sequence(&seq)?);
    }
    let tree = OrientedForest::new(count, edges)?;
    if !tree.is_tree() {
        return Err(Error::Invalid("surgery graph is not a tree".into()));
    }
    Ok((tree, pieces))
}

/// `(D⁻_e, D'_e, D''_e)` for a positive arrow `e = (a,b)`.
pub fn diagram_variants(d: &ArrowDiagram, e: usize) -> Result<(ArrowDiagram, ArrowDiagram, ArrowDiagram)> {
    let s = d.string();
    let (a, b) = s.arrow(e)?;
    if d.sign(e) < 0 {
        return Err(Error::Precondition(format!("arrow {e} is negative")));
    }
    let on_closed = |x: usize, y: usize, p: usize| p == x || p == y || s.in_interior(x, y, p);
    let avoids = |x: usize, y: usize| {
        move |f: usize| {
            let (c, d) = s.arrows()[f];
            !on_closed(x, y, c) && !on_closed(x, y, d)
        }
    };
    Ok((d.with_sign(e, -1), d.restrict(avoids(b, a)), d.restrict(avoids(a, b))))
}

/// Polynomial in `z` whose monomials are products of classes, each class
/// named by a canonical code. A monomial is stored as its sorted factors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StringClassPolynomial {
    terms: BTreeMap<(u32, Vec<CanonicalCode>), BigRational>,
}

impl StringClassPolynomial {
    pub fn one() -> Self {
        let mut p = StringClassPolynomial::default();
        p.add(0, Vec::new(), BigRational::one());
        p
    }

    pub fn add(&mut self, z: u32, mut factors: Vec<CanonicalCode>, c: BigRational) {
        factors.sort();
        let k = (z, factors);
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None if !c.is_zero() => {
                self.terms.insert(k, c);
            }
            None => {}
        }
    }

    pub fn add_poly(&mut self, other: &StringClassPolynomial, scale: &BigRational) {
        for ((z, f), c) in &other.terms {
            self.add(*z, f.clone(), c * scale);
        }
    }

    pub fn mul(&self, other: &StringClassPolynomial) -> StringClassPolynomial {
        let mut out = StringClassPolynomial::default();
        for ((z1, f1), c1) in &self.terms {
            for ((z2, f2), c2) in &other.terms {
                let mut f = f1.clone();
                f.extend(f2.iter().cloned());
                out.add(z1 + z2, f, c1 * c2);
            }
        }
        out
    }

    /// Multiplies by `z^k`.
    pub fn shift(&self, k: u32) -> StringClassPolynomial {
        let mut out = StringClassPolynomial::default();
        for ((z, f), c) in &self.terms {
            out.add(z + k, f.clone(), c.clone());
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &[CanonicalCode], &BigRational)> {
        self.terms.iter().map(|((z, f), c)| (*z, f.as_slice(), c))
    }

    pub fn coeff(&self, z: u32, factors: &[CanonicalCode]) -> BigRational {
        let mut f = factors.to_vec();
        f.sort();
        self.terms.get(&(z, f)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|((z, f), c)| {
                    serde_json::json!({
                        "coefficient": c.to_string(),
                        "z": z,
                        "factors": f.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for StringClassPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, ((z, fs), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            write!(f, "{sign}{}", c.abs())?;
            match z {
                0 => {}
                1 => write!(f, " z")?,
                _ => write!(f, " z^{z}")?,
            }
            for x in fs {
                write!(f, " <{x}>")?;
            }
        }
        Ok(())
    }
}

fn check_limit(rank: usize, limit: usize) -> Result<()> {
    if rank > limit {
        return Err(Error::LimitExceeded { what: format!("diagram rank {rank}"), limit });
    }
    Ok(())
}

/// `∇([D]) = Σ_n Σ_{f ∈ lbl_n(D)} (-1)^{|f|₋} z^{n-1}/n! Π_i ⟨D_{f,i}⟩`.
///
/// A labeling in `lbl_n` is fixed by its cutting arrows, a pairwise
/// unlinked set `F`, together with a numbering of the `#F+1` regions of the
/// surgery along `F` that grows along every edge of `Γ_F` (reversed for
/// negative arrows). So the sum runs over special subsets, weighted by the
/// number of such numberings. Classes are compared through `nz`; a
/// monomial with a trivial factor vanishes.
pub fn nabla(d: &ArrowDiagram, nz: &Normalizer, limit: usize) -> Result<StringClassPolynomial> {
    check_limit(d.rank(), limit)?;
    let s = d.string();
    let mut out = StringClassPolynomial::default();
    'subsets: for set in special_subsets(s) {
        let (region, count) = regions(s, &set);
        debug_assert_eq!(count, set.len() + 1);
        let edges = set
            .iter()
            .map(|&e| {
                let (a, b) = s.arrows()[e];
                if d.sign(e) > 0 { (region[a], region[b]) } else { (region[b], region[a]) }
            })
            .collect();
        let order = OrientedForest::new(count, edges)?;
        let ways = order.count_increasing_surjections(count);
        if ways.is_zero() {
            continue;
        }
        let mut factors = Vec::with_capacity(count);
        for r in 0..count {
            let piece = s.restrict(|e| {
                let (a, b) = s.arrows()[e];
                !set.contains(&e) && region[a] == r && region[b] == r
            });
            match nz.class_key(&piece) {
                Some(k) => factors.push(k),
                None => continue 'subsets,
            }
        }
        let neg = set.iter().filter(|&&e| d.sign(e) < 0).count();
        let sign = if neg % 2 == 0 { 1 } else { -1 };
        out.add(set.len() as u32, factors, BigRational::new(BigInt::from(sign) * ways, factorial(count)));
    }
    Ok(out)
}

/// `ζ(α) = Σ_F η(Γ_F) z^{#F} Π_i [D^F_i]` over special subsets `F`, with
/// every arrow of the pieces signed `+`. Monomials are keyed by the
/// canonical codes of the pieces; trivial pieces are the unit and are
/// left out of the key.
pub fn zeta(s: &VirtualString, limit: usize) -> Result<StringClassPolynomial> {
    check_limit(s.rank(), limit)?;
    let mut out = StringClassPolynomial::default();
    for set in special_subsets(s) {
        let (tree, pieces) = surgery_tree(s, &set)?;
        let factors = pieces
            .into_iter()
            .filter(|p| !p.is_trivial())
            .map(|p| ArrowDiagram::positive(p).code())
            .collect();
        out.add(set.len() as u32, factors, eta(&tree));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homotopy::{apply_diagram_move, diagram_moves};
    use crate::model::labeled_strings;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn naive_count(f: &OrientedForest, n: usize) -> BigInt {
        let v = f.vertex_count();
        let mut count = 0u64;
        let mut map = vec![0usize; v];
        let total = n.pow(v as u32);
        for mut code in 0..total {
            for x in map.iter_mut() {
                *x = code % n;
                code /= n;
            }
            let onto = (0..n).all(|l| map.contains(&l));
            if onto && f.edges().iter().all(|&(a, b)| map[a] < map[b]) {
                count += 1;
            }
        }
        BigInt::from(count)
    }

    /// Every oriented forest on `v` labeled vertices.
    fn forests(v: usize) -> Vec<OrientedForest> {
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        let mut out = Vec::new();
        for mask in 0u32..(1 << pairs.len()) {
            let chosen: Vec<(usize, usize)> =
                pairs.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &p)| p).collect();
            if chosen.len() >= v.max(1) {
                continue;
            }
            for dirs in 0u32..(1 << chosen.len()) {
                let edges = chosen
                    .iter()
                    .enumerate()
                    .map(|(i, &(a, b))| if dirs & (1 << i) != 0 { (b, a) } else { (a, b) })
                    .collect();
                if let Ok(f) = OrientedForest::new(v, edges) {
                    out.push(f);
                }
            }
        }
        out
    }

    fn trees(v: usize) -> Vec<OrientedForest> {
        forests(v).into_iter().filter(|f| f.is_tree()).collect()
    }

    /// Identifies vertex `b` with `a` and renumbers, dropping edge `skip`.
    fn merge(f: &OrientedForest, a: usize, b: usize, skip: &[usize]) -> OrientedForest {
        let rename = |x: usize| {
            let x = if x == b { a } else { x };
            if x > b { x - 1 } else { x }
        };
        let edges = f
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip.contains(i))
            .map(|(_, &(x, y))| (rename(x), rename(y)))
            .collect();
        OrientedForest::new(f.vertex_count() - 1, edges).unwrap()
    }

    fn with_edges(f: &OrientedForest, edges: Vec<(usize, usize)>) -> OrientedForest {
        OrientedForest::new(f.vertex_count(), edges).unwrap()
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(&OrientedForest::point()), rat(1, 1));
        assert_eq!(eta(&OrientedForest::parse("a>b").unwrap()), rat(-1, 2));
        assert_eq!(eta(&OrientedForest::parse("a b").unwrap()), rat(0, 1));
        assert_eq!(eta(&OrientedForest::parse("a>b c").unwrap()), rat(0, 1));
        assert_eq!(eta(&OrientedForest::parse("a>b a>c").unwrap()), rat(1, 6));
        assert_eq!(eta(&OrientedForest::parse("a>b b>c").unwrap()), rat(1, 3));
        assert!(OrientedForest::parse("a>b b>a").is_err());
        assert!(OrientedForest::parse("").is_err());
    }

    #[test]
    fn counting_matches_naive() {
        for v in 1..=5 {
            for f in forests(v) {
                for n in 1..=v {
                    assert_eq!(f.count_increasing_surjections(n), naive_count(&f, n), "{f:?} n={n}");
                }
                assert!(f.count_increasing_surjections(v + 1).is_zero());
            }
        }
        // a six-vertex sample
        let f = OrientedForest::parse("a>b a>c c>d e>c f").unwrap();
        for n in 1..=6 {
            assert_eq!(f.count_increasing_surjections(n), naive_count(&f, n));
        }
    }

    #[test]
    fn eta_vanishes_on_two_components() {
        for v in 2..=5 {
            for f in forests(v).into_iter().filter(|f| f.component_count() == 2) {
                assert!(eta(&f).is_zero(), "{f:?}");
            }
        }
    }

    #[test]
    fn eta_recurrences() {
        for v in 2..=5 {
            for t in trees(v) {
                let edges = t.edges().to_vec();
                for (i, &(a, b)) in edges.iter().enumerate() {
                    let mut rev = edges.clone();
                    rev[i] = (b, a);
                    let u = merge(&t, a, b, &[i]);
                    assert!((eta(&t) + eta(&with_edges(&t, rev)) + eta(&u)).is_zero());
                }
                for (i, &(a, b)) in edges.iter().enumerate() {
                    for (j, &(a2, c)) in edges.iter().enumerate() {
                        if i == j || a != a2 {
                            continue;
                        }
                        let mut t1 = edges.clone();
                        t1[j] = (b, c);
                        let mut t2 = edges.clone();
                        t2[i] = (c, b);
                        let u = merge(&t, b, c, &[j]);
                        let rhs = eta(&with_edges(&t, t1)) + eta(&with_edges(&t, t2)) + eta(&u);
                        assert_eq!(eta(&t), rhs);
                    }
                }
            }
        }
    }

    fn random_diagram(rng: &mut StdRng, max_rank: usize) -> ArrowDiagram {
        let m = rng.gen_range(0..=max_rank);
        let mut slots: Vec<usize> = (0..2 * m).collect();
        rand::seq::SliceRandom::shuffle(&mut slots[..], rng);
        let s = VirtualString::from_arrows(slots.chunks(2).map(|c| (c[0], c[1])).collect()).unwrap();
        let signs = (0..m).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        ArrowDiagram::new(s, signs).unwrap()
    }

    /// ∇ summed literally over `lbl_n`.
    fn nabla_by_labelings(d: &ArrowDiagram, nz: &Normalizer) -> StringClassPolynomial {
        let mut out = StringClassPolynomial::default();
        for n in 1..=edge_count(d.string()) {
            for f in lbl(d, n) {
                let factors: Option<Vec<CanonicalCode>> = (1..=n).map(|i| nz.class_key(&f.piece(d, i))).collect();
                let Some(factors) = factors else { continue };
                let sign = if f.negative_cuts(d) % 2 == 0 { 1 } else { -1 };
                out.add(n as u32 - 1, factors, BigRational::new(BigInt::from(sign), factorial(n)));
            }
        }
        out
    }

    #[test]
    fn labelings_basics() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..30 {
            let d = random_diagram(&mut rng, 4);
            let one = lbl(&d, 1);
            assert_eq!(one.len(), 1);
            assert!(one[0].labels.iter().all(|&l| l == 1));
            let k = edge_count(d.string());
            assert!(lbl(&d, k + 1).is_empty());
        }
        let d = ArrowDiagram::parse("a+ a'").unwrap();
        for f in enumerate_labelings(&d, 3) {
            for &e in &f.cutting {
                let (a, _) = d.string().arrows()[e];
                assert!(f.labels[incoming(d.string(), a)] > f.labels[a]);
            }
        }
        assert_eq!(lbl(&d, 2).len(), 1);
        assert_eq!(lbl(&d.with_sign(0, -1), 2).len(), 1);
    }

    #[test]
    fn nabla_matches_labeling_sum() {
        let nz = Normalizer::default();
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..40 {
            let d = random_diagram(&mut rng, 4);
            assert_eq!(nabla(&d, &nz, SKEIN_LIMIT).unwrap(), nabla_by_labelings(&d, &nz), "{d}");
        }
    }

    #[test]
    fn nabla_free_term_and_trivial() {
        let nz = Normalizer::default();
        assert!(nabla(&ArrowDiagram::trivial(), &nz, SKEIN_LIMIT).unwrap().is_zero());
        let d = ArrowDiagram::positive(crate::model::lattice_string(1, 2).unwrap()).with_sign(1, -1);
        let n = nabla(&d, &nz, SKEIN_LIMIT).unwrap();
        let k = nz.class_key(d.string()).unwrap();
        assert_eq!(n.coeff(0, &[k]), rat(1, 1));
        assert!(nabla(&ArrowDiagram::trivial(), &nz, 0).is_ok());
        let big = ArrowDiagram::positive(crate::model::lattice_string(5, 4).unwrap());
        assert!(nabla(&big, &nz, SKEIN_LIMIT).unwrap_err().is_limit());
    }

    fn skein_defect(d: &ArrowDiagram, e: usize, nz: &Normalizer) -> StringClassPolynomial {
        let (minus, d1, d2) = diagram_variants(d, e).unwrap();
        let mut out = nabla(d, nz, SKEIN_LIMIT).unwrap();
        out.add_poly(&nabla(&minus, nz, SKEIN_LIMIT).unwrap(), &-BigRational::one());
        let prod = nabla(&d1, nz, SKEIN_LIMIT).unwrap().mul(&nabla(&d2, nz, SKEIN_LIMIT).unwrap()).shift(1);
        out.add_poly(&prod, &-BigRational::one());
        out
    }

    #[test]
    fn skein_identity_exhaustive_rank_three() {
        let nz = Normalizer::default();
        for m in 1..=3 {
            for s in labeled_strings(m) {
                for signs in 0..(1u32 << m) {
                    let sg = (0..m).map(|i| if signs & (1 << i) != 0 { 1 } else { -1 }).collect();
                    let d = ArrowDiagram::new(s.clone(), sg).unwrap();
                    for e in (0..m).filter(|&e| d.sign(e) > 0) {
                        assert!(skein_defect(&d, e, &nz).is_zero(), "{d} at {e}");
                    }
                }
            }
        }
    }

    #[test]
    fn skein_identity_random() {
        let nz = Normalizer::default();
        let mut rng = StdRng::seed_from_u64(9);
        for _ in 0..40 {
            let d = random_diagram(&mut rng, 5);
            for e in (0..d.rank()).filter(|&e| d.sign(e) > 0) {
                assert!(skein_defect(&d, e, &nz).is_zero(), "{d} at {e}");
            }
        }
    }

    #[test]
    fn variants() {
        let d = ArrowDiagram::parse("a+ a'").unwrap();
        let (m, d1, d2) = diagram_variants(&d, 0).unwrap();
        assert_eq!(m.sign(0), -1);
        assert!(d1.string().is_trivial() && d2.string().is_trivial());
        assert!(diagram_variants(&m, 0).is_err());
        let d = ArrowDiagram::parse("a+ b+ b' c- c' a'").unwrap();
        let (_, d1, d2) = diagram_variants(&d, 0).unwrap();
        assert_eq!(d1.rank(), 2);
        assert!(d2.string().is_trivial());
    }

    #[test]
    fn nabla_invariant_under_diagram_moves() {
        let nz = Normalizer::default();
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..30 {
            let mut d = random_diagram(&mut rng, 4);
            let start = nabla(&d, &nz, SKEIN_LIMIT).unwrap();
            for _ in 0..3 {
                let moves: Vec<_> =
                    diagram_moves(&d, d.rank() < 5).into_iter().filter(|m| apply_diagram_move(&d, m).unwrap().rank() <= 5).collect();
                if moves.is_empty() {
                    break;
                }
                let mv = moves[rng.gen_range(0..moves.len())];
                d = apply_diagram_move(&d, &mv).unwrap();
                assert_eq!(nabla(&d, &nz, SKEIN_LIMIT).unwrap(), start, "{} on {d}", mv.mv);
            }
        }
    }

    #[test]
    fn surgery_basics() {
        let s = VirtualString::parse("a a'").unwrap();
        let (x, y) = surgery(&s, 0).unwrap();
        assert!(x.is_trivial() && y.is_trivial());
        let (t, pieces) = surgery_tree(&s, &[]).unwrap();
        assert_eq!((t.vertex_count(), pieces.len()), (1, 1));
        assert_eq!(eta(&t), rat(1, 1));
        let s = VirtualString::parse("a b a' b'").unwrap();
        assert!(surgery_tree(&s, &[0, 1]).is_err());
    }

    #[test]
    fn surgery_trees_up_to_rank_five() {
        for m in 0..=5 {
            let strings = if m <= 4 { labeled_strings(m) } else { labeled_strings(m).into_iter().step_by(7).collect() };
            for s in strings {
                for set in special_subsets(&s) {
                    let (t, pieces) = surgery_tree(&s, &set).unwrap();
                    assert!(t.is_tree());
                    assert_eq!(pieces.len(), set.len() + 1);
                    let total: usize = pieces.iter().map(|p| p.rank()).sum();
                    assert!(total <= s.rank() - set.len());
                    // the circle order of each piece matches restriction on the original circle
                    let (region, _) = regions(&s, &set);
                    for (r, p) in pieces.iter().enumerate() {
                        let direct = s.restrict(|e| {
                            let (a, b) = s.arrows()[e];
                            !set.contains(&e) && region[a] == r && region[b] == r
                        });
                        assert!(p.is_homeomorphic(&direct));
                    }
                    if set.len() == 1 {
                        let (x, y) = surgery(&s, set[0]).unwrap();
                        let (a, b) = s.arrows()[set[0]];
                        assert!(pieces[region[a]].is_homeomorphic(&x));
                        assert!(pieces[region[b]].is_homeomorphic(&y));
                        assert_eq!(t.edges(), &[(region[a], region[b])]);
                    }
                }
            }
        }
    }

    #[test]
    fn zeta_examples() {
        let z = zeta(&VirtualString::trivial(), SKEIN_LIMIT).unwrap();
        assert_eq!(z, StringClassPolynomial::one());
        let s = VirtualString::parse("a a'").unwrap();
        let z = zeta(&s, SKEIN_LIMIT).unwrap();
        assert_eq!(z.len(), 2);
        assert_eq!(z.coeff(0, &[ArrowDiagram::positive(s).code()]), rat(1, 1));
        assert_eq!(z.coeff(1, &[]), rat(-1, 2));
    }

    proptest! {
        #[test]
        fn special_subsets_are_unlinked(seed in any::<u64>()) {
            let mut rng = StdRng::seed_from_u64(seed);
            let d = random_diagram(&mut rng, 6);
            let subsets = special_subsets(d.string());
            prop_assert!(subsets[0].is_empty());
            for set in &subsets {
                prop_assert!(pairwise_unlinked(d.string(), set));
            }
        }

        #[test]
        fn polynomial_product_is_commutative(seed in any::<u64>()) {
            let nz = Normalizer::default();
            let mut rng = StdRng::seed_from_u64(seed);
            let a = nabla(&random_diagram(&mut rng, 4), &nz, SKEIN_LIMIT).unwrap();
            let b = nabla(&random_diagram(&mut rng, 4), &nz, SKEIN_LIMIT).unwrap();
            prop_assert_eq!(a.mul(&b), b.mul(&a));
        }
    }
}
