//! Homotopy moves on virtual strings and arrow diagrams, bounded
//! normalization and enumeration of small strings.

mod diagram;
mod normalize;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{labeled_strings, CanonicalCode, VirtualString};

pub use diagram::{apply_diagram_move, diagram_moves, DiagramMove};
pub use normalize::{homotopic_heuristic, normalize, Budget, Equivalence, NormalizationResult, Normalizer, Status, Step};

/// Largest rank `enumerate_strings` accepts by default.
pub const ENUMERATE_LIMIT: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MoveKind {
    AAdd,
    ARemove,
    BAdd,
    BRemove,
    CForward,
    CBackward,
    CplusForward,
    CplusBackward,
}

/// Where a move acts. Gaps are insertion points: gap `g` sits just before
/// slot `g`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Site {
    /// A new arrow in one gap; `head_first` gives the `(a)⁺` form.
    Curl { gap: usize, head_first: bool },
    Arrow { arrow: usize },
    /// New arrows `e = (a,b)` and `f = (b',a')` with `a, a'` in gap `first`
    /// and `b, b'` in gap `second`. `a_second` puts `a'` before `a`,
    /// `b_second` puts `b'` before `b`.
    Gaps { first: usize, second: usize, a_second: bool, b_second: bool },
    /// `e`'s tail is next to `f`'s head and `e`'s head is next to `f`'s tail.
    Pair { e: usize, f: usize },
    Triple { arrows: [usize; 3] },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MoveInstance {
    pub kind: MoveKind,
    pub site: Site,
}

impl fmt::Display for MoveInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ", self.kind)?;
        match self.site {
            Site::Curl { gap, head_first } => write!(f, "gap {gap}{}", if head_first { " head-first" } else { "" }),
            Site::Arrow { arrow } => write!(f, "arrow {arrow}"),
            Site::Gaps { first, second, a_second, b_second } => {
                write!(f, "gaps {first},{second} forms {},{}", a_second as u8, b_second as u8)
            }
            Site::Pair { e, f: g } => write!(f, "arrows {e},{g}"),
            Site::Triple { arrows: [a, b, c] } => write!(f, "arrows {a},{b},{c}"),
        }
    }
}

/// A moved string together with, for each new arrow, the old arrow it
/// comes from (`None` for added arrows).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moved {
    pub string: VirtualString,
    pub origin: Vec<Option<usize>>,
}

fn next(n: usize, x: usize) -> usize {
    (x + 1) % n
}

fn prev(n: usize, x: usize) -> usize {
    (x + n - 1) % n
}

fn tokens(s: &VirtualString) -> Vec<(usize, bool)> {
    s.slots().iter().map(|ep| (ep.arrow, ep.head)).collect()
}

/// Triples `(e1,e2,e3)` with `tail1 = head3+1`, `tail2 = head1+1`,
/// `tail3 = head2+1`, one per cyclic class.
fn c_forward_sites(s: &VirtualString) -> Vec<[usize; 3]> {
    let n = s.n_slots();
    let follow = |e: usize| {
        let x = next(n, s.arrows()[e].1);
        let ep = s.slot(x);
        (!ep.head).then_some(ep.arrow)
    };
    triples(s.rank(), follow)
}

/// Triples with `head1 = tail2+1`, `head2 = tail3+1`, `head3 = tail1+1`.
fn c_backward_sites(s: &VirtualString) -> Vec<[usize; 3]> {
    let n = s.n_slots();
    let follow = |e: usize| {
        // e = e1, find e2 with tail2 = head1 - 1
        let x = prev(n, s.arrows()[e].1);
        let ep = s.slot(x);
        (!ep.head).then_some(ep.arrow)
    };
    triples(s.rank(), follow)
}

fn triples(m: usize, follow: impl Fn(usize) -> Option<usize>) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for e1 in 0..m {
        let Some(e2) = follow(e1) else { continue };
        let Some(e3) = follow(e2) else { continue };
        if follow(e3) != Some(e1) || e1 == e2 || e2 == e3 || e1 == e3 {
            continue;
        }
        if e1 < e2 && e1 < e3 {
            out.push([e1, e2, e3]);
        }
    }
    out
}

fn is_c_forward(s: &VirtualString, [e1, e2, e3]: [usize; 3]) -> bool {
    let n = s.n_slots();
    let a = s.arrows();
    a[e1].0 == next(n, a[e3].1) && a[e2].0 == next(n, a[e1].1) && a[e3].0 == next(n, a[e2].1)
}

fn is_c_backward(s: &VirtualString, [e1, e2, e3]: [usize; 3]) -> bool {
    let n = s.n_slots();
    let a = s.arrows();
    a[e1].1 == next(n, a[e2].0) && a[e2].1 == next(n, a[e3].0) && a[e3].1 == next(n, a[e1].0)
}

fn is_cplus_forward(s: &VirtualString, [e1, e2, e3]: [usize; 3]) -> bool {
    let n = s.n_slots();
    let a = s.arrows();
    a[e2].0 == next(n, a[e1].0) && a[e3].0 == next(n, a[e1].1) && a[e3].1 == next(n, a[e2].1)
}

fn is_cplus_backward(s: &VirtualString, [e1, e2, e3]: [usize; 3]) -> bool {
    let n = s.n_slots();
    let a = s.arrows();
    a[e1].0 == next(n, a[e2].0) && a[e1].1 == next(n, a[e3].0) && a[e2].1 == next(n, a[e3].1)
}

fn cplus_sites(s: &VirtualString, backward: bool) -> Vec<[usize; 3]> {
    let n = s.n_slots();
    let a = s.arrows();
    let mut out = Vec::new();
    for e1 in 0..s.rank() {
        // forward: e2 has its tail right after tail1, e3 its tail right after head1
        // backward: tail1 right after tail2, head1 right after tail3
        let (x2, x3) = if backward { (prev(n, a[e1].0), prev(n, a[e1].1)) } else { (next(n, a[e1].0), next(n, a[e1].1)) };
        let (p2, p3) = (s.slot(x2), s.slot(x3));
        if p2.head || p3.head {
            continue;
        }
        let t = [e1, p2.arrow, p3.arrow];
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            continue;
        }
        let ok = if backward { is_cplus_backward(s, t) } else { is_cplus_forward(s, t) };
        if ok {
            out.push(t);
        }
    }
    out
}

fn is_curl(s: &VirtualString, e: usize) -> bool {
    let n = s.n_slots();
    let (t, h) = s.arrows()[e];
    h == next(n, t) || t == next(n, h)
}

fn is_b_pair(s: &VirtualString, e: usize, f: usize) -> bool {
    if e == f {
        return false;
    }
    let n = s.n_slots();
    let (te, he) = s.arrows()[e];
    let (tf, hf) = s.arrows()[f];
    let adj = |x: usize, y: usize| x == next(n, y) || y == next(n, x);
    adj(te, hf) && adj(he, tf)
}

/// Number of distinct insertion gaps.
fn gap_count(s: &VirtualString) -> usize {
    s.n_slots().max(1)
}

/// Rank-decreasing and rank-preserving moves.
pub fn reducing_moves(s: &VirtualString) -> Vec<MoveInstance> {
    let mut out = Vec::new();
    let m = s.rank();
    for e in 0..m {
        if is_curl(s, e) {
            out.push(MoveInstance { kind: MoveKind::ARemove, site: Site::Arrow { arrow: e } });
        }
    }
    for e in 0..m {
        for f in 0..m {
            // each unordered pair once: e is the arrow whose tail sits by f's head
            if is_b_pair(s, e, f) && (e < f || !is_b_pair(s, f, e)) {
                out.push(MoveInstance { kind: MoveKind::BRemove, site: Site::Pair { e, f } });
            }
        }
    }
    for t in c_forward_sites(s) {
        out.push(MoveInstance { kind: MoveKind::CForward, site: Site::Triple { arrows: t } });
    }
    for t in c_backward_sites(s) {
        out.push(MoveInstance { kind: MoveKind::CBackward, site: Site::Triple { arrows: t } });
    }
    for t in cplus_sites(s, false) {
        out.push(MoveInstance { kind: MoveKind::CplusForward, site: Site::Triple { arrows: t } });
    }
    for t in cplus_sites(s, true) {
        out.push(MoveInstance { kind: MoveKind::CplusBackward, site: Site::Triple { arrows: t } });
    }
    out
}

/// `A_add` instances, one per gap and form.
pub fn curl_additions(s: &VirtualString) -> Vec<MoveInstance> {
    (0..gap_count(s))
        .flat_map(|gap| {
            [false, true].map(|head_first| MoveInstance { kind: MoveKind::AAdd, site: Site::Curl { gap, head_first } })
        })
        .collect()
}

/// `B_add` instances for every pair of gaps and all four forms.
pub fn pair_additions(s: &VirtualString) -> Vec<MoveInstance> {
    let g = gap_count(s);
    let mut out = Vec::new();
    for first in 0..g {
        for second in first..g {
            for a_second in [false, true] {
                for b_second in [false, true] {
                    out.push(MoveInstance { kind: MoveKind::BAdd, site: Site::Gaps { first, second, a_second, b_second } });
                }
            }
        }
    }
    out
}

/// Every move applicable to `s`: all removals and triple moves, plus the
/// additive moves at every gap.
pub fn applicable_moves(s: &VirtualString) -> Vec<MoveInstance> {
    let mut out = reducing_moves(s);
    out.extend(curl_additions(s));
    out.extend(pair_additions(s));
    out
}

fn stale(mv: &MoveInstance) -> Error {
    Error::Precondition(format!("move {mv} does not apply"))
}

fn check_arrows(s: &VirtualString, arrows: &[usize]) -> Result<()> {
    for &e in arrows {
        s.arrow(e)?;
    }
    Ok(())
}

/// Applies `mv`, checking that its site is valid for `s`.
pub fn apply_move(s: &VirtualString, mv: &MoveInstance) -> Result<Moved> {
    let m = s.rank();
    let a = s.arrows();
    match (mv.kind, mv.site) {
        (MoveKind::AAdd, Site::Curl { gap, head_first }) => {
            if gap >= gap_count(s) {
                return Err(stale(mv));
            }
            let pair = if head_first { [(m, true), (m, false)] } else { [(m, false), (m, true)] };
            Ok(insert(s, &[(gap, &pair)]))
        }
        (MoveKind::BAdd, Site::Gaps { first, second, a_second, b_second }) => {
            if first > second || second >= gap_count(s) {
                return Err(stale(mv));
            }
            // e = m, f = m + 1
            let (ta, hb) = ((m, false), (m, true));
            let (tf, hf) = ((m + 1, false), (m + 1, true));
            let p1 = if a_second { [hf, ta] } else { [ta, hf] };
            let p2 = if b_second { [tf, hb] } else { [hb, tf] };
            Ok(insert(s, &[(first, &p1), (second, &p2)]))
        }
        (MoveKind::ARemove, Site::Arrow { arrow }) => {
            check_arrows(s, &[arrow])?;
            if !is_curl(s, arrow) {
                return Err(stale(mv));
            }
            Ok(drop_arrows(s, &[arrow]))
        }
        (MoveKind::BRemove, Site::Pair { e, f }) => {
            check_arrows(s, &[e, f])?;
            if !is_b_pair(s, e, f) {
                return Err(stale(mv));
            }
            Ok(drop_arrows(s, &[e, f]))
        }
        (kind @ (MoveKind::CForward | MoveKind::CBackward), Site::Triple { arrows: t }) => {
            check_arrows(s, &t)?;
            let ok = if kind == MoveKind::CForward { is_c_forward(s, t) } else { is_c_backward(s, t) };
            if !ok || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(stale(mv));
            }
            let [e1, e2, e3] = t;
            let new = [(a[e3].1, a[e2].0), (a[e1].1, a[e3].0), (a[e2].1, a[e1].0)];
            Ok(replace(s, t, new))
        }
        (kind @ (MoveKind::CplusForward | MoveKind::CplusBackward), Site::Triple { arrows: t }) => {
            check_arrows(s, &t)?;
            let ok = if kind == MoveKind::CplusForward { is_cplus_forward(s, t) } else { is_cplus_backward(s, t) };
            if !ok || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(stale(mv));
            }
            let [e1, e2, e3] = t;
            let new = [(a[e2].0, a[e3].0), (a[e1].0, a[e3].1), (a[e1].1, a[e2].1)];
            Ok(replace(s, t, new))
        }
        _ => Err(Error::Invalid(format!("site does not match move kind in {mv}"))),
    }
}

fn insert(s: &VirtualString, at: &[(usize, &[(usize, bool)])]) -> Moved {
    let toks = tokens(s);
    let n = toks.len();
    let mut seq = Vec::with_capacity(n + 4);
    for i in 0..=n {
        for (g, pair) in at {
            if *g == i {
                seq.extend_from_slice(pair);
            }
        }
        if i < n {
            seq.push(toks[i]);
        }
    }
    let string = VirtualString::from_sequence(&seq).expect("insertion keeps the pairing");
    let m = s.rank();
    let origin = (0..string.rank()).map(|i| (i < m).then_some(i)).collect();
    Moved { string, origin }
}

fn drop_arrows(s: &VirtualString, gone: &[usize]) -> Moved {
    let string = s.restrict(|e| !gone.contains(&e));
    let origin = (0..s.rank()).filter(|e| !gone.contains(e)).map(Some).collect();
    Moved { string, origin }
}

fn replace(s: &VirtualString, t: [usize; 3], new: [(usize, usize); 3]) -> Moved {
    let mut arrows = s.arrows().to_vec();
    for k in 0..3 {
        arrows[t[k]] = new[k];
    }
    let string = VirtualString::from_arrows(arrows).expect("triple moves keep the pairing");
    Moved { string, origin: (0..s.rank()).map(Some).collect() }
}

/// Homeomorphism classes of rank-`m` strings.
pub fn enumerate_strings(m: usize, limit: usize) -> Result<BTreeSet<CanonicalCode>> {
    if m > limit {
        return Err(Error::LimitExceeded { what: format!("enumeration of rank {m}"), limit });
    }
    Ok(labeled_strings(m).iter().map(|s| s.code()).collect())
}
