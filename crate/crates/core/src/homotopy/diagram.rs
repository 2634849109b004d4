use serde::Serialize;

use super::{apply_move, c_backward_sites, c_forward_sites, curl_additions, is_b_pair, pair_additions, MoveInstance, MoveKind, Site};
use crate::error::{Error, Result};
use crate::model::ArrowDiagram;

/// A move on an arrow diagram. `sign` is the sign of the added arrow for
/// `AAdd` and of the arrow `e = (a,b)` for `BAdd` (its partner gets the
/// opposite sign); it is 0 for the other kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DiagramMove {
    #[serde(rename = "move")]
    pub mv: MoveInstance,
    pub sign: i8,
}

/// Rotation of a triple whose signs read `(+, +, -)`.
fn c_rotation(d: &ArrowDiagram, t: [usize; 3]) -> Option<[usize; 3]> {
    (0..3)
        .map(|k| [t[k], t[(k + 1) % 3], t[(k + 2) % 3]])
        .find(|r| d.sign(r[0]) == 1 && d.sign(r[1]) == 1 && d.sign(r[2]) == -1)
}

fn is_tail_head_curl(d: &ArrowDiagram, e: usize) -> bool {
    let s = d.string();
    let (t, h) = s.arrows()[e];
    h == (t + 1) % s.n_slots()
}

/// The moves `(a)_ad`, `(b)_ad`, `(c)_ad` and their inverses. Additive
/// moves are listed only when `additive` is set.
pub fn diagram_moves(d: &ArrowDiagram, additive: bool) -> Vec<DiagramMove> {
    let s = d.string();
    let m = s.rank();
    let mut out = Vec::new();
    for e in 0..m {
        if is_tail_head_curl(d, e) {
            out.push(DiagramMove { mv: MoveInstance { kind: MoveKind::ARemove, site: Site::Arrow { arrow: e } }, sign: 0 });
        }
    }
    for e in 0..m {
        for f in 0..m {
            if is_b_pair(s, e, f) && (e < f || !is_b_pair(s, f, e)) && d.sign(e) != d.sign(f) {
                out.push(DiagramMove { mv: MoveInstance { kind: MoveKind::BRemove, site: Site::Pair { e, f } }, sign: 0 });
            }
        }
    }
    for (kind, sites) in [(MoveKind::CForward, c_forward_sites(s)), (MoveKind::CBackward, c_backward_sites(s))] {
        for t in sites {
            if let Some(r) = c_rotation(d, t) {
                out.push(DiagramMove { mv: MoveInstance { kind, site: Site::Triple { arrows: r } }, sign: 0 });
            }
        }
    }
    if additive {
        for mv in curl_additions(s) {
            if let Site::Curl { head_first: false, .. } = mv.site {
                for sign in [1, -1] {
                    out.push(DiagramMove { mv, sign });
                }
            }
        }
        for mv in pair_additions(s) {
            for sign in [1, -1] {
                out.push(DiagramMove { mv, sign });
            }
        }
    }
    out
}

fn stale(mv: &DiagramMove) -> Error {
    Error::Precondition(format!("diagram move {} (sign {}) does not apply", mv.mv, mv.sign))
}

pub fn apply_diagram_move(d: &ArrowDiagram, mv: &DiagramMove) -> Result<ArrowDiagram> {
    let s = d.string();
    match (mv.mv.kind, mv.mv.site) {
        (MoveKind::AAdd, Site::Curl { head_first, .. }) => {
            if head_first || mv.sign.abs() != 1 {
                return Err(stale(mv));
            }
        }
        (MoveKind::BAdd, _) => {
            if mv.sign.abs() != 1 {
                return Err(stale(mv));
            }
        }
        (MoveKind::ARemove, Site::Arrow { arrow }) => {
            s.arrow(arrow)?;
            if !is_tail_head_curl(d, arrow) {
                return Err(stale(mv));
            }
        }
        (MoveKind::BRemove, Site::Pair { e, f }) => {
            s.arrow(e)?;
            s.arrow(f)?;
            if d.sign(e) == d.sign(f) {
                return Err(stale(mv));
            }
        }
        (MoveKind::CForward | MoveKind::CBackward, Site::Triple { arrows }) => {
            for &e in &arrows {
                s.arrow(e)?;
            }
            if c_rotation(d, arrows) != Some(arrows) {
                return Err(stale(mv));
            }
        }
        _ => return Err(stale(mv)),
    }
    let moved = apply_move(s, &mv.mv)?;
    let m = s.rank();
    let signs = moved
        .origin
        .iter()
        .enumerate()
        .map(|(i, o)| match o {
            Some(old) => d.sign(*old),
            None if i == m => mv.sign,
            None => -mv.sign,
        })
        .collect();
    ArrowDiagram::new(moved.string, signs)
}
