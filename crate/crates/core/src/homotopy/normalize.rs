use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Mutex;

use serde::Serialize;

use super::{apply_move, curl_additions, pair_additions, reducing_moves, MoveInstance};
use crate::invariants::{based_matrix, hr_lower_bound, u_polynomial, SIGMA_LIMIT};
use crate::model::{CanonicalCode, VirtualString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Budget {
    pub max_states: usize,
    pub max_rank_increase: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_states: 200_000, max_rank_increase: 2 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Trivial,
    Reduced,
    BudgetExhausted,
}

/// One move of a trace. The move acts on the canonical representative
/// (`CanonicalCode::decode`) of the previous state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    #[serde(rename = "move")]
    pub mv: MoveInstance,
    pub result: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizationResult {
    pub normal_form: VirtualString,
    pub status: Status,
    pub moves_applied: Vec<Step>,
    pub states_visited: usize,
}

type Parents = HashMap<CanonicalCode, Option<(CanonicalCode, MoveInstance)>>;

struct Search {
    best: CanonicalCode,
    status: Status,
    parents: Parents,
}

fn key(c: &CanonicalCode) -> (usize, CanonicalCode) {
    (c.rank(), c.clone())
}

/// Best-first search by rank with iterative deepening over the allowed rank
/// increase. Each level explores every state of rank at most
/// `start + level` reachable from the states seen so far; the search stops
/// at a trivial state, after a level whose best rank meets the lower bound
/// `hr_lower_bound`, or when the state budget runs out.
fn search(start: &VirtualString, budget: Budget) -> Search {
    let start_code = start.code();
    let r0 = start_code.rank();
    let lb = hr_lower_bound(start);
    let mut parents: Parents = HashMap::new();
    parents.insert(start_code.clone(), None);
    let mut best = start_code.clone();
    if r0 == 0 {
        return Search { best, status: Status::Trivial, parents };
    }
    for level in 0..=budget.max_rank_increase {
        let cap = r0 + level;
        let mut heap: BinaryHeap<Reverse<(usize, CanonicalCode)>> = parents.keys().map(|c| Reverse(key(c))).collect();
        while let Some(Reverse((rank, code))) = heap.pop() {
            let s = code.decode();
            let mut moves = reducing_moves(&s);
            if rank < cap {
                moves.extend(curl_additions(&s));
            }
            if rank + 2 <= cap {
                moves.extend(pair_additions(&s));
            }
            for mv in moves {
                let t = apply_move(&s, &mv).expect("enumerated moves apply").string.code();
                if parents.contains_key(&t) {
                    continue;
                }
                parents.insert(t.clone(), Some((code.clone(), mv)));
                if key(&t) < key(&best) {
                    best = t.clone();
                }
                if t.is_empty() {
                    return Search { best, status: Status::Trivial, parents };
                }
                if parents.len() >= budget.max_states {
                    return Search { best, status: Status::BudgetExhausted, parents };
                }
                heap.push(Reverse(key(&t)));
            }
        }
        if best.rank() <= lb {
            break;
        }
    }
    Search { best, status: Status::Reduced, parents }
}

fn trace(parents: &Parents, target: &CanonicalCode) -> Vec<Step> {
    let mut steps = Vec::new();
    let mut cur = target.clone();
    while let Some(Some((prev, mv))) = parents.get(&cur) {
        steps.push(Step { mv: *mv, result: cur.to_string() });
        cur = prev.clone();
    }
    steps.reverse();
    steps
}

/// Searches for a homotopic string of least rank. Sound but not complete:
/// a `Reduced` result need not be minimal.
pub fn normalize(s: &VirtualString, budget: Budget) -> NormalizationResult {
    let found = search(s, budget);
    NormalizationResult {
        normal_form: found.best.decode(),
        status: found.status,
        moves_applied: trace(&found.parents, &found.best),
        states_visited: found.parents.len(),
    }
}

/// Memoizing front end used to decide class equality of strings.
pub struct Normalizer {
    budget: Budget,
    memo: Mutex<HashMap<CanonicalCode, Option<CanonicalCode>>>,
}

impl Default for Normalizer {
    fn default() -> Self {
        Normalizer::new(Budget::default())
    }
}

impl Normalizer {
    pub fn new(budget: Budget) -> Self {
        Normalizer { budget, memo: Mutex::new(HashMap::new()) }
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }

    /// Code of the normal form, or `None` when the string was shown to be
    /// trivial.
    pub fn class_key(&self, s: &VirtualString) -> Option<CanonicalCode> {
        let code = s.code();
        if code.is_empty() {
            return None;
        }
        if let Some(k) = self.memo.lock().expect("memo lock").get(&code) {
            return k.clone();
        }
        let found = search(s, self.budget);
        let mut memo = self.memo.lock().expect("memo lock");
        if found.status == Status::Trivial {
            for c in found.parents.into_keys() {
                memo.insert(c, None);
            }
            None
        } else {
            memo.insert(code, Some(found.best.clone()));
            Some(found.best)
        }
    }

    pub fn is_trivial(&self, s: &VirtualString) -> bool {
        self.class_key(s).is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Equivalence {
    Homotopic,
    Distinct { reason: String },
    Unknown,
}

/// Compares two strings: different invariants prove them distinct, equal
/// normal forms prove them homotopic.
pub fn homotopic_heuristic(a: &VirtualString, b: &VirtualString, budget: Budget) -> Equivalence {
    if a.is_homeomorphic(b) {
        return Equivalence::Homotopic;
    }
    let (ua, ub) = (u_polynomial(a), u_polynomial(b));
    if ua != ub {
        return Equivalence::Distinct { reason: format!("u-polynomials differ: {ua} vs {ub}") };
    }
    let (ta, tb) = (based_matrix(a).primitive_reduce(), based_matrix(b).primitive_reduce());
    if !ta.isomorphic(&tb) {
        return Equivalence::Distinct { reason: "primitive based matrices are not isomorphic".into() };
    }
    if let (Ok(sa), Ok(sb)) = (ta.sigma(SIGMA_LIMIT), tb.sigma(SIGMA_LIMIT)) {
        if sa != sb {
            return Equivalence::Distinct { reason: format!("matrix genera differ: {sa} vs {sb}") };
        }
    }
    let (na, nb) = (search(a, budget), search(b, budget));
    if na.best == nb.best || na.parents.contains_key(&nb.best) || nb.parents.contains_key(&na.best) {
        return Equivalence::Homotopic;
    }
    Equivalence::Unknown
}
