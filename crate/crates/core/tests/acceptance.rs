//! The twelve acceptance criteria. Each runs under its time limit and prints
//! one PASS/FAIL line; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use virtual_strings::gauss::{compatible_bipartitions, condition_i, condition_ii, realizable, BIPARTITION_LIMIT};
use virtual_strings::homotopy::{
    apply_diagram_move, apply_move, applicable_moves, diagram_moves, enumerate_strings, normalize, Budget, Normalizer, Status,
    ENUMERATE_LIMIT,
};
use virtual_strings::invariants::{
    based_matrix, primitive_matrix, realize_u_polynomial, slice_obstructions, u_polynomial, SliceVerdict, UPolynomial,
    SIGMA_LIMIT,
};
use virtual_strings::lie::{cobracket, dual_bracket, u_coefficient, TensorVector};
use virtual_strings::model::{
    family4_permutation, labeled_strings, lattice_string, parse_permutation, permutation_string, GaussWord,
};
use virtual_strings::skein::{diagram_variants, eta, nabla, OrientedForest, StringClassPolynomial, SKEIN_LIMIT};
use virtual_strings::{ArrowDiagram, VirtualString};

type Outcome = Result<(), String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond { Ok(()) } else { Err(msg()) }
}

fn perm(text: &str) -> VirtualString {
    permutation_string(&parse_permutation(text, None).unwrap()).unwrap()
}

fn random_string(rng: &mut StdRng, max_rank: usize) -> VirtualString {
    let m = rng.gen_range(0..=max_rank);
    let mut slots: Vec<usize> = (0..2 * m).collect();
    slots.shuffle(rng);
    VirtualString::from_arrows(slots.chunks(2).map(|c| (c[0], c[1])).collect()).unwrap()
}

fn random_diagram(rng: &mut StdRng, max_rank: usize) -> ArrowDiagram {
    let s = random_string(rng, max_rank);
    let signs = (0..s.rank()).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
    ArrowDiagram::new(s, signs).unwrap()
}

fn u_formula() -> Outcome {
    for p in 1..=5 {
        for q in 1..=5 {
            let mut want = UPolynomial::zero();
            want.add_term(q as u32, p as i64);
            want.add_term(p as u32, -(q as i64));
            let got = u_polynomial(&lattice_string(p, q).unwrap());
            check(got == want, || format!("p={p} q={q}: got {got}, want {want}"))?;
        }
    }
    Ok(())
}

fn genus_table() -> Outcome {
    let mut bad = Vec::new();
    for p in 1..=4 {
        for q in 1..=4 {
            let want = if p == 1 && q == 1 {
                2
            } else if p.min(q) >= 3 {
                6
            } else {
                4
            };
            let got = based_matrix(&lattice_string(p, q).unwrap()).rank();
            if got != want {
                bad.push(format!("(p,q)=({p},{q}) rank {got} != {want}"));
            }
        }
    }
    check(bad.is_empty(), || bad.join("; "))
}

fn printed_matrices() -> Outcome {
    let cases: [(&str, [[i64; 5]; 5]); 3] = [
        ("(12)(34)", [[0, -1, 1, -1, 1], [1, 0, 1, -1, 1], [-1, -1, 0, -1, 1], [1, 1, 1, 0, 1], [-1, -1, -1, -1, 0]]),
        ("(134)(2)", [[0, -2, 0, -1, 3], [2, 0, 1, 0, 3], [0, -1, 0, 0, 2], [1, 0, 0, 0, 1], [-3, -3, -2, -1, 0]]),
        ("(124)(3)", [[0, -1, -2, 0, 3], [1, 0, -1, 1, 3], [2, 1, 0, 1, 2], [0, -1, -1, 0, 1], [-3, -3, -2, -1, 0]]),
    ];
    let mut mats = Vec::new();
    for (sigma, want) in cases {
        let t = based_matrix(&perm(sigma));
        let want: Vec<Vec<i64>> = want.iter().map(|r| r.to_vec()).collect();
        check(t.rows() == &want[..], || format!("{sigma}: got\n{t}"))?;
        mats.push(t);
    }
    check(mats[1].is_primitive() && mats[2].is_primitive(), || "matrices not primitive".into())?;
    check(!mats[1].isomorphic(&mats[2]), || "(134)(2) and (124)(3) matrices are isomorphic".into())
}

fn gauss_corpus() -> Outcome {
    let w = |s: &str| GaussWord::parse(s).unwrap();
    for s in ["1231245345", "1231435425"] {
        check(condition_i(&w(s)) && !condition_ii(&w(s)), || format!("{s} should fail exactly (ii)"))?;
    }
    let x = w("123456214365");
    check(condition_i(&x) && condition_ii(&x), || "123456214365 should pass (i) and (ii)".into())?;
    let n = compatible_bipartitions(&x, BIPARTITION_LIMIT).map_err(|e| e.to_string())?.len();
    check(n == 0, || format!("123456214365 has {n} compatible bipartitions"))?;
    let y = w("1122");
    let n = compatible_bipartitions(&y, BIPARTITION_LIMIT).map_err(|e| e.to_string())?.len();
    check(realizable(&y) && n == 2, || format!("1122: {n} compatible bipartitions"))
}

fn exhaustive_triviality() -> Outcome {
    for m in 0..=2 {
        for s in labeled_strings(m) {
            let r = normalize(&s, Budget::default());
            check(r.status == Status::Trivial, || format!("{s} is not reduced to the trivial string"))?;
        }
    }
    let nz = Normalizer::default();
    let mut nonzero = std::collections::BTreeSet::new();
    for c in enumerate_strings(3, ENUMERATE_LIMIT).map_err(|e| e.to_string())? {
        let s = c.decode();
        if let Some(k) = nz.class_key(&s) {
            if k.rank() == 3 && !u_polynomial(&s).is_zero() {
                nonzero.insert(k);
            }
        }
    }
    let want: std::collections::BTreeSet<_> =
        [lattice_string(1, 2).unwrap(), lattice_string(2, 1).unwrap()].iter().map(|s| nz.class_key(s).unwrap()).collect();
    check(nonzero == want, || format!("rank-3 classes with u != 0: {nonzero:?}"))
}

fn cobracket_example() -> Outcome {
    let nz = Normalizer::default();
    let nu = cobracket(&perm("(123)(4)(576)"), &nz);
    let a = nz.class_key(&lattice_string(1, 2).unwrap()).unwrap();
    let b = nz.class_key(&lattice_string(2, 1).unwrap()).unwrap();
    let mut want = TensorVector::default();
    want.add(vec![a.clone(), b.clone()], BigRational::one());
    want.add(vec![b, a], -BigRational::one());
    check(nu == want, || format!("got {nu}"))
}

fn dual_bracket_value() -> Outcome {
    let s = permutation_string(&family4_permutation(1, 2, 3, 4)).unwrap();
    let v = dual_bracket(u_coefficient(1), u_coefficient(3), &s);
    check(v == BigRational::from_integer(BigInt::from(-8)), || format!("got {v}"))
}

/// Oriented trees on `v` labeled vertices.
fn trees(v: usize) -> Vec<OrientedForest> {
    let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        if mask.count_ones() as usize + 1 != v {
            continue;
        }
        let chosen: Vec<(usize, usize)> = (0..pairs.len()).filter(|i| mask & (1 << i) != 0).map(|i| pairs[i]).collect();
        for dirs in 0u32..(1 << chosen.len()) {
            let edges =
                chosen.iter().enumerate().map(|(i, &(a, b))| if dirs & (1 << i) != 0 { (b, a) } else { (a, b) }).collect();
            if let Ok(f) = OrientedForest::new(v, edges) {
                out.push(f);
            }
        }
    }
    out
}

fn merge(t: &OrientedForest, keep: usize, gone: usize, drop_edge: usize) -> OrientedForest {
    let rename = |x: usize| {
        let x = if x == gone { keep } else { x };
        if x > gone { x - 1 } else { x }
    };
    let edges = t
        .edges()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != drop_edge)
        .map(|(_, &(x, y))| (rename(x), rename(y)))
        .collect();
    OrientedForest::new(t.vertex_count() - 1, edges).unwrap()
}

fn eta_suite() -> Outcome {
    check(eta(&OrientedForest::point()).is_one(), || "point".into())?;
    for text in ["a b", "a>b c", "a>b c>d", "a>b b>c d>e"] {
        let f = OrientedForest::parse(text).unwrap();
        check(eta(&f).is_zero(), || format!("two-component forest {text}"))?;
    }
    for v in 2..=5 {
        for t in trees(v) {
            let e = t.edges().to_vec();
            let with = |edges: Vec<(usize, usize)>| OrientedForest::new(v, edges).unwrap();
            for (i, &(a, b)) in e.iter().enumerate() {
                let mut r = e.clone();
                r[i] = (b, a);
                let sum = eta(&t) + eta(&with(r)) + eta(&merge(&t, a, b, i));
                check(sum.is_zero(), || format!("reversal/contraction fails on {t:?} edge {i}"))?;
                for (j, &(a2, c)) in e.iter().enumerate() {
                    if j == i || a2 != a {
                        continue;
                    }
                    let (mut t1, mut t2) = (e.clone(), e.clone());
                    t1[j] = (b, c);
                    t2[i] = (c, b);
                    let rhs = eta(&with(t1)) + eta(&with(t2)) + eta(&merge(&t, b, c, j));
                    check(eta(&t) == rhs, || format!("edge split fails on {t:?} edges {i},{j}"))?;
                }
            }
        }
    }
    Ok(())
}

fn skein_defect(d: &ArrowDiagram, e: usize, nz: &Normalizer) -> StringClassPolynomial {
    let (minus, d1, d2) = diagram_variants(d, e).unwrap();
    let n = |x: &ArrowDiagram| nabla(x, nz, SKEIN_LIMIT).unwrap();
    let mut out = n(d);
    out.add_poly(&n(&minus), &-BigRational::one());
    out.add_poly(&n(&d1).mul(&n(&d2)).shift(1), &-BigRational::one());
    out
}

fn skein_property() -> Outcome {
    let nz = Normalizer::default();
    let mut rng = StdRng::seed_from_u64(2024);
    for _ in 0..50 {
        let d = random_diagram(&mut rng, 4);
        for e in (0..d.rank()).filter(|&e| d.sign(e) > 0) {
            let r = skein_defect(&d, e, &nz);
            check(r.is_zero(), || format!("{d} at arrow {e}: {r}"))?;
        }
    }
    Ok(())
}

fn string_invariants(s: &VirtualString, nz: &Normalizer) -> (UPolynomial, String, usize, TensorVector) {
    let t0 = primitive_matrix(s);
    let sigma = t0.sigma(SIGMA_LIMIT).unwrap();
    (u_polynomial(s), format!("{:?}", t0.canonical_key()), sigma, cobracket(s, nz))
}

fn move_invariance() -> Outcome {
    let nz = Normalizer::default();
    let mut rng = StdRng::seed_from_u64(77);
    let mut applied = 0;
    // homotopy moves on strings, including one walk from a string with nonzero cobracket
    let mut starts: Vec<VirtualString> = (0..24).map(|_| random_string(&mut rng, 5)).collect();
    starts.push(perm("(123)(4)(576)"));
    for start in starts {
        let want = string_invariants(&start, &nz);
        let cap = start.rank().max(5) + 2;
        let mut s = start.clone();
        for _ in 0..12 {
            let moves: Vec<_> = applicable_moves(&s)
                .into_iter()
                .filter(|m| apply_move(&s, m).map(|r| r.string.rank() <= cap).unwrap_or(false))
                .collect();
            let mv = moves[rng.gen_range(0..moves.len())];
            s = apply_move(&s, &mv).unwrap().string;
            applied += 1;
            let got = string_invariants(&s, &nz);
            check(got == want, || format!("{mv} on {start} changed an invariant"))?;
        }
    }
    // diagram moves and ∇
    for _ in 0..40 {
        let mut d = random_diagram(&mut rng, 4);
        let want = nabla(&d, &nz, SKEIN_LIMIT).unwrap();
        for _ in 0..6 {
            let moves: Vec<_> = diagram_moves(&d, d.rank() < 5)
                .into_iter()
                .filter(|m| apply_diagram_move(&d, m).map(|r| r.rank() <= 5).unwrap_or(false))
                .collect();
            if moves.is_empty() {
                break;
            }
            let mv = moves[rng.gen_range(0..moves.len())];
            d = apply_diagram_move(&d, &mv).unwrap();
            applied += 1;
            let got = nabla(&d, &nz, SKEIN_LIMIT).unwrap();
            check(got == want, || format!("{} changed nabla, now on {d}", mv.mv))?;
        }
    }
    check(applied >= 500, || format!("only {applied} moves applied"))
}

fn slice_obstruction() -> Outcome {
    for p in 1..=4 {
        for q in 1..=4 {
            if p == q {
                continue;
            }
            let r = slice_obstructions(&lattice_string(p, q).unwrap(), SIGMA_LIMIT).map_err(|e| e.to_string())?;
            check(r.verdict == SliceVerdict::NotSlice, || format!("alpha_({p},{q}) not reported NOT_SLICE"))?;
        }
    }
    let r = slice_obstructions(&lattice_string(2, 2).unwrap(), SIGMA_LIMIT).map_err(|e| e.to_string())?;
    check(r.verdict == SliceVerdict::Unknown && r.matrix_hyperbolic, || format!("alpha_(2,2): {r:?}"))
}

fn realization_round_trip() -> Outcome {
    let mut rng = StdRng::seed_from_u64(12);
    let mut done = 0;
    while done < 20 {
        let mut u = UPolynomial::zero();
        let mut slope = 0;
        for k in 2..=6u32 {
            let c = rng.gen_range(-3..=3);
            u.add_term(k, c);
            slope += k as i64 * c;
        }
        if !(-3..=3).contains(&slope) {
            continue;
        }
        u.add_term(1, -slope);
        let s = realize_u_polynomial(&u).map_err(|e| e.to_string())?;
        check(u_polynomial(&s) == u, || format!("round trip of {u} gave {}", u_polynomial(&s)))?;
        done += 1;
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 12] = [
        ("u-formula family", 1, u_formula),
        ("genus table", 1, genus_table),
        ("printed matrices", 1, printed_matrices),
        ("Gauss corpus", 1, gauss_corpus),
        ("exhaustive triviality", 30, exhaustive_triviality),
        ("cobracket example", 10, cobracket_example),
        ("dual bracket", 10, dual_bracket_value),
        ("eta suite", 10, eta_suite),
        ("skein property", 60, skein_property),
        ("move-invariance fuzz", 120, move_invariance),
        ("slice obstruction", 5, slice_obstruction),
        ("realization round-trip", 10, realization_round_trip),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let took = start.elapsed();
        let outcome = outcome.and_then(|()| {
            check(took <= Duration::from_secs(*limit), || format!("took {:.2}s, limit {limit}s", took.as_secs_f64()))
        });
        match outcome {
            Ok(()) => println!("criterion {:>2} {name}: PASS ({:.3}s)", i + 1, took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({:.3}s): {msg}", i + 1, took.as_secs_f64());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
