//! The cobracket on homotopy classes of strings and the dual bracket on
//! invariant functionals.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::homotopy::Normalizer;
use crate::model::{Arc, CanonicalCode, VirtualString};

/// Rational combination of nontrivial classes, keyed by normal-form code.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassVector {
    terms: BTreeMap<CanonicalCode, BigRational>,
}

/// Rational combination of ordered tuples (pairs or triples) of classes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorVector {
    terms: BTreeMap<Vec<CanonicalCode>, BigRational>,
}

impl ClassVector {
    pub fn add(&mut self, k: CanonicalCode, c: BigRational) {
        add_term(&mut self.terms, k, c);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalCode, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

fn add_term<K: Ord>(terms: &mut BTreeMap<K, BigRational>, k: K, c: BigRational) {
    match terms.get_mut(&k) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                terms.remove(&k);
            }
        }
        None if !c.is_zero() => {
            terms.insert(k, c);
        }
        None => {}
    }
}

impl TensorVector {
    pub fn add(&mut self, k: Vec<CanonicalCode>, c: BigRational) {
        add_term(&mut self.terms, k, c);
    }

    pub fn add_vector(&mut self, other: &TensorVector, scale: &BigRational) {
        for (k, c) in &other.terms {
            self.add(k.clone(), c * scale);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<CanonicalCode>, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: &[CanonicalCode]) -> BigRational {
        self.terms.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Reverses every pair.
    pub fn swapped(&self) -> TensorVector {
        let mut out = TensorVector::default();
        for (k, c) in &self.terms {
            out.add(k.iter().rev().cloned().collect(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> TensorVector {
        let mut out = TensorVector::default();
        out.add_vector(self, &-BigRational::one());
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.terms
                .iter()
                .map(|(k, c)| {
                    serde_json::json!({
                        "coefficient": c.to_string(),
                        "classes": k.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        )
    }
}

impl fmt::Display for TensorVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let factors: Vec<String> = k.iter().map(|x| format!("<{x}>")).collect();
            let sign = if c < &BigRational::zero() { "-" } else { "+" };
            write!(f, "{sign}{} {}", c.abs(), factors.join(" (x) "))?;
        }
        Ok(())
    }
}

/// `(α¹_e, α²_e)`: the arrows lying strictly inside the arcs `ab` and `ba`
/// for `e = (a, b)`.
pub fn split_at_arrow(s: &VirtualString, e: usize) -> Result<(VirtualString, VirtualString)> {
    let (a, b) = s.arrow(e)?;
    let n = s.n_slots();
    let inside = |arc: Arc| {
        move |f: usize| {
            let (c, d) = s.arrows()[f];
            arc.contains(n, c) && arc.contains(n, d)
        }
    };
    Ok((s.restrict(inside(Arc::new(a, b))), s.restrict(inside(Arc::new(b, a)))))
}

fn rat(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// `ν⟨α⟩ = Σ_e ⟨α¹_e⟩⊗⟨α²_e⟩ - ⟨α²_e⟩⊗⟨α¹_e⟩`, where classes the normalizer
/// proves trivial count as 0.
pub fn cobracket(s: &VirtualString, nz: &Normalizer) -> TensorVector {
    let mut out = TensorVector::default();
    for e in 0..s.rank() {
        let (x, y) = split_at_arrow(s, e).expect("arrow index in range");
        // a nonzero term needs two nontrivial pieces, and those have rank ≥ 3
        if x.rank() < 3 || y.rank() < 3 {
            continue;
        }
        let (Some(kx), Some(ky)) = (nz.class_key(&x), nz.class_key(&y)) else { continue };
        out.add(vec![kx.clone(), ky.clone()], rat(1));
        out.add(vec![ky, kx], rat(-1));
    }
    out
}

/// `(id + τ + τ²)(id ⊗ ν)ν⟨α⟩`, splitting the second factor of each term
/// again inside its own arc.
pub fn co_jacobi_sum(s: &VirtualString, nz: &Normalizer) -> TensorVector {
    let mut once = TensorVector::default();
    for e in 0..s.rank() {
        let (x, y) = split_at_arrow(s, e).expect("arrow index in range");
        for (first, second, sign) in [(&x, &y, 1), (&y, &x, -1)] {
            if first.rank() < 3 || second.rank() < 7 {
                continue;
            }
            let Some(k) = nz.class_key(first) else { continue };
            let inner = cobracket(second, nz);
            for (pair, c) in inner.terms() {
                let mut key = vec![k.clone()];
                key.extend(pair.iter().cloned());
                once.add(key, c * rat(sign));
            }
        }
    }
    let mut out = TensorVector::default();
    for (k, c) in once.terms() {
        for r in 0..3 {
            out.add((0..3).map(|i| k[(i + r) % 3].clone()).collect(), c.clone());
        }
    }
    out
}

pub fn co_jacobi_check(s: &VirtualString, nz: &Normalizer) -> bool {
    co_jacobi_sum(s, nz).is_empty()
}

/// `[f, g](α) = Σ_e f(α¹_e) g(α²_e) - f(α²_e) g(α¹_e)`, evaluated on the
/// pieces themselves. `f` and `g` must be homotopy invariants vanishing on
/// trivial strings.
pub fn dual_bracket<F, G>(f: F, g: G, s: &VirtualString) -> BigRational
where
    F: Fn(&VirtualString) -> BigRational,
    G: Fn(&VirtualString) -> BigRational,
{
    let mut total = BigRational::zero();
    for e in 0..s.rank() {
        let (x, y) = split_at_arrow(s, e).expect("arrow index in range");
        total += f(&x) * g(&y) - f(&y) * g(&x);
    }
    total
}

/// Pairs `f ⊗ g` with a tensor of classes through their representatives.
pub fn pair_with<F, G>(f: F, g: G, t: &TensorVector) -> BigRational
where
    F: Fn(&VirtualString) -> BigRational,
    G: Fn(&VirtualString) -> BigRational,
{
    t.terms().map(|(k, c)| c * f(&k[0].decode()) * g(&k[1].decode())).sum()
}

/// The functional `α ↦ u_k(α)`.
pub fn u_coefficient(k: u32) -> impl Fn(&VirtualString) -> BigRational {
    move |s| rat(crate::invariants::u_polynomial(s).coeff(k))
}
