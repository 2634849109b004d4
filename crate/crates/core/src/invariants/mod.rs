//! Linking numbers, the u-polynomial, based matrices of strings and the
//! bounds and obstructions derived from them.

mod matrix;
mod rank;
mod upoly;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{lattice_string, Arc, VirtualString};

pub use matrix::{BasedMatrix, MatrixKey, Reduction, SIGMA_LIMIT};
pub use rank::rank;
pub use upoly::UPolynomial;

/// `n(e)`: arrows linking `e` positively minus those linking it negatively.
pub fn linking_number(s: &VirtualString, e: usize) -> Result<i64> {
    s.arrow(e)?;
    Ok((0..s.rank()).map(|f| s.link_sign(e, f)).sum())
}

pub fn linking_numbers(s: &VirtualString) -> Vec<i64> {
    (0..s.rank()).map(|e| (0..s.rank()).map(|f| s.link_sign(e, f)).sum()).collect()
}

/// `u(α) = Σ_k u_k t^k` with `u_k = #{n(e) = k} - #{n(e) = -k}`.
pub fn u_polynomial(s: &VirtualString) -> UPolynomial {
    UPolynomial::from_terms(
        linking_numbers(s).into_iter().filter(|&n| n != 0).map(|n| (n.unsigned_abs() as u32, n.signum())),
    )
}

/// `ab·cd`: arrows from the interior of `ab` to the interior of `cd` minus
/// arrows going the other way.
pub fn arc_pairing(s: &VirtualString, x: Arc, y: Arc) -> i64 {
    let n = s.n_slots();
    s.arrows()
        .iter()
        .map(|&(t, h)| {
            let fwd = x.contains(n, t) && y.contains(n, h);
            let bwd = y.contains(n, t) && x.contains(n, h);
            fwd as i64 - bwd as i64
        })
        .sum()
}

/// `T(α)`: basis `s, e_1..e_m` with `b(e,s) = n(e)` and
/// `b(e,f) = ab·cd + ε(e,f)`.
pub fn based_matrix(s: &VirtualString) -> BasedMatrix {
    let m = s.rank();
    let ns = linking_numbers(s);
    let mut b = vec![vec![0i64; m + 1]; m + 1];
    for e in 0..m {
        b[e + 1][0] = ns[e];
        b[0][e + 1] = -ns[e];
        let (a, bb) = s.arrows()[e];
        for f in e + 1..m {
            let (c, d) = s.arrows()[f];
            let v = arc_pairing(s, Arc::new(a, bb), Arc::new(c, d)) + s.link_sign(e, f);
            b[e + 1][f + 1] = v;
            b[f + 1][e + 1] = -v;
        }
    }
    BasedMatrix::new(b).expect("skew-symmetric by construction")
}

/// `T₀(α)`, the primitive reduction of `T(α)`.
pub fn primitive_matrix(s: &VirtualString) -> BasedMatrix {
    based_matrix(s).primitive_reduce()
}

/// Half the rank of `T(α)`.
pub fn genus(s: &VirtualString) -> usize {
    based_matrix(s).rank() / 2
}

/// `ρ = #G₀ - 1`.
pub fn rho(s: &VirtualString) -> usize {
    primitive_matrix(s).size() - 1
}

/// `max(ρ, deg u + 1)`, or `ρ` when `u = 0`.
pub fn hr_lower_bound(s: &VirtualString) -> usize {
    let deg = u_polynomial(s).degree().map_or(0, |d| d as usize + 1);
    rho(s).max(deg)
}

/// Half the rank of `b₀`.
pub fn hg_lower_bound(s: &VirtualString) -> usize {
    primitive_matrix(s).rank() / 2
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SliceVerdict {
    NotSlice,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SliceReport {
    pub u_zero: bool,
    pub matrix_hyperbolic: bool,
    pub sigma: usize,
    /// `⌈σ/2⌉`, a lower bound for the slice genus.
    pub slice_genus_lower_bound: usize,
    pub verdict: SliceVerdict,
}

/// Obstructions to sliceness: a slice string has `u = 0` and hyperbolic
/// `T(α)`, and `σ(T(α)) ≤ 2 sg(α)` in general. `σ` is evaluated on `T₀`.
pub fn slice_obstructions(s: &VirtualString, limit: usize) -> Result<SliceReport> {
    let u_zero = u_polynomial(s).is_zero();
    let sigma = primitive_matrix(s).sigma(limit)?;
    let matrix_hyperbolic = sigma == 0;
    let verdict = if !u_zero || !matrix_hyperbolic { SliceVerdict::NotSlice } else { SliceVerdict::Unknown };
    Ok(SliceReport { u_zero, matrix_hyperbolic, sigma, slice_genus_lower_bound: sigma.div_ceil(2), verdict })
}

/// A string with the given u-polynomial. Requires `u(0) = 0` and
/// `u'(1) = 0`; writes `u = Σ_{m≥2} a_m (t^m - m t)` and multiplies
/// `a_m` copies of `α_{1,m}` (or `|a_m|` copies of `α_{m,1}` when `a_m < 0`).
pub fn realize_u_polynomial(u: &UPolynomial) -> Result<VirtualString> {
    if u.coeff(0) != 0 {
        return Err(Error::Precondition(format!("u(0) = {} is not 0", u.coeff(0))));
    }
    let d = u.derivative_at_one();
    if d != 0 {
        return Err(Error::Precondition(format!("u'(1) = {d} is not 0")));
    }
    let mut out = VirtualString::trivial();
    for (m, a) in u.terms() {
        if m < 2 {
            continue;
        }
        let m = m as usize;
        let piece = if a > 0 { lattice_string(1, m)? } else { lattice_string(m, 1)? };
        for _ in 0..a.unsigned_abs() {
            out = out.product(&piece);
        }
    }
    Ok(out)
}
