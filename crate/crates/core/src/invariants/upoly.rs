use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Sparse integer polynomial in `t`. Strings only produce terms of degree
/// `>= 1`; a constant term is allowed so that inputs can be validated.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct UPolynomial {
    coeffs: BTreeMap<u32, i64>,
}

impl UPolynomial {
    pub fn zero() -> Self {
        UPolynomial::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (u32, i64)>) -> Self {
        let mut p = UPolynomial::zero();
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    pub fn add_term(&mut self, k: u32, c: i64) {
        let e = self.coeffs.entry(k).or_insert(0);
        *e += c;
        if *e == 0 {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: u32) -> i64 {
        self.coeffs.get(&k).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i64)> + '_ {
        self.coeffs.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Value of the derivative at `t = 1`.
    pub fn derivative_at_one(&self) -> i64 {
        self.terms().map(|(k, c)| k as i64 * c).sum()
    }

    pub fn add(&self, other: &UPolynomial) -> UPolynomial {
        let mut p = self.clone();
        for (k, c) in other.terms() {
            p.add_term(k, c);
        }
        p
    }

    pub fn neg(&self) -> UPolynomial {
        UPolynomial::from_terms(self.terms().map(|(k, c)| (k, -c)))
    }

    pub fn scale(&self, s: i64) -> UPolynomial {
        UPolynomial::from_terms(self.terms().map(|(k, c)| (k, s * c)))
    }

    /// `p(t) -> p(t^q)`.
    pub fn substitute_power(&self, q: u32) -> UPolynomial {
        UPolynomial::from_terms(self.terms().map(|(k, c)| (k * q, c)))
    }

    /// Parses forms like `2t^3 - 3t^2`, `t^3-3t`, `-t + 1`, `0`.
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).map(|c| if c == '\u{2212}' { '-' } else { c }).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut p = UPolynomial::zero();
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, c) in s.chars().enumerate() {
            if (c == '+' || c == '-') && i > 0 && !cur.ends_with('^') {
                terms.push(std::mem::take(&mut cur));
            }
            cur.push(c);
        }
        terms.push(cur);
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(b) => (true, b),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let bad = || Error::Parse(format!("bad term {term:?}"));
            let (coef, k) = match body.find('t') {
                None => (body.parse::<i64>().map_err(|_| bad())?, 0),
                Some(pos) => {
                    let cs = body[..pos].trim_end_matches('*');
                    let c = if cs.is_empty() { 1 } else { cs.parse::<i64>().map_err(|_| bad())? };
                    let rest = &body[pos + 1..];
                    let k = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^').ok_or_else(bad)?.parse::<u32>().map_err(|_| bad())?
                    };
                    (c, k)
                }
            };
            p.add_term(k, if neg { -coef } else { coef });
        }
        Ok(p)
    }
}

impl fmt::Display for UPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&k, &c) in self.coeffs.iter().rev() {
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.unsigned_abs();
            match k {
                0 => write!(f, "{a}")?,
                _ => {
                    if a != 1 {
                        write!(f, "{a}")?;
                    }
                    f.write_str("t")?;
                    if k > 1 {
                        write!(f, "^{k}")?;
                    }
                }
            }
            first = false;
        }
        Ok(())
    }
}
