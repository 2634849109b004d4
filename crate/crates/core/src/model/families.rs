use super::VirtualString;
use crate::error::{Error, Result};

/// The string of a permutation `σ` of `{1..m}`, given in one-line form
/// (`sigma[i-1] = σ(i)`).
///
/// Endpoints run `a_1..a_m, b_m..b_1` around the circle and arrow `e_i`
/// is `(a_i, b_σ(i))`.
pub fn permutation_string(sigma: &[usize]) -> Result<VirtualString> {
    let m = sigma.len();
    let mut seen = vec![false; m + 1];
    for &v in sigma {
        if v == 0 || v > m || seen[v] {
            return Err(Error::Precondition(format!("{sigma:?} is not a permutation of 1..{m}")));
        }
        seen[v] = true;
    }
    let arrows = sigma.iter().enumerate().map(|(i, &v)| (i, 2 * m - v)).collect();
    VirtualString::from_arrows(arrows)
}

/// `σ(i) = i+q` for `i ≤ p` and `σ(i) = i-p` otherwise.
pub fn lattice_permutation(p: usize, q: usize) -> Vec<usize> {
    (1..=p + q).map(|i| if i <= p { i + q } else { i - p }).collect()
}

pub fn lattice_string(p: usize, q: usize) -> Result<VirtualString> {
    if p == 0 || q == 0 {
        return Err(Error::Precondition("lattice string needs p, q >= 1".into()));
    }
    permutation_string(&lattice_permutation(p, q))
}

/// Two lattice blocks separated by a fixed point; the cobracket of its
/// string is `<α_{p',q'}> ⊗ <α_{p,q}> - <α_{p,q}> ⊗ <α_{p',q'}>`.
pub fn family4_permutation(p: usize, q: usize, p2: usize, q2: usize) -> Vec<usize> {
    let m = p + q + p2 + q2 + 1;
    (1..=m)
        .map(|i| {
            if i <= p {
                i + q
            } else if i <= p + q {
                i - p
            } else if i == p + q + 1 {
                i
            } else if i <= p + q + 1 + p2 {
                i + q2
            } else {
                i - p2
            }
        })
        .collect()
}

/// Parses cycle notation such as `(134)(2)` or `(1 3 4)(2)`, or a one-line
/// list such as `3 2 4 1`. Returns the one-line form. For cycle notation the
/// size is the largest element mentioned unless `size` is given.
pub fn parse_permutation(text: &str, size: Option<usize>) -> Result<Vec<usize>> {
    let text = text.trim();
    if text.contains('(') {
        let mut cycles: Vec<Vec<usize>> = Vec::new();
        let mut rest = text;
        while let Some(start) = rest.find('(') {
            if !rest[..start].trim().is_empty() {
                return Err(Error::Parse(format!("unexpected text {:?}", &rest[..start])));
            }
            let end = rest[start..].find(')').ok_or_else(|| Error::Parse("unclosed cycle".into()))? + start;
            let body = &rest[start + 1..end];
            let elems: Vec<usize> = if body.contains([',', ' ']) {
                body.split([',', ' ']).filter(|t| !t.is_empty()).map(parse_num).collect::<Result<_>>()?
            } else {
                body.chars().map(|c| parse_num(&c.to_string())).collect::<Result<_>>()?
            };
            cycles.push(elems);
            rest = &rest[end + 1..];
        }
        if !rest.trim().is_empty() {
            return Err(Error::Parse(format!("unexpected text {rest:?}")));
        }
        let m = size.unwrap_or_else(|| cycles.iter().flatten().copied().max().unwrap_or(0));
        let mut sigma: Vec<usize> = (1..=m).collect();
        let mut touched = vec![false; m + 1];
        for c in &cycles {
            for (k, &x) in c.iter().enumerate() {
                if x == 0 || x > m || touched[x] {
                    return Err(Error::Parse(format!("bad or repeated element {x}")));
                }
                touched[x] = true;
                sigma[x - 1] = c[(k + 1) % c.len()];
            }
        }
        Ok(sigma)
    } else {
        let sigma: Vec<usize> =
            text.split([',', ' ']).filter(|t| !t.is_empty()).map(parse_num).collect::<Result<_>>()?;
        if let Some(m) = size {
            if m != sigma.len() {
                return Err(Error::Parse(format!("expected {m} values, got {}", sigma.len())));
            }
        }
        let mut seen = vec![false; sigma.len() + 1];
        for &v in &sigma {
            if v == 0 || v > sigma.len() || seen[v] {
                return Err(Error::Parse(format!("{sigma:?} is not a permutation")));
            }
            seen[v] = true;
        }
        Ok(sigma)
    }
}

fn parse_num(t: &str) -> Result<usize> {
    t.trim().parse().map_err(|_| Error::Parse(format!("not a number: {t:?}")))
}
