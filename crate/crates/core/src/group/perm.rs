use super::FiniteGroup;
use crate::error::{Error, Result};
use std::collections::HashMap;

/// Builds the group of the given permutations (identity first, all distinct,
/// closed under composition). The product `a * b` is `a` after `b`, so the
/// returned rows form a left action: `perm[a*b][w] = perm[a][perm[b][w]]`.
pub fn perm_group(name: impl Into<String>, perms: Vec<Vec<usize>>) -> Result<(FiniteGroup, Vec<Vec<usize>>)> {
    let n = perms.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty permutation list".into()));
    }
    let m = perms[0].len();
    if perms[0].iter().enumerate().any(|(i, &x)| i != x) {
        return Err(Error::InvalidParameter("first permutation must be the identity".into()));
    }
    let mut index = HashMap::with_capacity(n);
    for (i, p) in perms.iter().enumerate() {
        if p.len() != m || !is_permutation(p) {
            return Err(Error::InvalidParameter(format!("row {i} is not a permutation of {m} points")));
        }
        if index.insert(p.clone(), i).is_some() {
            return Err(Error::InvalidParameter(format!("row {i} repeats an earlier permutation")));
        }
    }
    let mut table = vec![vec![0usize; n]; n];
    let mut buf = vec![0usize; m];
    for a in 0..n {
        for b in 0..n {
            for w in 0..m {
                buf[w] = perms[a][perms[b][w]];
            }
            table[a][b] = *index
                .get(&buf)
                .ok_or_else(|| Error::InvalidParameter(format!("permutations not closed: rows {a} and {b}")))?;
        }
    }
    let labels = perms.iter().map(|p| cycle_notation(p)).collect();
    let g = FiniteGroup::from_table(name, &table, Some(labels), false)?;
    Ok((g, perms))
}

pub(crate) fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

pub(crate) fn is_even(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0;
    for start in 0..p.len() {
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x];
            len += 1;
        }
        if len > 0 {
            transpositions += len - 1;
        }
    }
    transpositions % 2 == 0
}

/// 1-based cycle notation, e.g. `(1 2 3)`; the identity is `()`.
pub fn cycle_notation(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            cycle.push((x + 1).to_string());
            x = p[x];
        }
        out.push('(');
        out.push_str(&cycle.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels() {
        assert_eq!(cycle_notation(&[0, 1, 2]), "()");
        assert_eq!(cycle_notation(&[1, 0, 2]), "(1 2)");
        assert_eq!(cycle_notation(&[1, 2, 0]), "(1 2 3)");
        assert_eq!(cycle_notation(&[1, 0, 3, 2]), "(1 2)(3 4)");
    }

    #[test]
    fn parity() {
        assert!(is_even(&[0, 1, 2]));
        assert!(!is_even(&[1, 0, 2]));
        assert!(is_even(&[1, 2, 0]));
    }

    #[test]
    fn rejects_non_closed() {
        let err = perm_group("x", vec![vec![0, 1, 2], vec![1, 2, 0]]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }
}
