//! Parser for the textual term format `c * X1^a1*X2^a2*s1^k1`.
//!
//! `X<i>` are the power series variables, `s<i>` the generators of the
//! cyclic factors of the group. Coefficients are (signed) integers; a term
//! may contain several integer factors, which are multiplied.

use num_bigint::BigInt;
use num_traits::One;

pub(crate) type Term = (Vec<u32>, Vec<u32>, BigInt);

pub(crate) fn parse_terms(text: &str, level: usize, group_rank: usize) -> Result<Vec<Term>, String> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".into());
    }
    let mut terms = Vec::new();
    let mut sign = 1i32;
    let mut current = String::new();
    for (i, ch) in compact.chars().enumerate() {
        if (ch == '+' || ch == '-') && i > 0 && !current.is_empty() && !current.ends_with('^') {
            terms.push(parse_term(&current, sign, level, group_rank)?);
            current.clear();
            sign = if ch == '-' { -1 } else { 1 };
        } else if (ch == '+' || ch == '-') && current.is_empty() {
            if ch == '-' {
                sign = -sign;
            }
        } else {
            current.push(ch);
        }
    }
    if current.is_empty() {
        return Err("dangling operator".into());
    }
    terms.push(parse_term(&current, sign, level, group_rank)?);
    Ok(terms)
}

fn parse_term(text: &str, sign: i32, level: usize, group_rank: usize) -> Result<Term, String> {
    let mut coeff = BigInt::from(sign);
    let mut xs = vec![0u32; level];
    let mut gs = vec![0u32; group_rank];
    for factor in text.split('*') {
        if factor.is_empty() {
            return Err(format!("empty factor in '{text}'"));
        }
        let (base, exp) = match factor.split_once('^') {
            Some((b, e)) => (
                b,
                e.parse::<u32>()
                    .map_err(|_| format!("bad exponent '{e}' in '{factor}'"))?,
            ),
            None => (factor, 1),
        };
        if let Some(idx) = base.strip_prefix('X') {
            let i = parse_index(idx, level, 'X')?;
            xs[i] += exp;
        } else if let Some(idx) = base.strip_prefix('s') {
            let i = parse_index(idx, group_rank, 's')?;
            gs[i] += exp;
        } else {
            let c: BigInt = base
                .parse()
                .map_err(|_| format!("bad coefficient '{base}'"))?;
            let mut pow = BigInt::one();
            for _ in 0..exp {
                pow *= &c;
            }
            coeff *= pow;
        }
    }
    Ok((xs, gs, coeff))
}

fn parse_index(idx: &str, bound: usize, letter: char) -> Result<usize, String> {
    let i: usize = idx
        .parse()
        .map_err(|_| format!("bad index in '{letter}{idx}'"))?;
    if i == 0 || i > bound {
        return Err(format!("{letter}{i} out of range (have {bound})"));
    }
    Ok(i - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_terms() {
        let t = parse_terms("5 + X1 - 3 * X1^2*X2", 2, 0).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t[0], (vec![0, 0], vec![], BigInt::from(5)));
        assert_eq!(t[1], (vec![1, 0], vec![], BigInt::from(1)));
        assert_eq!(t[2], (vec![2, 1], vec![], BigInt::from(-3)));
        let t = parse_terms("-X1*s1^3 + 2*5", 1, 1).unwrap();
        assert_eq!(t[0], (vec![1], vec![3], BigInt::from(-1)));
        assert_eq!(t[1], (vec![0], vec![0], BigInt::from(10)));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_terms("", 1, 0).is_err());
        assert!(parse_terms("X3", 2, 0).is_err());
        assert!(parse_terms("5 +", 1, 0).is_err());
        assert!(parse_terms("y", 1, 0).is_err());
        assert!(parse_terms("X1^a", 1, 0).is_err());
    }
}
