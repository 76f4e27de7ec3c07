//! Determinants and minors over the commutative rings of this crate.
//!
//! Two independent routes: memoised Laplace expansion (used for all minors)
//! and the Leibniz permutation sum (used for square determinants).

use std::collections::HashMap;

use crate::groupring::GroupRingElement;
use crate::powerseries::Series;

pub(crate) trait RingOps: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add_r(&self, other: &Self) -> Self;
    fn sub_r(&self, other: &Self) -> Self;
    fn mul_r(&self, other: &Self) -> Self;
    fn is_zero_r(&self) -> bool;
}

impl RingOps for Series {
    fn zero_like(&self) -> Self {
        Series::zero(self.ctx(), self.level())
    }
    fn one_like(&self) -> Self {
        Series::one(self.ctx(), self.level())
    }
    fn add_r(&self, other: &Self) -> Self {
        self.add_unchecked(other)
    }
    fn sub_r(&self, other: &Self) -> Self {
        self.sub_unchecked(other)
    }
    fn mul_r(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero()
    }
}

impl RingOps for GroupRingElement {
    fn zero_like(&self) -> Self {
        GroupRingElement::zero(self.ctx(), self.level(), self.group())
    }
    fn one_like(&self) -> Self {
        GroupRingElement::one(self.ctx(), self.level(), self.group())
    }
    fn add_r(&self, other: &Self) -> Self {
        self.add_unchecked(other)
    }
    fn sub_r(&self, other: &Self) -> Self {
        self.add_unchecked(&other.neg())
    }
    fn mul_r(&self, other: &Self) -> Self {
        self.mul_unchecked(other)
    }
    fn is_zero_r(&self) -> bool {
        self.is_zero()
    }
}

/// Memoised Laplace expansion over a row-major `rows x cols` matrix.
/// Minors are keyed by (row mask, column mask); `rows, cols <= 16`.
pub(crate) struct MinorCache<'a, T: RingOps> {
    entries: &'a [T],
    cols: usize,
    memo: HashMap<(u16, u16), T>,
}

impl<'a, T: RingOps> MinorCache<'a, T> {
    pub fn new(entries: &'a [T], cols: usize) -> Self {
        MinorCache {
            entries,
            cols,
            memo: HashMap::new(),
        }
    }

    /// Determinant of the submatrix on the given (sorted) rows and columns.
    pub fn minor(&mut self, rows: &[usize], cols: &[usize]) -> T {
        let rmask = rows.iter().fold(0u16, |m, &r| m | 1 << r);
        let cmask = cols.iter().fold(0u16, |m, &c| m | 1 << c);
        self.minor_masked(rmask, cmask)
    }

    fn minor_masked(&mut self, rmask: u16, cmask: u16) -> T {
        if rmask == 0 {
            return self.entries[0].one_like();
        }
        if let Some(v) = self.memo.get(&(rmask, cmask)) {
            return v.clone();
        }
        let r0 = rmask.trailing_zeros() as usize;
        let rest = rmask & !(1 << r0);
        let mut acc = self.entries[0].zero_like();
        let mut sign_positive = true;
        for c in 0..16usize {
            if cmask & (1 << c) == 0 {
                continue;
            }
            let a = &self.entries[r0 * self.cols + c];
            if !a.is_zero_r() {
                let sub = self.minor_masked(rest, cmask & !(1 << c));
                let term = a.mul_r(&sub);
                acc = if sign_positive { acc.add_r(&term) } else { acc.sub_r(&term) };
            }
            sign_positive = !sign_positive;
        }
        self.memo.insert((rmask, cmask), acc.clone());
        acc
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Leibniz determinant of a square `d x d` row-major matrix.
pub(crate) fn leibniz_det<T: RingOps>(entries: &[T], d: usize) -> T {
    let mut acc = entries[0].zero_like();
    let mut perm: Vec<usize> = (0..d).collect();
    let mut c = vec![0usize; d];
    let mut even = true;
    let add_term = |perm: &[usize], even: bool, acc: &mut T| {
        let mut term = entries[0].one_like();
        for (i, &j) in perm.iter().enumerate() {
            let a = &entries[i * d + j];
            if a.is_zero_r() {
                return;
            }
            term = term.mul_r(a);
        }
        *acc = if even { acc.add_r(&term) } else { acc.sub_r(&term) };
    };
    add_term(&perm, even, &mut acc);
    // Heap's algorithm; every swap flips the sign.
    let mut i = 1;
    while i < d {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            even = !even;
            add_term(&perm, even, &mut acc);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PrecisionContext;

    #[test]
    fn laplace_and_leibniz_agree() {
        let ctx = PrecisionContext::new(7, 4, 6).unwrap();
        let texts = [
            "1 + X1", "7", "X1^2", "3 - X1", "2", "X1 + 49", "5*X1", "1", "X1^3 + 7",
        ];
        let m: Vec<Series> = texts.iter().map(|t| Series::parse(&ctx, 1, t).unwrap()).collect();
        let lap = MinorCache::new(&m, 3).minor(&[0, 1, 2], &[0, 1, 2]);
        let lei = leibniz_det(&m, 3);
        assert_eq!(lap, lei);
        assert!(!lap.is_zero());
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
