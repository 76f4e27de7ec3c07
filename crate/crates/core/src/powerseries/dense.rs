//! Dense univariate polynomials over `Z/p^k`, the workhorse behind the
//! level-1 Weierstrass, gcd and factorisation routines.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::padic::valuation_capped;

/// The coefficient ring `Z/p^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Zpk {
    pub p: u64,
    pub k: u32,
    pub modulus: BigUint,
}

impl Zpk {
    pub fn new(p: u64, k: u32) -> Self {
        Zpk {
            p,
            k,
            modulus: BigUint::from(p).pow(k),
        }
    }

    pub fn reduce(&self, x: &BigUint) -> BigUint {
        x % &self.modulus
    }

    pub fn valuation(&self, x: &BigUint) -> u32 {
        valuation_capped(&self.reduce(x), self.p, self.k)
    }

    pub fn p_pow(&self, e: u32) -> BigUint {
        BigUint::from(self.p).pow(e)
    }
}

/// Coefficients in ascending degree; trimmed of trailing zeros.
pub(crate) type Poly = Vec<BigUint>;

pub(crate) fn trim(a: &mut Poly) {
    while a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
}

pub(crate) fn reduce(a: &[BigUint], r: &Zpk) -> Poly {
    let mut out: Poly = a.iter().map(|c| r.reduce(c)).collect();
    trim(&mut out);
    out
}

pub(crate) fn degree(a: &Poly) -> usize {
    a.len().saturating_sub(1)
}

pub(crate) fn mul(a: &[BigUint], b: &[BigUint], r: &Zpk) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigUint::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    reduce(&out, r)
}

pub(crate) fn sub(a: &[BigUint], b: &[BigUint], r: &Zpk) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigUint::zero();
    let out: Poly = (0..n)
        .map(|i| {
            let x = r.reduce(a.get(i).unwrap_or(&zero));
            let y = r.reduce(b.get(i).unwrap_or(&zero));
            (x + &r.modulus - y) % &r.modulus
        })
        .collect();
    reduce(&out, r)
}

/// Division with remainder by a monic divisor (exact over any `Z/p^k`).
pub(crate) fn divrem_monic(a: &[BigUint], b: &[BigUint], r: &Zpk) -> (Poly, Poly) {
    let b = reduce(b, r);
    debug_assert!(b.last().is_some_and(One::is_one), "divisor must be monic");
    let mut rem = reduce(a, r);
    let db = degree(&b);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![BigUint::zero(); rem.len() - db];
    for i in (0..quot.len()).rev() {
        let c = rem[i + db].clone();
        if c.is_zero() {
            continue;
        }
        quot[i] = c.clone();
        for (j, bj) in b.iter().enumerate() {
            let t = r.reduce(&(&c * bj));
            rem[i + j] = (&rem[i + j] + &r.modulus - t) % &r.modulus;
        }
    }
    trim(&mut rem);
    trim(&mut quot);
    (quot, rem)
}

/// Minimum coefficient valuation; `r.k` for the zero polynomial.
pub(crate) fn content_valuation(a: &[BigUint], r: &Zpk) -> u32 {
    a.iter().map(|c| r.valuation(c)).min().unwrap_or(r.k)
}

/// Divides every coefficient by `p^v` (all must be divisible), landing in `Z/p^(k-v)`.
pub(crate) fn div_p_pow(a: &[BigUint], v: u32, r: &Zpk) -> (Poly, Zpk) {
    let target = Zpk::new(r.p, r.k - v);
    let pv = r.p_pow(v);
    let out: Poly = a.iter().map(|c| r.reduce(c) / &pv).collect();
    (reduce(&out, &target), target)
}

pub(crate) fn is_monic(a: &Poly) -> bool {
    a.last().is_some_and(One::is_one)
}

/// Splits a primitive polynomial `g` over `Z/p^k` as `g = P * Q` with `P`
/// monic distinguished of degree `lambda` (first unit coefficient) and
/// `Q(0)` a unit, by linear Hensel lifting from `g = X^lambda * (g / X^lambda) mod p`.
///
/// Returns `(lambda, P, Q)`; the identity `P * Q = g` holds exactly over `Z/p^k`
/// and `deg Q <= deg g - lambda`.
pub(crate) fn hensel_split(g: &[BigUint], r: &Zpk) -> Option<(usize, Poly, Poly)> {
    let g = reduce(g, r);
    let lambda = g.iter().position(|c| r.valuation(c) == 0)?;
    let p = r.p;
    let mut big_p: Poly = vec![BigUint::zero(); lambda + 1];
    big_p[lambda] = BigUint::one();
    let mut q: Poly = g[lambda..].to_vec();
    if lambda == 0 {
        return Some((0, big_p, q));
    }
    // Everything below lives in F_p.
    let qbar: Vec<u64> = q.iter().map(|c| (c % p).to_u64().unwrap()).collect();
    let s = series_inverse_mod_p(&qbar, lambda, p);
    for step in 1..r.k {
        let e = sub(&g, &mul(&big_p, &q, r), r);
        if e.is_empty() {
            break;
        }
        let pk = r.p_pow(step);
        let ebar: Vec<u64> = e
            .iter()
            .map(|c| {
                debug_assert!((c % &pk).is_zero(), "Hensel invariant broken");
                ((c / &pk) % p).to_u64().unwrap()
            })
            .collect();
        // a = s * e mod (p, X^lambda)
        let mut a = vec![0u64; lambda];
        for (i, &si) in s.iter().enumerate() {
            for (j, &ej) in ebar.iter().enumerate() {
                if i + j < lambda {
                    a[i + j] = ((a[i + j] as u128 + si as u128 * ej as u128) % p as u128) as u64;
                }
            }
        }
        // b = (e - a * qbar) / X^lambda mod p
        let mut t: Vec<u64> = ebar.clone();
        let need = (a.len() + qbar.len()).max(t.len());
        t.resize(need, 0);
        for (i, &ai) in a.iter().enumerate() {
            for (j, &qj) in qbar.iter().enumerate() {
                let prod = (ai as u128 * qj as u128 % p as u128) as u64;
                t[i + j] = (t[i + j] + p - prod) % p;
            }
        }
        debug_assert!(t[..lambda].iter().all(|&c| c == 0));
        let b: Vec<u64> = t[lambda..].to_vec();
        for (i, ai) in a.iter().enumerate() {
            big_p[i] = r.reduce(&(&big_p[i] + &pk * *ai));
        }
        if q.len() < b.len() {
            q.resize(b.len(), BigUint::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            q[i] = r.reduce(&(&q[i] + &pk * *bi));
        }
        trim(&mut q);
    }
    debug_assert!(sub(&g, &mul(&big_p, &q, r), r).is_empty());
    Some((lambda, big_p, q))
}

// Inverse of a power series with unit constant term, modulo (p, X^n).
fn series_inverse_mod_p(a: &[u64], n: usize, p: u64) -> Vec<u64> {
    let inv0 = inverse_mod_u64(a[0] % p, p);
    let mut out = vec![0u64; n];
    out[0] = inv0;
    for k in 1..n {
        let mut acc = 0u128;
        for j in 1..=k.min(a.len() - 1) {
            acc += a[j] as u128 * out[k - j] as u128;
        }
        let neg = (p - (acc % p as u128) as u64) % p;
        out[k] = (neg as u128 * inv0 as u128 % p as u128) as u64;
    }
    out
}

fn inverse_mod_u64(a: u64, p: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (p as i128, a as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(p as i128) as u64
}
