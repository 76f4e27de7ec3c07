//! Brute-force cokernel counts over finite quotient rings
//! `Q = (Z/p^a)[X_1..X_n]/(total degree >= b)[G]`.
//!
//! The oracle reads only the integer coefficients of a presentation and does
//! its own ring arithmetic, so it shares no algebra with the Fitting,
//! Weierstrass or decomposition code it is meant to check.

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fpmod::Presentation;
use crate::groupring::AbelianGroupSpec;
use crate::padic::PrecisionContext;
use crate::structure::{decompose, Decomposition};

/// Default bound on `|Q|` and on the size of an exhaustively enumerated set.
pub const DEFAULT_CAP: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuotientSpec {
    pub p: u64,
    /// Coefficients live in `Z/p^a`.
    pub a: u32,
    /// Monomials of total degree `>= b` vanish.
    pub b: u32,
    pub level: usize,
    pub group: AbelianGroupSpec,
}

/// A cardinality `p^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cardinality {
    pub p: u64,
    pub exponent: u64,
}

impl Cardinality {
    pub fn value(&self) -> BigUint {
        BigUint::from(self.p).pow(self.exponent as u32)
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent {
            0 => f.write_str("1"),
            1 => write!(f, "{}", self.p),
            e => write!(f, "{}^{}", self.p, e),
        }
    }
}

/// How the image was counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Closure of the generators as a set of vectors.
    Enumeration,
    /// Full-pivot elimination over `Z/p^a` of the generator rows.
    Elimination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    pub cap: u64,
    pub parallel: bool,
    /// Force one counting method (for testing the two against each other).
    pub method: Option<Method>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_CAP,
            parallel: false,
            method: None,
        }
    }
}

/// The ring `Q` as a free `Z/p^a`-module with basis `X^alpha * g`.
struct QuotientRing {
    modulus: u64,
    /// Exponent vectors of the monomials of degree `< b`.
    monomials: Vec<Vec<u32>>,
    elements: Vec<Vec<u32>>,
    /// `mono_mul[i][j]`: index of `m_i * m_j`, or `None` if it vanishes.
    mono_mul: Vec<Vec<Option<usize>>>,
    group_mul: Vec<Vec<usize>>,
}

impl QuotientRing {
    fn new(spec: &FiniteQuotientSpec) -> Self {
        let mut monomials = Vec::new();
        let mut cur = vec![0u32; spec.level];
        enumerate_monomials(0, spec.b, &mut cur, &mut monomials);
        monomials.sort_by_key(|m| (m.iter().sum::<u32>(), std::cmp::Reverse(m.clone())));
        let index = |m: &[u32]| monomials.iter().position(|x| x == m);
        let mono_mul = monomials
            .iter()
            .map(|x| {
                monomials
                    .iter()
                    .map(|y| {
                        let z: Vec<u32> = x.iter().zip(y).map(|(s, t)| s + t).collect();
                        index(&z)
                    })
                    .collect()
            })
            .collect();
        let elements = spec.group.elements();
        let group_mul = elements
            .iter()
            .map(|g| {
                elements
                    .iter()
                    .map(|h| {
                        let gh = spec.group.op(g, h);
                        elements.iter().position(|x| *x == gh).expect("closed")
                    })
                    .collect()
            })
            .collect();
        QuotientRing {
            modulus: spec.p.pow(spec.a),
            monomials,
            elements,
            mono_mul,
            group_mul,
        }
    }

    fn rank(&self) -> usize {
        self.monomials.len() * self.elements.len()
    }

    fn basis_index(&self, mono: usize, g: usize) -> usize {
        mono * self.elements.len() + g
    }

    fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let ng = self.elements.len();
        let mut out = vec![0u64; self.rank()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                if let Some(m) = self.mono_mul[i / ng][j / ng] {
                    let k = self.basis_index(m, self.group_mul[i % ng][j % ng]);
                    out[k] = (out[k] + xi * yj) % self.modulus;
                }
            }
        }
        out
    }
}

fn enumerate_monomials(var: usize, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if var == cur.len() {
        out.push(cur.clone());
        return;
    }
    for e in 0..budget {
        cur[var] = e;
        enumerate_monomials(var + 1, budget - e, cur, out);
    }
    cur[var] = 0;
}

fn check_spec(p: &Presentation, spec: &FiniteQuotientSpec, cap: u64) -> Result<()> {
    let ctx = p.ctx();
    if spec.p != ctx.p() || spec.level != p.level() || &spec.group != p.group() {
        return Err(Error::ContextMismatch);
    }
    if spec.a == 0 || spec.b == 0 {
        return Err(Error::InvalidContext("quotient exponents must be positive".into()));
    }
    if spec.a > ctx.precision() || spec.b > ctx.degree_cap() {
        return Err(Error::InvalidContext(format!(
            "quotient (a={}, b={}) is finer than the working precision (N={}, D={})",
            spec.a,
            spec.b,
            ctx.precision(),
            ctx.degree_cap()
        )));
    }
    let ring_exponent = quotient_exponent(spec);
    let fits = (spec.p as f64).log2() * ring_exponent as f64 <= (cap as f64).log2() + 1e-9;
    if !fits {
        return Err(Error::CapExceeded {
            size: Cardinality { p: spec.p, exponent: ring_exponent }.to_string(),
            cap,
        });
    }
    Ok(())
}

/// `log_p |Q|`.
pub fn quotient_exponent(spec: &FiniteQuotientSpec) -> u64 {
    let mut monomials = Vec::new();
    enumerate_monomials(0, spec.b, &mut vec![0; spec.level], &mut monomials);
    spec.a as u64 * monomials.len() as u64 * spec.group.order()
}

/// The entries of `p` reduced into `Q`, row-major.
fn reduce_entries(p: &Presentation, spec: &FiniteQuotientSpec, ring: &QuotientRing) -> Vec<Vec<u64>> {
    let m = BigUint::from(ring.modulus);
    p.entries()
        .iter()
        .map(|e| {
            let mut v = vec![0u64; ring.rank()];
            for (gi, g) in ring.elements.iter().enumerate() {
                let s = e.coeff(g);
                for (mono, c) in s.terms() {
                    if mono.degree() >= spec.b {
                        continue;
                    }
                    let mi = ring
                        .monomials
                        .iter()
                        .position(|x| x.as_slice() == mono.exponents())
                        .expect("degree below b");
                    v[ring.basis_index(mi, gi)] = (c % &m).to_u64().expect("fits");
                }
            }
            v
        })
        .collect()
}

/// `|coker(Q^e -> Q^d)|` for the presentation reduced into `Q`.
pub fn coker_cardinality(
    p: &Presentation,
    spec: &FiniteQuotientSpec,
    options: &OracleOptions,
) -> Result<Cardinality> {
    check_spec(p, spec, options.cap)?;
    let ring = QuotientRing::new(spec);
    let entries = reduce_entries(p, spec, &ring);
    let (d, e, r) = (p.rows(), p.cols(), ring.rank());
    // Image of X^alpha * g * eps_k, one generator per basis element of Q^e.
    let mut generators = Vec::with_capacity(e * r);
    for k in 0..e {
        for b in 0..r {
            let mut basis = vec![0u64; r];
            basis[b] = 1;
            let mut v = Vec::with_capacity(d * r);
            for i in 0..d {
                v.extend(ring.mul(&entries[i * e + k], &basis));
            }
            if v.iter().any(|&x| x != 0) {
                generators.push(v);
            }
        }
    }
    let ambient = (d * r) as u64 * spec.a as u64;
    let ambient_fits = (spec.p as f64).log2() * ambient as f64 <= (options.cap as f64).log2() + 1e-9;
    let method = options.method.unwrap_or(if ambient_fits {
        Method::Enumeration
    } else {
        Method::Elimination
    });
    let image = match method {
        Method::Enumeration => {
            if !ambient_fits {
                return Err(Error::CapExceeded {
                    size: Cardinality { p: spec.p, exponent: ambient }.to_string(),
                    cap: options.cap,
                });
            }
            let size = enumerate_span(&generators, ring.modulus, d * r, options.parallel);
            log_p(size, spec.p)
        }
        Method::Elimination => span_exponent_by_elimination(generators, spec.p, spec.a),
    };
    Ok(Cardinality {
        p: spec.p,
        exponent: ambient - image,
    })
}

fn log_p(mut n: u64, p: u64) -> u64 {
    let mut e = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0);
        n /= p;
        e += 1;
    }
    e
}

/// Size of the additive subgroup of `(Z/m)^len` spanned by `generators`,
/// by closing a membership bitmap under addition of each generator.
fn enumerate_span(generators: &[Vec<u64>], m: u64, len: usize, parallel: bool) -> u64 {
    let encode = |v: &[u64]| v.iter().fold(0u64, |acc, &x| acc * m + x);
    let decode = |mut c: u64| {
        let mut v = vec![0u64; len];
        for slot in v.iter_mut().rev() {
            *slot = c % m;
            c /= m;
        }
        v
    };
    let add = |x: u64, y: &[u64]| {
        let xv = decode(x);
        let z: Vec<u64> = xv.iter().zip(y).map(|(a, b)| (a + b) % m).collect();
        encode(&z)
    };
    let total = m.pow(len as u32) as usize;
    let mut member = vec![false; total];
    let mut elements: Vec<u64> = vec![0];
    member[0] = true;
    for g in generators {
        // Add the cosets t + H for t = g, 2g, ... until t falls back into H.
        let base = elements.clone();
        let mut t = encode(g);
        while !member[t as usize] {
            let shifted: Vec<u64> = if parallel {
                base.par_iter().map(|&h| add(h, &decode(t))).collect()
            } else {
                let tv = decode(t);
                base.iter().map(|&h| add(h, &tv)).collect()
            };
            for c in shifted {
                if !member[c as usize] {
                    member[c as usize] = true;
                    elements.push(c);
                }
            }
            t = add(t, g);
        }
    }
    elements.len() as u64
}

/// `log_p` of the order of the row span of `rows` over `Z/p^a`: after full
/// pivoting on minimal valuation the span is `⊕ Z/p^(a - v_i)`.
fn span_exponent_by_elimination(mut rows: Vec<Vec<u64>>, p: u64, a: u32) -> u64 {
    let m = p.pow(a);
    let val = |x: u64| -> u32 {
        if x == 0 {
            return a;
        }
        let (mut x, mut v) = (x, 0);
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    };
    let inv = |x: u64| -> u64 {
        let (mut t, mut nt) = (0i128, 1i128);
        let (mut r, mut nr) = (m as i128, x as i128);
        while nr != 0 {
            let q = r / nr;
            (t, nt) = (nt, t - q * nt);
            (r, nr) = (nr, r - q * nr);
        }
        t.rem_euclid(m as i128) as u64
    };
    let cols = rows.first().map_or(0, Vec::len);
    let mut exponent = 0u64;
    let mut active_cols: Vec<usize> = (0..cols).collect();
    while !rows.is_empty() {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            for &j in &active_cols {
                let v = val(row[j]);
                if v < a && best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, i, j));
                }
            }
        }
        let Some((v, pi, pj)) = best else { break };
        let pivot_row = rows.swap_remove(pi);
        let pv = p.pow(v);
        let unit_inv = inv(pivot_row[pj] / pv);
        for row in rows.iter_mut() {
            if row[pj] == 0 {
                continue;
            }
            let factor = (row[pj] / pv) % m * unit_inv % m;
            for &j in &active_cols {
                row[j] = (row[j] + m - factor * pivot_row[j] % m) % m;
            }
        }
        active_cols.retain(|&j| j != pj);
        exponent += (a - v) as u64;
    }
    exponent
}

/// Cardinality predicted by a decomposition: the sum over its summands
/// `A/(d_k)` of the enumerated cardinalities of the `1 x 1` presentations.
pub fn predicted_cardinality(
    decomposition: &Decomposition,
    ctx: &PrecisionContext,
    spec: &FiniteQuotientSpec,
    options: &OracleOptions,
) -> Result<Cardinality> {
    let mut exponent = 0;
    for d in decomposition.summands() {
        let one_by_one = Presentation::from_series(1, 1, vec![d.to_series(ctx)])?;
        exponent += coker_cardinality(&one_by_one, spec, options)?.exponent;
    }
    Ok(Cardinality { p: spec.p, exponent })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossValidation {
    pub predicted: Cardinality,
    pub enumerated: Cardinality,
}

/// Compares the decomposition's predicted cokernel size with enumeration.
pub fn cross_validate(
    p: &Presentation,
    spec: &FiniteQuotientSpec,
    options: &OracleOptions,
) -> Result<CrossValidation> {
    let decomposition = decompose(p)?;
    cross_validate_with(p, &decomposition, spec, options)
}

/// As [`cross_validate`] against a given (possibly corrupted) decomposition.
pub fn cross_validate_with(
    p: &Presentation,
    decomposition: &Decomposition,
    spec: &FiniteQuotientSpec,
    options: &OracleOptions,
) -> Result<CrossValidation> {
    let predicted = predicted_cardinality(decomposition, p.ctx(), spec, options)?;
    let enumerated = coker_cardinality(p, spec, options)?;
    if predicted != enumerated {
        return Err(Error::Mismatch {
            predicted: predicted.to_string(),
            enumerated: enumerated.to_string(),
        });
    }
    Ok(CrossValidation { predicted, enumerated })
}
