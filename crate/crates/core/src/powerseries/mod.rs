//! Sparse truncated power series in `R_n = Z_p[[X_1, ..., X_n]]`.
//!
//! Elements are stored modulo the ideal `(p^N) + (total degree >= D)`; the
//! level maps `project_down`, `project_to` and `include_up` are exact ring
//! maps on these quotients because the cap is on total degree.

mod canonical;
pub(crate) mod dense;
mod parse;

pub(crate) use parse::parse_terms;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::padic::{invert_mod, PadicInt, PrecisionContext};

pub use canonical::{
    factor_distinguished, gcd_level1, split_x_power, weierstrass_prepare, CanonicalForm,
    DistinguishedPoly, WeierstrassData,
};

/// Exponent vector, ordered graded-lexicographically with `X_1 > X_2 > ...`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(level: usize) -> Self {
        Monomial(vec![0; level])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn level(&self) -> usize {
        self.0.len()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn times(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub(crate) fn fmt_vars(&self, f: &mut impl fmt::Write) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_char('*')?;
            }
            first = false;
            if e == 1 {
                write!(f, "X{}", i + 1)?;
            } else {
                write!(f, "X{}^{}", i + 1, e)?;
            }
        }
        Ok(())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A truncated element of `R_n` at a precision context.
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    ctx: PrecisionContext,
    level: usize,
    terms: BTreeMap<Monomial, BigUint>,
}

impl Series {
    pub fn zero(ctx: &PrecisionContext, level: usize) -> Self {
        Series {
            ctx: ctx.clone(),
            level,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &PrecisionContext, level: usize) -> Self {
        Self::constant(ctx, level, &BigInt::one())
    }

    pub fn constant(ctx: &PrecisionContext, level: usize, c: &BigInt) -> Self {
        let mut s = Self::zero(ctx, level);
        s.insert(Monomial::one(level), ctx.reduce_signed(c));
        s
    }

    pub fn from_i64(ctx: &PrecisionContext, level: usize, c: i64) -> Self {
        Self::constant(ctx, level, &BigInt::from(c))
    }

    /// The variable `X_i`, 1-based.
    pub fn variable(ctx: &PrecisionContext, level: usize, i: usize) -> Result<Self> {
        if i == 0 || i > level {
            return Err(Error::UnsupportedShape(format!(
                "variable X{i} does not exist at level {level}"
            )));
        }
        let mut e = vec![0; level];
        e[i - 1] = 1;
        Self::from_terms(ctx, level, [(e, BigInt::one())])
    }

    pub fn from_terms<I>(ctx: &PrecisionContext, level: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigInt)>,
    {
        let mut s = Self::zero(ctx, level);
        for (exps, c) in terms {
            if exps.len() != level {
                return Err(Error::UnsupportedShape(format!(
                    "exponent vector of length {} at level {level}",
                    exps.len()
                )));
            }
            let m = Monomial(exps);
            let c = ctx.reduce_signed(&c);
            let entry = s.terms.remove(&m).unwrap_or_default() + c;
            s.insert(m, entry);
        }
        Ok(s)
    }

    /// Dense level-1 constructor from coefficients of `1, X, X^2, ...`.
    pub fn from_coeffs(ctx: &PrecisionContext, coeffs: &[BigUint]) -> Self {
        let mut s = Self::zero(ctx, 1);
        for (i, c) in coeffs.iter().enumerate() {
            s.insert(Monomial(vec![i as u32]), c.clone());
        }
        s
    }

    pub fn parse(ctx: &PrecisionContext, level: usize, text: &str) -> Result<Self> {
        let terms = parse::parse_terms(text, level, 0)
            .map_err(|e| Error::UnsupportedShape(format!("cannot parse series '{text}': {e}")))?;
        Self::from_terms(ctx, level, terms.into_iter().map(|(x, _, c)| (x, c)))
    }

    // Stores `c` reduced; drops zeros and terms beyond the degree cap.
    fn insert(&mut self, m: Monomial, c: BigUint) {
        if m.degree() >= self.ctx.degree_cap() {
            return;
        }
        let c = self.ctx.reduce(&c);
        if c.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigUint)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exponents: &[u32]) -> PadicInt {
        let c = self
            .terms
            .get(&Monomial(exponents.to_vec()))
            .cloned()
            .unwrap_or_default();
        PadicInt::from_residue(&self.ctx, c)
    }

    pub fn constant_term(&self) -> BigUint {
        self.terms
            .get(&Monomial::one(self.level))
            .cloned()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    fn check(&self, other: &Series) -> Result<()> {
        if self.level == other.level && self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Series) -> Series {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let sum = out.terms.remove(m).unwrap_or_default() + c;
            out.insert(m.clone(), sum);
        }
        out
    }

    pub(crate) fn sub_unchecked(&self, other: &Series) -> Series {
        self.add_unchecked(&other.neg())
    }

    pub(crate) fn mul_unchecked(&self, other: &Series) -> Series {
        let cap = self.ctx.degree_cap();
        let mut acc: BTreeMap<Monomial, BigUint> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            for (mb, cb) in &other.terms {
                if da + mb.degree() >= cap {
                    continue;
                }
                *acc.entry(ma.times(mb)).or_default() += ca * cb;
            }
        }
        let mut out = Series::zero(&self.ctx, self.level);
        for (m, c) in acc {
            out.insert(m, c);
        }
        out
    }

    pub fn neg(&self) -> Series {
        let modulus = self.ctx.modulus();
        Series {
            ctx: self.ctx.clone(),
            level: self.level,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), modulus - c))
                .collect(),
        }
    }

    pub fn scale(&self, c: &BigUint) -> Series {
        let mut out = Series::zero(&self.ctx, self.level);
        for (m, a) in &self.terms {
            out.insert(m.clone(), a * c);
        }
        out
    }

    pub fn scale_i64(&self, c: i64) -> Series {
        self.scale(&self.ctx.reduce_signed(&BigInt::from(c)))
    }

    pub fn pow(&self, e: u32) -> Series {
        let mut out = Series::one(&self.ctx, self.level);
        for _ in 0..e {
            out = out.mul_unchecked(self);
        }
        out
    }

    /// `rho_n`: substitute `X_n := 0` and drop the last variable.
    pub fn project_down(&self) -> Result<Series> {
        if self.level == 0 {
            return Err(Error::LevelUnderflow);
        }
        let mut out = Series::zero(&self.ctx, self.level - 1);
        for (m, c) in &self.terms {
            if m.0[self.level - 1] == 0 {
                out.terms
                    .insert(Monomial(m.0[..self.level - 1].to_vec()), c.clone());
            }
        }
        Ok(out)
    }

    /// `rho_<n>`: substitute `X_i := 0` for every `i > n`.
    pub fn project_to(&self, n: usize) -> Result<Series> {
        if n > self.level {
            return Err(Error::UnsupportedShape(format!(
                "cannot project level {} to higher level {n}",
                self.level
            )));
        }
        let mut out = Series::zero(&self.ctx, n);
        for (m, c) in &self.terms {
            if m.0[n..].iter().all(|&e| e == 0) {
                out.terms.insert(Monomial(m.0[..n].to_vec()), c.clone());
            }
        }
        Ok(out)
    }

    /// `iota`: the natural inclusion into a level `m >= n` ring.
    pub fn include_up(&self, m: usize) -> Result<Series> {
        if m < self.level {
            return Err(Error::UnsupportedShape(format!(
                "cannot include level {} into lower level {m}",
                self.level
            )));
        }
        let mut out = Series::zero(&self.ctx, m);
        for (mono, c) in &self.terms {
            let mut e = mono.0.clone();
            e.resize(m, 0);
            out.terms.insert(Monomial(e), c.clone());
        }
        Ok(out)
    }

    pub fn is_unit(&self) -> bool {
        self.ctx.valuation(&self.constant_term()) == 0
    }

    /// Inverse at precision. With `f = c(1 - h)`, `h` has no constant term
    /// and `h^D` vanishes, so the geometric series terminates.
    pub fn inverse(&self) -> Result<Series> {
        let c_inv = invert_mod(&self.constant_term(), self.ctx.modulus(), self.ctx.p())?;
        let one = Series::one(&self.ctx, self.level);
        let h = one.sub_unchecked(&self.scale(&c_inv));
        let mut sum = one.clone();
        let mut power = one;
        for _ in 1..self.ctx.degree_cap() {
            power = power.mul_unchecked(&h);
            if power.is_zero() {
                break;
            }
            sum = sum.add_unchecked(&power);
        }
        Ok(sum.scale(&c_inv))
    }

    /// Level-1 coefficients of `1, X, ..., X^(D-1)`.
    pub(crate) fn dense_coeffs(&self) -> Vec<BigUint> {
        debug_assert_eq!(self.level, 1);
        let mut out = vec![BigUint::zero(); self.ctx.degree_cap() as usize];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        out
    }

    /// Symmetric representative of a residue, for display.
    pub(crate) fn signed(&self, c: &BigUint) -> BigInt {
        signed_residue(c, self.ctx.modulus())
    }
}

pub(crate) fn signed_residue(c: &BigUint, modulus: &BigUint) -> BigInt {
    if c * 2u32 > *modulus {
        -BigInt::from(modulus - c)
    } else {
        BigInt::from(c.clone())
    }
}

/// Writes `c * monomial` terms joined by ` + ` / ` - `; an empty monomial
/// string marks the constant term.
pub(crate) fn write_terms(out: &mut impl fmt::Write, terms: &[(BigInt, String)]) -> fmt::Result {
    if terms.is_empty() {
        return out.write_char('0');
    }
    for (i, (c, mono)) in terms.iter().enumerate() {
        let negative = *c < BigInt::zero();
        let abs = if negative { -c.clone() } else { c.clone() };
        match (i, negative) {
            (0, true) => out.write_char('-')?,
            (0, false) => {}
            (_, true) => out.write_str(" - ")?,
            (_, false) => out.write_str(" + ")?,
        }
        if mono.is_empty() {
            write!(out, "{abs}")?;
        } else if abs.is_one() {
            out.write_str(mono)?;
        } else {
            write!(out, "{abs} * {mono}")?;
        }
    }
    Ok(())
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<(BigInt, String)> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut mono = String::new();
                m.fmt_vars(&mut mono).expect("writing to a String");
                (self.signed(c), mono)
            })
            .collect();
        write_terms(f, &terms)
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[L{}] {}", self.level, self)
    }
}
