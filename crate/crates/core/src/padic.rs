//! Fixed-precision arithmetic in `Z_p`, realised as residues modulo `p^N`.
//!
//! A [`PrecisionContext`] fixes the prime `p`, the coefficient precision `N`
//! and the total-degree cap `D` used by the power series layer. Every value
//! carries its context; arithmetic between different contexts is rejected.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

struct ContextInner {
    p: u64,
    precision: u32,
    degree_cap: u32,
    // powers[k] = p^k for k = 0..=precision
    powers: Vec<BigUint>,
}

/// The computational universe: prime `p`, precision `N` (work modulo `p^N`)
/// and degree cap `D` (strict bound on total degree).
#[derive(Clone)]
pub struct PrecisionContext(Arc<ContextInner>);

impl PrecisionContext {
    pub fn new(p: u64, precision: u32, degree_cap: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidContext(format!("{p} is not prime")));
        }
        if precision == 0 {
            return Err(Error::InvalidContext("precision N must be >= 1".into()));
        }
        if degree_cap == 0 {
            return Err(Error::InvalidContext("degree cap D must be >= 1".into()));
        }
        let pb = BigUint::from(p);
        let mut powers = Vec::with_capacity(precision as usize + 1);
        powers.push(BigUint::one());
        for k in 0..precision as usize {
            let next = &powers[k] * &pb;
            powers.push(next);
        }
        Ok(PrecisionContext(Arc::new(ContextInner {
            p,
            precision,
            degree_cap,
            powers,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    /// Coefficient precision `N`.
    pub fn precision(&self) -> u32 {
        self.0.precision
    }

    /// Total-degree cap `D`.
    pub fn degree_cap(&self) -> u32 {
        self.0.degree_cap
    }

    /// `p^N`.
    pub fn modulus(&self) -> &BigUint {
        &self.0.powers[self.0.precision as usize]
    }

    /// `p^k` for `k <= N`.
    pub fn p_pow(&self, k: u32) -> &BigUint {
        &self.0.powers[k as usize]
    }

    pub fn reduce(&self, x: &BigUint) -> BigUint {
        x % self.modulus()
    }

    pub fn reduce_signed(&self, x: &BigInt) -> BigUint {
        reduce_signed(x, self.modulus())
    }

    /// p-adic valuation of a residue, capped at `N`.
    pub fn valuation(&self, x: &BigUint) -> u32 {
        valuation_capped(x, self.p(), self.precision())
    }

    pub fn same_as(&self, other: &PrecisionContext) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self == other
    }
}

impl PartialEq for PrecisionContext {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p
            && self.0.precision == other.0.precision
            && self.0.degree_cap == other.0.degree_cap
    }
}

impl Eq for PrecisionContext {}

impl fmt::Debug for PrecisionContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ctx(p={}, N={}, D={})", self.p(), self.precision(), self.degree_cap())
    }
}

/// Trial-division primality test; inputs are desk-scale.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn reduce_signed(x: &BigInt, modulus: &BigUint) -> BigUint {
    let m = BigInt::from_biguint(Sign::Plus, modulus.clone());
    x.mod_floor(&m).to_biguint().expect("mod_floor is non-negative")
}

/// Largest `k <= cap` with `p^k | x`; returns `cap` for `x = 0`.
pub(crate) fn valuation_capped(x: &BigUint, p: u64, cap: u32) -> u32 {
    if x.is_zero() {
        return cap;
    }
    let pb = BigUint::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while v < cap {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            break;
        }
        y = q;
        v += 1;
    }
    v
}

/// Order of vanishing at precision. `exact == false` means the residue is
/// zero modulo `p^N`, so the true valuation is only known to be `>= N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Valuation {
    pub value: u32,
    pub exact: bool,
}

/// An element of `Z_p` known modulo `p^N`.
#[derive(Clone, PartialEq, Eq)]
pub struct PadicInt {
    ctx: PrecisionContext,
    residue: BigUint,
}

impl PadicInt {
    pub fn new(ctx: &PrecisionContext, value: i64) -> Self {
        Self::from_bigint(ctx, &BigInt::from(value))
    }

    pub fn from_bigint(ctx: &PrecisionContext, value: &BigInt) -> Self {
        PadicInt {
            ctx: ctx.clone(),
            residue: ctx.reduce_signed(value),
        }
    }

    pub fn from_residue(ctx: &PrecisionContext, residue: BigUint) -> Self {
        PadicInt {
            residue: ctx.reduce(&residue),
            ctx: ctx.clone(),
        }
    }

    pub fn zero(ctx: &PrecisionContext) -> Self {
        Self::new(ctx, 0)
    }

    pub fn one(ctx: &PrecisionContext) -> Self {
        Self::new(ctx, 1)
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn is_zero(&self) -> bool {
        self.residue.is_zero()
    }

    fn check(&self, other: &PadicInt) -> Result<()> {
        if self.ctx.same_as(&other.ctx) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(Self::from_residue(&self.ctx, &self.residue + &other.residue))
    }

    pub fn sub(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(Self::from_residue(
            &self.ctx,
            &self.residue + self.ctx.modulus() - &other.residue,
        ))
    }

    pub fn mul(&self, other: &PadicInt) -> Result<PadicInt> {
        self.check(other)?;
        Ok(Self::from_residue(&self.ctx, &self.residue * &other.residue))
    }

    pub fn neg(&self) -> PadicInt {
        Self::from_residue(&self.ctx, self.ctx.modulus() - &self.residue)
    }

    pub fn pow(&self, e: u64) -> PadicInt {
        PadicInt {
            residue: self.residue.modpow(&BigUint::from(e), self.ctx.modulus()),
            ctx: self.ctx.clone(),
        }
    }

    pub fn val_p(&self) -> Valuation {
        let value = self.ctx.valuation(&self.residue);
        Valuation {
            value,
            exact: !self.residue.is_zero(),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.val_p().value == 0
    }

    /// Multiplicative inverse modulo `p^N`.
    pub fn invert(&self) -> Result<PadicInt> {
        let inv = invert_mod(&self.residue, self.ctx.modulus(), self.ctx.p())?;
        Ok(PadicInt {
            residue: inv,
            ctx: self.ctx.clone(),
        })
    }

    /// `x / p^k` when `p^k | x`, i.e. the unit part when `k = val_p(x)`.
    pub fn unit_part(&self) -> (u32, PadicInt) {
        let v = self.val_p().value;
        let q = &self.residue / self.ctx.p_pow(v);
        (v, Self::from_residue(&self.ctx, q))
    }

    /// Teichmüller representative of `a`: the `(p-1)`-st root of unity
    /// congruent to `a` modulo `p`, found by iterating `x -> x^p`.
    pub fn teichmuller(ctx: &PrecisionContext, a: i64) -> Result<PadicInt> {
        let mut x = Self::new(ctx, a);
        if !x.is_unit() {
            return Err(Error::NotAUnit);
        }
        loop {
            let next = x.pow(ctx.p());
            if next == x {
                return Ok(x);
            }
            x = next;
        }
    }

    pub fn to_i64_symmetric(&self) -> Option<i64> {
        let half = self.ctx.modulus() / 2u32;
        if self.residue > half {
            (self.ctx.modulus() - &self.residue).to_i64().map(|v| -v)
        } else {
            self.residue.to_i64()
        }
    }
}

impl fmt::Debug for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.ctx.p(), self.ctx.precision())
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.residue)
    }
}

pub(crate) fn invert_mod(x: &BigUint, modulus: &BigUint, p: u64) -> Result<BigUint> {
    if (x % p).is_zero() {
        return Err(Error::NotAUnit);
    }
    if modulus.is_one() {
        return Ok(BigUint::zero());
    }
    x.modinv(modulus).ok_or(Error::NotAUnit)
}
