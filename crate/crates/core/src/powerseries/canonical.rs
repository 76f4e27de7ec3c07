//! Weierstrass preparation and canonical principal-ideal generators in
//! `Z_p[[X]]`.
//!
//! A nonzero `f` factors as `unit * p^mu * P` with `P` a distinguished
//! polynomial. Dropping the unit gives the canonical generator
//! `p^mu * P` of the principal ideal `(f)`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::dense::{self, Poly, Zpk};
use super::{signed_residue, write_terms, Series};
use crate::error::{Error, Result};
use crate::padic::PrecisionContext;

/// Monic polynomial over `Z/p^precision` whose non-leading coefficients are
/// divisible by `p`.
#[derive(Clone)]
pub struct DistinguishedPoly {
    p: u64,
    precision: u32,
    coeffs: Poly,
}

impl DistinguishedPoly {
    pub(crate) fn from_poly(p: u64, precision: u32, coeffs: Poly) -> Self {
        let r = Zpk::new(p, precision);
        let coeffs = dense::reduce(&coeffs, &r);
        debug_assert!(precision == 0 || dense::is_monic(&coeffs));
        DistinguishedPoly {
            p,
            precision,
            coeffs,
        }
    }

    pub fn one(p: u64, precision: u32) -> Self {
        Self::from_poly(p, precision, vec![BigUint::one()])
    }

    /// The prime `X`.
    pub fn x(p: u64, precision: u32) -> Self {
        Self::from_poly(p, precision, vec![BigUint::zero(), BigUint::one()])
    }

    /// Builds a distinguished polynomial from signed coefficients in ascending
    /// degree. Fails unless it is monic with `p` dividing the lower coefficients.
    pub fn from_coeffs(p: u64, precision: u32, coeffs: &[i64]) -> Result<Self> {
        let r = Zpk::new(p, precision);
        let c: Poly = coeffs
            .iter()
            .map(|&c| crate::padic::reduce_signed(&BigInt::from(c), &r.modulus))
            .collect();
        let c = dense::reduce(&c, &r);
        if !dense::is_monic(&c) || c[..c.len() - 1].iter().any(|x| r.valuation(x) == 0) {
            return Err(Error::UnsupportedShape("polynomial is not distinguished".into()));
        }
        Ok(Self::from_poly(p, precision, c))
    }

    pub(crate) fn ring(&self) -> Zpk {
        Zpk::new(self.p, self.precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Number of p-adic digits to which the coefficients are known.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn degree(&self) -> usize {
        dense::degree(&self.coeffs)
    }

    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn is_one(&self) -> bool {
        self.degree() == 0
    }

    pub fn is_x(&self) -> bool {
        self.degree() == 1 && self.coeffs[0].is_zero()
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        Self::from_poly(self.p, precision.min(self.precision), self.coeffs.clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let prec = self.precision.min(other.precision);
        let r = Zpk::new(self.p, prec);
        Self::from_poly(self.p, prec, dense::mul(&self.coeffs, &other.coeffs, &r))
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.p, self.precision), |acc, _| acc.mul(self))
    }

    /// Exact quotient `self / other` if `other` divides at precision.
    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        let prec = self.precision.min(other.precision);
        let r = Zpk::new(self.p, prec);
        let (q, rem) = dense::divrem_monic(&self.coeffs, &other.coeffs, &r);
        if rem.is_empty() && other.degree() <= self.degree() {
            Some(Self::from_poly(self.p, prec, q))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        other.div_exact(self).is_some()
    }

    /// Largest `k` with `self^k | other` (requires `self` nonconstant).
    pub fn multiplicity_in(&self, other: &Self) -> (u32, Self) {
        debug_assert!(self.degree() > 0);
        let mut k = 0;
        let mut rest = other.clone();
        while let Some(q) = rest.div_exact(self) {
            rest = q;
            k += 1;
        }
        (k, rest)
    }

    /// Level-1 series with the same coefficients.
    pub fn to_series(&self, ctx: &PrecisionContext) -> Series {
        Series::from_coeffs(ctx, &self.coeffs)
    }

    pub(crate) fn sort_key(&self) -> (usize, Vec<BigUint>) {
        (self.degree(), self.coeffs.iter().rev().cloned().collect())
    }

    fn is_eisenstein(&self) -> bool {
        let r = self.ring();
        self.degree() >= 1
            && self.precision >= 2
            && r.valuation(&self.coeffs[0]) == 1
            && self.coeffs[..self.degree()].iter().all(|c| r.valuation(c) >= 1)
    }
}

impl PartialEq for DistinguishedPoly {
    /// Equality modulo the smaller of the two precisions.
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.degree() != other.degree() {
            return false;
        }
        let r = Zpk::new(self.p, self.precision.min(other.precision));
        dense::reduce(&self.coeffs, &r) == dense::reduce(&other.coeffs, &r)
    }
}

impl Ord for DistinguishedPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for DistinguishedPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Eq for DistinguishedPoly {}

impl fmt::Display for DistinguishedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let modulus = self.ring().modulus;
        let terms: Vec<(BigInt, String)> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                let mono = match i {
                    0 => String::new(),
                    1 => "X1".to_string(),
                    _ => format!("X1^{i}"),
                };
                (signed_residue(c, &modulus), mono)
            })
            .collect();
        write_terms(f, &terms)
    }
}

impl fmt::Debug for DistinguishedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {}^{})", self, self.p, self.precision)
    }
}

/// Canonical generator `p^mu * P` of a nonzero principal ideal of `Z_p[[X]]`.
#[derive(Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    mu: u32,
    poly: DistinguishedPoly,
}

impl CanonicalForm {
    pub fn new(mu: u32, poly: DistinguishedPoly) -> Self {
        CanonicalForm { mu, poly }
    }

    /// The unit ideal at the given precision.
    pub fn unit_ideal(p: u64, precision: u32) -> Self {
        CanonicalForm::new(0, DistinguishedPoly::one(p, precision))
    }

    /// Canonical generator of `(f)` for a level-1 series.
    pub fn of(f: &Series) -> Result<Self> {
        Ok(weierstrass_prepare(f)?.canonical())
    }

    pub fn mu(&self) -> u32 {
        self.mu
    }

    pub fn lambda(&self) -> usize {
        self.poly.degree()
    }

    pub fn poly(&self) -> &DistinguishedPoly {
        &self.poly
    }

    pub fn precision(&self) -> u32 {
        self.poly.precision
    }

    pub fn p(&self) -> u64 {
        self.poly.p
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.mu == 0 && self.poly.is_one()
    }

    pub fn mul(&self, other: &Self) -> Self {
        CanonicalForm::new(self.mu + other.mu, self.poly.mul(&other.poly))
    }

    pub fn div_exact(&self, other: &Self) -> Option<Self> {
        if other.mu > self.mu {
            return None;
        }
        Some(CanonicalForm::new(
            self.mu - other.mu,
            self.poly.div_exact(&other.poly)?,
        ))
    }

    /// `self | other` as ideals, i.e. `(other) ⊆ (self)`.
    pub fn divides(&self, other: &Self) -> bool {
        other.div_exact(self).is_some()
    }

    /// `p^mu * P` as a level-1 series.
    pub fn to_series(&self, ctx: &PrecisionContext) -> Series {
        self.poly.to_series(ctx).scale(&BigUint::from(self.p()).pow(self.mu))
    }
}

impl fmt::Display for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p();
        let ppart = match self.mu {
            0 => None,
            1 => Some(format!("{p}")),
            m => Some(format!("{p}^{m}")),
        };
        let poly = self.poly.to_string();
        let multi_term = self.poly.coeffs.iter().filter(|c| !c.is_zero()).count() > 1;
        match (ppart, self.poly.is_one()) {
            (None, _) => f.write_str(&poly),
            (Some(pp), true) => f.write_str(&pp),
            (Some(pp), false) if multi_term => write!(f, "{pp} * ({poly})"),
            (Some(pp), false) => write!(f, "{pp} * {poly}"),
        }
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [mu={}, lambda={}, prec={}]", self, self.mu, self.lambda(), self.precision())
    }
}

/// Result of Weierstrass preparation `f = unit * p^mu * distinguished`.
#[derive(Clone, Debug)]
pub struct WeierstrassData {
    pub mu: u32,
    pub lambda: usize,
    pub distinguished: Series,
    pub unit: Series,
    /// p-adic digits to which `distinguished` and `unit` are determined (`N - mu`).
    pub precision: u32,
    poly: DistinguishedPoly,
}

impl WeierstrassData {
    pub fn canonical(&self) -> CanonicalForm {
        CanonicalForm::new(self.mu, self.poly.clone())
    }
}

/// Weierstrass preparation of a level-1 series at precision.
///
/// The truncated input is treated as the polynomial it represents, which is
/// factored exactly as `P * Q` over `Z/p^(N-mu)`; since `deg(P*Q) < D` the
/// identity `unit * p^mu * P = f` survives truncation.
pub fn weierstrass_prepare(f: &Series) -> Result<WeierstrassData> {
    if f.level() != 1 {
        return Err(Error::UnsupportedShape(format!(
            "Weierstrass preparation needs a level-1 series, got level {}",
            f.level()
        )));
    }
    let ctx = f.ctx();
    if f.is_zero() {
        return Err(Error::PrecisionExhausted(
            "series vanishes modulo p^N".into(),
        ));
    }
    let coeffs = f.dense_coeffs();
    let full = Zpk::new(ctx.p(), ctx.precision());
    let mu = dense::content_valuation(&coeffs, &full);
    let (g, ring) = dense::div_p_pow(&coeffs, mu, &full);
    let (lambda, big_p, q) = dense::hensel_split(&g, &ring).ok_or(Error::DegreeCapExceeded)?;
    if lambda >= ctx.degree_cap() as usize {
        return Err(Error::DegreeCapExceeded);
    }
    let poly = DistinguishedPoly::from_poly(ctx.p(), ring.k, big_p);
    Ok(WeierstrassData {
        mu,
        lambda,
        distinguished: poly.to_series(ctx),
        unit: Series::from_coeffs(ctx, &q),
        precision: ring.k,
        poly,
    })
}

/// Greatest common divisor of two canonical generators.
///
/// The `p`-part is `min(mu)`. The polynomial part runs a remainder sequence in
/// which every divisor is monic: after each division the remainder's content
/// `p^v` is removed (costing `v` digits of precision) and the remainder is
/// replaced by its distinguished part, which generates the same ideal as far
/// as gcds with distinguished polynomials are concerned.
pub fn gcd_level1(a: &CanonicalForm, b: &CanonicalForm) -> Result<CanonicalForm> {
    if a.p() != b.p() {
        return Err(Error::ContextMismatch);
    }
    let mu = a.mu.min(b.mu);
    let mut prec = a.precision().min(b.precision());
    let p = a.p();
    let (mut x, mut y) = if a.lambda() >= b.lambda() {
        (a.poly.coeffs.clone(), b.poly.coeffs.clone())
    } else {
        (b.poly.coeffs.clone(), a.poly.coeffs.clone())
    };
    loop {
        let r = Zpk::new(p, prec);
        if dense::degree(&y) == 0 {
            return Ok(CanonicalForm::new(mu, DistinguishedPoly::one(p, prec)));
        }
        let (_, rem) = dense::divrem_monic(&x, &y, &r);
        if rem.is_empty() {
            return Ok(CanonicalForm::new(mu, DistinguishedPoly::from_poly(p, prec, y)));
        }
        let v = dense::content_valuation(&rem, &r);
        if v >= prec {
            return Err(Error::PrecisionExhausted(
                "remainder sequence lost all p-adic digits".into(),
            ));
        }
        let (rem, ring) = dense::div_p_pow(&rem, v, &r);
        let (_, dist, _) = dense::hensel_split(&rem, &ring).ok_or_else(|| {
            Error::PrecisionExhausted("remainder has no unit coefficient".into())
        })?;
        prec = ring.k;
        x = dense::reduce(&y, &ring);
        y = dist;
    }
}

/// Splits off the exact power of `X`: returns `(k, P / X^k)`.
pub fn split_x_power(poly: &DistinguishedPoly) -> (u32, DistinguishedPoly) {
    let k = poly.coeffs.iter().take_while(|c| c.is_zero()).count();
    let k = k.min(poly.degree());
    (
        k as u32,
        DistinguishedPoly::from_poly(poly.p, poly.precision, poly.coeffs[k..].to_vec()),
    )
}

/// Factorisation of a distinguished polynomial into certified irreducible
/// distinguished factors.
///
/// Every distinguished polynomial reduces to `X^lambda` modulo `p`, so the
/// reduction is squarefree only for `lambda <= 1`. Irreducibility is certified
/// in that case and for Eisenstein polynomials; anything else is refused
/// with `NotSquarefreeModP` rather than guessed.
pub fn factor_distinguished(poly: &DistinguishedPoly) -> Result<Vec<(DistinguishedPoly, u32)>> {
    match poly.degree() {
        0 => Ok(Vec::new()),
        1 => Ok(vec![(poly.clone(), 1)]),
        _ if poly.is_eisenstein() => Ok(vec![(poly.clone(), 1)]),
        _ => Err(Error::NotSquarefreeModP),
    }
}
