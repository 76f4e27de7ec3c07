//! The group ring `A_n = R_n[G]` for a finite abelian group `G`, and its
//! splitting by character idempotents when `p` does not divide `|G|`.
//!
//! Splitting is only offered when `exp(G) | p - 1`, so that every character
//! takes values in the Teichmüller roots of unity of `Z_p` itself.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::error::{Error, Result};
use crate::padic::{invert_mod, PadicInt, PrecisionContext};
use crate::powerseries::{write_terms, Series};

/// `G = Z/m_1 x ... x Z/m_r`; elements are exponent tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroupSpec {
    cyclic_orders: Vec<u32>,
}

impl AbelianGroupSpec {
    pub fn new(cyclic_orders: Vec<u32>) -> Result<Self> {
        if cyclic_orders.contains(&0) {
            return Err(Error::UnsupportedShape("cyclic factor of order 0".into()));
        }
        Ok(AbelianGroupSpec { cyclic_orders })
    }

    pub fn trivial() -> Self {
        AbelianGroupSpec {
            cyclic_orders: Vec::new(),
        }
    }

    pub fn cyclic_orders(&self) -> &[u32] {
        &self.cyclic_orders
    }

    pub fn rank(&self) -> usize {
        self.cyclic_orders.len()
    }

    pub fn order(&self) -> u64 {
        self.cyclic_orders.iter().map(|&m| m as u64).product()
    }

    pub fn is_trivial(&self) -> bool {
        self.order() == 1
    }

    pub fn exponent(&self) -> u64 {
        self.cyclic_orders
            .iter()
            .fold(1u64, |acc, &m| num_integer::lcm(acc, m as u64))
    }

    pub fn identity(&self) -> Vec<u32> {
        vec![0; self.rank()]
    }

    /// All elements in lexicographic order of exponent tuples.
    pub fn elements(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for &m in &self.cyclic_orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..m).map(move |k| {
                        let mut v = prefix.clone();
                        v.push(k);
                        v
                    })
                })
                .collect();
        }
        out
    }

    pub fn op(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(b)
            .zip(&self.cyclic_orders)
            .map(|((x, y), m)| (x + y) % m)
            .collect()
    }

    pub fn inverse(&self, a: &[u32]) -> Vec<u32> {
        a.iter()
            .zip(&self.cyclic_orders)
            .map(|(x, m)| (m - x % m) % m)
            .collect()
    }

    pub fn normalize(&self, a: &[u32]) -> Vec<u32> {
        a.iter().zip(&self.cyclic_orders).map(|(x, m)| x % m).collect()
    }

    /// Checks the splitting condition `p ∤ |G|` and `exp(G) | p - 1`.
    pub fn check_split(&self, p: u64) -> Result<()> {
        if self.order().is_multiple_of(p) {
            return Err(Error::GroupNotSplit(format!(
                "p = {p} divides |G| = {}",
                self.order()
            )));
        }
        if !(p - 1).is_multiple_of(self.exponent()) {
            return Err(Error::GroupNotSplit(format!(
                "exp(G) = {} does not divide p - 1 = {}; characters need an extension of Z_p",
                self.exponent(),
                p - 1
            )));
        }
        Ok(())
    }
}

/// An element of `R_n[G]`: a map from group elements to series.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupRingElement {
    ctx: PrecisionContext,
    level: usize,
    group: AbelianGroupSpec,
    coeffs: BTreeMap<Vec<u32>, Series>,
}

impl GroupRingElement {
    pub fn zero(ctx: &PrecisionContext, level: usize, group: &AbelianGroupSpec) -> Self {
        GroupRingElement {
            ctx: ctx.clone(),
            level,
            group: group.clone(),
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(ctx: &PrecisionContext, level: usize, group: &AbelianGroupSpec) -> Self {
        Self::from_series(group, Series::one(ctx, level))
    }

    /// `s * [identity]`.
    pub fn from_series(group: &AbelianGroupSpec, s: Series) -> Self {
        Self::basis(group, &group.identity(), s)
    }

    /// `s * [g]`.
    pub fn basis(group: &AbelianGroupSpec, g: &[u32], s: Series) -> Self {
        let mut out = Self::zero(s.ctx(), s.level(), group);
        out.set(group.normalize(g), s);
        out
    }

    /// Parses the term format, with `s<i>` standing for the generator of the
    /// `i`-th cyclic factor.
    pub fn parse(
        ctx: &PrecisionContext,
        level: usize,
        group: &AbelianGroupSpec,
        text: &str,
    ) -> Result<Self> {
        let terms = crate::powerseries::parse_terms(text, level, group.rank()).map_err(|e| {
            Error::UnsupportedShape(format!("cannot parse group ring element '{text}': {e}"))
        })?;
        let mut out = Self::zero(ctx, level, group);
        for (xs, gs, c) in terms {
            let term = Series::from_terms(ctx, level, [(xs, c)])?;
            out = out.add_unchecked(&Self::basis(group, &gs, term));
        }
        Ok(out)
    }

    fn set(&mut self, g: Vec<u32>, s: Series) {
        if s.is_zero() {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, s);
        }
    }

    pub fn ctx(&self) -> &PrecisionContext {
        &self.ctx
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn group(&self) -> &AbelianGroupSpec {
        &self.group
    }

    /// Coefficient series of `[g]`.
    pub fn coeff(&self, g: &[u32]) -> Series {
        self.coeffs
            .get(&self.group.normalize(g))
            .cloned()
            .unwrap_or_else(|| Series::zero(&self.ctx, self.level))
    }

    /// Nonzero coefficients in increasing group-element order.
    pub fn coeffs(&self) -> impl Iterator<Item = (&Vec<u32>, &Series)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The underlying series when `G` is trivial.
    pub fn as_series(&self) -> Option<Series> {
        self.group
            .is_trivial()
            .then(|| self.coeff(&self.group.identity()))
    }

    pub(crate) fn compatible(&self, other: &Self) -> bool {
        self.level == other.level && self.ctx.same_as(&other.ctx) && self.group == other.group
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.compatible(other) {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    /// Group-ring product (convolution of coefficient series).
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, s) in &other.coeffs {
            let sum = out.coeff(g).add_unchecked(s);
            out.set(g.clone(), sum);
        }
        out
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.ctx, self.level, &self.group);
        for (g, a) in &self.coeffs {
            for (h, b) in &other.coeffs {
                let gh = self.group.op(g, h);
                let sum = out.coeff(&gh).add_unchecked(&a.mul_unchecked(b));
                out.set(gh, sum);
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|s| Ok(s.neg()))
            .expect("negation is infallible")
    }

    pub fn scale(&self, c: &BigUint) -> Self {
        self.map_coeffs(|s| Ok(s.scale(c)))
            .expect("scaling is infallible")
    }

    pub fn scale_series(&self, s: &Series) -> Result<Self> {
        self.map_coeffs(|c| c.mul(s))
    }

    fn map_coeffs(&self, f: impl Fn(&Series) -> Result<Series>) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, self.level, &self.group);
        for (g, s) in &self.coeffs {
            out.set(g.clone(), f(s)?);
        }
        Ok(out)
    }

    pub fn project_down(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(Error::LevelUnderflow);
        }
        let mut out = Self::zero(&self.ctx, self.level - 1, &self.group);
        for (g, s) in &self.coeffs {
            out.set(g.clone(), s.project_down()?);
        }
        Ok(out)
    }

    pub fn project_to(&self, n: usize) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, n, &self.group);
        if n > self.level {
            return Err(Error::UnsupportedShape(format!(
                "cannot project level {} to higher level {n}",
                self.level
            )));
        }
        for (g, s) in &self.coeffs {
            out.set(g.clone(), s.project_to(n)?);
        }
        Ok(out)
    }

    pub fn include_up(&self, m: usize) -> Result<Self> {
        let mut out = Self::zero(&self.ctx, m, &self.group);
        for (g, s) in &self.coeffs {
            out.set(g.clone(), s.include_up(m)?);
        }
        Ok(out)
    }

    /// Scalar of the `chi`-component: `sum_g chi(g) * coeff_g`.
    pub fn component(&self, chi: &Character) -> Result<Series> {
        if chi.group != self.group || !chi.ctx.same_as(&self.ctx) {
            return Err(Error::ContextMismatch);
        }
        let mut out = Series::zero(&self.ctx, self.level);
        for (g, s) in &self.coeffs {
            out = out.add_unchecked(&s.scale(chi.value(g).residue()));
        }
        Ok(out)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(BigInt, String)> = Vec::new();
        for (g, s) in self.coeffs.iter() {
            let gname: Vec<String> = g
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { format!("s{}", i + 1) } else { format!("s{}^{k}", i + 1) })
                .collect();
            for (m, c) in s.terms().rev() {
                let mut mono = String::new();
                m.fmt_vars(&mut mono)?;
                let mut parts: Vec<String> = Vec::new();
                if !mono.is_empty() {
                    parts.push(mono);
                }
                parts.extend(gname.iter().cloned());
                terms.push((s.signed(c), parts.join("*")));
            }
        }
        write_terms(f, &terms)
    }
}

impl fmt::Debug for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[L{} G{:?}] {}", self.level, self.group.cyclic_orders, self)
    }
}

/// A character `G -> mu_{p-1}(Z_p)`, indexed by the tuple `(k_1, ..., k_r)`
/// with `chi(g) = prod zeta_i^(k_i * g_i)`.
#[derive(Clone, PartialEq, Eq)]
pub struct Character {
    ctx: PrecisionContext,
    group: AbelianGroupSpec,
    index: Vec<u32>,
    // zeta_i^k_i for each factor
    generator_values: Vec<PadicInt>,
}

impl Character {
    pub fn index(&self) -> &[u32] {
        &self.index
    }

    pub fn value(&self, g: &[u32]) -> PadicInt {
        let mut v = PadicInt::one(&self.ctx);
        for (z, &e) in self.generator_values.iter().zip(g) {
            v = v.mul(&z.pow(e as u64)).expect("same context");
        }
        v
    }

    pub fn is_trivial(&self) -> bool {
        self.index.iter().all(|&k| k == 0)
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.index.iter().map(u32::to_string).collect();
        format!("chi({})", parts.join(","))
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// A character together with its idempotent `e_chi = |G|^-1 sum_g chi(g^-1) g`.
#[derive(Clone, Debug)]
pub struct CharacterIdempotent {
    pub character: Character,
    pub idempotent: GroupRingElement,
}

/// All characters of `group`, in lexicographic order of their index tuples.
pub fn characters(group: &AbelianGroupSpec, ctx: &PrecisionContext) -> Result<Vec<Character>> {
    group.check_split(ctx.p())?;
    let omega = PadicInt::teichmuller(ctx, primitive_root(ctx.p()) as i64)?;
    let zetas: Vec<PadicInt> = group
        .cyclic_orders()
        .iter()
        .map(|&m| omega.pow((ctx.p() - 1) / m as u64))
        .collect();
    let dual = AbelianGroupSpec::new(group.cyclic_orders().to_vec())?;
    Ok(dual
        .elements()
        .into_iter()
        .map(|index| Character {
            ctx: ctx.clone(),
            group: group.clone(),
            generator_values: zetas
                .iter()
                .zip(&index)
                .map(|(z, &k)| z.pow(k as u64))
                .collect(),
            index,
        })
        .collect())
}

/// Orthogonal idempotents `e_chi` realising `A_n ≅ prod_chi R_n` at level `level`.
pub fn split_idempotents(
    group: &AbelianGroupSpec,
    ctx: &PrecisionContext,
    level: usize,
) -> Result<Vec<CharacterIdempotent>> {
    let chars = characters(group, ctx)?;
    let order_inv = invert_mod(&BigUint::from(group.order()), ctx.modulus(), ctx.p())?;
    Ok(chars
        .into_iter()
        .map(|chi| {
            let mut e = GroupRingElement::zero(ctx, level, group);
            for g in group.elements() {
                let c = chi.value(&group.inverse(&g));
                let term = Series::one(ctx, level).scale(&(c.residue() * &order_inv));
                e = e.add_unchecked(&GroupRingElement::basis(group, &g, term));
            }
            CharacterIdempotent {
                character: chi,
                idempotent: e,
            }
        })
        .collect())
}

/// Rebuilds `a = sum_chi component(a, chi) * e_chi`.
pub fn reconstruct(components: &[(CharacterIdempotent, Series)]) -> Result<GroupRingElement> {
    let first = components
        .first()
        .ok_or_else(|| Error::UnsupportedShape("no components".into()))?;
    let mut out = GroupRingElement::zero(
        first.1.ctx(),
        first.1.level(),
        first.0.idempotent.group(),
    );
    for (e, s) in components {
        out = out.add(&e.idempotent.scale_series(s)?)?;
    }
    Ok(out)
}

fn primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let phi = p - 1;
    let factors: Vec<u64> = (2..=phi).filter(|q| phi.is_multiple_of(*q) && crate::padic::is_prime(*q)).collect();
    (2..p)
        .find(|&g| {
            factors
                .iter()
                .all(|q| BigUint::from(g).modpow(&BigUint::from(phi / q), &BigUint::from(p)) != BigUint::one())
        })
        .expect("every prime has a primitive root")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64, n: u32) -> PrecisionContext {
        PrecisionContext::new(p, n, 6).unwrap()
    }

    fn z(orders: &[u32]) -> AbelianGroupSpec {
        AbelianGroupSpec::new(orders.to_vec()).unwrap()
    }

    #[test]
    fn convolution_basics() {
        let c = ctx(5, 3);
        let g = z(&[2]);
        let one = GroupRingElement::one(&c, 1, &g);
        let sigma = GroupRingElement::parse(&c, 1, &g, "s1").unwrap();
        assert_eq!(sigma.convolve(&sigma).unwrap(), one);
        let a = GroupRingElement::parse(&c, 1, &g, "1 + X1 + 3*X1*s1").unwrap();
        assert_eq!(a.convolve(&one).unwrap(), a);
        let plus = GroupRingElement::parse(&c, 1, &g, "1 + s1").unwrap();
        let minus = GroupRingElement::parse(&c, 1, &g, "1 - s1").unwrap();
        assert!(plus.convolve(&minus).unwrap().is_zero());
        let g3 = z(&[3]);
        let x = GroupRingElement::parse(&c, 1, &g3, "s1").unwrap();
        let xinv = GroupRingElement::parse(&c, 1, &g3, "s1^2").unwrap();
        assert_eq!(x.convolve(&xinv).unwrap(), GroupRingElement::one(&c, 1, &g3));
    }

    #[test]
    fn z2_idempotents_at_p5() {
        let c = ctx(5, 2);
        let g = z(&[2]);
        let es = split_idempotents(&g, &c, 1).unwrap();
        assert_eq!(es.len(), 2);
        // 13 = 1/2 mod 25
        let e_plus = GroupRingElement::parse(&c, 1, &g, "13 + 13*s1").unwrap();
        let e_minus = GroupRingElement::parse(&c, 1, &g, "13 - 13*s1").unwrap();
        assert_eq!(es[0].idempotent, e_plus);
        assert_eq!(es[1].idempotent, e_minus);
        assert_eq!(e_plus.convolve(&e_plus).unwrap(), e_plus);
        assert!(e_plus.convolve(&e_minus).unwrap().is_zero());
        assert_eq!(e_plus.add(&e_minus).unwrap(), GroupRingElement::one(&c, 1, &g));
    }

    #[test]
    fn split_refusals() {
        assert!(matches!(
            split_idempotents(&z(&[2]), &ctx(2, 3), 1),
            Err(Error::GroupNotSplit(_))
        ));
        // 3 does not divide 5 - 1
        assert!(matches!(
            split_idempotents(&z(&[3]), &ctx(5, 3), 1),
            Err(Error::GroupNotSplit(_))
        ));
        let es = split_idempotents(&AbelianGroupSpec::trivial(), &ctx(2, 3), 2).unwrap();
        assert_eq!(es.len(), 1);
        assert_eq!(es[0].idempotent, GroupRingElement::one(&ctx(2, 3), 2, &AbelianGroupSpec::trivial()));
    }

    #[test]
    fn components_of_basis_elements() {
        let c = ctx(5, 4);
        let g = z(&[4]);
        for chi in characters(&g, &c).unwrap() {
            let one = GroupRingElement::one(&c, 1, &g);
            assert!(one.component(&chi).unwrap().is_one());
            let s = GroupRingElement::parse(&c, 1, &g, "s1").unwrap();
            let expected = Series::one(&c, 1).scale(chi.value(&[1]).residue());
            assert_eq!(s.component(&chi).unwrap(), expected);
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5), 2);
        assert_eq!(primitive_root(7), 3);
        assert_eq!(primitive_root(13), 2);
    }
}
