//! Elementary-divisor decompositions of level-1 torsion modules at
//! height-one primes, read off from determinantal divisors.
//!
//! With `g_k` the gcd of the `k x k` minors, the elementary divisors are
//! `d_k = g_k / g_{k-1}`, a divisibility chain, and the module is
//! pseudo-isomorphic to `⊕_k A/(d_k)`. Factoring each `d_k` gives the
//! exponents `e_{q,k}` of every prime `q`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fpmod::{factor_canonical, gcd_of, is_torsion, Presentation, PrimeDescriptor};
use crate::groupring::{characters, Character};
use crate::powerseries::{CanonicalForm, DistinguishedPoly, Series};

/// Determinantal divisors `g_1 | g_2 | ... | g_d` of a square level-1
/// presentation over the trivial group.
pub fn determinantal_divisors(p: &Presentation) -> Result<Vec<CanonicalForm>> {
    check_level1_square(p)?;
    let mut out: Vec<CanonicalForm> = Vec::with_capacity(p.rows());
    for k in 1..=p.rows() {
        let minors: Vec<Series> = p
            .minors(k)
            .iter()
            .map(|m| m.as_series().expect("trivial group"))
            .collect();
        let g = gcd_of(&minors)?;
        if let Some(prev) = out.last() {
            if !prev.divides(&g) {
                return Err(Error::PrecisionExhausted(format!(
                    "determinantal divisors g_{} = {} and g_{} = {} do not form a chain",
                    k - 1,
                    prev,
                    k,
                    g
                )));
            }
        }
        out.push(g);
    }
    Ok(out)
}

fn check_level1_square(p: &Presentation) -> Result<()> {
    if !p.group().is_trivial() {
        return Err(Error::UnsupportedShape(
            "decompose over a group ring through decompose_split".into(),
        ));
    }
    if p.level() != 1 {
        return Err(Error::UnsupportedShape(format!(
            "decompositions exist only at level 1, got level {}",
            p.level()
        )));
    }
    if !p.is_quadratic() {
        return Err(Error::NotQuadratic {
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    let t = is_torsion(p);
    if !(t.value && t.exact) {
        return Err(Error::NotTorsionAtPrecision);
    }
    Ok(())
}

/// Elementary divisors `d_k = g_k / g_{k-1}`.
pub fn elementary_divisors(divisors: &[CanonicalForm]) -> Result<Vec<CanonicalForm>> {
    let mut out = Vec::with_capacity(divisors.len());
    for (k, g) in divisors.iter().enumerate() {
        let d = match k {
            0 => g.clone(),
            _ => g.div_exact(&divisors[k - 1]).ok_or_else(|| {
                Error::PrecisionExhausted(format!("g_{} does not divide g_{}", k, k + 1))
            })?,
        };
        out.push(d);
    }
    Ok(out)
}

/// A distinguished factor the factoriser refused, with its exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualBlock {
    pub poly: DistinguishedPoly,
    /// Non-increasing; the block may hide several primes.
    pub exponents: Vec<u32>,
    pub warning: bool,
}

/// `M ~ ⊕_q ⊕_i A/q^{e_{q,i}}` plus residual blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub p: u64,
    pub precision: u32,
    /// Sorted by prime; exponent lists non-increasing with zeros dropped.
    pub primes: Vec<(PrimeDescriptor, Vec<u32>)>,
    pub residuals: Vec<ResidualBlock>,
}

impl Decomposition {
    pub fn is_empty(&self) -> bool {
        self.primes.is_empty() && self.residuals.is_empty()
    }

    /// Exponents at `q`, empty when `q` is not in the support.
    pub fn exponents(&self, q: &PrimeDescriptor) -> &[u32] {
        self.primes
            .iter()
            .find(|(r, _)| r == q)
            .map(|(_, e)| e.as_slice())
            .unwrap_or(&[])
    }

    /// Generator of the prime (or block) as a canonical form.
    fn prime_form(&self, q: &PrimeDescriptor) -> CanonicalForm {
        match q {
            PrimeDescriptor::P(_) => CanonicalForm::new(1, DistinguishedPoly::one(self.p, self.precision)),
            PrimeDescriptor::Poly(f) => CanonicalForm::new(0, f.clone()),
            PrimeDescriptor::Character { prime, .. } => self.prime_form(prime),
        }
    }

    /// The elementary divisors recombined from the prime exponents: summand
    /// `k` is `∏_q q^{e_{q,k}}` (lists aligned from the largest exponent).
    pub fn summands(&self) -> Vec<CanonicalForm> {
        let len = self
            .primes
            .iter()
            .map(|(_, e)| e.len())
            .chain(self.residuals.iter().map(|r| r.exponents.len()))
            .max()
            .unwrap_or(0);
        let mut out = vec![CanonicalForm::unit_ideal(self.p, self.precision); len];
        for (q, exps) in &self.primes {
            let f = self.prime_form(q);
            for (k, &e) in exps.iter().enumerate() {
                out[k] = out[k].mul(&pow(&f, e));
            }
        }
        for r in &self.residuals {
            let f = CanonicalForm::new(0, r.poly.clone());
            for (k, &e) in r.exponents.iter().enumerate() {
                out[k] = out[k].mul(&pow(&f, e));
            }
        }
        out
    }

    /// `∏ q^(Σ e) · residuals`, which equals the characteristic generator.
    pub fn product(&self) -> CanonicalForm {
        self.summands()
            .iter()
            .fold(CanonicalForm::unit_ideal(self.p, self.precision), |a, b| a.mul(b))
    }
}

fn pow(f: &CanonicalForm, e: u32) -> CanonicalForm {
    (0..e).fold(CanonicalForm::unit_ideal(f.p(), f.precision()), |a, _| a.mul(f))
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("0");
        }
        let mut parts: Vec<String> = self
            .primes
            .iter()
            .map(|(q, e)| format!("{q}: {e:?}"))
            .collect();
        parts.extend(
            self.residuals
                .iter()
                .map(|r| format!("unfactored ({}): {:?}", r.poly, r.exponents)),
        );
        f.write_str(&parts.join(", "))
    }
}

/// Elementary-divisor decomposition of a square level-1 torsion presentation.
pub fn decompose(p: &Presentation) -> Result<Decomposition> {
    let divisors = determinantal_divisors(p)?;
    let elementary = elementary_divisors(&divisors)?;
    let top = divisors.last().expect("d >= 1");
    let reports: Vec<_> = elementary.iter().map(factor_canonical).collect();
    // Primes certified in some d_k are stripped from the refused blocks of
    // every other d_k, so a block like (X + p)^2 next to (X + p) resolves.
    let mut certified: Vec<DistinguishedPoly> = Vec::new();
    for (q, _) in reports.iter().flat_map(|r| &r.primes) {
        if let PrimeDescriptor::Poly(f) = q {
            if !certified.contains(f) {
                certified.push(f.clone());
            }
        }
    }
    let n = elementary.len();
    let mut primes: BTreeMap<PrimeDescriptor, Vec<u32>> = BTreeMap::new();
    let mut blocks: Vec<(DistinguishedPoly, Vec<u32>)> = Vec::new();
    for (k, report) in reports.into_iter().enumerate() {
        let mut exps: BTreeMap<PrimeDescriptor, u32> = report.primes.into_iter().collect();
        for block in report.unfactored_blocks {
            let mut rest = block.poly;
            for f in &certified {
                let (m, r) = f.multiplicity_in(&rest);
                if m > 0 {
                    *exps.entry(PrimeDescriptor::Poly(f.clone())).or_default() += m;
                    rest = r;
                }
            }
            for (b, e) in blocks.iter_mut() {
                let (m, r) = b.multiplicity_in(&rest);
                if m > 0 {
                    e[k] += m;
                    rest = r;
                }
            }
            if !rest.is_one() {
                let mut e = vec![0; n];
                e[k] = 1;
                blocks.push((rest, e));
            }
        }
        for (q, e) in exps {
            primes.entry(q).or_default().push(e);
        }
    }
    let descending = |mut e: Vec<u32>| {
        e.retain(|&x| x > 0);
        e.sort_unstable_by(|a, b| b.cmp(a));
        e
    };
    let decomposition = Decomposition {
        p: top.p(),
        precision: top.precision(),
        primes: primes.into_iter().map(|(q, e)| (q, descending(e))).collect(),
        residuals: blocks
            .into_iter()
            .map(|(poly, e)| ResidualBlock {
                poly,
                exponents: descending(e),
                warning: true,
            })
            .collect(),
    };
    // Summand i must be the elementary divisor d_{n-i}, unit ones omitted.
    let summands = decomposition.summands();
    let aligned = summands.len() <= n
        && summands
            .iter()
            .zip(elementary.iter().rev())
            .all(|(s, d)| s == d)
        && elementary[..n - summands.len()]
            .iter()
            .all(CanonicalForm::is_unit_ideal);
    if !aligned || &decomposition.product() != top {
        return Err(Error::PrecisionExhausted(format!(
            "decomposition {decomposition} does not reproduce the elementary divisors of {top}"
        )));
    }
    Ok(decomposition)
}

/// Decomposition of each character component of a split group-ring
/// presentation.
pub fn decompose_split(p: &Presentation) -> Result<Vec<(Character, Decomposition)>> {
    let chars = characters(p.group(), p.ctx())?;
    chars
        .into_iter()
        .map(|chi| {
            let comp = p.component(&chi)?;
            Ok((chi, decompose(&comp)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupring::{AbelianGroupSpec, GroupRingElement};
    use crate::padic::PrecisionContext;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(5, 6, 10).unwrap()
    }

    fn pres(d: usize, texts: &[&str]) -> Presentation {
        Presentation::parse(&ctx(), 1, &AbelianGroupSpec::trivial(), d, d, texts).unwrap()
    }

    fn canon(t: &str) -> CanonicalForm {
        CanonicalForm::of(&Series::parse(&ctx(), 1, t).unwrap()).unwrap()
    }

    fn x() -> PrimeDescriptor {
        PrimeDescriptor::Poly(DistinguishedPoly::x(5, 6))
    }

    #[test]
    fn divisor_examples() {
        let g = determinantal_divisors(&pres(2, &["5", "0", "0", "5*X1"])).unwrap();
        assert_eq!(g, vec![canon("5"), canon("25*X1")]);
        let g = determinantal_divisors(&pres(2, &["1", "0", "0", "1"])).unwrap();
        assert!(g.iter().all(CanonicalForm::is_unit_ideal));
        let g = determinantal_divisors(&pres(2, &["X1", "5", "0", "X1"])).unwrap();
        assert_eq!(g, vec![canon("1"), canon("X1^2")]);
    }

    #[test]
    fn decompose_examples() {
        let d = decompose(&pres(2, &["5", "0", "0", "5*X1"])).unwrap();
        assert_eq!(d.primes, vec![(PrimeDescriptor::P(5), vec![1, 1]), (x(), vec![1])]);
        assert!(d.residuals.is_empty());

        let d = decompose(&pres(2, &["X1", "5", "0", "X1"])).unwrap();
        assert_eq!(d.primes, vec![(x(), vec![2])]);

        assert!(decompose(&pres(2, &["1", "0", "0", "1"])).unwrap().is_empty());
    }

    #[test]
    fn diagonal_exponents_are_the_valuation_multiset() {
        let d = decompose(&pres(
            3,
            &["25*X1", "0", "0", "0", "5", "0", "0", "0", "X1^3 + 5*X1^2"],
        ))
        .unwrap();
        assert_eq!(d.exponents(&PrimeDescriptor::P(5)), &[2, 1]);
        assert_eq!(d.exponents(&x()), &[2, 1]);
        let xp5 = PrimeDescriptor::Poly(DistinguishedPoly::from_coeffs(5, 6, &[5, 1]).unwrap());
        assert_eq!(d.exponents(&xp5), &[1]);
    }

    #[test]
    fn residual_blocks_carry_a_warning() {
        // (X + 5)(X + 10) is not certified; its square appears in d_2
        let f = "X1^2 + 15*X1 + 50";
        let f2 = "X1^4 + 30*X1^3 + 325*X1^2 + 1500*X1 + 2500";
        let d = decompose(&pres(2, &[f, "0", "0", f2])).unwrap();
        assert!(d.primes.is_empty());
        assert_eq!(d.residuals.len(), 1);
        assert_eq!(d.residuals[0].exponents, vec![2, 1]);
        assert!(d.residuals[0].warning);
    }

    #[test]
    fn split_decomposition() {
        let c = ctx();
        let g = AbelianGroupSpec::new(vec![2]).unwrap();
        let chars = characters(&g, &c).unwrap();
        let idem = crate::groupring::split_idempotents(&g, &c, 1).unwrap();
        // theta = (5 X1) e_0 + 1 e_1 on the diagonal
        let s = |t: &str| Series::parse(&c, 1, t).unwrap();
        let entry = idem[0]
            .idempotent
            .scale_series(&s("5*X1"))
            .unwrap()
            .add(&idem[1].idempotent)
            .unwrap();
        let one = GroupRingElement::one(&c, 1, &g);
        let zero = GroupRingElement::zero(&c, 1, &g);
        let p = Presentation::new(&c, 1, &g, 2, 2, vec![entry, zero.clone(), zero, one]).unwrap();
        let parts = decompose_split(&p).unwrap();
        assert_eq!(parts.len(), 2);
        let trivial = parts.iter().find(|(chi, _)| chi == &chars[0]).unwrap();
        assert_eq!(trivial.1.primes.len(), 2);
        let other = parts.iter().find(|(chi, _)| chi != &chars[0]).unwrap();
        assert!(other.1.is_empty());

        let c2 = PrecisionContext::new(2, 4, 6).unwrap();
        let id = Presentation::identity(&c2, 1, &g, 1).unwrap();
        assert!(matches!(decompose_split(&id), Err(Error::GroupNotSplit(_))));
    }
}
