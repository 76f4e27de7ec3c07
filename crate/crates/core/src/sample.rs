//! Seeded random inputs for tests, benchmarks and the acceptance suite.

use num_bigint::{BigInt, BigUint};
use rand::Rng;

use crate::error::Result;
use crate::fpmod::{det_quadratic, Presentation};
use crate::groupring::{AbelianGroupSpec, GroupRingElement};
use crate::padic::PrecisionContext;
use crate::powerseries::{Monomial, Series};

/// Random series at `level` with up to `max_terms` terms of total degree
/// `<= max_degree` and coefficients in `[-p^2, p^2]`.
pub fn series<R: Rng>(
    rng: &mut R,
    ctx: &PrecisionContext,
    level: usize,
    max_terms: usize,
    max_degree: u32,
) -> Series {
    let bound = (ctx.p() * ctx.p()) as i64;
    let count = rng.gen_range(0..=max_terms);
    let terms = (0..count).map(|_| {
        let exps = random_exponents(rng, level, max_degree);
        (exps, BigInt::from(rng.gen_range(-bound..=bound)))
    });
    Series::from_terms(ctx, level, terms).expect("exponents fit the level")
}

fn random_exponents<R: Rng>(rng: &mut R, level: usize, max_degree: u32) -> Vec<u32> {
    let total = rng.gen_range(0..=max_degree);
    let mut exps = vec![0u32; level];
    if level > 0 {
        for _ in 0..total {
            exps[rng.gen_range(0..level)] += 1;
        }
    }
    exps
}

/// A random nonzero level-1 series `p^mu * (unit part + ...)` with exactly
/// `mu <= max_mu` and `lambda <= max_lambda`, coefficients up to degree
/// `max_degree`.
pub fn level1_with_invariants<R: Rng>(
    rng: &mut R,
    ctx: &PrecisionContext,
    max_mu: u32,
    max_lambda: usize,
    max_degree: usize,
) -> Series {
    let p = ctx.p();
    let mu = rng.gen_range(0..=max_mu.min(ctx.precision() - 1));
    let lambda = rng.gen_range(0..=max_lambda.min(max_degree));
    let mut coeffs = Vec::with_capacity(max_degree + 1);
    for i in 0..=max_degree {
        let mut c: u64 = rng.gen_range(0..p * p * p);
        if i < lambda {
            c -= c % p;
        } else if i == lambda {
            c = c - c % p + rng.gen_range(1..p);
        }
        coeffs.push(BigUint::from(c) * ctx.p_pow(mu));
    }
    Series::from_coeffs(ctx, &coeffs)
}

/// Random `rows x cols` presentation with sparse entries of degree
/// `<= max_degree`.
pub fn presentation<R: Rng>(
    rng: &mut R,
    ctx: &PrecisionContext,
    level: usize,
    group: &AbelianGroupSpec,
    rows: usize,
    cols: usize,
    max_degree: u32,
) -> Result<Presentation> {
    let elements = group.elements();
    let entries = (0..rows * cols)
        .map(|_| {
            let mut e = GroupRingElement::zero(ctx, level, group);
            for g in &elements {
                if elements.len() > 1 && rng.gen_bool(0.5) {
                    continue;
                }
                let s = series(rng, ctx, level, 3, max_degree);
                e = e.add(&GroupRingElement::basis(group, g, s))?;
            }
            Ok(e)
        })
        .collect::<Result<Vec<_>>>()?;
    Presentation::new(ctx, level, group, rows, cols, entries)
}

/// Random square presentation whose determinant is nonzero at precision
/// and lies outside the truncation ideal by a margin (its lowest-degree term
/// has degree `< D / 2`), retried until one is found.
pub fn torsion_square<R: Rng>(
    rng: &mut R,
    ctx: &PrecisionContext,
    level: usize,
    d: usize,
    max_degree: u32,
) -> Result<Presentation> {
    let g = AbelianGroupSpec::trivial();
    loop {
        let p = presentation(rng, ctx, level, &g, d, d, max_degree)?;
        let det = det_quadratic(&p)?.as_series().expect("trivial group");
        let margin = ctx.degree_cap() / 2;
        let ok = det
            .terms()
            .any(|(m, c): (&Monomial, &BigUint)| m.degree() < margin && ctx.valuation(c) < ctx.precision() / 2);
        if ok {
            return Ok(p);
        }
    }
}
