//! Ring laws, level maps and Weierstrass preparation on random series.

use iwasawa_core::powerseries::weierstrass_prepare;
use iwasawa_core::{sample, CanonicalForm, PrecisionContext, Series};
use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ctx(p: u64) -> PrecisionContext {
    PrecisionContext::new(p, 6, 7).unwrap()
}

fn triple(seed: u64, p: u64, level: usize) -> (Series, Series, Series) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = ctx(p);
    let mut s = || sample::series(&mut rng, &c, level, 5, 4);
    (s(), s(), s())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5]), level in 1usize..4) {
        let (a, b, c) = triple(seed, p, level);
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(
            a.mul(&b).unwrap().mul(&c).unwrap(),
            a.mul(&b.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert!(a.sub(&a).unwrap().is_zero());
    }

    #[test]
    fn projection_is_a_ring_map(seed in any::<u64>(), level in 2usize..5) {
        let (a, b, _) = triple(seed, 3, level);
        let down = |s: &Series| s.project_down().unwrap();
        prop_assert_eq!(down(&a.mul(&b).unwrap()), down(&a).mul(&down(&b)).unwrap());
        prop_assert_eq!(down(&a.add(&b).unwrap()), down(&a).add(&down(&b)).unwrap());
        // include_up is a section of the projection
        prop_assert_eq!(down(&a).include_up(level).unwrap().project_down().unwrap(), down(&a));
        prop_assert_eq!(a.project_to(1).unwrap(), (2..=level).rev().fold(a.clone(), |s, _| down(&s)));
    }

    #[test]
    fn units_invert(seed in any::<u64>(), level in 1usize..4) {
        let (a, _, _) = triple(seed, 5, level);
        let u = a.add(&Series::one(a.ctx(), level)).unwrap();
        if u.is_unit() {
            let inv = u.inverse().unwrap();
            prop_assert!(u.mul(&inv).unwrap().is_one());
        } else {
            prop_assert!(u.inverse().is_err());
        }
    }

    #[test]
    fn weierstrass_roundtrip(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // degree cap above deg(f * u), so the product is not truncated
        let c = PrecisionContext::new(p, 8, 16).unwrap();
        let f = sample::level1_with_invariants(&mut rng, &c, 3, 5, 11);
        let w = weierstrass_prepare(&f).unwrap();
        let pmu = BigUint::from(p).pow(w.mu);
        prop_assert_eq!(w.unit.mul(&w.distinguished).unwrap().scale(&pmu), f.clone());
        prop_assert!(w.unit.is_unit());
        // the canonical form is invariant under multiplication by units
        let u = Series::parse(&c, 1, "1 + 2*X1 - X1^3").unwrap();
        let u = if u.is_unit() { u } else { Series::parse(&c, 1, "1 + X1").unwrap() };
        prop_assert_eq!(
            CanonicalForm::of(&f.mul(&u).unwrap()).unwrap(),
            w.canonical()
        );
    }
}
