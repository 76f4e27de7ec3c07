//! Characteristic ideals, decompositions, oracle agreement and tower descent
//! on random presentations.

use iwasawa_core::fpmod::{char_ideal, check_multiplicativity, det_quadratic, fitting0};
use iwasawa_core::oracle::{cross_validate, FiniteQuotientSpec, OracleOptions};
use iwasawa_core::structure::{decompose, determinantal_divisors};
use iwasawa_core::tower::{fixed_part_check, levelwise_char, Tower};
use iwasawa_core::{
    sample, AbelianGroupSpec, CanonicalForm, GroupRingElement, PrecisionContext, Presentation,
    PrincipalIdeal, Series,
};
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn level1(p: &Presentation) -> CanonicalForm {
    char_ideal(p).unwrap().as_level1().unwrap().clone()
}

/// `U * diag * V` with unimodular `U`, `V` built from elementary matrices.
fn disguise(rng: &mut ChaCha8Rng, diag: &Presentation) -> Presentation {
    let ctx = diag.ctx();
    let g = AbelianGroupSpec::trivial();
    let d = diag.rows();
    let elementary = |rng: &mut ChaCha8Rng| {
        let mut m = Presentation::identity(ctx, 1, &g, d).unwrap();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    let s = sample::series(rng, ctx, 1, 2, 2);
                    let mut entries = m.entries().to_vec();
                    entries[i * d + j] = GroupRingElement::from_series(&g, s);
                    m = Presentation::new(ctx, 1, &g, d, d, entries).unwrap();
                    return m;
                }
            }
        }
        m
    };
    let u = elementary(rng);
    let v = elementary(rng);
    let w = elementary(rng);
    u.matmul(diag).unwrap().matmul(&v).unwrap().matmul(&w).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn char_equals_canonical_det(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = PrecisionContext::new(p, 8, 12).unwrap();
        let theta = sample::torsion_square(&mut rng, &c, 1, 2, 3).unwrap();
        let det = det_quadratic(&theta).unwrap().as_series().unwrap();
        prop_assert_eq!(level1(&theta), CanonicalForm::of(&det).unwrap());
        let fit = fitting0(&theta);
        prop_assert_eq!(fit.len(), 1);
    }

    #[test]
    fn divisor_chain_and_decomposition_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = PrecisionContext::new(3, 8, 12).unwrap();
        let theta = sample::torsion_square(&mut rng, &c, 1, 2, 2).unwrap();
        let g = determinantal_divisors(&theta).unwrap();
        prop_assert!(g[0].divides(&g[1]));
        prop_assert_eq!(&g[1], &level1(&theta));
        if let Ok(dec) = decompose(&theta) {
            prop_assert_eq!(dec.product(), g[1].clone());
            for (_, e) in &dec.primes {
                prop_assert!(e.windows(2).all(|w| w[0] >= w[1]));
            }
        }
    }

    #[test]
    fn multiplicativity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = PrecisionContext::new(3, 8, 14).unwrap();
        let t1 = sample::torsion_square(&mut rng, &c, 1, 2, 2).unwrap();
        let t3 = sample::torsion_square(&mut rng, &c, 1, 2, 2).unwrap();
        let v = check_multiplicativity(&t1, &t3, &mut rng).unwrap();
        prop_assert!(v.product_holds && v.inclusion_holds);
    }

    #[test]
    fn oracle_agrees_on_disguised_diagonals(seed in any::<u64>(), p in prop::sample::select(vec![2u64, 3])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = PrecisionContext::new(p, 8, 10).unwrap();
        let pick = ["1", "P", "X1", "P*X1", "X1 + P", "X1^2", "P^2"];
        let (i, j) = (rng.gen_range(0..pick.len()), rng.gen_range(0..pick.len()));
        let parse = |t: &str| Series::parse(&c, 1, &t.replace('P', &p.to_string())).unwrap();
        let d1s = parse(pick[i]);
        let d2s = d1s.mul(&parse(pick[j])).unwrap();
        let g = AbelianGroupSpec::trivial();
        let diag = Presentation::diagonal(vec![
            GroupRingElement::from_series(&g, d1s),
            GroupRingElement::from_series(&g, d2s),
        ]).unwrap();
        let theta = disguise(&mut rng, &diag);
        let spec = FiniteQuotientSpec { p, a: 2, b: 2, level: 1, group: g };
        let v = cross_validate(&theta, &spec, &OracleOptions::default());
        prop_assert!(v.is_ok(), "{:?} -> {:?}", theta, v);
        let v = v.unwrap();
        prop_assert_eq!(v.predicted, v.enumerated);
    }

    #[test]
    fn random_towers_descend(seed in any::<u64>(), m in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = PrecisionContext::new(3, 6, 6).unwrap();
        let g = AbelianGroupSpec::trivial();
        // a unit-diagonal perturbation keeps every level torsion
        let base = sample::torsion_square(&mut rng, &c, 1, 2, 2).unwrap().include_up(m).unwrap();
        let noise = sample::presentation(&mut rng, &c, m, &g, 2, 2, 2).unwrap();
        let x_top = Series::variable(&c, m, m).unwrap();
        let scaled = noise.map_entries(m, |e| e.scale_series(&x_top)).unwrap();
        let entries: Vec<GroupRingElement> = base
            .entries()
            .iter()
            .zip(scaled.entries())
            .map(|(a, b)| a.add(b).unwrap())
            .collect();
        let top = Presentation::new(&c, m, &g, 2, 2, entries).unwrap();
        let tower = Tower::from_top(&top).unwrap();
        let family = levelwise_char(&tower, false).unwrap();
        prop_assert_eq!(family.stabilization_level, Some(1));
        for j in 1..m {
            prop_assert!(fixed_part_check(&tower, j).is_ok());
        }
        prop_assert!(matches!(family.at(m), Some(PrincipalIdeal::Normalized(_))));
    }
}
