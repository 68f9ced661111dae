use nuca::algebra::{Fp, LaurentPoly, SymbolMatrix};
use nuca::ca_decide::Property;
use nuca::decide::verify::{probe_sites, random_config};
use nuca::decide::{decide, DecideOptions};
use nuca::format::{parse_spec, spec_to_json};
use nuca::nuca::{apply_step, apply_steps, dual_spec, induced_map, pairing, power_spec, Point};
use nuca::suite::random_spec;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn power_spec_agrees_with_iteration(seed in any::<u64>(), n in 1u64..6) {
        let mut r = rng(seed);
        let s = random_spec(&mut r);
        let t = power_spec(&s, n).unwrap();
        let x = random_config(&mut r, &s, &probe_sites(&s));
        prop_assert_eq!(apply_steps(&s, &x, n).unwrap(), apply_step(&t, &x).unwrap());
    }

    #[test]
    fn shift_equivariance(seed in any::<u64>(), g in -7i64..7) {
        let mut r = rng(seed);
        let s = random_spec(&mut r);
        let g = Point::new([g]);
        let x = random_config(&mut r, &s, &probe_sites(&s));
        let lhs = apply_step(&s.shift(&g), &x.shift(&g)).unwrap();
        prop_assert_eq!(lhs, apply_step(&s, &x).unwrap().shift(&g));
    }

    #[test]
    fn dual_is_adjoint(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_spec(&mut r);
        let sd = dual_spec(&s).unwrap();
        let sites = probe_sites(&s);
        let x = random_config(&mut r, &s, &sites);
        let y = random_config(&mut r, &s, &sites);
        prop_assert_eq!(
            pairing(&apply_step(&s, &x).unwrap(), &y),
            pairing(&x, &apply_step(&sd, &y).unwrap())
        );
    }

    #[test]
    fn dual_is_involutive(seed in any::<u64>()) {
        let s = random_spec(&mut rng(seed));
        let dd = dual_spec(&dual_spec(&s).unwrap()).unwrap();
        prop_assert!(dd.equivalent(&s));
    }

    #[test]
    fn induced_map_matches_global_step(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = random_spec(&mut r);
        let sites = probe_sites(&s);
        let x = random_config(&mut r, &s, &sites);
        let map = induced_map(&s, &sites).unwrap();
        let y = apply_step(&s, &x).unwrap();
        prop_assert_eq!(map.evaluate(&x.restrict(&map.domain_sites)), y.restrict(&map.codomain_sites));
    }

    #[test]
    fn spec_json_round_trips(seed in any::<u64>()) {
        let s = random_spec(&mut rng(seed));
        let text = spec_to_json(&s);
        prop_assert_eq!(parse_spec(&text).unwrap(), s);
    }
}

fn random_laurent(r: &mut ChaCha8Rng, f: Fp, d: usize) -> LaurentPoly {
    let terms: Vec<(Vec<i64>, i64)> = (0..r.gen_range(0..=3))
        .map(|_| ((0..d).map(|_| r.gen_range(-1..=1)).collect(), r.gen_range(0..f.modulus() as i64)))
        .collect();
    LaurentPoly::from_terms(f, d, terms)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cayley_hamilton(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = Fp::new([2, 3, 5][r.gen_range(0..3)]).unwrap();
        let (k, d) = (r.gen_range(1..=3), r.gen_range(1..=2));
        let entries = (0..k * k).map(|_| random_laurent(&mut r, f, d)).collect();
        let m = SymbolMatrix::from_entries(f, d, k, entries);
        prop_assert!(m.char_poly().evaluate(&m).is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn verdicts_are_shift_invariant(seed in any::<u64>(), g in -5i64..5) {
        let s = random_spec(&mut rng(seed));
        let moved = s.shift(&Point::new([g]));
        let opts = DecideOptions::default();
        for prop in [Property::Nilpotent, Property::Periodic, Property::EventuallyPeriodic, Property::Injective] {
            let a = decide(&s, prop, &opts).unwrap().verdict;
            let b = decide(&moved, prop, &opts).unwrap().verdict;
            prop_assert_eq!(a, b, "{:?}", prop);
        }
    }
}
