use nuca::algebra::{Fp, Mat};
use nuca::ca_decide::Property;
use nuca::decide::{
    construct_inverse, decide, decide_cayley_hamilton, decide_eventually_periodic, decide_injective,
    decide_nilpotent, decide_periodic, decide_post_surjective, Certificate, DecideOptions, Witness,
};
use nuca::nuca::{apply_step, compose, LocalRule, NucaSpec, PatternConfig, Point};
use nuca::oracle::{
    annihilator_coeffs, finite_support_kernel, kernel_window_d1, oracle_annihilator, oracle_power_agreement,
    oracle_power_matches, oracle_trapped_enumeration, tail_subspace, Side,
};
use nuca::suite::{scalar_ca, scalar_rule};
use nuca::NucaError;

fn f2() -> Fp {
    Fp::new(2).unwrap()
}

fn opts() -> DecideOptions {
    DecideOptions::default()
}

fn zero_plus(rule: LocalRule) -> NucaSpec {
    scalar_ca(f2(), 1, &[(&[0], 0)]).with_perturbations(vec![(Point::new([0]), rule)]).unwrap()
}

fn id_plus(rule: LocalRule) -> NucaSpec {
    scalar_ca(f2(), 1, &[(&[0], 1)]).with_perturbations(vec![(Point::new([0]), rule)]).unwrap()
}

#[test]
fn nilpotent_examples() {
    let zero = scalar_ca(f2(), 1, &[(&[0], 0)]);
    let r = decide_nilpotent(&zero, &opts()).unwrap();
    assert_eq!(r.certificate, Some(Certificate::Nilpotent { exponent: 1 }));
    assert!(!decide_nilpotent(&zero_plus(scalar_rule(f2(), &[(&[0], 1)])), &opts()).unwrap().verdict);
    let r = decide_nilpotent(&zero_plus(scalar_rule(f2(), &[(&[1], 1)])), &opts()).unwrap();
    assert!(r.verdict);
    assert_eq!(r.certificate, Some(Certificate::Nilpotent { exponent: 2 }));
}

#[test]
fn periodic_examples() {
    let id = scalar_ca(f2(), 1, &[(&[0], 1)]);
    assert_eq!(decide_periodic(&id, &opts()).unwrap().certificate, Some(Certificate::Periodic { period: 1 }));
    assert!(!decide_periodic(&id_plus(scalar_rule(f2(), &[(&[0], 0)])), &opts()).unwrap().verdict);
    let xor = id_plus(scalar_rule(f2(), &[(&[0], 1), (&[1], 1)]));
    assert_eq!(decide_periodic(&xor, &opts()).unwrap().certificate, Some(Certificate::Periodic { period: 2 }));
}

#[test]
fn eventual_examples() {
    let own = zero_plus(scalar_rule(f2(), &[(&[0], 1)]));
    assert_eq!(
        decide_eventually_periodic(&own, &opts()).unwrap().certificate,
        Some(Certificate::EventuallyPeriodic { preperiod: 1, period: 1 })
    );
    let r90 = scalar_ca(f2(), 1, &[(&[-1], 1), (&[1], 1)])
        .with_perturbations(vec![(Point::new([0]), scalar_rule(f2(), &[(&[0], 1)]))])
        .unwrap();
    let r = decide_eventually_periodic(&r90, &opts()).unwrap();
    assert!(!r.verdict);
    assert_eq!(r.witness, Some(Witness::BaseFails));
    let nil = zero_plus(scalar_rule(f2(), &[(&[1], 1)]));
    match decide_eventually_periodic(&nil, &opts()).unwrap().certificate {
        Some(Certificate::EventuallyPeriodic { period, .. }) => assert_eq!(period, 1),
        c => panic!("{c:?}"),
    }
}

#[test]
fn cayley_hamilton_examples() {
    let id = scalar_ca(f2(), 1, &[(&[0], 1)]);
    match decide_cayley_hamilton(&id, &opts()).unwrap().certificate {
        Some(Certificate::Annihilator { preperiod, period }) => {
            assert_eq!(period, 1);
            assert!(oracle_annihilator(&id, &annihilator_coeffs(2, preperiod, period), 20, 1).unwrap());
        }
        c => panic!("{c:?}"),
    }
    let nil = zero_plus(scalar_rule(f2(), &[(&[1], 1)]));
    assert!(oracle_annihilator(&nil, &[0, 0, 1], 30, 2).unwrap());
    let r90 = scalar_ca(f2(), 1, &[(&[-1], 1), (&[1], 1)]);
    assert!(!decide_cayley_hamilton(&r90, &opts()).unwrap().verdict);
    assert!(!oracle_annihilator(&r90, &[1, 0, 1], 5, 3).unwrap());
    let table = id_plus(LocalRule::table(f2(), 1, vec![Point::new([0]), Point::new([1])], vec![0, 0, 0, 1]).unwrap());
    assert!(matches!(decide_cayley_hamilton(&table, &opts()), Err(NucaError::Unsupported(_))));
}

#[test]
fn injective_examples() {
    let onepx = scalar_ca(f2(), 1, &[(&[0], 1), (&[1], 1)]);
    let r = decide_injective(&onepx, &opts()).unwrap();
    assert!(!r.verdict);
    assert!(matches!(r.witness, Some(Witness::NonUnitDeterminant(_))));
    assert_eq!(finite_support_kernel(&onepx, 4).unwrap(), None);
    let (_, ker) = kernel_window_d1(&onepx, 2).unwrap();
    assert!(ker.dim() > 0);

    let zero_at_0 = id_plus(scalar_rule(f2(), &[(&[0], 0)]));
    let r = decide_injective(&zero_at_0, &opts()).unwrap();
    let delta = PatternConfig::delta(f2(), 1, Point::new([0]), vec![1]);
    assert_eq!(r.witness, Some(Witness::Kernel(delta.clone())));
    assert_eq!(finite_support_kernel(&zero_at_0, 0).unwrap(), Some(delta));
    let (sites, ker) = kernel_window_d1(&zero_at_0, 1).unwrap();
    assert_eq!(ker.dim(), 1);
    let v = &ker.basis_vectors()[0];
    let at0 = sites.iter().position(|p| p == &Point::new([0])).unwrap();
    assert!(v.iter().enumerate().all(|(i, &x)| (x != 0) == (i == at0)));

    let xor = id_plus(scalar_rule(f2(), &[(&[0], 1), (&[1], 1)]));
    assert!(decide_injective(&xor, &opts()).unwrap().verdict);
    for r in 0..4 {
        assert_eq!(kernel_window_d1(&xor, r).unwrap().1.dim(), 0);
    }
}

#[test]
fn tail_subspace_examples() {
    let onepx = scalar_rule(f2(), &[(&[0], 1), (&[1], 1)]);
    assert_eq!(tail_subspace(&onepx, Side::Right, 1).unwrap().space.dim(), 1);
    assert_eq!(tail_subspace(&onepx, Side::Left, 1).unwrap().space.dim(), 1);
    let id = scalar_rule(f2(), &[(&[0], 1)]);
    assert_eq!(tail_subspace(&id, Side::Right, 2).unwrap().space.dim(), 0);
    let shift = scalar_rule(f2(), &[(&[1], 1)]);
    assert_eq!(tail_subspace(&shift, Side::Left, 2).unwrap().space.dim(), 0);
}

#[test]
fn inverse_examples() {
    let xor_rule = scalar_rule(f2(), &[(&[0], 1), (&[1], 1)]);
    let xor = id_plus(xor_rule.clone());
    let inv = construct_inverse(&xor, 4).unwrap();
    assert!(inv.equivalent(&xor));
    let id = NucaSpec::identity(f2(), 1, 1);
    assert!(compose(&inv, &xor).unwrap().equivalent(&id));

    let shift = scalar_ca(f2(), 1, &[(&[1], 1)]);
    let inv = construct_inverse(&shift, 2).unwrap();
    assert!(inv.equivalent(&scalar_ca(f2(), 1, &[(&[-1], 1)])));

    let bad = id_plus(scalar_rule(f2(), &[(&[0], 0)]));
    assert!(matches!(construct_inverse(&bad, 3), Err(NucaError::Precondition(_))));
}

#[test]
fn inverse_with_matrix_perturbation() {
    let f = Fp::new(3).unwrap();
    let a = Mat::from_rows(f, &[vec![1, 1], vec![0, 1]]).unwrap();
    let base = NucaSpec::linear_ca(f, 2, 1, vec![(Point::new([1]), a)]).unwrap();
    let r = LocalRule::linear(
        f,
        2,
        vec![Point::new([0]), Point::new([1])],
        vec![Mat::from_rows(f, &[vec![0, 0], vec![1, 0]]).unwrap(), Mat::identity(f, 2)],
    )
    .unwrap();
    let s = base.with_perturbations(vec![(Point::new([0]), r)]).unwrap();
    let verdict = decide_injective(&s, &opts()).unwrap().verdict;
    match construct_inverse(&s, 5) {
        Ok(t) => {
            assert!(verdict);
            let id = NucaSpec::identity(f, 2, 1);
            assert!(compose(&t, &s).unwrap().equivalent(&id));
            assert!(compose(&s, &t).unwrap().equivalent(&id));
        }
        Err(e) => assert!(!verdict, "{e}"),
    }
}

#[test]
fn post_surjective_examples() {
    assert!(decide_post_surjective(&NucaSpec::identity(f2(), 1, 1), &opts()).unwrap().verdict);
    assert!(!decide_post_surjective(&scalar_ca(f2(), 1, &[(&[0], 0)]), &opts()).unwrap().verdict);
    let r = decide_post_surjective(&id_plus(scalar_rule(f2(), &[(&[0], 0)])), &opts()).unwrap();
    assert!(!r.verdict);
    assert!(matches!(r.dual.unwrap().witness, Some(Witness::Kernel(_))));
}

#[test]
fn trapped_enumeration_examples() {
    assert!(oracle_trapped_enumeration(&zero_plus(scalar_rule(f2(), &[(&[1], 1)])), Property::Nilpotent).unwrap());
    assert!(!oracle_trapped_enumeration(&zero_plus(scalar_rule(f2(), &[(&[0], 1)])), Property::Nilpotent).unwrap());
    assert!(!oracle_trapped_enumeration(&id_plus(scalar_rule(f2(), &[(&[0], 0)])), Property::Periodic).unwrap());
    let and = id_plus(LocalRule::table(f2(), 1, vec![Point::new([0]), Point::new([1])], vec![0, 0, 0, 1]).unwrap());
    assert!(!oracle_trapped_enumeration(&and, Property::Periodic).unwrap());
    assert!(!decide(&and, Property::Periodic, &opts()).unwrap().verdict);
}

#[test]
fn power_agreement_and_negative_control() {
    let r90 = scalar_ca(f2(), 1, &[(&[-1], 1), (&[1], 1)]);
    assert!(oracle_power_agreement(&r90, 2, 20, 0).unwrap());
    assert!(oracle_power_agreement(&NucaSpec::identity(f2(), 1, 1), 3, 10, 0).unwrap());
    // claiming σ² = σ for rule 90 is wrong
    assert!(!oracle_power_matches(&r90, &r90, 2, 20, 0).unwrap());
}

#[test]
fn witness_vanishes() {
    let s = id_plus(scalar_rule(f2(), &[(&[0], 0)]));
    let Some(Witness::Kernel(x)) = decide_injective(&s, &opts()).unwrap().witness else { panic!() };
    assert!(apply_step(&s, &x).unwrap().is_zero());
}
