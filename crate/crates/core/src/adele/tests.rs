use super::sample::{random_adele, random_classical, random_open_around};
use super::*;
use crate::local::{Membership, Valuation};
use crate::transition::{BallSpec, Radius};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

fn tower(c: &[u64]) -> Tower {
    Tower::new(c.to_vec()).unwrap()
}

fn int(n: u64, k: i64) -> CycloElement {
    CycloElement::from_int(n, k)
}

fn primes(ps: &[u64]) -> BTreeSet<u64> {
    ps.iter().copied().collect()
}

/// Constant `value` on each level-`level` cylinder above `p`, chosen by `f(index)`.
fn cylinder_constant(t: &Tower, d: usize, p: u64, level: usize, f: impl Fn(usize) -> i64) -> Adele {
    let n = t.conductor(d);
    let m = t.conductor(level);
    let lower = places_above(m, Base::Prime(p));
    let slice = places_above(n, Base::Prime(p))
        .into_iter()
        .map(|y| {
            let w = restrict_place(&y, m).unwrap();
            (y, int(n, f(lower.binary_search(&w).unwrap())))
        })
        .collect();
    make_adele(t, d, BTreeMap::from([(Base::Prime(p), slice)]), CycloElement::zero(n)).unwrap()
}

fn ball_family(n: u64, p: u64, f: impl Fn(&FinitePlace) -> BallSpec) -> BTreeMap<FinitePlace, BallSpec> {
    places_above(n, Base::Prime(p)).into_iter().map(|y| (y, f(&y))).collect()
}

#[test]
fn zero_adele_is_valid() {
    let t = tower(&[1, 5]);
    let z = make_adele(&t, 1, BTreeMap::new(), CycloElement::zero(5)).unwrap();
    assert!(z.is_zero());
    assert!(z.support().is_empty());
}

#[test]
fn fractional_entry_above_eleven() {
    let t = tower(&[1, 5]);
    let places = places_above(5, Base::Prime(11));
    assert_eq!(places.len(), 4);
    let x = CycloElement::one(5).checked_sub(&CycloElement::zeta(5)).unwrap().scale(&BigRational::new(1.into(), 11.into()));
    let slice: Slice = places.iter().enumerate().map(|(i, y)| (*y, if i == 0 { x.clone() } else { CycloElement::zero(5) })).collect();
    let a = make_adele(&t, 1, BTreeMap::from([(Base::Prime(11), slice)]), CycloElement::zero(5)).unwrap();
    assert_eq!(a.support(), primes(&[11]));
    assert_eq!(a.value(&places[0]).unwrap(), x);
}

#[test]
fn default_with_foreign_denominator_is_rejected() {
    let t = tower(&[1, 5]);
    let slice = places_above(5, Base::Prime(3)).into_iter().map(|y| (y, int(5, 1))).collect();
    let err = make_adele(&t, 1, BTreeMap::from([(Base::Prime(3), slice)]), CycloElement::ratio(5, 1, 2)).unwrap_err();
    assert!(matches!(err, Error::TailNotIntegral(q) if q == "2"));
}

#[test]
fn incomplete_fiber_is_rejected() {
    let t = tower(&[1, 5]);
    let slice: Slice = places_above(5, Base::Prime(11)).into_iter().take(2).map(|y| (y, int(5, 1))).collect();
    let err = make_adele(&t, 1, BTreeMap::from([(Base::Prime(11), slice)]), CycloElement::zero(5)).unwrap_err();
    assert!(matches!(err, Error::FiberIncomplete(11)));
}

#[test]
fn identities_and_pruning() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let a = random_adele(&t, 1, &[3, 7, 11], true, &mut rng).unwrap();
        assert_eq!(a.add(&Adele::zero(&t, 0).unwrap()).unwrap(), a);
        assert_eq!(a.mul(&Adele::one(&t, 2).unwrap()).unwrap(), a);
        let d = a.sub(&a).unwrap();
        assert!(d.is_zero());
        assert!(a.add(&a.neg()).unwrap().is_zero());
    }
}

#[test]
fn ring_axioms_on_random_triples() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..60 {
        let a = random_adele(&t, i % 3, &[3, 7, 11], true, &mut rng).unwrap();
        let b = random_adele(&t, (i + 1) % 3, &[3, 7, 11], true, &mut rng).unwrap();
        let c = random_adele(&t, (i + 2) % 3, &[3, 7], false, &mut rng).unwrap();
        assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
    }
}

#[test]
fn tower_mismatch_is_reported() {
    let a = Adele::one(&tower(&[1, 5]), 1).unwrap();
    let b = Adele::one(&tower(&[1, 8]), 1).unwrap();
    assert!(matches!(a.add(&b), Err(Error::TowerMismatch)));
}

#[test]
fn conorm_of_three_fills_the_fiber() {
    let t = tower(&[1, 11, 121]);
    let w = places_above(1, Base::Prime(3))[0];
    let c = ClassicalAdele::new(&t, 0, BTreeMap::from([(w, int(1, 3))]), CycloElement::zero(1)).unwrap();
    let a = c.conorm_adele(2).unwrap();
    let slice = &a.slices()[&Base::Prime(3)];
    assert_eq!(slice.len(), 22);
    assert!(slice.values().all(|x| *x == int(121, 3)));
    assert!(a.default_value().is_zero());
    assert_eq!(a.in_conorm_image(0), Some(c));
}

#[test]
fn conorm_of_zero_is_zero() {
    let t = tower(&[1, 11, 121]);
    assert!(ClassicalAdele::zero(&t, 1).unwrap().conorm_adele(2).unwrap().is_zero());
}

#[test]
fn conorm_rejects_lower_target() {
    let t = tower(&[1, 5, 20]);
    let c = ClassicalAdele::zero(&t, 2).unwrap();
    assert!(matches!(c.conorm(1), Err(Error::LevelOrder { source_level: 2, target: 1 })));
}

#[test]
fn conorms_compose() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let c = random_classical(&t, 0, &[3, 7, 11, 13], &mut rng).unwrap();
        assert_eq!(c.conorm(1).unwrap().conorm(2).unwrap(), c.conorm(2).unwrap());
        assert_eq!(c.conorm(1).unwrap().conorm_adele(2).unwrap(), c.conorm_adele(2).unwrap());
        let level = 1;
        let c1 = random_classical(&t, level, &[3, 11], &mut rng).unwrap();
        let image = c1.conorm_adele(2).unwrap();
        assert_eq!(image.in_conorm_image(level), Some(c1.clone()));
        assert!(image.least_conorm_level().0 <= level);
    }
}

#[test]
fn conorm_is_a_ring_homomorphism() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..20 {
        let a = random_classical(&t, 1, &[3, 11], &mut rng).unwrap();
        let b = random_classical(&t, 1, &[3, 11], &mut rng).unwrap();
        let (ia, ib) = (a.conorm_adele(2).unwrap(), b.conorm_adele(2).unwrap());
        let sum = ia.add(&ib).unwrap();
        let witness = sum.in_conorm_image(1).expect("sums of conorms are conorms");
        assert_eq!(witness.conorm_adele(2).unwrap(), sum);
        assert!(ia.mul(&ib).unwrap().in_conorm_image(1).is_some());
    }
}

#[test]
fn conorm_image_discriminates_levels() {
    let t = tower(&[1, 11, 121]);
    assert_eq!(places_above(11, Base::Prime(3)).len(), 2);
    let split = cylinder_constant(&t, 2, 3, 1, |i| i as i64 + 1);
    assert!(split.in_conorm_image(2).is_some());
    assert!(split.in_conorm_image(1).is_some());
    assert!(split.in_conorm_image(0).is_none());
    assert_eq!(split.least_conorm_level().0, 1);

    let flat = cylinder_constant(&t, 2, 3, 1, |_| 5);
    assert!(flat.in_conorm_image(0).is_some());

    // constant on cylinders but with a value outside Q(zeta_11)
    let n = 121;
    let slice = places_above(n, Base::Prime(3)).into_iter().map(|y| (y, CycloElement::zeta(n))).collect();
    let a = make_adele(&t, 2, BTreeMap::from([(Base::Prime(3), slice)]), CycloElement::zero(n)).unwrap();
    assert!(a.in_conorm_image(1).is_none());
    assert_eq!(a.least_conorm_level().0, 2);
}

#[test]
fn zero_lies_in_every_base_neighborhood() {
    let t = tower(&[1, 5, 20]);
    let zero = Adele::zero(&t, 2).unwrap();
    for n in [1, 2, 9, 27] {
        let u = NeighborhoodBaseElement::new(primes(&[3, 7]), n).unwrap().open(&t).unwrap();
        assert_eq!(u.contains(&zero).unwrap(), Membership::In);
    }
}

#[test]
fn non_integral_entry_leaves_the_unit_tail() {
    let t = tower(&[1, 5]);
    let a = Adele::constant(&t, 1, &CycloElement::ratio(5, 1, 11)).unwrap();
    let u = NeighborhoodBaseElement::new(primes(&[3]), 1).unwrap().open(&t).unwrap();
    // ARCH ball radius 1 contains 1/11; the failure is integrality above 11
    assert_eq!(u.contains(&a).unwrap(), Membership::Out);
}

#[test]
fn ball_around_own_values_contains_the_adele() {
    let t = tower(&[1, 11, 121]);
    let a = cantor_adele(&t, 3, 2).unwrap();
    let balls = ball_family(121, 3, |y| BallSpec { center: a.value(y).unwrap(), radius: Radius::Padic(2) });
    let u = basic_open(&t, 2, BTreeMap::from([(Base::Prime(3), balls)])).unwrap();
    assert_eq!(u.contains(&a).unwrap(), Membership::In);
    assert_eq!(u.contains(&Adele::zero(&t, 0).unwrap()).unwrap(), Membership::Out);
}

#[test]
fn ramified_membership_is_an_error() {
    let t = tower(&[1, 5]);
    let balls = ball_family(5, 5, |_| BallSpec { center: CycloElement::zero(5), radius: Radius::Padic(0) });
    let u = basic_open(&t, 1, BTreeMap::from([(Base::Prime(5), balls)])).unwrap();
    let a = Adele::constant(&t, 1, &CycloElement::zeta(5)).unwrap();
    assert!(matches!(u.contains(&a), Err(Error::Ramified { p: 5, .. })));
}

#[test]
fn shrinking_radius_shrinks_the_neighborhood() {
    let t = tower(&[1, 5, 20]);
    for n in [1, 2, 3, 5, 9] {
        let s = primes(&[3, 11]);
        let big = NeighborhoodBaseElement::new(s.clone(), n).unwrap().open(&t).unwrap();
        let small = NeighborhoodBaseElement::new(s, 2 * n).unwrap().open(&t).unwrap();
        assert_eq!(small.is_subset_of(&big).unwrap(), Membership::In);
    }
}

#[test]
fn base_refinement_for_radius_three_to_minus_two() {
    let t = tower(&[1, 11, 121]);
    let balls = ball_family(121, 3, |_| BallSpec { center: CycloElement::zero(121), radius: Radius::Padic(2) });
    let u = basic_open(&t, 2, BTreeMap::from([(Base::Prime(3), balls)])).unwrap();
    let b = find_base_refinement(&u).unwrap();
    assert!(b.n >= 9);
    assert_eq!(b.open(&t).unwrap().is_subset_of(&u).unwrap(), Membership::In);
    // n = 3 is too coarse: the ball {v ≥ 2} is not inside {v ≥ 3}
    let coarse = NeighborhoodBaseElement::new(primes(&[3]), 3).unwrap().open(&t).unwrap();
    assert_eq!(coarse.is_subset_of(&u).unwrap(), Membership::Out);
}

#[test]
fn epsilon_is_the_smallest_radius() {
    let t = tower(&[1, 11, 121]);
    let a = cantor_adele(&t, 3, 2).unwrap();
    let uniform = ball_family(121, 3, |y| BallSpec { center: a.value(y).unwrap(), radius: Radius::Padic(1) });
    let u = basic_open(&t, 2, BTreeMap::from([(Base::Prime(3), uniform)])).unwrap();
    assert_eq!(epsilon_for(&u, &a).unwrap().padic[&3], 1);

    let first = places_above(121, Base::Prime(3))[0];
    let mixed = ball_family(121, 3, |y| BallSpec {
        center: a.value(y).unwrap(),
        radius: Radius::Padic(if *y == first { 4 } else { 1 }),
    });
    let u = basic_open(&t, 2, BTreeMap::from([(Base::Prime(3), mixed)])).unwrap();
    let eps = epsilon_for(&u, &a).unwrap();
    assert_eq!(eps.padic[&3], 4);
    assert_eq!(eps.arch, None);
}

#[test]
fn epsilon_archimedean_slack() {
    let t = tower(&[1, 5]);
    let quarter = CycloElement::ratio(5, 1, 4);
    let entries = places_above(5, Base::Arch).into_iter().map(|y| (y, quarter.clone())).collect();
    let a = ClassicalAdele::new(&t, 1, entries, CycloElement::zero(5)).unwrap().conorm_adele(1).unwrap();
    let arch = places_above(5, Base::Arch)
        .into_iter()
        .map(|y| (y, BallSpec { center: CycloElement::zero(5), radius: Radius::Arch(BigRational::new(1.into(), 2.into())) }))
        .collect();
    let u = basic_open(&t, 1, BTreeMap::from([(Base::Arch, arch)])).unwrap();
    let slack = epsilon_for(&u, &a).unwrap().arch.unwrap();
    let quarter = BigRational::new(1.into(), 4.into());
    assert!(slack > BigRational::from_integer(0.into()) && slack <= quarter);
    assert!(quarter - &slack < BigRational::new(1.into(), BigInt::from(1u64 << 40)));
}

#[test]
fn epsilon_outside_is_not_contained() {
    let t = tower(&[1, 5]);
    let a = Adele::constant(&t, 1, &CycloElement::ratio(5, 1, 3)).unwrap();
    let u = NeighborhoodBaseElement::new(primes(&[3]), 1).unwrap().open(&t).unwrap();
    assert!(matches!(epsilon_for(&u, &a), Err(Error::NotContained(_))));
}

#[test]
fn densify_returns_the_witness_of_a_conorm() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let c = random_classical(&t, 1, &[3, 11], &mut rng).unwrap();
        let a = c.conorm_adele(2).unwrap();
        let u = random_open_around(&a, &[7], true, &mut rng).unwrap();
        let out = densify(&a, &u).unwrap();
        assert!(out.level <= 1);
        assert_eq!(out.witness.conorm_adele(2).unwrap(), a);
        assert_eq!(u.contains(&out.witness.conorm_adele(2).unwrap()).unwrap(), Membership::In);
    }
}

#[test]
fn densify_depth_two_input() {
    let t = tower(&[1, 11, 121]);
    let a = cantor_adele(&t, 3, 2).unwrap();
    let balls = ball_family(121, 3, |y| BallSpec { center: a.value(y).unwrap(), radius: Radius::Padic(1) });
    let u = basic_open(&t, 2, BTreeMap::from([(Base::Prime(3), balls)])).unwrap();
    let out = densify(&a, &u).unwrap();
    assert_eq!(out.level, 2);
    assert_eq!(out.witness.conductor(), 121);
    assert_eq!(u.contains(&out.witness.conorm_adele(2).unwrap()).unwrap(), Membership::In);
}

#[test]
fn densify_outside_fails() {
    let t = tower(&[1, 5]);
    let a = Adele::constant(&t, 1, &CycloElement::ratio(5, 1, 3)).unwrap();
    let u = NeighborhoodBaseElement::new(primes(&[7]), 1).unwrap().open(&t).unwrap();
    assert!(matches!(densify(&a, &u), Err(Error::NotContained(_))));
}

#[test]
fn separating_open_excludes_zero() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let zero = Adele::zero(&t, 0).unwrap();
    let mut seen = 0;
    while seen < 15 {
        let a = random_adele(&t, 2, &[3, 7, 11], true, &mut rng).unwrap();
        if a.is_zero() {
            continue;
        }
        seen += 1;
        let u = separating_open(&a).unwrap();
        assert_eq!(u.contains(&a).unwrap(), Membership::In);
        assert_eq!(u.contains(&zero).unwrap(), Membership::Out);
    }
    assert!(separating_open(&zero).is_err());
}

#[test]
fn separating_a_pure_default() {
    let t = tower(&[1, 5]);
    let a = Adele::constant(&t, 1, &int(5, 6)).unwrap();
    let u = separating_open(&a).unwrap();
    assert_eq!(u.contains(&a).unwrap(), Membership::In);
    assert_eq!(u.contains(&Adele::zero(&t, 1).unwrap()).unwrap(), Membership::Out);
}

#[test]
fn cantor_values_are_distinct_digits() {
    let t = tower(&[1, 11, 121]);
    assert_eq!(cantor_widths(&t, 3, 2).unwrap(), vec![0, 1, 3]);
    let a = cantor_adele(&t, 3, 2).unwrap();
    let slice = &a.slices()[&Base::Prime(3)];
    assert_eq!(slice.len(), 22);
    let values: BTreeSet<BigInt> = slice.values().map(|x| x.as_rational().unwrap().to_integer()).collect();
    assert_eq!(values.len(), 22);
    assert!(values.iter().all(|v| *v >= BigInt::from(0) && *v < BigInt::from(243)));
    // the low trit names the level-1 cylinder
    let level1 = places_above(11, Base::Prime(3));
    for (y, x) in slice {
        let low = x.as_rational().unwrap().to_integer() % 3;
        let w = restrict_place(y, 11).unwrap();
        assert_eq!(low, BigInt::from(level1.binary_search(&w).unwrap()));
    }
}

#[test]
fn cantor_depth_zero_is_constant() {
    let t = tower(&[1, 11, 121]);
    let a = cantor_adele(&t, 3, 0).unwrap();
    assert!(a.is_zero());
    assert!(a.in_conorm_image(0).is_some());
}

#[test]
fn cantor_lies_outside_lower_conorm_images() {
    let t = tower(&[1, 11, 121]);
    let a = cantor_adele(&t, 3, 2).unwrap();
    assert!(a.in_conorm_image(0).is_none());
    assert!(a.in_conorm_image(1).is_none());
    assert_eq!(a.least_conorm_level().0, 2);
}

#[test]
fn cantor_preconditions() {
    let t = tower(&[1, 11, 121]);
    assert!(matches!(cantor_adele(&t, 11, 1), Err(Error::Ramified { p: 11, .. })));
    assert!(matches!(cantor_adele(&t, 4, 1), Err(Error::NotPrime(4))));
    // 2 is inert in Q(zeta_5)
    assert!(matches!(cantor_adele(&tower(&[1, 5]), 2, 1), Err(Error::NoSplitting { p: 2, .. })));
}

#[test]
fn cantor_truncations_converge() {
    let t = tower(&[1, 11, 121]);
    let seq = cantor_truncations(&t, 3, 2).unwrap();
    let base: Vec<_> = (0..=4).map(|j| NeighborhoodBaseElement::new(primes(&[3]), 3u64.pow(j)).unwrap()).collect();
    let report = is_cauchy(&seq, &base).unwrap();
    assert!(report.cauchy());
    let indices: Vec<usize> = report.indices.iter().map(|(_, i)| *i).collect();
    assert_eq!(indices, vec![1, 2, 2, 2, 2]);

    let limit = limit_local(&seq, 3, 6).unwrap();
    let full = cantor_adele(&t, 3, 2).unwrap();
    for (y, x) in &limit.values {
        let expected = crate::local::localize(&full.value(y).unwrap(), x.context(), y).unwrap();
        assert!(x.agrees_with(&expected).unwrap());
    }
    assert_eq!(limit.stable_from, 2);
    assert_eq!(limit.constant_depth, 2);
    assert!(matches!(limit.require_constant_at(1), Err(Error::NotLocallyConstant(1))));
    assert!(limit.require_constant_at(2).is_ok());
}

#[test]
fn constant_sequence_is_cauchy() {
    let t = tower(&[1, 5]);
    let a = Adele::constant(&t, 1, &CycloElement::zeta(5)).unwrap();
    let seq = vec![a.clone(); 4];
    let base = vec![NeighborhoodBaseElement::new(primes(&[3, 11]), 100).unwrap()];
    let report = is_cauchy(&seq, &base).unwrap();
    assert!(report.cauchy());
    assert_eq!(report.indices[0].1, 0);
    // zeta_5 is not in Q_11, so its transported values vary across the fiber
    let limit = limit_local(&seq, 11, 4).unwrap();
    assert_eq!(limit.stable_from, 0);
    assert_eq!(limit.constant_depth, 1);
    let rational = vec![Adele::constant(&t, 1, &CycloElement::ratio(5, 2, 7)).unwrap(); 3];
    assert_eq!(limit_local(&rational, 11, 4).unwrap().constant_depth, 0);
    assert!(matches!(is_cauchy(&[], &base), Err(Error::EmptySequence)));
}

#[test]
fn geometric_partial_sums() {
    let t = tower(&[1, 5]);
    let p = 3u64;
    let w = places_above(1, Base::Prime(p))[0];
    let seq: Vec<Adele> = (0..6)
        .map(|m| {
            let s: i64 = (0..=m).map(|k| 3i64.pow(k)).sum();
            ClassicalAdele::new(&t, 0, BTreeMap::from([(w, int(1, s))]), CycloElement::zero(1))
                .unwrap()
                .conorm_adele(1)
                .unwrap()
        })
        .collect();
    // a_n - a_m has valuation m + 1 at every place above 3
    let y = places_above(5, Base::Prime(p))[0];
    for m in 0..5 {
        let d = seq[5].sub(&seq[m]).unwrap();
        assert_eq!(padic_valuation(&d.value(&y).unwrap(), &y).unwrap(), Valuation::Finite(m as i64 + 1));
    }
    let base: Vec<_> = (0..5).map(|j| NeighborhoodBaseElement::new(primes(&[3]), 3u64.pow(j)).unwrap()).collect();
    let report = is_cauchy(&seq, &base).unwrap();
    assert!(report.cauchy());
    let indices: Vec<usize> = report.indices.iter().map(|(_, i)| *i).collect();
    assert_eq!(indices, vec![0, 1, 2, 3, 4]);
    let limit = limit_local(&seq, p, 4).unwrap();
    assert_eq!(limit.stable_from, 3);
    assert!(limit.values.values().all(|x| x.valuation() == Valuation::Finite(0)));
}

#[test]
fn local_target_densifies() {
    let t = tower(&[1, 11, 121]);
    let seq = cantor_truncations(&t, 3, 2).unwrap();
    let limit = limit_local(&seq, 3, 6).unwrap();
    let target = limit.as_slice(&t);
    let out = densify_local(&target, 4).unwrap();
    assert_eq!(out.level, 2);
    assert!(matches!(densify_local(&target, 6), Err(Error::Precision(_))));
}

#[test]
fn json_round_trips() {
    let t = tower(&[1, 5, 20]);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10 {
        let a = random_adele(&t, 2, &[3, 11], true, &mut rng).unwrap();
        let text = a.to_json();
        let back = Adele::from_json(&text).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_json(), text);

        let c = random_classical(&t, 1, &[3, 11], &mut rng).unwrap();
        let text = c.to_json();
        assert_eq!(ClassicalAdele::from_json(&text).unwrap(), c);

        let u = random_open_around(&a, &[7], true, &mut rng).unwrap();
        let text = u.to_json();
        let back = BasicOpen::from_json(&text).unwrap();
        assert_eq!(back, u);
        assert_eq!(back.to_json(), text);
    }
    assert!(matches!(Adele::from_json(&Adele::zero(&t, 0).unwrap().to_json().replace("adele/1", "adele/0")), Err(Error::Schema(_))));
}

#[test]
fn random_opens_contain_their_center() {
    let t = tower(&[1, 8, 24]);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..10 {
        let a = random_adele(&t, 2, &[5, 7], true, &mut rng).unwrap();
        let u = random_open_around(&a, &[11], true, &mut rng).unwrap();
        assert_eq!(u.contains(&a).unwrap(), Membership::In);
    }
}
