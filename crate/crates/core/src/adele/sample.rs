//! Seeded generators for the property suites.

use super::open::{basic_open, BasicOpen};
use super::{make_adele, Adele, ClassicalAdele, Slice};
use crate::cyclotomic::{CycloElement, Tower};
use crate::error::Result;
use crate::place::{places_above, Base, FinitePlace};
use crate::transition::{BallSpec, Radius};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::BTreeMap;

/// Random element whose denominator is a product of powers of `primes`.
pub fn element_with_denominators<R: Rng + ?Sized>(n: u64, rng: &mut R, bound: i64, primes: &[u64], max_exp: u32) -> CycloElement {
    let x = CycloElement::random(n, rng, bound, 1);
    let mut den = BigInt::one();
    for &p in primes {
        den *= BigInt::from(p).pow(rng.gen_range(0..=max_exp));
    }
    x.scale(&BigRational::new(BigInt::one(), den))
}

fn random_subset<R: Rng + ?Sized>(items: &[u64], rng: &mut R) -> Vec<u64> {
    items.iter().copied().filter(|_| rng.gen_bool(0.5)).collect()
}

/// A random adèle at depth `d` supported on a subset of `primes`, with an optional
/// archimedean slice.
pub fn random_adele<R: Rng + ?Sized>(tower: &Tower, d: usize, primes: &[u64], arch: bool, rng: &mut R) -> Result<Adele> {
    let n = tower.conductor(d);
    let support = random_subset(primes, rng);
    let mut slices: BTreeMap<Base, Slice> = BTreeMap::new();
    for &p in &support {
        let slice = places_above(n, Base::Prime(p))
            .into_iter()
            .map(|y| (y, element_with_denominators(n, rng, 4, &[p], 2)))
            .collect();
        slices.insert(Base::Prime(p), slice);
    }
    if arch && rng.gen_bool(0.5) {
        let slice = places_above(n, Base::Arch).into_iter().map(|y| (y, CycloElement::random(n, rng, 3, 4))).collect();
        slices.insert(Base::Arch, slice);
    }
    let default = element_with_denominators(n, rng, 3, &support, 1);
    make_adele(tower, d, slices, default)
}

/// A random classical adèle of `K_level`: full or partial fibers above a subset of
/// `primes`, some archimedean entries, and a default whose denominator primes have
/// their full fibers present.
pub fn random_classical<R: Rng + ?Sized>(tower: &Tower, level: usize, primes: &[u64], rng: &mut R) -> Result<ClassicalAdele> {
    let n = tower.conductor(level);
    let mut entries: BTreeMap<FinitePlace, CycloElement> = BTreeMap::new();
    let mut full = Vec::new();
    for p in random_subset(primes, rng) {
        let places = places_above(n, Base::Prime(p));
        let whole = rng.gen_bool(0.5);
        if whole {
            full.push(p);
        }
        for w in places {
            if whole || rng.gen_bool(0.5) {
                entries.insert(w, CycloElement::random(n, rng, 4, 6));
            }
        }
    }
    for w in places_above(n, Base::Arch) {
        if rng.gen_bool(0.25) {
            entries.insert(w, CycloElement::random(n, rng, 3, 3));
        }
    }
    let default = element_with_denominators(n, rng, 3, &full, 1);
    ClassicalAdele::new(tower, level, entries, default)
}

/// A conorm from a random level, refined to depth `d` and perturbed at a few places.
pub fn random_conorm_like<R: Rng + ?Sized>(tower: &Tower, d: usize, primes: &[u64], rng: &mut R) -> Result<Adele> {
    let level = rng.gen_range(0..=d);
    random_classical(tower, level, primes, rng)?.conorm_adele(d)
}

/// A basic open set containing `a`: balls above every prime of `a`'s support and of
/// `extra`, centered near `a`, and archimedean disks when `arch` is set.
pub fn random_open_around<R: Rng + ?Sized>(a: &Adele, extra: &[u64], arch: bool, rng: &mut R) -> Result<BasicOpen> {
    let n = a.conductor();
    let mut primes: Vec<u64> = a.support().into_iter().chain(extra.iter().copied()).collect();
    primes.sort_unstable();
    primes.dedup();
    let mut balls = BTreeMap::new();
    for &p in &primes {
        let family = places_above(n, Base::Prime(p))
            .into_iter()
            .map(|y| {
                let k: i64 = rng.gen_range(-1..=3);
                // v(center - a_y) ≥ k + 1 keeps a_y inside B(center, p^{-k})
                let shift = CycloElement::random(n, rng, 2, 1).scale(&super::open::p_power(p, k + 1));
                Ok((y, BallSpec { center: a.value(&y)?.checked_add(&shift)?, radius: Radius::Padic(k) }))
            })
            .collect::<Result<_>>()?;
        balls.insert(Base::Prime(p), family);
    }
    if arch {
        let family = places_above(n, Base::Arch)
            .into_iter()
            .map(|y| {
                let delta = BigRational::new(BigInt::from(rng.gen_range(-4..=4)), BigInt::from(16));
                let rho = BigRational::new(BigInt::from(rng.gen_range(8..=24)), BigInt::from(16));
                let center = a.value(&y)?.checked_add(&CycloElement::from_rational(n, delta))?;
                Ok((y, BallSpec { center, radius: Radius::Arch(rho) }))
            })
            .collect::<Result<_>>()?;
        balls.insert(Base::Arch, family);
    }
    basic_open(a.tower(), a.depth(), balls)
}

/// Picks `count` distinct items.
pub fn choose<R: Rng + ?Sized>(items: &[u64], count: usize, rng: &mut R) -> Vec<u64> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v.truncate(count);
    v.sort_unstable();
    v
}
