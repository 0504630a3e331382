//! Complex embeddings with rigorous interval bounds. All arithmetic is exact over
//! the rationals; only series truncation and the final outward rounding to dyadic
//! endpoints introduce width.

use crate::cyclotomic::CycloElement;
use crate::error::{Error, Result};
use crate::place::FinitePlace;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn dyadic_floor(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((x * BigRational::from_integer(scale.clone())).floor().to_integer(), scale)
}

fn dyadic_ceil(x: &BigRational, bits: u32) -> BigRational {
    let scale = BigInt::one() << bits;
    BigRational::new((x * BigRational::from_integer(scale.clone())).ceil().to_integer(), scale)
}

impl Interval {
    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn around(center: BigRational, radius: BigRational) -> Self {
        Interval { lo: &center - &radius, hi: center + radius }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -&self.hi, hi: -&self.lo }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn scale(&self, q: &BigRational) -> Interval {
        let (a, b) = (&self.lo * q, &self.hi * q);
        if q.is_negative() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let products = [&self.lo * &other.lo, &self.lo * &other.hi, &self.hi * &other.lo, &self.hi * &other.hi];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    pub fn square(&self) -> Interval {
        let sq = self.mul(self);
        if self.contains(&BigRational::zero()) {
            Interval { lo: BigRational::zero(), hi: sq.hi }
        } else {
            sq
        }
    }

    /// Widens the endpoints to multiples of `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval { lo: dyadic_floor(&self.lo, bits), hi: dyadic_ceil(&self.hi, bits) }
    }

    pub fn midpoint_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        ((&self.lo + &self.hi) / rat(2)).to_f64().unwrap_or(f64::NAN)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn conj(&self) -> ComplexInterval {
        ComplexInterval { re: self.re.clone(), im: self.im.neg() }
    }

    /// Enclosure of `|z|^2`.
    pub fn abs_sq(&self) -> Interval {
        self.re.square().add(&self.im.square())
    }

    pub fn contains(&self, re: &BigRational, im: &BigRational) -> bool {
        self.re.contains(re) && self.im.contains(im)
    }
}

/// Three-valued answer of an interval membership test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Undecided,
}

/// `atan(1/m)` enclosure from the alternating Taylor series.
fn atan_inv(m: u64, bits: u32) -> Interval {
    let m2 = BigInt::from(m) * BigInt::from(m);
    let target = BigRational::new(BigInt::one(), BigInt::one() << (bits + 4));
    let mut power = BigInt::from(m);
    let mut sum = BigRational::zero();
    let mut k = 0u64;
    loop {
        let term = BigRational::new(BigInt::one(), &power * BigInt::from(2 * k + 1));
        if term < target {
            return Interval::around(sum, term);
        }
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power *= &m2;
        k += 1;
    }
}

fn pi_interval(bits: u32) -> Arc<Interval> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<Interval>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(hit) = cache.read().unwrap().get(&bits) {
        return hit.clone();
    }
    // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
    let pi = atan_inv(5, bits + 8).scale(&rat(16)).sub(&atan_inv(239, bits + 8).scale(&rat(4)));
    let pi = Arc::new(pi.round_outward(bits + 4));
    cache.write().unwrap().insert(bits, pi.clone());
    pi
}

/// Enclosures of `cos t` and `sin t` for every `t` in `theta` with `0 ≤ theta < 1.6`.
fn cos_sin_small(theta: &Interval, bits: u32) -> (Interval, Interval) {
    // evaluate at the midpoint; both functions are 1-Lipschitz
    let mid = (&theta.lo + &theta.hi) / rat(2);
    let spread = (&theta.hi - &theta.lo) / rat(2);
    let target = BigRational::new(BigInt::one(), BigInt::one() << (bits + 4));
    let (mut c, mut s) = (BigRational::zero(), BigRational::zero());
    let mut term = BigRational::one();
    let mut j = 0u64;
    // terms t^j / j!; past j = 4 they decrease, so the tail of each alternating series
    // is bounded by its first omitted term
    loop {
        if j > 4 && term.abs() < target {
            break;
        }
        match j % 4 {
            0 => c += &term,
            1 => s += &term,
            2 => c -= &term,
            _ => s -= &term,
        }
        j += 1;
        term = term * &mid / rat(j as i64);
    }
    let err = term.abs() + spread;
    (Interval::around(c, err.clone()), Interval::around(s, err))
}

type TrigKey = (u64, u64, u32);

/// Enclosure of `exp(2πi k/n)`.
pub fn root_of_unity(k: u64, n: u64, bits: u32) -> ComplexInterval {
    static CACHE: OnceLock<RwLock<HashMap<TrigKey, ComplexInterval>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let k = k % n;
    let g = k.gcd(&n);
    let key = (k / g, n / g, bits);
    if let Some(hit) = cache.read().unwrap().get(&key) {
        return hit.clone();
    }
    let (k, n) = (key.0, key.1);
    // quarter turns: k/n = q/4 + s with 0 ≤ s < 1/4
    let q = (4 * k) / n;
    let s = BigRational::new(BigInt::from(4 * k - q * n), BigInt::from(4 * n));
    let (c, sn) = if s.is_zero() {
        (Interval::point(BigRational::one()), Interval::point(BigRational::zero()))
    } else {
        let pi = pi_interval(bits + 8);
        let theta = pi.scale(&(s * rat(2)));
        cos_sin_small(&theta, bits + 8)
    };
    let (re, im) = match q {
        0 => (c, sn),
        1 => (sn.neg(), c),
        2 => (c.neg(), sn.neg()),
        _ => (sn, c.neg()),
    };
    let out = ComplexInterval { re: re.round_outward(bits + 4), im: im.round_outward(bits + 4) };
    cache.write().unwrap().insert(key, out.clone());
    out
}

/// Value of `alpha` under `ζ ↦ exp(2πi a/n)`, enclosed in a box with endpoints on the
/// `2^-bits` grid.
pub fn arch_embed_unit(alpha: &CycloElement, a: u64, bits: u32) -> ComplexInterval {
    let n = alpha.level();
    let mut re = Interval::point(BigRational::zero());
    let mut im = Interval::point(BigRational::zero());
    for (j, c) in alpha.coeffs().iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if j == 0 {
            re = re.add(&Interval::point(c.clone()));
            continue;
        }
        let z = root_of_unity(a * j as u64, n, bits + 8);
        re = re.add(&z.re.scale(c));
        im = im.add(&z.im.scale(c));
    }
    ComplexInterval { re: re.round_outward(bits), im: im.round_outward(bits) }
}

/// Value of `alpha` at an archimedean place, using the place's coset representative.
pub fn arch_embed(alpha: &CycloElement, place: &FinitePlace, bits: u32) -> Result<ComplexInterval> {
    if !place.is_arch() {
        return Err(Error::Parse(format!("{place} is not archimedean")));
    }
    if place.level() != alpha.level() {
        return Err(Error::LevelMismatch { left: alpha.level(), right: place.level() });
    }
    Ok(arch_embed_unit(alpha, place.rep(), bits))
}

/// Decides `|z - c| < rho` at an archimedean place, refining precision up to
/// `max_bits` before answering `Undecided`.
pub fn arch_ball_membership(
    z: &CycloElement,
    center: &CycloElement,
    place: &FinitePlace,
    rho: &BigRational,
    max_bits: u32,
) -> Result<Membership> {
    let diff = z.checked_sub(center)?;
    if diff.is_zero() {
        return Ok(if rho.is_positive() { Membership::In } else { Membership::Out });
    }
    let rho2 = rho * rho;
    let mut bits = 64;
    loop {
        let sq = arch_embed(&diff, place, bits)?.abs_sq();
        if sq.hi < rho2 {
            return Ok(Membership::In);
        }
        if sq.lo >= rho2 {
            return Ok(Membership::Out);
        }
        if bits >= max_bits {
            return Ok(Membership::Undecided);
        }
        bits = (bits * 2).min(max_bits);
    }
}

/// Enclosure of `|z|` squared at an archimedean place.
pub fn arch_abs_sq(z: &CycloElement, place: &FinitePlace, bits: u32) -> Result<Interval> {
    Ok(arch_embed(z, place, bits)?.abs_sq())
}
