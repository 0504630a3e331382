//! Basic open sets: a ball at every place above finitely many bases, `𝒪_y` above every
//! other prime, and no constraint at archimedean places left out.

use super::{check_fiber, check_level, Adele};
use crate::arith::is_prime;
use crate::cyclotomic::{CycloElement, Tower};
use crate::error::{Error, Result};
use crate::local::{arch_abs_sq, arch_ball_membership, context, localize, min_valuation_below, Membership, Valuation};
use crate::place::{places_above, restrict_place, Base, FinitePlace};
use crate::transition::{transport_open, BallSpec, Chart, Radius, TieBreak, UFamily};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const UOPEN_VERSION: &str = "uopen/1";

/// Largest working precision of an archimedean membership test, in bits.
pub const MAX_ARCH_BITS: u32 = 1024;

/// Largest `N` with `p^N < 2^62`.
fn max_precision(p: u64) -> u32 {
    let mut n = 0u32;
    let mut acc: u64 = 1;
    while let Some(next) = acc.checked_mul(p).filter(|&x| x < 1 << 62) {
        acc = next;
        n += 1;
    }
    n
}

fn unramified_prime(y: &FinitePlace) -> Result<u64> {
    let p = y.base().as_prime().ok_or_else(|| Error::Parse(format!("{y} is archimedean")))?;
    if y.level() % p == 0 {
        return Err(Error::Ramified { p, n: y.level() });
    }
    Ok(p)
}

/// Decides `v_y(alpha) ≥ k` exactly at an unramified place.
pub fn padic_valuation_at_least(alpha: &CycloElement, y: &FinitePlace, k: i64) -> Result<bool> {
    let p = unramified_prime(y)?;
    if alpha.is_zero() {
        return Ok(true);
    }
    let den = alpha.denominator_valuation(p) as i64;
    if k <= -den {
        return Ok(true);
    }
    let needed = (k + den).max(1);
    let cap = max_precision(p) as i64;
    let precision = needed.max(8).min(cap);
    let local = localize(alpha, &context(p, alpha.level(), precision as u32)?, y)?;
    match local.valuation() {
        Valuation::Finite(v) => Ok(v >= k),
        Valuation::Bottom if local.absolute_precision() >= k => Ok(true),
        Valuation::Bottom => Err(Error::Precision(format!("v({alpha}) at {y} exceeds the largest precision {cap}"))),
    }
}

/// The exact valuation of a nonzero element at an unramified place.
pub fn padic_valuation(alpha: &CycloElement, y: &FinitePlace) -> Result<Valuation> {
    let p = unramified_prime(y)?;
    if alpha.is_zero() {
        return Ok(Valuation::Bottom);
    }
    let den = alpha.denominator_valuation(p);
    let cap = max_precision(p);
    let mut precision = (den + 8).min(cap);
    loop {
        let local = localize(alpha, &context(p, alpha.level(), precision)?, y)?;
        if let v @ Valuation::Finite(_) = local.valuation() {
            return Ok(v);
        }
        if precision == cap {
            return Err(Error::Precision(format!("v({alpha}) at {y} exceeds the largest precision {cap}")));
        }
        precision = (precision * 2).min(cap);
    }
}

/// Rational `u ≥ sqrt(q)` on the `2^-bits` grid.
fn sqrt_upper(q: &BigRational, bits: u32) -> BigRational {
    if q.is_zero() {
        return BigRational::zero();
    }
    let guess = q.to_f64().map(f64::sqrt).filter(|x| x.is_finite() && *x > 0.0).unwrap_or(1.0);
    let u0 = BigRational::from_float(guess).unwrap_or_else(BigRational::one);
    // one Newton step from any positive start lands above the root
    let u = (&u0 + q / &u0) / BigRational::from_integer(BigInt::from(2));
    let scale = BigInt::one() << bits;
    BigRational::new((u * BigRational::from_integer(scale.clone())).ceil().to_integer(), scale)
}

/// Rational `l ≤ sqrt(q)`, `l ≥ 0`.
fn sqrt_lower(q: &BigRational, bits: u32) -> BigRational {
    if !q.is_positive() {
        return BigRational::zero();
    }
    let u = sqrt_upper(q, bits);
    let l = q / u;
    let scale = BigInt::one() << bits;
    BigRational::new((l * BigRational::from_integer(scale.clone())).floor().to_integer(), scale)
}

/// A basic open set of the adèle layer at depth `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicOpen {
    tower: Tower,
    depth: usize,
    balls: BTreeMap<Base, BTreeMap<FinitePlace, BallSpec>>,
    levels: BTreeMap<Base, usize>,
}

fn radius_fits(base: Base, radius: &Radius) -> Result<()> {
    match (base, radius) {
        (Base::Prime(_), Radius::Padic(_)) => Ok(()),
        (Base::Arch, Radius::Arch(r)) if r.is_positive() => Ok(()),
        _ => Err(Error::Schema(format!("radius {radius:?} does not fit places above {base}"))),
    }
}

/// Validates a ball family and records, for every base, the least cylinder level at which
/// it is structured. Each family is pushed through a chart to confirm that its transported
/// form is open.
pub fn basic_open(tower: &Tower, depth: usize, balls: BTreeMap<Base, BTreeMap<FinitePlace, BallSpec>>) -> Result<BasicOpen> {
    if depth > tower.depth() {
        return Err(Error::InvalidDepth { depth, max: tower.depth() });
    }
    let n = tower.conductor(depth);
    let truncated = tower.truncate(depth)?;
    let mut levels = BTreeMap::new();
    for (base, family) in &balls {
        check_fiber(n, *base, family)?;
        for ball in family.values() {
            check_level(&ball.center, n)?;
            radius_fits(*base, &ball.radius)?;
        }
        let mut u = UFamily { level: depth, balls: family.clone() };
        let level = (0..=depth).find(|&l| u.is_structured_at(&truncated, l)).unwrap_or(depth);
        u.level = level;
        let chart = Chart::build(&truncated, *base, 0, depth, TieBreak::Least)?;
        if !transport_open(&chart, &u)?.open {
            return Err(Error::NotLocallyConstant(level));
        }
        levels.insert(*base, level);
    }
    Ok(BasicOpen { tower: tower.clone(), depth, balls, levels })
}

impl BasicOpen {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn balls(&self) -> &BTreeMap<Base, BTreeMap<FinitePlace, BallSpec>> {
        &self.balls
    }

    /// Least cylinder level of each base's ball family.
    pub fn levels(&self) -> &BTreeMap<Base, usize> {
        &self.levels
    }

    /// Rational primes where the set is cut out by balls.
    pub fn support(&self) -> BTreeSet<u64> {
        self.balls.keys().filter_map(Base::as_prime).collect()
    }

    /// The ball at a place of any tower level at or above the depth.
    pub fn ball(&self, y: &FinitePlace) -> Result<Option<BallSpec>> {
        let Some(family) = self.balls.get(&y.base()) else { return Ok(None) };
        let w = restrict_place(y, self.tower.conductor(self.depth))?;
        let ball = &family[&w];
        Ok(Some(BallSpec { center: ball.center.embed(y.level())?, radius: ball.radius.clone() }))
    }

    pub fn refine(&self, depth: usize) -> Result<BasicOpen> {
        if depth < self.depth {
            return Err(Error::LevelOrder { source_level: self.depth, target: depth });
        }
        if depth > self.tower.depth() {
            return Err(Error::InvalidDepth { depth, max: self.tower.depth() });
        }
        let m = self.tower.conductor(depth);
        let balls = self
            .balls
            .keys()
            .map(|&base| {
                let family = places_above(m, base)
                    .into_iter()
                    .map(|y| Ok((y, self.ball(&y)?.expect("base is in the support"))))
                    .collect::<Result<_>>()?;
                Ok((base, family))
            })
            .collect::<Result<_>>()?;
        let levels = self.levels.clone();
        Ok(BasicOpen { tower: self.tower.clone(), depth, balls, levels })
    }

    pub fn contains(&self, a: &Adele) -> Result<Membership> {
        contains(self, a)
    }

    /// Whether `self ⊆ other`, decided ball by ball.
    pub fn is_subset_of(&self, other: &BasicOpen) -> Result<Membership> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        let d = self.depth.max(other.depth);
        let (a, b) = (self.refine(d)?, other.refine(d)?);
        let n = a.tower.conductor(d);
        let bases: BTreeSet<Base> = a.balls.keys().chain(b.balls.keys()).copied().collect();
        let mut undecided = false;
        for base in bases {
            for y in places_above(n, base) {
                let outer = match b.ball(&y)? {
                    Some(ball) => ball,
                    None if base == Base::Arch => continue,
                    None => unit_ball(n),
                };
                let inner = match a.ball(&y)? {
                    Some(ball) => ball,
                    None if base == Base::Arch => return Ok(Membership::Out),
                    None => unit_ball(n),
                };
                match ball_inside(&inner, &outer, &y)? {
                    Membership::Out => return Ok(Membership::Out),
                    Membership::Undecided => undecided = true,
                    Membership::In => {}
                }
            }
        }
        Ok(if undecided { Membership::Undecided } else { Membership::In })
    }

    pub fn to_json(&self) -> String {
        let file = OpenFile {
            version: UOPEN_VERSION.into(),
            tower: self.tower.spec_string(),
            depth: self.depth,
            balls: self
                .balls
                .values()
                .flat_map(|f| {
                    f.iter().map(|(y, b)| BallEntry {
                        place: *y,
                        center: b.center.to_coeff_strings(),
                        radius: match &b.radius {
                            Radius::Padic(k) => RadiusJson::P(*k),
                            Radius::Arch(r) => RadiusJson::Arch(r.to_string()),
                        },
                    })
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("open set serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: OpenFile = serde_json::from_str(s)?;
        if file.version != UOPEN_VERSION {
            return Err(Error::Schema(format!("expected {UOPEN_VERSION}, found {}", file.version)));
        }
        let tower = Tower::parse(&file.tower)?;
        if file.depth > tower.depth() {
            return Err(Error::InvalidDepth { depth: file.depth, max: tower.depth() });
        }
        let n = tower.conductor(file.depth);
        let mut balls: BTreeMap<Base, BTreeMap<FinitePlace, BallSpec>> = BTreeMap::new();
        for e in file.balls {
            if e.place.level() != n {
                return Err(Error::LevelMismatch { left: e.place.level(), right: n });
            }
            let radius = match e.radius {
                RadiusJson::P(k) => Radius::Padic(k),
                RadiusJson::Arch(r) => Radius::Arch(crate::cyclotomic::parse_rational(&r)?),
            };
            let ball = BallSpec { center: CycloElement::from_coeff_strings(n, &e.center)?, radius };
            if balls.entry(e.place.base()).or_default().insert(e.place, ball).is_some() {
                return Err(Error::KeyMismatch(format!("duplicate ball at {}", e.place)));
            }
        }
        basic_open(&tower, file.depth, balls)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RadiusJson {
    P(i64),
    Arch(String),
}

#[derive(Serialize, Deserialize)]
struct BallEntry {
    place: FinitePlace,
    center: Vec<String>,
    radius: RadiusJson,
}

#[derive(Serialize, Deserialize)]
struct OpenFile {
    version: String,
    tower: String,
    depth: usize,
    balls: Vec<BallEntry>,
}

/// `𝒪_y` as the ball of radius `p` around zero.
fn unit_ball(n: u64) -> BallSpec {
    BallSpec { center: CycloElement::zero(n), radius: Radius::Padic(-1) }
}

fn ball_membership(x: &CycloElement, ball: &BallSpec, y: &FinitePlace) -> Result<Membership> {
    match &ball.radius {
        Radius::Padic(k) => {
            let inside = padic_valuation_at_least(&x.checked_sub(&ball.center)?, y, k + 1)?;
            Ok(if inside { Membership::In } else { Membership::Out })
        }
        Radius::Arch(rho) => arch_ball_membership(x, &ball.center, y, rho, MAX_ARCH_BITS),
    }
}

fn ball_inside(inner: &BallSpec, outer: &BallSpec, y: &FinitePlace) -> Result<Membership> {
    match (&inner.radius, &outer.radius) {
        (Radius::Padic(k1), Radius::Padic(k2)) => {
            if k1 < k2 {
                return Ok(Membership::Out);
            }
            ball_membership(&inner.center, outer, y)
        }
        (Radius::Arch(r1), Radius::Arch(r2)) => {
            // disk(c1, r1) ⊆ disk(c2, r2) iff |c1 - c2| + r1 ≤ r2
            let slack = r2 - r1;
            if slack.is_negative() {
                return Ok(Membership::Out);
            }
            let d = inner.center.checked_sub(&outer.center)?;
            if d.is_zero() {
                return Ok(Membership::In);
            }
            let mut bits = 64;
            loop {
                let sq = arch_abs_sq(&d, y, bits)?;
                let s2 = &slack * &slack;
                if sq.hi <= s2 {
                    return Ok(Membership::In);
                }
                if sq.lo > s2 {
                    return Ok(Membership::Out);
                }
                if bits >= MAX_ARCH_BITS {
                    return Ok(Membership::Undecided);
                }
                bits = (bits * 2).min(MAX_ARCH_BITS);
            }
        }
        _ => Err(Error::Schema(format!("mismatched radii at {y}"))),
    }
}

fn integral_at(x: &CycloElement, y: &FinitePlace) -> Result<bool> {
    let p = y.base().as_prime().expect("finite place");
    if x.denominator_valuation(p) == 0 {
        return Ok(true);
    }
    padic_valuation_at_least(x, y, 0)
}

/// Ball membership at every place above the open set's support and integrality above
/// every other prime. Archimedean boundary cases may come back `Undecided`.
pub fn contains(u: &BasicOpen, a: &Adele) -> Result<Membership> {
    if u.tower != *a.tower() {
        return Err(Error::TowerMismatch);
    }
    let d = u.depth.max(a.depth());
    let (u, a) = (u.refine(d)?, a.refine(d)?);
    let mut undecided = false;
    for family in u.balls.values() {
        for (y, ball) in family {
            match ball_membership(&a.value(y)?, ball, y)? {
                Membership::Out => return Ok(Membership::Out),
                Membership::Undecided => undecided = true,
                Membership::In => {}
            }
        }
    }
    for (base, slice) in a.slices() {
        if *base == Base::Arch || u.balls.contains_key(base) {
            continue;
        }
        for (y, x) in slice {
            if !integral_at(x, y)? {
                return Ok(Membership::Out);
            }
        }
    }
    Ok(if undecided { Membership::Undecided } else { Membership::In })
}

/// Largest admissible radii around `a` inside `U`: `p^{-k}` for every prime of the
/// combined support, and a rational lower bound for the archimedean slack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Epsilon {
    /// `k` with `ε_p = p^{-k}`.
    pub padic: BTreeMap<u64, i64>,
    /// `None` when the open set leaves the archimedean places unconstrained.
    pub arch: Option<BigRational>,
}

pub fn epsilon_for(u: &BasicOpen, a: &Adele) -> Result<Epsilon> {
    match contains(u, a)? {
        Membership::In => {}
        Membership::Out => return Err(Error::NotContained("the adele lies outside the open set".into())),
        Membership::Undecided => return Err(Error::Undecided),
    }
    let d = u.depth.max(a.depth());
    let (u, a) = (u.refine(d)?, a.refine(d)?);
    let mut padic = BTreeMap::new();
    let mut arch = None;
    for (base, family) in &u.balls {
        match base {
            // a ∈ B(c, r) makes B(a, r) = B(c, r) in an ultrametric space
            Base::Prime(p) => {
                let k = family
                    .values()
                    .map(|b| match b.radius {
                        Radius::Padic(k) => k,
                        Radius::Arch(_) => unreachable!("validated radius"),
                    })
                    .max()
                    .expect("nonempty fiber");
                padic.insert(*p, k);
            }
            Base::Arch => {
                let mut least: Option<BigRational> = None;
                for (y, ball) in family {
                    let Radius::Arch(rho) = &ball.radius else { unreachable!("validated radius") };
                    let slack = arch_slack(&a.value(y)?.checked_sub(&ball.center)?, y, rho)?;
                    least = Some(match least {
                        Some(l) if l <= slack => l,
                        _ => slack,
                    });
                }
                arch = least;
            }
        }
    }
    for p in a.support() {
        padic.entry(p).or_insert(-1);
    }
    Ok(Epsilon { padic, arch })
}

/// A positive rational `s ≤ rho - |d|_y`.
fn arch_slack(d: &CycloElement, y: &FinitePlace, rho: &BigRational) -> Result<BigRational> {
    if d.is_zero() {
        return Ok(rho.clone());
    }
    let mut bits = 64;
    loop {
        let upper = sqrt_upper(&arch_abs_sq(d, y, bits)?.hi, bits);
        let slack = rho - upper;
        if slack.is_positive() {
            return Ok(slack);
        }
        if bits >= MAX_ARCH_BITS {
            return Err(Error::Undecided);
        }
        bits = (bits * 2).min(MAX_ARCH_BITS);
    }
}

/// `φ(S, n)`: balls of radius `1/n` around zero above `S` and the archimedean place,
/// `𝒪_y` elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NeighborhoodBaseElement {
    pub primes: BTreeSet<u64>,
    pub n: u64,
}

impl NeighborhoodBaseElement {
    pub fn new(primes: BTreeSet<u64>, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parse("n must be positive".into()));
        }
        if let Some(&q) = primes.iter().find(|&&q| !is_prime(q)) {
            return Err(Error::NotPrime(q));
        }
        Ok(NeighborhoodBaseElement { primes, n })
    }

    pub fn open(&self, tower: &Tower) -> Result<BasicOpen> {
        let n0 = tower.conductor(0);
        let rho = BigRational::new(BigInt::one(), BigInt::from(self.n));
        let mut balls = BTreeMap::new();
        for &p in &self.primes {
            let k = min_valuation_below(p, &rho)? - 1;
            let family =
                places_above(n0, Base::Prime(p)).into_iter().map(|y| (y, BallSpec { center: CycloElement::zero(n0), radius: Radius::Padic(k) }));
            balls.insert(Base::Prime(p), family.collect());
        }
        let family = places_above(n0, Base::Arch)
            .into_iter()
            .map(|y| (y, BallSpec { center: CycloElement::zero(n0), radius: Radius::Arch(rho.clone()) }));
        balls.insert(Base::Arch, family.collect());
        basic_open(tower, 0, balls)
    }
}

/// `(S', n')` with `φ(S', n') ⊆ U`, for an open set containing zero.
pub fn find_base_refinement(u: &BasicOpen) -> Result<NeighborhoodBaseElement> {
    let zero = Adele::zero(&u.tower, 0)?;
    let eps = epsilon_for(u, &zero)?;
    // B(0, 1/n) ⊆ B(0, p^{-k}) iff n ≥ p^k
    let mut n = BigInt::one();
    for (&p, &k) in &eps.padic {
        if k > 0 {
            n = n.max(num_traits::pow(BigInt::from(p), k as usize));
        }
    }
    if let Some(e) = &eps.arch {
        n = n.max(e.recip().ceil().to_integer());
    }
    let n = n.to_u64().ok_or_else(|| Error::Precision(format!("base index {n} does not fit in 64 bits")))?;
    NeighborhoodBaseElement::new(eps.padic.keys().copied().collect(), n)
}

/// A neighborhood of a nonzero `a` that misses zero: balls `B(a_y, |a_x|_x)` above the
/// support, one extra prime if needed, and the archimedean place.
pub fn separating_open(a: &Adele) -> Result<BasicOpen> {
    if a.is_zero() {
        return Err(Error::NotContained("zero lies in every neighborhood of itself".into()));
    }
    let n = a.conductor();
    let tower = a.tower();
    let mut primes = a.support();
    let mut radius: Option<BigRational> = None;
    'search: for (base, slice) in a.slices() {
        let Base::Prime(p) = base else { continue };
        if n % p == 0 {
            continue;
        }
        for (y, x) in slice {
            if let Valuation::Finite(v) = padic_valuation(x, y)? {
                radius = Some(p_power(*p, -v));
                break 'search;
            }
        }
    }
    if radius.is_none() && !a.default_value().is_zero() {
        let q = (2..).find(|&q| is_prime(q) && n % q != 0 && !primes.contains(&q)).unwrap();
        let y = places_above(n, Base::Prime(q))[0];
        if let Valuation::Finite(v) = padic_valuation(a.default_value(), &y)? {
            radius = Some(p_power(q, -v));
            primes.insert(q);
        }
    }
    if radius.is_none() {
        if let Some(slice) = a.slices().get(&Base::Arch) {
            if let Some((y, x)) = slice.iter().find(|(_, x)| !x.is_zero()) {
                let lower = sqrt_lower(&arch_abs_sq(x, y, 128)?.lo, 128);
                if lower.is_positive() {
                    radius = Some(lower);
                }
            }
        }
    }
    let Some(rho) = radius else {
        let p = a.support().into_iter().next().unwrap_or(0);
        return Err(Error::Ramified { p, n });
    };
    let mut balls = BTreeMap::new();
    for &p in &primes {
        let k = min_valuation_below(p, &rho)? - 1;
        let family = places_above(n, Base::Prime(p))
            .into_iter()
            .map(|y| Ok((y, BallSpec { center: a.value(&y)?, radius: Radius::Padic(k) })))
            .collect::<Result<_>>()?;
        balls.insert(Base::Prime(p), family);
    }
    let family = places_above(n, Base::Arch)
        .into_iter()
        .map(|y| Ok((y, BallSpec { center: a.value(&y)?, radius: Radius::Arch(rho.clone()) })))
        .collect::<Result<_>>()?;
    balls.insert(Base::Arch, family);
    basic_open(tower, a.depth(), balls)
}

/// `p^e` as an exact rational.
pub(crate) fn p_power(p: u64, e: i64) -> BigRational {
    let pe = num_traits::pow(BigInt::from(p), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(pe)
    } else {
        BigRational::new(BigInt::one(), pe)
    }
}
