//! Finite-depth model of the place space: places of Q(zeta_n) as cosets of
//! decomposition groups, coherent chains through a tower, cylinder sets, the Galois
//! action, cover refinement and splitting profiles.
//!
//! A place of Q(zeta_n) above `p` is a coset `u·D_p` in (Z/nZ)^x, named by its least
//! representative. For `p ∤ n`, `D_p = <p>`. For `n = p^a·m` with `p ∤ m`, `D_p` is every
//! unit whose reduction mod `m` lies in `<p mod m>`. Archimedean places are cosets of `{±1}`.
//! The coset of the identity is the distinguished place, and `σ_u` sends the place of
//! `c` to the place of `u·c`.

use crate::arith::{gcd, is_prime, mul_mod, mult_order, phi, valuation_u64};
use crate::cyclotomic::{GaloisElement, Tower};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

/// The place of Q lying under a place: a rational prime or the archimedean place.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Base {
    Prime(u64),
    Arch,
}

impl Base {
    pub fn prime(p: u64) -> Result<Base> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(Base::Prime(p))
    }

    pub fn as_prime(&self) -> Option<u64> {
        match self {
            Base::Prime(p) => Some(*p),
            Base::Arch => None,
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Base::Prime(p) => write!(f, "{p}"),
            Base::Arch => f.write_str("inf"),
        }
    }
}

/// A place of Q(zeta_level) above `base`, named by the least unit of its coset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinitePlace {
    level: u64,
    base: Base,
    rep: u64,
}

/// Membership in the decomposition group of `base` inside (Z/nZ)^x.
fn in_decomposition_group(u: u64, n: u64, base: Base) -> bool {
    match base {
        Base::Arch => u % n == 1 % n || u % n == n - 1,
        Base::Prime(p) => {
            let m = prime_free_part(n, p);
            if m == 1 {
                return true;
            }
            let target = u % m;
            let mut x = 1 % m;
            loop {
                if x == target {
                    return true;
                }
                x = mul_mod(x, p % m, m);
                if x == 1 % m {
                    return false;
                }
            }
        }
    }
}

fn prime_free_part(n: u64, p: u64) -> u64 {
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    m
}

/// The decomposition group of `base` in (Z/nZ)^x, ascending.
pub fn decomposition_group(n: u64, base: Base) -> Vec<u64> {
    if n <= 2 {
        return vec![1];
    }
    (1..n).filter(|&u| gcd(u, n) == 1 && in_decomposition_group(u, n, base)).collect()
}

/// Least representative of every unit's coset `u·D`, and the places sorted by it.
struct CosetTable {
    rep: Vec<u64>,
    places: Vec<FinitePlace>,
}

fn coset_table(n: u64, base: Base) -> Arc<CosetTable> {
    static CACHE: OnceLock<RwLock<HashMap<(u64, Base), Arc<CosetTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().unwrap().get(&(n, base)) {
        return t.clone();
    }
    let group = decomposition_group(n, base);
    let mut rep = vec![0u64; n as usize];
    let mut places = Vec::new();
    for v in 1..n {
        if rep[v as usize] == 0 && gcd(v, n) == 1 {
            for &g in &group {
                rep[mul_mod(v, g, n) as usize] = v;
            }
            places.push(FinitePlace { level: n, base, rep: v });
        }
    }
    let table = Arc::new(CosetTable { rep, places });
    cache.write().unwrap().insert((n, base), table.clone());
    table
}

/// Least representative of the coset of the unit `u`.
fn canonical_rep(u: u64, n: u64, base: Base) -> u64 {
    if n <= 2 {
        return 1;
    }
    coset_table(n, base).rep[(u % n) as usize]
}

impl FinitePlace {
    /// The place of Q(zeta_level) corresponding to the coset of `unit`.
    pub fn new(level: u64, base: Base, unit: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidTower("conductor 0".into()));
        }
        if level > 2 && gcd(unit % level, level) != 1 {
            return Err(Error::Parse(format!("{unit} is not a unit modulo {level}")));
        }
        Ok(FinitePlace { level, base, rep: canonical_rep(unit, level, base) })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn rep(&self) -> u64 {
        self.rep
    }

    pub fn is_arch(&self) -> bool {
        self.base == Base::Arch
    }

    /// Local degree `e·f` of the completion over Q_p (or over R).
    pub fn local_degree(&self) -> u64 {
        if self.level <= 2 {
            return 1;
        }
        decomposition_group(self.level, self.base).len() as u64
    }

    pub fn is_real(&self) -> bool {
        self.is_arch() && self.level <= 2
    }
}

impl fmt::Display for FinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p:{}@n:{}#{}", self.base, self.level, self.rep)
    }
}

impl FromStr for FinitePlace {
    type Err = Error;

    /// Parses `p:<prime or inf>@n:<conductor>#<coset_rep>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad place {s:?}"));
        let rest = s.trim().strip_prefix("p:").ok_or_else(bad)?;
        let (base, rest) = rest.split_once("@n:").ok_or_else(bad)?;
        let (level, rep) = rest.split_once('#').ok_or_else(bad)?;
        let base = if base == "inf" { Base::Arch } else { Base::prime(base.parse().map_err(|_| bad())?)? };
        let level: u64 = level.parse().map_err(|_| bad())?;
        let rep: u64 = rep.parse().map_err(|_| bad())?;
        let place = FinitePlace::new(level, base, rep)?;
        if place.rep != rep {
            return Err(Error::Parse(format!("{rep} is not the canonical representative in {s:?}")));
        }
        Ok(place)
    }
}

impl Serialize for FinitePlace {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FinitePlace {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// All places of Q(zeta_n) above `base`, sorted by representative.
pub fn places_above(n: u64, base: Base) -> Vec<FinitePlace> {
    if n <= 2 {
        return vec![FinitePlace { level: n, base, rep: 1 }];
    }
    coset_table(n, base).places.clone()
}

/// Number of places above `base` without enumerating cosets.
pub fn place_count(n: u64, base: Base) -> u64 {
    if n <= 2 {
        return 1;
    }
    match base {
        Base::Arch => phi(n) / 2,
        Base::Prime(p) => {
            let m = prime_free_part(n, p);
            phi(m) / mult_order(p % m, m).max(1)
        }
    }
}

/// Restriction of `w` to Q(zeta_n), `n | level(w)`.
pub fn restrict_place(w: &FinitePlace, n: u64) -> Result<FinitePlace> {
    if n == 0 || w.level % n != 0 {
        return Err(Error::NonDivisible { divisor: n, dividend: w.level });
    }
    Ok(FinitePlace { level: n, base: w.base, rep: canonical_rep(w.rep % n.max(1), n, w.base) })
}

/// Places of Q(zeta_m) restricting to `v`.
pub fn fiber_at(v: &FinitePlace, m: u64) -> Result<Vec<FinitePlace>> {
    if m % v.level != 0 {
        return Err(Error::NonDivisible { divisor: v.level, dividend: m });
    }
    Ok(places_above(m, v.base)
        .into_iter()
        .filter(|w| restrict_place(w, v.level).map(|r| r == *v).unwrap_or(false))
        .collect())
}

/// Places at tower level `j` above the level-`i` place `v`.
pub fn fiber(tower: &Tower, v: &FinitePlace, j: usize) -> Result<Vec<FinitePlace>> {
    if j > tower.depth() {
        return Err(Error::InvalidDepth { depth: j, max: tower.depth() });
    }
    match tower.level_of(v.level) {
        Some(i) if i <= j => fiber_at(v, tower.conductor(j)),
        _ => Err(Error::NonDivisible { divisor: v.level, dividend: tower.conductor(j) }),
    }
}

/// `σ(y)`: the coset of `σ.unit · rep`.
pub fn act(sigma: &GaloisElement, y: &FinitePlace) -> Result<FinitePlace> {
    if sigma.level() != y.level {
        return Err(Error::LevelMismatch { left: sigma.level(), right: y.level });
    }
    Ok(act_unit(sigma.unit(), y))
}

pub(crate) fn act_unit(unit: u64, y: &FinitePlace) -> FinitePlace {
    if y.level <= 2 {
        return *y;
    }
    FinitePlace { level: y.level, base: y.base, rep: canonical_rep(mul_mod(unit, y.rep, y.level), y.level, y.base) }
}

/// A cylinder `Y(E/K_i, v)`: all chains through the level-`i` place `v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cylinder {
    pub place: FinitePlace,
}

impl Cylinder {
    pub fn new(place: FinitePlace) -> Self {
        Cylinder { place }
    }

    /// Whether a place at a level divisible by this cylinder's level lies in it.
    pub fn contains(&self, w: &FinitePlace) -> bool {
        w.base == self.place.base
            && w.level % self.place.level == 0
            && restrict_place(w, self.place.level).map(|r| r == self.place).unwrap_or(false)
    }

    /// Whether the whole cylinder of `w` is inside this one.
    pub fn contains_cylinder(&self, w: &FinitePlace) -> bool {
        self.contains(w)
    }
}

/// A coherent chain of places through every level of a tower.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProfinitePlace {
    chain: Vec<FinitePlace>,
}

impl ProfinitePlace {
    /// The chain determined by a top-level place.
    pub fn from_top(tower: &Tower, top: &FinitePlace) -> Result<Self> {
        if top.level != tower.top_conductor() {
            return Err(Error::LevelMismatch { left: top.level, right: tower.top_conductor() });
        }
        let chain = tower.conductors().iter().map(|&n| restrict_place(top, n)).collect::<Result<_>>()?;
        Ok(ProfinitePlace { chain })
    }

    pub fn from_chain(tower: &Tower, chain: Vec<FinitePlace>) -> Result<Self> {
        if chain.len() != tower.conductors().len() {
            return Err(Error::InvalidDepth { depth: chain.len().saturating_sub(1), max: tower.depth() });
        }
        for (i, w) in chain.iter().enumerate() {
            if w.level != tower.conductor(i) || w.base != chain[0].base {
                return Err(Error::Parse(format!("chain entry {w} does not sit at level {i}")));
            }
            if i > 0 && restrict_place(w, chain[i - 1].level)? != chain[i - 1] {
                return Err(Error::Parse(format!("chain is incoherent at level {i}")));
            }
        }
        Ok(ProfinitePlace { chain })
    }

    pub fn chain(&self) -> &[FinitePlace] {
        &self.chain
    }

    pub fn top(&self) -> &FinitePlace {
        self.chain.last().unwrap()
    }

    pub fn depth(&self) -> usize {
        self.chain.len() - 1
    }
}

impl fmt::Display for ProfinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.chain.iter().map(|w| w.to_string()).collect();
        f.write_str(&parts.join("/"))
    }
}

impl FromStr for ProfinitePlace {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chain: Vec<FinitePlace> = s.split('/').map(str::parse).collect::<Result<_>>()?;
        let conductors = chain.iter().map(|w| w.level).collect();
        let tower = Tower::new(conductors)?;
        ProfinitePlace::from_chain(&tower, chain)
    }
}

/// All depth-`d` chains above `base`.
pub fn chains(tower: &Tower, base: Base) -> Vec<ProfinitePlace> {
    places_above(tower.top_conductor(), base)
        .iter()
        .map(|top| ProfinitePlace::from_top(tower, top).unwrap())
        .collect()
}

/// The least tower level `L` such that the cylinder of every level-`L` place above `v`
/// sits inside a single member of `cover`.
pub fn refine_cover(tower: &Tower, v: &FinitePlace, cover: &[Cylinder]) -> Result<usize> {
    let start = tower
        .level_of(v.level)
        .ok_or(Error::NonDivisible { divisor: v.level, dividend: tower.top_conductor() })?;
    let mut deepest = start;
    for c in cover {
        let lvl = tower
            .level_of(c.place.level)
            .ok_or(Error::NonDivisible { divisor: c.place.level, dividend: tower.top_conductor() })?;
        deepest = deepest.max(lvl);
    }
    for w in fiber(tower, v, deepest)? {
        if !cover.iter().any(|c| c.contains(&w)) {
            return Err(Error::NotACover(w.to_string()));
        }
    }
    for level in start..=deepest {
        let all_inside = fiber(tower, v, level)?.iter().all(|w| {
            cover.iter().any(|c| c.place.level <= w.level && c.contains_cylinder(w))
        });
        if all_inside {
            return Ok(level);
        }
    }
    Ok(deepest)
}

/// Number of places above `base` at every level of the tower.
pub fn splitting_profile(base: Base, tower: &Tower) -> Vec<u64> {
    tower.conductors().iter().map(|&n| place_count(n, base)).collect()
}

/// Searches conductors `m = k·n_top` (k = 2, 3, …) for the first extension of the tower
/// that strictly increases the number of places above `p`.
pub fn find_splitting_extension(tower: &Tower, p: u64, max_conductor: u64) -> Option<(u64, u64)> {
    let top = tower.top_conductor();
    let current = place_count(top, Base::Prime(p));
    (2..)
        .map(|k| k * top)
        .take_while(|&m| m <= max_conductor)
        .map(|m| (m, place_count(m, Base::Prime(p))))
        .find(|&(_, c)| c > current)
}

/// Ramification index of `p` in Q(zeta_n): `phi(p^a)` for `p^a || n`.
pub fn ramification_index(n: u64, p: u64) -> u64 {
    let a = valuation_u64(n, p);
    if a == 0 {
        1
    } else {
        phi(p.pow(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::unit_group;
    use std::collections::BTreeSet;

    fn p(x: u64) -> Base {
        Base::Prime(x)
    }

    #[test]
    fn places_above_examples() {
        assert_eq!(places_above(5, p(2)).len(), 1);
        assert_eq!(places_above(5, p(11)).len(), 4);
        assert_eq!(places_above(20, p(5)).len(), 2);
        let arch = places_above(5, Base::Arch);
        assert_eq!(arch.len(), 2);
        assert!(arch.iter().all(|w| !w.is_real()));
        assert!(places_above(2, Base::Arch)[0].is_real());
    }

    #[test]
    fn restriction_examples() {
        let above3 = places_above(20, p(3));
        assert_eq!(above3.len(), 2);
        let down: BTreeSet<_> = above3.iter().map(|w| restrict_place(w, 5).unwrap()).collect();
        assert_eq!(down.len(), 1);
        assert_eq!(down.into_iter().next().unwrap(), places_above(5, p(3))[0]);
        for w in &above3 {
            assert_eq!(restrict_place(w, 20).unwrap(), *w);
        }
        let arch_down: BTreeSet<_> =
            places_above(20, Base::Arch).iter().map(|w| restrict_place(w, 5).unwrap()).collect();
        assert_eq!(arch_down, places_above(5, Base::Arch).into_iter().collect());
        assert!(matches!(restrict_place(&above3[0], 3), Err(Error::NonDivisible { .. })));
    }

    #[test]
    fn fiber_examples() {
        let tower = Tower::parse("1,11,121").unwrap();
        let level1 = places_above(11, p(3));
        assert_eq!(level1.len(), 2);
        let mut total = 0;
        for v in &level1 {
            let f = fiber(&tower, v, 2).unwrap();
            assert_eq!(f.len(), 11);
            total += f.len();
            assert_eq!(fiber(&tower, v, 1).unwrap(), vec![*v]);
        }
        assert_eq!(total, 22);
        let t = Tower::parse("1,5,20").unwrap();
        for v in places_above(5, Base::Arch) {
            assert_eq!(fiber(&t, &v, 2).unwrap().len(), 2);
        }
    }

    #[test]
    fn action_examples() {
        let ys = places_above(5, p(11));
        let s = GaloisElement::new(5, 2).unwrap();
        let mut y = ys[0];
        let mut orbit = vec![y];
        for _ in 0..3 {
            y = act(&s, &y).unwrap();
            orbit.push(y);
        }
        assert_eq!(act(&s, &y).unwrap(), ys[0], "4-cycle");
        assert_eq!(orbit.iter().collect::<BTreeSet<_>>().len(), 4);
        assert_eq!(act(&GaloisElement::identity(5), &ys[2]).unwrap(), ys[2]);
        assert!(matches!(act(&GaloisElement::identity(7), &ys[0]), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn local_degrees_sum_to_phi_and_actions_are_transitive() {
        for n in 1..=200u64 {
            let group = unit_group(n);
            for q in (2..=50).filter(|&q| is_prime(q)) {
                let base = p(q);
                let places = places_above(n, base);
                assert_eq!(places.len() as u64, place_count(n, base), "n={n} p={q}");
                let sum: u64 = places.iter().map(|w| w.local_degree()).sum();
                assert_eq!(sum, phi(n), "n={n} p={q}");
                if n % q != 0 && n > 2 {
                    assert_eq!(places[0].local_degree(), mult_order(q % n, n));
                }
                let orbit: BTreeSet<_> = group.iter().map(|g| act(g, &places[0]).unwrap()).collect();
                assert_eq!(orbit.len(), places.len(), "transitivity n={n} p={q}");
            }
        }
    }

    #[test]
    fn ramified_local_degree_is_e_times_f() {
        // 2 in Q(zeta_24): e = 4, f = ord_3(2) = 2, one place
        let w = places_above(24, p(2));
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].local_degree(), ramification_index(24, 2) * mult_order(2, 3));
    }

    #[test]
    fn action_commutes_with_restriction() {
        let t = Tower::parse("1,5,20,60").unwrap();
        for base in [p(2), p(3), p(7), p(11), Base::Arch] {
            for y in places_above(60, base) {
                for s in unit_group(60) {
                    let lhs = restrict_place(&act(&s, &y).unwrap(), 20).unwrap();
                    let rhs = act(&s.restrict(20).unwrap(), &restrict_place(&y, 20).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
        assert_eq!(chains(&t, p(7)).len() as u64, place_count(60, p(7)));
    }

    #[test]
    fn chains_are_coherent() {
        let t = Tower::parse("1,11,121").unwrap();
        for c in chains(&t, p(3)) {
            for w in c.chain().windows(2) {
                assert_eq!(restrict_place(&w[1], w[0].level()).unwrap(), w[0]);
            }
            let parsed: ProfinitePlace = c.to_string().parse().unwrap();
            assert_eq!(parsed, c);
        }
    }

    #[test]
    fn place_strings() {
        let w = FinitePlace::new(20, p(3), 7).unwrap();
        let s = w.to_string();
        assert!(s.starts_with("p:3@n:20#"));
        assert_eq!(s.parse::<FinitePlace>().unwrap(), w);
        assert_eq!("p:inf@n:5#1".parse::<FinitePlace>().unwrap(), places_above(5, Base::Arch)[0]);
        assert!("p:4@n:5#1".parse::<FinitePlace>().is_err());
        assert!("p:3@n:20#9".parse::<FinitePlace>().is_err(), "9 is not the least rep of its coset");
    }

    #[test]
    fn refine_cover_examples() {
        let tower = Tower::parse("1,11,121").unwrap();
        let v0 = places_above(1, p(3))[0];
        assert_eq!(refine_cover(&tower, &v0, &[Cylinder::new(v0)]).unwrap(), 0);
        let level1: Vec<Cylinder> = places_above(11, p(3)).into_iter().map(Cylinder::new).collect();
        assert_eq!(refine_cover(&tower, &v0, &level1).unwrap(), 1);
        // one level-1 cylinder plus the level-2 places of the other
        let mut mixed = vec![level1[0]];
        mixed.extend(fiber(&tower, &level1[1].place, 2).unwrap().into_iter().map(Cylinder::new));
        assert_eq!(refine_cover(&tower, &v0, &mixed).unwrap(), 2);
        // dropping one deep place leaves a hole
        mixed.pop();
        assert!(matches!(refine_cover(&tower, &v0, &mixed), Err(Error::NotACover(_))));
        // the whole-fiber cylinder together with finer pieces still refines at level 0
        let mut redundant = level1.clone();
        redundant.push(Cylinder::new(v0));
        assert_eq!(refine_cover(&tower, &v0, &redundant).unwrap(), 0);
    }

    #[test]
    fn splitting_profile_examples() {
        assert_eq!(splitting_profile(p(3), &Tower::parse("1,11,121").unwrap()), vec![1, 2, 22]);
        assert_eq!(splitting_profile(p(2), &Tower::parse("1,5").unwrap()), vec![1, 1]);
        assert_eq!(splitting_profile(p(7), &Tower::parse("1").unwrap()), vec![1]);
        assert_eq!(splitting_profile(Base::Arch, &Tower::parse("1,5").unwrap()), vec![1, 2]);
        for q in [2u64, 3, 5, 7] {
            let t = Tower::parse("1,5").unwrap();
            let (m, count) = find_splitting_extension(&t, q, 10_000).unwrap();
            assert!(count > place_count(5, p(q)));
            assert_eq!(m % 5, 0);
        }
    }
}
