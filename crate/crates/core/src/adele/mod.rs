//! The dense adèle layer over a cyclotomic tower.
//!
//! An [`Adele`] at depth `d` assigns an element of `Q(zeta_{n_d})` to every depth-`d`
//! place: explicit slices over the finitely many bases in its support and one default
//! value everywhere else. The default is integral away from the finite support, so the
//! region where integrality fails is a finite union of cylinders. Deeper places inherit
//! the value of the place below them.
//!
//! A [`ClassicalAdele`] lives on a single field `K_i` of the tower; its conorm copies
//! each entry across the fiber of its place.

mod limits;
mod open;
pub mod sample;

pub use limits::{
    cantor_adele, cantor_truncations, cantor_widths, densify, densify_local, is_cauchy, limit_local, CauchyReport,
    Densified, LocalLimit, LocalSlice,
};
pub use open::{
    basic_open, epsilon_for, find_base_refinement, padic_valuation, padic_valuation_at_least, separating_open,
    BasicOpen, Epsilon, NeighborhoodBaseElement, MAX_ARCH_BITS, UOPEN_VERSION,
};

use crate::cyclotomic::{CycloElement, Tower};
use crate::error::{Error, Result};
use crate::place::{fiber_at, places_above, restrict_place, Base, FinitePlace};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

pub const ADELE_VERSION: &str = "adele/1";
pub const CADELE_VERSION: &str = "cadele/1";

pub type Slice = BTreeMap<FinitePlace, CycloElement>;

#[derive(Clone, Debug)]
pub struct Adele {
    tower: Tower,
    depth: usize,
    slices: BTreeMap<Base, Slice>,
    default: CycloElement,
}

fn tail_check(default: &CycloElement, primes: &BTreeSet<u64>) -> Result<()> {
    match default.first_denominator_prime_outside(primes) {
        Some(q) => Err(Error::TailNotIntegral(q.to_string())),
        None => Ok(()),
    }
}

fn base_code(base: Base) -> u64 {
    base.as_prime().unwrap_or(0)
}

fn check_fiber<V>(n: u64, base: Base, slice: &BTreeMap<FinitePlace, V>) -> Result<()> {
    let expected = places_above(n, base);
    if let Some(stray) = slice.keys().find(|y| expected.binary_search(y).is_err()) {
        return Err(Error::KeyMismatch(format!("{stray} is not a place of Q(zeta_{n}) above {base}")));
    }
    if slice.len() != expected.len() {
        return Err(Error::FiberIncomplete(base_code(base)));
    }
    Ok(())
}

fn check_level(x: &CycloElement, n: u64) -> Result<()> {
    if x.level() != n {
        return Err(Error::LevelMismatch { left: x.level(), right: n });
    }
    Ok(())
}

/// Whether dropping an entry equal to the default keeps the tail integral.
fn prunable(base: Base, default: &CycloElement) -> bool {
    match base {
        Base::Arch => true,
        Base::Prime(p) => default.denominator_valuation(p) == 0,
    }
}

/// Validates and normalizes an adèle at depth `d`.
pub fn make_adele(tower: &Tower, d: usize, slices: BTreeMap<Base, Slice>, default: CycloElement) -> Result<Adele> {
    if d > tower.depth() {
        return Err(Error::InvalidDepth { depth: d, max: tower.depth() });
    }
    let n = tower.conductor(d);
    check_level(&default, n)?;
    for (base, slice) in &slices {
        check_fiber(n, *base, slice)?;
        slice.values().try_for_each(|x| check_level(x, n))?;
    }
    let primes = slices.keys().filter_map(Base::as_prime).collect();
    tail_check(&default, &primes)?;
    Ok(Adele { tower: tower.clone(), depth: d, slices, default }.pruned())
}

impl Adele {
    pub fn zero(tower: &Tower, d: usize) -> Result<Self> {
        Self::constant(tower, d, &CycloElement::zero(tower.conductor(d.min(tower.depth()))))
    }

    pub fn one(tower: &Tower, d: usize) -> Result<Self> {
        Self::constant(tower, d, &CycloElement::one(tower.conductor(d.min(tower.depth()))))
    }

    /// The diagonal image of a global element of `Q(zeta_{n_d})`.
    pub fn constant(tower: &Tower, d: usize, value: &CycloElement) -> Result<Self> {
        if d > tower.depth() {
            return Err(Error::InvalidDepth { depth: d, max: tower.depth() });
        }
        let n = tower.conductor(d);
        let value = value.embed(n)?;
        let slices = value
            .denominator_primes()
            .into_iter()
            .map(|q| {
                let q = u64::try_from(&q).map_err(|_| Error::TailNotIntegral(q.to_string()))?;
                let base = Base::Prime(q);
                Ok((base, places_above(n, base).into_iter().map(|y| (y, value.clone())).collect()))
            })
            .collect::<Result<_>>()?;
        make_adele(tower, d, slices, value)
    }

    fn pruned(mut self) -> Self {
        let default = self.default.clone();
        self.slices.retain(|base, slice| !(prunable(*base, &default) && slice.values().all(|x| *x == default)));
        self
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn conductor(&self) -> u64 {
        self.tower.conductor(self.depth)
    }

    /// Rational primes carrying an explicit slice.
    pub fn support(&self) -> BTreeSet<u64> {
        self.slices.keys().filter_map(Base::as_prime).collect()
    }

    pub fn slices(&self) -> &BTreeMap<Base, Slice> {
        &self.slices
    }

    pub fn default_value(&self) -> &CycloElement {
        &self.default
    }

    /// Value at a place of `Q(zeta_m)` for any tower conductor `m ≥ n_d`.
    pub fn value(&self, y: &FinitePlace) -> Result<CycloElement> {
        let n = self.conductor();
        let base_value = |w: &FinitePlace| match self.slices.get(&w.base()) {
            Some(slice) => slice[w].clone(),
            None => self.default.clone(),
        };
        let w = restrict_place(y, n)?;
        base_value(&w).embed(y.level())
    }

    pub fn is_zero(&self) -> bool {
        self.slices.is_empty() && self.default.is_zero()
    }

    /// The same function on the places of a deeper level.
    pub fn refine(&self, depth: usize) -> Result<Adele> {
        if depth < self.depth {
            return Err(Error::LevelOrder { source_level: self.depth, target: depth });
        }
        if depth > self.tower.depth() {
            return Err(Error::InvalidDepth { depth, max: self.tower.depth() });
        }
        if depth == self.depth {
            return Ok(self.clone());
        }
        let m = self.tower.conductor(depth);
        let slices = self
            .slices
            .iter()
            .map(|(base, slice)| {
                let n = self.conductor();
                let refined = places_above(m, *base)
                    .into_iter()
                    .map(|y| Ok((y, slice[&restrict_place(&y, n)?].embed(m)?)))
                    .collect::<Result<Slice>>()?;
                Ok((*base, refined))
            })
            .collect::<Result<_>>()?;
        Ok(Adele { tower: self.tower.clone(), depth, slices, default: self.default.embed(m)? })
    }

    fn combine(&self, other: &Adele, op: impl Fn(&CycloElement, &CycloElement) -> Result<CycloElement>) -> Result<Adele> {
        if self.tower != other.tower {
            return Err(Error::TowerMismatch);
        }
        let d = self.depth.max(other.depth);
        let (a, b) = (self.refine(d)?, other.refine(d)?);
        let n = a.conductor();
        let bases: BTreeSet<Base> = a.slices.keys().chain(b.slices.keys()).copied().collect();
        let slices = bases
            .into_iter()
            .map(|base| {
                let slice = places_above(n, base)
                    .into_iter()
                    .map(|y| Ok((y, op(&a.value(&y)?, &b.value(&y)?)?)))
                    .collect::<Result<Slice>>()?;
                Ok((base, slice))
            })
            .collect::<Result<_>>()?;
        make_adele(&a.tower, d, slices, op(&a.default, &b.default)?)
    }

    pub fn add(&self, other: &Adele) -> Result<Adele> {
        self.combine(other, |x, y| x.checked_add(y))
    }

    pub fn sub(&self, other: &Adele) -> Result<Adele> {
        self.combine(other, |x, y| x.checked_sub(y))
    }

    pub fn mul(&self, other: &Adele) -> Result<Adele> {
        self.combine(other, |x, y| x.checked_mul(y))
    }

    pub fn neg(&self) -> Adele {
        Adele {
            tower: self.tower.clone(),
            depth: self.depth,
            slices: self.slices.iter().map(|(b, s)| (*b, s.iter().map(|(y, x)| (*y, x.neg())).collect())).collect(),
            default: self.default.neg(),
        }
    }

    /// Whether both describe the same function on places.
    pub fn same_as(&self, other: &Adele) -> bool {
        self.sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// The classical adèle of `K_i` whose conorm is `self`, if there is one.
    pub fn in_conorm_image(&self, i: usize) -> Option<ClassicalAdele> {
        if i > self.tower.depth() {
            return None;
        }
        let a = if i > self.depth { self.refine(i).ok()? } else { self.clone() };
        let n = a.tower.conductor(i);
        let default = a.default.descend(n)?;
        let mut entries = BTreeMap::new();
        for slice in a.slices.values() {
            let mut seen: BTreeMap<FinitePlace, &CycloElement> = BTreeMap::new();
            for (y, x) in slice {
                let w = restrict_place(y, n).ok()?;
                if **seen.entry(w).or_insert(x) != *x {
                    return None;
                }
            }
            for (w, x) in seen {
                entries.insert(w, x.descend(n)?);
            }
        }
        ClassicalAdele::new(&a.tower, i, entries, default).ok()
    }

    /// Least level whose conorm image contains `self`, with the witness.
    pub fn least_conorm_level(&self) -> (usize, ClassicalAdele) {
        (0..=self.depth)
            .find_map(|i| self.in_conorm_image(i).map(|c| (i, c)))
            .expect("an adele is the conorm of its own values at its depth")
    }

    pub fn to_json(&self) -> String {
        let file = AdeleFile {
            version: ADELE_VERSION.into(),
            tower: self.tower.spec_string(),
            depth: self.depth,
            support: self.support().into_iter().collect(),
            slices: self
                .slices
                .values()
                .flat_map(|s| s.iter().map(|(y, x)| Entry { place: *y, value: x.to_coeff_strings() }))
                .collect(),
            default: self.default.to_coeff_strings(),
        };
        serde_json::to_string_pretty(&file).expect("adele serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: AdeleFile = serde_json::from_str(s)?;
        if file.version != ADELE_VERSION {
            return Err(Error::Schema(format!("expected {ADELE_VERSION}, found {}", file.version)));
        }
        let tower = Tower::parse(&file.tower)?;
        if file.depth > tower.depth() {
            return Err(Error::InvalidDepth { depth: file.depth, max: tower.depth() });
        }
        let n = tower.conductor(file.depth);
        let support: BTreeSet<u64> = file.support.iter().copied().collect();
        let mut slices: BTreeMap<Base, Slice> = support.iter().map(|&p| (Base::Prime(p), Slice::new())).collect();
        for e in &file.slices {
            if e.place.level() != n {
                return Err(Error::LevelMismatch { left: e.place.level(), right: n });
            }
            if let Base::Prime(p) = e.place.base() {
                if !support.contains(&p) {
                    return Err(Error::Schema(format!("slice entry {} lies outside the support", e.place)));
                }
            }
            let value = CycloElement::from_coeff_strings(n, &e.value)?;
            if slices.entry(e.place.base()).or_default().insert(e.place, value).is_some() {
                return Err(Error::KeyMismatch(format!("duplicate entry {}", e.place)));
            }
        }
        make_adele(&tower, file.depth, slices, CycloElement::from_coeff_strings(n, &file.default)?)
    }
}

impl PartialEq for Adele {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

#[derive(Serialize, Deserialize)]
struct Entry {
    place: FinitePlace,
    value: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct AdeleFile {
    version: String,
    tower: String,
    depth: usize,
    support: Vec<u64>,
    slices: Vec<Entry>,
    default: Vec<String>,
}

/// An adèle of the single field `K_i`: finitely many explicit entries and an integral
/// default elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalAdele {
    tower: Tower,
    level: usize,
    entries: BTreeMap<FinitePlace, CycloElement>,
    default: CycloElement,
}

impl ClassicalAdele {
    /// Validates the entries and requires every place above a denominator prime of the
    /// default to carry an explicit entry.
    pub fn new(tower: &Tower, level: usize, entries: BTreeMap<FinitePlace, CycloElement>, default: CycloElement) -> Result<Self> {
        if level > tower.depth() {
            return Err(Error::InvalidDepth { depth: level, max: tower.depth() });
        }
        let n = tower.conductor(level);
        check_level(&default, n)?;
        for (w, x) in &entries {
            if w.level() != n {
                return Err(Error::LevelMismatch { left: w.level(), right: n });
            }
            check_level(x, n)?;
        }
        for q in default.denominator_primes() {
            let q64 = u64::try_from(&q).map_err(|_| Error::TailNotIntegral(q.to_string()))?;
            if !places_above(n, Base::Prime(q64)).iter().all(|w| entries.contains_key(w)) {
                return Err(Error::TailNotIntegral(q.to_string()));
            }
        }
        let mut c = ClassicalAdele { tower: tower.clone(), level, entries, default };
        let default = c.default.clone();
        c.entries.retain(|w, x| !(prunable(w.base(), &default) && *x == default));
        Ok(c)
    }

    pub fn zero(tower: &Tower, level: usize) -> Result<Self> {
        Self::new(tower, level, BTreeMap::new(), CycloElement::zero(tower.conductor(level.min(tower.depth()))))
    }

    /// The diagonal image of a global element of `K_level`.
    pub fn principal(tower: &Tower, level: usize, x: &CycloElement) -> Result<Self> {
        if level > tower.depth() {
            return Err(Error::InvalidDepth { depth: level, max: tower.depth() });
        }
        let n = tower.conductor(level);
        let x = x.embed(n)?;
        let mut entries = BTreeMap::new();
        for q in x.denominator_primes() {
            let q = u64::try_from(&q).map_err(|_| Error::TailNotIntegral(q.to_string()))?;
            entries.extend(places_above(n, Base::Prime(q)).into_iter().map(|w| (w, x.clone())));
        }
        Self::new(tower, level, entries, x)
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn conductor(&self) -> u64 {
        self.tower.conductor(self.level)
    }

    pub fn entries(&self) -> &BTreeMap<FinitePlace, CycloElement> {
        &self.entries
    }

    pub fn default_value(&self) -> &CycloElement {
        &self.default
    }

    pub fn value(&self, w: &FinitePlace) -> &CycloElement {
        self.entries.get(w).unwrap_or(&self.default)
    }

    /// `con_{K_j/K_i}`.
    pub fn conorm(&self, j: usize) -> Result<ClassicalAdele> {
        if j < self.level {
            return Err(Error::LevelOrder { source_level: self.level, target: j });
        }
        if j > self.tower.depth() {
            return Err(Error::InvalidDepth { depth: j, max: self.tower.depth() });
        }
        let m = self.tower.conductor(j);
        let mut entries = BTreeMap::new();
        for (w, x) in &self.entries {
            let lifted = x.embed(m)?;
            for u in fiber_at(w, m)? {
                entries.insert(u, lifted.clone());
            }
        }
        ClassicalAdele::new(&self.tower, j, entries, self.default.embed(m)?)
    }

    /// The conorm into the adèle layer at depth `d`.
    pub fn conorm_adele(&self, d: usize) -> Result<Adele> {
        let top = self.conorm(d)?;
        let m = top.conductor();
        let bases: BTreeSet<Base> = top.entries.keys().map(FinitePlace::base).collect();
        let slices = bases
            .into_iter()
            .map(|base| (base, places_above(m, base).into_iter().map(|y| (y, top.value(&y).clone())).collect()))
            .collect();
        make_adele(&self.tower, d, slices, top.default)
    }

    pub fn to_json(&self) -> String {
        let file = ClassicalFile {
            version: CADELE_VERSION.into(),
            tower: self.tower.spec_string(),
            level: self.level,
            entries: self.entries.iter().map(|(w, x)| Entry { place: *w, value: x.to_coeff_strings() }).collect(),
            default: self.default.to_coeff_strings(),
        };
        serde_json::to_string_pretty(&file).expect("classical adele serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: ClassicalFile = serde_json::from_str(s)?;
        if file.version != CADELE_VERSION {
            return Err(Error::Schema(format!("expected {CADELE_VERSION}, found {}", file.version)));
        }
        let tower = Tower::parse(&file.tower)?;
        if file.level > tower.depth() {
            return Err(Error::InvalidDepth { depth: file.level, max: tower.depth() });
        }
        let n = tower.conductor(file.level);
        let mut entries = BTreeMap::new();
        for e in &file.entries {
            if entries.insert(e.place, CycloElement::from_coeff_strings(n, &e.value)?).is_some() {
                return Err(Error::KeyMismatch(format!("duplicate entry {}", e.place)));
            }
        }
        ClassicalAdele::new(&tower, file.level, entries, CycloElement::from_coeff_strings(n, &file.default)?)
    }
}

#[derive(Serialize, Deserialize)]
struct ClassicalFile {
    version: String,
    tower: String,
    level: usize,
    entries: Vec<Entry>,
    default: Vec<String>,
}

#[cfg(test)]
mod tests;
