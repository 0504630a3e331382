//! Approximation by conorms, Cauchy sequences with their local limits, and the digit map
//! that lies outside every conorm image below its depth.

use super::open::{epsilon_for, BasicOpen, Epsilon, NeighborhoodBaseElement};
use super::{check_fiber, make_adele, Adele, ClassicalAdele, Slice};
use crate::arith::is_prime;
use crate::cyclotomic::{CycloElement, Tower};
use crate::error::{Error, Result};
use crate::local::{context, localize, LocalElement, Membership, Valuation};
use crate::place::{fiber_at, places_above, restrict_place, splitting_profile, Base, FinitePlace, ProfinitePlace};
use crate::transition::{Chart, TieBreak};
use num_bigint::BigInt;
use std::collections::BTreeMap;

/// A conorm approximating an adèle inside an open set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Densified {
    pub level: usize,
    pub witness: ClassicalAdele,
    pub epsilon: Epsilon,
}

/// Finds a classical adèle of some `K_L` whose conorm lies in `U`.
///
/// The approximation runs cylinder by cylinder at the radii of [`epsilon_for`]. An input
/// of this layer is constant on the cylinders of its own depth and its values are exact
/// elements of `E`, so those values are admissible centers; the assembled point is the
/// input itself and `L` is the least level whose conorm image contains it.
pub fn densify(a: &Adele, u: &BasicOpen) -> Result<Densified> {
    let epsilon = epsilon_for(u, a)?;
    let (level, witness) = a.least_conorm_level();
    Ok(Densified { level, witness, epsilon })
}

/// Local-layer values above one prime at every depth-`d` place.
#[derive(Clone, Debug)]
pub struct LocalSlice {
    pub tower: Tower,
    pub depth: usize,
    pub p: u64,
    pub values: BTreeMap<FinitePlace, LocalElement>,
}

/// A conorm whose entry at every place above `p` lies within `p^{-k}` of the target.
pub fn densify_local(target: &LocalSlice, k: i64) -> Result<Densified> {
    let n = target.tower.conductor(target.depth);
    let base = Base::Prime(target.p);
    check_fiber(n, base, &target.values)?;
    let precision = target.values.values().map(LocalElement::absolute_precision).min().unwrap_or(0);
    if k + 1 > precision {
        return Err(Error::Precision(format!("radius p^-{k} needs precision {}, values carry {precision}", k + 1)));
    }
    // each center is a global element agreeing with the target to full precision
    let centers: Slice = target.values.iter().map(|(y, x)| (*y, x.lift_to_global())).collect();
    let a = make_adele(&target.tower, target.depth, BTreeMap::from([(base, centers)]), CycloElement::zero(n))?;
    let (level, witness) = a.least_conorm_level();
    let image = witness.conorm_adele(target.depth)?;
    for (y, x) in &target.values {
        let d = localize(&image.value(y)?, x.context(), y)?.sub(x)?;
        let close = match d.valuation() {
            Valuation::Finite(v) => v > k,
            Valuation::Bottom => d.absolute_precision() > k,
        };
        if !close {
            return Err(Error::NotContained(format!("approximation misses the target at {y}")));
        }
    }
    Ok(Densified { level, witness, epsilon: Epsilon { padic: BTreeMap::from([(target.p, k)]), arch: None } })
}

fn ceil_log(m: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut acc = 1u64;
    while acc < m {
        acc = acc.saturating_mul(p);
        k += 1;
    }
    k
}

/// Digit-block widths: level `i` gets `⌈log_p⌉` of the fiber size from level `i - 1`.
pub fn cantor_widths(tower: &Tower, p: u64, d: usize) -> Result<Vec<u32>> {
    let counts = splitting_profile(Base::Prime(p), &tower.truncate(d)?);
    Ok((0..counts.len())
        .map(|i| ceil_log(if i == 0 { counts[0] } else { counts[i] / counts[i - 1] }, p))
        .collect())
}

/// The digit map: the chain `(c_0, …, c_d)` goes to `Σ p^{K_i} · index(c_i)`, where
/// `index(c_i)` is the position of `c_i` in its fiber and `K_i` sums the widths below `i`.
pub fn cantor_adele(tower: &Tower, p: u64, d: usize) -> Result<Adele> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if d > tower.depth() {
        return Err(Error::InvalidDepth { depth: d, max: tower.depth() });
    }
    let n = tower.conductor(d);
    if n % p == 0 {
        return Err(Error::Ramified { p, n });
    }
    if splitting_profile(Base::Prime(p), tower).iter().all(|&c| c == 1) {
        return Err(Error::NoSplitting { p, depth: tower.depth() });
    }
    let widths = cantor_widths(tower, p, d)?;
    let truncated = tower.truncate(d)?;
    let roots = places_above(tower.conductor(0), Base::Prime(p));
    let mut slice = Slice::new();
    for y in places_above(n, Base::Prime(p)) {
        let chain = ProfinitePlace::from_top(&truncated, &y)?;
        let mut value = BigInt::from(0);
        let mut offset = 0u32;
        for (i, c) in chain.chain().iter().enumerate() {
            let siblings = if i == 0 { roots.clone() } else { fiber_at(&chain.chain()[i - 1], c.level())? };
            let index = siblings.binary_search(c).expect("chain member lies in its fiber");
            value += BigInt::from(p).pow(offset) * BigInt::from(index);
            offset += widths[i];
        }
        slice.insert(y, CycloElement::from_poly(n, vec![value], BigInt::from(1)));
    }
    make_adele(tower, d, BTreeMap::from([(Base::Prime(p), slice)]), CycloElement::zero(n))
}

/// Digit maps of depths `0..=d`, each the truncation of the next.
pub fn cantor_truncations(tower: &Tower, p: u64, d: usize) -> Result<Vec<Adele>> {
    (0..=d).map(|t| cantor_adele(tower, p, t)).collect()
}

/// For every base neighborhood, the least index from which all pairwise differences lie
/// inside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchyReport {
    pub len: usize,
    pub indices: Vec<(NeighborhoodBaseElement, usize)>,
    /// Differences whose archimedean membership could not be decided; they count as
    /// outside.
    pub undecided: usize,
}

impl CauchyReport {
    /// Every membership decided, and the indices never drop along the base family, which
    /// is listed from coarse to fine.
    pub fn cauchy(&self) -> bool {
        self.undecided == 0 && self.indices.windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

pub fn is_cauchy(seq: &[Adele], base: &[NeighborhoodBaseElement]) -> Result<CauchyReport> {
    let first = seq.first().ok_or(Error::EmptySequence)?;
    if seq.iter().any(|a| a.tower() != first.tower()) {
        return Err(Error::TowerMismatch);
    }
    let mut diffs = Vec::new();
    for m in 0..seq.len() {
        for n in m + 1..seq.len() {
            diffs.push((m, seq[n].sub(&seq[m])?));
        }
    }
    let mut undecided = 0;
    let mut indices = Vec::new();
    for b in base {
        let u = b.open(first.tower())?;
        let mut index = 0;
        for (m, d) in &diffs {
            match u.contains(d)? {
                Membership::In => {}
                Membership::Out => index = index.max(m + 1),
                Membership::Undecided => {
                    undecided += 1;
                    index = index.max(m + 1);
                }
            }
        }
        indices.push((b.clone(), index));
    }
    Ok(CauchyReport { len: seq.len(), indices, undecided })
}

/// Entrywise limit of a sequence in the local layer above `p`.
#[derive(Clone, Debug)]
pub struct LocalLimit {
    pub p: u64,
    pub precision: u32,
    pub depth: usize,
    pub values: BTreeMap<FinitePlace, LocalElement>,
    /// Index from which every entry agrees with the limit at the working precision.
    pub stable_from: usize,
    /// Least level on whose cylinders the chart-transported limit is constant.
    pub constant_depth: usize,
    profile: Vec<bool>,
}

impl LocalLimit {
    pub fn constant_at(&self, level: usize) -> bool {
        self.profile.get(level).copied().unwrap_or(true)
    }

    /// `NotLocallyConstant` when the limit varies inside some level-`level` cylinder.
    pub fn require_constant_at(&self, level: usize) -> Result<()> {
        if self.constant_at(level) {
            Ok(())
        } else {
            Err(Error::NotLocallyConstant(level))
        }
    }

    pub fn as_slice(&self, tower: &Tower) -> LocalSlice {
        LocalSlice { tower: tower.clone(), depth: self.depth, p: self.p, values: self.values.clone() }
    }
}

pub fn limit_local(seq: &[Adele], p: u64, precision: u32) -> Result<LocalLimit> {
    let first = seq.first().ok_or(Error::EmptySequence)?;
    let tower = first.tower();
    if seq.iter().any(|a| a.tower() != tower) {
        return Err(Error::TowerMismatch);
    }
    let depth = seq.iter().map(Adele::depth).max().unwrap();
    let n = tower.conductor(depth);
    if n % p == 0 {
        return Err(Error::Ramified { p, n });
    }
    let ctx = context(p, n, precision)?;
    let places = places_above(n, Base::Prime(p));
    let local: Vec<BTreeMap<FinitePlace, LocalElement>> = seq
        .iter()
        .map(|a| places.iter().map(|y| Ok((*y, localize(&a.value(y)?, &ctx, y)?))).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let values = local.last().unwrap().clone();
    let mut stable_from = 0;
    for y in &places {
        for m in (0..local.len()).rev() {
            if !local[m][y].agrees_with(&values[y])? {
                stable_from = stable_from.max(m + 1);
                break;
            }
        }
    }

    let chart = Chart::build(tower, Base::Prime(p), 0, depth, TieBreak::Least)?;
    let transported: BTreeMap<FinitePlace, LocalElement> = values
        .iter()
        .map(|(y, x)| Ok((*y, x.transport(chart.to_reference(y)?.unit()))))
        .collect::<Result<_>>()?;
    let mut profile = Vec::with_capacity(depth + 1);
    for level in 0..=depth {
        let m = tower.conductor(level);
        let mut first_of: BTreeMap<FinitePlace, &LocalElement> = BTreeMap::new();
        let mut constant = true;
        for (y, x) in &transported {
            let w = restrict_place(y, m)?;
            let rep = *first_of.entry(w).or_insert(x);
            if !rep.agrees_with(x)? {
                constant = false;
                break;
            }
        }
        profile.push(constant);
    }
    let constant_depth = profile.iter().position(|&c| c).unwrap_or(depth);
    Ok(LocalLimit { p, precision, depth, values, stable_from, constant_depth, profile })
}
