//! Charts (one transition diagram per base place) and the representation-independence
//! checks for slices and open families.
//!
//! A slice is *ℓ-structured* when it is constant on level-ℓ cylinders and takes values
//! in `K_ℓ`. Transport by any chart preserves and reflects this property at every
//! level: for `x ~ y` at level ℓ over the same base place `w`,
//! `λ(y, r) = λ(x, r) λ(y, x)` with `λ(y, x) ∈ Gal(E/K_ℓ)`, and `K_ℓ/Q` is Galois.
//! The structure profile of a slice is therefore chart-independent, which is what the
//! checks below compare.

use super::diagram::{build_transition_with, check_keys, TransitionDiagram};
use super::generic::TieBreak;
use crate::cyclotomic::{CycloElement, GaloisElement, Tower};
use crate::error::{Error, Result};
use crate::place::{places_above, restrict_place, Base, Cylinder, FinitePlace};
use num_rational::BigRational;
use std::collections::{BTreeMap, BTreeSet};

/// One transition diagram for every place of `K_level` above a base place of Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    tower: Tower,
    base: Base,
    level: usize,
    diagrams: BTreeMap<FinitePlace, TransitionDiagram>,
}

impl Chart {
    pub fn build(tower: &Tower, base: Base, level: usize, depth: usize, tie: TieBreak) -> Result<Self> {
        if level > depth {
            return Err(Error::LevelOrder { source_level: level, target: depth });
        }
        let truncated = tower.truncate(depth)?;
        let diagrams = places_above(truncated.conductor(level), base)
            .into_iter()
            .map(|w| Ok((w, build_transition_with(&truncated, &w, depth, tie)?)))
            .collect::<Result<_>>()?;
        Ok(Chart { tower: truncated, base, level, diagrams })
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn base(&self) -> Base {
        self.base
    }

    pub fn base_level(&self) -> usize {
        self.level
    }

    pub fn diagrams(&self) -> &BTreeMap<FinitePlace, TransitionDiagram> {
        &self.diagrams
    }

    /// Every depth-`d` place above the base place, ascending.
    pub fn places(&self) -> Vec<FinitePlace> {
        places_above(self.tower.top_conductor(), self.base)
    }

    pub fn diagram_for(&self, y: &FinitePlace) -> Result<&TransitionDiagram> {
        let w = restrict_place(y, self.tower.conductor(self.level))?;
        self.diagrams.get(&w).ok_or_else(|| Error::KeyMismatch(y.to_string()))
    }

    /// `λ_w(y, r_w)` for the base place `w` under `y`.
    pub fn to_reference(&self, y: &FinitePlace) -> Result<GaloisElement> {
        let d = self.diagram_for(y)?;
        Ok(*d.entry(y, d.base_point())?)
    }

    pub fn transport_slice(&self, slice: &BTreeMap<FinitePlace, CycloElement>) -> Result<BTreeMap<FinitePlace, CycloElement>> {
        check_keys(&self.places(), slice)?;
        slice.iter().map(|(y, a)| Ok((*y, a.apply(&self.to_reference(y)?)?))).collect()
    }
}

/// Whether `slice` is constant on level-`level` cylinders with values in `K_level`.
pub fn is_structured_at(tower: &Tower, slice: &BTreeMap<FinitePlace, CycloElement>, level: usize) -> bool {
    let n = tower.conductor(level);
    let mut seen: BTreeMap<FinitePlace, &CycloElement> = BTreeMap::new();
    slice.iter().all(|(y, a)| {
        let w = restrict_place(y, n).expect("slice places sit at the top level");
        a.is_fixed_by_kernel(n) && *seen.entry(w).or_insert(a) == a
    })
}

/// [`is_structured_at`] for every level of the tower.
pub fn structure_profile(tower: &Tower, slice: &BTreeMap<FinitePlace, CycloElement>) -> Vec<bool> {
    (0..=tower.depth()).map(|l| is_structured_at(tower, slice, l)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChartIndependenceReport {
    pub profile_a: Vec<bool>,
    pub profile_b: Vec<bool>,
    /// Least structured level of each transport.
    pub least_a: usize,
    pub least_b: usize,
}

impl ChartIndependenceReport {
    pub fn agree(&self) -> bool {
        self.profile_a == self.profile_b
    }
}

fn least(profile: &[bool]) -> usize {
    profile.iter().position(|&b| b).unwrap_or(profile.len())
}

/// Transports a slice through two charts and compares the structure profiles.
pub fn chart_independence_check(
    slice: &BTreeMap<FinitePlace, CycloElement>,
    a: &Chart,
    b: &Chart,
) -> Result<ChartIndependenceReport> {
    if a.tower != b.tower || a.base != b.base {
        return Err(Error::TowerMismatch);
    }
    let ta = a.transport_slice(slice)?;
    let tb = b.transport_slice(slice)?;
    let profile_a = structure_profile(&a.tower, &ta);
    let profile_b = structure_profile(&b.tower, &tb);
    Ok(ChartIndependenceReport { least_a: least(&profile_a), least_b: least(&profile_b), profile_a, profile_b })
}

/// Radius of a ball: `p^{-k}` at finite places, a positive rational at archimedean ones.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Radius {
    Padic(i64),
    Arch(BigRational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallSpec {
    pub center: CycloElement,
    pub radius: Radius,
}

/// A family `y ↦ U_y` of balls over the depth-`d` places above one base place,
/// declared constant on cylinders of `level` with centers in `K_level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UFamily {
    pub level: usize,
    pub balls: BTreeMap<FinitePlace, BallSpec>,
}

impl UFamily {
    fn is_structured(&self, tower: &Tower) -> bool {
        self.is_structured_at(tower, self.level)
    }

    /// Whether the balls are constant on level-`level` cylinders with centers in
    /// `K_level`.
    pub fn is_structured_at(&self, tower: &Tower, level: usize) -> bool {
        let n = tower.conductor(level);
        let mut seen: BTreeMap<FinitePlace, &BallSpec> = BTreeMap::new();
        self.balls.iter().all(|(y, ball)| {
            let w = restrict_place(y, n).expect("family places sit at the top level");
            ball.center.is_fixed_by_kernel(n) && *seen.entry(w).or_insert(ball) == ball
        })
    }
}

/// The transported family grouped by maximal cylinders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JForm {
    pub level: usize,
    pub pieces: Vec<(Cylinder, BallSpec)>,
    /// Whether the transported family is structured at the declared level.
    pub open: bool,
}

/// `J(K, λ, r; U) = ⋃ {y} × λ(y, r)(U_y)`, normalized.
pub fn transport_open(chart: &Chart, family: &UFamily) -> Result<JForm> {
    let tower = &chart.tower;
    if family.level > tower.depth() {
        return Err(Error::InvalidDepth { depth: family.level, max: tower.depth() });
    }
    check_keys(&chart.places(), &family.balls)?;
    if !family.is_structured(tower) {
        return Err(Error::NotLocallyConstant(family.level));
    }
    let moved: BTreeMap<FinitePlace, BallSpec> = family
        .balls
        .iter()
        .map(|(y, ball)| {
            let center = ball.center.apply(&chart.to_reference(y)?)?;
            Ok((*y, BallSpec { center, radius: ball.radius.clone() }))
        })
        .collect::<Result<_>>()?;
    let transported = UFamily { level: family.level, balls: moved };
    let open = transported.is_structured(tower);

    let mut covered: BTreeSet<FinitePlace> = BTreeSet::new();
    let mut pieces = Vec::new();
    for level in 0..=tower.depth() {
        let n = tower.conductor(level);
        for w in places_above(n, chart.base) {
            let members: Vec<&FinitePlace> = transported
                .balls
                .keys()
                .filter(|y| restrict_place(y, n).map(|r| r == w).unwrap_or(false))
                .collect();
            if members.is_empty() || covered.contains(members[0]) {
                continue;
            }
            let first = &transported.balls[members[0]];
            if members.iter().all(|y| transported.balls[*y] == *first) {
                covered.extend(members.iter().copied().copied());
                pieces.push((Cylinder::new(w), first.clone()));
            }
        }
    }
    Ok(JForm { level: family.level, pieces, open })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JIndependenceReport {
    pub open_a: bool,
    pub open_b: bool,
    pub pieces_a: usize,
    pub pieces_b: usize,
}

impl JIndependenceReport {
    pub fn agree(&self) -> bool {
        self.open_a == self.open_b
    }
}

/// Compares the openness verdicts of one family under two charts.
pub fn j_independence_check(family: &UFamily, a: &Chart, b: &Chart) -> Result<JIndependenceReport> {
    if a.tower != b.tower || a.base != b.base {
        return Err(Error::TowerMismatch);
    }
    let ja = transport_open(a, family)?;
    let jb = transport_open(b, family)?;
    Ok(JIndependenceReport { open_a: ja.open, open_b: jb.open, pieces_a: ja.pieces.len(), pieces_b: jb.pieces.len() })
}
