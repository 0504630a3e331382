use super::generic::{build_table, verify_table, DiagramTable, FiniteTower, TdReport, TieBreak};
use crate::cyclotomic::{unit_group, CycloElement, GaloisElement, Tower};
use crate::error::{Error, Result};
use crate::place::{act_unit, fiber_at, restrict_place, FinitePlace};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A cyclotomic tower viewed as a [`FiniteTower`].
#[derive(Clone, Debug)]
pub struct CycloTower {
    tower: Tower,
}

impl CycloTower {
    pub fn new(tower: Tower) -> Self {
        CycloTower { tower }
    }

    pub fn tower(&self) -> &Tower {
        &self.tower
    }
}

impl FiniteTower for CycloTower {
    type Elem = GaloisElement;
    type Place = FinitePlace;

    fn depth(&self) -> usize {
        self.tower.depth()
    }

    fn elements(&self) -> Vec<GaloisElement> {
        unit_group(self.tower.top_conductor())
    }

    fn identity(&self) -> GaloisElement {
        GaloisElement::identity(self.tower.top_conductor())
    }

    fn compose(&self, g: &GaloisElement, h: &GaloisElement) -> GaloisElement {
        g.compose_unchecked(h)
    }

    fn inverse(&self, g: &GaloisElement) -> GaloisElement {
        g.inverse()
    }

    fn in_kernel(&self, g: &GaloisElement, level: usize) -> bool {
        g.fixes_subfield(self.tower.conductor(level))
    }

    fn act(&self, g: &GaloisElement, x: &FinitePlace) -> FinitePlace {
        act_unit(g.unit(), x)
    }

    fn restrict_place(&self, x: &FinitePlace, level: usize) -> FinitePlace {
        restrict_place(x, self.tower.conductor(level)).expect("tower levels divide the top")
    }

    fn place_level(&self, v: &FinitePlace) -> usize {
        self.tower.level_of(v.level()).expect("place lies on the tower")
    }

    fn top_places_above(&self, v: &FinitePlace) -> Vec<FinitePlace> {
        fiber_at(v, self.tower.top_conductor()).expect("place lies on the tower")
    }
}

/// A v-adic transition diagram at finite depth: Galois elements of Q(zeta_{n_d})
/// indexed by ordered pairs of depth-`d` places above `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionDiagram {
    tower: Tower,
    v: FinitePlace,
    inner: DiagramTable<GaloisElement, FinitePlace>,
}

fn check_base_place(tower: &Tower, v: &FinitePlace, d: usize) -> Result<()> {
    if d > tower.depth() {
        return Err(Error::InvalidDepth { depth: d, max: tower.depth() });
    }
    match tower.level_of(v.level()) {
        Some(b) if b <= d => Ok(()),
        Some(b) => Err(Error::LevelOrder { source_level: b, target: d }),
        None => Err(Error::NonDivisible { divisor: v.level(), dividend: tower.top_conductor() }),
    }
}

/// Builds the depth-`d` diagram above `v` with least-element choices.
pub fn build_transition(tower: &Tower, v: &FinitePlace, d: usize) -> Result<TransitionDiagram> {
    build_transition_with(tower, v, d, TieBreak::Least)
}

pub fn build_transition_with(tower: &Tower, v: &FinitePlace, d: usize, tie: TieBreak) -> Result<TransitionDiagram> {
    check_base_place(tower, v, d)?;
    let truncated = tower.truncate(d)?;
    let inner = build_table(&CycloTower::new(truncated.clone()), v, tie)?;
    Ok(TransitionDiagram { tower: truncated, v: *v, inner })
}

/// Exhaustive verification; see [`verify_table`].
pub fn verify_td(diagram: &TransitionDiagram) -> TdReport {
    verify_table(&CycloTower::new(diagram.tower.clone()), &diagram.v, &diagram.inner)
}

#[derive(Serialize, Deserialize)]
struct DiagramFile {
    version: String,
    tower: String,
    v: FinitePlace,
    d: usize,
    base_point: FinitePlace,
    entries: Vec<Entry>,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    x: FinitePlace,
    y: FinitePlace,
    unit: u64,
}

impl TransitionDiagram {
    pub fn tower(&self) -> &Tower {
        &self.tower
    }

    pub fn v(&self) -> &FinitePlace {
        &self.v
    }

    pub fn depth(&self) -> usize {
        self.tower.depth()
    }

    pub fn base_level(&self) -> usize {
        self.inner.base_level
    }

    pub fn base_point(&self) -> &FinitePlace {
        &self.inner.places[self.inner.base_point]
    }

    pub fn places(&self) -> &[FinitePlace] {
        &self.inner.places
    }

    pub fn table(&self) -> &DiagramTable<GaloisElement, FinitePlace> {
        &self.inner
    }

    pub fn entry(&self, x: &FinitePlace, y: &FinitePlace) -> Result<&GaloisElement> {
        let i = self.inner.index_of(x).ok_or_else(|| Error::KeyMismatch(x.to_string()))?;
        let j = self.inner.index_of(y).ok_or_else(|| Error::KeyMismatch(y.to_string()))?;
        Ok(&self.inner.table[i][j])
    }

    /// A copy with one entry replaced; used to exercise the verifier.
    pub fn with_entry(&self, x: &FinitePlace, y: &FinitePlace, sigma: GaloisElement) -> Result<Self> {
        let i = self.inner.index_of(x).ok_or_else(|| Error::KeyMismatch(x.to_string()))?;
        let j = self.inner.index_of(y).ok_or_else(|| Error::KeyMismatch(y.to_string()))?;
        if sigma.level() != self.tower.top_conductor() {
            return Err(Error::LevelMismatch { left: sigma.level(), right: self.tower.top_conductor() });
        }
        let mut out = self.clone();
        out.inner.table[i][j] = sigma;
        Ok(out)
    }

    /// `y ↦ λ(y, r)(a_y)` for a slice indexed by the places above `v`.
    pub fn transport_slice(&self, slice: &BTreeMap<FinitePlace, CycloElement>) -> Result<BTreeMap<FinitePlace, CycloElement>> {
        self.transport_slice_towards(self.base_point(), slice)
    }

    /// `y ↦ λ(y, r)(a_y)` for an arbitrary reference place `r` of the fiber.
    pub fn transport_slice_towards(
        &self,
        r: &FinitePlace,
        slice: &BTreeMap<FinitePlace, CycloElement>,
    ) -> Result<BTreeMap<FinitePlace, CycloElement>> {
        check_keys(self.places(), slice)?;
        slice
            .iter()
            .map(|(y, a)| Ok((*y, a.apply(self.entry(y, r)?)?)))
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut entries = Vec::new();
        for (i, x) in self.inner.places.iter().enumerate() {
            for (j, y) in self.inner.places.iter().enumerate() {
                entries.push(Entry { x: *x, y: *y, unit: self.inner.table[i][j].unit() });
            }
        }
        let file = DiagramFile {
            version: "td/1".into(),
            tower: self.tower.spec_string(),
            v: self.v,
            d: self.depth(),
            base_point: *self.base_point(),
            entries,
        };
        serde_json::to_string_pretty(&file).expect("diagram serializes")
    }

    /// Parses a "td/1" document. Structural problems are errors; the axioms are left to
    /// [`verify_td`].
    pub fn from_json(s: &str) -> Result<Self> {
        let file: DiagramFile = serde_json::from_str(s)?;
        if file.version != "td/1" {
            return Err(Error::Schema(format!("expected td/1, found {}", file.version)));
        }
        let tower = Tower::parse(&file.tower)?;
        check_base_place(&tower, &file.v, file.d)?;
        let tower = tower.truncate(file.d)?;
        let cyclo = CycloTower::new(tower.clone());
        let places = cyclo.top_places_above(&file.v);
        let base_point = places
            .binary_search(&file.base_point)
            .map_err(|_| Error::KeyMismatch(file.base_point.to_string()))?;
        let n = places.len();
        let mut table: Vec<Vec<Option<GaloisElement>>> = vec![vec![None; n]; n];
        for e in &file.entries {
            let i = places.binary_search(&e.x).map_err(|_| Error::KeyMismatch(e.x.to_string()))?;
            let j = places.binary_search(&e.y).map_err(|_| Error::KeyMismatch(e.y.to_string()))?;
            if table[i][j].is_some() {
                return Err(Error::KeyMismatch(format!("duplicate entry ({}, {})", e.x, e.y)));
            }
            table[i][j] = Some(GaloisElement::new(tower.top_conductor(), e.unit)?);
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, g)| g.ok_or_else(|| Error::KeyMismatch(format!("missing entry ({}, {})", places[i], places[j]))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let base_level = tower.level_of(file.v.level()).unwrap();
        Ok(TransitionDiagram { tower, v: file.v, inner: DiagramTable { base_level, places, base_point, table } })
    }
}

pub(crate) fn check_keys<V>(places: &[FinitePlace], slice: &BTreeMap<FinitePlace, V>) -> Result<()> {
    if slice.len() != places.len() || !places.iter().all(|x| slice.contains_key(x)) {
        let stray = slice.keys().find(|k| places.binary_search(k).is_err());
        let missing = places.iter().find(|x| !slice.contains_key(x));
        let what = match (stray, missing) {
            (Some(k), _) => format!("unexpected place {k}"),
            (_, Some(k)) => format!("missing place {k}"),
            _ => "wrong size".to_string(),
        };
        return Err(Error::KeyMismatch(what));
    }
    Ok(())
}

/// Outcome of comparing diagrams built at consecutive depths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoherenceReport {
    pub depth: usize,
    pub pairs: usize,
    /// Pairs where restricting `λ_{d+1}(x', y')` reproduces `λ_d(x, y)` exactly.
    pub exact: usize,
    /// Pairs where the two differ only by the stabilizer of `x`.
    pub modulo_stabilizer: usize,
}

impl CoherenceReport {
    pub fn coherent(&self) -> bool {
        self.exact == self.pairs
    }
}

/// Compares the depth-`d+1` diagram, restricted to level `d`, with the depth-`d` one,
/// for every `d` from the level of `v` to the tower depth minus one.
pub fn depth_coherence(tower: &Tower, v: &FinitePlace, tie: TieBreak) -> Result<Vec<CoherenceReport>> {
    let b = tower.level_of(v.level()).ok_or(Error::NonDivisible { divisor: v.level(), dividend: tower.top_conductor() })?;
    let mut out = Vec::new();
    for d in b..tower.depth() {
        let low = build_transition_with(tower, v, d, tie)?;
        let high = build_transition_with(tower, v, d + 1, tie)?;
        let nd = tower.conductor(d);
        let mut report = CoherenceReport { depth: d, pairs: 0, exact: 0, modulo_stabilizer: 0 };
        for x in high.places() {
            for y in high.places() {
                report.pairs += 1;
                let (xl, yl) = (restrict_place(x, nd)?, restrict_place(y, nd)?);
                let lifted = high.entry(x, y)?.restrict(nd)?;
                let direct = low.entry(&xl, &yl)?;
                if lifted == *direct {
                    report.exact += 1;
                    report.modulo_stabilizer += 1;
                } else if act_unit(direct.inverse().compose_unchecked(&lifted).unit(), &xl) == xl {
                    report.modulo_stabilizer += 1;
                }
            }
        }
        out.push(report);
    }
    Ok(out)
}
