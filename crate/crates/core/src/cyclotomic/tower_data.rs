//! Finite Galois towers given as explicit tables ("gtower/1"), their exhaustive
//! validation, and a [`FiniteTower`] view for the transition-diagram recursion.
//!
//! `levels[i].mul[a][b]` is the product `a·b` (apply `b` first). `restrictions[i]`
//! maps elements of level `i + 1` to level `i`. Each fiber lists the places of the top
//! field above one base place, with `action[g][x]` the image of place `x` under top
//! element `g`. Places of lower fields are the orbits of the kernel of restriction.

use super::{unit_group, Tower};
use crate::error::{Error, Result};
use crate::place::{act_unit, places_above, Base};
use crate::transition::FiniteTower;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub const GTOWER_VERSION: &str = "gtower/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub name: String,
    pub elements: Vec<String>,
    pub mul: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberTable {
    pub elements: Vec<String>,
    pub action: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisTowerData {
    pub version: String,
    pub levels: Vec<GroupTable>,
    pub restrictions: Vec<Vec<usize>>,
    pub fibers: BTreeMap<String, FiberTable>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerViolation {
    Malformed(String),
    Associativity { level: usize, triple: (usize, usize, usize) },
    NoIdentity { level: usize },
    NoInverse { level: usize, element: usize },
    NotHomomorphism { step: usize, pair: (usize, usize) },
    NotSurjective { step: usize, missing: usize },
    NotAnAction { fiber: String, element: usize, place: usize },
    NotTransitive { fiber: String },
}

impl fmt::Display for TowerViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerViolation::Malformed(s) => write!(f, "MALFORMED: {s}"),
            TowerViolation::Associativity { level, triple } => write!(f, "ASSOCIATIVITY at level {level}: {triple:?}"),
            TowerViolation::NoIdentity { level } => write!(f, "NO_IDENTITY at level {level}"),
            TowerViolation::NoInverse { level, element } => write!(f, "NO_INVERSE at level {level} for {element}"),
            TowerViolation::NotHomomorphism { step, pair } => write!(f, "NOT_HOMOMORPHISM at step {step}: {pair:?}"),
            TowerViolation::NotSurjective { step, missing } => write!(f, "NOT_SURJECTIVE at step {step}: {missing} has no preimage"),
            TowerViolation::NotAnAction { fiber, element, place } => {
                write!(f, "NOT_AN_ACTION on fiber {fiber}: element {element}, place {place}")
            }
            TowerViolation::NotTransitive { fiber } => write!(f, "NOT_TRANSITIVE on fiber {fiber}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationReport {
    Pass,
    Fail(TowerViolation),
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        matches!(self, ValidationReport::Pass)
    }
}

fn identity_of(t: &GroupTable) -> Option<usize> {
    let n = t.elements.len();
    (0..n).find(|&e| (0..n).all(|g| t.mul[e][g] == g && t.mul[g][e] == g))
}

fn check_shape(data: &GaloisTowerData) -> std::result::Result<(), String> {
    if data.version != GTOWER_VERSION {
        return Err(format!("expected version {GTOWER_VERSION}, found {}", data.version));
    }
    if data.levels.is_empty() {
        return Err("no levels".into());
    }
    for (i, t) in data.levels.iter().enumerate() {
        let n = t.elements.len();
        if n == 0 {
            return Err(format!("level {i} has no elements"));
        }
        if t.elements.iter().collect::<BTreeSet<_>>().len() != n {
            return Err(format!("level {i} repeats an element name"));
        }
        if t.mul.len() != n || t.mul.iter().any(|row| row.len() != n || row.iter().any(|&k| k >= n)) {
            return Err(format!("level {i} multiplication table is not {n}x{n} over its elements"));
        }
    }
    if data.restrictions.len() + 1 != data.levels.len() {
        return Err(format!("{} levels need {} restriction maps", data.levels.len(), data.levels.len() - 1));
    }
    for (i, r) in data.restrictions.iter().enumerate() {
        if r.len() != data.levels[i + 1].elements.len() || r.iter().any(|&k| k >= data.levels[i].elements.len()) {
            return Err(format!("restriction {i} does not map level {} into level {i}", i + 1));
        }
    }
    let top = data.levels.last().unwrap().elements.len();
    for (label, fib) in &data.fibers {
        let n = fib.elements.len();
        if n == 0 || fib.action.len() != top || fib.action.iter().any(|row| row.len() != n || row.iter().any(|&k| k >= n)) {
            return Err(format!("fiber {label} action table is not {top}x{n}"));
        }
    }
    Ok(())
}

impl GaloisTowerData {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("tower data serializes")
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Exhaustive check of the group axioms, the restriction maps and the fiber actions.
    pub fn validate(&self) -> ValidationReport {
        match self.first_violation() {
            None => ValidationReport::Pass,
            Some(v) => ValidationReport::Fail(v),
        }
    }

    fn first_violation(&self) -> Option<TowerViolation> {
        if let Err(s) = check_shape(self) {
            return Some(TowerViolation::Malformed(s));
        }
        let mut identities = Vec::new();
        for (level, t) in self.levels.iter().enumerate() {
            let n = t.elements.len();
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if t.mul[t.mul[a][b]][c] != t.mul[a][t.mul[b][c]] {
                            return Some(TowerViolation::Associativity { level, triple: (a, b, c) });
                        }
                    }
                }
            }
            let Some(e) = identity_of(t) else { return Some(TowerViolation::NoIdentity { level }) };
            if let Some(element) = (0..n).find(|&g| !(0..n).any(|h| t.mul[g][h] == e && t.mul[h][g] == e)) {
                return Some(TowerViolation::NoInverse { level, element });
            }
            identities.push(e);
        }
        for (step, r) in self.restrictions.iter().enumerate() {
            let (upper, lower) = (&self.levels[step + 1], &self.levels[step]);
            let n = upper.elements.len();
            for a in 0..n {
                for b in 0..n {
                    if r[upper.mul[a][b]] != lower.mul[r[a]][r[b]] {
                        return Some(TowerViolation::NotHomomorphism { step, pair: (a, b) });
                    }
                }
            }
            let image: BTreeSet<usize> = r.iter().copied().collect();
            if let Some(missing) = (0..lower.elements.len()).find(|k| !image.contains(k)) {
                return Some(TowerViolation::NotSurjective { step, missing });
            }
        }
        let top = self.levels.last().unwrap();
        let e = *identities.last().unwrap();
        for (label, fib) in &self.fibers {
            let n = fib.elements.len();
            if let Some(place) = (0..n).find(|&x| fib.action[e][x] != x) {
                return Some(TowerViolation::NotAnAction { fiber: label.clone(), element: e, place });
            }
            for g in 0..top.elements.len() {
                for h in 0..top.elements.len() {
                    if let Some(place) = (0..n).find(|&x| fib.action[top.mul[g][h]][x] != fib.action[g][fib.action[h][x]]) {
                        return Some(TowerViolation::NotAnAction { fiber: label.clone(), element: top.mul[g][h], place });
                    }
                }
            }
            let orbit: BTreeSet<usize> = fib.action.iter().map(|row| row[0]).collect();
            if orbit.len() != n {
                return Some(TowerViolation::NotTransitive { fiber: label.clone() });
            }
        }
        None
    }
}

/// Exports a cyclotomic tower with one fiber per listed base place, labelled
/// `p:<prime>` or `p:inf`.
pub fn export_cyclotomic(tower: &Tower, bases: &[Base]) -> GaloisTowerData {
    let groups: Vec<Vec<u64>> = tower.conductors().iter().map(|&n| unit_group(n).iter().map(|g| g.unit()).collect()).collect();
    let levels = tower
        .conductors()
        .iter()
        .zip(&groups)
        .map(|(&n, units)| {
            let index: BTreeMap<u64, usize> = units.iter().enumerate().map(|(i, &u)| (u, i)).collect();
            let mul = units
                .iter()
                .map(|&a| units.iter().map(|&b| index[&(if n == 1 { 1 } else { a * b % n })]).collect())
                .collect();
            GroupTable { name: format!("Q(zeta_{n})"), elements: units.iter().map(u64::to_string).collect(), mul }
        })
        .collect();
    let restrictions = (1..groups.len())
        .map(|i| {
            let n = tower.conductor(i - 1);
            groups[i]
                .iter()
                .map(|&u| {
                    let image = if n == 1 { 1 } else { u % n };
                    groups[i - 1].binary_search(&image).unwrap()
                })
                .collect()
        })
        .collect();
    let top = tower.top_conductor();
    let fibers = bases
        .iter()
        .map(|&base| {
            let places = places_above(top, base);
            let action = groups
                .last()
                .unwrap()
                .iter()
                .map(|&u| places.iter().map(|x| places.binary_search(&act_unit(u, x)).unwrap()).collect())
                .collect();
            (format!("p:{base}"), FiberTable { elements: places.iter().map(|x| x.to_string()).collect(), action })
        })
        .collect();
    GaloisTowerData { version: GTOWER_VERSION.into(), levels, restrictions, fibers }
}

/// A place of a table tower: level and least top-place index of its kernel orbit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TablePlace {
    pub level: usize,
    pub rep: usize,
}

impl fmt::Display for TablePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}#{}", self.level, self.rep)
    }
}

/// A validated table tower truncated at `depth`, restricted to one fiber.
#[derive(Clone, Debug)]
pub struct TableTower {
    depth: usize,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
    /// `restrict_to[i][g]`: image in level `i` of the depth-level element `g`.
    restrict_to: Vec<Vec<usize>>,
    identities: Vec<usize>,
    /// `orbit_rep[i][x]`: the level-`i` place under original top place `x`.
    orbit_rep: Vec<Vec<usize>>,
    /// Action of depth-level elements on depth-level places (by representative).
    action: BTreeMap<(usize, usize), usize>,
    labels: Vec<String>,
}

impl TableTower {
    pub fn new(data: &GaloisTowerData, fiber: &str, depth: usize) -> Result<Self> {
        if let ValidationReport::Fail(v) = data.validate() {
            return Err(Error::InvalidTower(v.to_string()));
        }
        if depth > data.depth() {
            return Err(Error::InvalidDepth { depth, max: data.depth() });
        }
        let fib = data.fibers.get(fiber).ok_or_else(|| Error::KeyMismatch(format!("no fiber {fiber}")))?;
        let top = data.depth();
        let identities: Vec<usize> = data.levels.iter().map(|t| identity_of(t).unwrap()).collect();

        // images of top elements at every level
        let mut down: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
        down[top] = (0..data.levels[top].elements.len()).collect();
        for i in (0..top).rev() {
            down[i] = down[i + 1].iter().map(|&g| data.restrictions[i][g]).collect();
        }
        let top_count = data.levels[top].elements.len();
        let places = fib.elements.len();
        let orbit_rep: Vec<Vec<usize>> = (0..=top)
            .map(|i| {
                let kernel: Vec<usize> = (0..top_count).filter(|&g| down[i][g] == identities[i]).collect();
                (0..places).map(|x| kernel.iter().map(|&g| fib.action[g][x]).min().unwrap()).collect()
            })
            .collect();

        let level = &data.levels[depth];
        let n = level.elements.len();
        let lift: Vec<usize> = (0..n).map(|h| (0..top_count).find(|&g| down[depth][g] == h).unwrap()).collect();
        let restrict_to: Vec<Vec<usize>> =
            (0..=depth).map(|i| lift.iter().map(|&g| down[i][g]).collect()).collect();
        let mut action = BTreeMap::new();
        for (h, &g) in lift.iter().enumerate() {
            for x in 0..places {
                let rep = orbit_rep[depth][x];
                action.insert((h, rep), orbit_rep[depth][fib.action[g][rep]]);
            }
        }
        let e = identities[depth];
        let inverse = (0..n).map(|g| (0..n).find(|&h| level.mul[g][h] == e).unwrap()).collect();
        Ok(TableTower {
            depth,
            mul: level.mul.clone(),
            identity: e,
            inverse,
            restrict_to,
            identities: identities[..=depth].to_vec(),
            orbit_rep: orbit_rep[..=depth].to_vec(),
            action,
            labels: fib.elements.clone(),
        })
    }

    pub fn base_place(&self) -> TablePlace {
        TablePlace { level: 0, rep: self.orbit_rep[0][0] }
    }

    pub fn label(&self, place: &TablePlace) -> &str {
        &self.labels[place.rep]
    }
}

impl FiniteTower for TableTower {
    type Elem = usize;
    type Place = TablePlace;

    fn depth(&self) -> usize {
        self.depth
    }

    fn elements(&self) -> Vec<usize> {
        (0..self.mul.len()).collect()
    }

    fn identity(&self) -> usize {
        self.identity
    }

    fn compose(&self, g: &usize, h: &usize) -> usize {
        self.mul[*g][*h]
    }

    fn inverse(&self, g: &usize) -> usize {
        self.inverse[*g]
    }

    fn in_kernel(&self, g: &usize, level: usize) -> bool {
        self.restrict_to[level][*g] == self.identities[level]
    }

    fn act(&self, g: &usize, x: &TablePlace) -> TablePlace {
        TablePlace { level: self.depth, rep: self.action[&(*g, x.rep)] }
    }

    fn restrict_place(&self, x: &TablePlace, level: usize) -> TablePlace {
        TablePlace { level, rep: self.orbit_rep[level][x.rep] }
    }

    fn place_level(&self, v: &TablePlace) -> usize {
        v.level
    }

    fn top_places_above(&self, v: &TablePlace) -> Vec<TablePlace> {
        let reps: BTreeSet<usize> = (0..self.labels.len())
            .filter(|&x| self.orbit_rep[v.level][x] == v.rep)
            .map(|x| self.orbit_rep[self.depth][x])
            .collect();
        reps.into_iter().map(|rep| TablePlace { level: self.depth, rep }).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transition::{build_table, build_transition, verify_table};

    fn s3_tower() -> GaloisTowerData {
        // S3 as permutations of {0,1,2}; level 1 is the sign quotient
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [2, 1, 0], [0, 2, 1], [1, 2, 0], [2, 0, 1]];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mul: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| perms.iter().map(|b| index([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        let sign = vec![0, 1, 1, 1, 0, 0];
        // places: the three points, i.e. cosets of a point stabilizer
        let action = perms.iter().map(|a| a.to_vec()).collect();
        GaloisTowerData {
            version: GTOWER_VERSION.into(),
            levels: vec![
                GroupTable { name: "F".into(), elements: vec!["1".into()], mul: vec![vec![0]] },
                GroupTable { name: "sign".into(), elements: vec!["+".into(), "-".into()], mul: vec![vec![0, 1], vec![1, 0]] },
                GroupTable { name: "S3".into(), elements: perms.iter().map(|p| format!("{p:?}")).collect(), mul },
            ],
            restrictions: vec![vec![0, 0], sign],
            fibers: BTreeMap::from([("pt".to_string(), FiberTable { elements: vec!["a".into(), "b".into(), "c".into()], action })]),
        }
    }

    #[test]
    fn cyclotomic_export_validates() {
        let tower = Tower::parse("1,5,20").unwrap();
        let data = export_cyclotomic(&tower, &[Base::Prime(3), Base::Arch]);
        assert_eq!(data.validate(), ValidationReport::Pass);
        let back = GaloisTowerData::from_json(&data.to_json()).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn constructed_violations() {
        let tower = Tower::parse("1,5,20").unwrap();
        let mut data = export_cyclotomic(&tower, &[Base::Prime(3)]);
        let t = &mut data.levels[1];
        let (a, b) = (1, 2);
        t.mul[a][b] = t.mul[b][a] ^ 1;
        assert!(matches!(data.validate(), ValidationReport::Fail(TowerViolation::Associativity { level: 1, .. })));

        let mut data = export_cyclotomic(&tower, &[Base::Prime(3)]);
        let missing = data.restrictions[1][3];
        for slot in data.restrictions[1].iter_mut() {
            if *slot == missing {
                *slot = 0;
            }
        }
        let report = data.validate();
        assert!(
            matches!(report, ValidationReport::Fail(TowerViolation::NotSurjective { .. } | TowerViolation::NotHomomorphism { .. })),
            "{report:?}"
        );

        // a constant map to the identity is a homomorphism but misses everything else
        let mut data = export_cyclotomic(&tower, &[Base::Prime(3)]);
        data.restrictions[1] = vec![0; data.restrictions[1].len()];
        assert_eq!(data.validate(), ValidationReport::Fail(TowerViolation::NotSurjective { step: 1, missing: 1 }));

        let mut data = s3_tower();
        data.fibers.get_mut("pt").unwrap().action = vec![vec![0, 1, 2]; 6];
        assert!(matches!(data.validate(), ValidationReport::Fail(TowerViolation::NotTransitive { .. })));
        let mut data = s3_tower();
        data.fibers.get_mut("pt").unwrap().action = vec![vec![1, 2, 0]; 6];
        assert!(matches!(data.validate(), ValidationReport::Fail(TowerViolation::NotAnAction { element: 0, .. })));
        let mut data = s3_tower();
        data.levels.pop();
        assert!(matches!(data.validate(), ValidationReport::Fail(TowerViolation::Malformed(_))));
    }

    #[test]
    fn table_tower_reproduces_cyclotomic_diagrams() {
        let tower = Tower::parse("1,5,20").unwrap();
        for base in [Base::Prime(3), Base::Prime(11), Base::Arch] {
            let data = export_cyclotomic(&tower, &[base]);
            let label = format!("p:{base}");
            let tt = TableTower::new(&data, &label, 2).unwrap();
            let generic = build_table(&tt, &tt.base_place(), Default::default()).unwrap();
            assert!(verify_table(&tt, &tt.base_place(), &generic).passed());
            let v = places_above(1, base)[0];
            let cyclo = build_transition(&tower, &v, 2).unwrap();
            let units = unit_group(20);
            for (i, row) in generic.table.iter().enumerate() {
                for (j, g) in row.iter().enumerate() {
                    assert_eq!(units[*g], cyclo.table().table[i][j], "{base} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn truncated_table_tower() {
        let tower = Tower::parse("1,5,20").unwrap();
        let data = export_cyclotomic(&tower, &[Base::Prime(11)]);
        let tt = TableTower::new(&data, "p:11", 1).unwrap();
        assert_eq!(tt.top_places_above(&tt.base_place()).len(), 4);
        let d = build_table(&tt, &tt.base_place(), Default::default()).unwrap();
        assert!(verify_table(&tt, &tt.base_place(), &d).passed());
    }

    #[test]
    fn non_abelian_tower() {
        let data = s3_tower();
        assert!(data.validate().passed());
        let tt = TableTower::new(&data, "pt", 2).unwrap();
        let v = tt.base_place();
        assert_eq!(tt.top_places_above(&v).len(), 3);
        // the sign quotient acts trivially on its single place, so all three points
        // lie over one level-1 place
        let w = tt.restrict_place(&TablePlace { level: 2, rep: 0 }, 1);
        assert_eq!(tt.top_places_above(&w).len(), 3);
        let d = build_table(&tt, &v, Default::default()).unwrap();
        let report = verify_table(&tt, &v, &d);
        assert!(report.passed(), "{:?}", report.violation);
        assert_eq!(report.triples, 9 + 27);
    }
}
