//! The transition-diagram recursion and its verifier, written against an abstract
//! finite Galois tower so that non-abelian tables run through the same code.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::fmt;

/// A finite Galois tower truncated at its top level, seen through the top group
/// `G = Gal(K_top/K_0)` acting on the top-level places of one fiber.
pub trait FiniteTower {
    type Elem: Clone + Ord + fmt::Debug + fmt::Display;
    type Place: Clone + Ord + fmt::Debug + fmt::Display;

    /// Index of the top level.
    fn depth(&self) -> usize;
    /// All elements of the top group, ascending.
    fn elements(&self) -> Vec<Self::Elem>;
    fn identity(&self) -> Self::Elem;
    /// `g ∘ h`: apply `h` first.
    fn compose(&self, g: &Self::Elem, h: &Self::Elem) -> Self::Elem;
    fn inverse(&self, g: &Self::Elem) -> Self::Elem;
    /// Whether `g` restricts to the identity on level `level`.
    fn in_kernel(&self, g: &Self::Elem, level: usize) -> bool;
    /// Action on top-level places.
    fn act(&self, g: &Self::Elem, x: &Self::Place) -> Self::Place;
    /// Restriction of a top-level place to `level`.
    fn restrict_place(&self, x: &Self::Place, level: usize) -> Self::Place;
    fn place_level(&self, v: &Self::Place) -> usize;
    /// Top-level places above `v`, ascending.
    fn top_places_above(&self, v: &Self::Place) -> Vec<Self::Place>;
}

/// Rule for the arbitrary choices of the recursion: the base point, the places `r_w`
/// and the Galois elements `σ_x`, `τ_x`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieBreak {
    #[default]
    Least,
    Greatest,
}

impl TieBreak {
    fn pick<T: Clone>(self, mut it: impl DoubleEndedIterator<Item = T>) -> Option<T> {
        match self {
            TieBreak::Least => it.next(),
            TieBreak::Greatest => it.next_back(),
        }
    }
}

/// A transition diagram as indices into the top places of the fiber above `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramTable<E, P> {
    pub base_level: usize,
    pub places: Vec<P>,
    pub base_point: usize,
    /// `table[x][y] = λ(x, y)`.
    pub table: Vec<Vec<E>>,
}

impl<E: Clone, P: Ord> DiagramTable<E, P> {
    pub fn index_of(&self, x: &P) -> Option<usize> {
        self.places.binary_search(x).ok()
    }
}

/// Builds `λ_{top - b}` by the recursion
/// `λ_0(x, y) = σ_y^{-1} σ_x`, `λ_{n+1}(x, y) = τ_y^{-1} λ_n(r_{w_x}, r_{w_y}) τ_x`,
/// where `b` is the level of `v`.
pub fn build_table<T: FiniteTower>(tower: &T, v: &T::Place, tie: TieBreak) -> Result<DiagramTable<T::Elem, T::Place>> {
    let b = tower.place_level(v);
    let top = tower.depth();
    if b > top {
        return Err(Error::InvalidDepth { depth: b, max: top });
    }
    let places = tower.top_places_above(v);
    if places.is_empty() {
        return Err(Error::FiberIncomplete(0));
    }
    let index: BTreeMap<&T::Place, usize> = places.iter().enumerate().map(|(i, x)| (x, i)).collect();
    let elements = tower.elements();
    let kernel = |level: usize| -> Vec<&T::Elem> { elements.iter().filter(|g| tower.in_kernel(g, level)).collect() };
    let carry = |candidates: &[&T::Elem], x: usize, target: usize| -> Result<T::Elem> {
        tie.pick(candidates.iter().filter(|g| index.get(&tower.act(g, &places[x])) == Some(&target)))
            .map(|g| (*g).clone())
            .ok_or_else(|| Error::InvalidTower(format!("no element carries {} to {}", places[x], places[target])))
    };

    let r = tie.pick(0..places.len()).unwrap();
    let base_kernel = kernel(b);
    let sigma: Vec<T::Elem> = (0..places.len()).map(|x| carry(&base_kernel, x, r)).collect::<Result<_>>()?;
    let mut table: Vec<Vec<T::Elem>> = (0..places.len())
        .map(|x| (0..places.len()).map(|y| tower.compose(&tower.inverse(&sigma[y]), &sigma[x])).collect())
        .collect();

    for level in b + 1..=top {
        let mut rep_of: BTreeMap<T::Place, usize> = BTreeMap::new();
        for (x, place) in places.iter().enumerate() {
            let w = tower.restrict_place(place, level);
            let chosen = rep_of.entry(w).or_insert(x);
            if tie == TieBreak::Greatest {
                *chosen = x;
            }
        }
        let rw: Vec<usize> = places.iter().map(|x| rep_of[&tower.restrict_place(x, level)]).collect();
        let level_kernel = kernel(level);
        let tau: Vec<T::Elem> = (0..places.len()).map(|x| carry(&level_kernel, x, rw[x])).collect::<Result<_>>()?;
        table = (0..places.len())
            .map(|x| {
                (0..places.len())
                    .map(|y| {
                        let inner = tower.compose(&table[rw[x]][rw[y]], &tau[x]);
                        tower.compose(&tower.inverse(&tau[y]), &inner)
                    })
                    .collect()
            })
            .collect();
    }
    Ok(DiagramTable { base_level: b, places, base_point: r, table })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TdAxiom {
    /// The table is not indexed by the fiber.
    Keys,
    /// `λ(x, x)` is the identity.
    Identity,
    /// `λ(x, y)(x) = y`.
    Action,
    /// `λ(y, z) λ(x, y) = λ(x, z)`.
    Cocycle,
    /// Places over a common level-`i` place are joined inside `Gal(E/K_i)`.
    Containment,
    /// The table descends to pairs of level-`i` places modulo the level-`i` kernel.
    Quotient,
}

impl fmt::Display for TdAxiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TdAxiom::Keys => "KEYS",
            TdAxiom::Identity => "TD.1",
            TdAxiom::Action => "TD.2",
            TdAxiom::Cocycle => "TD.3",
            TdAxiom::Containment => "CONTAINMENT",
            TdAxiom::Quotient => "QUOTIENT",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TdViolation {
    pub axiom: TdAxiom,
    pub places: Vec<String>,
    pub level: Option<usize>,
}

impl fmt::Display for TdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails on ({})", self.axiom, self.places.join(", "))?;
        if let Some(level) = self.level {
            write!(f, " at level {level}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TdReport {
    pub pairs: usize,
    pub triples: usize,
    pub containment_pairs: usize,
    pub violation: Option<TdViolation>,
}

impl TdReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Exhaustive check of (TD.1)-(TD.3) and level containment at every level from the
/// base level to the top. Inverse pairs `(x, y, x)` are checked before general triples.
pub fn verify_table<T: FiniteTower>(tower: &T, v: &T::Place, d: &DiagramTable<T::Elem, T::Place>) -> TdReport {
    let mut report = TdReport::default();
    let fail = |report: &mut TdReport, axiom, ids: &[usize], level| {
        report.violation = Some(TdViolation { axiom, places: ids.iter().map(|&i| d.places[i].to_string()).collect(), level });
    };
    let expected = tower.top_places_above(v);
    let n = expected.len();
    if d.places != expected || d.table.len() != n || d.table.iter().any(|row| row.len() != n) {
        report.violation = Some(TdViolation { axiom: TdAxiom::Keys, places: Vec::new(), level: None });
        return report;
    }
    let id = tower.identity();
    for x in 0..n {
        for y in 0..n {
            report.pairs += 1;
            if x == y && d.table[x][x] != id {
                fail(&mut report, TdAxiom::Identity, &[x], None);
                return report;
            }
            if tower.act(&d.table[x][y], &d.places[x]) != d.places[y] {
                fail(&mut report, TdAxiom::Action, &[x, y], None);
                return report;
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            report.triples += 1;
            if tower.compose(&d.table[y][x], &d.table[x][y]) != d.table[x][x] {
                fail(&mut report, TdAxiom::Cocycle, &[x, y, x], None);
                return report;
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                report.triples += 1;
                if tower.compose(&d.table[y][z], &d.table[x][y]) != d.table[x][z] {
                    fail(&mut report, TdAxiom::Cocycle, &[x, y, z], None);
                    return report;
                }
            }
        }
    }
    let b = tower.place_level(v);
    for level in b..=tower.depth() {
        let w: Vec<T::Place> = d.places.iter().map(|x| tower.restrict_place(x, level)).collect();
        for x in 0..n {
            for y in 0..n {
                if w[x] == w[y] {
                    report.containment_pairs += 1;
                    if !tower.in_kernel(&d.table[x][y], level) {
                        fail(&mut report, TdAxiom::Containment, &[x, y], Some(level));
                        return report;
                    }
                }
            }
        }
        // λ(x', y') λ(x, y)^{-1} ∈ Gal(E/K_i) whenever x ~ x' and y ~ y' at level i
        let mut seen: BTreeMap<(T::Place, T::Place), usize> = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                let first = *seen.entry((w[x].clone(), w[y].clone())).or_insert(x * n + y);
                let (fx, fy) = (first / n, first % n);
                let ratio = tower.compose(&d.table[x][y], &tower.inverse(&d.table[fx][fy]));
                if !tower.in_kernel(&ratio, level) {
                    fail(&mut report, TdAxiom::Quotient, &[fx, fy, x, y], Some(level));
                    return report;
                }
            }
        }
    }
    report
}
