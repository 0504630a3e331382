//! Cyclotomic fields Q(zeta_n), their Galois groups (Z/nZ)^x and towers of them.
//!
//! Every field in a tower is addressed by its conductor. Galois elements are units
//! modulo the conductor acting by `zeta -> zeta^unit`, and the Krull topology of the
//! infinite Galois group is represented only through the restriction maps between levels.

mod element;
pub mod tower_data;

pub use element::CycloElement;
pub(crate) use element::parse_rational;

use crate::arith::{gcd, inv_mod};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

/// Size caps that keep phi(n)-sized exact arithmetic at desk scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_conductor: u64,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_conductor: 10_000, max_depth: 8 }
    }
}

/// A chain Q = Q(zeta_{n_0}) ⊆ Q(zeta_{n_1}) ⊆ … ⊆ Q(zeta_{n_d}) with `n_i | n_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tower {
    conductors: Vec<u64>,
    base_index: usize,
}

impl Tower {
    pub fn new(conductors: Vec<u64>) -> Result<Self> {
        Self::with_limits(conductors, 0, Limits::default())
    }

    pub fn with_base(conductors: Vec<u64>, base_index: usize) -> Result<Self> {
        Self::with_limits(conductors, base_index, Limits::default())
    }

    pub fn with_limits(conductors: Vec<u64>, base_index: usize, limits: Limits) -> Result<Self> {
        if conductors.is_empty() {
            return Err(Error::InvalidTower("empty conductor list".into()));
        }
        if conductors[0] != 1 {
            return Err(Error::InvalidTower(format!(
                "first conductor must be 1 (base field Q), got {}",
                conductors[0]
            )));
        }
        for w in conductors.windows(2) {
            if w[1] <= w[0] || w[1] % w[0] != 0 {
                return Err(Error::InvalidTower(format!(
                    "{} -> {} is not a strict divisibility step",
                    w[0], w[1]
                )));
            }
        }
        let top = *conductors.last().unwrap();
        if top > limits.max_conductor {
            return Err(Error::InvalidTower(format!(
                "conductor {top} exceeds cap {}",
                limits.max_conductor
            )));
        }
        if conductors.len() - 1 > limits.max_depth {
            return Err(Error::InvalidTower(format!(
                "depth {} exceeds cap {}",
                conductors.len() - 1,
                limits.max_depth
            )));
        }
        if base_index >= conductors.len() {
            return Err(Error::InvalidTower(format!("base index {base_index} out of range")));
        }
        Ok(Tower { conductors, base_index })
    }

    /// Parses the comma separated form `1,11,121`.
    pub fn parse(spec: &str) -> Result<Self> {
        let conductors = spec
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad conductor {s:?} in tower {spec:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if conductors.iter().any(|&n| n == 0) {
            return Err(Error::Parse("conductors must be positive".into()));
        }
        Tower::new(conductors)
    }

    pub fn conductors(&self) -> &[u64] {
        &self.conductors
    }

    pub fn conductor(&self, level: usize) -> u64 {
        self.conductors[level]
    }

    pub fn top_conductor(&self) -> u64 {
        *self.conductors.last().unwrap()
    }

    pub fn depth(&self) -> usize {
        self.conductors.len() - 1
    }

    pub fn base_index(&self) -> usize {
        self.base_index
    }

    pub fn level_of(&self, conductor: u64) -> Option<usize> {
        self.conductors.iter().position(|&n| n == conductor)
    }

    /// The tower cut off after `depth`.
    pub fn truncate(&self, depth: usize) -> Result<Tower> {
        if depth > self.depth() {
            return Err(Error::InvalidDepth { depth, max: self.depth() });
        }
        Ok(Tower {
            conductors: self.conductors[..=depth].to_vec(),
            base_index: self.base_index.min(depth),
        })
    }

    /// Appends a new top conductor.
    pub fn extend(&self, conductor: u64) -> Result<Tower> {
        let mut conductors = self.conductors.clone();
        conductors.push(conductor);
        Tower::with_base(conductors, self.base_index)
    }

    pub fn spec_string(&self) -> String {
        self.conductors.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

/// An element of Gal(Q(zeta_n)/Q), acting by `zeta -> zeta^unit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GaloisElement {
    level: u64,
    unit: u64,
}

impl GaloisElement {
    pub fn new(level: u64, unit: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidTower("conductor 0".into()));
        }
        let unit = if level == 1 { 1 } else { unit % level };
        if gcd(unit, level) != 1 {
            return Err(Error::Parse(format!("{unit} is not a unit modulo {level}")));
        }
        Ok(GaloisElement { level, unit })
    }

    pub fn identity(level: u64) -> Self {
        GaloisElement { level, unit: 1 }
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn unit(&self) -> u64 {
        self.unit
    }

    pub fn is_identity(&self) -> bool {
        self.unit == 1
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GaloisElement) -> Result<GaloisElement> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &GaloisElement) -> GaloisElement {
        let unit = if self.level == 1 {
            1
        } else {
            crate::arith::mul_mod(self.unit, other.unit, self.level)
        };
        GaloisElement { level: self.level, unit }
    }

    pub fn inverse(&self) -> GaloisElement {
        let unit = if self.level == 1 { 1 } else { inv_mod(self.unit, self.level).unwrap() };
        GaloisElement { level: self.level, unit }
    }

    /// Restriction to Q(zeta_n) for `n | level`.
    pub fn restrict(&self, n: u64) -> Result<GaloisElement> {
        if n == 0 || self.level % n != 0 {
            return Err(Error::NonDivisible { divisor: n, dividend: self.level });
        }
        Ok(GaloisElement { level: n, unit: if n == 1 { 1 } else { self.unit % n } })
    }

    /// Whether the restriction to Q(zeta_n) is trivial, i.e. `self` fixes that subfield.
    pub fn fixes_subfield(&self, n: u64) -> bool {
        n == 1 || self.unit % n == 1 % n
    }
}

impl fmt::Display for GaloisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.unit, self.level)
    }
}

/// All of (Z/nZ)^x in ascending order; `n = 1` gives the trivial group `{1}`.
pub fn unit_group(n: u64) -> Vec<GaloisElement> {
    if n == 1 {
        return vec![GaloisElement::identity(1)];
    }
    (1..n)
        .filter(|&u| gcd(u, n) == 1)
        .map(|unit| GaloisElement { level: n, unit })
        .collect()
}

/// Restriction of `sigma` to the subfield of conductor `n`.
pub fn restrict(sigma: &GaloisElement, n: u64) -> Result<GaloisElement> {
    sigma.restrict(n)
}

fn poly_cache() -> &'static RwLock<HashMap<u64, Arc<Vec<i64>>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Coefficients (ascending) of the n-th cyclotomic polynomial.
pub fn cyclotomic_poly(n: u64) -> Arc<Vec<i64>> {
    if let Some(p) = poly_cache().read().unwrap().get(&n) {
        return p.clone();
    }
    let poly = Arc::new(compute_cyclotomic(n));
    poly_cache().write().unwrap().insert(n, poly.clone());
    poly
}

fn compute_cyclotomic(n: u64) -> Vec<i64> {
    // Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}: multiply the numerator factors, then
    // divide out the denominator factors exactly.
    let divs = crate::arith::divisors(n);
    let mut poly: Vec<i128> = vec![1];
    for &d in &divs {
        if crate::arith::mobius(n / d) == 1 {
            let d = d as usize;
            let mut next = vec![0i128; poly.len() + d];
            for (i, &c) in poly.iter().enumerate() {
                next[i + d] += c;
                next[i] -= c;
            }
            poly = next;
        }
    }
    for &d in &divs {
        if crate::arith::mobius(n / d) == -1 {
            // divide by x^d - 1: q_i = q_{i-d} - p_i read from the bottom
            let d = d as usize;
            let len = poly.len() - d;
            let mut q = vec![0i128; len];
            for i in 0..len {
                let prev = if i >= d { q[i - d] } else { 0 };
                q[i] = prev - poly[i];
            }
            poly = q;
        }
    }
    let sign = if *poly.last().unwrap() < 0 { -1 } else { 1 };
    poly.into_iter().map(|c| i64::try_from(c * sign).expect("cyclotomic coefficient overflow")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_group_examples() {
        let g5: Vec<u64> = unit_group(5).iter().map(|g| g.unit()).collect();
        assert_eq!(g5, vec![1, 2, 3, 4]);
        assert_eq!(unit_group(1), vec![GaloisElement::identity(1)]);
        assert_eq!(unit_group(20).len(), 8);
    }

    #[test]
    fn restriction_examples() {
        let s = GaloisElement::new(20, 7).unwrap();
        assert_eq!(restrict(&s, 5).unwrap(), GaloisElement::new(5, 2).unwrap());
        assert_eq!(restrict(&GaloisElement::new(20, 13).unwrap(), 4).unwrap().unit(), 1);
        assert_eq!(restrict(&s, 20).unwrap(), s);
        for n in crate::arith::divisors(20) {
            assert!(restrict(&GaloisElement::identity(20), n).unwrap().is_identity());
        }
        assert_eq!(
            restrict(&s, 3),
            Err(Error::NonDivisible { divisor: 3, dividend: 20 })
        );
    }

    #[test]
    fn restriction_is_a_homomorphism_up_to_200() {
        for m in 1..=200u64 {
            let group = unit_group(m);
            for n in crate::arith::divisors(m) {
                for a in &group {
                    for b in group.iter().step_by(1 + group.len() / 12) {
                        let lhs = a.compose(b).unwrap().restrict(n).unwrap();
                        let rhs = a.restrict(n).unwrap().compose(&b.restrict(n).unwrap()).unwrap();
                        assert_eq!(lhs, rhs, "m={m} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_poly(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_poly(2), vec![1, 1]);
        assert_eq!(*cyclotomic_poly(5), vec![1, 1, 1, 1, 1]);
        assert_eq!(*cyclotomic_poly(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(*cyclotomic_poly(12), vec![1, 0, -1, 0, 1]);
        // Phi_105 is the first with a coefficient of absolute value 2.
        assert!(cyclotomic_poly(105).iter().any(|&c| c == -2));
        for n in 1..150u64 {
            assert_eq!(cyclotomic_poly(n).len() as u64 - 1, crate::arith::phi(n));
        }
    }

    #[test]
    fn tower_validation() {
        assert!(Tower::parse("1,11,121").is_ok());
        assert!(Tower::parse("1,5,20,60").is_ok());
        assert!(matches!(Tower::parse("1,6,9"), Err(Error::InvalidTower(_))));
        assert!(matches!(Tower::parse("2,4"), Err(Error::InvalidTower(_))));
        assert!(matches!(Tower::parse("1,1,5"), Err(Error::InvalidTower(_))));
        assert!(matches!(Tower::parse("1,x"), Err(Error::Parse(_))));
        assert!(matches!(Tower::parse("1,20000"), Err(Error::InvalidTower(_))));
        let t = Tower::parse("1,5,20").unwrap();
        assert_eq!(t.truncate(1).unwrap().conductors(), &[1, 5]);
        assert_eq!(t.level_of(20), Some(2));
    }
}
