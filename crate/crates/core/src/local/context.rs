use super::poly::{self, Poly};
use crate::arith::{inv_mod, is_prime, mult_order, phi};
use crate::cyclotomic::cyclotomic_poly;
use crate::error::{Error, Result};
use crate::place::{places_above, Base, FinitePlace};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, OnceLock, RwLock};

pub const CACHE_ENV: &str = "ADELION_CACHE";

/// The completions of Q(zeta_n) at the places above an unramified prime `p`,
/// truncated modulo `p^N`.
///
/// Factor `i` belongs to the `i`-th place of [`places_above`]. The factor of the identity
/// coset, `h_0`, is the one whose reduction mod `p` is lexicographically least. The place
/// `σ_a(y_0)` gets the factor `h` with `h(x^{a^{-1}}) ≡ 0 mod (h_0, p)`, which makes
/// `x ↦ x^u` carry the factor of `y` onto the factor of `σ_u(y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalContext {
    p: u64,
    n: u64,
    precision: u32,
    modulus: u64,
    residue_degree: usize,
    factors: Vec<Poly>,
    reps: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct ContextFile {
    version: String,
    p: u64,
    n: u64,
    precision: u32,
    factors: Vec<Vec<u64>>,
    reps: Vec<u64>,
}

fn modulus_for(p: u64, precision: u32) -> Result<u64> {
    if precision < 1 {
        return Err(Error::Precision("precision must be at least 1".into()));
    }
    p.checked_pow(precision)
        .filter(|&m| m < 1 << 62)
        .ok_or_else(|| Error::Precision(format!("{p}^{precision} does not fit in 62 bits")))
}

impl LocalContext {
    pub fn build(p: u64, n: u64, precision: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n % p == 0 {
            return Err(Error::Ramified { p, n });
        }
        let modulus = modulus_for(p, precision)?;
        let phi_n: Poly = cyclotomic_poly(n)
            .iter()
            .map(|&c| c.rem_euclid(modulus as i64) as u64)
            .collect();
        let phi_p = poly::reduce(&phi_n, p);

        let ddf = poly::distinct_degree(&phi_p, p);
        let f = mult_order(p % n.max(1), n) as usize;
        if ddf.len() != 1 || ddf[0].0 != f {
            return Err(Error::Precision(format!("unexpected factor degrees of Phi_{n} mod {p}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(p ^ (n << 20));
        let mut low = poly::equal_degree(&ddf[0].1, f, p, &mut rng);
        low.sort();
        if low.len() as u64 != phi(n) / f as u64 {
            return Err(Error::Precision(format!("Phi_{n} mod {p} split into {} factors", low.len())));
        }

        // Match factors mod p to cosets before lifting; lifting preserves the bijection.
        let places = places_above(n, Base::Prime(p));
        let h0 = low[0].clone();
        let mut ordered: Vec<Option<Poly>> = vec![None; places.len()];
        for (slot, place) in ordered.iter_mut().zip(&places) {
            let a_inv = inv_mod(place.rep(), n.max(1)).unwrap_or(1).max(1);
            let hit = low
                .iter()
                .find(|h| poly::compose_power(h, a_inv, &h0, p).is_empty())
                .ok_or_else(|| Error::Precision(format!("no factor vanishes at coset {}", place.rep())))?;
            *slot = Some(hit.clone());
        }
        let ordered: Vec<Poly> = ordered.into_iter().map(Option::unwrap).collect();
        let distinct: std::collections::BTreeSet<&Poly> = ordered.iter().collect();
        if distinct.len() != ordered.len() {
            return Err(Error::Precision("factor-to-coset matching is not a bijection".into()));
        }

        let factors = lift_all(&phi_n, &ordered, p, precision, modulus);
        let ctx = LocalContext {
            p,
            n,
            precision,
            modulus,
            residue_degree: f,
            factors,
            reps: places.iter().map(FinitePlace::rep).collect(),
        };
        debug_assert!(ctx.product_matches());
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `p^N`.
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn residue_degree(&self) -> usize {
        self.residue_degree
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[Vec<u64>] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> &[u64] {
        &self.factors[i]
    }

    pub fn place(&self, i: usize) -> FinitePlace {
        FinitePlace::new(self.n, Base::Prime(self.p), self.reps[i]).unwrap()
    }

    pub fn places(&self) -> Vec<FinitePlace> {
        (0..self.factors.len()).map(|i| self.place(i)).collect()
    }

    pub fn factor_index(&self, place: &FinitePlace) -> Result<usize> {
        if place.base() != Base::Prime(self.p) || place.level() != self.n {
            return Err(Error::ContextMismatch);
        }
        self.reps.binary_search(&place.rep()).map_err(|_| Error::ContextMismatch)
    }

    /// Bit-exact check that the lifted factors multiply to `Phi_n` modulo `p^N`.
    pub fn product_matches(&self) -> bool {
        let target: Poly = cyclotomic_poly(self.n)
            .iter()
            .map(|&c| c.rem_euclid(self.modulus as i64) as u64)
            .collect();
        let product = self.factors.iter().fold(vec![1u64], |acc, h| poly::mul(&acc, h, self.modulus));
        poly::trim(product) == poly::trim(target)
    }

    pub fn to_json(&self) -> String {
        let file = ContextFile {
            version: "lctx/1".into(),
            p: self.p,
            n: self.n,
            precision: self.precision,
            factors: self.factors.clone(),
            reps: self.reps.clone(),
        };
        serde_json::to_string(&file).expect("context serializes")
    }

    /// Reads a cached context, re-checking the factor product and residue degree.
    pub fn from_json(s: &str) -> Result<Self> {
        let file: ContextFile = serde_json::from_str(s)?;
        if file.version != "lctx/1" {
            return Err(Error::Schema(format!("expected lctx/1, found {}", file.version)));
        }
        if file.n % file.p == 0 {
            return Err(Error::Ramified { p: file.p, n: file.n });
        }
        let modulus = modulus_for(file.p, file.precision)?;
        let f = mult_order(file.p % file.n.max(1), file.n) as usize;
        let expected: Vec<u64> = places_above(file.n, Base::Prime(file.p)).iter().map(FinitePlace::rep).collect();
        if file.reps != expected || file.factors.len() != expected.len() {
            return Err(Error::Schema("cached places do not match the cosets".into()));
        }
        if file.factors.iter().any(|h| h.len() != f + 1 || h[f] != 1 || h.iter().any(|&c| c >= modulus)) {
            return Err(Error::Schema("cached factors are not monic of the residue degree".into()));
        }
        let ctx = LocalContext {
            p: file.p,
            n: file.n,
            precision: file.precision,
            modulus,
            residue_degree: f,
            factors: file.factors,
            reps: file.reps,
        };
        if !ctx.product_matches() {
            return Err(Error::Schema("cached factors do not multiply to the cyclotomic polynomial".into()));
        }
        Ok(ctx)
    }
}

fn lift_all(phi_n: &[u64], low: &[Poly], p: u64, precision: u32, modulus: u64) -> Vec<Poly> {
    let mut out = Vec::with_capacity(low.len());
    let mut rest: Poly = phi_n.to_vec();
    for (i, g) in low.iter().enumerate() {
        if i + 1 == low.len() {
            out.push(rest.clone());
            break;
        }
        let h = low[i + 1..].iter().fold(vec![1u64], |acc, q| poly::mul(&acc, q, p));
        let (big_g, big_h) = poly::hensel_pair(&rest, g, &h, p, precision);
        out.push(big_g);
        rest = poly::reduce(&big_h, modulus);
    }
    out
}

/// Number of irreducible factors of `Phi_n` mod `p` via Berlekamp's nullity, computed
/// without reference to decomposition groups.
pub fn factor_count_mod_p(n: u64, p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if n % p == 0 {
        return Err(Error::Ramified { p, n });
    }
    let phi_p: Poly = cyclotomic_poly(n).iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    Ok(poly::berlekamp_factor_count(&phi_p, p))
}

type Key = (u64, u64, u32);

fn memory() -> &'static RwLock<HashMap<Key, Arc<LocalContext>>> {
    static CACHE: OnceLock<RwLock<HashMap<Key, Arc<LocalContext>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn cache_path(key: Key) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("lctx-{}-{}-{}.json", key.0, key.1, key.2)))
}

/// Shared context for `(p, n, N)`, memoized in memory and, when `ADELION_CACHE` is set,
/// on disk. Unreadable or inconsistent cache files are rebuilt.
pub fn context(p: u64, n: u64, precision: u32) -> Result<Arc<LocalContext>> {
    let key = (p, n, precision);
    if let Some(ctx) = memory().read().unwrap().get(&key) {
        return Ok(ctx.clone());
    }
    let path = cache_path(key);
    let cached = path
        .as_ref()
        .and_then(|path| std::fs::read_to_string(path).ok())
        .and_then(|s| LocalContext::from_json(&s).ok())
        .filter(|c| (c.p, c.n, c.precision) == key);
    let ctx = match cached {
        Some(c) => c,
        None => {
            let c = LocalContext::build(p, n, precision)?;
            if let Some(path) = &path {
                if let Some(parent) = path.parent() {
                    let _ = std::fs::create_dir_all(parent);
                }
                let _ = std::fs::write(path, c.to_json());
            }
            c
        }
    };
    let ctx = Arc::new(ctx);
    memory().write().unwrap().insert(key, ctx.clone());
    Ok(ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_examples() {
        let c = LocalContext::build(2, 5, 6).unwrap();
        assert_eq!((c.factor_count(), c.residue_degree()), (1, 4));
        let c = LocalContext::build(11, 5, 6).unwrap();
        assert_eq!((c.factor_count(), c.residue_degree()), (4, 1));
        let c = LocalContext::build(3, 8, 4).unwrap();
        assert_eq!((c.factor_count(), c.residue_degree()), (2, 2));
        assert!(c.product_matches());
        assert!(matches!(LocalContext::build(5, 20, 3), Err(Error::Ramified { .. })));
        assert!(matches!(LocalContext::build(3, 8, 0), Err(Error::Precision(_))));
    }

    #[test]
    fn linear_factors_are_roots_of_unity() {
        // above 11 in Q(zeta_5) every factor is x - r with r^5 = 1 mod 11^6
        let c = LocalContext::build(11, 5, 6).unwrap();
        let m = c.modulus();
        for h in c.factors() {
            let r = (m - h[0]) % m;
            assert_eq!(crate::arith::pow_mod(r, 5, m), 1);
            assert_ne!(r, 1);
        }
    }

    #[test]
    fn berlekamp_agrees_with_context() {
        for (p, n) in [(2, 7), (3, 13), (7, 9), (5, 31), (13, 40)] {
            let c = LocalContext::build(p, n, 3).unwrap();
            assert_eq!(factor_count_mod_p(n, p).unwrap(), c.factor_count());
            assert!(c.product_matches());
        }
    }

    #[test]
    fn cache_round_trip() {
        let c = LocalContext::build(3, 8, 4).unwrap();
        let back = LocalContext::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let mut broken: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        broken["factors"][0][0] = serde_json::json!(1);
        assert!(LocalContext::from_json(&broken.to_string()).is_err());
    }

    #[test]
    fn disk_cache_is_used() {
        let dir = tempfile::tempdir().unwrap();
        std::env::set_var(CACHE_ENV, dir.path());
        let ctx = context(7, 12, 3).unwrap();
        let file = dir.path().join("lctx-7-12-3.json");
        let stored = LocalContext::from_json(&std::fs::read_to_string(file).unwrap()).unwrap();
        assert_eq!(&stored, ctx.as_ref());
        std::env::remove_var(CACHE_ENV);
    }
}
