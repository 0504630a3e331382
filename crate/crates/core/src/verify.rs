//! Seeded property suites over a fixed set of towers. Every suite is deterministic in its
//! seed and reports its check count together with the first failures.

use crate::adele::sample::{random_adele, random_classical, random_conorm_like, random_open_around};
use crate::adele::{cantor_adele, cantor_truncations, densify, is_cauchy, limit_local, Adele, ClassicalAdele, NeighborhoodBaseElement};
use crate::arith::{is_prime, phi};
use crate::cyclotomic::{unit_group, CycloElement, Tower};
use crate::error::{Error, Result};
use crate::local::{ball_arithmetic_check, context, factor_count_mod_p, localize, Membership, Sampling};
use crate::place::{act, find_splitting_extension, place_count, places_above, restrict_place, Base, FinitePlace};
use crate::transition::{
    build_transition, chart_independence_check, j_independence_check, verify_td, BallSpec, Chart, Radius, TieBreak, UFamily,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

pub const SUITE_TOWERS: [&[u64]; 4] = [&[1, 5], &[1, 8, 24], &[1, 11, 121], &[1, 5, 20, 60]];
pub const SUITE_PRIMES: [u64; 5] = [2, 3, 7, 11, 13];
pub const SPLITTING_PRIMES: [u64; 4] = [2, 3, 5, 7];
/// Search bound for tower extensions in the splitting suite.
pub const MAX_EXTENSION: u64 = 100_000;

const KEPT_FAILURES: usize = 10;

pub fn suite_towers() -> Vec<Tower> {
    SUITE_TOWERS.iter().map(|c| Tower::new(c.to_vec()).expect("suite towers are chains")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    /// Transition-diagram axioms and chart independence.
    Td,
    Ring,
    Conorm,
    /// Galois isometry of valuations and continuity of local ball arithmetic.
    Isometry,
    Density,
    Counterexample,
    /// Place counts against the factor oracle and the tower-extension search.
    Splitting,
}

impl Suite {
    pub const ALL: [Suite; 7] =
        [Suite::Td, Suite::Ring, Suite::Conorm, Suite::Isometry, Suite::Density, Suite::Counterexample, Suite::Splitting];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Td => "td",
            Suite::Ring => "ring",
            Suite::Conorm => "conorm",
            Suite::Isometry => "isometry",
            Suite::Density => "density",
            Suite::Counterexample => "counterexample",
            Suite::Splitting => "splitting",
        }
    }

    pub fn run(self, seed: u64) -> SuiteReport {
        let mut report = SuiteReport::new(self.name());
        // each suite draws from its own stream so that one suite's output does not
        // depend on which others ran
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (self as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let outcome = match self {
            Suite::Td => td(&mut report, &mut rng),
            Suite::Ring => ring(&mut report, &mut rng),
            Suite::Conorm => conorm(&mut report, &mut rng),
            Suite::Isometry => isometry(&mut report, &mut rng),
            Suite::Density => density(&mut report, &mut rng),
            Suite::Counterexample => counterexample(&mut report),
            Suite::Splitting => splitting(&mut report),
        };
        if let Err(e) = outcome {
            report.fail(format!("aborted: {e}"));
        }
        report
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Expands `all` into every suite.
pub fn parse_selection(s: &str) -> Result<Vec<Suite>> {
    if s == "all" {
        Ok(Suite::ALL.to_vec())
    } else {
        Ok(vec![s.parse()?])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: usize,
    pub failed: usize,
    /// The first few failures.
    pub failures: Vec<String>,
    /// Suite-specific lines such as per-level tables.
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: &str) -> Self {
        SuiteReport { suite: suite.into(), checks: 0, failed: 0, failures: Vec::new(), notes: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }

    fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < KEPT_FAILURES {
            self.failures.push(msg);
        }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.fail(msg());
        }
    }

    /// Counts an error as a failed check instead of aborting the suite.
    fn check_result(&mut self, r: Result<bool>, msg: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, msg),
            Err(e) => self.check(false, || format!("{}: {e}", msg())),
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{verdict} {}: {} checks, {} failed", self.suite, self.checks, self.failed)?;
        for line in &self.notes {
            writeln!(f, "  {line}")?;
        }
        for line in &self.failures {
            writeln!(f, "  failure: {line}")?;
        }
        Ok(())
    }
}

fn unramified(t: &Tower, candidates: &[u64]) -> Vec<u64> {
    candidates.iter().copied().filter(|p| t.top_conductor() % p != 0).collect()
}

fn td(report: &mut SuiteReport, rng: &mut ChaCha8Rng) -> Result<()> {
    for t in suite_towers() {
        for p in SUITE_PRIMES {
            let v = places_above(t.conductor(0), Base::Prime(p))[0];
            let diagram = build_transition(&t, &v, t.depth())?;
            let r = verify_td(&diagram);
            report.check(r.passed(), || format!("{} p={p}: {}", t.spec_string(), r.violation.as_ref().unwrap()));
        }
    }
    chart_independence(report, rng, 50, 50)
}

/// A depth-`D` slice above `p`; half the time constant on cylinders of a random level
/// with values from that level's field.
pub fn random_slice<R: Rng + ?Sized>(t: &Tower, p: u64, rng: &mut R) -> BTreeMap<FinitePlace, CycloElement> {
    let n = t.top_conductor();
    if rng.gen_bool(0.5) {
        return places_above(n, Base::Prime(p)).into_iter().map(|y| (y, CycloElement::random(n, rng, 3, 2))).collect();
    }
    let level = rng.gen_range(0..=t.depth());
    let m = t.conductor(level);
    let values: BTreeMap<FinitePlace, CycloElement> =
        places_above(m, Base::Prime(p)).into_iter().map(|w| (w, CycloElement::random(m, rng, 3, 2))).collect();
    places_above(n, Base::Prime(p))
        .into_iter()
        .map(|y| (y, values[&restrict_place(&y, m).unwrap()].embed(n).unwrap()))
        .collect()
}

/// A ball family structured at a random level.
pub fn random_family<R: Rng + ?Sized>(t: &Tower, p: u64, rng: &mut R) -> UFamily {
    let n = t.top_conductor();
    let level = rng.gen_range(0..=t.depth());
    let m = t.conductor(level);
    let balls: BTreeMap<FinitePlace, BallSpec> = places_above(m, Base::Prime(p))
        .into_iter()
        .map(|w| (w, BallSpec { center: CycloElement::random(m, rng, 3, 1), radius: Radius::Padic(rng.gen_range(-1..=3)) }))
        .collect();
    let balls = places_above(n, Base::Prime(p))
        .into_iter()
        .map(|y| {
            let b = &balls[&restrict_place(&y, m).unwrap()];
            (y, BallSpec { center: b.center.embed(n).unwrap(), radius: b.radius.clone() })
        })
        .collect();
    UFamily { level, balls }
}

fn chart_independence(report: &mut SuiteReport, rng: &mut ChaCha8Rng, slices: usize, families: usize) -> Result<()> {
    for t in suite_towers() {
        let primes = unramified(&t, &SUITE_PRIMES);
        let charts: Vec<(u64, Chart, Chart)> = primes
            .iter()
            .map(|&p| {
                let base = Base::Prime(p);
                Ok((p, Chart::build(&t, base, 0, t.depth(), TieBreak::Least)?, Chart::build(&t, base, 0, t.depth(), TieBreak::Greatest)?))
            })
            .collect::<Result<_>>()?;
        for i in 0..slices {
            let (p, a, b) = &charts[i % charts.len()];
            let slice = random_slice(&t, *p, rng);
            let r = chart_independence_check(&slice, a, b)?;
            report.check(r.agree(), || format!("{} p={p}: profiles {:?} vs {:?}", t.spec_string(), r.profile_a, r.profile_b));
        }
        for i in 0..families {
            let (p, a, b) = &charts[i % charts.len()];
            let family = random_family(&t, *p, rng);
            let r = j_independence_check(&family, a, b)?;
            report.check(r.agree(), || format!("{} p={p}: openness {} vs {}", t.spec_string(), r.open_a, r.open_b));
        }
    }
    Ok(())
}

fn ring(report: &mut SuiteReport, rng: &mut ChaCha8Rng) -> Result<()> {
    let primes = [2, 3, 7, 11];
    for t in suite_towers() {
        let d = t.depth();
        for _ in 0..200 {
            let draw = |rng: &mut ChaCha8Rng| random_adele(&t, rng.gen_range(0..=d), &primes, true, rng);
            let (a, b, c) = (draw(rng)?, draw(rng)?, draw(rng)?);
            let label = || format!("{} at depths {},{},{}", t.spec_string(), a.depth(), b.depth(), c.depth());
            report.check(a.add(&b)?.add(&c)? == a.add(&b.add(&c)?)?, || format!("additive associativity, {}", label()));
            report.check(a.mul(&b)?.mul(&c)? == a.mul(&b.mul(&c)?)?, || format!("multiplicative associativity, {}", label()));
            report.check(a.add(&b)? == b.add(&a)?, || format!("additive commutativity, {}", label()));
            report.check(a.mul(&b)? == b.mul(&a)?, || format!("multiplicative commutativity, {}", label()));
            report.check(
                a.mul(&b.add(&c)?)? == a.mul(&b)?.add(&a.mul(&c)?)?,
                || format!("distributivity, {}", label()),
            );
            report.check(a.add(&a.neg())?.is_zero(), || format!("additive inverse, {}", label()));
            report.check(a.mul(&Adele::one(&t, 0)?)? == a, || format!("multiplicative identity, {}", label()));
        }
    }
    Ok(())
}

fn conorm(report: &mut SuiteReport, rng: &mut ChaCha8Rng) -> Result<()> {
    let primes = [2, 3, 7, 11, 13];
    for t in suite_towers() {
        let d = t.depth();
        for _ in 0..100 {
            let i = rng.gen_range(0..=d);
            let c = random_classical(&t, i, &primes, rng)?;
            let direct = c.conorm_adele(d)?;
            for j in i..=d {
                let via = c.conorm(j)?;
                report.check(via.conorm_adele(d)? == direct, || format!("{}: conorm {i}->{j}->E differs from {i}->E", t.spec_string()));
                for k in j..=d {
                    report.check(via.conorm(k)? == c.conorm(k)?, || format!("{}: conorm {i}->{j}->{k} differs", t.spec_string()));
                }
            }
            report.check(direct.in_conorm_image(i).as_ref() == Some(&c), || format!("{}: witness round trip at {i}", t.spec_string()));
            let zero = ClassicalAdele::zero(&t, i)?;
            report.check((c == zero) == direct.is_zero(), || format!("{}: conorm is not injective at {i}", t.spec_string()));

            // embed then conorm equals conorm then include
            let x = CycloElement::random(t.conductor(i), rng, 4, 6);
            let principal = ClassicalAdele::principal(&t, i, &x)?;
            let j = rng.gen_range(i..=d);
            let lhs = principal.conorm(j)?;
            let rhs = ClassicalAdele::principal(&t, j, &x.embed(t.conductor(j))?)?;
            report.check(lhs == rhs, || format!("{}: principal square {i}->{j}", t.spec_string()));
            report.check(principal.conorm_adele(d)? == Adele::constant(&t, d, &x)?, || format!("{}: principal square {i}->E", t.spec_string()));

            let other = random_classical(&t, i, &primes, rng)?;
            let sum = direct.add(&other.conorm_adele(d)?)?;
            let product = direct.mul(&other.conorm_adele(d)?)?;
            report.check(
                sum.in_conorm_image(i).is_some() && product.in_conorm_image(i).is_some(),
                || format!("{}: image at {i} not closed under ring operations", t.spec_string()),
            );
        }
    }
    Ok(())
}

const ISOMETRY_PRECISION: u32 = 8;

fn isometry(report: &mut SuiteReport, rng: &mut ChaCha8Rng) -> Result<()> {
    let towers = suite_towers();
    let mut samples = 0;
    while samples < 500 {
        let t = towers.choose(rng).unwrap();
        let n = t.conductor(rng.gen_range(0..=t.depth()));
        let primes: Vec<u64> = SUITE_PRIMES.into_iter().filter(|p| n % p != 0).collect();
        let p = *primes.choose(rng).unwrap();
        let ctx = context(p, n, ISOMETRY_PRECISION)?;
        let e: i64 = rng.gen_range(-2..=3);
        let mut alpha = CycloElement::random(n, rng, 9, 4);
        if e >= 0 {
            alpha = alpha.checked_mul(&CycloElement::from_int(n, (p as i64).pow(e as u32)))?;
        } else {
            alpha = alpha.scale(&num_rational::BigRational::new(1.into(), num_bigint::BigInt::from(p).pow((-e) as u32)));
        }
        let sigma = unit_group(n).choose(rng).unwrap().clone();
        let y = *places_above(n, Base::Prime(p)).choose(rng).unwrap();
        let lhs = localize(&alpha, &ctx, &y).map(|x| x.valuation());
        let rhs = act(&sigma, &y).and_then(|sy| localize(&alpha.apply(&sigma)?, &ctx, &sy)).map(|x| x.valuation());
        samples += 1;
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => report.check(a == b, || format!("n={n} p={p} sigma={} at {y}: {a:?} vs {b:?}", sigma.unit())),
            (Err(Error::PrecisionExhausted { .. }), Err(Error::PrecisionExhausted { .. })) => report.check(true, String::new),
            (a, b) => report.check(false, || format!("n={n} p={p}: {a:?} vs {b:?}")),
        }
    }
    ball_arithmetic(report, rng)
}

/// `(p, n)` with small residue fields, so that exhaustive perturbation stays cheap.
const BALL_CONTEXTS: [(u64, u64); 5] = [(2, 3), (3, 4), (5, 3), (7, 3), (2, 5)];

fn ball_arithmetic(report: &mut SuiteReport, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut merged = crate::local::BallCheckReport::default();
    for (p, n) in BALL_CONTEXTS {
        let y = places_above(n, Base::Prime(p))[0];
        for precision in 1..=2u32 {
            let ctx = context(p, n, precision)?;
            for _ in 0..3 {
                let x = localize(&CycloElement::random(n, rng, 4, 1), &ctx, &y)?;
                let z = localize(&CycloElement::random(n, rng, 4, 1), &ctx, &y)?;
                for k in -1..precision as i64 {
                    merged.merge(ball_arithmetic_check(&x, &z, k, Sampling::Exhaustive)?);
                }
            }
        }
    }
    let exhaustive = merged.additive_cases.min(merged.multiplicative_cases);
    let mut random = crate::local::BallCheckReport::default();
    for (i, (p, n)) in BALL_CONTEXTS.into_iter().enumerate() {
        let y = places_above(n, Base::Prime(p))[0];
        for precision in 3..=6u32 {
            let ctx = context(p, n, precision)?;
            let x = localize(&CycloElement::random(n, rng, 50, 1), &ctx, &y)?;
            let z = localize(&CycloElement::random(n, rng, 50, 1), &ctx, &y)?;
            let k = rng.gen_range(-1..precision as i64);
            random.merge(ball_arithmetic_check(&x, &z, k, Sampling::Random { samples: 60, seed: rng.gen::<u64>() ^ i as u64 })?);
        }
    }
    report.notes.push(format!(
        "ball arithmetic: {exhaustive} exhaustive and {} random cases per operation",
        random.additive_cases.min(random.multiplicative_cases)
    ));
    merged.merge(random);
    report.checks += merged.additive_cases + merged.multiplicative_cases;
    for v in merged.violations {
        report.fail(v);
    }
    Ok(())
}

fn density(report: &mut SuiteReport, rng: &mut ChaCha8Rng) -> Result<()> {
    let towers = suite_towers();
    let mut pairs = 0;
    while pairs < 100 {
        let t = &towers[pairs % towers.len()];
        let d = rng.gen_range(0..=t.depth());
        let primes = unramified(t, &SUITE_PRIMES);
        let a = if rng.gen_bool(0.5) {
            random_adele(t, d, &primes, true, rng)?
        } else {
            random_conorm_like(t, d, &primes, rng)?
        };
        let extra: Vec<u64> = primes.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        let u = random_open_around(&a, &extra, rng.gen_bool(0.7), rng)?;
        pairs += 1;
        match u.contains(&a)? {
            Membership::In => {}
            m => {
                report.check(false, || format!("{}: sampled open does not contain its center ({m:?})", t.spec_string()));
                continue;
            }
        }
        let r = densify(&a, &u).and_then(|out| {
            let image = out.witness.conorm_adele(a.depth())?;
            Ok(u.contains(&image)? == Membership::In)
        });
        report.check_result(r, || format!("{}: densify at depth {d}", t.spec_string()));
    }
    Ok(())
}

pub const CANTOR_TOWER: [u64; 3] = [1, 11, 121];
pub const CANTOR_PRIME: u64 = 3;

fn counterexample(report: &mut SuiteReport) -> Result<()> {
    let t = Tower::new(CANTOR_TOWER.to_vec())?;
    let p = CANTOR_PRIME;
    let d = t.depth();
    let a = cantor_adele(&t, p, d)?;
    let values: BTreeSet<Vec<String>> = a.slices()[&Base::Prime(p)].values().map(CycloElement::to_coeff_strings).collect();
    let places = place_count(t.top_conductor(), Base::Prime(p)) as usize;
    report.check(values.len() == places, || format!("{} distinct values for {places} places", values.len()));
    report.notes.push(format!("tower {} p={p} depth {d}: {} places, {} distinct values", t.spec_string(), places, values.len()));
    for i in 0..=d {
        let member = a.in_conorm_image(i).is_some();
        report.notes.push(format!("level {i}: in conorm image = {member}"));
        if i < d {
            report.check(!member, || format!("digit map lies in the conorm image at level {i}"));
        }
    }
    let seq = cantor_truncations(&t, p, d)?;
    let base: Vec<NeighborhoodBaseElement> =
        (0..=4).map(|j| NeighborhoodBaseElement::new(BTreeSet::from([p]), p.pow(j))).collect::<Result<_>>()?;
    let cauchy = is_cauchy(&seq, &base)?;
    report.check(cauchy.cauchy(), || format!("truncations not Cauchy: {:?}", cauchy.indices));
    report.notes.push(format!(
        "Cauchy indices for n = 3^0..3^4: {:?}",
        cauchy.indices.iter().map(|(_, i)| *i).collect::<Vec<_>>()
    ));
    let limit = limit_local(&seq, p, 6)?;
    for (y, x) in &limit.values {
        let expected = localize(&a.value(y)?, x.context(), y)?;
        report.check_result(x.agrees_with(&expected), || format!("local limit differs from the digit map at {y}"));
    }
    report.check(limit.require_constant_at(d - 1).is_err(), || "local limit constant below the full depth".into());
    report.notes.push(format!("local limit constant from depth {}", limit.constant_depth));
    Ok(())
}

/// Largest modulus of the place-count comparison.
pub const PLACE_ORACLE_MAX_N: u64 = 200;
pub const PLACE_ORACLE_MAX_P: u64 = 50;

fn splitting(report: &mut SuiteReport) -> Result<()> {
    for n in 1..=PLACE_ORACLE_MAX_N {
        for p in (2..=PLACE_ORACLE_MAX_P).filter(|&p| is_prime(p) && n % p != 0) {
            let places = places_above(n, Base::Prime(p));
            let oracle = factor_count_mod_p(n, p)?;
            report.check(places.len() == oracle, || format!("n={n} p={p}: {} places, {oracle} factors", places.len()));
            let total: u64 = places.iter().map(FinitePlace::local_degree).sum();
            report.check(total == phi(n), || format!("n={n} p={p}: local degrees sum to {total}"));
        }
    }
    for t in suite_towers() {
        for p in SPLITTING_PRIMES {
            let before = place_count(t.top_conductor(), Base::Prime(p));
            match find_splitting_extension(&t, p, MAX_EXTENSION) {
                Some((m, after)) => {
                    report.check(after > before && after % before == 0 && t.extend(m).is_ok(), || {
                        format!("{} p={p}: extension {m} gives {after} places from {before}", t.spec_string())
                    });
                    report.notes.push(format!("{} p={p}: conductor {m} raises the place count from {before} to {after}", t.spec_string()));
                }
                None => report.check(false, || format!("{} p={p}: no splitting extension up to {MAX_EXTENSION}", t.spec_string())),
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(parse_selection("all").unwrap().len(), 7);
        assert!(parse_selection("bogus").is_err());
    }

    #[test]
    fn every_suite_passes() {
        for s in Suite::ALL {
            let start = std::time::Instant::now();
            let r = s.run(7);
            eprintln!("{r}  ({:.2?})", start.elapsed());
            assert!(r.passed(), "{r}");
        }
    }
}
