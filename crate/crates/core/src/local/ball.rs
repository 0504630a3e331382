use super::context::LocalContext;
use super::element::{LocalElement, Valuation};
use crate::error::{Error, Result};
use crate::place::FinitePlace;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// Least integer `v` with `p^{-v} < rho`, so that `|z| < rho` iff `v(z) ≥ v`.
pub fn min_valuation_below(p: u64, rho: &BigRational) -> Result<i64> {
    if !rho.is_positive() {
        return Err(Error::Precision("ball radius must be positive".into()));
    }
    let p = BigRational::from_integer(BigInt::from(p));
    let power = |v: i64| -> BigRational {
        if v >= 0 {
            p.pow(-(v as i32))
        } else {
            p.pow((-v) as i32)
        }
    };
    let mut v = 0i64;
    while power(v) >= *rho {
        v += 1;
    }
    while power(v - 1) < *rho {
        v -= 1;
    }
    Ok(v)
}

/// The open ball `{x : |x - c| < p^{-k}}`, stored as `{x : v(x - c) ≥ k + 1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalBall {
    center: LocalElement,
    min_valuation: i64,
}

impl LocalBall {
    /// Radius `p^{-k}`.
    pub fn new(center: LocalElement, k: i64) -> Self {
        LocalBall { center, min_valuation: k + 1 }
    }

    /// Arbitrary positive rational radius.
    pub fn with_radius(center: LocalElement, rho: &BigRational) -> Result<Self> {
        let v = min_valuation_below(center.context().p(), rho)?;
        Ok(LocalBall { center, min_valuation: v })
    }

    pub fn center(&self) -> &LocalElement {
        &self.center
    }

    pub fn min_valuation(&self) -> i64 {
        self.min_valuation
    }

    /// Strict membership `|x - c| < radius`. Fails with `Precision` when the difference
    /// vanishes at a precision too coarse to decide.
    pub fn contains(&self, x: &LocalElement) -> Result<bool> {
        let d = x.sub(&self.center)?;
        match d.valuation() {
            Valuation::Finite(v) => Ok(v >= self.min_valuation),
            Valuation::Bottom if d.absolute_precision() >= self.min_valuation => Ok(true),
            Valuation::Bottom => Err(Error::Precision(format!(
                "difference known only to p^{}, ball needs p^{}",
                d.absolute_precision(),
                self.min_valuation
            ))),
        }
    }
}

/// How to choose the perturbations of a ball-arithmetic check.
#[derive(Clone, Copy, Debug)]
pub enum Sampling {
    /// Every perturbation of the input balls visible at the working precision.
    Exhaustive,
    Random { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BallCheckReport {
    pub additive_cases: usize,
    pub multiplicative_cases: usize,
    pub violations: Vec<String>,
}

impl BallCheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: BallCheckReport) {
        self.additive_cases += other.additive_cases;
        self.multiplicative_cases += other.multiplicative_cases;
        self.violations.extend(other.violations);
    }
}

fn perturbations(ctx: &Arc<LocalContext>, place: &FinitePlace, min_val: i64, sampling: Sampling) -> Result<Vec<LocalElement>> {
    let p = ctx.p();
    let f = ctx.residue_degree();
    let n = ctx.precision() as i64;
    let min_val = min_val.max(0);
    let free = (n - min_val).max(0) as u32;
    let digits = p.pow(free);
    let scale = p.pow(min_val.min(n) as u32);
    match sampling {
        Sampling::Exhaustive => {
            let total = (digits as u128).pow(f as u32);
            if total > 1 << 16 {
                return Err(Error::Precision(format!("{total} perturbations is too many to enumerate")));
            }
            let mut out = Vec::with_capacity(total as usize);
            for mut idx in 0..total as u64 {
                let mut residue = Vec::with_capacity(f);
                for _ in 0..f {
                    residue.push((idx % digits) * scale);
                    idx /= digits;
                }
                out.push(LocalElement::from_parts(ctx, place, 0, &residue)?);
            }
            Ok(out)
        }
        Sampling::Random { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..samples)
                .map(|_| {
                    let residue: Vec<u64> = (0..f).map(|_| rng.gen_range(0..digits) * scale).collect();
                    LocalElement::from_parts(ctx, place, 0, &residue)
                })
                .collect()
        }
    }
}

/// Checks the continuity bounds of addition and multiplication at `(x, y)` for target
/// radius `r = p^{-k}`:
/// `B(x, r/2) + B(y, r/2) ⊆ B(x + y, r)` and
/// `B(x, δ)·B(y, δ) ⊆ B(xy, r)` with `δ = min{1, r/(1 + |x| + |y|)}`.
pub fn ball_arithmetic_check(x: &LocalElement, y: &LocalElement, k: i64, sampling: Sampling) -> Result<BallCheckReport> {
    let ctx = x.context().clone();
    if x.context() != y.context() || x.place() != y.place() {
        return Err(Error::ContextMismatch);
    }
    let place = x.place();
    let p = ctx.p();
    let target = k + 1;
    let limit = x.absolute_precision().min(y.absolute_precision());
    if target > limit {
        return Err(Error::Precision(format!("radius p^-{k} is finer than the working precision")));
    }
    let r = BigRational::from_integer(BigInt::from(p)).pow(-(k as i32));
    let two = BigRational::from_integer(BigInt::from(2));
    let mut report = BallCheckReport::default();

    let add_min = min_valuation_below(p, &(&r / &two))?;
    let sum = x.add(y)?;
    let sum_ball = LocalBall { center: sum, min_valuation: target };
    let dxs = perturbations(&ctx, &place, add_min, sampling)?;
    let dys = match sampling {
        Sampling::Exhaustive => dxs.clone(),
        Sampling::Random { samples, seed } => perturbations(&ctx, &place, add_min, Sampling::Random { samples, seed: seed ^ 0x5eed })?,
    };
    for (i, dx) in dxs.iter().enumerate() {
        let pairs: Box<dyn Iterator<Item = &LocalElement>> = match sampling {
            Sampling::Exhaustive => Box::new(dys.iter()),
            Sampling::Random { .. } => Box::new(std::iter::once(&dys[i])),
        };
        for dy in pairs {
            report.additive_cases += 1;
            let image = x.add(dx)?.add(&y.add(dy)?)?;
            if !sum_ball.contains(&image)? {
                report.violations.push(format!("add: x+{dx}, y+{dy}"));
            }
        }
    }

    let delta = {
        let bound = &r / (BigRational::one() + x.abs() + y.abs());
        if bound > BigRational::one() { BigRational::one() } else { bound }
    };
    let mul_min = min_valuation_below(p, &delta)?;
    let prod_ball = LocalBall { center: x.mul(y)?, min_valuation: target };
    let dxs = perturbations(&ctx, &place, mul_min, sampling)?;
    let dys = match sampling {
        Sampling::Exhaustive => dxs.clone(),
        Sampling::Random { samples, seed } => perturbations(&ctx, &place, mul_min, Sampling::Random { samples, seed: seed ^ 0xfeed })?,
    };
    for (i, dx) in dxs.iter().enumerate() {
        let pairs: Box<dyn Iterator<Item = &LocalElement>> = match sampling {
            Sampling::Exhaustive => Box::new(dys.iter()),
            Sampling::Random { .. } => Box::new(std::iter::once(&dys[i])),
        };
        for dy in pairs {
            report.multiplicative_cases += 1;
            let image = x.add(dx)?.mul(&y.add(dy)?)?;
            if !prod_ball.contains(&image)? {
                report.violations.push(format!("mul: x+{dx}, y+{dy}"));
            }
        }
    }
    Ok(report)
}
