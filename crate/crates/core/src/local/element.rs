use super::context::LocalContext;
use super::poly;
use crate::arith::{inv_mod, mul_mod, pow_mod};
use crate::cyclotomic::CycloElement;
use crate::error::{Error, Result};
use crate::place::{act_unit, FinitePlace};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

/// A p-adic valuation, or `Bottom` when the element vanishes at the working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Bottom,
}

impl Valuation {
    pub fn finite(&self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(*v),
            Valuation::Bottom => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Valuation::Bottom)
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Bottom) => Ordering::Less,
            (Valuation::Bottom, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Bottom, Valuation::Bottom) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Bottom => f.write_str("bottom"),
        }
    }
}

/// `p^exponent · residue(x)` in `Z_p[x]/(h)`, the residue known modulo `p^N`.
///
/// The residue is not normalized: keeping p-multiples inside it preserves absolute
/// precision `exponent + N` across additions.
#[derive(Clone)]
pub struct LocalElement {
    ctx: Arc<LocalContext>,
    factor: usize,
    exponent: i64,
    residue: Vec<u64>,
}

fn big_mod(x: &BigInt, m: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(m));
    r.to_u64().unwrap()
}

fn vp(mut c: u64, p: u64) -> i64 {
    let mut v = 0;
    while c % p == 0 {
        c /= p;
        v += 1;
    }
    v
}

/// The image of `alpha` in the completion at `place`.
pub fn localize(alpha: &CycloElement, ctx: &Arc<LocalContext>, place: &FinitePlace) -> Result<LocalElement> {
    if alpha.level() != ctx.n() {
        return Err(Error::LevelMismatch { left: alpha.level(), right: ctx.n() });
    }
    let factor = ctx.factor_index(place)?;
    let (p, m) = (ctx.p(), ctx.modulus());
    let mut den = alpha.denominator().clone();
    let mut k = 0i64;
    let bp = BigInt::from(p);
    while (&den % &bp).is_zero() {
        den /= &bp;
        k += 1;
    }
    if k > ctx.precision() as i64 {
        return Err(Error::PrecisionExhausted { exponent: k as u64, precision: ctx.precision() });
    }
    let unit_inv = inv_mod(big_mod(&den, m), m).expect("denominator is a unit");
    let num: Vec<u64> = alpha.numerators().iter().map(|c| mul_mod(big_mod(c, m), unit_inv, m)).collect();
    let residue = pad(poly::rem_monic(&num, ctx.factor(factor), m), ctx.residue_degree());
    Ok(LocalElement { ctx: ctx.clone(), factor, exponent: -k, residue })
}

fn pad(mut r: Vec<u64>, len: usize) -> Vec<u64> {
    r.resize(len, 0);
    r
}

impl LocalElement {
    /// Builds an element from explicit parts; residue coefficients are reduced mod `p^N`.
    pub fn from_parts(ctx: &Arc<LocalContext>, place: &FinitePlace, exponent: i64, residue: &[u64]) -> Result<Self> {
        let factor = ctx.factor_index(place)?;
        if residue.len() > ctx.residue_degree() {
            return Err(Error::Parse(format!("residue has more than {} coefficients", ctx.residue_degree())));
        }
        let m = ctx.modulus();
        let residue = pad(residue.iter().map(|c| c % m).collect(), ctx.residue_degree());
        Ok(LocalElement { ctx: ctx.clone(), factor, exponent, residue })
    }

    pub fn zero(ctx: &Arc<LocalContext>, place: &FinitePlace) -> Result<Self> {
        Self::from_parts(ctx, place, 0, &[])
    }

    pub fn context(&self) -> &Arc<LocalContext> {
        &self.ctx
    }

    pub fn place(&self) -> FinitePlace {
        self.ctx.place(self.factor)
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn residue(&self) -> &[u64] {
        &self.residue
    }

    /// Valuations at or above this are invisible.
    pub fn absolute_precision(&self) -> i64 {
        self.exponent + self.ctx.precision() as i64
    }

    pub fn valuation(&self) -> Valuation {
        let p = self.ctx.p();
        self.residue
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| vp(c, p))
            .min()
            .map_or(Valuation::Bottom, |v| Valuation::Finite(self.exponent + v))
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if (!Arc::ptr_eq(&self.ctx, &other.ctx) && self.ctx != other.ctx) || self.factor != other.factor {
            return Err(Error::ContextMismatch);
        }
        Ok(())
    }

    fn shifted_residue(&self, target: i64) -> Vec<u64> {
        let m = self.ctx.modulus();
        let shift = (self.exponent - target) as u64;
        if shift >= self.ctx.precision() as u64 {
            return vec![0; self.residue.len()];
        }
        let factor = pow_mod(self.ctx.p(), shift, m);
        self.residue.iter().map(|&c| mul_mod(c, factor, m)).collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let e = self.exponent.min(other.exponent);
        let m = self.ctx.modulus();
        let (a, b) = (self.shifted_residue(e), other.shifted_residue(e));
        let residue = a.iter().zip(&b).map(|(&x, &y)| ((x as u128 + y as u128) % m as u128) as u64).collect();
        Ok(LocalElement { ctx: self.ctx.clone(), factor: self.factor, exponent: e, residue })
    }

    pub fn neg(&self) -> Self {
        let m = self.ctx.modulus();
        let residue = self.residue.iter().map(|&c| (m - c) % m).collect();
        LocalElement { residue, ..self.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let m = self.ctx.modulus();
        let prod = poly::mulmod(&self.residue, &other.residue, self.ctx.factor(self.factor), m);
        Ok(LocalElement {
            ctx: self.ctx.clone(),
            factor: self.factor,
            exponent: self.exponent + other.exponent,
            residue: pad(prod, self.ctx.residue_degree()),
        })
    }

    /// The Frobenius automorphism of the unramified completion: `r(x) ↦ r(x^p)`.
    pub fn frobenius(&self) -> Self {
        let m = self.ctx.modulus();
        let h = self.ctx.factor(self.factor);
        let r = poly::compose_power(&self.residue, self.ctx.p(), h, m);
        LocalElement { residue: pad(r, self.ctx.residue_degree()), ..self.clone() }
    }

    /// The isometry `E_y → E_{σ_u(y)}` induced by `σ_u`: `r(x) ↦ r(x^u)` modulo the
    /// factor of the image place.
    pub fn transport(&self, unit: u64) -> Self {
        let m = self.ctx.modulus();
        let target = act_unit(unit, &self.place());
        let factor = self.ctx.factor_index(&target).expect("image place lies in the context");
        let r = poly::compose_power(&self.residue, unit % self.ctx.n().max(1), self.ctx.factor(factor), m);
        LocalElement { ctx: self.ctx.clone(), factor, exponent: self.exponent, residue: pad(r, self.ctx.residue_degree()) }
    }

    /// Equality of the represented values up to the coarser absolute precision.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let d = self.sub(other)?;
        Ok(d.valuation().is_bottom())
    }

    /// A global element localizing to this one: `p^e · r(ζ)` with the residue lifted to
    /// integers in `[0, p^N)`.
    pub fn lift_to_global(&self) -> CycloElement {
        let n = self.ctx.n();
        let num: Vec<BigInt> = self.residue.iter().map(|&c| BigInt::from(c)).collect();
        let p = BigInt::from(self.ctx.p());
        let base = CycloElement::from_poly(n, num, BigInt::from(1));
        let scale = num_traits::pow(p, self.exponent.unsigned_abs() as usize);
        let q = if self.exponent >= 0 {
            num_rational::BigRational::from_integer(scale)
        } else {
            num_rational::BigRational::new(BigInt::from(1), scale)
        };
        base.scale(&q)
    }

    /// Absolute value `p^{-v}` as an exact rational; zero for `Bottom`.
    pub fn abs(&self) -> num_rational::BigRational {
        match self.valuation() {
            Valuation::Bottom => num_rational::BigRational::zero(),
            Valuation::Finite(v) => {
                let pv = num_traits::pow(BigInt::from(self.ctx.p()), v.unsigned_abs() as usize);
                if v >= 0 {
                    num_rational::BigRational::new(BigInt::from(1), pv)
                } else {
                    num_rational::BigRational::from_integer(pv)
                }
            }
        }
    }
}

impl PartialEq for LocalElement {
    fn eq(&self, other: &Self) -> bool {
        self.factor == other.factor
            && self.exponent == other.exponent
            && self.residue == other.residue
            && self.ctx == other.ctx
    }
}

impl fmt::Debug for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LocalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .residue
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        let (p, n) = (self.ctx.p(), self.ctx.precision());
        if self.exponent == 0 {
            write!(f, "{body} mod {p}^{n} at {}", self.place())
        } else {
            write!(f, "{p}^{} * ({body}) mod {p}^{n} at {}", self.exponent, self.place())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{unit_group, CycloElement};
    use crate::local::context::context;
    use crate::place::{act, places_above, Base};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn localize_examples() {
        let ctx = context(11, 5, 6).unwrap();
        let ys = places_above(5, Base::Prime(11));
        let y = ys[0];
        assert_eq!(localize(&CycloElement::from_int(5, 11), &ctx, &y).unwrap().valuation(), Valuation::Finite(1));
        let one_minus = CycloElement::one(5).checked_sub(&CycloElement::zeta(5)).unwrap();
        for w in &ys {
            assert_eq!(localize(&one_minus, &ctx, w).unwrap().valuation(), Valuation::Finite(0));
        }
        let scaled = one_minus.checked_mul(&CycloElement::ratio(5, 1, 11)).unwrap();
        assert_eq!(localize(&scaled, &ctx, &y).unwrap().valuation(), Valuation::Finite(-1));
        assert_eq!(localize(&CycloElement::zero(5), &ctx, &y).unwrap().valuation(), Valuation::Bottom);
        let big = CycloElement::zeta(5).checked_mul(&CycloElement::from_int(5, 121)).unwrap();
        assert_eq!(localize(&big, &ctx, &y).unwrap().valuation(), Valuation::Finite(2));
        let tiny = CycloElement::ratio(5, 1, 11i64.pow(7));
        assert!(matches!(localize(&tiny, &ctx, &y), Err(Error::PrecisionExhausted { .. })));
    }

    #[test]
    fn localization_is_a_ring_map() {
        let ctx = context(3, 8, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for y in places_above(8, Base::Prime(3)) {
            for _ in 0..50 {
                let a = CycloElement::random(8, &mut rng, 20, 4);
                let b = CycloElement::random(8, &mut rng, 20, 4);
                let la = localize(&a, &ctx, &y).unwrap();
                let lb = localize(&b, &ctx, &y).unwrap();
                let sum = localize(&a.checked_add(&b).unwrap(), &ctx, &y).unwrap();
                let prod = localize(&a.checked_mul(&b).unwrap(), &ctx, &y).unwrap();
                assert!(sum.agrees_with(&la.add(&lb).unwrap()).unwrap());
                assert!(prod.agrees_with(&la.mul(&lb).unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn transport_matches_localized_galois_action() {
        let ctx = context(7, 12, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = CycloElement::random(12, &mut rng, 30, 1);
            for y in places_above(12, Base::Prime(7)) {
                for s in unit_group(12) {
                    let lhs = localize(&a, &ctx, &y).unwrap().transport(s.unit());
                    let sy = act(&s, &y).unwrap();
                    let rhs = localize(&a.apply(&s).unwrap(), &ctx, &sy).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn frobenius_examples() {
        let ctx = context(2, 5, 6).unwrap();
        let y = places_above(5, Base::Prime(2))[0];
        let x = LocalElement::from_parts(&ctx, &y, 0, &[13]).unwrap();
        assert!(x.frobenius().sub(&x).unwrap().valuation() >= Valuation::Finite(1));
        let z = localize(&CycloElement::from_integers(5, &[1, 2, 0, 1]), &ctx, &y).unwrap();
        let mut it = z.clone();
        for _ in 0..ctx.residue_degree() {
            it = it.frobenius();
        }
        assert!(it.sub(&z).unwrap().valuation() >= Valuation::Finite(1));
        let w = localize(&CycloElement::from_integers(5, &[3, 0, 1]), &ctx, &y).unwrap();
        let lhs = z.mul(&w).unwrap().frobenius();
        let rhs = z.frobenius().mul(&w.frobenius()).unwrap();
        assert!(lhs.sub(&rhs).unwrap().valuation() >= Valuation::Finite(1));
    }

    #[test]
    fn lift_round_trips() {
        let ctx = context(11, 5, 4).unwrap();
        let y = places_above(5, Base::Prime(11))[2];
        let x = LocalElement::from_parts(&ctx, &y, -2, &[1234]).unwrap();
        let back = localize(&x.lift_to_global(), &ctx, &y).unwrap();
        assert!(back.agrees_with(&x).unwrap());
    }
}
