use super::{cyclotomic_poly, GaloisElement};
use crate::arith::{factor_big, phi};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::collections::BTreeSet;
use std::fmt;

/// An exact element of Q(zeta_n) in the power basis `1, zeta, …, zeta^{phi(n)-1}`.
///
/// Stored as integer numerators over one positive common denominator, reduced so that
/// equal field elements have identical representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycloElement {
    level: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

fn reduce_mod_cyclotomic(coeffs: &mut Vec<BigInt>, n: u64) {
    let phi_poly = cyclotomic_poly(n);
    let deg = phi_poly.len() - 1;
    for k in (deg..coeffs.len()).rev() {
        if coeffs[k].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut coeffs[k]);
        for (j, &pj) in phi_poly[..deg].iter().enumerate() {
            if pj != 0 {
                coeffs[k - deg + j] -= &c * pj;
            }
        }
    }
    coeffs.truncate(deg);
    coeffs.resize(deg, BigInt::zero());
}

/// Product reduced modulo `Phi_n` in checked `i128` arithmetic; `None` on overflow.
fn mul_small(a: &[BigInt], b: &[BigInt], n: u64) -> Option<Vec<BigInt>> {
    let a: Vec<i128> = a.iter().map(|c| c.to_i64().map(i128::from)).collect::<Option<_>>()?;
    let b: Vec<i128> = b.iter().map(|c| c.to_i64().map(i128::from)).collect::<Option<_>>()?;
    let mut prod = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = prod[i + j].checked_add(x.checked_mul(y)?)?;
        }
    }
    let phi_poly = cyclotomic_poly(n);
    let deg = phi_poly.len() - 1;
    for k in (deg..prod.len()).rev() {
        let c = std::mem::take(&mut prod[k]);
        if c == 0 {
            continue;
        }
        for (j, &pj) in phi_poly[..deg].iter().enumerate() {
            if pj != 0 {
                prod[k - deg + j] = prod[k - deg + j].checked_sub(c.checked_mul(i128::from(pj))?)?;
            }
        }
    }
    prod.resize(deg, 0);
    Some(prod.into_iter().map(BigInt::from).collect())
}

impl CycloElement {
    fn normalized(level: u64, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            num.iter_mut().for_each(|c| *c = -std::mem::take(c));
        }
        let mut g = den.clone();
        for c in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() && !g.is_zero() {
            num.iter_mut().for_each(|c| *c /= &g);
            den /= &g;
        }
        if num.iter().all(Zero::is_zero) {
            den = BigInt::one();
        }
        CycloElement { level, num, den }
    }

    /// From a polynomial in zeta of any degree (reduced modulo Phi_n).
    pub fn from_poly(level: u64, mut num: Vec<BigInt>, den: BigInt) -> Self {
        assert!(level >= 1, "conductor must be positive");
        assert!(!den.is_zero(), "zero denominator");
        reduce_mod_cyclotomic(&mut num, level);
        Self::normalized(level, num, den)
    }

    pub fn from_rational_coeffs(level: u64, coeffs: &[BigRational]) -> Self {
        let den = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs.iter().map(|c| c.numer() * (&den / c.denom())).collect();
        Self::from_poly(level, num, den)
    }

    pub fn from_integers(level: u64, coeffs: &[i64]) -> Self {
        Self::from_poly(level, coeffs.iter().map(|&c| BigInt::from(c)).collect(), BigInt::one())
    }

    pub fn zero(level: u64) -> Self {
        Self::from_poly(level, vec![], BigInt::one())
    }

    pub fn one(level: u64) -> Self {
        Self::from_rational(level, BigRational::one())
    }

    pub fn from_rational(level: u64, q: BigRational) -> Self {
        Self::from_poly(level, vec![q.numer().clone()], q.denom().clone())
    }

    pub fn from_int(level: u64, k: i64) -> Self {
        Self::from_rational(level, BigRational::from_integer(k.into()))
    }

    pub fn ratio(level: u64, num: i64, den: i64) -> Self {
        Self::from_rational(level, BigRational::new(num.into(), den.into()))
    }

    /// `zeta_n^k`.
    pub fn zeta_pow(level: u64, k: u64) -> Self {
        let e = (k % level) as usize;
        let mut num = vec![BigInt::zero(); e + 1];
        num[e] = BigInt::one();
        Self::from_poly(level, num, BigInt::one())
    }

    pub fn zeta(level: u64) -> Self {
        Self::zeta_pow(level, 1)
    }

    /// Random element with numerators in `[-bound, bound]` and denominator in `[1, max_den]`.
    pub fn random<R: Rng + ?Sized>(level: u64, rng: &mut R, bound: i64, max_den: i64) -> Self {
        let d = phi(level) as usize;
        let num = (0..d).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
        Self::from_poly(level, num, BigInt::from(rng.gen_range(1..=max_den.max(1))))
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn degree(&self) -> usize {
        self.num.len()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num.iter().map(|c| BigRational::new(c.clone(), self.den.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.first().is_some_and(One::is_one) && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(self.num.first().cloned().unwrap_or_default(), self.den.clone()))
        } else {
            None
        }
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(Error::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(())
    }

    fn combine(&self, other: &Self, sign: i8) -> Self {
        let l = self.den.lcm(&other.den);
        let (fa, fb) = (&l / &self.den, &l / &other.den);
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| if sign > 0 { a * &fa + b * &fb } else { a * &fa - b * &fb })
            .collect();
        Self::normalized(self.level, num, l)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.combine(other, 1))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.combine(other, -1))
    }

    pub fn neg(&self) -> Self {
        CycloElement { level: self.level, num: self.num.iter().map(|c| -c).collect(), den: self.den.clone() }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.level));
        }
        if let Some(prod) = mul_small(&self.num, &other.num, self.level) {
            return Ok(Self::normalized(self.level, prod, &self.den * &other.den));
        }
        let mut prod = vec![BigInt::zero(); self.num.len() + other.num.len() - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Ok(Self::from_poly(self.level, prod, &self.den * &other.den))
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        Self::normalized(
            self.level,
            self.num.iter().map(|c| c * q.numer()).collect(),
            &self.den * q.denom(),
        )
    }

    /// Image under `zeta -> zeta^unit`.
    pub fn apply(&self, sigma: &GaloisElement) -> Result<Self> {
        if sigma.level() != self.level {
            return Err(Error::LevelMismatch { left: sigma.level(), right: self.level });
        }
        Ok(self.apply_unit(sigma.unit()))
    }

    pub(crate) fn apply_unit(&self, unit: u64) -> Self {
        if unit == 1 || self.level <= 2 {
            return self.clone();
        }
        let n = self.level as usize;
        let mut poly = vec![BigInt::zero(); n];
        for (k, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                poly[(k * unit as usize) % n] += c;
            }
        }
        Self::from_poly(self.level, poly, self.den.clone())
    }

    /// Image in Q(zeta_m) under `zeta_n -> zeta_m^{m/n}`.
    pub fn embed(&self, m: u64) -> Result<Self> {
        if m % self.level != 0 {
            return Err(Error::NonDivisible { divisor: self.level, dividend: m });
        }
        if m == self.level {
            return Ok(self.clone());
        }
        let t = (m / self.level) as usize;
        let mut poly = vec![BigInt::zero(); (self.num.len().max(1) - 1) * t + 1];
        for (k, c) in self.num.iter().enumerate() {
            poly[k * t] = c.clone();
        }
        Ok(Self::from_poly(m, poly, self.den.clone()))
    }

    /// Whether every Galois element that is trivial on Q(zeta_n) fixes `self`.
    pub fn is_fixed_by_kernel(&self, n: u64) -> bool {
        if self.level % n != 0 {
            return false;
        }
        super::unit_group(self.level)
            .iter()
            .filter(|g| g.fixes_subfield(n) && !g.is_identity())
            .all(|g| self.apply_unit(g.unit()) == *self)
    }

    /// Preimage under `embed` from the subfield of conductor `n`, if `self` lies in it.
    pub fn descend(&self, n: u64) -> Option<Self> {
        if self.level % n != 0 {
            return None;
        }
        if n == self.level {
            return Some(self.clone());
        }
        let rows = self.num.len();
        let cols = phi(n) as usize;
        // columns: embedded power basis of the subfield; augmented column: self
        let basis: Vec<CycloElement> =
            (0..cols).map(|k| Self::zeta_pow(n, k as u64).embed(self.level).unwrap()).collect();
        let mut mat: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<BigRational> =
                    basis.iter().map(|b| BigRational::from_integer(b.num[r].clone())).collect();
                row.push(BigRational::new(self.num[r].clone(), self.den.clone()));
                row
            })
            .collect();
        let solution = solve_consistent(&mut mat, cols)?;
        Some(Self::from_rational_coeffs(n, &solution))
    }

    pub fn is_in_subfield(&self, n: u64) -> bool {
        self.descend(n).is_some()
    }

    /// Product of all Galois conjugates, a rational number.
    pub fn norm(&self) -> BigRational {
        let mut acc = Self::one(self.level);
        for g in super::unit_group(self.level) {
            acc = acc.checked_mul(&self.apply_unit(g.unit())).unwrap();
        }
        acc.as_rational().expect("norm lies in Q")
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut cofactor = Self::one(self.level);
        for g in super::unit_group(self.level).iter().filter(|g| !g.is_identity()) {
            cofactor = cofactor.checked_mul(&self.apply_unit(g.unit()))?;
        }
        let norm = self.checked_mul(&cofactor)?.as_rational().expect("norm lies in Q");
        Ok(cofactor.scale(&norm.recip()))
    }

    /// Prime factors of the least positive integer `m` with `m * self` integral in the
    /// power basis.
    pub fn denominator_primes(&self) -> BTreeSet<BigUint> {
        factor_big(self.den.magnitude()).into_iter().collect()
    }

    /// Whether every prime dividing the denominator lies in `primes`.
    pub fn denominator_within(&self, primes: &BTreeSet<u64>) -> bool {
        let mut d = self.den.magnitude().clone();
        for &p in primes {
            let bp = BigUint::from(p);
            while (&d % &bp).is_zero() {
                d /= &bp;
            }
        }
        d.is_one()
    }

    /// Smallest denominator prime outside `primes`, if any.
    pub fn first_denominator_prime_outside(&self, primes: &BTreeSet<u64>) -> Option<BigUint> {
        if self.denominator_within(primes) {
            return None;
        }
        self.denominator_primes()
            .into_iter()
            .find(|p| p.to_u64().map_or(true, |q| !primes.contains(&q)))
    }

    /// Exponent of the rational prime `p` in the common denominator.
    pub fn denominator_valuation(&self, p: u64) -> u32 {
        let bp = BigInt::from(p);
        let mut d = self.den.clone();
        let mut v = 0;
        while (&d % &bp).is_zero() {
            d /= &bp;
            v += 1;
        }
        v
    }

    /// Coefficients as rational strings, for the JSON schemas.
    pub fn to_coeff_strings(&self) -> Vec<String> {
        self.coeffs().iter().map(|c| c.to_string()).collect()
    }

    pub fn from_coeff_strings(level: u64, coeffs: &[String]) -> Result<Self> {
        let expect = phi(level) as usize;
        if coeffs.len() > expect {
            return Err(Error::Schema(format!(
                "{} coefficients for conductor {level} (phi = {expect})",
                coeffs.len()
            )));
        }
        let parsed = coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_rational_coeffs(level, &parsed))
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Gauss-Jordan on an augmented matrix with `cols` unknowns; `None` if inconsistent.
fn solve_consistent(mat: &mut [Vec<BigRational>], cols: usize) -> Option<Vec<BigRational>> {
    let rows = mat.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !mat[i][c].is_zero()) else { continue };
        mat.swap(r, pr);
        let inv = mat[r][c].recip();
        for x in mat[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !mat[i][c].is_zero() {
                let f = mat[i][c].clone();
                let (top, rest) = if i < r {
                    let (a, b) = mat.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = mat.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in rest.iter_mut().zip(top.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if mat[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut sol = vec![BigRational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        sol[c] = mat[i][cols].clone();
    }
    Some(sol)
}

impl fmt::Debug for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycloElement[{}]({self})", self.level)
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (k, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let q = BigRational::new(c.clone(), self.den.clone());
            let mono = match k {
                0 => String::new(),
                1 => "z".to_string(),
                _ => format!("z^{k}"),
            };
            terms.push(match (k, q.is_one(), (-&q).is_one()) {
                (0, _, _) => q.to_string(),
                (_, true, _) => mono,
                (_, _, true) => format!("-{mono}"),
                _ => format!("{q}*{mono}"),
            });
        }
        if terms.is_empty() {
            return f.write_str("0");
        }
        f.write_str(&terms.join(" + ").replace("+ -", "- "))
    }
}

impl PartialOrd for CycloElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Structural total order (level, denominator, numerators); used for canonical sorting.
impl Ord for CycloElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.level
            .cmp(&other.level)
            .then_with(|| self.den.cmp(&other.den))
            .then_with(|| self.num.cmp(&other.num))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::unit_group;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn z(n: u64, k: u64) -> CycloElement {
        CycloElement::zeta_pow(n, k)
    }

    #[test]
    fn embed_examples() {
        assert_eq!(z(5, 1).embed(20).unwrap(), z(20, 4));
        let half = CycloElement::ratio(5, 3, 2);
        assert_eq!(half.embed(20).unwrap(), CycloElement::ratio(20, 3, 2));
        assert_eq!(half.embed(5).unwrap(), half);
        assert!(matches!(half.embed(12), Err(Error::NonDivisible { .. })));
    }

    /// Characteristic polynomial over Q as the product of (x - conjugate), computed by
    /// brute force over the whole unit group.
    fn charpoly(a: &CycloElement) -> Vec<BigRational> {
        let n = a.level();
        let mut poly = vec![CycloElement::one(n)];
        for g in unit_group(n) {
            let root = a.apply(&g).unwrap().neg();
            let mut next = vec![CycloElement::zero(n); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i + 1] = next[i + 1].checked_add(c).unwrap();
                next[i] = next[i].checked_add(&c.checked_mul(&root).unwrap()).unwrap();
            }
            poly = next;
        }
        poly.iter().map(|c| c.as_rational().expect("rational coefficient")).collect()
    }

    fn poly_mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    #[test]
    fn embedding_preserves_minimal_polynomial() {
        // [Q(zeta_20):Q(zeta_5)] = 2, so the level-20 characteristic polynomial of the
        // embedded element is the square of the level-5 one.
        let a = CycloElement::one(5).checked_add(&z(5, 1)).unwrap();
        let lifted = a.embed(20).unwrap();
        assert_eq!(lifted, CycloElement::one(20).checked_add(&z(20, 4)).unwrap());
        let low = charpoly(&a);
        assert_eq!(charpoly(&lifted), poly_mul(&low, &low));
    }

    #[test]
    fn apply_examples() {
        let a = CycloElement::one(5).checked_add(&z(5, 1)).unwrap().checked_add(&z(5, 2)).unwrap();
        let s4 = GaloisElement::new(5, 4).unwrap();
        let expect = CycloElement::one(5).checked_add(&z(5, 4)).unwrap().checked_add(&z(5, 3)).unwrap();
        assert_eq!(a.apply(&s4).unwrap(), expect);
        assert_eq!(z(5, 1).apply(&GaloisElement::new(5, 2).unwrap()).unwrap(), z(5, 2));
        assert_eq!(a.apply(&GaloisElement::identity(5)).unwrap(), a);
        // composition table: apply(st, a) = apply(s, apply(t, a)) for all s, t
        for s in unit_group(5) {
            for t in unit_group(5) {
                let st = s.compose(&t).unwrap();
                assert_eq!(a.apply(&st).unwrap(), a.apply(&t).unwrap().apply(&s).unwrap());
            }
        }
        assert!(matches!(a.apply(&GaloisElement::identity(7)), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn field_op_examples() {
        let zeta = z(5, 1);
        let prod = zeta.checked_mul(&z(5, 4).checked_mul(&zeta).unwrap()).unwrap();
        assert_eq!(prod, zeta);
        let u = CycloElement::one(5).checked_sub(&zeta).unwrap();
        assert!(u.inverse().unwrap().checked_mul(&u).unwrap().is_one());
        let mut norm = CycloElement::one(5);
        for g in unit_group(5) {
            norm = norm.checked_mul(&u.apply(&g).unwrap()).unwrap();
        }
        assert_eq!(norm, CycloElement::from_int(5, 5));
        assert_eq!(u.norm(), BigRational::from_integer(5.into()));
        assert_eq!(CycloElement::zero(7).inverse(), Err(Error::DivisionByZero));
        assert!(matches!(zeta.checked_add(&z(7, 1)), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn inverse_at_larger_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [7u64, 12, 16, 20] {
            let a = CycloElement::random(n, &mut rng, 4, 3);
            if a.is_zero() {
                continue;
            }
            assert!(a.checked_mul(&a.inverse().unwrap()).unwrap().is_one(), "n={n}");
        }
    }

    #[test]
    fn denominator_prime_examples() {
        let set = |v: &[u64]| v.iter().map(|&p| BigUint::from(p)).collect::<BTreeSet<_>>();
        assert_eq!(CycloElement::ratio(5, 3, 2).denominator_primes(), set(&[2]));
        assert_eq!(z(5, 1).denominator_primes(), set(&[]));
        let a = CycloElement::one(5).checked_sub(&z(5, 1)).unwrap().scale(&BigRational::new(1.into(), 11.into()));
        assert_eq!(a.denominator_primes(), set(&[11]));
        assert!(a.denominator_within(&BTreeSet::from([11])));
        assert!(!a.denominator_within(&BTreeSet::from([3])));
        assert_eq!(a.first_denominator_prime_outside(&BTreeSet::from([3])), Some(BigUint::from(11u32)));
    }

    #[test]
    fn canonical_form_is_unique() {
        // zeta^4 = -(1 + zeta + zeta^2 + zeta^3) in Q(zeta_5)
        let direct = z(5, 4);
        let expanded = CycloElement::from_integers(5, &[-1, -1, -1, -1]);
        assert_eq!(direct, expanded);
        let halves = CycloElement::from_poly(5, vec![2.into(), 4.into()], 4.into());
        assert_eq!(halves, CycloElement::from_poly(5, vec![1.into(), 2.into()], 2.into()));
    }

    #[test]
    fn descend_to_subfields() {
        let a = CycloElement::from_integers(5, &[1, 2, 0, -3]);
        let up = a.embed(20).unwrap();
        assert_eq!(up.descend(5), Some(a));
        assert!(up.is_fixed_by_kernel(5));
        assert!(z(20, 1).descend(5).is_none());
        assert!(!z(20, 1).is_fixed_by_kernel(5));
        assert_eq!(z(20, 5).descend(4), Some(z(4, 1)));
        assert_eq!(CycloElement::ratio(20, 1, 3).descend(1), Some(CycloElement::ratio(1, 1, 3)));
    }

    #[test]
    fn display_is_readable() {
        let a = CycloElement::from_poly(5, vec![1.into(), (-1).into(), 0.into(), 3.into()], 2.into());
        assert_eq!(a.to_string(), "1/2 - 1/2*z + 3/2*z^3");
        assert_eq!(CycloElement::zero(3).to_string(), "0");
    }

    #[test]
    fn coefficient_strings_round_trip() {
        let a = CycloElement::from_poly(8, vec![1.into(), (-3).into(), 0.into(), 7.into()], 6.into());
        let s = a.to_coeff_strings();
        assert_eq!(CycloElement::from_coeff_strings(8, &s).unwrap(), a);
        assert!(CycloElement::from_coeff_strings(8, &["1/0".to_string()]).is_err());
    }
}
