//! Elementary number theory on machine integers and bigints.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeSet;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Euler's totient.
pub fn phi(n: u64) -> u64 {
    let mut result = n;
    for p in factor_u64(n) {
        result = result / p * (p - 1);
    }
    result
}

/// Multiplicative order of `a` modulo `n`; `a` must be a unit.
pub fn mult_order(a: u64, n: u64) -> u64 {
    if n == 1 {
        return 1;
    }
    let mut order = phi(n);
    for q in factor_u64(order) {
        while order % q == 0 && pow_mod(a, order / q, n) == 1 {
            order /= q;
        }
    }
    order
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

/// Distinct prime factors of `n`, ascending.
pub fn factor_u64(n: u64) -> Vec<u64> {
    let mut out = BTreeSet::new();
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m <= 1 {
            continue;
        }
        if is_prime(m) {
            out.insert(m);
            continue;
        }
        let mut m = m;
        for p in [2u64, 3, 5, 7, 11, 13] {
            if m % p == 0 {
                out.insert(p);
                while m % p == 0 {
                    m /= p;
                }
            }
        }
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            out.insert(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.into_iter().collect()
}

fn big_is_probable_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn big_pollard_brent(n: &BigUint) -> BigUint {
    let one = BigUint::one();
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let (mut x, mut y) = (BigUint::from(2u32), BigUint::from(2u32));
        let mut d = one.clone();
        while d == one {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

/// Distinct prime factors of a bigint, ascending. Trial division and Pollard rho;
/// practical for the denominators that arise from desk-scale computations.
pub fn factor_big(n: &BigUint) -> Vec<BigUint> {
    let mut out = BTreeSet::new();
    let mut stack = vec![n.clone()];
    while let Some(mut m) = stack.pop() {
        if m <= BigUint::one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            out.extend(factor_u64(small).into_iter().map(BigUint::from));
            continue;
        }
        for p in 2u64..1000 {
            let bp = BigUint::from(p);
            if (&m % &bp).is_zero() {
                while (&m % &bp).is_zero() {
                    m /= &bp;
                }
                out.insert(bp);
            }
        }
        if m <= BigUint::one() {
            continue;
        }
        if let Some(small) = m.to_u64() {
            out.extend(factor_u64(small).into_iter().map(BigUint::from));
            continue;
        }
        if big_is_probable_prime(&m) {
            out.insert(m);
            continue;
        }
        let d = big_pollard_brent(&m);
        stack.push(&m / &d);
        stack.push(d);
    }
    out.into_iter().collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n % d == 0).collect();
    let mut big: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&e| e * e != n).collect();
    out.append(&mut big);
    out
}

pub fn mobius(n: u64) -> i8 {
    let mut m = n;
    let mut sign = 1i8;
    for p in factor_u64(n) {
        m /= p;
        if m % p == 0 {
            return 0;
        }
        sign = -sign;
    }
    sign
}

/// Exponent of `p` in `n` (n > 0).
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totient_matches_gcd_scan() {
        for n in 1..300u64 {
            let scan = (1..=n).filter(|&k| gcd(k, n) == 1).count() as u64;
            assert_eq!(phi(n), scan, "phi({n})");
        }
    }

    #[test]
    fn order_matches_brute_force() {
        for n in 2..120u64 {
            for a in (1..n).filter(|&a| gcd(a, n) == 1) {
                let brute = (1..=n).find(|&k| pow_mod(a, k, n) == 1).unwrap();
                assert_eq!(mult_order(a, n), brute);
            }
        }
        assert_eq!(mult_order(2, 5), 4);
        assert_eq!(mult_order(3, 121), 5);
    }

    #[test]
    fn primality_and_factoring() {
        let primes: Vec<u64> = (0..200).filter(|&n| is_prime(n)).collect();
        assert_eq!(&primes[..8], &[2, 3, 5, 7, 11, 13, 17, 19]);
        assert_eq!(factor_u64(360), vec![2, 3, 5]);
        assert_eq!(factor_u64(1_000_000_007 * 998_244_353), vec![998_244_353, 1_000_000_007]);
        let big = BigUint::from(1_000_000_007u64) * BigUint::from(1_000_000_009u64) * 12u32;
        let expect: Vec<BigUint> = [2u64, 3, 1_000_000_007, 1_000_000_009].into_iter().map(BigUint::from).collect();
        assert_eq!(factor_big(&big), expect);
    }

    #[test]
    fn divisors_and_mobius() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(2, 4), None);
    }
}
