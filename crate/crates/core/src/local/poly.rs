//! Dense polynomials over Z/mZ, little-endian coefficient vectors.

use crate::arith::{inv_mod, mul_mod};
use num_bigint::BigUint;
use rand::Rng;

pub(crate) type Poly = Vec<u64>;

pub(crate) fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

pub(crate) fn reduce(a: &[u64], m: u64) -> Poly {
    trim(a.iter().map(|&c| c % m).collect())
}

pub(crate) fn add(a: &[u64], b: &[u64], m: u64) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0) as u128 + b.get(i).copied().unwrap_or(0) as u128;
        *slot = (x % m as u128) as u64;
    }
    trim(out)
}

pub(crate) fn sub(a: &[u64], b: &[u64], m: u64) -> Poly {
    let mut out = vec![0; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0) % m;
        let y = b.get(i).copied().unwrap_or(0) % m;
        *slot = if x >= y { x - y } else { m - (y - x) };
    }
    trim(out)
}

pub(crate) fn scale(a: &[u64], c: u64, m: u64) -> Poly {
    trim(a.iter().map(|&x| mul_mod(x, c, m)).collect())
}

pub(crate) fn mul(a: &[u64], b: &[u64], m: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            let t = mul_mod(x, y, m) as u128 + out[i + j] as u128;
            out[i + j] = (t % m as u128) as u64;
        }
    }
    trim(out)
}

/// Quotient and remainder by a monic polynomial.
pub(crate) fn divrem_monic(a: &[u64], f: &[u64], m: u64) -> (Poly, Poly) {
    let df = degree(f).expect("nonzero divisor");
    debug_assert_eq!(f[df] % m, 1 % m);
    let mut r: Poly = a.iter().map(|&c| c % m).collect();
    if r.len() <= df {
        return (Vec::new(), trim(r));
    }
    let mut q = vec![0u64; r.len() - df];
    for i in (df..r.len()).rev() {
        let c = r[i];
        if c == 0 {
            continue;
        }
        q[i - df] = c;
        for (j, &fj) in f[..df].iter().enumerate() {
            let t = mul_mod(c, fj, m);
            let slot = &mut r[i - df + j];
            *slot = if *slot >= t { *slot - t } else { m - (t - *slot) };
        }
        r[i] = 0;
    }
    r.truncate(df);
    (trim(q), trim(r))
}

pub(crate) fn rem_monic(a: &[u64], f: &[u64], m: u64) -> Poly {
    divrem_monic(a, f, m).1
}

pub(crate) fn mulmod(a: &[u64], b: &[u64], f: &[u64], m: u64) -> Poly {
    rem_monic(&mul(a, b, m), f, m)
}

pub(crate) fn powmod(a: &[u64], e: &BigUint, f: &[u64], m: u64) -> Poly {
    let mut acc = rem_monic(&[1], f, m);
    let base = rem_monic(a, f, m);
    for i in (0..e.bits()).rev() {
        acc = mulmod(&acc, &acc, f, m);
        if e.bit(i) {
            acc = mulmod(&acc, &base, f, m);
        }
    }
    acc
}

/// `a(x^k) mod f`.
pub(crate) fn compose_power(a: &[u64], k: u64, f: &[u64], m: u64) -> Poly {
    let xk = powmod(&[0, 1], &BigUint::from(k), f, m);
    let mut acc: Poly = Vec::new();
    for &c in a.iter().rev() {
        acc = add(&mulmod(&acc, &xk, f, m), &[c], m);
    }
    acc
}

// Field operations modulo a prime p.

pub(crate) fn monic(a: &[u64], p: u64) -> Poly {
    let a = reduce(a, p);
    match a.last() {
        None => a,
        Some(&lead) => scale(&a, inv_mod(lead, p).unwrap(), p),
    }
}

pub(crate) fn divrem_field(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    let b = reduce(b, p);
    let lead = *b.last().expect("nonzero divisor");
    let inv = inv_mod(lead, p).unwrap();
    let (q, r) = divrem_monic(a, &scale(&b, inv, p), p);
    (scale(&q, inv, p), r)
}

pub(crate) fn gcd_field(a: &[u64], b: &[u64], p: u64) -> Poly {
    let (mut x, mut y) = (reduce(a, p), reduce(b, p));
    while !y.is_empty() {
        let r = divrem_field(&x, &y, p).1;
        x = y;
        y = r;
    }
    monic(&x, p)
}

/// `(g, s, t)` with `s·a + t·b = g` monic.
pub(crate) fn ext_gcd_field(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (reduce(a, p), reduce(b, p));
    let (mut s0, mut s1): (Poly, Poly) = (vec![1], Vec::new());
    let (mut t0, mut t1): (Poly, Poly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = divrem_field(&r0, &r1, p);
        let s = sub(&s0, &mul(&q, &s1, p), p);
        let t = sub(&t0, &mul(&q, &t1, p), p);
        (r0, r1) = (r1, r);
        (s0, s1) = (s1, s);
        (t0, t1) = (t1, t);
    }
    let lead = *r0.last().expect("gcd of zero polynomials");
    let inv = inv_mod(lead, p).unwrap();
    (scale(&r0, inv, p), scale(&s0, inv, p), scale(&t0, inv, p))
}

/// Distinct-degree factorization of a squarefree monic polynomial over F_p:
/// pairs `(d, product of all irreducible factors of degree d)`.
pub(crate) fn distinct_degree(f: &[u64], p: u64) -> Vec<(usize, Poly)> {
    let mut out = Vec::new();
    let mut g = monic(f, p);
    let mut h: Poly = vec![0, 1];
    let pb = BigUint::from(p);
    let mut i = 0;
    while degree(&g).unwrap_or(0) >= 2 * (i + 1) {
        i += 1;
        h = powmod(&h, &pb, &g, p);
        let d = gcd_field(&g, &sub(&h, &[0, 1], p), p);
        if degree(&d).unwrap_or(0) > 0 {
            g = divrem_field(&g, &d, p).0;
            h = rem_monic(&h, &g, p);
            out.push((i, d));
        }
    }
    if let Some(dg) = degree(&g) {
        if dg > 0 {
            out.push((dg, g));
        }
    }
    out
}

/// Equal-degree splitting (Cantor-Zassenhaus) of a product of distinct monic
/// irreducibles of degree `d` over F_p.
pub(crate) fn equal_degree<R: Rng>(g: &[u64], d: usize, p: u64, rng: &mut R) -> Vec<Poly> {
    let n = degree(g).unwrap_or(0);
    if n <= d {
        return vec![monic(g, p)];
    }
    let half = (BigUint::from(p).pow(d as u32) - 1u32) / 2u32;
    loop {
        let a: Poly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if degree(&a).unwrap_or(0) == 0 {
            continue;
        }
        let t = if p == 2 {
            let mut acc = a.clone();
            let mut term = a.clone();
            for _ in 1..d {
                term = mulmod(&term, &term, g, p);
                acc = add(&acc, &term, p);
            }
            acc
        } else {
            sub(&powmod(&a, &half, g, p), &[1], p)
        };
        let c = gcd_field(g, &t, p);
        let dc = degree(&c).unwrap_or(0);
        if dc > 0 && dc < n {
            let other = divrem_field(g, &c, p).0;
            let mut out = equal_degree(&c, d, p, rng);
            out.extend(equal_degree(&other, d, p, rng));
            return out;
        }
    }
}

/// Lifts `f ≡ g·h (mod p)` to `f ≡ G·H (mod p^k)` with `G ≡ g`, `H ≡ h` and `G` monic.
/// `f` is monic with coefficients reduced mod `p^k`; `g`, `h` are coprime mod `p`.
pub(crate) fn hensel_pair(f: &[u64], g: &[u64], h: &[u64], p: u64, k: u32) -> (Poly, Poly) {
    let (one, s, t) = ext_gcd_field(g, h, p);
    debug_assert_eq!(one, vec![1]);
    let (g0, h0) = (g.to_vec(), h.to_vec());
    let (mut big_g, mut big_h) = (g.to_vec(), h.to_vec());
    let mut pk = p;
    for _ in 1..k {
        let next = pk * p;
        let err = sub(&reduce(f, next), &mul(&big_g, &big_h, next), next);
        let e: Poly = trim(err.iter().map(|&c| (c / pk) % p).collect());
        let (q, dg) = divrem_field(&mul(&t, &e, p), &g0, p);
        let dh = add(&mul(&s, &e, p), &mul(&q, &h0, p), p);
        big_g = add(&big_g, &scale(&dg, pk, next), next);
        big_h = add(&big_h, &scale(&dh, pk, next), next);
        pk = next;
    }
    (big_g, big_h)
}

/// Number of irreducible factors of a squarefree polynomial over F_p, as the nullity
/// of `Q - I` for the Berlekamp matrix `Q`.
pub(crate) fn berlekamp_factor_count(f: &[u64], p: u64) -> usize {
    let f = monic(f, p);
    let d = degree(&f).unwrap_or(0);
    if d == 0 {
        return 0;
    }
    let xp = powmod(&[0, 1], &BigUint::from(p), &f, p);
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity(d);
    let mut cur: Poly = vec![1];
    for i in 0..d {
        let mut row = vec![0u64; d];
        for (j, &c) in cur.iter().enumerate() {
            row[j] = c;
        }
        row[i] = (row[i] + p - 1) % p;
        rows.push(row);
        cur = mulmod(&cur, &xp, &f, p);
    }
    d - rank_mod_p(rows, p)
}

fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = inv_mod(rows[rank][col], p).unwrap();
        for c in col..cols {
            rows[rank][c] = mul_mod(rows[rank][c], inv, p);
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col] == 0 {
                continue;
            }
            let factor = row[col];
            for c in col..cols {
                let t = mul_mod(factor, pivot_row[c], p);
                row[c] = if row[c] >= t { row[c] - t } else { p - (t - row[c]) };
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn eval(a: &[u64], x: u64, m: u64) -> u64 {
        a.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, m) + c) % m)
    }

    #[test]
    fn division_identity() {
        let m = 81;
        let a = vec![5, 7, 0, 3, 80, 1];
        let f = vec![2, 0, 1];
        let (q, r) = divrem_monic(&a, &f, m);
        assert_eq!(add(&mul(&q, &f, m), &r, m), reduce(&a, m));
        assert!(degree(&r).map_or(true, |d| d < 2));
    }

    #[test]
    fn ext_gcd_bezout() {
        let p = 7;
        let a = vec![1, 2, 3, 1];
        let b = vec![6, 0, 1];
        let (g, s, t) = ext_gcd_field(&a, &b, p);
        assert_eq!(add(&mul(&s, &a, p), &mul(&t, &b, p), p), g);
    }

    #[test]
    fn splitting_x_pow_minus_one() {
        // x^4 - 1 over F_5 splits into four linear factors with roots 1..4
        let f = vec![4, 0, 0, 0, 1];
        let ddf = distinct_degree(&f, 5);
        assert_eq!(ddf.len(), 1);
        assert_eq!(ddf[0].0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let factors = equal_degree(&ddf[0].1, 1, 5, &mut rng);
        let mut roots: Vec<u64> = factors.iter().map(|h| (5 - h[0]) % 5).collect();
        roots.sort();
        assert_eq!(roots, vec![1, 2, 3, 4]);
        for r in roots {
            assert_eq!(eval(&f, r, 5), 0);
        }
        assert_eq!(berlekamp_factor_count(&f, 5), 4);
    }

    #[test]
    fn hensel_lift_is_congruent() {
        // x^2 + 1 = (x - 2)(x - 3) mod 5, lifted to 5^6
        let m = 5u64.pow(6);
        let f = vec![1, 0, 1];
        let (g, h) = hensel_pair(&f, &[3, 1], &[2, 1], 5, 6);
        assert_eq!(mul(&g, &h, m), f);
        let root = (m - g[0]) % m;
        assert_eq!(eval(&f, root, m), 0);
    }
}
