//! Word-size prime field helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % p as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        p - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Inverse modulo a prime; `None` for zero.
pub fn inv_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        None
    } else {
        Some(pow_mod(a, p - 2, p))
    }
}

pub fn int_mod(n: &BigInt, p: u64) -> u64 {
    let r = n.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

pub fn i64_mod(n: i64, p: u64) -> u64 {
    (n as i128).rem_euclid(p as i128) as u64
}

/// Image of a rational number; `None` when the denominator is divisible by `p`.
pub fn rational_mod(q: &BigRational, p: u64) -> Option<u64> {
    let num = int_mod(q.numer(), p);
    let den = int_mod(q.denom(), p);
    inv_mod(den, p).map(|d| mul_mod(num, d, p))
}

/// Symmetric representative in `(-p/2, p/2]`, used only for display.
pub fn signed_repr(a: u64, p: u64) -> i128 {
    if a > p / 2 {
        a as i128 - p as i128
    } else {
        a as i128
    }
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// The `index`-th largest prime below `2^62` (index 0 is the largest).
pub fn prime_below_2_62(index: usize) -> u64 {
    let mut found = 0;
    let mut n = (1u64 << 62) - 1;
    loop {
        if is_prime(n) {
            if found == index {
                return n;
            }
            found += 1;
        }
        n -= 2;
    }
}
