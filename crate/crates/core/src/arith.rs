// SPDX-License-Identifier: Apache-2.0

//! Integer helpers: base-`p` digits, exact and Lucas binomials.

use num_bigint::BigInt;
use num_traits::{One, Zero};

/// Base-`p` digits of `n`, least significant first, padded to `len`.
/// Higher digits beyond `len` are kept (the vector grows as needed).
pub fn base_digits(mut n: u64, p: u64, len: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(len);
    while n > 0 || out.len() < len {
        out.push(n % p);
        n /= p;
    }
    out
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn small_binomial_mod(n: u64, k: u64, p: u64) -> u64 {
    if k > n {
        return 0;
    }
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..k {
        num = num * ((n - i) % p) % p;
        den = den * ((i + 1) % p) % p;
    }
    num * crate::fields::mod_inv(den, p) % p
}

/// `C(n, k) mod p` by Lucas' theorem.
pub fn binomial_mod_p(mut n: u64, mut k: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (ni, ki) = (n % p, k % p);
        if ki > ni {
            return 0;
        }
        acc = acc * small_binomial_mod(ni, ki, p) % p;
        n /= p;
        k /= p;
    }
    acc
}
