//! Small-prime helpers. Primes here are desk-scale and fit in a `u64`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn require_prime(p: u64) -> Result<u64> {
    if is_prime(p) {
        Ok(p)
    } else {
        Err(Error::NotPrime(p))
    }
}

pub fn primes_up_to(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// Primes in increasing order, skipping the excluded set.
pub fn primes_avoiding(excluded: &BTreeSet<u64>) -> impl Iterator<Item = u64> + '_ {
    (2u64..).filter(|&n| is_prime(n) && !excluded.contains(&n))
}
