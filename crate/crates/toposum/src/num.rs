//! Exact scalar types: arbitrary-precision integers and rationals.
//!
//! `Int` and `Rat` are the exact backbone of the crate; every identity that
//! claims a residual of exactly zero is computed in these types. `Rat` is
//! always kept in lowest terms with a positive denominator (num-rational
//! maintains both on construction).

use num_bigint::BigInt;
use num_rational::BigRational;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Shorthand for a small integer literal as an `Int`.
pub fn int(n: i64) -> Int {
    Int::from(n)
}

/// Shorthand for a small rational literal as a `Rat`.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(Int::from(num), Int::from(den))
}

/// `a/b` as an exact rational from `Int` operands.
pub fn ratio(num: &Int, den: &Int) -> Rat {
    Rat::new(num.clone(), den.clone())
}

/// Prime factorization of `n >= 1` by trial division, as ascending
/// `(prime, exponent)` pairs. Fine for the modulus-sized inputs used here;
/// not meant for cryptographic-scale integers.
pub fn trial_factor(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factoring needs a positive integer");
    let mut n = n;
    let mut out = Vec::new();
    let mut p: u64 = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// All divisors of `n >= 1`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1];
    for (p, e) in trial_factor(n) {
        let base = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(base.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// The Moebius function: 0 on a square factor, otherwise the parity of the
/// number of prime factors.
pub fn moebius(n: u64) -> i64 {
    let factors = trial_factor(n);
    if factors.iter().any(|&(_, e)| e > 1) {
        0
    } else if factors.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Euler's totient: the count of residues prime to `n`.
pub fn euler_phi(n: u64) -> u64 {
    let mut phi = n;
    for (p, _) in trial_factor(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn rat_is_normalized() {
        let r = rat(4, -6);
        assert_eq!(r, rat(-2, 3));
        assert!(r.denom() > &Int::zero());
    }

    #[test]
    fn factorization_helpers() {
        assert_eq!(trial_factor(1), vec![]);
        assert_eq!(trial_factor(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(trial_factor(97), vec![(97, 1)]);
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        let mu: Vec<i64> = (1..=12).map(moebius).collect();
        assert_eq!(mu, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
        let phi: Vec<u64> = (1..=10).map(euler_phi).collect();
        assert_eq!(phi, vec![1, 1, 2, 2, 4, 2, 6, 4, 6, 4]);
        for n in 1..=60u64 {
            assert_eq!(divisors(n).iter().map(|&d| euler_phi(d)).sum::<u64>(), n);
        }
    }
}
