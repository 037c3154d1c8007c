use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigUint {
    if k < 0 || k as u64 > n {
        return BigUint::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Signed variant accepting negative `n` (treated as zero).
pub fn binomial_i(n: i64, k: i64) -> BigInt {
    if n < 0 {
        return BigInt::zero();
    }
    BigInt::from(binomial(n as u64, k))
}

/// `C(n, k)` as `u128` if it fits.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) is always integral.
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(5, 6), BigUint::zero());
        assert_eq!(binomial(5, -1), BigUint::zero());
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial_u128(14, 7), Some(3432));
        assert_eq!(binomial_u128(254, 30), binomial(254, 30).try_into().ok());
    }

    #[test]
    fn pascal_rule() {
        for n in 1..40u64 {
            for k in 1..n as i64 {
                assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
            }
        }
    }
}
