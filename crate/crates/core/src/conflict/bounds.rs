use num_bigint::BigUint;
use num_traits::{One, Zero};

/// `C(n, r)`, zero when `r > n`.
pub fn binom(n: &BigUint, r: u64) -> BigUint {
    let r_big = BigUint::from(r);
    if &r_big > n {
        return BigUint::zero();
    }
    let r = if BigUint::from(2u8) * &r_big > *n {
        u64::try_from(n - &r_big).expect("complement fits when r does")
    } else {
        r
    };
    let mut acc = BigUint::one();
    for i in 0..r {
        acc = acc * (n - BigUint::from(i)) / BigUint::from(i + 1);
    }
    acc
}

/// Counting bounds on conflicting choices:
/// `d₁ = C(k,τ)·C(ℓ−τ, k−τ)` and `d₂ = 4·C(k′·d₁, τ′)·C(C(ℓ,k)−τ′, k′−τ′)`,
/// with ill-defined binomials taken as zero.
pub fn bound_d1_d2(k: u64, l: u64, k_prime: u64, tau: u64, tau_prime: u64) -> (BigUint, BigUint) {
    if tau > k || tau > l {
        return (BigUint::zero(), BigUint::zero());
    }
    let d1 = binom(&BigUint::from(k), tau) * binom(&BigUint::from(l - tau), k - tau);
    let members = binom(&BigUint::from(l), k);
    let d2 = if tau_prime > k_prime || BigUint::from(tau_prime) > members {
        BigUint::zero()
    } else {
        BigUint::from(4u8)
            * binom(&(BigUint::from(k_prime) * &d1), tau_prime)
            * binom(&(members - BigUint::from(tau_prime)), k_prime - tau_prime)
    };
    (d1, d2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_binom(n: u64, r: u64) -> u64 {
        if r > n {
            return 0;
        }
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row[r as usize]
    }

    #[test]
    fn binom_matches_pascal() {
        for n in 0..30u64 {
            for r in 0..32u64 {
                assert_eq!(binom(&BigUint::from(n), r), BigUint::from(small_binom(n, r)), "C({n},{r})");
            }
        }
    }

    #[test]
    fn bound_examples() {
        assert_eq!(bound_d1_d2(2, 4, 1, 1, 1), (BigUint::from(6u8), BigUint::from(24u8)));
        assert_eq!(bound_d1_d2(2, 4, 1, 3, 1).0, BigUint::zero());
        assert_eq!(bound_d1_d2(2, 4, 1, 1, 2).1, BigUint::zero());
    }
}
