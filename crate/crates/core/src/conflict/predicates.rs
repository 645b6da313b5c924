use crate::graph::Color;

/// Number of colors of the sorted set `c` within distance `g` of `x`.
pub fn mu_g(x: Color, c: &[Color], g: u64) -> u64 {
    debug_assert!(c.windows(2).all(|w| w[0] < w[1]));
    let lo = c.partition_point(|&y| y < x.saturating_sub(g));
    let hi = c.partition_point(|&y| y <= x.saturating_add(g));
    (hi - lo) as u64
}

/// `Σ_{x∈a} μ_g(x, b)` for sorted sets, by a sliding window.
pub fn proximity_count(a: &[Color], b: &[Color], g: u64) -> u64 {
    let (mut lo, mut hi) = (0, 0);
    let mut total = 0;
    for &x in a {
        while lo < b.len() && b[lo] < x.saturating_sub(g) {
            lo += 1;
        }
        hi = hi.max(lo);
        while hi < b.len() && b[hi] <= x.saturating_add(g) {
            hi += 1;
        }
        total += (hi - lo) as u64;
    }
    total
}

/// Whether two sorted candidate sets conflict: `Σ_{x∈a} μ_g(x, b) ≥ τ`.
pub fn tau_g_conflict(a: &[Color], b: &[Color], tau: u64, g: u64) -> bool {
    let s = proximity_count(a, b, g);
    debug_assert_eq!(s, proximity_count(b, a, g), "proximity count must be symmetric");
    s >= tau
}

/// Whether at least `τ′` members of `k1` conflict with some member of `k2`.
pub fn psi_g_member(k1: &[Vec<Color>], k2: &[Vec<Color>], tau_prime: u64, tau: u64, g: u64) -> bool {
    let hits = k1.iter().filter(|c| k2.iter().any(|c2| tau_g_conflict(c, c2, tau, g))).count();
    hits as u64 >= tau_prime
}

/// The residue `a` modulo `2g+1` holding the most colors of `l` (smallest
/// on ties) and the colors of `l` in that residue class.
pub fn residue_restrict(l: &[Color], g: u64) -> (u64, Vec<Color>) {
    let modulus = 2 * g + 1;
    let mut counts = vec![0usize; modulus as usize];
    for &x in l {
        counts[(x % modulus) as usize] += 1;
    }
    let best = (0..modulus as usize).max_by_key(|&a| (counts[a], std::cmp::Reverse(a))).unwrap_or(0) as u64;
    (best, l.iter().copied().filter(|&x| x % modulus == best).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn mu_counts_window() {
        assert_eq!(mu_g(5, &[1, 4, 7, 10], 2), 2);
        assert_eq!(mu_g(4, &[1, 4, 7], 0), 1);
        assert_eq!(mu_g(5, &[1, 4, 7], 0), 0);
        assert_eq!(mu_g(3, &[], 4), 0);
        assert_eq!(mu_g(0, &[0, 1, 2], 1), 2);
    }

    #[test]
    fn conflict_examples() {
        assert!(tau_g_conflict(&[1, 4], &[2, 8], 1, 1));
        assert!(!tau_g_conflict(&[1, 2], &[50, 60], 1, 3));
        assert!(tau_g_conflict(&[3, 6, 9], &[3, 6, 9], 3, 0));
    }

    #[test]
    fn family_conflict_examples() {
        let k1 = vec![vec![1, 2], vec![3, 4]];
        let k2 = vec![vec![1, 5], vec![2, 6]];
        assert!(!psi_g_member(&k1, &k2, 2, 1, 0));
        assert!(psi_g_member(&k1, &k2, 1, 1, 0));
        assert!(!psi_g_member(&k1, &[], 1, 1, 0));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue_restrict(&[3, 5, 8, 10, 13], 1), (1, vec![10, 13]));
        assert_eq!(residue_restrict(&[3, 5, 8], 0), (0, vec![3, 5, 8]));
        assert_eq!(residue_restrict(&[7], 2), (2, vec![7]));
    }

    fn sorted_set() -> impl Strategy<Value = Vec<Color>> {
        proptest::collection::btree_set(0u64..40, 0..8).prop_map(|s| s.into_iter().collect())
    }

    proptest! {
        #[test]
        fn proximity_is_symmetric_and_matches_mu(a in sorted_set(), b in sorted_set(), g in 0u64..4) {
            let direct: u64 = a.iter().map(|&x| mu_g(x, &b, g)).sum();
            prop_assert_eq!(proximity_count(&a, &b, g), direct);
            prop_assert_eq!(proximity_count(&b, &a, g), direct);
        }

        #[test]
        fn zero_radius_within_a_residue_class_is_intersection(a in sorted_set(), b in sorted_set(), tau in 1u64..4) {
            let common = a.iter().filter(|x| b.contains(x)).count() as u64;
            prop_assert_eq!(tau_g_conflict(&a, &b, tau, 0), common >= tau);
        }

        #[test]
        fn restriction_keeps_a_largest_class(l in sorted_set(), g in 0u64..3) {
            let (a, r) = residue_restrict(&l, g);
            prop_assert!(r.len() * (2 * g as usize + 1) >= l.len());
            prop_assert!(r.iter().all(|x| x % (2 * g + 1) == a));
        }
    }
}
