//! Canonical bit costs of message fields. A message's size is the sum of
//! its fields' costs.

/// `⌈log₂ x⌉` for `x ≥ 1`; 0 for `x ≤ 1`.
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}

/// A single color out of a space of `space` colors.
pub fn color(space: u64) -> u64 {
    ceil_log2(space).max(1)
}

/// A list of `len` colors: bitmask or enumeration, whichever is shorter.
pub fn color_list(len: usize, space: u64) -> u64 {
    space.min(len as u64 * color(space))
}

/// A power-of-two defect (sent as its exponent) for out-degrees up to `beta`.
pub fn pow2_defect(beta: u64) -> u64 {
    ceil_log2(ceil_log2(beta)) + 1
}

/// An index into a family of `k_prime` candidate sets.
pub fn table_index(k_prime: u64) -> u64 {
    ceil_log2(k_prime).max(1)
}

/// An initial color out of `m`.
pub fn init_color(m: u64) -> u64 {
    ceil_log2(m).max(1)
}
