//! Deterministic seed derivation.
//!
//! Every replicated task (trial t of an experiment, instance i of a
//! verification sweep) gets its own ChaCha stream seeded with
//! `derive(master, index)`. The derivation is one splitmix64 step of
//! `master + (index + 1) * GOLDEN`, which decorrelates nearby indices and
//! keeps results independent of execution order.

const GOLDEN: u64 = 0x9E3779B97F4A7C15;

/// Maps `(master, index)` to a stream seed. Pure and stable across
/// platforms; changing it invalidates recorded experiment outputs.
pub fn derive(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_indices_give_distinct_seeds() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..10_000 {
            assert!(seen.insert(derive(42, i)));
        }
    }

    #[test]
    fn frozen_values() {
        // Guards against accidental changes to the mixing constants.
        assert_eq!(derive(0, 0), 0xE220A8397B1DCDAF);
        assert_eq!(derive(42, 7), derive(42, 7));
        assert_ne!(derive(42, 7), derive(43, 7));
        assert_ne!(derive(42, 7), derive(42, 8));
    }
}
