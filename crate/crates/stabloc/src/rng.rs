//! Seeded randomness for measurement outcomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Where a random measurement outcome comes from. `Forced` is only consulted
/// when quantum mechanics leaves the outcome undetermined.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Outcome bit m; eigenvalue (−1)^m.
    Forced(bool),
    Seeded(u64),
}

impl Outcome {
    pub fn draw(&self) -> bool {
        match *self {
            Outcome::Forced(m) => m,
            Outcome::Seeded(seed) => rng(seed).gen(),
        }
    }

    /// Source for the `index`-th measurement of a sequence.
    pub fn nth(&self, index: u64) -> Outcome {
        match *self {
            Outcome::Forced(m) => Outcome::Forced(m),
            Outcome::Seeded(seed) => Outcome::Seeded(derive_seed(seed, index)),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent sub-seed for call `index` under `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut r = rng(seed);
    r.set_stream(index);
    r.gen()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        assert_eq!(Outcome::Seeded(7).draw(), Outcome::Seeded(7).draw());
        assert_eq!(derive_seed(3, 4), derive_seed(3, 4));
        assert_ne!(derive_seed(3, 4), derive_seed(3, 5));
        assert!(Outcome::Forced(true).nth(9).draw());
    }
}
