#![allow(dead_code)]

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use switched_lss::{HybridWord, ModeWord};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn word(s: &str) -> ModeWord {
    s.parse().unwrap()
}

/// Random hybrid word of the given length with inputs uniform in [-1, 1].
pub fn random_hybrid(rng: &mut ChaCha8Rng, modes: usize, m: usize, len: usize) -> HybridWord {
    use rand::Rng;
    let letters = (0..len).map(|_| rng.gen_range(1..=modes)).collect();
    let inputs = (0..len)
        .map(|_| DVector::from_fn(m, |_, _| rng.gen_range(-1.0..1.0)))
        .collect();
    HybridWord::new(ModeWord::new(letters).unwrap(), inputs).unwrap()
}
