#![allow(dead_code)]

use std::path::PathBuf;

use quiverkit_core::{Arrow, Quiver};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn load(name: &str) -> Quiver {
    Quiver::parse(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

/// Runs the tool in-process on `args` (without the program name).
pub fn cli(args: &[&str]) -> quiverkit::Outcome {
    quiverkit::run(std::iter::once("quiverkit").chain(args.iter().copied()))
}

/// Uniform random quiver: each unordered pair gets a signed multiplicity in
/// `-max_mult..=max_mult`.
pub fn random_quiver(rng: &mut ChaCha8Rng, n: usize, max_mult: i64) -> Quiver {
    let mut arrows = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            let m: i64 = rng.gen_range(-max_mult..=max_mult);
            if m > 0 {
                arrows.push(Arrow::new(i, j, m));
            } else if m < 0 {
                arrows.push(Arrow::new(j, i, -m));
            }
        }
    }
    Quiver::from_arrows(n, 0, arrows).unwrap()
}

pub fn random_sequence(rng: &mut ChaCha8Rng, n: usize, max_len: usize) -> Vec<usize> {
    let len = rng.gen_range(0..=max_len);
    (0..len).map(|_| rng.gen_range(1..=n)).collect()
}
