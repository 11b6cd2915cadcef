#![allow(dead_code)]

use quiverkit_core::{Arrow, Quiver};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

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

/// Proptest strategy for quivers without frozen vertices.
pub fn arb_quiver(min_n: usize, max_n: usize, max_mult: i64) -> impl proptest::strategy::Strategy<Value = Quiver> {
    use proptest::prelude::*;
    (min_n..=max_n).prop_flat_map(move |n| {
        proptest::collection::vec(-max_mult..=max_mult, n * n.saturating_sub(1) / 2).prop_map(move |ws| {
            let mut arrows = Vec::new();
            let mut it = ws.into_iter();
            for i in 1..=n {
                for j in i + 1..=n {
                    let m = it.next().unwrap();
                    if m > 0 {
                        arrows.push(Arrow::new(i, j, m));
                    } else if m < 0 {
                        arrows.push(Arrow::new(j, i, -m));
                    }
                }
            }
            Quiver::from_arrows(n, 0, arrows).unwrap()
        })
    })
}

/// A quiver together with a mutation sequence on it.
pub fn arb_quiver_and_sequence(
    max_n: usize,
    max_mult: i64,
    max_len: usize,
) -> impl proptest::strategy::Strategy<Value = (Quiver, Vec<usize>)> {
    use proptest::prelude::*;
    arb_quiver(1, max_n, max_mult).prop_flat_map(move |q| {
        let n = q.n_mutable();
        (Just(q), proptest::collection::vec(1..=n, 0..=max_len))
    })
}

/// Signed weight between two 1-based vertices.
pub fn w(q: &Quiver, u: usize, v: usize) -> i64 {
    i64::try_from(q.weight(u, v).unwrap()).unwrap()
}
