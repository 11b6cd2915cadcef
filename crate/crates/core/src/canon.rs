//! Canonical forms of quivers up to relabeling.
//!
//! Mutable and frozen vertices are separate colour classes and are never
//! exchanged. The labeling is found by colour refinement followed by
//! individualisation of each vertex of the first non-singleton cell, keeping
//! the lexicographically smallest adjacency code over all leaves. Without
//! automorphism pruning this is exponential on highly symmetric inputs,
//! which is acceptable for the vertex counts used here.

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::quiver::Quiver;

/// Byte encoding equal for two quivers iff they are isomorphic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm(")?;
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        write!(f, ")")
    }
}

/// A canonical form together with the labeling that produced it.
#[derive(Clone, Debug)]
pub struct Labeling {
    pub form: CanonicalForm,
    /// `position[v]` is the canonical slot of 0-based vertex `v`.
    pub position: Vec<usize>,
}

struct Graph {
    n: usize,
    ranks: Vec<u32>,
    zero: u32,
}

impl Graph {
    fn rank(&self, u: usize, v: usize) -> u32 {
        self.ranks[u * self.n + v]
    }
}

pub fn canonical_labeling(q: &Quiver) -> Labeling {
    let n = q.n_vertices();
    let mut weights: Vec<BigInt> = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            weights.push(if u == v { BigInt::zero() } else { q.weight0(u, v) });
        }
    }
    let mut values: Vec<BigInt> = weights.clone();
    values.push(BigInt::zero());
    values.sort();
    values.dedup();
    let rank_of = |w: &BigInt| values.binary_search(w).unwrap() as u32;
    let ranks: Vec<u32> = weights.iter().map(rank_of).collect();
    let graph = Graph { n, ranks, zero: rank_of(&BigInt::zero()) };

    let colors: Vec<u32> = (0..n).map(|v| u32::from(v >= q.n_mutable())).collect();
    let mut best: Option<(Vec<u32>, Vec<usize>)> = None;
    search(&graph, colors, &mut best);
    let (code, position) = best.unwrap_or_default();

    let mut bytes = Vec::new();
    bytes.extend((q.n_mutable() as u32).to_le_bytes());
    bytes.extend((q.n_frozen() as u32).to_le_bytes());
    bytes.extend((values.len() as u32).to_le_bytes());
    for v in &values {
        let raw = v.to_signed_bytes_le();
        bytes.extend((raw.len() as u32).to_le_bytes());
        bytes.extend(raw);
    }
    for c in code {
        bytes.extend(c.to_le_bytes());
    }
    Labeling { form: CanonicalForm(bytes), position }
}

/// Refines `colors` to the coarsest equitable partition below it.
/// Colours come out dense and ordered by an isomorphism-invariant key.
fn refine(g: &Graph, colors: &mut [u32]) -> usize {
    let n = g.n;
    let mut count = usize::MAX;
    loop {
        let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<(u32, u32)> =
                    (0..n).filter(|&u| u != v && g.rank(v, u) != g.zero).map(|u| (colors[u], g.rank(v, u))).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<(u32, u32)>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        for (v, sig) in sigs.iter().enumerate() {
            colors[v] = distinct.binary_search(&sig).unwrap() as u32;
        }
        if distinct.len() == count {
            return count;
        }
        count = distinct.len();
    }
}

fn search(g: &Graph, mut colors: Vec<u32>, best: &mut Option<(Vec<u32>, Vec<usize>)>) {
    let n = g.n;
    let cells = refine(g, &mut colors);
    if cells == n {
        let position: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
        let mut inv = vec![0usize; n];
        for (v, &p) in position.iter().enumerate() {
            inv[p] = v;
        }
        let mut code = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for p in 0..n {
            for q in p + 1..n {
                code.push(g.rank(inv[p], inv[q]));
            }
        }
        if best.as_ref().is_none_or(|(b, _)| code < *b) {
            *best = Some((code, position));
        }
        return;
    }
    let mut sizes = vec![0usize; cells];
    for &c in &colors {
        sizes[c as usize] += 1;
    }
    let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
    for v in (0..n).filter(|&v| colors[v] == target) {
        let split: Vec<u32> = (0..n).map(|x| 2 * colors[x] + u32::from(colors[x] == target && x != v)).collect();
        search(g, split, best);
    }
}

/// A vertex bijection `a -> b` (0-based, mutable to mutable, frozen to
/// frozen) carrying `a` onto `b`, if one exists.
pub fn isomorphism(a: &Quiver, b: &Quiver) -> Option<Vec<usize>> {
    let la = canonical_labeling(a);
    let lb = canonical_labeling(b);
    if la.form != lb.form {
        return None;
    }
    let mut inv_b = vec![0usize; lb.position.len()];
    for (v, &p) in lb.position.iter().enumerate() {
        inv_b[p] = v;
    }
    Some(la.position.iter().map(|&p| inv_b[p]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::Framing;

    fn q(text: &str) -> Quiver {
        Quiver::parse(text).unwrap()
    }

    #[test]
    fn relabeled_a2_matches() {
        let a = q("vertices: 2 0\narrow: 1 2");
        let b = q("vertices: 2 0\narrow: 2 1");
        assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn cycle_differs_from_path() {
        let c3 = q("vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1");
        let p3 = q("vertices: 3 0\narrow: 1 2\narrow: 2 3");
        assert_ne!(c3.canonical_form(), p3.canonical_form());
    }

    #[test]
    fn markov_is_fixed_by_mutation() {
        let m = q("vertices: 3 0\narrow: 1 2 2\narrow: 2 3 2\narrow: 3 1 2");
        assert_eq!(m.canonical_form(), m.mutate(1).unwrap().canonical_form());
    }

    #[test]
    fn frozen_never_swapped_with_mutable() {
        // 1 -> 2 with 2 frozen versus 2 -> 1 with 2 frozen.
        let a = q("vertices: 1 1\narrow: 1 2");
        let b = q("vertices: 1 1\narrow: 2 1");
        assert_ne!(a.canonical_form(), b.canonical_form());
        let c = q("vertices: 2 0\narrow: 1 2");
        assert_ne!(a.canonical_form(), c.canonical_form());
    }

    #[test]
    fn multiplicity_is_part_of_the_form() {
        let a = q("vertices: 2 0\narrow: 1 2");
        let b = q("vertices: 2 0\narrow: 1 2 2");
        assert_ne!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn isomorphism_maps_arrows() {
        let a = q("vertices: 3 0\narrow: 1 2\narrow: 2 3 2");
        let b = q("vertices: 3 0\narrow: 3 1\narrow: 1 2 2");
        let iso = isomorphism(&a, &b).unwrap();
        for u in 0..3 {
            for v in 0..3 {
                if u != v {
                    assert_eq!(a.weight0(u, v), b.weight0(iso[u], iso[v]));
                }
            }
        }
        let framed = a.frame(Framing::Framed).unwrap();
        assert!(isomorphism(&framed, &a).is_none());
    }
}
