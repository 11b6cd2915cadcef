//! Verified reddening sequences built from Banff certificates and class-P
//! construction trees.
//!
//! Every candidate is run through [`verify_reddening`] before it is used;
//! when a rule's candidate fails, a bounded reddening search takes over.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quiver::{MutationSequence, Quiver};
use crate::search::{SearchLimits, TriState};
use crate::sequence::{acyclic_mgs, search_reddening, verify_reddening, Verdict};
use crate::structure::{
    certify_banff, descendant_split, is_triangular_split, validate_banff, verify_class_p_tree, BanffCertificate,
    ClassPTree, Direction,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcatOrder {
    /// Sequence for the source side first.
    SourceFirst,
    Reversed,
}

/// One rule application in a synthesis, in the order applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum DerivationStep {
    Leaf { sequence: MutationSequence },
    AcyclicMgs { sequence: MutationSequence },
    Concat { order: ConcatOrder, sequence: MutationSequence },
    Conjugate { vertex: usize, trailing: usize, sequence: MutationSequence },
    FallbackSearch { max_depth: usize, sequence: MutationSequence },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthesisResult {
    pub sequence: MutationSequence,
    pub verdict: Verdict,
    pub derivation: Vec<DerivationStep>,
}

fn reindex(r: &MutationSequence, vertices: &[usize]) -> MutationSequence {
    MutationSequence(r.iter().map(|&v| vertices[v - 1]).collect())
}

/// Concatenates `ra` (for `Q|A`) and `rb` (for `Q|B`) in `Q`'s numbering.
/// The split must have every cross arrow directed `A -> B`. The result is
/// only a candidate; see [`Synthesizer`] for the verified form.
pub fn concat_rule(
    q: &Quiver,
    a: &[usize],
    b: &[usize],
    ra: &MutationSequence,
    rb: &MutationSequence,
) -> Result<MutationSequence> {
    if !is_triangular_split(q, a, b) {
        return Err(Error::InvalidSplit(format!("{a:?} / {b:?} is not a triangular split")));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    for (r, side) in [(ra, &a), (rb, &b)] {
        if let Some(&v) = r.iter().find(|&&v| v == 0 || v > side.len()) {
            return Err(Error::VertexOutOfRange { vertex: v, count: side.len() });
        }
    }
    let mut out = reindex(ra, &a);
    out.0.extend(reindex(rb, &b).0);
    Ok(out)
}

/// Candidate `(k, r', t)` for `Q` from a verified reddening sequence `r'`
/// of `mutate(Q, k)`, where `t` is the final vertex carrying the frozen
/// arrow of `k'` in `r'`'s verdict.
pub fn conjugate_rule(q: &Quiver, k: usize, r_prime: &MutationSequence) -> Result<MutationSequence> {
    Ok(conjugate_candidates(q, k, r_prime)?.remove(0))
}

fn conjugate_candidates(q: &Quiver, k: usize, r_prime: &MutationSequence) -> Result<Vec<MutationSequence>> {
    let mutated = q.mutate(k)?;
    let verdict = verify_reddening(&mutated, r_prime)?;
    let sigma = match (verdict.ok, verdict.permutation) {
        (true, Some(s)) => s,
        _ => {
            return Err(Error::SynthesisFailed(format!(
                "{r_prime} is not a verified reddening sequence of the quiver mutated at {k}"
            )))
        }
    };
    let inverse = sigma.iter().position(|&s| s == k).unwrap() + 1;
    let mut trailing = vec![inverse];
    if sigma[k - 1] != inverse {
        trailing.push(sigma[k - 1]);
    }
    Ok(trailing
        .into_iter()
        .map(|t| {
            let mut s = vec![k];
            s.extend(r_prime.iter());
            s.push(t);
            MutationSequence(s)
        })
        .collect())
}

/// Applies the synthesis rules, recording each step.
pub struct Synthesizer {
    limits: SearchLimits,
    derivation: Vec<DerivationStep>,
}

impl Synthesizer {
    pub fn new(limits: SearchLimits) -> Self {
        Synthesizer { limits, derivation: Vec::new() }
    }

    pub fn derivation(&self) -> &[DerivationStep] {
        &self.derivation
    }

    fn fallback(&mut self, q: &Quiver, max_depth: usize, context: &str) -> Result<MutationSequence> {
        match search_reddening(q, &self.limits.with_depth(max_depth.max(1)))? {
            TriState::Yes(w) => {
                self.derivation.push(DerivationStep::FallbackSearch { max_depth, sequence: w.sequence.clone() });
                Ok(w.sequence)
            }
            other => Err(Error::SynthesisFailed(format!(
                "{context}: fallback search to depth {max_depth} returned {:?}",
                other.answer()
            ))),
        }
    }

    /// Verified reddening sequence for `Q` from one for `mutate(Q, k)`.
    pub fn conjugate(&mut self, q: &Quiver, k: usize, r_prime: &MutationSequence) -> Result<MutationSequence> {
        for cand in conjugate_candidates(q, k, r_prime)? {
            if verify_reddening(q, &cand)?.ok {
                let trailing = *cand.0.last().unwrap();
                self.derivation.push(DerivationStep::Conjugate { vertex: k, trailing, sequence: cand.clone() });
                return Ok(cand);
            }
        }
        self.fallback(q, r_prime.len() + 2, &format!("conjugation at {k}"))
    }

    /// Given `r_end` for `Q.apply_sequence(path)`, a sequence for `Q`.
    pub fn pull_back(
        &mut self,
        q: &Quiver,
        path: &MutationSequence,
        r_end: MutationSequence,
    ) -> Result<MutationSequence> {
        let mut states = vec![q.clone()];
        for &k in path.iter() {
            let next = states.last().unwrap().mutate(k)?;
            states.push(next);
        }
        let mut r = r_end;
        for (t, &k) in path.as_slice().iter().enumerate().rev() {
            r = self.conjugate(&states[t], k, &r)?;
        }
        Ok(r)
    }

    /// Verified sequence for a triangular extension `A -> B`.
    pub fn concat(
        &mut self,
        q: &Quiver,
        a: &[usize],
        b: &[usize],
        ra: &MutationSequence,
        rb: &MutationSequence,
    ) -> Result<MutationSequence> {
        let source_first = concat_rule(q, a, b, ra, rb)?;
        let split_at = ra.len();
        let reversed =
            MutationSequence(source_first.0[split_at..].iter().chain(&source_first.0[..split_at]).copied().collect());
        for (order, cand) in [(ConcatOrder::SourceFirst, source_first), (ConcatOrder::Reversed, reversed)] {
            if verify_reddening(q, &cand)?.ok {
                self.derivation.push(DerivationStep::Concat { order, sequence: cand.clone() });
                return Ok(cand);
            }
        }
        self.fallback(q, ra.len() + rb.len() + 2, "concatenation")
    }

    /// Returns the quiver the tree builds and a reddening sequence for it.
    pub fn from_tree(&mut self, t: &ClassPTree) -> Result<(Quiver, MutationSequence)> {
        match t {
            ClassPTree::OneVertex {} => {
                let s = MutationSequence(vec![1]);
                self.derivation.push(DerivationStep::Leaf { sequence: s.clone() });
                Ok((Quiver::empty(1, 0), s))
            }
            ClassPTree::Mutate { child, sequence } => {
                let (qc, rc) = self.from_tree(child)?;
                let q = qc.apply_sequence(sequence).map_err(|e| Error::InvalidTree(e.to_string()))?;
                let back = MutationSequence(sequence.as_slice().iter().rev().copied().collect());
                let r = self.pull_back(&q, &back, rc)?;
                Ok((q, r))
            }
            ClassPTree::TriExt { left, right, direction, .. } => {
                let (ql, rl) = self.from_tree(left)?;
                let (_, rr) = self.from_tree(right)?;
                let q = verify_class_p_tree(t)?.quiver;
                let nl = ql.n_mutable();
                let lv: Vec<usize> = (1..=nl).collect();
                let rv: Vec<usize> = (nl + 1..=q.n_mutable()).collect();
                let r = match direction {
                    Direction::LeftToRight => self.concat(&q, &lv, &rv, &rl, &rr)?,
                    Direction::RightToLeft => self.concat(&q, &rv, &lv, &rr, &rl)?,
                };
                Ok((q, r))
            }
        }
    }

    /// Reddening sequence for `q` following a Banff certificate.
    pub fn from_banff(&mut self, q: &Quiver, cert: &BanffCertificate) -> Result<MutationSequence> {
        match cert {
            BanffCertificate::AcyclicLeaf { .. } => {
                let s = acyclic_mgs(q)?;
                self.derivation.push(DerivationStep::AcyclicMgs { sequence: s.clone() });
                Ok(s)
            }
            BanffCertificate::MutationAcyclicLeaf { witness } => {
                let rep = q.apply_sequence(witness)?;
                let s = acyclic_mgs(&rep)?;
                self.derivation.push(DerivationStep::AcyclicMgs { sequence: s.clone() });
                self.pull_back(q, witness, s)
            }
            BanffCertificate::CoveringSplit { mutations, pair, without_i, without_j } => {
                let rep = q.apply_sequence(mutations)?;
                let (a, b) = descendant_split(&rep, pair.j)?;
                let n = rep.n_mutable();
                // Q|A sits inside Q \ {j} and Q|B inside Q \ {i}; when either
                // restriction is the whole deletion its child certificate applies.
                let ra = if a.len() + 1 == n {
                    self.from_banff(&rep.delete_vertex(pair.j)?.0, without_j)?
                } else {
                    self.restricted(&rep, &a)?
                };
                let rb = if b.len() + 1 == n {
                    self.from_banff(&rep.delete_vertex(pair.i)?.0, without_i)?
                } else {
                    self.restricted(&rep, &b)?
                };
                let r = self.concat(&rep, &a, &b, &ra, &rb)?;
                self.pull_back(q, mutations, r)
            }
        }
    }

    fn restricted(&mut self, q: &Quiver, vertices: &[usize]) -> Result<MutationSequence> {
        let (sub, _) = q.induced_subquiver(vertices)?;
        match certify_banff(&sub, &self.limits)? {
            TriState::Yes(cert) => self.from_banff(&sub, &cert),
            _ => self.fallback(&sub, self.limits.max_depth, "restriction without a Banff certificate"),
        }
    }

    fn finish(self, q: &Quiver, sequence: MutationSequence) -> Result<SynthesisResult> {
        let verdict = verify_reddening(q, &sequence)?;
        if !verdict.ok {
            return Err(Error::SynthesisFailed(format!(
                "final sequence {sequence} failed verification after {} steps",
                self.derivation.len()
            )));
        }
        Ok(SynthesisResult { sequence, verdict, derivation: self.derivation })
    }
}

/// Structural recursion over a class-P tree.
pub fn synthesize_from_tree(t: &ClassPTree, limits: &SearchLimits) -> Result<SynthesisResult> {
    verify_class_p_tree(t)?;
    let mut s = Synthesizer::new(*limits);
    let (q, r) = s.from_tree(t)?;
    s.finish(&q, r)
}

/// Replays `cert` against `q`, then synthesises along it.
pub fn synthesize_from_banff(q: &Quiver, cert: &BanffCertificate, limits: &SearchLimits) -> Result<SynthesisResult> {
    validate_banff(q, cert)?;
    let mut s = Synthesizer::new(*limits);
    let r = s.from_banff(q, cert)?;
    s.finish(q, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::CoveringPair;

    fn q(text: &str) -> Quiver {
        Quiver::parse(text).unwrap()
    }

    fn seq(v: &[usize]) -> MutationSequence {
        MutationSequence(v.to_vec())
    }

    const A2: &str = "vertices: 2 0\narrow: 1 2";
    const C3: &str = "vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1";
    const BANFF: &str = "vertices: 4 0\narrow: 1 2\narrow: 2 3\narrow: 3 1\narrow: 1 4\narrow: 2 4\narrow: 3 4";

    #[test]
    fn concat_examples() {
        let two_a2 = q("vertices: 4 0\narrow: 1 2\narrow: 3 4");
        let s = concat_rule(&two_a2, &[1, 2], &[3, 4], &seq(&[1, 2]), &seq(&[1, 2])).unwrap();
        assert_eq!(s, seq(&[1, 2, 3, 4]));
        assert!(verify_reddening(&two_a2, &s).unwrap().ok);

        let a2 = q(A2);
        let s = concat_rule(&a2, &[1], &[2], &seq(&[1]), &seq(&[1])).unwrap();
        assert_eq!(s, seq(&[1, 2]));
        assert!(verify_reddening(&a2, &s).unwrap().ok);
        assert!(matches!(concat_rule(&a2, &[2], &[1], &seq(&[1]), &seq(&[1])), Err(Error::InvalidSplit(_))));
    }

    #[test]
    fn conjugate_on_reversed_a2() {
        let rev = q("vertices: 2 0\narrow: 2 1");
        let cand = conjugate_rule(&rev, 1, &seq(&[1, 2])).unwrap();
        assert_eq!(cand, seq(&[1, 1, 2, 1]));
        let mut s = Synthesizer::new(SearchLimits::default());
        let r = s.conjugate(&rev, 1, &seq(&[1, 2])).unwrap();
        assert_eq!(r, seq(&[1, 1, 2, 1]));
        assert!(verify_reddening(&rev, &r).unwrap().ok);
    }

    #[test]
    fn conjugate_on_c3() {
        let c3 = q(C3);
        let r_prime = acyclic_mgs(&c3.mutate(2).unwrap()).unwrap();
        let mut s = Synthesizer::new(SearchLimits::default());
        let r = s.conjugate(&c3, 2, &r_prime).unwrap();
        assert!(verify_reddening(&c3, &r).unwrap().ok);
        assert!(matches!(s.derivation()[0], DerivationStep::Conjugate { .. }));
    }

    #[test]
    fn conjugate_needs_verified_input() {
        let one = q("vertices: 1 0");
        assert!(matches!(conjugate_rule(&one, 1, &seq(&[])), Err(Error::SynthesisFailed(_))));
    }

    #[test]
    fn trees() {
        let a2 = ClassPTree::tri_ext(
            ClassPTree::OneVertex {},
            ClassPTree::OneVertex {},
            &[(1, 2, 1)],
            Direction::LeftToRight,
        );
        let r = synthesize_from_tree(&a2, &SearchLimits::default()).unwrap();
        assert_eq!(r.sequence, seq(&[1, 2]));
        let one = synthesize_from_tree(&ClassPTree::OneVertex {}, &SearchLimits::default()).unwrap();
        assert_eq!(one.sequence, seq(&[1]));
    }

    #[test]
    fn banff_figure_synthesis() {
        let banff = q(BANFF);
        let cert = certify_banff(&banff, &SearchLimits::default()).unwrap().yes().unwrap();
        let r = synthesize_from_banff(&banff, &cert, &SearchLimits::default()).unwrap();
        assert!(verify_reddening(&banff, &r.sequence).unwrap().ok);
        assert!(r.derivation.iter().all(|d| !matches!(d, DerivationStep::FallbackSearch { .. })), "{:?}", r.derivation);
    }

    #[test]
    fn acyclic_synthesis_is_topological() {
        let a2 = q(A2);
        let cert = BanffCertificate::AcyclicLeaf { order: seq(&[1, 2]) };
        assert_eq!(synthesize_from_banff(&a2, &cert, &SearchLimits::default()).unwrap().sequence, seq(&[1, 2]));
    }

    #[test]
    fn forged_certificate_rejected() {
        let torus = q("vertices: 4 0\narrow: 1 2\narrow: 1 3\narrow: 2 3\narrow: 4 1\narrow: 4 2\narrow: 3 4 2");
        let forged = BanffCertificate::CoveringSplit {
            mutations: seq(&[]),
            pair: CoveringPair { i: 3, j: 4 },
            without_i: Box::new(BanffCertificate::AcyclicLeaf { order: seq(&[1, 2, 3]) }),
            without_j: Box::new(BanffCertificate::AcyclicLeaf { order: seq(&[1, 2, 3]) }),
        };
        assert!(matches!(
            synthesize_from_banff(&torus, &forged, &SearchLimits::default()),
            Err(Error::InvalidCertificate(_))
        ));
    }
}
