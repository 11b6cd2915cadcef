//! Verification and bounded search of reddening and maximal green sequences.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::canon;
use crate::error::{Error, Result};
use crate::quiver::{Acyclicity, Framing, MutationSequence, Quiver, VertexColor};
use crate::search::{check_closure, Closure, Explorer, MoveRule, SearchLimits, Stop, TriState};

/// Outcome of replaying a sequence on the framed quiver.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub ok: bool,
    pub final_quiver: Quiver,
    /// `permutation[i - 1]` is the coframe vertex matched to mutable vertex `i`.
    pub permutation: Option<Vec<usize>>,
    pub failure_reason: Option<String>,
    /// 1-based step at which a maximal green check failed.
    pub failing_step: Option<usize>,
}

impl Verdict {
    fn failed(final_quiver: Quiver, reason: String, step: Option<usize>) -> Self {
        Verdict { ok: false, final_quiver, permutation: None, failure_reason: Some(reason), failing_step: step }
    }
}

/// A sequence found by a search, with the verdict that confirmed it.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub sequence: MutationSequence,
    pub verdict: Verdict,
}

fn require_unframed(q: &Quiver) -> Result<()> {
    if q.n_frozen() > 0 {
        return Err(Error::Precondition("expected a quiver without frozen vertices".into()));
    }
    Ok(())
}

fn check_indices(q: &Quiver, s: &MutationSequence) -> Result<()> {
    for &k in s.iter() {
        if k == 0 || k > q.n_mutable() {
            return Err(Error::VertexOutOfRange { vertex: k, count: q.n_mutable() });
        }
    }
    Ok(())
}

/// The bijection matching an all-red framed state to the coframed quiver.
/// It is read off the frozen arrows and then checked on the mutable part;
/// if that check fails a general isomorphism is searched for.
#[allow(clippy::needless_range_loop)]
pub fn coframe_permutation(final_quiver: &Quiver, q: &Quiver) -> Option<Vec<usize>> {
    let n = q.n_mutable();
    if final_quiver.n_mutable() != n || final_quiver.n_frozen() != n {
        return None;
    }
    let pattern = final_quiver.frozen_pattern();
    let minus_one = -BigInt::one();
    let mut sigma = Vec::with_capacity(n);
    for j in 0..n {
        let nonzero: Vec<usize> = (0..n).filter(|&f| !pattern[f][j].is_zero()).collect();
        if nonzero.len() != 1 || pattern[nonzero[0]][j] != minus_one {
            return None;
        }
        sigma.push(nonzero[0] + 1);
    }
    let matches = (0..n).all(|i| (0..n).all(|j| final_quiver.entry(i, j) == q.entry(sigma[i] - 1, sigma[j] - 1)));
    if matches {
        return Some(sigma);
    }
    let coframe = q.frame(Framing::Coframed).ok()?;
    canon::isomorphism(final_quiver, &coframe).map(|iso| iso[..n].iter().map(|&v| v + 1).collect())
}

fn finish_verdict(q: &Quiver, state: Quiver) -> Result<Verdict> {
    for k in 1..=q.n_mutable() {
        if state.vertex_status(k)? == VertexColor::Green {
            return Ok(Verdict::failed(state, format!("vertex {k} green"), None));
        }
    }
    match coframe_permutation(&state, q) {
        Some(sigma) => Ok(Verdict {
            ok: true,
            final_quiver: state,
            permutation: Some(sigma),
            failure_reason: None,
            failing_step: None,
        }),
        None => Ok(Verdict::failed(state, "final quiver is not isomorphic to the coframed quiver".into(), None)),
    }
}

/// Applies `s` to the framed quiver and checks that every vertex ends red.
pub fn verify_reddening(q: &Quiver, s: &MutationSequence) -> Result<Verdict> {
    require_unframed(q)?;
    check_indices(q, s)?;
    let state = q.frame(Framing::Framed)?.apply_sequence(s)?;
    finish_verdict(q, state)
}

/// As [`verify_reddening`], additionally requiring each step to mutate a
/// green vertex.
pub fn verify_maximal_green(q: &Quiver, s: &MutationSequence) -> Result<Verdict> {
    require_unframed(q)?;
    check_indices(q, s)?;
    let mut state = q.frame(Framing::Framed)?;
    for (t, &k) in s.iter().enumerate() {
        if state.vertex_status(k)? == VertexColor::Red {
            return Ok(Verdict::failed(state, format!("step {}: vertex {k} is red", t + 1), Some(t + 1)));
        }
        state = state.mutate(k)?;
    }
    finish_verdict(q, state)
}

/// Topological order of an acyclic quiver, returned only once verified as
/// a maximal green sequence.
pub fn acyclic_mgs(q: &Quiver) -> Result<MutationSequence> {
    require_unframed(q)?;
    let order = match q.acyclicity() {
        Acyclicity::Acyclic(order) => MutationSequence(order),
        Acyclicity::Cyclic(_) => return Err(Error::Cyclic),
    };
    let verdict = verify_maximal_green(q, &order)?;
    if !verdict.ok {
        return Err(Error::Invariant(format!(
            "topological order {order} is not a maximal green sequence: {}",
            verdict.failure_reason.unwrap_or_default()
        )));
    }
    Ok(order)
}

fn search_sequences(q: &Quiver, limits: &SearchLimits, rule: MoveRule) -> Result<TriState<Witness>> {
    require_unframed(q)?;
    let root = q.frame(Framing::Framed)?;
    let (ex, stop) = Explorer::run(root, rule, limits, |state, _| state.all_red())?;
    match stop {
        Stop::Found(idx) => {
            let sequence = ex.path(idx);
            let verdict = match rule {
                MoveRule::Green => verify_maximal_green(q, &sequence)?,
                MoveRule::Any => verify_reddening(q, &sequence)?,
            };
            if !verdict.ok {
                return Err(Error::Invariant(format!("search produced unverifiable sequence {sequence}")));
            }
            Ok(TriState::Yes(Witness { sequence, verdict }))
        }
        Stop::Closed => Ok(TriState::No(ex.closure())),
        Stop::Exhausted(e) => Ok(TriState::Unknown(e)),
    }
}

/// Breadth-first search over green mutations of the framed quiver.
/// `Yes` carries a shortest maximal green sequence; `No` only on closure.
pub fn search_maximal_green(q: &Quiver, limits: &SearchLimits) -> Result<TriState<Witness>> {
    search_sequences(q, limits, MoveRule::Green)
}

/// Breadth-first search over all mutations of the framed quiver.
pub fn search_reddening(q: &Quiver, limits: &SearchLimits) -> Result<TriState<Witness>> {
    search_sequences(q, limits, MoveRule::Any)
}

/// Replays the evidence behind a `No` from [`search_maximal_green`]
/// (`maximal_green`) or [`search_reddening`]: the closure must cover every
/// allowed move from the framed quiver and contain no all-red state.
pub fn validate_no_sequence(q: &Quiver, maximal_green: bool, closure: &Closure) -> Result<()> {
    require_unframed(q)?;
    let rule = if maximal_green { MoveRule::Green } else { MoveRule::Any };
    for (state, path) in check_closure(&q.frame(Framing::Framed)?, rule, closure)?.iter().zip(&closure.paths) {
        if state.all_red()? {
            return Err(Error::InvalidCertificate(format!("state reached by {path} is all red")));
        }
    }
    Ok(())
}

/// Replays the evidence behind a `No` from [`is_mutation_acyclic`].
pub fn validate_not_mutation_acyclic(q: &Quiver, closure: &Closure) -> Result<()> {
    require_unframed(q)?;
    for (state, path) in check_closure(q, MoveRule::Any, closure)?.iter().zip(&closure.paths) {
        if state.acyclicity().is_acyclic() {
            return Err(Error::InvalidCertificate(format!("representative reached by {path} is acyclic")));
        }
    }
    Ok(())
}

/// Representatives of a mutation class up to isomorphism, in BFS order.
#[derive(Clone, Debug)]
pub struct MutationClass {
    /// Each representative with a mutation path from the input.
    pub representatives: Vec<(Quiver, MutationSequence)>,
    /// The frontier emptied: the whole class was enumerated.
    pub closed: bool,
    pub exhausted: Option<crate::search::Exhausted>,
}

impl MutationClass {
    pub fn closure(&self) -> Closure {
        Closure { paths: self.representatives.iter().map(|(_, p)| p.clone()).collect() }
    }
}

pub fn explore_mutation_class(q: &Quiver, limits: &SearchLimits) -> Result<MutationClass> {
    require_unframed(q)?;
    let (ex, stop) = Explorer::run(q.clone(), MoveRule::Any, limits, |_, _| Ok(false))?;
    let (closed, exhausted) = match stop {
        Stop::Closed => (true, None),
        Stop::Exhausted(e) => (false, Some(e)),
        Stop::Found(_) => unreachable!("goal never fires"),
    };
    Ok(MutationClass { representatives: ex.into_states(), closed, exhausted })
}

/// `Yes` with a path to an acyclic representative, `No` when the class
/// closes without one.
pub fn is_mutation_acyclic(q: &Quiver, limits: &SearchLimits) -> Result<TriState<MutationSequence>> {
    require_unframed(q)?;
    let (ex, stop) = Explorer::run(q.clone(), MoveRule::Any, limits, |state, _| Ok(state.acyclicity().is_acyclic()))?;
    Ok(match stop {
        Stop::Found(idx) => TriState::Yes(ex.path(idx)),
        Stop::Closed => TriState::No(ex.closure()),
        Stop::Exhausted(e) => TriState::Unknown(e),
    })
}

/// On three or fewer vertices a reddening sequence exists iff the quiver is
/// mutation-acyclic, so the mutation-acyclicity test decides the question.
pub fn decide_reddening_small(q: &Quiver, limits: &SearchLimits) -> Result<TriState<MutationSequence>> {
    if q.n_mutable() > 3 {
        return Err(Error::Precondition(format!(
            "reddening existence is only decided for at most 3 vertices, got {}",
            q.n_mutable()
        )));
    }
    is_mutation_acyclic(q, limits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Answer;

    fn q(text: &str) -> Quiver {
        Quiver::parse(text).unwrap()
    }

    fn seq(v: &[usize]) -> MutationSequence {
        MutationSequence(v.to_vec())
    }

    const A2: &str = "vertices: 2 0\narrow: 1 2";
    const C3: &str = "vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1";
    const TORUS: &str = "vertices: 4 0\narrow: 1 2\narrow: 1 3\narrow: 2 3\narrow: 4 1\narrow: 4 2\narrow: 3 4 2";
    const MARKOV: &str = "vertices: 3 0\narrow: 1 2 2\narrow: 2 3 2\narrow: 3 1 2";

    #[test]
    fn a2_reddening() {
        let v = verify_reddening(&q(A2), &seq(&[1, 2])).unwrap();
        assert!(v.ok);
        assert_eq!(v.permutation, Some(vec![1, 2]));
        let bad = verify_reddening(&q(A2), &seq(&[1])).unwrap();
        assert!(!bad.ok);
        assert_eq!(bad.failure_reason.as_deref(), Some("vertex 2 green"));
    }

    #[test]
    fn torus_published_sequence() {
        let v = verify_maximal_green(&q(TORUS), &seq(&[1, 3, 4, 2, 1, 3])).unwrap();
        assert!(v.ok, "{:?}", v.failure_reason);
        assert!(verify_reddening(&q(TORUS), &seq(&[1, 3, 4, 2, 1, 3])).unwrap().ok);
    }

    #[test]
    fn maximal_green_failures() {
        let v = verify_maximal_green(&q(A2), &seq(&[1, 1])).unwrap();
        assert!(!v.ok);
        assert_eq!(v.failing_step, Some(2));
        assert!(verify_maximal_green(&q("vertices: 1 0"), &seq(&[1])).unwrap().ok);
        assert!(matches!(verify_maximal_green(&q(A2), &seq(&[3])), Err(Error::VertexOutOfRange { .. })));
        let framed = q(A2).frame(Framing::Framed).unwrap();
        assert!(matches!(verify_reddening(&framed, &seq(&[1])), Err(Error::Precondition(_))));
    }

    #[test]
    fn acyclic_mgs_examples() {
        assert_eq!(acyclic_mgs(&q(A2)).unwrap(), seq(&[1, 2]));
        assert_eq!(acyclic_mgs(&q("vertices: 3 0")).unwrap(), seq(&[1, 2, 3]));
        assert_eq!(acyclic_mgs(&q("vertices: 3 0\narrow: 1 2\narrow: 1 3\narrow: 2 3")).unwrap(), seq(&[1, 2, 3]));
        assert_eq!(acyclic_mgs(&q(C3)), Err(Error::Cyclic));
    }

    #[test]
    fn searches() {
        let lim = SearchLimits::default();
        let c3 = search_maximal_green(&q(C3), &lim).unwrap();
        assert!(c3.is_yes());
        let torus = search_maximal_green(&q(TORUS), &lim.with_depth(6)).unwrap().yes().unwrap();
        assert!(torus.sequence.len() <= 6);
        let red = search_reddening(&q(TORUS), &lim).unwrap();
        assert!(red.is_yes());
    }

    #[test]
    fn markov_never_yes() {
        let lim = SearchLimits::new(8, 20_000, 10_000).unwrap();
        let r = search_maximal_green(&q(MARKOV), &lim).unwrap();
        assert_ne!(r.answer(), Answer::Yes);
    }

    #[test]
    fn mutation_classes() {
        let lim = SearchLimits::default();
        for (text, size) in [(A2, 1), (MARKOV, 1), (TORUS, 1), (C3, 4)] {
            let class = explore_mutation_class(&q(text), &lim).unwrap();
            assert!(class.closed);
            assert_eq!(class.representatives.len(), size, "{text}");
        }
    }

    #[test]
    fn mutation_acyclicity() {
        let lim = SearchLimits::default();
        let w = is_mutation_acyclic(&q(C3), &lim).unwrap().yes().unwrap();
        assert_eq!(w.len(), 1);
        assert!(q(C3).apply_sequence(&w).unwrap().acyclicity().is_acyclic());
        assert_eq!(is_mutation_acyclic(&q(MARKOV), &lim).unwrap().answer(), Answer::No);
        assert_eq!(is_mutation_acyclic(&q(A2), &lim).unwrap(), TriState::Yes(seq(&[])));
        assert_eq!(decide_reddening_small(&q(MARKOV), &lim).unwrap().answer(), Answer::No);
        assert_eq!(decide_reddening_small(&q("vertices: 1 0"), &lim).unwrap().answer(), Answer::Yes);
        assert!(decide_reddening_small(&q(TORUS), &lim).is_err());
    }

    #[test]
    fn refutations_replay() {
        let markov = q(MARKOV);
        let TriState::No(closure) = is_mutation_acyclic(&markov, &SearchLimits::default()).unwrap() else {
            panic!("markov class should close")
        };
        validate_not_mutation_acyclic(&markov, &closure).unwrap();
        assert!(validate_not_mutation_acyclic(&q(A2), &Closure { paths: vec![seq(&[])] }).is_err());
        let c3 = q(C3);
        let TriState::Yes(_) = search_maximal_green(&c3, &SearchLimits::default()).unwrap() else { panic!() };
        let bogus = Closure { paths: vec![seq(&[])] };
        assert!(validate_no_sequence(&c3, true, &bogus).is_err());
    }
}
