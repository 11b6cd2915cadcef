//! Budgets, three-valued outcomes and the breadth-first engine shared by
//! every search over mutation classes.

use std::collections::{HashMap, VecDeque};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::canon::CanonicalForm;
use crate::error::{Error, Result};
use crate::quiver::{MutationSequence, Quiver};

/// Bounds on a search. Running out of any of them yields `Unknown`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchLimits {
    pub max_depth: usize,
    pub max_states: usize,
    pub max_millis: u64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_depth: 12, max_states: 1_000_000, max_millis: 60_000 }
    }
}

impl SearchLimits {
    pub fn new(max_depth: usize, max_states: usize, max_millis: u64) -> Result<Self> {
        let lim = SearchLimits { max_depth, max_states, max_millis };
        lim.validate()?;
        Ok(lim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_depth == 0 || self.max_states == 0 || self.max_millis == 0 {
            return Err(Error::Precondition("search limits must all be positive".into()));
        }
        Ok(())
    }

    pub fn with_depth(self, max_depth: usize) -> Self {
        SearchLimits { max_depth, ..self }
    }

    pub fn deadline(&self) -> Instant {
        Instant::now() + Duration::from_millis(self.max_millis)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Answer {
    Yes,
    No,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExhaustReason {
    Depth,
    States,
    Time,
}

/// Evidence for an `Unknown`: which budget ran out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exhausted {
    pub reason: ExhaustReason,
    pub limits: SearchLimits,
    pub states: usize,
}

/// Evidence of a fully closed state space: the path from the root to every
/// state, in breadth-first order. Checking closure needs only one mutation
/// per state and move, never a search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Closure {
    pub paths: Vec<MutationSequence>,
}

/// Yes / No / Unknown with evidence attached to each.
#[derive(Clone, Debug, PartialEq)]
pub enum TriState<Y, N = Closure> {
    Yes(Y),
    No(N),
    Unknown(Exhausted),
}

impl<Y, N> TriState<Y, N> {
    pub fn answer(&self) -> Answer {
        match self {
            TriState::Yes(_) => Answer::Yes,
            TriState::No(_) => Answer::No,
            TriState::Unknown(_) => Answer::Unknown,
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, TriState::Yes(_))
    }

    pub fn yes(self) -> Option<Y> {
        match self {
            TriState::Yes(y) => Some(y),
            _ => None,
        }
    }
}

/// Which mutations a search may apply from a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveRule {
    /// Any mutable vertex.
    Any,
    /// Only currently green vertices.
    Green,
}

impl MoveRule {
    pub fn moves(self, q: &Quiver) -> Result<Vec<usize>> {
        match self {
            MoveRule::Any => Ok((1..=q.n_mutable()).collect()),
            MoveRule::Green => {
                let mut out = Vec::new();
                for k in 1..=q.n_mutable() {
                    if q.vertex_status(k)? == crate::quiver::VertexColor::Green {
                        out.push(k);
                    }
                }
                Ok(out)
            }
        }
    }
}

struct Node {
    quiver: Quiver,
    parent: Option<usize>,
    step: usize,
    depth: usize,
}

/// Breadth-first exploration with canonical-form deduplication.
pub(crate) struct Explorer {
    nodes: Vec<Node>,
    seen: HashMap<CanonicalForm, usize>,
}

pub(crate) enum Stop {
    /// Index of the node satisfying the goal.
    Found(usize),
    Closed,
    Exhausted(Exhausted),
}

impl Explorer {
    /// Explores from `root`, testing `goal` on each new state in BFS order
    /// (moves ascending). Stops at the first goal state.
    pub fn run<G>(root: Quiver, rule: MoveRule, limits: &SearchLimits, mut goal: G) -> Result<(Self, Stop)>
    where
        G: FnMut(&Quiver, usize) -> Result<bool>,
    {
        limits.validate()?;
        let deadline = limits.deadline();
        let mut ex = Explorer { nodes: Vec::new(), seen: HashMap::new() };
        ex.seen.insert(root.canonical_form(), 0);
        ex.nodes.push(Node { quiver: root, parent: None, step: 0, depth: 0 });
        if goal(&ex.nodes[0].quiver, 0)? {
            return Ok((ex, Stop::Found(0)));
        }
        let mut queue: VecDeque<usize> = VecDeque::from([0]);
        let mut truncated = false;
        let mut expansions = 0usize;
        let exhausted = |reason, states| Exhausted { reason, limits: *limits, states };
        while let Some(idx) = queue.pop_front() {
            expansions += 1;
            if expansions.is_multiple_of(64) && Instant::now() >= deadline {
                let states = ex.nodes.len();
                return Ok((ex, Stop::Exhausted(exhausted(ExhaustReason::Time, states))));
            }
            let moves = rule.moves(&ex.nodes[idx].quiver)?;
            if ex.nodes[idx].depth >= limits.max_depth {
                truncated |= !moves.is_empty();
                continue;
            }
            for k in moves {
                let child = ex.nodes[idx].quiver.mutate(k)?;
                let form = child.canonical_form();
                if ex.seen.contains_key(&form) {
                    continue;
                }
                if ex.nodes.len() >= limits.max_states {
                    let states = ex.nodes.len();
                    return Ok((ex, Stop::Exhausted(exhausted(ExhaustReason::States, states))));
                }
                let id = ex.nodes.len();
                let depth = ex.nodes[idx].depth + 1;
                ex.seen.insert(form, id);
                ex.nodes.push(Node { quiver: child, parent: Some(idx), step: k, depth });
                if goal(&ex.nodes[id].quiver, id)? {
                    return Ok((ex, Stop::Found(id)));
                }
                queue.push_back(id);
            }
        }
        if truncated {
            let states = ex.nodes.len();
            return Ok((ex, Stop::Exhausted(exhausted(ExhaustReason::Depth, states))));
        }
        Ok((ex, Stop::Closed))
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn path(&self, mut idx: usize) -> MutationSequence {
        let mut steps = Vec::new();
        while let Some(p) = self.nodes[idx].parent {
            steps.push(self.nodes[idx].step);
            idx = p;
        }
        steps.reverse();
        MutationSequence(steps)
    }

    pub fn closure(&self) -> Closure {
        Closure { paths: (0..self.nodes.len()).map(|i| self.path(i)).collect() }
    }

    pub fn into_states(self) -> Vec<(Quiver, MutationSequence)> {
        let paths: Vec<MutationSequence> = (0..self.nodes.len()).map(|i| self.path(i)).collect();
        self.nodes.into_iter().map(|n| n.quiver).zip(paths).collect()
    }
}

/// Checks a closure certificate without searching: every listed path must
/// be valid under `rule`, and every allowed move from every listed state
/// must land on a state isomorphic to a listed one. Returns the states.
pub fn check_closure(root: &Quiver, rule: MoveRule, closure: &Closure) -> Result<Vec<Quiver>> {
    let mut states = Vec::with_capacity(closure.paths.len());
    let mut forms = std::collections::HashSet::new();
    for path in &closure.paths {
        let mut q = root.clone();
        for &k in path.iter() {
            if !rule.moves(&q)?.contains(&k) {
                return Err(Error::InvalidCertificate(format!("path {path} makes a disallowed move at {k}")));
            }
            q = q.mutate(k)?;
        }
        forms.insert(q.canonical_form());
        states.push(q);
    }
    if !forms.contains(&root.canonical_form()) {
        return Err(Error::InvalidCertificate("closure does not contain the root".into()));
    }
    for (q, path) in states.iter().zip(&closure.paths) {
        for k in rule.moves(q)? {
            if !forms.contains(&q.mutate(k)?.canonical_form()) {
                return Err(Error::InvalidCertificate(format!("state {path} mutated at {k} leaves the listed states")));
            }
        }
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn limits_must_be_positive() {
        assert!(SearchLimits::new(0, 1, 1).is_err());
        assert!(SearchLimits::new(1, 0, 1).is_err());
        assert!(SearchLimits::new(1, 1, 0).is_err());
        assert_eq!(SearchLimits::default(), SearchLimits::new(12, 1_000_000, 60_000).unwrap());
    }

    #[test]
    fn explorer_closes_on_a2() {
        let a2 = Quiver::parse("vertices: 2 0\narrow: 1 2").unwrap();
        let (ex, stop) = Explorer::run(a2.clone(), MoveRule::Any, &SearchLimits::default(), |_, _| Ok(false)).unwrap();
        assert!(matches!(stop, Stop::Closed));
        assert_eq!(ex.len(), 1);
        check_closure(&a2, MoveRule::Any, &ex.closure()).unwrap();
    }

    #[test]
    fn bogus_closure_rejected() {
        let c3 = Quiver::parse("vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1").unwrap();
        let fake = Closure { paths: vec![MutationSequence::default()] };
        assert!(check_closure(&c3, MoveRule::Any, &fake).is_err());
    }

    #[test]
    fn depth_limit_gives_exhaustion() {
        let c3 = Quiver::parse("vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1").unwrap();
        let lim = SearchLimits::new(1, 100, 1000).unwrap();
        let (_, stop) = Explorer::run(c3, MoveRule::Any, &lim, |_, _| Ok(false)).unwrap();
        assert!(matches!(stop, Stop::Exhausted(Exhausted { reason: ExhaustReason::Depth, .. })));
    }
}
