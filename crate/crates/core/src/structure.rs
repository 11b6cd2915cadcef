//! Covering pairs, triangular extensions, Banff certificates and class-P
//! construction trees.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::canon::{self, CanonicalForm};
use crate::error::{Error, Result};
use crate::quiver::{Acyclicity, Arrow, MutationSequence, Quiver};
use crate::search::{
    check_closure, Closure, ExhaustReason, Exhausted, Explorer, MoveRule, SearchLimits, Stop, TriState,
};

/// An arrow `i -> j` between mutable vertices lying on no bi-infinite path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringPair {
    pub i: usize,
    pub j: usize,
}

fn mutable_vertex(q: &Quiver, v: usize) -> Result<usize> {
    if v == 0 || v > q.n_mutable() {
        return Err(Error::VertexOutOfRange { vertex: v, count: q.n_mutable() });
    }
    Ok(v - 1)
}

// Vertices lying in a strongly connected component with at least one arrow.
fn cyclic_vertices(q: &Quiver) -> Vec<usize> {
    q.condensation().components.into_iter().filter(|c| c.len() > 1).flatten().map(|v| v - 1).collect()
}

/// An arrow `i -> j` extends to a bi-infinite path iff `i` can be reached
/// from a directed cycle and `j` can reach one: any infinite walk in a
/// finite quiver revisits a vertex.
pub fn on_biinfinite_path(q: &Quiver, i: usize, j: usize) -> Result<bool> {
    let (i0, j0) = (mutable_vertex(q, i)?, mutable_vertex(q, j)?);
    if i0 == j0 || !q.entry(i0, j0).is_positive() {
        return Err(Error::Precondition(format!("no arrow {i} -> {j}")));
    }
    let cyc = cyclic_vertices(q);
    Ok(q.reach(&cyc, true)[i0] && q.reach(&cyc, false)[j0])
}

/// All covering pairs, sorted by `(i, j)`.
#[allow(clippy::needless_range_loop)]
pub fn covering_pairs(q: &Quiver) -> Vec<CoveringPair> {
    let cyc = cyclic_vertices(q);
    let from_cycle = q.reach(&cyc, true);
    let to_cycle = q.reach(&cyc, false);
    let mut out = Vec::new();
    for i in 0..q.n_mutable() {
        for j in q.successors0(i) {
            if !(from_cycle[i] && to_cycle[j]) {
                out.push(CoveringPair { i: i + 1, j: j + 1 });
            }
        }
    }
    out
}

/// `B` is everything reachable from `j` (including `j`), `A` the rest.
pub fn descendant_split(q: &Quiver, j: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    mutable_vertex(q, j)?;
    let reach = q.forward_reachable(j);
    let (b, a): (Vec<usize>, Vec<usize>) = (1..=q.n_mutable()).partition(|&v| reach[v - 1]);
    Ok((a, b))
}

/// True when `a` and `b` partition the mutable vertices and no arrow runs
/// from `b` into `a`.
pub fn is_triangular_split(q: &Quiver, a: &[usize], b: &[usize]) -> bool {
    let n = q.n_mutable();
    let mut side = vec![None; n];
    for (vs, tag) in [(a, false), (b, true)] {
        for &v in vs {
            if v == 0 || v > n || side[v - 1].is_some() {
                return false;
            }
            side[v - 1] = Some(tag);
        }
    }
    if side.iter().any(Option::is_none) {
        return false;
    }
    b.iter().all(|&u| q.successors0(u - 1).all(|w| side[w] == Some(true)))
}

/// Splits `(A, B)` with every cross arrow directed `A -> B`, built as
/// predecessor-closed unions of condensation components. At most
/// `max_results` are returned, sorted by `A`.
pub fn triangular_decompositions(q: &Quiver, max_results: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let cond = q.condensation();
    let k = cond.components.len();
    if k < 2 || max_results == 0 {
        return Vec::new();
    }
    let mut preds = vec![Vec::new(); k];
    for &(u, v) in &cond.edges {
        preds[v].push(u);
    }
    // Components in a topological order so that predecessors are decided first.
    let mut order = Vec::with_capacity(k);
    let mut indeg: Vec<usize> = preds.iter().map(Vec::len).collect();
    let mut ready: Vec<usize> = (0..k).filter(|&c| indeg[c] == 0).collect();
    while let Some(c) = ready.pop() {
        order.push(c);
        for &(u, v) in &cond.edges {
            if u == c {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    ready.push(v);
                }
            }
        }
    }
    let mut found: Vec<Vec<bool>> = Vec::new();
    let mut chosen = vec![false; k];
    enumerate_closed(&order, 0, &preds, &mut chosen, &mut found, max_results);
    let mut out: Vec<(Vec<usize>, Vec<usize>)> = found
        .into_iter()
        .map(|sel| {
            let mut a = Vec::new();
            let mut b = Vec::new();
            for (c, comp) in cond.components.iter().enumerate() {
                if sel[c] {
                    a.extend(comp)
                } else {
                    b.extend(comp)
                }
            }
            a.sort_unstable();
            b.sort_unstable();
            (a, b)
        })
        .collect();
    out.sort();
    out
}

fn enumerate_closed(
    order: &[usize],
    pos: usize,
    preds: &[Vec<usize>],
    chosen: &mut Vec<bool>,
    found: &mut Vec<Vec<bool>>,
    max_results: usize,
) {
    if found.len() >= max_results {
        return;
    }
    if pos == order.len() {
        let count = chosen.iter().filter(|&&c| c).count();
        if count > 0 && count < chosen.len() {
            found.push(chosen.clone());
        }
        return;
    }
    let c = order[pos];
    if preds[c].iter().all(|&p| chosen[p]) {
        chosen[c] = true;
        enumerate_closed(order, pos + 1, preds, chosen, found, max_results);
        chosen[c] = false;
    }
    enumerate_closed(order, pos + 1, preds, chosen, found, max_results);
}

/// Self-test of "covering pair exists iff some arrow starts at a source or
/// ends at a sink". Requires every vertex to carry an arrow.
pub fn check_source_sink_equivalence(q: &Quiver) -> Result<bool> {
    let n = q.n_mutable();
    if let Some(v) = (0..n).find(|&v| q.successors0(v).next().is_none() && q.predecessors0(v).next().is_none()) {
        return Err(Error::Precondition(format!("vertex {} is isolated", v + 1)));
    }
    let (sources, sinks) = q.sources_and_sinks();
    let has_source_sink_arrow = q.mutable_arrows().iter().any(|a| sources.contains(&a.from) || sinks.contains(&a.to));
    Ok(covering_pairs(q).is_empty() != has_source_sink_arrow)
}

/// Evidence that a quiver is Banff.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case", deny_unknown_fields)]
pub enum BanffCertificate {
    AcyclicLeaf {
        order: MutationSequence,
    },
    MutationAcyclicLeaf {
        witness: MutationSequence,
    },
    CoveringSplit {
        /// Mutations taking the quiver to the representative that has the pair.
        mutations: MutationSequence,
        pair: CoveringPair,
        /// Certificate for the representative with `pair.i` deleted.
        without_i: Box<BanffCertificate>,
        /// Certificate for the representative with `pair.j` deleted.
        without_j: Box<BanffCertificate>,
    },
}

/// Evidence that a quiver is not Banff: its mutation class is closed, no
/// member is acyclic, and every covering pair of every member has a
/// deletion that is itself refuted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonBanffCertificate {
    pub class: Closure,
    /// One entry per member of `class`, in the same order.
    pub refutations: Vec<Vec<PairRefutation>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRefutation {
    pub pair: CoveringPair,
    /// The endpoint whose deletion is not Banff.
    pub deleted: usize,
    pub child: NonBanffCertificate,
}

fn is_topological_order(q: &Quiver, order: &[usize]) -> bool {
    let n = q.n_mutable();
    let mut pos = vec![usize::MAX; n];
    for (t, &v) in order.iter().enumerate() {
        if v == 0 || v > n || pos[v - 1] != usize::MAX {
            return false;
        }
        pos[v - 1] = t;
    }
    order.len() == n && (0..n).all(|u| q.successors0(u).all(|v| pos[u] < pos[v]))
}

/// Replays a Banff certificate against `q`.
pub fn validate_banff(q: &Quiver, cert: &BanffCertificate) -> Result<()> {
    if q.n_frozen() > 0 {
        return Err(Error::InvalidCertificate("quiver has frozen vertices".into()));
    }
    let bad = |msg: String| Err(Error::InvalidCertificate(msg));
    match cert {
        BanffCertificate::AcyclicLeaf { order } => {
            if !is_topological_order(q, order.as_slice()) {
                return bad(format!("{order} is not a topological order"));
            }
        }
        BanffCertificate::MutationAcyclicLeaf { witness } => {
            let rep = q.apply_sequence(witness).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
            if !rep.acyclicity().is_acyclic() {
                return bad(format!("witness {witness} does not reach an acyclic quiver"));
            }
        }
        BanffCertificate::CoveringSplit { mutations, pair, without_i, without_j } => {
            let rep = q.apply_sequence(mutations).map_err(|e| Error::InvalidCertificate(e.to_string()))?;
            if !covering_pairs(&rep).contains(pair) {
                return bad(format!("({}, {}) is not a covering pair after {mutations}", pair.i, pair.j));
            }
            validate_banff(&rep.delete_vertex(pair.i)?.0, without_i)?;
            validate_banff(&rep.delete_vertex(pair.j)?.0, without_j)?;
        }
    }
    Ok(())
}

/// Replays a non-Banff certificate against `q` without searching.
pub fn validate_non_banff(q: &Quiver, cert: &NonBanffCertificate) -> Result<()> {
    if q.n_frozen() > 0 {
        return Err(Error::InvalidCertificate("quiver has frozen vertices".into()));
    }
    let states = check_closure(q, MoveRule::Any, &cert.class)?;
    if cert.refutations.len() != states.len() {
        return Err(Error::InvalidCertificate("one refutation list per class member is required".into()));
    }
    for (state, refs) in states.iter().zip(&cert.refutations) {
        if state.acyclicity().is_acyclic() {
            return Err(Error::InvalidCertificate("class contains an acyclic quiver".into()));
        }
        for pair in covering_pairs(state) {
            let r = refs.iter().find(|r| r.pair == pair).ok_or_else(|| {
                Error::InvalidCertificate(format!("covering pair ({}, {}) not refuted", pair.i, pair.j))
            })?;
            if r.deleted != pair.i && r.deleted != pair.j {
                return Err(Error::InvalidCertificate("refutation deletes a vertex outside the pair".into()));
            }
            validate_non_banff(&state.delete_vertex(r.deleted)?.0, &r.child)?;
        }
    }
    Ok(())
}

// Index of `v` once `removed` is deleted (both 1-based).
fn compact(v: usize, removed: usize) -> usize {
    if v > removed {
        v - 1
    } else {
        v
    }
}

fn expand(v: usize, removed: usize) -> usize {
    if v >= removed {
        v + 1
    } else {
        v
    }
}

fn map_seq(s: &MutationSequence, perm: &[usize]) -> MutationSequence {
    MutationSequence(s.iter().map(|&v| perm[v - 1]).collect())
}

fn map_pair(p: CoveringPair, perm: &[usize]) -> CoveringPair {
    CoveringPair { i: perm[p.i - 1], j: perm[p.j - 1] }
}

// Permutation of the quiver with `removed` deleted, induced by `perm`.
fn child_perm(perm: &[usize], removed: usize) -> Vec<usize> {
    let image = perm[removed - 1];
    (1..perm.len()).map(|t| compact(perm[expand(t, removed) - 1], image)).collect()
}

/// Rewrites a certificate for `Q` into one for `perm(Q)`, where vertex `v`
/// becomes `perm[v - 1]`.
pub fn relabel_banff(cert: &BanffCertificate, perm: &[usize]) -> BanffCertificate {
    match cert {
        BanffCertificate::AcyclicLeaf { order } => BanffCertificate::AcyclicLeaf { order: map_seq(order, perm) },
        BanffCertificate::MutationAcyclicLeaf { witness } => {
            BanffCertificate::MutationAcyclicLeaf { witness: map_seq(witness, perm) }
        }
        BanffCertificate::CoveringSplit { mutations, pair, without_i, without_j } => BanffCertificate::CoveringSplit {
            mutations: map_seq(mutations, perm),
            pair: map_pair(*pair, perm),
            without_i: Box::new(relabel_banff(without_i, &child_perm(perm, pair.i))),
            without_j: Box::new(relabel_banff(without_j, &child_perm(perm, pair.j))),
        },
    }
}

pub fn relabel_non_banff(cert: &NonBanffCertificate, perm: &[usize]) -> NonBanffCertificate {
    NonBanffCertificate {
        class: Closure { paths: cert.class.paths.iter().map(|p| map_seq(p, perm)).collect() },
        refutations: cert
            .refutations
            .iter()
            .map(|refs| {
                refs.iter()
                    .map(|r| PairRefutation {
                        pair: map_pair(r.pair, perm),
                        deleted: perm[r.deleted - 1],
                        child: relabel_non_banff(&r.child, &child_perm(perm, r.deleted)),
                    })
                    .collect()
            })
            .collect(),
    }
}

pub type BanffOutcome = TriState<BanffCertificate, NonBanffCertificate>;

enum PairsOutcome {
    Found(CoveringPair, BanffCertificate, BanffCertificate),
    Refuted(Vec<PairRefutation>),
    Unknown(Exhausted),
}

struct BanffSearch {
    limits: SearchLimits,
    deadline: Instant,
    memo: HashMap<CanonicalForm, (Quiver, BanffOutcome)>,
}

impl BanffSearch {
    fn certify(&mut self, q: &Quiver) -> Result<BanffOutcome> {
        let form = q.canonical_form();
        if let Some((stored, outcome)) = self.memo.get(&form) {
            // stored vertex v corresponds to q vertex perm[v - 1]
            let iso = canon::isomorphism(stored, q).ok_or_else(|| Error::Invariant("memo form mismatch".into()))?;
            let perm: Vec<usize> = iso.iter().map(|&v| v + 1).collect();
            return Ok(match outcome {
                TriState::Yes(c) => TriState::Yes(relabel_banff(c, &perm)),
                TriState::No(c) => TriState::No(relabel_non_banff(c, &perm)),
                TriState::Unknown(e) => TriState::Unknown(e.clone()),
            });
        }
        let outcome = self.certify_uncached(q)?;
        // Time-outs depend on the clock, not the quiver.
        if !matches!(&outcome, TriState::Unknown(e) if e.reason == ExhaustReason::Time) {
            self.memo.insert(form, (q.clone(), outcome.clone()));
        }
        Ok(outcome)
    }

    fn timed_out(&self) -> Option<Exhausted> {
        (Instant::now() >= self.deadline).then_some(Exhausted {
            reason: ExhaustReason::Time,
            limits: self.limits,
            states: self.memo.len(),
        })
    }

    fn certify_uncached(&mut self, q: &Quiver) -> Result<BanffOutcome> {
        if let Acyclicity::Acyclic(order) = q.acyclicity() {
            return Ok(TriState::Yes(BanffCertificate::AcyclicLeaf { order: MutationSequence(order) }));
        }
        if let Some(e) = self.timed_out() {
            return Ok(TriState::Unknown(e));
        }
        let mut unknown: Option<Exhausted> = None;
        let mut refutations: Vec<Vec<PairRefutation>> = Vec::new();
        match self.try_pairs(q)? {
            PairsOutcome::Found(pair, ci, cj) => {
                return Ok(TriState::Yes(split(MutationSequence::default(), pair, ci, cj)))
            }
            PairsOutcome::Refuted(r) => refutations.push(r),
            PairsOutcome::Unknown(e) => unknown = Some(e),
        }
        let remaining = self.deadline.saturating_duration_since(Instant::now()).as_millis().max(1) as u64;
        let limits = SearchLimits { max_millis: remaining.min(self.limits.max_millis), ..self.limits };
        let (ex, stop) =
            Explorer::run(q.clone(), MoveRule::Any, &limits, |state, _| Ok(state.acyclicity().is_acyclic()))?;
        let closed = match stop {
            Stop::Found(idx) => {
                return Ok(TriState::Yes(BanffCertificate::MutationAcyclicLeaf { witness: ex.path(idx) }))
            }
            Stop::Closed => true,
            Stop::Exhausted(e) => {
                unknown.get_or_insert(e);
                false
            }
        };
        let states = ex.into_states();
        for (rep, path) in states.iter().skip(1) {
            match self.try_pairs(rep)? {
                PairsOutcome::Found(pair, ci, cj) => return Ok(TriState::Yes(split(path.clone(), pair, ci, cj))),
                PairsOutcome::Refuted(r) => refutations.push(r),
                PairsOutcome::Unknown(e) => {
                    unknown.get_or_insert(e);
                }
            }
        }
        match unknown {
            Some(e) => Ok(TriState::Unknown(e)),
            None if closed => Ok(TriState::No(NonBanffCertificate {
                class: Closure { paths: states.into_iter().map(|(_, p)| p).collect() },
                refutations,
            })),
            None => Err(Error::Invariant("open mutation class without exhaustion evidence".into())),
        }
    }

    /// Tries covering pairs from the highest `(i, j)` down.
    fn try_pairs(&mut self, q: &Quiver) -> Result<PairsOutcome> {
        let mut refuted = Vec::new();
        let mut unknown = None;
        for pair in covering_pairs(q).into_iter().rev() {
            let ci = self.certify(&q.delete_vertex(pair.i)?.0)?;
            if let TriState::No(child) = ci {
                refuted.push(PairRefutation { pair, deleted: pair.i, child });
                continue;
            }
            let cj = self.certify(&q.delete_vertex(pair.j)?.0)?;
            match (ci, cj) {
                (_, TriState::No(child)) => refuted.push(PairRefutation { pair, deleted: pair.j, child }),
                (TriState::Yes(a), TriState::Yes(b)) => return Ok(PairsOutcome::Found(pair, a, b)),
                (TriState::Unknown(e), _) | (_, TriState::Unknown(e)) => {
                    unknown.get_or_insert(e);
                }
                (TriState::No(_), _) => unreachable!(),
            }
        }
        Ok(match unknown {
            Some(e) => PairsOutcome::Unknown(e),
            None => PairsOutcome::Refuted(refuted),
        })
    }
}

fn split(
    mutations: MutationSequence,
    pair: CoveringPair,
    ci: BanffCertificate,
    cj: BanffCertificate,
) -> BanffCertificate {
    BanffCertificate::CoveringSplit { mutations, pair, without_i: Box::new(ci), without_j: Box::new(cj) }
}

/// Decides Banff membership within `limits`. The time budget covers the
/// whole recursion; depth and state budgets apply to each mutation-class
/// exploration separately. Results are memoised up to isomorphism.
pub fn certify_banff(q: &Quiver, limits: &SearchLimits) -> Result<BanffOutcome> {
    if q.n_frozen() > 0 {
        return Err(Error::Precondition("expected a quiver without frozen vertices".into()));
    }
    limits.validate()?;
    let mut search = BanffSearch { limits: *limits, deadline: limits.deadline(), memo: HashMap::new() };
    search.certify(q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// A cross arrow of a triangular extension, in the combined numbering:
/// left vertices first, then right ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossArrow {
    pub from: usize,
    pub to: usize,
    #[serde(default = "one")]
    pub mult: u64,
}

fn one() -> u64 {
    1
}

/// A construction of a quiver in the class P from single vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassPTree {
    OneVertex {},
    Mutate { child: Box<ClassPTree>, sequence: MutationSequence },
    TriExt { left: Box<ClassPTree>, right: Box<ClassPTree>, arrows: Vec<CrossArrow>, direction: Direction },
}

impl ClassPTree {
    pub fn tri_ext(left: ClassPTree, right: ClassPTree, arrows: &[(usize, usize, u64)], direction: Direction) -> Self {
        ClassPTree::TriExt {
            left: Box::new(left),
            right: Box::new(right),
            arrows: arrows.iter().map(|&(from, to, mult)| CrossArrow { from, to, mult }).collect(),
            direction,
        }
    }

    pub fn mutated(self, sequence: &[usize]) -> Self {
        ClassPTree::Mutate { child: Box::new(self), sequence: MutationSequence(sequence.to_vec()) }
    }
}

/// The quiver a tree builds and the subclasses the construction witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPReport {
    pub quiver: Quiver,
    pub in_p: bool,
    pub in_p_prime: bool,
    /// Smallest `m` for which the construction lies in P'_m; `None` when
    /// it is not a P' construction.
    pub min_m: Option<usize>,
}

impl ClassPReport {
    pub fn in_p_prime_m(&self, m: usize) -> bool {
        self.min_m.is_some_and(|k| k <= m)
    }
}

pub fn verify_class_p_tree(t: &ClassPTree) -> Result<ClassPReport> {
    match t {
        ClassPTree::OneVertex {} => {
            Ok(ClassPReport { quiver: Quiver::empty(1, 0), in_p: true, in_p_prime: true, min_m: Some(0) })
        }
        ClassPTree::Mutate { child, sequence } => {
            let mut report = verify_class_p_tree(child)?;
            report.quiver = report
                .quiver
                .apply_sequence(sequence)
                .map_err(|e| Error::InvalidTree(format!("mutation {sequence}: {e}")))?;
            Ok(report)
        }
        ClassPTree::TriExt { left, right, arrows, direction } => {
            let l = verify_class_p_tree(left)?;
            let r = verify_class_p_tree(right)?;
            let (nl, nr) = (l.quiver.n_mutable(), r.quiver.n_mutable());
            let n = nl + nr;
            let mut all: Vec<Arrow> = l.quiver.mutable_arrows();
            all.extend(r.quiver.mutable_arrows().into_iter().map(|a| Arrow {
                from: a.from + nl,
                to: a.to + nl,
                mult: a.mult,
            }));
            let mut seen_dir: Option<Direction> = None;
            for a in arrows {
                if a.from == 0 || a.from > n || a.to == 0 || a.to > n {
                    return Err(Error::InvalidTree(format!(
                        "cross arrow {} -> {} references an unknown vertex",
                        a.from, a.to
                    )));
                }
                if a.mult == 0 {
                    return Err(Error::InvalidTree("cross arrow with zero multiplicity".into()));
                }
                let dir = match (a.from <= nl, a.to <= nl) {
                    (true, false) => Direction::LeftToRight,
                    (false, true) => Direction::RightToLeft,
                    _ => {
                        return Err(Error::InvalidTree(format!(
                            "arrow {} -> {} does not cross between the two sides",
                            a.from, a.to
                        )))
                    }
                };
                if seen_dir.is_some_and(|d| d != dir) {
                    return Err(Error::InvalidTree("cross arrows in both directions".into()));
                }
                seen_dir = Some(dir);
                if dir != *direction {
                    return Err(Error::InvalidTree(format!(
                        "cross arrow {} -> {} runs against {direction:?}",
                        a.from, a.to
                    )));
                }
                all.push(Arrow::new(a.from, a.to, a.mult));
            }
            let quiver = Quiver::from_arrows(n, 0, all).map_err(|e| Error::InvalidTree(e.to_string()))?;

            // P'_m: one side is a single vertex v; count the other side's
            // vertices with no arrow to or from v.
            let non_neighbours = |v: usize, others: std::ops::RangeInclusive<usize>| {
                others.filter(|&u| quiver.entry(v - 1, u - 1) == &BigInt::default()).count()
            };
            let mut candidates = Vec::new();
            if nl == 1 && r.in_p_prime {
                candidates.push(r.min_m.unwrap().max(non_neighbours(1, 2..=n)));
            }
            if nr == 1 && l.in_p_prime {
                candidates.push(l.min_m.unwrap().max(non_neighbours(n, 1..=nl)));
            }
            let min_m = candidates.into_iter().min();
            Ok(ClassPReport { quiver, in_p: true, in_p_prime: min_m.is_some(), min_m })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::Answer;

    fn q(text: &str) -> Quiver {
        Quiver::parse(text).unwrap()
    }

    const A2: &str = "vertices: 2 0\narrow: 1 2";
    const C3: &str = "vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1";
    const BANFF: &str = "vertices: 4 0\narrow: 1 2\narrow: 2 3\narrow: 3 1\narrow: 1 4\narrow: 2 4\narrow: 3 4";
    const DIRECTSUM: &str = "vertices: 6 0\narrow: 1 2\narrow: 2 3\narrow: 3 1\narrow: 4 5\narrow: 6 5\n\
        arrow: 1 4\narrow: 1 5\narrow: 2 4\narrow: 2 5 2\narrow: 2 6";
    const TORUS: &str = "vertices: 4 0\narrow: 1 2\narrow: 1 3\narrow: 2 3\narrow: 4 1\narrow: 4 2\narrow: 3 4 2";

    fn pairs(v: &[(usize, usize)]) -> Vec<CoveringPair> {
        v.iter().map(|&(i, j)| CoveringPair { i, j }).collect()
    }

    #[test]
    fn biinfinite_paths() {
        assert!(on_biinfinite_path(&q(C3), 1, 2).unwrap());
        assert!(!on_biinfinite_path(&q(BANFF), 3, 4).unwrap());
        assert!(!on_biinfinite_path(&q(A2), 1, 2).unwrap());
        assert!(on_biinfinite_path(&q(A2), 2, 1).is_err());
    }

    #[test]
    fn covering_pair_lists() {
        assert_eq!(covering_pairs(&q(BANFF)), pairs(&[(1, 4), (2, 4), (3, 4)]));
        assert!(covering_pairs(&q(C3)).is_empty());
        assert!(covering_pairs(&q(TORUS)).is_empty());
    }

    #[test]
    fn descendant_splits() {
        assert_eq!(descendant_split(&q(BANFF), 4).unwrap(), (vec![1, 2, 3], vec![4]));
        assert_eq!(descendant_split(&q(DIRECTSUM), 4).unwrap(), (vec![1, 2, 3, 6], vec![4, 5]));
        assert_eq!(descendant_split(&q(C3), 1).unwrap(), (vec![], vec![1, 2, 3]));
    }

    #[test]
    fn directsum_decompositions() {
        let d = q(DIRECTSUM);
        assert_eq!(d.condensation().components, vec![vec![1, 2, 3], vec![4], vec![5], vec![6]]);
        let splits = triangular_decompositions(&d, 100);
        let a_sides: Vec<Vec<usize>> = splits.iter().map(|(a, _)| a.clone()).collect();
        assert_eq!(a_sides, vec![vec![1, 2, 3], vec![1, 2, 3, 4], vec![1, 2, 3, 4, 6], vec![1, 2, 3, 6]]);
        assert!(splits.contains(&(vec![1, 2, 3], vec![4, 5, 6])));
        for (a, b) in &splits {
            assert!(is_triangular_split(&d, a, b));
        }
        assert_eq!(triangular_decompositions(&d, 2).len(), 2);
        assert!(triangular_decompositions(&q(C3), 10).is_empty());
    }

    #[test]
    fn source_sink_equivalence() {
        for text in [BANFF, TORUS, C3, A2] {
            assert!(check_source_sink_equivalence(&q(text)).unwrap());
        }
        assert!(check_source_sink_equivalence(&q("vertices: 3 0\narrow: 1 2")).is_err());
    }

    #[test]
    fn banff_figure() {
        let banff = q(BANFF);
        let cert = certify_banff(&banff, &SearchLimits::default()).unwrap().yes().unwrap();
        validate_banff(&banff, &cert).unwrap();
        match &cert {
            BanffCertificate::CoveringSplit { mutations, pair, without_i, without_j } => {
                assert!(mutations.is_empty());
                assert_eq!(*pair, CoveringPair { i: 3, j: 4 });
                assert!(matches!(**without_i, BanffCertificate::AcyclicLeaf { .. }));
                assert!(matches!(**without_j, BanffCertificate::MutationAcyclicLeaf { .. }));
            }
            other => panic!("unexpected certificate {other:?}"),
        }
    }

    #[test]
    fn torus_is_not_banff() {
        let torus = q(TORUS);
        match certify_banff(&torus, &SearchLimits::default()).unwrap() {
            TriState::No(c) => {
                assert_eq!(c.class.paths.len(), 1);
                validate_non_banff(&torus, &c).unwrap();
            }
            other => panic!("expected No, got {:?}", other.answer()),
        }
    }

    #[test]
    fn acyclic_is_leaf() {
        let r = certify_banff(&q(A2), &SearchLimits::default()).unwrap();
        assert_eq!(r, TriState::Yes(BanffCertificate::AcyclicLeaf { order: MutationSequence(vec![1, 2]) }));
        let markov = q("vertices: 3 0\narrow: 1 2 2\narrow: 2 3 2\narrow: 3 1 2");
        assert_eq!(certify_banff(&markov, &SearchLimits::default()).unwrap().answer(), Answer::No);
    }

    #[test]
    fn forged_certificates_fail() {
        let forged = BanffCertificate::CoveringSplit {
            mutations: MutationSequence::default(),
            pair: CoveringPair { i: 3, j: 4 },
            without_i: Box::new(BanffCertificate::AcyclicLeaf { order: MutationSequence(vec![1, 2, 3]) }),
            without_j: Box::new(BanffCertificate::AcyclicLeaf { order: MutationSequence(vec![1, 2, 3]) }),
        };
        assert!(validate_banff(&q(TORUS), &forged).is_err());
        let leaf = BanffCertificate::AcyclicLeaf { order: MutationSequence(vec![2, 1]) };
        assert!(validate_banff(&q(A2), &leaf).is_err());
    }

    #[test]
    fn relabeled_certificates_stay_valid() {
        let banff = q(BANFF);
        let cert = certify_banff(&banff, &SearchLimits::default()).unwrap().yes().unwrap();
        let perm = [4, 2, 1, 3];
        let moved = banff.permute(&perm, &[]).unwrap();
        validate_banff(&moved, &relabel_banff(&cert, &perm)).unwrap();
    }

    fn a2_tree() -> ClassPTree {
        ClassPTree::tri_ext(ClassPTree::OneVertex {}, ClassPTree::OneVertex {}, &[(1, 2, 1)], Direction::LeftToRight)
    }

    pub(crate) fn directsum_tree() -> ClassPTree {
        // 3 -> 2 -> 1 mutated at 2 is the oriented 3-cycle 1 -> 2 -> 3 -> 1.
        let path = ClassPTree::tri_ext(
            ClassPTree::tri_ext(
                ClassPTree::OneVertex {},
                ClassPTree::OneVertex {},
                &[(2, 1, 1)],
                Direction::RightToLeft,
            ),
            ClassPTree::OneVertex {},
            &[(3, 2, 1)],
            Direction::RightToLeft,
        );
        let cycle = path.mutated(&[2]);
        let right = ClassPTree::tri_ext(
            ClassPTree::tri_ext(
                ClassPTree::OneVertex {},
                ClassPTree::OneVertex {},
                &[(1, 2, 1)],
                Direction::LeftToRight,
            ),
            ClassPTree::OneVertex {},
            &[(3, 2, 1)],
            Direction::RightToLeft,
        );
        ClassPTree::tri_ext(
            cycle,
            right,
            &[(1, 4, 1), (1, 5, 1), (2, 4, 1), (2, 5, 2), (2, 6, 1)],
            Direction::LeftToRight,
        )
    }

    #[test]
    fn class_p_trees() {
        let r = verify_class_p_tree(&a2_tree()).unwrap();
        assert_eq!(r.quiver, q(A2));
        assert!(r.in_p && r.in_p_prime && r.in_p_prime_m(0));

        let d = verify_class_p_tree(&directsum_tree()).unwrap();
        assert_eq!(d.quiver, q(DIRECTSUM));
        assert!(d.in_p);
        assert!(!d.in_p_prime);

        let m = verify_class_p_tree(&a2_tree().mutated(&[1])).unwrap();
        assert_eq!(m.quiver, q("vertices: 2 0\narrow: 2 1"));

        assert_eq!(verify_class_p_tree(&ClassPTree::OneVertex {}).unwrap().quiver, q("vertices: 1 0"));
    }

    #[test]
    fn class_p_prime_m() {
        // Vertex 4 attached to two of the three vertices of a path.
        let path = ClassPTree::tri_ext(a2_tree(), ClassPTree::OneVertex {}, &[(2, 3, 1)], Direction::LeftToRight);
        let t = ClassPTree::tri_ext(path, ClassPTree::OneVertex {}, &[(1, 4, 1), (3, 4, 1)], Direction::LeftToRight);
        let r = verify_class_p_tree(&t).unwrap();
        assert!(r.in_p_prime);
        assert_eq!(r.min_m, Some(1));
        assert!(!r.in_p_prime_m(0));
    }

    #[test]
    fn bad_trees() {
        let unknown = ClassPTree::tri_ext(
            ClassPTree::OneVertex {},
            ClassPTree::OneVertex {},
            &[(1, 3, 1)],
            Direction::LeftToRight,
        );
        assert!(matches!(verify_class_p_tree(&unknown), Err(Error::InvalidTree(_))));
        let both =
            ClassPTree::tri_ext(a2_tree(), ClassPTree::OneVertex {}, &[(1, 3, 1), (3, 2, 1)], Direction::LeftToRight);
        assert!(matches!(verify_class_p_tree(&both), Err(Error::InvalidTree(m)) if m.contains("both directions")));
        let against = ClassPTree::tri_ext(
            ClassPTree::OneVertex {},
            ClassPTree::OneVertex {},
            &[(2, 1, 1)],
            Direction::LeftToRight,
        );
        assert!(verify_class_p_tree(&against).is_err());
    }

    #[test]
    fn tree_json_shape() {
        let json = r#"{"node":"tri_ext","left":{"node":"one_vertex"},"right":{"node":"one_vertex"},
            "arrows":[{"from":1,"to":2}],"direction":"left_to_right"}"#;
        let t: ClassPTree = serde_json::from_str(json).unwrap();
        assert_eq!(t, a2_tree());
        let extra = r#"{"node":"one_vertex","colour":"red"}"#;
        assert!(serde_json::from_str::<ClassPTree>(extra).is_err());
    }
}
