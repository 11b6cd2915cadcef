//! Quivers with frozen vertices, stored as integer exchange matrices.
//!
//! A quiver with `m` mutable and `f` frozen vertices is a `(m + f) x m`
//! matrix `b` where `b[i][j]` is the number of arrows `i -> j` minus the
//! number of arrows `j -> i`. Arrows between two frozen vertices have no
//! column to live in, so they can never be stored. Vertices are numbered
//! from 1 in every public API; frozen vertices follow the mutable ones.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::canon::{self, CanonicalForm};
use crate::error::{Error, Result};

/// An exchange-matrix quiver. Values are immutable once built; every
/// operation returns a new quiver.
#[derive(Clone, Debug)]
pub struct Quiver {
    n_mutable: usize,
    n_frozen: usize,
    b: Vec<BigInt>,
    labels: Option<Vec<String>>,
}

// Labels are display metadata and take no part in equality.
impl PartialEq for Quiver {
    fn eq(&self, other: &Self) -> bool {
        self.n_mutable == other.n_mutable && self.n_frozen == other.n_frozen && self.b == other.b
    }
}

impl Eq for Quiver {}

impl Hash for Quiver {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.n_mutable.hash(state);
        self.n_frozen.hash(state);
        self.b.hash(state);
    }
}

/// A directed arrow with positive multiplicity, 1-based endpoints.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arrow {
    pub from: usize,
    pub to: usize,
    pub mult: BigInt,
}

impl Arrow {
    pub fn new(from: usize, to: usize, mult: impl Into<BigInt>) -> Self {
        Arrow { from, to, mult: mult.into() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Framing {
    /// One arrow `i -> i'` per mutable vertex.
    Framed,
    /// One arrow `i' -> i` per mutable vertex.
    Coframed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexColor {
    Green,
    Red,
}

/// Result of an acyclicity test on the mutable part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Acyclicity {
    /// Topological order, lowest available vertex first.
    Acyclic(Vec<usize>),
    /// Vertices of a directed cycle in path order.
    Cyclic(Vec<usize>),
}

impl Acyclicity {
    pub fn is_acyclic(&self) -> bool {
        matches!(self, Acyclicity::Acyclic(_))
    }
}

/// Strongly connected components of the mutable part and the DAG between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condensation {
    /// Components sorted by smallest member, each sorted ascending.
    pub components: Vec<Vec<usize>>,
    /// Edges `(from, to)` between component indices, sorted and deduplicated.
    pub edges: Vec<(usize, usize)>,
}

impl Condensation {
    /// Index of the component containing vertex `v`.
    pub fn component_of(&self, v: usize) -> Option<usize> {
        self.components.iter().position(|c| c.contains(&v))
    }
}

/// An ordered list of 1-based mutable vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MutationSequence(pub Vec<usize>);

impl MutationSequence {
    pub fn new(entries: Vec<usize>) -> Self {
        MutationSequence(entries)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &usize> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for MutationSequence {
    fn from(v: Vec<usize>) -> Self {
        MutationSequence(v)
    }
}

impl fmt::Display for MutationSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for MutationSequence {
    type Err = Error;

    /// Comma-separated 1-based indices; surrounding parentheses are allowed.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches('(').trim_end_matches(')').trim();
        if body.is_empty() {
            return Ok(MutationSequence::default());
        }
        body.split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Malformed { line: 0, msg: format!("bad sequence entry {:?}", tok.trim()) })
            })
            .collect::<Result<Vec<_>>>()
            .map(MutationSequence)
    }
}

impl Quiver {
    /// A quiver with the given vertex counts and no arrows.
    pub fn empty(n_mutable: usize, n_frozen: usize) -> Self {
        Quiver { n_mutable, n_frozen, b: vec![BigInt::zero(); (n_mutable + n_frozen) * n_mutable], labels: None }
    }

    /// Builds a quiver from arrows, rejecting loops, 2-cycles and
    /// frozen-frozen arrows. Repeated arrows in the same direction add up.
    pub fn from_arrows<I>(n_mutable: usize, n_frozen: usize, arrows: I) -> Result<Self>
    where
        I: IntoIterator<Item = Arrow>,
    {
        let mut builder = Builder::new(n_mutable, n_frozen);
        for a in arrows {
            builder.add(0, a.from, a.to, a.mult)?;
        }
        Ok(builder.finish())
    }

    /// Parses the line-oriented quiver text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut builder: Option<Builder> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let malformed = |msg: &str| Error::Malformed { line: line_no, msg: msg.to_string() };
            let (key, rest) = line.split_once(':').ok_or_else(|| malformed("expected `key: values`"))?;
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match key.trim() {
                "vertices" => {
                    if builder.is_some() {
                        return Err(malformed("duplicate `vertices` line"));
                    }
                    if fields.len() != 2 {
                        return Err(malformed("`vertices` takes <n_mutable> <n_frozen>"));
                    }
                    let m = fields[0].parse::<usize>().map_err(|_| malformed("bad vertex count"))?;
                    let f = fields[1].parse::<usize>().map_err(|_| malformed("bad vertex count"))?;
                    builder = Some(Builder::new(m, f));
                }
                "arrow" => {
                    let b = builder.as_mut().ok_or_else(|| malformed("`arrow` before `vertices`"))?;
                    if fields.len() != 2 && fields.len() != 3 {
                        return Err(malformed("`arrow` takes <from> <to> [mult]"));
                    }
                    let from = fields[0].parse::<usize>().map_err(|_| malformed("bad vertex index"))?;
                    let to = fields[1].parse::<usize>().map_err(|_| malformed("bad vertex index"))?;
                    let mult = match fields.get(2) {
                        Some(m) => m.parse::<BigInt>().map_err(|_| malformed("bad multiplicity"))?,
                        None => BigInt::one(),
                    };
                    if !mult.is_positive() {
                        return Err(malformed("multiplicity must be a positive integer"));
                    }
                    b.add(line_no, from, to, mult)?;
                }
                other => return Err(malformed(&format!("unknown key `{other}`"))),
            }
        }
        builder.map(Builder::finish).ok_or(Error::Malformed { line: 0, msg: "missing `vertices` line".into() })
    }

    /// Serializes to the quiver text format, arrows sorted by `(from, to)`.
    pub fn to_text(&self) -> String {
        let mut out = format!("vertices: {} {}\n", self.n_mutable, self.n_frozen);
        for a in self.arrows() {
            if a.mult.is_one() {
                out.push_str(&format!("arrow: {} {}\n", a.from, a.to));
            } else {
                out.push_str(&format!("arrow: {} {} {}\n", a.from, a.to, a.mult));
            }
        }
        out
    }

    pub fn n_mutable(&self) -> usize {
        self.n_mutable
    }

    pub fn n_frozen(&self) -> usize {
        self.n_frozen
    }

    pub fn n_vertices(&self) -> usize {
        self.n_mutable + self.n_frozen
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n_vertices() {
            return Err(Error::Precondition(format!("expected {} labels, got {}", self.n_vertices(), labels.len())));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn is_mutable(&self, v: usize) -> bool {
        (1..=self.n_mutable).contains(&v)
    }

    // 0-based entry; j must be mutable.
    #[inline]
    pub(crate) fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.b[i * self.n_mutable + j]
    }

    /// 0-based signed arrow count between any two vertices.
    pub(crate) fn weight0(&self, u: usize, v: usize) -> BigInt {
        if v < self.n_mutable {
            self.entry(u, v).clone()
        } else if u < self.n_mutable {
            -self.entry(v, u)
        } else {
            BigInt::zero()
        }
    }

    /// `#(u -> v) - #(v -> u)` for 1-based vertices.
    pub fn weight(&self, u: usize, v: usize) -> Result<BigInt> {
        let n = self.n_vertices();
        for x in [u, v] {
            if x == 0 || x > n {
                return Err(Error::VertexOutOfRange { vertex: x, count: n });
            }
        }
        Ok(self.weight0(u - 1, v - 1))
    }

    /// All arrows, sorted by `(from, to)`.
    pub fn arrows(&self) -> Vec<Arrow> {
        let n = self.n_vertices();
        let mut out = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if u == v {
                    continue;
                }
                let w = self.weight0(u, v);
                if w.is_positive() {
                    out.push(Arrow { from: u + 1, to: v + 1, mult: w });
                }
            }
        }
        out
    }

    /// Arrows with both ends mutable.
    pub fn mutable_arrows(&self) -> Vec<Arrow> {
        self.arrows().into_iter().filter(|a| a.from <= self.n_mutable && a.to <= self.n_mutable).collect()
    }

    /// 0-based out-neighbours inside the mutable part, ascending.
    pub(crate) fn successors0(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_mutable).filter(move |&v| v != u && self.entry(u, v).is_positive())
    }

    pub(crate) fn predecessors0(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_mutable).filter(move |&v| v != u && self.entry(u, v).is_negative())
    }

    fn check_mutable(&self, k: usize) -> Result<usize> {
        if k == 0 || k > self.n_vertices() {
            return Err(Error::VertexOutOfRange { vertex: k, count: self.n_vertices() });
        }
        if k > self.n_mutable {
            return Err(Error::FrozenVertex(k));
        }
        Ok(k - 1)
    }

    /// Mutation at the mutable vertex `k`: for every path `i -> k -> j` add an
    /// arrow `i -> j`, reverse the arrows at `k`, cancel 2-cycles.
    pub fn mutate(&self, k: usize) -> Result<Quiver> {
        let k0 = self.check_mutable(k)?;
        let n = self.n_mutable;
        let mut b = self.b.clone();
        for i in 0..self.n_vertices() {
            let bik = self.entry(i, k0);
            for j in 0..n {
                let idx = i * n + j;
                if i == k0 || j == k0 {
                    b[idx] = -&self.b[idx];
                    continue;
                }
                let bkj = self.entry(k0, j);
                if bik.is_positive() && bkj.is_positive() {
                    b[idx] += bik * bkj;
                } else if bik.is_negative() && bkj.is_negative() {
                    b[idx] -= bik * bkj;
                }
            }
        }
        Ok(Quiver { n_mutable: n, n_frozen: self.n_frozen, b, labels: self.labels.clone() })
    }

    /// Left-to-right composition of [`Quiver::mutate`].
    pub fn apply_sequence(&self, s: &MutationSequence) -> Result<Quiver> {
        let mut q = self.clone();
        for &k in s.iter() {
            q = q.mutate(k)?;
        }
        Ok(q)
    }

    /// Adds one frozen copy `i'` (index `n + i`) per mutable vertex.
    pub fn frame(&self, framing: Framing) -> Result<Quiver> {
        if self.n_frozen > 0 {
            return Err(Error::AlreadyFramed);
        }
        let n = self.n_mutable;
        let mut q = Quiver::empty(n, n);
        q.b[..n * n].clone_from_slice(&self.b);
        let sign = match framing {
            // i -> i' means b[i'][i] = -1.
            Framing::Framed => -BigInt::one(),
            Framing::Coframed => BigInt::one(),
        };
        for i in 0..n {
            q.b[(n + i) * n + i] = sign.clone();
        }
        q.labels = self.labels.as_ref().map(|ls| {
            let mut out = ls.clone();
            out.extend(ls.iter().map(|l| format!("{l}'")));
            out
        });
        Ok(q)
    }

    /// The mutable part, dropping every frozen vertex.
    pub fn unfrozen(&self) -> Quiver {
        let n = self.n_mutable;
        Quiver {
            n_mutable: n,
            n_frozen: 0,
            b: self.b[..n * n].to_vec(),
            labels: self.labels.as_ref().map(|l| l[..n].to_vec()),
        }
    }

    /// Restriction to `vertices`. Mutable vertices keep their relative order
    /// and come first; the returned map sends new index `t + 1` to `map[t]`.
    pub fn induced_subquiver(&self, vertices: &[usize]) -> Result<(Quiver, Vec<usize>)> {
        let count = self.n_vertices();
        let mut keep: Vec<usize> = vertices.to_vec();
        for &v in &keep {
            if v == 0 || v > count {
                return Err(Error::VertexOutOfRange { vertex: v, count });
            }
        }
        keep.sort_unstable();
        keep.dedup();
        let n_mut = keep.iter().filter(|&&v| v <= self.n_mutable).count();
        let n_fro = keep.len() - n_mut;
        let mut q = Quiver::empty(n_mut, n_fro);
        for (ni, &oi) in keep.iter().enumerate() {
            for (nj, &oj) in keep[..n_mut].iter().enumerate() {
                q.b[ni * n_mut + nj] = self.entry(oi - 1, oj - 1).clone();
            }
        }
        q.labels = self.labels.as_ref().map(|ls| keep.iter().map(|&v| ls[v - 1].clone()).collect());
        Ok((q, keep))
    }

    /// `Q \ {v}` together with its index map.
    pub fn delete_vertex(&self, v: usize) -> Result<(Quiver, Vec<usize>)> {
        if v == 0 || v > self.n_vertices() {
            return Err(Error::VertexOutOfRange { vertex: v, count: self.n_vertices() });
        }
        let rest: Vec<usize> = (1..=self.n_vertices()).filter(|&u| u != v).collect();
        self.induced_subquiver(&rest)
    }

    /// Green when every frozen arrow at `k` leaves `k`, red otherwise.
    /// Frozen arrows in both directions violate sign-coherence.
    pub fn vertex_status(&self, k: usize) -> Result<VertexColor> {
        let k0 = self.check_mutable(k)?;
        let mut incoming = false;
        let mut outgoing = false;
        for f in self.n_mutable..self.n_vertices() {
            let w = self.entry(f, k0);
            if w.is_positive() {
                incoming = true;
            } else if w.is_negative() {
                outgoing = true;
            }
        }
        match (incoming, outgoing) {
            (true, true) => Err(Error::SignCoherence(k)),
            (true, false) => Ok(VertexColor::Red),
            (false, _) => Ok(VertexColor::Green),
        }
    }

    /// True when every mutable vertex is red.
    pub fn all_red(&self) -> Result<bool> {
        for k in 1..=self.n_mutable {
            if self.vertex_status(k)? == VertexColor::Green {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Signed frozen-arrow matrix: entry `[f][j]` is `#(j -> f') - #(f' -> j)`,
    /// so the framed quiver gives the identity.
    pub fn frozen_pattern(&self) -> Vec<Vec<BigInt>> {
        (self.n_mutable..self.n_vertices()).map(|f| (0..self.n_mutable).map(|j| -self.entry(f, j)).collect()).collect()
    }

    /// Topological order (lowest index first) or a directed cycle witness.
    pub fn acyclicity(&self) -> Acyclicity {
        let n = self.n_mutable;
        let mut indeg: Vec<usize> = (0..n).map(|v| self.predecessors0(v).count()).collect();
        let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(u)) = heap.pop() {
            order.push(u + 1);
            for v in self.successors0(u) {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    heap.push(Reverse(v));
                }
            }
        }
        if order.len() == n {
            return Acyclicity::Acyclic(order);
        }
        Acyclicity::Cyclic(self.find_cycle().expect("Kahn's algorithm left vertices, so a cycle exists"))
    }

    // Depth-first search from the lowest vertex, successors ascending.
    fn find_cycle(&self) -> Option<Vec<usize>> {
        let n = self.n_mutable;
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut stack: Vec<usize> = Vec::new();
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            if let Some(c) = self.cycle_dfs(root, &mut state, &mut stack) {
                return Some(c);
            }
        }
        None
    }

    fn cycle_dfs(&self, u: usize, state: &mut [u8], stack: &mut Vec<usize>) -> Option<Vec<usize>> {
        state[u] = 1;
        stack.push(u);
        let succ: Vec<usize> = self.successors0(u).collect();
        for v in succ {
            match state[v] {
                1 => {
                    let start = stack.iter().position(|&x| x == v).unwrap();
                    return Some(stack[start..].iter().map(|&x| x + 1).collect());
                }
                0 => {
                    if let Some(c) = self.cycle_dfs(v, state, stack) {
                        return Some(c);
                    }
                }
                _ => {}
            }
        }
        stack.pop();
        state[u] = 2;
        None
    }

    /// Strongly connected components of the mutable part.
    pub fn condensation(&self) -> Condensation {
        let n = self.n_mutable;
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, 0);
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for u in 0..n {
            for v in self.successors0(u) {
                g.add_edge(nodes[u], nodes[v], ());
            }
        }
        let mut components: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|x| x.index() + 1).collect();
                c.sort_unstable();
                c
            })
            .collect();
        components.sort();
        let mut comp_of = vec![0usize; n];
        for (ci, c) in components.iter().enumerate() {
            for &v in c {
                comp_of[v - 1] = ci;
            }
        }
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for u in 0..n {
            for v in self.successors0(u) {
                if comp_of[u] != comp_of[v] {
                    edges.push((comp_of[u], comp_of[v]));
                }
            }
        }
        edges.sort_unstable();
        edges.dedup();
        Condensation { components, edges }
    }

    /// Vertices with no incoming, resp. no outgoing, mutable arrows.
    pub fn sources_and_sinks(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.n_mutable;
        let sources = (0..n).filter(|&v| self.predecessors0(v).next().is_none()).map(|v| v + 1).collect();
        let sinks = (0..n).filter(|&v| self.successors0(v).next().is_none()).map(|v| v + 1).collect();
        (sources, sinks)
    }

    /// 1-based vertices reachable from `start` along mutable arrows, including `start`.
    pub fn forward_reachable(&self, start: usize) -> Vec<bool> {
        self.reach(&[start - 1], true)
    }

    pub(crate) fn reach(&self, roots: &[usize], forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n_mutable];
        let mut stack: Vec<usize> = roots.to_vec();
        for &r in roots {
            seen[r] = true;
        }
        while let Some(u) = stack.pop() {
            let next: Vec<usize> =
                if forward { self.successors0(u).collect() } else { self.predecessors0(u).collect() };
            for v in next {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canon::canonical_labeling(self).form
    }

    /// Relabels mutable vertex `v` as `mutable_perm[v - 1]` and frozen vertex
    /// `n + f` as `n + frozen_perm[f - 1]`. An empty frozen permutation means identity.
    pub fn permute(&self, mutable_perm: &[usize], frozen_perm: &[usize]) -> Result<Quiver> {
        let n = self.n_mutable;
        let is_perm = |p: &[usize], len: usize| {
            let mut s = p.to_vec();
            s.sort_unstable();
            s == (1..=len).collect::<Vec<_>>()
        };
        if mutable_perm.len() != n || !is_perm(mutable_perm, n) {
            return Err(Error::Precondition("mutable permutation is not a bijection".into()));
        }
        let frozen: Vec<usize> =
            if frozen_perm.is_empty() { (1..=self.n_frozen).collect() } else { frozen_perm.to_vec() };
        if frozen.len() != self.n_frozen || !is_perm(&frozen, self.n_frozen) {
            return Err(Error::Precondition("frozen permutation is not a bijection".into()));
        }
        let image = |v: usize| if v < n { mutable_perm[v] - 1 } else { n + frozen[v - n] - 1 };
        let mut q = Quiver::empty(n, self.n_frozen);
        for i in 0..self.n_vertices() {
            for j in 0..n {
                q.b[image(i) * n + image(j)] = self.entry(i, j).clone();
            }
        }
        if let Some(ls) = &self.labels {
            let mut out = ls.clone();
            for (v, l) in ls.iter().enumerate() {
                out[image(v)] = l.clone();
            }
            q.labels = Some(out);
        }
        Ok(q)
    }

    /// Largest absolute arrow multiplicity.
    pub fn max_multiplicity(&self) -> BigInt {
        self.b.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

impl fmt::Display for Quiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Quiver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Quiver::parse(s)
    }
}

struct Builder {
    n_mutable: usize,
    n_frozen: usize,
    arrows: BTreeMap<(usize, usize), BigInt>,
}

impl Builder {
    fn new(n_mutable: usize, n_frozen: usize) -> Self {
        Builder { n_mutable, n_frozen, arrows: BTreeMap::new() }
    }

    fn add(&mut self, line: usize, from: usize, to: usize, mult: BigInt) -> Result<()> {
        let count = self.n_mutable + self.n_frozen;
        for v in [from, to] {
            if v == 0 || v > count {
                return Err(Error::VertexOutOfRange { vertex: v, count });
            }
        }
        if from == to {
            return Err(Error::Loop { line, vertex: from });
        }
        if from > self.n_mutable && to > self.n_mutable {
            return Err(Error::FrozenArrow { line, a: from, b: to });
        }
        if !mult.is_positive() {
            return Err(Error::Malformed { line, msg: "multiplicity must be positive".into() });
        }
        if self.arrows.contains_key(&(to, from)) {
            return Err(Error::TwoCycle { line, a: from, b: to });
        }
        *self.arrows.entry((from, to)).or_default() += mult;
        Ok(())
    }

    fn finish(self) -> Quiver {
        let mut q = Quiver::empty(self.n_mutable, self.n_frozen);
        let n = self.n_mutable;
        for ((from, to), m) in self.arrows {
            let (u, v) = (from - 1, to - 1);
            if v < n {
                q.b[u * n + v] += &m;
            }
            if u < n {
                q.b[v * n + u] -= &m;
            }
        }
        q
    }
}
