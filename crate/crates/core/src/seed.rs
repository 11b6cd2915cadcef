//! Seeds with principal coefficients in the tropical semifield on
//! `y1..yn`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Term};
use crate::quiver::Quiver;

pub const MAX_RANK: usize = 16;

/// `y^e` in the tropical semifield: product adds exponents, sum takes the
/// componentwise minimum.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TropMonomial(pub Vec<i64>);

impl TropMonomial {
    pub fn one(n: usize) -> Self {
        TropMonomial(vec![0; n])
    }

    pub fn generator(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i - 1] = 1;
        TropMonomial(e)
    }

    pub fn exponents(&self) -> &[i64] {
        &self.0
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_add(b))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.checked_sub(b))
    }

    pub fn add(&self, other: &Self) -> Self {
        TropMonomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn pow(&self, k: i64) -> Result<Self> {
        self.0
            .iter()
            .map(|a| a.checked_mul(k).ok_or(Error::Overflow("tropical exponent")))
            .collect::<Result<_>>()
            .map(TropMonomial)
    }

    pub fn inverse(&self) -> Result<Self> {
        Self::one(self.0.len()).div(self)
    }

    fn zip(&self, other: &Self, op: impl Fn(i64, i64) -> Option<i64>) -> Result<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| op(*a, *b).ok_or(Error::Overflow("tropical exponent")))
            .collect::<Result<_>>()
            .map(TropMonomial)
    }

    fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    fn is_nonpositive(&self) -> bool {
        self.0.iter().all(|&a| a <= 0)
    }
}

impl fmt::Display for TropMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e != 0)
            .map(|(i, &e)| if e == 1 { format!("y{}", i + 1) } else { format!("y{}^{e}", i + 1) })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    pub cluster: Vec<LaurentPoly>,
    pub coeffs: Vec<TropMonomial>,
    pub quiver: Quiver,
}

/// JSON form of a seed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedReport {
    pub rank: usize,
    pub cluster: Vec<Vec<Term>>,
    pub coefficients: Vec<TropMonomial>,
    pub quiver: String,
}

impl Seed {
    pub fn rank(&self) -> usize {
        self.cluster.len()
    }

    pub fn report(&self) -> SeedReport {
        SeedReport {
            rank: self.rank(),
            cluster: self.cluster.iter().map(LaurentPoly::to_terms).collect(),
            coefficients: self.coeffs.clone(),
            quiver: self.quiver.to_text(),
        }
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.cluster.iter().enumerate() {
            writeln!(f, "x{}' = {x}", i + 1)?;
        }
        for (i, y) in self.coeffs.iter().enumerate() {
            writeln!(f, "y{}' = {y}", i + 1)?;
        }
        Ok(())
    }
}

pub fn seed_initial(q: &Quiver) -> Result<Seed> {
    if q.n_frozen() > 0 {
        return Err(Error::Precondition("seeds are built on quivers without frozen vertices".into()));
    }
    let n = q.n_mutable();
    if n > MAX_RANK {
        return Err(Error::Precondition(format!("rank {n} exceeds the supported maximum {MAX_RANK}")));
    }
    Ok(Seed {
        cluster: (1..=n).map(|i| LaurentPoly::x(n, i)).collect(),
        coeffs: (1..=n).map(|i| TropMonomial::generator(n, i)).collect(),
        quiver: q.clone(),
    })
}

fn small(b: &BigInt) -> Result<i64> {
    b.to_i64().ok_or(Error::Overflow("exchange matrix entry"))
}

/// `y ⊕ 1`, which by sign-coherence is either `1` or `y` itself.
fn oplus_one(y: &TropMonomial, i: usize) -> Result<TropMonomial> {
    let s = y.add(&TropMonomial::one(y.0.len()));
    if s.0.iter().all(|&a| a == 0) || s == *y {
        Ok(s)
    } else {
        Err(Error::SignCoherence(i))
    }
}

/// Embeds a tropical monomial as a Laurent monomial in the `y` variables.
fn y_monomial(n: usize, y: &TropMonomial) -> Result<LaurentPoly> {
    let mut e = vec![0i32; 2 * n];
    for (slot, &a) in e[n..].iter_mut().zip(&y.0) {
        *slot = i32::try_from(a).map_err(|_| Error::Overflow("Laurent exponent"))?;
    }
    Ok(LaurentPoly::monomial(n, e, BigInt::one()))
}

pub fn seed_mutate(s: &Seed, i: usize) -> Result<Seed> {
    let mut unlimited = u64::MAX;
    seed_mutate_within(s, i, &mut unlimited)
}

/// [`seed_mutate`] with a cap on polynomial work, counted in term pairs.
/// Cluster variables can grow very quickly on quivers of wild type, so
/// callers exploring at random pass a finite budget and get
/// [`Error::WorkBudget`] instead of an unbounded computation.
pub fn seed_mutate_within(s: &Seed, i: usize, work: &mut u64) -> Result<Seed> {
    let n = s.rank();
    if i == 0 || i > n {
        return Err(Error::VertexOutOfRange { vertex: i, count: n });
    }
    let q = &s.quiver;
    let row = exchange_row(q, i)?;
    let y_i = &s.coeffs[i - 1];
    let denom = oplus_one(y_i, i)?;
    let c_out = y_i.div(&denom)?;
    let c_in = denom.inverse()?;

    let mut out_term = y_monomial(n, &c_out)?;
    let mut in_term = y_monomial(n, &c_in)?;
    for (j, &b) in row.iter().enumerate() {
        let exponent = u32::try_from(b.unsigned_abs()).map_err(|_| Error::Overflow("exchange exponent"))?;
        if b > 0 {
            out_term = out_term.mul_within(&s.cluster[j].pow_within(exponent, work)?, work)?;
        } else if b < 0 {
            in_term = in_term.mul_within(&s.cluster[j].pow_within(exponent, work)?, work)?;
        }
    }
    let numerator = out_term.add(&in_term);
    let x_new = numerator.div_exact_within(&s.cluster[i - 1], work).map_err(|e| match e {
        Error::InexactDivision(msg) => Error::InexactDivision(format!("exchange at vertex {i}: {msg}")),
        other => other,
    })?;

    let mut cluster = s.cluster.clone();
    cluster[i - 1] = x_new;
    Ok(Seed { cluster, coeffs: mutate_coefficients(&s.coeffs, q, i)?, quiver: q.mutate(i)? })
}

fn exchange_row(q: &Quiver, i: usize) -> Result<Vec<i64>> {
    (0..q.n_mutable()).map(|j| small(q.entry(i - 1, j))).collect()
}

/// The coefficient half of a seed mutation at `i`, which does not depend on
/// the cluster.
pub fn mutate_coefficients(coeffs: &[TropMonomial], q: &Quiver, i: usize) -> Result<Vec<TropMonomial>> {
    let n = coeffs.len();
    if i == 0 || i > n || q.n_mutable() != n {
        return Err(Error::VertexOutOfRange { vertex: i, count: n });
    }
    let row = exchange_row(q, i)?;
    let y_i = &coeffs[i - 1];
    let denom = oplus_one(y_i, i)?;
    let c_out = y_i.div(&denom)?;
    let mut out = coeffs.to_vec();
    for k in 1..=n {
        out[k - 1] = if k == i {
            y_i.inverse()?
        } else {
            let y_k = &coeffs[k - 1];
            let b = row[k - 1];
            // Both cases apply when there is no arrow between i and k; they
            // must then agree.
            let outgoing = if b >= 0 { Some(y_k.mul(&denom.pow(b)?)?) } else { None };
            let incoming = if b <= 0 { Some(y_k.mul(&c_out.pow(-b)?)?) } else { None };
            match (outgoing, incoming) {
                (Some(a), Some(c)) if a != c => {
                    return Err(Error::Invariant(format!("coefficient rules disagree at {k}")))
                }
                (Some(a), _) | (None, Some(a)) => a,
                (None, None) => unreachable!(),
            }
        };
    }
    Ok(out)
}

/// The c-matrix, indexed `[row][column]` like [`Quiver::frozen_pattern`]:
/// column `j` is the exponent vector of `y_j`.
pub fn c_vectors(s: &Seed) -> Result<Vec<Vec<i64>>> {
    c_matrix(&s.coeffs)
}

/// [`c_vectors`] from the coefficients alone.
pub fn c_matrix(coeffs: &[TropMonomial]) -> Result<Vec<Vec<i64>>> {
    let n = coeffs.len();
    for (j, y) in coeffs.iter().enumerate() {
        if !(y.is_nonnegative() || y.is_nonpositive()) {
            return Err(Error::SignCoherence(j + 1));
        }
    }
    Ok((0..n).map(|r| (0..n).map(|j| coeffs[j].0[r]).collect()).collect())
}

pub fn laurent_positivity_check(s: &Seed) -> bool {
    s.cluster.iter().all(LaurentPoly::is_positive_in_y)
}

/// Applies a sequence of seed mutations.
pub fn seed_apply(s: &Seed, seq: &[usize]) -> Result<Seed> {
    let mut cur = s.clone();
    for &k in seq {
        cur = seed_mutate(&cur, k)?;
    }
    Ok(cur)
}

/// The frozen pattern as machine integers, for comparison with
/// [`c_vectors`].
pub fn frozen_pattern_i64(q: &Quiver) -> Result<Vec<Vec<i64>>> {
    q.frozen_pattern().iter().map(|row| row.iter().map(small).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::{Framing, MutationSequence};

    fn a2() -> Quiver {
        Quiver::parse("vertices: 2 0\narrow: 1 2").unwrap()
    }

    fn poly(n: usize, terms: &[(&[i32], i64)]) -> LaurentPoly {
        LaurentPoly::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c)))).unwrap()
    }

    #[test]
    fn initial_seed() {
        let s = seed_initial(&a2()).unwrap();
        assert_eq!(s.cluster, vec![LaurentPoly::x(2, 1), LaurentPoly::x(2, 2)]);
        assert_eq!(s.coeffs, vec![TropMonomial(vec![1, 0]), TropMonomial(vec![0, 1])]);
        assert_eq!(c_vectors(&s).unwrap(), vec![vec![1, 0], vec![0, 1]]);
        assert!(laurent_positivity_check(&s));
        assert!(seed_initial(&a2().frame(Framing::Framed).unwrap()).is_err());
        let c3 = Quiver::parse("vertices: 3 0\narrow: 1 2\narrow: 2 3\narrow: 3 1").unwrap();
        assert_eq!(seed_initial(&c3).unwrap().coeffs[2], TropMonomial(vec![0, 0, 1]));
    }

    #[test]
    fn a2_exchanges() {
        let s1 = seed_mutate(&seed_initial(&a2()).unwrap(), 1).unwrap();
        // (y1 x2 + 1) / x1
        assert_eq!(s1.cluster[0], poly(2, &[(&[-1, 1, 1, 0], 1), (&[-1, 0, 0, 0], 1)]));
        assert_eq!(s1.coeffs, vec![TropMonomial(vec![-1, 0]), TropMonomial(vec![0, 1])]);
        assert_eq!(c_vectors(&s1).unwrap(), vec![vec![-1, 0], vec![0, 1]]);

        let s2 = seed_mutate(&s1, 2).unwrap();
        // (y1 y2 x2 + y2 + x1) / (x1 x2)
        let expected = poly(2, &[(&[-1, 0, 1, 1], 1), (&[-1, -1, 0, 1], 1), (&[0, -1, 0, 0], 1)]);
        assert_eq!(s2.cluster[1], expected);
        assert_eq!(s2.coeffs, vec![TropMonomial(vec![-1, 0]), TropMonomial(vec![0, -1])]);
    }

    #[test]
    fn involution() {
        let s = seed_initial(&a2()).unwrap();
        let t = seed_mutate(&seed_mutate(&s, 2).unwrap(), 2).unwrap();
        assert_eq!(t, s);
    }

    #[test]
    fn pentagon() {
        let s = seed_initial(&a2()).unwrap();
        let t = seed_apply(&s, &[1, 2, 1, 2, 1]).unwrap();
        assert_eq!(t.cluster[0], s.cluster[1]);
        assert_eq!(t.cluster[1], s.cluster[0]);
        assert_eq!(t.coeffs[0], s.coeffs[1]);
        assert_eq!(t.coeffs[1], s.coeffs[0]);
    }

    #[test]
    fn c_vectors_follow_framed_quiver() {
        let q = Quiver::parse("vertices: 3 0\narrow: 1 2 2\narrow: 2 3\narrow: 3 1").unwrap();
        let mut s = seed_initial(&q).unwrap();
        let mut f = q.frame(Framing::Framed).unwrap();
        for &k in &[1, 3, 2, 1, 2] {
            s = seed_mutate(&s, k).unwrap();
            f = f.mutate(k).unwrap();
            assert_eq!(c_vectors(&s).unwrap(), frozen_pattern_i64(&f).unwrap());
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn reddening_gives_negative_permutation() {
        let torus =
            Quiver::parse("vertices: 4 0\narrow: 1 2\narrow: 1 3\narrow: 2 3\narrow: 4 1\narrow: 4 2\narrow: 3 4 2")
                .unwrap();
        let s = seed_apply(&seed_initial(&torus).unwrap(), &[1, 3, 4, 2, 1, 3]).unwrap();
        let c = c_vectors(&s).unwrap();
        for j in 0..4 {
            let col: Vec<i64> = (0..4).map(|r| c[r][j]).collect();
            assert_eq!(col.iter().filter(|&&x| x == -1).count(), 1);
            assert_eq!(col.iter().filter(|&&x| x == 0).count(), 3);
        }
        let seq: MutationSequence = "1,3,4,2,1,3".parse().unwrap();
        assert!(crate::sequence::verify_maximal_green(&torus, &seq).unwrap().ok);
    }

    #[test]
    fn positivity_detects_negated_coefficient() {
        let mut s = seed_apply(&seed_initial(&a2()).unwrap(), &[1, 2]).unwrap();
        assert!(laurent_positivity_check(&s));
        let first = s.cluster[1].terms_mut().values_mut().next().unwrap();
        *first = -first.clone();
        assert!(!laurent_positivity_check(&s));
    }

    #[test]
    fn mixed_sign_rejected() {
        let mut s = seed_initial(&a2()).unwrap();
        s.coeffs[0] = TropMonomial(vec![1, -1]);
        assert_eq!(c_vectors(&s), Err(Error::SignCoherence(1)));
        assert_eq!(seed_mutate(&s, 1), Err(Error::SignCoherence(1)));
    }

    #[test]
    fn a2_orbit_stays_positive() {
        // Repeated indices cancel, so every seed within ten steps lies on
        // one of the two alternating walks.
        for start in 1..=2 {
            let mut s = seed_initial(&a2()).unwrap();
            for t in 0..10 {
                s = seed_mutate(&s, if t % 2 == 0 { start } else { 3 - start }).unwrap();
                assert!(laurent_positivity_check(&s));
            }
        }
    }
}
