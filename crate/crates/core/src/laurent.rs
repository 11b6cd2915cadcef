//! Exact multivariate Laurent polynomials over the integers.
//!
//! A polynomial in `n` cluster variables and `n` coefficient variables is
//! stored as a sorted map from dense exponent vectors of length `2n`
//! (`x1..xn` then `y1..yn`) to nonzero coefficients.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Exponents = Vec<i32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    rank: usize,
    terms: BTreeMap<Exponents, BigInt>,
}

/// JSON form of one term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponents: Exponents,
    pub coefficient: BigInt,
}

fn add_exp(a: &[i32], b: &[i32]) -> Result<Exponents> {
    a.iter().zip(b).map(|(x, y)| x.checked_add(*y).ok_or(Error::Overflow("Laurent exponent"))).collect()
}

fn charge(work: &mut u64, cost: u64) -> Result<()> {
    *work = work.checked_sub(cost).ok_or(Error::WorkBudget)?;
    Ok(())
}

fn sub_exp(a: &[i32], b: &[i32]) -> Result<Exponents> {
    a.iter().zip(b).map(|(x, y)| x.checked_sub(*y).ok_or(Error::Overflow("Laurent exponent"))).collect()
}

impl LaurentPoly {
    pub fn zero(rank: usize) -> Self {
        LaurentPoly { rank, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize) -> Self {
        Self::monomial(rank, vec![0; 2 * rank], BigInt::one())
    }

    /// `coefficient * x^e` where `e` has length `2 * rank`.
    pub fn monomial(rank: usize, exponents: Exponents, coefficient: BigInt) -> Self {
        assert_eq!(exponents.len(), 2 * rank, "exponent vector length");
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            terms.insert(exponents, coefficient);
        }
        LaurentPoly { rank, terms }
    }

    /// The cluster variable `x_i` (1-based).
    pub fn x(rank: usize, i: usize) -> Self {
        let mut e = vec![0; 2 * rank];
        e[i - 1] = 1;
        Self::monomial(rank, e, BigInt::one())
    }

    pub fn from_terms(rank: usize, terms: impl IntoIterator<Item = (Exponents, BigInt)>) -> Result<Self> {
        let mut p = Self::zero(rank);
        for (e, c) in terms {
            if e.len() != 2 * rank {
                return Err(Error::Precondition(format!(
                    "exponent vector of length {} in a rank-{rank} polynomial",
                    e.len()
                )));
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigInt)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[i32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    /// Monomial test returning the exponents and coefficient.
    pub fn as_monomial(&self) -> Option<(&Exponents, &BigInt)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    pub fn to_terms(&self) -> Vec<Term> {
        self.terms.iter().map(|(e, c)| Term { exponents: e.clone(), coefficient: c.clone() }).collect()
    }

    fn add_term(&mut self, e: Exponents, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_rank(&self, other: &Self) {
        assert_eq!(self.rank, other.rank, "Laurent polynomials of different rank");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_rank(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentPoly { rank: self.rank, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut unlimited = u64::MAX;
        self.mul_within(other, &mut unlimited)
    }

    /// [`mul`](Self::mul) charging one unit of `work` per pair of terms.
    pub fn mul_within(&self, other: &Self, work: &mut u64) -> Result<Self> {
        self.check_rank(other);
        charge(work, self.len() as u64 * other.len() as u64)?;
        let mut acc: HashMap<Exponents, BigInt> = HashMap::with_capacity(self.len() * other.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                *acc.entry(add_exp(ea, eb)?).or_default() += ca * cb;
            }
        }
        Ok(LaurentPoly { rank: self.rank, terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    /// Multiplies by `coefficient * x^e`.
    pub fn shift(&self, e: &[i32], coefficient: &BigInt) -> Result<Self> {
        let mut terms = BTreeMap::new();
        if !coefficient.is_zero() {
            for (k, c) in &self.terms {
                terms.insert(add_exp(k, e)?, c * coefficient);
            }
        }
        Ok(LaurentPoly { rank: self.rank, terms })
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut unlimited = u64::MAX;
        self.pow_within(k, &mut unlimited)
    }

    pub fn pow_within(&self, k: u32, work: &mut u64) -> Result<Self> {
        let mut result = Self::one(self.rank);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_within(&base, work)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_within(&base, work)?;
            }
        }
        Ok(result)
    }

    fn exponent_bounds(&self) -> (Exponents, Exponents) {
        let m = 2 * self.rank;
        let mut lo = vec![i32::MAX; m];
        let mut hi = vec![i32::MIN; m];
        for e in self.terms.keys() {
            for c in 0..m {
                lo[c] = lo[c].min(e[c]);
                hi[c] = hi[c].max(e[c]);
            }
        }
        (lo, hi)
    }

    /// Exact quotient `self / d`, or `InexactDivision` when `d` does not
    /// divide `self` in the Laurent ring.
    ///
    /// Long division on lexicographically leading terms. Since the Newton
    /// polytope of a product is the Minkowski sum of the factors', every
    /// quotient exponent lies in the box `[min(self) - min(d), max(self) -
    /// max(d)]`; leaving that box proves the division inexact, and the
    /// strictly decreasing leading term bounds the loop.
    pub fn div_exact(&self, d: &Self) -> Result<Self> {
        let mut unlimited = u64::MAX;
        self.div_exact_within(d, &mut unlimited)
    }

    /// [`div_exact`](Self::div_exact) charging one unit of `work` per term
    /// of `d` for each quotient term.
    pub fn div_exact_within(&self, d: &Self, work: &mut u64) -> Result<Self> {
        self.check_rank(d);
        let Some((d_lead, d_lead_c)) = d.terms.iter().next_back() else {
            return Err(Error::InexactDivision("division by zero".into()));
        };
        if self.is_zero() {
            return Ok(Self::zero(self.rank));
        }
        if d.len() == 1 {
            let inv: Vec<i32> = d_lead.iter().map(|&x| -x).collect();
            let mut out = Self::zero(self.rank);
            for (e, c) in &self.terms {
                if !(c % d_lead_c).is_zero() {
                    return Err(Error::InexactDivision(format!("coefficient {c} not divisible by {d_lead_c}")));
                }
                out.terms.insert(add_exp(e, &inv)?, c / d_lead_c);
            }
            return Ok(out);
        }
        let (plo, phi) = self.exponent_bounds();
        let (dlo, dhi) = d.exponent_bounds();
        let lo = sub_exp(&plo, &dlo)?;
        let hi = sub_exp(&phi, &dhi)?;
        let mut rem = self.terms.clone();
        let mut quot = BTreeMap::new();
        while let Some((lead, lead_c)) = rem.iter().next_back() {
            let qe = sub_exp(lead, d_lead)?;
            if qe.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, h))| x < l || x > h) {
                return Err(Error::InexactDivision(format!("remainder term outside the quotient box at {lead:?}")));
            }
            if !(lead_c % d_lead_c).is_zero() {
                return Err(Error::InexactDivision(format!("coefficient {lead_c} not divisible by {d_lead_c}")));
            }
            let qc = lead_c / d_lead_c;
            charge(work, d.len() as u64)?;
            for (e, c) in &d.terms {
                let key = add_exp(&qe, e)?;
                let delta = c * &qc;
                match rem.entry(key) {
                    std::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(-delta);
                    }
                    std::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() -= delta;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                }
            }
            quot.insert(qe, qc);
        }
        Ok(LaurentPoly { rank: self.rank, terms: quot })
    }

    /// True when every coefficient is positive and no `y` exponent is
    /// negative.
    pub fn is_positive_in_y(&self) -> bool {
        self.terms.iter().all(|(e, c)| c.is_positive() && e[self.rank..].iter().all(|&x| x >= 0))
    }

    /// Mutable access for tests that inject defects.
    #[doc(hidden)]
    pub fn terms_mut(&mut self) -> &mut BTreeMap<Exponents, BigInt> {
        &mut self.terms
    }
}

fn write_var(f: &mut fmt::Formatter<'_>, name: char, idx: usize, e: i32) -> fmt::Result {
    match e {
        0 => Ok(()),
        1 => write!(f, "{name}{idx}"),
        _ => write!(f, "{name}{idx}^{e}"),
    }
}

/// Writes the numerator over the monomial denominator, with terms in
/// descending lexicographic order, e.g. `(x2*y1 + 1)/x1`.
impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let n = self.rank;
        let (lo, _) = self.exponent_bounds();
        let denom: Vec<i32> = lo.iter().map(|&x| (-x).max(0)).collect();
        let mut numer = String::new();
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let shifted: Vec<i32> = e.iter().zip(&denom).map(|(a, b)| a + b).collect();
            let is_const = shifted.iter().all(|&x| x == 0);
            let abs = c.abs();
            let mut piece = String::new();
            if !first {
                piece.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                piece.push('-');
            }
            first = false;
            if is_const || !abs.is_one() {
                piece.push_str(&abs.to_string());
                if !is_const {
                    piece.push('*');
                }
            }
            let mut vars = Vec::new();
            for (i, &x) in shifted.iter().enumerate() {
                if x != 0 {
                    let (name, idx) = if i < n { ('x', i + 1) } else { ('y', i - n + 1) };
                    vars.push(VarPow(name, idx, x).to_string());
                }
            }
            piece.push_str(&vars.join("*"));
            numer.push_str(&piece);
        }
        let mut den = Vec::new();
        for (i, &x) in denom.iter().enumerate() {
            if x != 0 {
                let (name, idx) = if i < n { ('x', i + 1) } else { ('y', i - n + 1) };
                den.push(VarPow(name, idx, x).to_string());
            }
        }
        if den.is_empty() {
            return write!(f, "{numer}");
        }
        let numer = if self.terms.len() == 1 { numer } else { format!("({numer})") };
        if den.len() == 1 {
            write!(f, "{numer}/{}", den[0])
        } else {
            write!(f, "{numer}/({})", den.join("*"))
        }
    }
}

struct VarPow(char, usize, i32);

impl fmt::Display for VarPow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_var(f, self.0, self.1, self.2)
    }
}
