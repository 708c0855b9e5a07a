//! Gain coefficients of scrambled Halton points.
//!
//! For a nonempty coordinate set `u`, levels `k` and sample size `n`,
//!
//! ```text
//! G_{u,k}(n) = 1 / (n prod_{j in u} (b_j - 1))
//!              * sum_{i,i' < n} prod_{j in u} ( b_j [i = i' mod b_j^{k_j+1}] - [i = i' mod b_j^{k_j}] )
//! ```
//!
//! Expanding the product over subsets `v` of `u` and applying the Chinese
//! remainder theorem collapses the double sum to
//! `sum_v H_{u,v} C_{m_{u,v,k}, n}` where `C_{m,n}` counts index pairs that are
//! congruent modulo `m`. [`gain_exact`] evaluates that closed form in exact
//! rational arithmetic; [`gain_bruteforce`] evaluates the double sum literally
//! and serves as an independent check.

mod bounds;
mod search;

pub use bounds::{
    bounds_table, global_bounds, lower_bound_n_star, upper_bound_u, upper_bound_u_exact, BoundsRow, LowerBoundWitness,
};
pub use search::{gamma_at_n, gamma_max, GainSummary, GammaAtN, DEFAULT_GAMMA_MAX_DIMENSION};

use std::fmt;

use crate::error::{invalid, Error, Result};
#[cfg(test)]
use crate::halton::pow_saturating;
use crate::halton::residue_match;
use crate::primes::PrimeBasis;
use crate::rational::Rational;

/// Largest `|u|` for which subset enumeration is attempted.
pub const MAX_SUBSET_SIZE: usize = 30;

/// Largest `n` accepted by [`gain_bruteforce`].
pub const BRUTEFORCE_MAX_N: u64 = 10_000;

/// A set of 1-based coordinate indices (at most 64).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct CoordSubset(u64);

impl CoordSubset {
    pub const EMPTY: CoordSubset = CoordSubset(0);

    pub fn from_indices(indices: &[usize]) -> Result<CoordSubset> {
        let mut mask = 0u64;
        for &j in indices {
            if j == 0 || j > 64 {
                return Err(invalid(format!("coordinate {j} outside 1..=64")));
            }
            if mask & (1 << (j - 1)) != 0 {
                return Err(invalid(format!("coordinate {j} listed twice")));
            }
            mask |= 1 << (j - 1);
        }
        Ok(CoordSubset(mask))
    }

    /// `{1, ..., d}`.
    pub fn full(d: usize) -> CoordSubset {
        assert!((1..=64).contains(&d));
        CoordSubset(if d == 64 { u64::MAX } else { (1 << d) - 1 })
    }

    pub fn from_mask(mask: u64) -> CoordSubset {
        CoordSubset(mask)
    }

    pub fn mask(&self) -> u64 {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, j: usize) -> bool {
        (1..=64).contains(&j) && self.0 & (1 << (j - 1)) != 0
    }

    pub fn max_index(&self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Members in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (1..=64).filter(move |&j| mask & (1 << (j - 1)) != 0)
    }

    pub fn is_subset_of(&self, other: &CoordSubset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn without(&self, j: usize) -> CoordSubset {
        CoordSubset(self.0 & !(1u64 << (j - 1)))
    }

    pub fn with(&self, j: usize) -> CoordSubset {
        CoordSubset(self.0 | (1u64 << (j - 1)))
    }

    /// Every subset of `self`, starting from the empty set.
    pub fn subsets(&self) -> impl Iterator<Item = CoordSubset> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(CoordSubset(cur))
        })
    }

    /// Nonempty subsets of `{1..d}` ordered by size, then lexicographically.
    pub fn nonempty_of(d: usize) -> Vec<CoordSubset> {
        let mut all: Vec<CoordSubset> = CoordSubset::full(d).subsets().filter(|u| !u.is_empty()).collect();
        all.sort_by_cached_key(|u| (u.len(), u.indices().collect::<Vec<_>>()));
        all
    }
}

impl fmt::Display for CoordSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().map(|j| j.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `(u, k, n)` together with the derived `m_under = prod b_j^{k_j}` and
/// `m_over = prod b_j^{k_j + 1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GainQuery {
    u: CoordSubset,
    /// Bases and levels of the members of `u`, ascending by coordinate.
    bases: Vec<u64>,
    levels: Vec<u32>,
    n: u64,
    m_under: u128,
    m_over: u128,
}

impl GainQuery {
    /// `u` lists 1-based coordinates; `levels[i]` is the level of `u[i]`.
    pub fn new(basis: &PrimeBasis, u: &[usize], levels: &[u32], n: u64) -> Result<GainQuery> {
        if u.len() != levels.len() {
            return Err(invalid(format!("{} coordinates but {} levels", u.len(), levels.len())));
        }
        let mut pairs: Vec<(usize, u32)> = u.iter().copied().zip(levels.iter().copied()).collect();
        pairs.sort_unstable();
        let subset = CoordSubset::from_indices(u)?;
        if let Some(&(j, _)) = pairs.iter().find(|(j, _)| *j > basis.dimension()) {
            return Err(invalid(format!("coordinate {j} outside 1..={}", basis.dimension())));
        }
        let bases: Vec<u64> = pairs.iter().map(|&(j, _)| basis.base(j)).collect();
        let levels: Vec<u32> = pairs.iter().map(|&(_, k)| k).collect();
        GainQuery::from_parts(subset, bases, levels, n)
    }

    /// Query on `u` with all levels zero.
    pub fn zero_levels(basis: &PrimeBasis, u: CoordSubset, n: u64) -> Result<GainQuery> {
        let idx: Vec<usize> = u.indices().collect();
        GainQuery::new(basis, &idx, &vec![0; idx.len()], n)
    }

    fn from_parts(u: CoordSubset, bases: Vec<u64>, levels: Vec<u32>, n: u64) -> Result<GainQuery> {
        if u.is_empty() {
            return Err(invalid("coordinate set u must be nonempty"));
        }
        if n == 0 {
            return Err(invalid("n must be at least 1; G(0) is left undefined"));
        }
        let mut m_under: u128 = 1;
        let mut m_over: u128 = 1;
        for (&b, &k) in bases.iter().zip(&levels) {
            let lo = checked_pow(b, k).ok_or(Error::Overflow("m_under"))?;
            let hi = lo.checked_mul(b as u128).ok_or(Error::Overflow("m_over"))?;
            m_under = m_under.checked_mul(lo).ok_or(Error::Overflow("m_under"))?;
            m_over = m_over.checked_mul(hi).ok_or(Error::Overflow("m_over"))?;
        }
        Ok(GainQuery { u, bases, levels, n, m_under, m_over })
    }

    /// Same `(u, k)` at another sample size.
    pub fn at(&self, n: u64) -> Result<GainQuery> {
        if n == 0 {
            return Err(invalid("n must be at least 1; G(0) is left undefined"));
        }
        Ok(GainQuery { n, ..self.clone() })
    }

    /// Same `u` and `n` with the level of coordinate `j` raised by one.
    pub fn raise_level(&self, j: usize) -> Result<GainQuery> {
        let pos = self.position(j)?;
        let mut levels = self.levels.clone();
        levels[pos] += 1;
        GainQuery::from_parts(self.u, self.bases.clone(), levels, self.n)
    }

    /// Same `u` and `n` with every level zero.
    pub fn with_zero_levels(&self) -> GainQuery {
        GainQuery::from_parts(self.u, self.bases.clone(), vec![0; self.levels.len()], self.n)
            .expect("zero levels cannot overflow once the query exists")
    }

    fn position(&self, j: usize) -> Result<usize> {
        self.u.indices().position(|i| i == j).ok_or_else(|| invalid(format!("coordinate {j} is not in u = {}", self.u)))
    }

    pub fn u(&self) -> CoordSubset {
        self.u
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Base of member `j` of `u`.
    pub fn base_of(&self, j: usize) -> Result<u64> {
        Ok(self.bases[self.position(j)?])
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m_under(&self) -> u128 {
        self.m_under
    }

    pub fn m_over(&self) -> u128 {
        self.m_over
    }

    /// `prod_{j in u} (b_j - 1)`.
    fn normaliser(&self) -> Result<i128> {
        self.bases
            .iter()
            .try_fold(1i128, |acc, &b| acc.checked_mul(b as i128 - 1))
            .ok_or(Error::Overflow("prod (b_j - 1)"))
    }
}

fn checked_pow(b: u64, k: u32) -> Option<u128> {
    (b as u128).checked_pow(k)
}

/// One inclusion-exclusion term: `H_{u,v} = prod_{v} b_j * (-1)^{|u - v|}` and
/// `m_{u,v,k} = prod_{v} b_j^{k_j+1} prod_{u-v} b_j^{k_j}`, with `C = C_{m,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubsetTerm {
    pub v: CoordSubset,
    pub h: i128,
    pub m: u128,
    pub c: u128,
}

/// `C_{m,n}`: pairs `(i, i')` in `[0, n)^2` with `i = i' mod m`.
///
/// Writing `n = mq + r`, the count is `m q^2 + (2q + 1) r`, which equals
/// `n + (2n - m) q - m q^2`.
pub fn residue_pair_count(m: u128, n: u128) -> Result<u128> {
    if m == 0 || n == 0 {
        return Err(invalid("residue_pair_count needs m >= 1 and n >= 1"));
    }
    let q = n / m;
    let r = n % m;
    let overflow = || Error::Overflow("C_{m,n}");
    let full = m.checked_mul(q).and_then(|x| x.checked_mul(q)).ok_or_else(overflow)?;
    let partial =
        q.checked_mul(2).and_then(|x| x.checked_add(1)).and_then(|x| x.checked_mul(r)).ok_or_else(overflow)?;
    full.checked_add(partial).ok_or_else(overflow)
}

/// Each `v` of `u` with `m_{u,v,k}` and its bit position within `u`.
fn for_each_subset<F>(q: &GainQuery, mut f: F) -> Result<()>
where
    F: FnMut(CoordSubset, i128, u128) -> Result<()>,
{
    let size = q.bases.len();
    if size > MAX_SUBSET_SIZE {
        return Err(Error::SizeGuard { what: "|u|", value: size as u128, limit: MAX_SUBSET_SIZE as u128 });
    }
    let members: Vec<usize> = q.u.indices().collect();
    let lows: Vec<u128> = q
        .bases
        .iter()
        .zip(&q.levels)
        .map(|(&b, &k)| checked_pow(b, k).ok_or(Error::Overflow("b^k")))
        .collect::<Result<_>>()?;
    for local in 0u64..(1u64 << size) {
        let mut h: i128 = 1;
        let mut m: u128 = 1;
        let mut v = CoordSubset::EMPTY;
        for t in 0..size {
            if local & (1 << t) != 0 {
                v = v.with(members[t]);
                h = h.checked_mul(q.bases[t] as i128).ok_or(Error::Overflow("H_{u,v}"))?;
                m = m
                    .checked_mul(lows[t])
                    .and_then(|x| x.checked_mul(q.bases[t] as u128))
                    .ok_or(Error::Overflow("m_{u,v,k}"))?;
            } else {
                h = -h;
                m = m.checked_mul(lows[t]).ok_or(Error::Overflow("m_{u,v,k}"))?;
            }
        }
        f(v, h, m)?;
    }
    Ok(())
}

/// All `2^|u|` inclusion-exclusion terms of a query.
pub fn subset_terms(q: &GainQuery) -> Result<Vec<SubsetTerm>> {
    let mut out = Vec::with_capacity(1 << q.bases.len().min(20));
    for_each_subset(q, |v, h, m| {
        out.push(SubsetTerm { v, h, m, c: residue_pair_count(m, q.n as u128)? });
        Ok(())
    })?;
    Ok(out)
}

/// `G_{u,k}(n)` from the closed form, exact.
pub fn gain_exact(q: &GainQuery) -> Result<Rational> {
    let mut total: i128 = 0;
    for_each_subset(q, |_, h, m| {
        let c = i128::try_from(residue_pair_count(m, q.n as u128)?).map_err(|_| Error::Overflow("C_{m,n}"))?;
        let term = h.checked_mul(c).ok_or(Error::Overflow("H C"))?;
        total = total.checked_add(term).ok_or(Error::Overflow("sum of H C"))?;
        Ok(())
    })?;
    let den = q.normaliser()?.checked_mul(q.n as i128).ok_or(Error::Overflow("n prod (b_j - 1)"))?;
    debug_assert!(total >= 0, "negative gain numerator {total} for {q:?}");
    Rational::new(total, den)
}

/// `G_{u,k}(n)` from the literal double sum over index pairs.
pub fn gain_bruteforce(q: &GainQuery) -> Result<Rational> {
    if q.n > BRUTEFORCE_MAX_N {
        return Err(Error::SizeGuard { what: "n", value: q.n as u128, limit: BRUTEFORCE_MAX_N as u128 });
    }
    let mut total: i128 = 0;
    for i in 0..q.n {
        for ip in 0..q.n {
            let mut prod: i128 = 1;
            for (&b, &k) in q.bases.iter().zip(&q.levels) {
                let fine = residue_match(i, ip, b, k as usize + 1) as i128;
                let coarse = residue_match(i, ip, b, k as usize) as i128;
                prod *= b as i128 * fine - coarse;
                if prod == 0 {
                    break;
                }
            }
            total += prod;
        }
    }
    let den = q.normaliser()?.checked_mul(q.n as i128).ok_or(Error::Overflow("n prod (b_j - 1)"))?;
    Rational::new(total, den)
}

/// `(n, G_{u,k}(n))` for `n = 1..=n_max`.
pub fn gain_curve(q: &GainQuery, n_max: u64) -> Result<Vec<(u64, Rational)>> {
    (1..=n_max).map(|n| Ok((n, gain_exact(&q.at(n)?)?))).collect()
}

pub(crate) const KERNEL_MAX_N: u64 = 1 << 31;

/// Precomputed `(H, m)` pairs for evaluating one `(u, k)` at many `n`.
///
/// Used by the searches; values agree with [`gain_exact`].
#[derive(Clone, Debug)]
pub(crate) struct GainKernel {
    terms: Vec<(i128, u64)>,
    normaliser: i128,
}

impl GainKernel {
    pub(crate) fn new(q: &GainQuery) -> Result<GainKernel> {
        let mut terms = Vec::new();
        for_each_subset(q, |_, h, m| {
            let m = u64::try_from(m).map_err(|_| Error::Overflow("m_{u,v,k} beyond 64 bits"))?;
            terms.push((h, m));
            Ok(())
        })?;
        Ok(GainKernel { terms, normaliser: q.normaliser()? })
    }

    /// Numerator `sum_v H C_{m,n}`; the gain is this over `n * normaliser`.
    /// Requires `n < 2^31` so every `C_{m,n} <= n^2` fits 64 bits.
    pub(crate) fn numerator(&self, n: u64) -> i128 {
        debug_assert!(n < KERNEL_MAX_N);
        self.terms
            .iter()
            .map(|&(h, m)| {
                let q = n / m;
                let r = n - q * m;
                h * (m * q * q + (2 * q + 1) * r) as i128
            })
            .sum()
    }

    pub(crate) fn gain(&self, n: u64) -> Result<Rational> {
        Rational::new(self.numerator(n), self.normaliser * n as i128)
    }
}
