//! Digit expansions and unscrambled Halton points.
//!
//! Digits are the source of truth: a coordinate's base-`b` digits `a_1, a_2, ...`
//! (least significant digit of the index first) give the point
//! `x = sum_l a_l b^-l`. Stratum membership and Haar integrand evaluation read
//! digits directly and never round-trip through floating point.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::primes::PrimeBasis;
use crate::rational::Rational;

/// Hard upper limit on stored digits per coordinate.
pub const MAX_PRECISION: usize = 64;

/// Largest double below 1.
pub const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

/// Base-`b` digits of an index, least significant first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DigitVector {
    base: u64,
    digits: Vec<u64>,
}

/// `base^exp`, saturating at `u128::MAX`.
pub(crate) fn pow_saturating(base: u64, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// Smallest `D` with `b^D >= 2^64`, capped at [`MAX_PRECISION`].
pub fn default_precision(base: u64) -> usize {
    let target = 1u128 << 64;
    (1..=MAX_PRECISION).find(|&d| pow_saturating(base, d) >= target).unwrap_or(MAX_PRECISION)
}

impl DigitVector {
    /// Builds a digit vector from raw digits, validating each against `base`.
    pub fn from_digits(base: u64, digits: Vec<u64>) -> Result<DigitVector> {
        if base < 2 {
            return Err(invalid(format!("base {base} is below 2")));
        }
        if let Some(bad) = digits.iter().find(|&&a| a >= base) {
            return Err(invalid(format!("digit {bad} not in Z_{base}")));
        }
        Ok(DigitVector { base, digits })
    }

    /// The leading `depth` digits of `i`; higher digits are dropped silently.
    pub fn leading(i: u64, base: u64, depth: usize) -> DigitVector {
        let mut digits = Vec::with_capacity(depth);
        let mut rest = i;
        for _ in 0..depth {
            digits.push(rest % base);
            rest /= base;
        }
        DigitVector { base, digits }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn precision(&self) -> usize {
        self.digits.len()
    }

    /// Digit `l`, 1-based.
    pub fn digit(&self, l: usize) -> Result<u64> {
        if l == 0 || l > self.digits.len() {
            return Err(Error::PrecisionShortfall { level: l, precision: self.digits.len() });
        }
        Ok(self.digits[l - 1])
    }

    /// `sum_l a_l b^(l-1)`, or `None` when it does not fit 128 bits.
    pub fn index_value(&self) -> Option<u128> {
        let mut acc: u128 = 0;
        for &a in self.digits.iter().rev() {
            acc = acc.checked_mul(self.base as u128)?.checked_add(a as u128)?;
        }
        Some(acc)
    }

    /// `sum_l a_l b^-l` as a float; Horner from the deepest digit.
    pub fn to_f64(&self) -> f64 {
        let b = self.base as f64;
        // long runs of b-1 digits can round up to 1.0
        self.digits.iter().rev().fold(0.0, |acc, &a| (acc + a as f64) / b).min(ONE_MINUS_ULP)
    }

    /// `floor(b^level x)`: the first `level` digits read most significant first.
    pub fn stratum(&self, level: usize) -> Result<u128> {
        if level > self.digits.len() {
            return Err(Error::PrecisionShortfall { level, precision: self.digits.len() });
        }
        let mut r: u128 = 0;
        for &a in &self.digits[..level] {
            r = r
                .checked_mul(self.base as u128)
                .and_then(|r| r.checked_add(a as u128))
                .ok_or(Error::Overflow("stratum index"))?;
        }
        Ok(r)
    }

    pub(crate) fn digits_mut(&mut self) -> &mut Vec<u64> {
        &mut self.digits
    }
}

/// The `precision` least significant base-`b` digits of `i`, zero padded.
///
/// Fails with [`Error::PrecisionOverflow`] when `b^precision <= i`, since the
/// truncated digits would no longer identify `i`.
pub fn digits_of(i: u64, base: u64, precision: usize) -> Result<DigitVector> {
    if base < 2 {
        return Err(invalid(format!("base {base} is below 2")));
    }
    if precision == 0 {
        return Err(invalid("precision must be at least 1"));
    }
    if pow_saturating(base, precision) <= i as u128 {
        return Err(Error::PrecisionOverflow { index: i, base, precision });
    }
    Ok(DigitVector::leading(i, base, precision))
}

fn significant_digits(i: u64, base: u64) -> usize {
    let mut count = 0;
    let mut rest = i;
    while rest > 0 {
        rest /= base;
        count += 1;
    }
    count
}

/// Radical inverse of `i` in base `b`, as a float.
pub fn radical_inverse(i: u64, base: u64) -> f64 {
    DigitVector::leading(i, base, significant_digits(i, base)).to_f64()
}

/// Radical inverse of `i` in base `b` as an exact fraction.
pub fn radical_inverse_exact(i: u64, base: u64) -> Result<Rational> {
    let digits = DigitVector::leading(i, base, significant_digits(i, base));
    // reversing the digits gives the numerator over b^K
    let mut num: i128 = 0;
    for &a in digits.digits() {
        num = num
            .checked_mul(base as i128)
            .and_then(|x| x.checked_add(a as i128))
            .ok_or(Error::Overflow("radical inverse"))?;
    }
    let den =
        i128::try_from(pow_saturating(base, digits.precision())).map_err(|_| Error::Overflow("radical inverse"))?;
    Rational::new(num, den)
}

/// Generation options for [`PointSet`].
#[derive(Clone, Debug, Default)]
pub struct PointOptions {
    /// Per-coordinate digit precision; `None` uses [`default_precision`].
    pub precision: Option<Vec<usize>>,
    /// `order[c]` is the 1-based basis index that problem coordinate `c` uses.
    /// Lets callers give their most important inputs the smallest bases.
    pub order: Option<Vec<usize>>,
}

/// Halton points `a_i` for a run of consecutive indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PointSet {
    dimension: usize,
    start: u64,
    /// `digits[p][j]`: point `p`, coordinate `j`.
    digits: Vec<Vec<DigitVector>>,
    coords: Vec<f64>,
}

impl PointSet {
    /// Unscrambled points `i0 .. i0 + n` with default precision.
    pub fn halton(basis: &PrimeBasis, start: u64, n: usize) -> Result<PointSet> {
        PointSet::halton_with(basis, start, n, &PointOptions::default())
    }

    pub fn halton_with(basis: &PrimeBasis, start: u64, n: usize, options: &PointOptions) -> Result<PointSet> {
        if n == 0 {
            return Err(invalid("point count must be at least 1"));
        }
        let end = start.checked_add(n as u64 - 1).ok_or_else(|| invalid("index range overflows u64"))?;
        if end >= 1u64 << 53 {
            return Err(invalid("indices must stay below 2^53"));
        }
        let d = basis.dimension();
        let bases: Vec<u64> = match &options.order {
            None => basis.bases().to_vec(),
            Some(order) => {
                let mut seen = vec![false; d];
                if order.len() != d {
                    return Err(invalid(format!("coordinate order has {} entries, expected {d}", order.len())));
                }
                for &j in order {
                    if j == 0 || j > d || seen[j - 1] {
                        return Err(invalid(format!("coordinate order is not a permutation of 1..={d}")));
                    }
                    seen[j - 1] = true;
                }
                order.iter().map(|&j| basis.base(j)).collect()
            }
        };
        let precision: Vec<usize> = match &options.precision {
            None => bases.iter().map(|&b| default_precision(b)).collect(),
            Some(p) if p.len() == d => p.clone(),
            Some(p) => return Err(invalid(format!("{} precisions given for dimension {d}", p.len()))),
        };
        let mut digits = Vec::with_capacity(n);
        for i in start..=end {
            let row =
                bases.iter().zip(&precision).map(|(&b, &prec)| digits_of(i, b, prec)).collect::<Result<Vec<_>>>()?;
            digits.push(row);
        }
        Ok(PointSet::from_digits(start, digits))
    }

    pub(crate) fn from_digits(start: u64, digits: Vec<Vec<DigitVector>>) -> PointSet {
        let dimension = digits.first().map_or(0, Vec::len);
        let coords = digits.iter().flat_map(|row| row.iter().map(DigitVector::to_f64)).collect();
        PointSet { dimension, start, digits, coords }
    }

    pub(crate) fn with_coords(start: u64, digits: Vec<Vec<DigitVector>>, coords: Vec<f64>) -> PointSet {
        let dimension = digits.first().map_or(0, Vec::len);
        PointSet { dimension, start, digits, coords }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Digits of point `p` (0-based within the set).
    pub fn point_digits(&self, p: usize) -> &[DigitVector] {
        &self.digits[p]
    }

    /// Realized coordinates of point `p`.
    pub fn point(&self, p: usize) -> &[f64] {
        &self.coords[p * self.dimension..(p + 1) * self.dimension]
    }

    pub fn rows(&self) -> impl Iterator<Item = (u64, &[f64])> + '_ {
        (0..self.len()).map(move |p| (self.start + p as u64, self.point(p)))
    }

    /// Occupancy count of every non-empty stratum `S_r(k)`.
    pub fn stratum_counts(&self, levels: &[usize]) -> Result<BTreeMap<Vec<u128>, usize>> {
        let mut counts = BTreeMap::new();
        for row in &self.digits {
            *counts.entry(stratum_index(row, levels)?).or_insert(0) += 1;
        }
        Ok(counts)
    }
}

/// The stratum vector `r` with `r_j = floor(b_j^{k_j} x_j)`, read from digits.
pub fn stratum_index(point: &[DigitVector], levels: &[usize]) -> Result<Vec<u128>> {
    if point.len() != levels.len() {
        return Err(invalid(format!("{} levels for a {}-dimensional point", levels.len(), point.len())));
    }
    point.iter().zip(levels).map(|(x, &k)| x.stratum(k)).collect()
}

/// `i = i' mod b^r`; equivalently `floor(b^r a_i) = floor(b^r a_i')` in base `b`.
pub fn residue_match(i: u64, i_prime: u64, base: u64, level: usize) -> bool {
    let modulus = pow_saturating(base, level);
    if modulus > u64::MAX as u128 {
        return i == i_prime;
    }
    let m = modulus as u64;
    i % m == i_prime % m
}

/// Stratum occupancy of the unscrambled points `i0 .. i0 + batch`.
pub fn stratum_counts(
    basis: &PrimeBasis,
    start: u64,
    batch: usize,
    levels: &[usize],
) -> Result<BTreeMap<Vec<u128>, usize>> {
    PointSet::halton(basis, start, batch)?.stratum_counts(levels)
}

/// Number of strata `prod_j b_j^{k_j}` at the given levels.
pub fn strata_total(basis: &PrimeBasis, levels: &[usize]) -> Option<u128> {
    basis
        .bases()
        .iter()
        .zip(levels)
        .try_fold(1u128, |acc, (&b, &k)| acc.checked_mul(pow_saturating(b, k)).filter(|&v| v != u128::MAX))
}
