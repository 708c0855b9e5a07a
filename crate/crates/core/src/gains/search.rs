//! Worst-case gains: `Gamma_d(n)` for one sample size and `Gamma_d` over all of them.

use rayon::prelude::*;

use super::{gain_exact, global_bounds, CoordSubset, GainKernel, GainQuery, KERNEL_MAX_N};
use crate::error::{invalid, Error, Result};
use crate::primes::PrimeBasis;
use crate::rational::Rational;

/// Dimensions above this need an explicit `n_cap` in [`gamma_max`].
pub const DEFAULT_GAMMA_MAX_DIMENSION: usize = 8;

/// Largest dimension for the exhaustive `(u, k)` enumeration of [`gamma_at_n`].
pub const GAMMA_AT_N_MAX_DIMENSION: usize = 20;

const CHUNK: u64 = 1 << 16;

/// `Gamma_d(n)` and the `(u, k)` attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaAtN {
    pub value: Rational,
    pub u: CoordSubset,
    pub k: Vec<u32>,
}

/// Result of the worst-case search over `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GainSummary {
    pub dimension: usize,
    pub gamma: Rational,
    /// Smallest `n` attaining `gamma`.
    pub argmax_n: u64,
    /// Largest `n` examined.
    pub n_searched: u64,
    /// Whether the search covered `1..=prod b_j`, which makes `gamma` equal `Gamma_d`.
    pub exhaustive: bool,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

/// Level vectors on `bases` with `prod b^k <= n`, in lexicographic order.
fn level_vectors(bases: &[u64], n: u128) -> Vec<Vec<u32>> {
    fn walk(bases: &[u64], budget: u128, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let Some((&b, rest)) = bases.split_first() else {
            out.push(prefix.clone());
            return;
        };
        let mut k = 0;
        let mut power: u128 = 1;
        while power <= budget {
            prefix.push(k);
            walk(rest, budget / power, prefix, out);
            prefix.pop();
            k += 1;
            power = match power.checked_mul(b as u128) {
                Some(p) => p,
                None => break,
            };
        }
    }
    let mut out = Vec::new();
    walk(bases, n, &mut Vec::new(), &mut out);
    out
}

/// `Gamma_d(n) = max_u sup_k G_{u,k}(n)`.
///
/// Only `k` with `prod_{j in u} b_j^{k_j} <= n` can give a gain other than 1,
/// so those are enumerated and 1 serves as a floor. Ties go to the smallest
/// `(|u|, u, k)` in lexicographic order.
pub fn gamma_at_n(d: usize, n: u64, basis: &PrimeBasis) -> Result<GammaAtN> {
    if d == 0 || d > basis.dimension() {
        return Err(invalid(format!("dimension {d} outside 1..={}", basis.dimension())));
    }
    if d > GAMMA_AT_N_MAX_DIMENSION {
        return Err(Error::SizeGuard { what: "d", value: d as u128, limit: GAMMA_AT_N_MAX_DIMENSION as u128 });
    }
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let mut best: Option<GammaAtN> = None;
    for u in CoordSubset::nonempty_of(d) {
        let idx: Vec<usize> = u.indices().collect();
        let bases: Vec<u64> = idx.iter().map(|&j| basis.base(j)).collect();
        for k in level_vectors(&bases, n as u128) {
            let value = gain_exact(&GainQuery::new(basis, &idx, &k, n)?)?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(GammaAtN { value, u, k });
            }
        }
    }
    let best = best.expect("u = {1}, k = 0 is always enumerated");
    // Any k past n gives exactly 1; the smallest such key is u = {1}, k = (K)
    // with 2^K > n, which only loses to enumerated keys on u = {1}.
    let one = CoordSubset::from_indices(&[1])?;
    if best.value < Rational::ONE || (best.value == Rational::ONE && best.u != one) {
        let k = (0u32..).find(|&k| 2u128.pow(k) > n as u128).unwrap();
        return Ok(GammaAtN { value: Rational::ONE, u: one, k: vec![k] });
    }
    Ok(best)
}

/// `Gamma_d = max_{1 <= n <= prod_j b_j} G_{1:d,0}(n)`.
///
/// Restricting to `k = 0` and `u = 1:d` and to one period of `n` loses nothing:
/// raising levels only rescales `n`, supersets never have a smaller maximum,
/// and past `prod_j b_j` the gain is damped by `r / n`. With `n_cap` the search
/// stops early and `exhaustive` reports whether the cap cut it short.
pub fn gamma_max(d: usize, basis: &PrimeBasis, n_cap: Option<u64>) -> Result<GainSummary> {
    if d == 0 || d > basis.dimension() {
        return Err(invalid(format!("dimension {d} outside 1..={}", basis.dimension())));
    }
    if d > DEFAULT_GAMMA_MAX_DIMENSION && n_cap.is_none() {
        return Err(Error::SizeGuard {
            what: "d without --n-cap",
            value: d as u128,
            limit: DEFAULT_GAMMA_MAX_DIMENSION as u128,
        });
    }
    if n_cap == Some(0) {
        return Err(invalid("n_cap must be at least 1"));
    }
    let period = basis.bases()[..d].iter().try_fold(1u128, |acc, &b| acc.checked_mul(b as u128));
    let limit: u128 = match (period, n_cap) {
        (Some(p), Some(cap)) => p.min(cap as u128),
        (Some(p), None) => p,
        (None, Some(cap)) => cap as u128,
        (None, None) => return Err(Error::Overflow("primorial")),
    };
    if limit >= KERNEL_MAX_N as u128 {
        return Err(Error::SizeGuard { what: "n search range", value: limit, limit: KERNEL_MAX_N as u128 - 1 });
    }
    let limit = limit as u64;
    let exhaustive = period.is_some_and(|p| p <= limit as u128);
    let kernel = GainKernel::new(&GainQuery::zero_levels(basis, CoordSubset::full(d), 1)?)?;

    // (numerator, n): gain is numerator / (n * normaliser); larger wins, then smaller n
    let better = |a: (i128, u64), b: (i128, u64)| -> (i128, u64) {
        let lhs = a.0 * b.1 as i128;
        let rhs = b.0 * a.1 as i128;
        if lhs > rhs || (lhs == rhs && a.1 < b.1) {
            a
        } else {
            b
        }
    };
    let chunks = limit.div_ceil(CHUNK);
    let (num, argmax_n) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK + 1;
            let hi = ((c + 1) * CHUNK).min(limit);
            (lo..=hi).map(|n| (kernel.numerator(n), n)).reduce(better).unwrap()
        })
        .reduce_with(better)
        .expect("at least one n");
    let gamma = Rational::new(num, kernel.normaliser * argmax_n as i128)?;
    let (lower_bound, upper_bound) = global_bounds(d)?;
    Ok(GainSummary { dimension: d, gamma, argmax_n, n_searched: limit, exhaustive, lower_bound, upper_bound })
}
