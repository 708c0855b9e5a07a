//! The first `d` primes, produced by a segmented sieve of Eratosthenes.
//!
//! Coordinate `j` (1-based) of a Halton point uses the `j`-th prime as its base.
//! The sieve is sized from the estimate `p_j <= j (ln j + ln ln j)` (valid for
//! `j >= 6`) and keeps sieving further segments if the estimate falls short.
//! Primes are computed once per process and shared behind an [`Arc`].

use std::ops::Deref;
use std::sync::{Arc, RwLock};

use crate::error::{invalid, Result};

/// Largest dimension served by [`first_primes`].
pub const DEFAULT_MAX_DIMENSION: usize = 10_000_000;

/// Odd numbers covered by one sieve segment.
const SEGMENT_ODDS: usize = 1 << 18;

static CACHE: RwLock<Option<Arc<Vec<u64>>>> = RwLock::new(None);

/// The first `dimension` primes, in ascending order.
#[derive(Clone, Debug)]
pub struct PrimeBasis {
    primes: Arc<Vec<u64>>,
    dimension: usize,
}

impl PrimeBasis {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn bases(&self) -> &[u64] {
        &self.primes[..self.dimension]
    }

    /// Base of coordinate `j`, 1-based.
    pub fn base(&self, j: usize) -> u64 {
        assert!(j >= 1 && j <= self.dimension, "coordinate {j} outside 1..={}", self.dimension);
        self.primes[j - 1]
    }

    /// The leading `d` bases of this basis.
    pub fn truncate(&self, d: usize) -> Result<PrimeBasis> {
        if d == 0 || d > self.dimension {
            return Err(invalid(format!("cannot truncate a {}-dimensional basis to {d}", self.dimension)));
        }
        Ok(PrimeBasis { primes: Arc::clone(&self.primes), dimension: d })
    }
}

impl Deref for PrimeBasis {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        self.bases()
    }
}

impl PartialEq for PrimeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.bases() == other.bases()
    }
}

impl Eq for PrimeBasis {}

/// The first `d` primes, `1 <= d <= DEFAULT_MAX_DIMENSION`.
pub fn first_primes(d: usize) -> Result<PrimeBasis> {
    first_primes_capped(d, DEFAULT_MAX_DIMENSION)
}

/// As [`first_primes`] with an explicit dimension cap.
pub fn first_primes_capped(d: usize, cap: usize) -> Result<PrimeBasis> {
    if d == 0 {
        return Err(invalid("dimension must be at least 1"));
    }
    if d > cap {
        return Err(invalid(format!("dimension {d} exceeds the cap {cap}")));
    }
    if let Some(primes) = CACHE.read().unwrap().as_ref() {
        if primes.len() >= d {
            return Ok(PrimeBasis { primes: Arc::clone(primes), dimension: d });
        }
    }
    let mut cache = CACHE.write().unwrap();
    if let Some(primes) = cache.as_ref() {
        if primes.len() >= d {
            return Ok(PrimeBasis { primes: Arc::clone(primes), dimension: d });
        }
    }
    let primes = Arc::new(sieve_first(d));
    *cache = Some(Arc::clone(&primes));
    Ok(PrimeBasis { primes, dimension: d })
}

/// The `j`-th prime, 1-based.
pub fn nth_prime(j: usize) -> Result<u64> {
    if j == 0 || j > DEFAULT_MAX_DIMENSION {
        return Err(invalid(format!("prime index {j} outside 1..={DEFAULT_MAX_DIMENSION}")));
    }
    Ok(first_primes(j)?.base(j))
}

/// Upper estimate of the `j`-th prime.
pub fn nth_prime_upper_estimate(j: usize) -> u64 {
    if j < 6 {
        return 13;
    }
    let x = j as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for p in 2..=limit {
        if composite[p] {
            continue;
        }
        primes.push(p as u64);
        let mut q = p * p;
        while q <= limit {
            composite[q] = true;
            q += p;
        }
    }
    primes
}

fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn sieve_first(d: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(d);
    out.push(2);
    if d == 1 {
        return out;
    }
    let mut estimate = nth_prime_upper_estimate(d);
    // odd base primes only
    let mut base: Vec<u64> = simple_sieve(isqrt(estimate) + 1).into_iter().skip(1).collect();
    let mut base_limit = isqrt(estimate) + 1;
    let mut marks = vec![false; SEGMENT_ODDS];
    let mut lo: u64 = 3;
    while out.len() < d {
        let hi = lo + 2 * SEGMENT_ODDS as u64;
        if hi > estimate {
            // grow the estimate instead of stopping short
            estimate = estimate.max(hi) + estimate / 4;
        }
        if base_limit * base_limit < hi {
            base_limit = isqrt(hi) + 1;
            base = simple_sieve(base_limit).into_iter().skip(1).collect();
        }
        marks.iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p >= hi {
                break;
            }
            let mut start = (p * p).max(lo.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut idx = ((start - lo) / 2) as usize;
            while idx < SEGMENT_ODDS {
                marks[idx] = true;
                idx += p as usize;
            }
        }
        for (idx, &m) in marks.iter().enumerate() {
            if !m {
                out.push(lo + 2 * idx as u64);
                if out.len() == d {
                    break;
                }
            }
        }
        lo = hi;
    }
    out
}
