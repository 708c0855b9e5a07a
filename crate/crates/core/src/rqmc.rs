//! Replicated randomized QMC estimates on single-component Haar integrands.
//!
//! A [`HaarIntegrand`] is `f(x) = prod_{j in u} eta_j(digit k_j + 1 of x_j)` with every
//! table `eta_j` summing to zero. Its whole variance sits in the one component
//! `(u, k)`, so a scrambled Halton estimate over `n` points has variance exactly
//! `G_{u,k}(n) sigma^2 / n`. [`rqmc_estimate`] measures that variance over
//! independent replicates and [`mc_estimate`] gives the IID baseline.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::gains::{CoordSubset, GainQuery};
use crate::halton::DigitVector;
use crate::prf::{tag, KeyedStream};
use crate::primes::PrimeBasis;
use crate::rational::Rational;
use crate::scramble::{CoordinateScrambler, ScrambleSpec};

/// Largest `n * R` accepted by the estimators.
pub const MAX_EVALUATIONS: u128 = 1 << 36;

/// `f(x) = prod_{j in u} eta_j(digit k_j + 1 of x_j)`, with mean 0 and variance `sigma^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HaarIntegrand {
    u: CoordSubset,
    indices: Vec<usize>,
    bases: Vec<u64>,
    levels: Vec<u32>,
    eta: Vec<Vec<i64>>,
    sigma2: Rational,
}

/// `(-1, ..., -1, b - 1)`: the simplest mean-zero table on `Z_b`.
pub fn default_table(base: u64) -> Vec<i64> {
    let mut t = vec![-1; base as usize];
    t[base as usize - 1] = base as i64 - 1;
    t
}

/// Builds the integrand on coordinates `u` (1-based) at levels `k`, one table per coordinate.
pub fn make_haar(u: &[usize], k: &[u32], basis: &PrimeBasis, eta: Vec<Vec<i64>>) -> Result<HaarIntegrand> {
    if u.len() != k.len() || u.len() != eta.len() {
        return Err(invalid(format!("{} coordinates, {} levels and {} tables", u.len(), k.len(), eta.len())));
    }
    let subset = CoordSubset::from_indices(u)?;
    if subset.is_empty() {
        return Err(invalid("u must be nonempty"));
    }
    if subset.max_index() > basis.dimension() {
        return Err(invalid(format!("u = {subset} exceeds dimension {}", basis.dimension())));
    }
    let mut rows: Vec<(usize, u32, Vec<i64>)> =
        u.iter().copied().zip(k.iter().copied()).zip(eta).map(|((j, l), t)| (j, l, t)).collect();
    rows.sort_by_key(|r| r.0);

    let mut sigma2 = Rational::ONE;
    let mut bases = Vec::with_capacity(rows.len());
    for (j, _, table) in &rows {
        let b = basis.base(*j);
        if table.len() as u64 != b {
            return Err(invalid(format!("table for coordinate {j} has {} entries, base is {b}", table.len())));
        }
        if table.iter().map(|&c| c as i128).sum::<i128>() != 0 {
            return Err(invalid(format!("table for coordinate {j} does not sum to zero")));
        }
        if table.iter().all(|&c| c == 0) {
            return Err(invalid(format!("table for coordinate {j} is identically zero")));
        }
        let squares = table.iter().try_fold(0i128, |acc, &c| acc.checked_add((c as i128).pow(2)));
        let squares = squares.ok_or(Error::Overflow("sum of squared table entries"))?;
        sigma2 = sigma2.checked_mul(Rational::new(squares, b as i128)?)?;
        bases.push(b);
    }
    Ok(HaarIntegrand {
        u: subset,
        indices: rows.iter().map(|r| r.0).collect(),
        bases,
        levels: rows.iter().map(|r| r.1).collect(),
        eta: rows.into_iter().map(|r| r.2).collect(),
        sigma2,
    })
}

impl HaarIntegrand {
    /// [`make_haar`] with [`default_table`] on every coordinate.
    pub fn with_default_tables(u: &[usize], k: &[u32], basis: &PrimeBasis) -> Result<HaarIntegrand> {
        for &j in u {
            if j == 0 || j > basis.dimension() {
                return Err(invalid(format!("coordinate {j} outside 1..={}", basis.dimension())));
            }
        }
        let tables = u.iter().map(|&j| default_table(basis.base(j))).collect();
        make_haar(u, k, basis, tables)
    }

    pub fn u(&self) -> CoordSubset {
        self.u
    }

    /// Levels in ascending coordinate order.
    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    pub fn tables(&self) -> &[Vec<i64>] {
        &self.eta
    }

    pub fn sigma2(&self) -> Rational {
        self.sigma2
    }

    /// The gain query whose value is the variance multiplier at `n` points.
    pub fn gain_query(&self, basis: &PrimeBasis, n: u64) -> Result<GainQuery> {
        GainQuery::new(basis, &self.indices, &self.levels, n)
    }

    fn check_basis(&self, basis: &PrimeBasis) -> Result<()> {
        let matches = self.u.max_index() <= basis.dimension()
            && self.indices.iter().zip(&self.bases).all(|(&j, &b)| basis.base(j) == b);
        if matches {
            Ok(())
        } else {
            Err(invalid("integrand was built on a different prime basis"))
        }
    }
}

/// `f` at one point given by its full digit row (coordinate `j` at position `j - 1`).
pub fn evaluate(f: &HaarIntegrand, point: &[DigitVector]) -> Result<f64> {
    let mut value = 1.0;
    for ((&j, &k), table) in f.indices.iter().zip(&f.levels).zip(&f.eta) {
        let x =
            point.get(j - 1).ok_or_else(|| invalid(format!("point has {} coordinates, f needs {j}", point.len())))?;
        value *= table[x.digit(k as usize + 1)? as usize] as f64;
    }
    Ok(value)
}

/// Replicate means and the variance statistics derived from them.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimateSummary {
    pub n: u64,
    pub replicates: usize,
    pub means: Vec<f64>,
    pub grand_mean: f64,
    /// Unbiased sample variance of the replicate means.
    pub sample_variance: f64,
    /// `sigma^2 / n`, the variance of plain Monte Carlo.
    pub mc_variance: f64,
    pub sigma2: f64,
    /// `n * sample_variance / sigma^2`.
    pub empirical_gain: f64,
    /// Standard error of `empirical_gain`, from the fourth central moment of the means.
    pub gain_std_error: f64,
}

impl EstimateSummary {
    fn from_means(n: u64, means: Vec<f64>, sigma2: Rational) -> EstimateSummary {
        let r = means.len() as f64;
        let grand_mean = means.iter().sum::<f64>() / r;
        let (m2, m4) = means.iter().fold((0.0, 0.0), |(m2, m4), &x| {
            let d2 = (x - grand_mean).powi(2);
            (m2 + d2, m4 + d2 * d2)
        });
        let sample_variance = m2 / (r - 1.0);
        let fourth = m4 / r;
        let second = m2 / r;
        let var_of_variance = ((fourth - second * second) / r).max(0.0);
        let sigma2 = sigma2.to_f64();
        let scale = n as f64 / sigma2;
        EstimateSummary {
            n,
            replicates: means.len(),
            grand_mean,
            sample_variance,
            mc_variance: sigma2 / n as f64,
            sigma2,
            empirical_gain: scale * sample_variance,
            gain_std_error: scale * var_of_variance.sqrt(),
            means,
        }
    }
}

fn check_sizes(n: u64, replicates: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    if replicates < 2 {
        return Err(invalid("at least 2 replicates are needed for a variance"));
    }
    let work = n as u128 * replicates as u128;
    if work > MAX_EVALUATIONS {
        return Err(Error::SizeGuard { what: "n * replicates", value: work, limit: MAX_EVALUATIONS });
    }
    Ok(())
}

/// Mean of `f` over the first `n` scrambled Halton points, one run per replicate index.
///
/// `f` reads only the leading `k_j + 1` digits of coordinate `j`, which depend on
/// `i mod b_j^{k_j+1}`, so each replicate tabulates `eta_j` over those residues once.
pub fn rqmc_estimate(
    f: &HaarIntegrand,
    basis: &PrimeBasis,
    n: u64,
    replicates: usize,
    spec: &ScrambleSpec,
) -> Result<EstimateSummary> {
    check_sizes(n, replicates)?;
    f.check_basis(basis)?;
    let periods: Vec<u64> = f
        .bases
        .iter()
        .zip(&f.levels)
        .map(|(&b, &k)| {
            let m = crate::halton::pow_saturating(b, k as usize + 1);
            m.min(n as u128) as u64
        })
        .collect();
    let full_periods: Vec<u128> =
        f.bases.iter().zip(&f.levels).map(|(&b, &k)| crate::halton::pow_saturating(b, k as usize + 1)).collect();

    let replicate_mean = |r: usize| -> Result<f64> {
        let spec = spec.with_replicate(r as u64);
        let mut tables = Vec::with_capacity(f.indices.len());
        for (c, (&j, &k)) in f.indices.iter().zip(&f.levels).enumerate() {
            let b = f.bases[c];
            let depth = k as usize + 1;
            let scrambler = CoordinateScrambler::new(&spec, j, b, depth);
            let table = (0..periods[c])
                .map(|rho| {
                    let y = scrambler.apply(&DigitVector::leading(rho, b, depth))?;
                    Ok(f.eta[c][y.digits()[k as usize] as usize] as f64)
                })
                .collect::<Result<Vec<f64>>>()?;
            tables.push(table);
        }
        let mut sum = 0.0;
        for i in 0..n {
            let mut value = 1.0;
            for (table, &m) in tables.iter().zip(&full_periods) {
                value *= table[(i as u128 % m) as usize];
            }
            sum += value;
        }
        Ok(sum / n as f64)
    };
    let means = (0..replicates).into_par_iter().map(replicate_mean).collect::<Result<Vec<f64>>>()?;
    Ok(EstimateSummary::from_means(n, means, f.sigma2))
}

/// The same estimate with `n` IID uniform points in `[0,1)^d` per replicate.
pub fn mc_estimate(f: &HaarIntegrand, d: usize, n: u64, replicates: usize, seed: u64) -> Result<EstimateSummary> {
    check_sizes(n, replicates)?;
    if f.u.max_index() > d {
        return Err(invalid(format!("u = {} exceeds dimension {d}", f.u)));
    }
    let replicate_mean = |r: usize| -> f64 {
        let mut stream = KeyedStream::new(&[tag::MONTE_CARLO, seed, r as u64]);
        let mut sum = 0.0;
        for _ in 0..n {
            // a uniform coordinate has independent uniform digits
            let value: f64 = f.eta.iter().map(|t| t[stream.below(t.len() as u64) as usize] as f64).product();
            sum += value;
        }
        sum / n as f64
    };
    let means: Vec<f64> = (0..replicates).into_par_iter().map(replicate_mean).collect();
    Ok(EstimateSummary::from_means(n, means, f.sigma2))
}
