//! Closed-form bounds on gains.
//!
//! - Upper bound for one `u`: `prod_{j in u, j != j_m} b_j / (b_j - 1)`, `j_m` the smallest base.
//! - Lower bound witness: with `j*` in `u` among coordinates 1 and 2 and
//!   `n* = prod_{j in u, j != j*} b_j`, `G_{u,0}(n*) = prod_{j != j*} (b_j + 1) / b_j`.
//! - Over all of `1:d` (`d >= 2`): `3/4 prod (b_j + 1)/b_j <= Gamma_d <= 1/2 prod b_j/(b_j - 1)`.

use super::{gain_exact, CoordSubset, GainQuery};
use crate::error::{invalid, Error, Result};
use crate::primes::{first_primes, PrimeBasis};
use crate::rational::Rational;

/// `n*` and the gain there, computed both ways.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerBoundWitness {
    pub n_star: u64,
    /// `G_{u,0}(n*)` from [`gain_exact`].
    pub value: Rational,
    /// `prod_{j in u, j != j*} (b_j + 1) / b_j`.
    pub closed_form: Rational,
}

pub fn lower_bound_n_star(u: CoordSubset, basis: &PrimeBasis, j_star: usize) -> Result<LowerBoundWitness> {
    if !(j_star == 1 || j_star == 2) || !u.contains(j_star) {
        return Err(invalid(format!("j* = {j_star} must lie in u = {u} and in {{1, 2}}")));
    }
    if u.max_index() > basis.dimension() {
        return Err(invalid(format!("u = {u} exceeds dimension {}", basis.dimension())));
    }
    let mut n_star: u64 = 1;
    let mut closed_form = Rational::ONE;
    for j in u.indices().filter(|&j| j != j_star) {
        let b = basis.base(j);
        n_star = n_star.checked_mul(b).ok_or(Error::Overflow("n*"))?;
        closed_form = closed_form.checked_mul(Rational::new(b as i128 + 1, b as i128)?)?;
    }
    let value = gain_exact(&GainQuery::zero_levels(basis, u, n_star)?)?;
    Ok(LowerBoundWitness { n_star, value, closed_form })
}

/// `prod_{j in u - {j_m}} b_j / (b_j - 1)` as an exact fraction.
pub fn upper_bound_u_exact(u: CoordSubset, basis: &PrimeBasis) -> Result<Rational> {
    if u.is_empty() {
        return Err(invalid("u must be nonempty"));
    }
    if u.max_index() > basis.dimension() {
        return Err(invalid(format!("u = {u} exceeds dimension {}", basis.dimension())));
    }
    // primes ascend, so the smallest base sits at the smallest index
    let j_min = u.indices().next().unwrap();
    u.indices().filter(|&j| j != j_min).try_fold(Rational::ONE, |acc, j| {
        let b = basis.base(j) as i128;
        acc.checked_mul(Rational::new(b, b - 1)?)
    })
}

/// Floating value of [`upper_bound_u_exact`], accumulated in log space.
pub fn upper_bound_u(u: CoordSubset, basis: &PrimeBasis) -> Result<f64> {
    if u.is_empty() {
        return Err(invalid("u must be nonempty"));
    }
    if u.max_index() > basis.dimension() {
        return Err(invalid(format!("u = {u} exceeds dimension {}", basis.dimension())));
    }
    let j_min = u.indices().next().unwrap();
    let log: f64 = u.indices().filter(|&j| j != j_min).map(|j| -(-1.0 / basis.base(j) as f64).ln_1p()).sum();
    Ok(log.exp())
}

/// `(lower, upper)` bounds on `Gamma_d`; both are 1 when `d = 1`.
pub fn global_bounds(d: usize) -> Result<(f64, f64)> {
    let basis = first_primes(d)?;
    let mut acc = LogProducts::default();
    for &b in &basis.bases()[..d] {
        acc.push(b);
    }
    Ok(acc.bounds(d))
}

/// One row of the bounds table; `guide = 3/2 + ln(d/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundsRow {
    pub d: usize,
    pub lower: f64,
    pub upper: f64,
    pub guide: f64,
}

/// Neumaier-compensated running sums of `ln((b+1)/b)` and `ln(b/(b-1))`.
#[derive(Clone, Copy, Debug, Default)]
struct LogProducts {
    lower: (f64, f64),
    upper: (f64, f64),
}

fn neumaier_add((sum, comp): (f64, f64), x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, comp + c)
}

impl LogProducts {
    fn push(&mut self, b: u64) {
        let inv = 1.0 / b as f64;
        self.lower = neumaier_add(self.lower, inv.ln_1p());
        self.upper = neumaier_add(self.upper, -(-inv).ln_1p());
    }

    fn bounds(&self, d: usize) -> (f64, f64) {
        if d == 1 {
            return (1.0, 1.0);
        }
        let lower = (0.75f64.ln() + self.lower.0 + self.lower.1).exp();
        let upper = (0.5f64.ln() + self.upper.0 + self.upper.1).exp();
        (lower, upper)
    }
}

/// Rows `d = 1..=d_max`, computed incrementally over the primes.
pub fn bounds_table(d_max: usize) -> Result<impl Iterator<Item = BoundsRow>> {
    let basis = first_primes(d_max)?;
    let mut acc = LogProducts::default();
    Ok((1..=d_max).map(move |d| {
        acc.push(basis.base(d));
        let (lower, upper) = acc.bounds(d);
        BoundsRow { d, lower, upper, guide: 1.5 + (d as f64 / 2.0).ln() }
    }))
}
