//! Reduced fractions over checked 128-bit integers.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};

/// An exact fraction `numerator / denominator` in lowest terms with a positive denominator.
///
/// Arithmetic is overflow-checked: every operation returns [`Error::Overflow`]
/// instead of wrapping.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i128, den: i128) -> Result<Rational> {
        if den == 0 {
            return Err(invalid("zero denominator"));
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1);
        let overflow = |_| Error::Overflow("rational normalisation");
        let n = i128::try_from(num.unsigned_abs() / g).map_err(overflow)?;
        let d = i128::try_from(den.unsigned_abs() / g).map_err(overflow)?;
        let n = if (num < 0) != (den < 0) { -n } else { n };
        Ok(Rational { num: n, den: d })
    }

    pub fn from_integer(n: i128) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn numer(&self) -> i128 {
        self.num
    }

    pub fn denom(&self) -> i128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        // split off the integer part so huge but balanced fractions stay accurate
        let q = self.num.div_euclid(self.den);
        let r = self.num.rem_euclid(self.den);
        q as f64 + r as f64 / self.den as f64
    }

    pub fn checked_add(self, rhs: Rational) -> Result<Rational> {
        let g = gcd(self.den as u128, rhs.den as u128) as i128;
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let a = self.num.checked_mul(lhs_scale).ok_or(Error::Overflow("rational addition"))?;
        let b = rhs.num.checked_mul(rhs_scale).ok_or(Error::Overflow("rational addition"))?;
        let num = a.checked_add(b).ok_or(Error::Overflow("rational addition"))?;
        let den = self.den.checked_mul(lhs_scale).ok_or(Error::Overflow("rational addition"))?;
        Rational::new(num, den)
    }

    pub fn checked_neg(self) -> Result<Rational> {
        Ok(Rational { num: self.num.checked_neg().ok_or(Error::Overflow("rational negation"))?, den: self.den })
    }

    pub fn checked_sub(self, rhs: Rational) -> Result<Rational> {
        self.checked_add(rhs.checked_neg()?)
    }

    pub fn checked_mul(self, rhs: Rational) -> Result<Rational> {
        // cross-reduce first to keep intermediates small
        let g1 = gcd(self.num.unsigned_abs(), rhs.den as u128).max(1) as i128;
        let g2 = gcd(rhs.num.unsigned_abs(), self.den as u128).max(1) as i128;
        let num = (self.num / g1).checked_mul(rhs.num / g2).ok_or(Error::Overflow("rational multiplication"))?;
        let den = (self.den / g2).checked_mul(rhs.den / g1).ok_or(Error::Overflow("rational multiplication"))?;
        Rational::new(num, den)
    }

    pub fn recip(self) -> Result<Rational> {
        Rational::new(self.den, self.num)
    }

    pub fn checked_div(self, rhs: Rational) -> Result<Rational> {
        self.checked_mul(rhs.recip()?)
    }
}

/// Compares `a/b` with `c/d` for positive `b`, `d` without forming cross products.
fn cmp_fractions(mut a: i128, mut b: i128, mut c: i128, mut d: i128) -> Ordering {
    let mut flipped = false;
    loop {
        let (qa, ra) = (a.div_euclid(b), a.rem_euclid(b));
        let (qc, rc) = (c.div_euclid(d), c.rem_euclid(d));
        let ord = match qa.cmp(&qc) {
            Ordering::Equal => match (ra == 0, rc == 0) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Less,
                (false, true) => Ordering::Greater,
                // a/b - qa = ra/b; compare the reciprocals b/ra and d/rc, reversed
                (false, false) => {
                    (a, b, c, d) = (b, ra, d, rc);
                    flipped = !flipped;
                    continue;
                }
            },
            other => other,
        };
        return if flipped { ord.reverse() } else { ord };
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_fractions(self.num, self.den, other.num, other.den)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Rational> {
        let parse = |t: &str| t.trim().parse::<i128>().map_err(|e| invalid(format!("bad rational {s:?}: {e}")));
        match s.split_once('/') {
            Some((n, d)) => Rational::new(parse(n)?, parse(d)?),
            None => Ok(Rational::from_integer(parse(s)?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d).unwrap()
    }

    #[test]
    fn normalises() {
        assert_eq!(r(6, 4), r(3, 2));
        assert_eq!(r(3, -6), r(-1, 2));
        assert_eq!(r(0, -5), Rational::ZERO);
        assert_eq!(r(-4, -2).to_string(), "2/1");
        assert!(Rational::new(1, 0).is_err());
    }

    #[test]
    fn arithmetic() {
        assert_eq!(r(1, 2).checked_add(r(1, 3)).unwrap(), r(5, 6));
        assert_eq!(r(1, 2).checked_sub(r(1, 3)).unwrap(), r(1, 6));
        assert_eq!(r(3, 4).checked_mul(r(2, 9)).unwrap(), r(1, 6));
        assert_eq!(r(3, 4).checked_div(r(3, 8)).unwrap(), r(2, 1));
        assert!(r(0, 1).recip().is_err());
    }

    #[test]
    fn overflow_is_an_error() {
        let big = Rational::from_integer(i128::MAX / 2 + 1);
        assert_eq!(big.checked_add(big), Err(Error::Overflow("rational addition")));
        assert!(big.checked_mul(Rational::from_integer(3)).is_err());
    }

    #[test]
    fn ordering_without_overflow() {
        let a = r(i128::MAX - 1, i128::MAX);
        let b = r(i128::MAX - 2, i128::MAX - 1);
        assert!(a > b);
        assert!(r(-1, 3) < r(-1, 4));
        assert_eq!(r(9, 5).cmp(&r(18, 10)), Ordering::Equal);
    }

    #[test]
    fn parse_round_trip() {
        assert_eq!("3/2".parse::<Rational>().unwrap(), r(3, 2));
        assert_eq!("-7".parse::<Rational>().unwrap(), r(-7, 1));
        assert!("1/x".parse::<Rational>().is_err());
    }

    proptest! {
        #[test]
        fn ordering_matches_cross_multiplication(a in -10_000i128..10_000, b in 1i128..10_000,
                                                 c in -10_000i128..10_000, d in 1i128..10_000) {
            prop_assert_eq!(r(a, b).cmp(&r(c, d)), (a * d).cmp(&(c * b)));
        }

        #[test]
        fn display_parses_back(a in -1_000_000i128..1_000_000, b in 1i128..1_000_000) {
            let x = r(a, b);
            prop_assert_eq!(x.to_string().parse::<Rational>().unwrap(), x);
        }
    }
}
