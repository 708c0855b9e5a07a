//! Structural facts about gains that the worst-case search relies on.

use proptest::prelude::*;
use scrambled_halton::gains::{gain_exact, gamma_at_n, gamma_max, CoordSubset, GainQuery};
use scrambled_halton::primes::first_primes;
use scrambled_halton::Rational;

#[test]
fn full_set_at_zero_levels_attains_the_supremum() {
    // the maximum of Gamma_d(n) over every (u, k, n) equals the k = 0, u = 1:d search
    let basis = first_primes(4).unwrap();
    for d in 2..=4 {
        let period: u64 = basis.bases()[..d].iter().product();
        let over_all = (1..=2 * period).map(|n| gamma_at_n(d, n, &basis).unwrap().value).max().unwrap();
        assert_eq!(over_all, gamma_max(d, &basis, None).unwrap().gamma, "d = {d}");
    }
}

#[test]
fn max_over_n_is_reached_within_one_period() {
    let basis = first_primes(3).unwrap();
    let q = GainQuery::zero_levels(&basis, CoordSubset::full(3), 1).unwrap();
    let in_period = (1..=30).map(|n| gain_exact(&q.at(n).unwrap()).unwrap()).max().unwrap();
    let beyond = (31..=600).map(|n| gain_exact(&q.at(n).unwrap()).unwrap()).max().unwrap();
    assert!(beyond <= in_period);
}

proptest! {
    #[test]
    fn single_coordinate_closed_form(j in 1usize..=6, k in 0u32..4, s in 1u64..13) {
        let basis = first_primes(6).unwrap();
        let b = basis.base(j);
        let bk = b.pow(k);
        // below b^k nothing is stratified yet
        if bk > 1 {
            let below = GainQuery::new(&basis, &[j], &[k], 1 + s % (bk - 1)).unwrap();
            prop_assert_eq!(gain_exact(&below).unwrap(), Rational::ONE);
        }
        // s b^k points with s < b: (b - s) / (b - 1)
        let s = s % b;
        prop_assume!(s > 0);
        let q = GainQuery::new(&basis, &[j], &[k], s * bk).unwrap();
        let expected = Rational::new((b - s) as i128, (b - 1) as i128).unwrap();
        prop_assert_eq!(gain_exact(&q).unwrap(), expected);
    }

    #[test]
    fn gains_are_nonnegative_and_bounded(mask in 1u64..32, n in 1u64..3000, seed in 0u32..81) {
        let basis = first_primes(5).unwrap();
        let u = CoordSubset::from_mask(mask);
        let idx: Vec<usize> = u.indices().collect();
        let k: Vec<u32> = (0..idx.len()).map(|c| (seed / 3u32.pow(c as u32 % 4)) % 3).collect();
        let g = gain_exact(&GainQuery::new(&basis, &idx, &k, n).unwrap()).unwrap();
        let bound: f64 = idx.iter().skip(1).map(|&j| basis.base(j) as f64 / (basis.base(j) as f64 - 1.0)).product();
        prop_assert!(g >= Rational::ZERO);
        prop_assert!(g.to_f64() <= bound + 1e-12);
    }
}
