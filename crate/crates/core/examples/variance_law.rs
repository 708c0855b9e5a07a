//! The variance of a scrambled Halton estimate is `G sigma^2 / n`.
//!
//! A Haar integrand concentrates all its variance in one `(u, k)` component, so
//! the replicate variance divided by the Monte Carlo variance estimates the gain.

use scrambled_halton::gains::gain_exact;
use scrambled_halton::primes::first_primes;
use scrambled_halton::rqmc::{mc_estimate, rqmc_estimate, HaarIntegrand};
use scrambled_halton::scramble::{ScrambleKind, ScrambleSpec};

fn main() -> scrambled_halton::Result<()> {
    let basis = first_primes(2)?;
    let f = HaarIntegrand::with_default_tables(&[1, 2], &[0, 0], &basis)?;
    println!("sigma^2 = {}", f.sigma2());
    for n in [1, 2, 3, 4, 6] {
        let expected = gain_exact(&f.gain_query(&basis, n)?)?;
        for kind in [ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
            let est = rqmc_estimate(&f, &basis, n, 20_000, &ScrambleSpec::new(kind, 7))?;
            println!(
                "n = {n}, {kind:>6}: gain {:.4} +- {:.4}, exact {expected}",
                est.empirical_gain, est.gain_std_error
            );
        }
    }
    let mc = mc_estimate(&f, 2, 4, 20_000, 7)?;
    println!("Monte Carlo at n = 4: gain {:.4} +- {:.4}", mc.empirical_gain, mc.gain_std_error);
    Ok(())
}
