//! Consecutive Halton indices balance across strata, with or without scrambling.

use scrambled_halton::halton::{strata_total, PointSet};
use scrambled_halton::primes::first_primes;
use scrambled_halton::scramble::{randomize, ScrambleKind, ScrambleSpec};

fn main() -> scrambled_halton::Result<()> {
    let basis = first_primes(3)?;
    let levels = [1, 2, 2];
    let total = strata_total(&basis, &levels).expect("small product");
    let start = 12_345;
    let points = PointSet::halton(&basis, start, total as usize)?;
    for kind in [ScrambleKind::None, ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
        let counts = randomize(&points, &ScrambleSpec::new(kind, 1))?.stratum_counts(&levels)?;
        let once = counts.values().all(|&c| c == 1);
        println!("{kind:>6}: {} of {total} strata occupied, each exactly once: {once}", counts.len());
    }
    Ok(())
}
