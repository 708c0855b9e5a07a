//! Nested uniform and linear scrambles of the same points.
//!
//! Every random choice is keyed by `(seed, replicate, coordinate)`, so rerunning
//! with the same key reproduces the points exactly.

use scrambled_halton::halton::PointSet;
use scrambled_halton::primes::first_primes;
use scrambled_halton::scramble::{randomize, ScrambleKind, ScrambleSpec};

fn main() -> scrambled_halton::Result<()> {
    let basis = first_primes(2)?;
    let points = PointSet::halton(&basis, 0, 6)?;
    for kind in [ScrambleKind::None, ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
        for replicate in 0..2 {
            let spec = ScrambleSpec::new(kind, 2024).with_replicate(replicate);
            let scrambled = randomize(&points, &spec)?;
            let rows: Vec<String> = scrambled.rows().map(|(_, x)| format!("({:.3}, {:.3})", x[0], x[1])).collect();
            println!("{kind:>6} r={replicate}: {}", rows.join(" "));
            if kind == ScrambleKind::None {
                break;
            }
        }
    }
    Ok(())
}
