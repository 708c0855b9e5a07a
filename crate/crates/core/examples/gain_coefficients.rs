//! Exact gain coefficients and the pair-counting definition they agree with.

use scrambled_halton::gains::{gain_bruteforce, gain_curve, gain_exact, GainQuery};
use scrambled_halton::primes::first_primes;

fn main() -> scrambled_halton::Result<()> {
    let basis = first_primes(3)?;

    let peak = GainQuery::new(&basis, &[1, 2], &[0, 0], 2)?;
    println!("G_{{1,2}},(0,0)(2)   = {}", gain_exact(&peak)?);
    println!("by pair counting     = {}", gain_bruteforce(&peak)?);

    let dip = GainQuery::new(&basis, &[1, 2, 3], &[0, 0, 0], 2)?;
    println!("G_{{1,2,3}},(0,0,0)(2) = {}", gain_exact(&dip)?);

    // the curve vanishes whenever n is a multiple of prod b^(k+1) = 6
    let curve = gain_curve(&peak, 12)?;
    for (n, g) in curve {
        println!("n = {n:>2}: {g:>6} ({:.4})", g.to_f64());
    }
    Ok(())
}
