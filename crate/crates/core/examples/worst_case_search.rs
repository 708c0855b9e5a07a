//! Worst-case gains: over every `(u, k)` at one `n`, and over every `n`.

use scrambled_halton::gains::{gamma_at_n, gamma_max, lower_bound_n_star, CoordSubset};
use scrambled_halton::primes::first_primes;

fn main() -> scrambled_halton::Result<()> {
    let basis = first_primes(6)?;
    for d in 1..=6 {
        let s = gamma_max(d, &basis, None)?;
        println!(
            "d = {d}: Gamma = {} ({:.6}) at n = {}, bracket [{:.6}, {:.6}]",
            s.gamma,
            s.gamma.to_f64(),
            s.argmax_n,
            s.lower_bound,
            s.upper_bound
        );
    }

    let at = gamma_at_n(3, 2, &basis)?;
    println!("Gamma_3(2) = {} attained by u = {}, k = {:?}", at.value, at.u, at.k);

    let w = lower_bound_n_star(CoordSubset::full(4), &basis, 2)?;
    println!("n* = {} gives {} = {}", w.n_star, w.value, w.closed_form);
    Ok(())
}
