//! The first primes serve as Halton bases, one per coordinate.
//!
//! Run with `cargo run --example primes -- 10`.

use scrambled_halton::primes::{first_primes, nth_prime};

fn main() -> scrambled_halton::Result<()> {
    let d: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let basis = first_primes(d)?;
    println!("first {d} bases: {:?}", basis.bases());
    println!("the millionth prime is {}", nth_prime(1_000_000)?);
    Ok(())
}
