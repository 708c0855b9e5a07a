//! Unscrambled Halton points and their base-b digit expansions.

use scrambled_halton::halton::{radical_inverse, radical_inverse_exact, PointSet};
use scrambled_halton::primes::first_primes;

fn main() -> scrambled_halton::Result<()> {
    let basis = first_primes(3)?;
    let points = PointSet::halton(&basis, 0, 8)?;
    for (i, row) in points.rows() {
        println!("{i:>2}  {row:.6?}");
    }

    let digits = &points.point_digits(5)[1];
    println!("index 5 in base 3 has digits {:?} (least significant first)", &digits.digits()[..3]);
    println!("phi_3(5) = {} = {}", radical_inverse_exact(5, 3)?, radical_inverse(5, 3));
    Ok(())
}
