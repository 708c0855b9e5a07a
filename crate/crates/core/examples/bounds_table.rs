//! Bounds on the worst-case gain as the dimension grows, against `3/2 + ln(d/2)`.

use scrambled_halton::gains::bounds_table;

fn main() -> scrambled_halton::Result<()> {
    let d_max = 1_000_000;
    let mut checkpoints = [2, 10, 100, 1_000, 10_000, 100_000, 1_000_000].into_iter().peekable();
    for row in bounds_table(d_max)? {
        if checkpoints.peek() == Some(&row.d) {
            checkpoints.next();
            println!("d = {:>9}: {:.6} <= Gamma_d <= {:.6}   guide {:.6}", row.d, row.lower, row.upper, row.guide);
        }
    }
    Ok(())
}
