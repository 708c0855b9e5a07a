//! Plot-ready CSV for the three figures, written through the command line front end.
//!
//! Run with `cargo run --example figures -- /tmp/figures` to write fig1.csv, fig2.csv and fig3.csv.

use std::io;
use std::path::PathBuf;

use scrambled_halton::cli::dispatch;

fn main() {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "figures".into()));
    std::fs::create_dir_all(&dir).expect("output directory");
    for (which, extra) in [("1", vec!["--d-max", "1000"]), ("2", vec![]), ("3", vec![])] {
        let path = dir.join(format!("fig{which}.csv"));
        let mut args = vec!["halton-gain", "figure", which, "--out", path.to_str().unwrap()];
        args.extend(extra);
        let code = dispatch(args, &mut io::stdout(), &mut io::stderr());
        println!("figure {which} -> {} (exit {code})", path.display());
    }
}
