//! Scrambled Halton sequences and their randomization gain coefficients.
//!
//! The crate is organised bottom-up:
//!
//! - [`primes`]: the first `d` primes, used as per-coordinate bases.
//! - [`halton`]: digit expansions, radical inverses, Halton point sets and strata.
//! - [`scramble`]: nested uniform and random linear (with digital shift) scrambles.
//! - [`gains`]: exact gain coefficients `G_{u,k}(n)`, worst-case searches and bounds.
//! - [`rqmc`]: replicated randomized QMC estimates on single-component Haar integrands.
//! - [`cli`]: the `halton-gain` command line grammar.
//!
//! Every randomized quantity is a pure function of a `(seed, replicate, coordinate)`
//! key, so results reproduce bit-for-bit regardless of thread scheduling.
//!
//! ```
//! use scrambled_halton::{gains::{gain_exact, GainQuery}, primes::first_primes};
//!
//! let basis = first_primes(2).unwrap();
//! let query = GainQuery::new(&basis, &[1, 2], &[0, 0], 2).unwrap();
//! assert_eq!(gain_exact(&query).unwrap().to_string(), "3/2");
//! ```

pub mod cli;
pub mod error;
pub mod gains;
pub mod halton;
pub mod prf;
pub mod primes;
pub mod rational;
pub mod rqmc;
pub mod scramble;

pub use error::{Error, Result};
pub use rational::Rational;
