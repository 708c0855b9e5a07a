//! Randomizations of Halton digits, applied independently per coordinate.
//!
//! Two kinds are supported:
//!
//! - **Nested uniform**: digit `s` is replaced by `pi(a_s)` where `pi` is a
//!   uniform random permutation of `Z_b` attached to the node reached by the
//!   preceding digits `a_1 .. a_{s-1}`.
//! - **Linear with digital shift**: `y_s = sum_{t <= s} l_{s,t} a_t + e_s (mod b)`
//!   with a random lower-triangular matrix of nonzero diagonal and a random shift.
//!
//! All random choices are drawn from [`crate::prf`] under keys built from
//! `(seed, replicate, coordinate, ...)`. Individual tree nodes and matrix
//! entries are keyed separately, so scrambling to depth `D` agrees with the
//! first `D` digits of scrambling to any greater depth.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::halton::{DigitVector, PointSet};
use crate::prf::{self, tag, KeyedStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ScrambleKind {
    #[default]
    None,
    NestedUniform,
    LinearDigitalShift,
}

impl FromStr for ScrambleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScrambleKind> {
        match s {
            "none" => Ok(ScrambleKind::None),
            "nested" | "nested-uniform" => Ok(ScrambleKind::NestedUniform),
            "linear" | "linear-digital-shift" => Ok(ScrambleKind::LinearDigitalShift),
            other => Err(invalid(format!("unknown scramble kind {other:?}"))),
        }
    }
}

impl fmt::Display for ScrambleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScrambleKind::None => "none",
            ScrambleKind::NestedUniform => "nested",
            ScrambleKind::LinearDigitalShift => "linear",
        })
    }
}

/// Which randomization to apply and the key that fixes its random choices.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ScrambleSpec {
    pub kind: ScrambleKind,
    pub seed: u64,
    pub replicate: u64,
    /// Scramble depth per coordinate; defaults to the stored digit precision.
    pub precision: Option<Vec<usize>>,
}

impl ScrambleSpec {
    pub fn new(kind: ScrambleKind, seed: u64) -> ScrambleSpec {
        ScrambleSpec { kind, seed, replicate: 0, precision: None }
    }

    pub fn with_replicate(&self, replicate: u64) -> ScrambleSpec {
        ScrambleSpec { replicate, ..self.clone() }
    }
}

/// A uniform permutation of `Z_b` attached to one node of the digit tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationNode {
    pub base: u64,
    /// Input digits leading to this node, most significant first.
    pub prefix: Vec<u64>,
    pub permutation: Vec<u64>,
}

impl PermutationNode {
    /// The node reached by `prefix` in coordinate `coord` (1-based).
    pub fn draw(spec: &ScrambleSpec, coord: usize, base: u64, prefix: &[u64]) -> PermutationNode {
        let mut value: u128 = 0;
        let mut scale: u128 = 1;
        for &a in prefix {
            value += a as u128 * scale;
            scale = scale.saturating_mul(base as u128);
        }
        PermutationNode {
            base,
            prefix: prefix.to_vec(),
            permutation: node_permutation(spec, coord, base, prefix.len() + 1, value),
        }
    }

    pub fn apply(&self, digit: u64) -> u64 {
        self.permutation[digit as usize]
    }
}

fn node_permutation(spec: &ScrambleSpec, coord: usize, base: u64, level: usize, prefix: u128) -> Vec<u64> {
    KeyedStream::new(&[
        tag::NESTED,
        spec.seed,
        spec.replicate,
        coord as u64,
        level as u64,
        prefix as u64,
        (prefix >> 64) as u64,
    ])
    .permutation(base as usize)
}

/// Nested uniform scramble of one coordinate's digits.
///
/// `coord` is the 1-based coordinate index. With `spec.kind == None` the
/// digits pass through unchanged.
pub fn nested_scramble_digits(x: &DigitVector, coord: usize, spec: &ScrambleSpec) -> DigitVector {
    if spec.kind == ScrambleKind::None {
        return x.clone();
    }
    let base = x.base();
    let mut out = x.clone();
    let mut prefix: u128 = 0;
    let mut scale: u128 = 1;
    for (s, (&a, y)) in x.digits().iter().zip(out.digits_mut().iter_mut()).enumerate() {
        *y = node_permutation(spec, coord, base, s + 1, prefix)[a as usize];
        prefix += a as u128 * scale;
        scale = scale.saturating_mul(base as u128);
    }
    out
}

/// Lower-triangular digit matrix plus digital shift for one coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearScramble {
    base: u64,
    /// Row `s` (0-based) holds `l_{s,0..=s}`.
    rows: Vec<Vec<u64>>,
    shift: Vec<u64>,
}

impl LinearScramble {
    pub fn new(base: u64, rows: Vec<Vec<u64>>, shift: Vec<u64>) -> Result<LinearScramble> {
        if rows.len() != shift.len() {
            return Err(invalid("matrix and shift depths differ"));
        }
        for (s, row) in rows.iter().enumerate() {
            if row.len() != s + 1 {
                return Err(invalid(format!("row {} must have {} entries", s + 1, s + 1)));
            }
            if row[s] == 0 {
                return Err(invalid(format!("diagonal entry {} is zero", s + 1)));
            }
            if row.iter().any(|&l| l >= base) {
                return Err(invalid(format!("row {} has an entry outside Z_{base}", s + 1)));
            }
        }
        if shift.iter().any(|&e| e >= base) {
            return Err(invalid(format!("shift digit outside Z_{base}")));
        }
        Ok(LinearScramble { base, rows, shift })
    }

    pub fn identity(base: u64, depth: usize) -> LinearScramble {
        let rows = (0..depth).map(|s| (0..=s).map(|t| u64::from(t == s)).collect()).collect();
        LinearScramble { base, rows, shift: vec![0; depth] }
    }

    /// Uniform draw: diagonal from `1..b`, other entries and the shift from `Z_b`.
    pub fn draw(spec: &ScrambleSpec, coord: usize, base: u64, depth: usize) -> LinearScramble {
        let key = |t: u64, s: usize, c: usize| [t, spec.seed, spec.replicate, coord as u64, s as u64, c as u64];
        let rows = (0..depth)
            .map(|s| {
                (0..=s)
                    .map(|t| {
                        if s == t {
                            1 + prf::uniform_below(&key(tag::LINEAR_MATRIX, s, t), base - 1)
                        } else {
                            prf::uniform_below(&key(tag::LINEAR_MATRIX, s, t), base)
                        }
                    })
                    .collect()
            })
            .collect();
        let shift = (0..depth).map(|s| prf::uniform_below(&key(tag::LINEAR_SHIFT, s, 0), base)).collect();
        LinearScramble { base, rows, shift }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn depth(&self) -> usize {
        self.rows.len()
    }

    /// `l_{s,t}`, 1-based with `t <= s`.
    pub fn entry(&self, s: usize, t: usize) -> u64 {
        self.rows[s - 1][t - 1]
    }

    pub fn shift(&self) -> &[u64] {
        &self.shift
    }
}

/// `y_s = (sum_{t <= s} l_{s,t} x_t + e_s) mod b`.
pub fn linear_scramble_digits(x: &DigitVector, scramble: &LinearScramble) -> Result<DigitVector> {
    if x.base() != scramble.base {
        return Err(invalid(format!("digits in base {} but scramble in base {}", x.base(), scramble.base)));
    }
    if scramble.depth() < x.precision() {
        return Err(invalid(format!("scramble depth {} does not cover {} digits", scramble.depth(), x.precision())));
    }
    let b = scramble.base as u128;
    let digits = x.digits();
    let out = (0..digits.len())
        .map(|s| {
            let acc = scramble.rows[s]
                .iter()
                .zip(digits)
                .fold(scramble.shift[s] as u128, |acc, (&l, &a)| (acc + l as u128 * a as u128) % b);
            acc as u64
        })
        .collect();
    DigitVector::from_digits(x.base(), out)
}

/// The scramble of one coordinate, prepared once and applied to many points.
#[derive(Clone, Debug)]
pub enum CoordinateScrambler {
    Identity,
    Nested { spec: ScrambleSpec, coord: usize },
    Linear(LinearScramble),
}

impl CoordinateScrambler {
    pub fn new(spec: &ScrambleSpec, coord: usize, base: u64, depth: usize) -> CoordinateScrambler {
        match spec.kind {
            ScrambleKind::None => CoordinateScrambler::Identity,
            ScrambleKind::NestedUniform => CoordinateScrambler::Nested { spec: spec.clone(), coord },
            ScrambleKind::LinearDigitalShift => {
                CoordinateScrambler::Linear(LinearScramble::draw(spec, coord, base, depth))
            }
        }
    }

    pub fn apply(&self, x: &DigitVector) -> Result<DigitVector> {
        match self {
            CoordinateScrambler::Identity => Ok(x.clone()),
            CoordinateScrambler::Nested { spec, coord } => Ok(nested_scramble_digits(x, *coord, spec)),
            CoordinateScrambler::Linear(l) => linear_scramble_digits(x, l),
        }
    }
}

/// Scrambles every coordinate of every point; row order is preserved.
pub fn randomize(points: &PointSet, spec: &ScrambleSpec) -> Result<PointSet> {
    if spec.kind == ScrambleKind::None {
        return Ok(points.clone());
    }
    let d = points.dimension();
    if let Some(p) = &spec.precision {
        if p.len() != d {
            return Err(invalid(format!("{} scramble depths for dimension {d}", p.len())));
        }
    }
    let depth = |j: usize, stored: usize| -> Result<usize> {
        match &spec.precision {
            None => Ok(stored),
            Some(p) if p[j] >= stored => Ok(p[j]),
            Some(p) => Err(invalid(format!(
                "scramble depth {} is below the {stored} stored digits of coordinate {}",
                p[j],
                j + 1
            ))),
        }
    };
    let mut scramblers = Vec::with_capacity(d);
    let mut depths = Vec::with_capacity(d);
    for j in 0..d {
        let first = &points.point_digits(0)[j];
        let dj = depth(j, first.precision())?;
        scramblers.push(CoordinateScrambler::new(spec, j + 1, first.base(), dj));
        depths.push(dj);
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut coords = Vec::with_capacity(points.len() * d);
    for p in 0..points.len() {
        let mut row = Vec::with_capacity(d);
        for (j, x) in points.point_digits(p).iter().enumerate() {
            let mut input = x.clone();
            input.digits_mut().resize(depths[j], 0);
            let y = scramblers[j].apply(&input)?;
            coords.push(realize(&y, &input, j + 1, spec));
            row.push(y);
        }
        rows.push(row);
    }
    Ok(PointSet::with_coords(points.start(), rows, coords))
}

/// Float value of scrambled digits. Under nested scrambling the digits past
/// the stored depth are fresh uniform draws, folded in as one uniform tail.
fn realize(y: &DigitVector, input: &DigitVector, coord: usize, spec: &ScrambleSpec) -> f64 {
    let head = y.to_f64();
    if spec.kind != ScrambleKind::NestedUniform {
        return head;
    }
    let node = input.index_value().unwrap_or(u128::MAX);
    let u = KeyedStream::new(&[
        tag::NESTED_TAIL,
        spec.seed,
        spec.replicate,
        coord as u64,
        node as u64,
        (node >> 64) as u64,
    ])
    .next_f64();
    let tail = u * (y.base() as f64).powi(-(y.precision() as i32));
    (head + tail).min(crate::halton::ONE_MINUS_ULP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::halton::{digits_of, pow_saturating};
    use crate::primes::first_primes;
    use std::collections::BTreeSet;

    fn spec(kind: ScrambleKind, seed: u64, replicate: u64) -> ScrambleSpec {
        ScrambleSpec { kind, seed, replicate, precision: None }
    }

    #[test]
    fn none_passes_through() {
        let x = digits_of(44, 3, 6).unwrap();
        assert_eq!(nested_scramble_digits(&x, 1, &ScrambleSpec::default()), x);
        let pts = PointSet::halton(&first_primes(3).unwrap(), 5, 7).unwrap();
        assert_eq!(randomize(&pts, &ScrambleSpec::default()).unwrap(), pts);
    }

    #[test]
    fn nested_is_deterministic() {
        let x = digits_of(12345, 5, 10).unwrap();
        let s = spec(ScrambleKind::NestedUniform, 11, 3);
        assert_eq!(nested_scramble_digits(&x, 2, &s), nested_scramble_digits(&x, 2, &s));
        assert_ne!(nested_scramble_digits(&x, 2, &s), nested_scramble_digits(&x, 2, &s.with_replicate(4)));
    }

    #[test]
    fn nested_first_binary_digit_is_fair() {
        let x = digits_of(0, 2, 4).unwrap();
        let ones: u32 = (0..10_000)
            .map(|r| nested_scramble_digits(&x, 1, &spec(ScrambleKind::NestedUniform, 5, r)).digits()[0] as u32)
            .sum();
        let freq = f64::from(ones) / 10_000.0;
        // 4 sigma of binomial(10^4, 1/2) is 0.02
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn permutation_nodes_match_the_scramble() {
        let s = spec(ScrambleKind::NestedUniform, 2, 0);
        let x = digits_of(7 + 3 * 5, 5, 4).unwrap();
        let y = nested_scramble_digits(&x, 3, &s);
        for level in 0..4 {
            let node = PermutationNode::draw(&s, 3, 5, &x.digits()[..level]);
            let mut sorted = node.permutation.clone();
            sorted.sort();
            assert_eq!(sorted, vec![0, 1, 2, 3, 4]);
            assert_eq!(node.apply(x.digits()[level]), y.digits()[level]);
        }
    }

    #[test]
    fn linear_examples() {
        let x = DigitVector::from_digits(3, vec![2, 1]).unwrap();
        let l = LinearScramble::new(3, vec![vec![2], vec![1, 1]], vec![1, 2]).unwrap();
        assert_eq!(linear_scramble_digits(&x, &l).unwrap().digits(), &[2, 2]);

        let x = digits_of(200, 7, 5).unwrap();
        assert_eq!(linear_scramble_digits(&x, &LinearScramble::identity(7, 5)).unwrap(), x);

        let shift = vec![3, 6, 0, 1, 5];
        let rows = LinearScramble::identity(7, 5).rows;
        let l = LinearScramble::new(7, rows, shift.clone()).unwrap();
        let y = linear_scramble_digits(&x, &l).unwrap();
        for ((&out, &a), &e) in y.digits().iter().zip(x.digits()).zip(&shift) {
            assert_eq!(out, (a + e) % 7);
        }
    }

    #[test]
    fn linear_validation() {
        assert!(LinearScramble::new(3, vec![vec![0]], vec![0]).is_err());
        assert!(LinearScramble::new(3, vec![vec![1], vec![3, 1]], vec![0, 0]).is_err());
        assert!(LinearScramble::new(3, vec![vec![1]], vec![0, 0]).is_err());
        let short = LinearScramble::identity(3, 2);
        assert!(linear_scramble_digits(&digits_of(5, 3, 3).unwrap(), &short).is_err());
    }

    #[test]
    fn drawn_linear_scrambles_are_well_formed() {
        for r in 0..50 {
            let l = LinearScramble::draw(&spec(ScrambleKind::LinearDigitalShift, 1, r), 2, 3, 8);
            assert!((1..=8).all(|s| (1..=2).contains(&l.entry(s, s))));
            assert!(l.shift().iter().all(|&e| e < 3));
            // prefix consistency across depths
            let shallow = LinearScramble::draw(&spec(ScrambleKind::LinearDigitalShift, 1, r), 2, 3, 3);
            assert_eq!(&l.rows[..3], shallow.rows.as_slice());
        }
    }

    /// Every length-`s` prefix maps to a distinct prefix.
    fn assert_prefix_bijection(kind: ScrambleKind, base: u64, s: usize) {
        for r in 0..5 {
            let sp = spec(kind, 17, r);
            let scr = CoordinateScrambler::new(&sp, 1, base, s);
            let total = pow_saturating(base, s) as u64;
            let images: BTreeSet<Vec<u64>> =
                (0..total).map(|i| scr.apply(&digits_of(i, base, s).unwrap()).unwrap().digits().to_vec()).collect();
            assert_eq!(images.len() as u64, total);
        }
    }

    #[test]
    fn scrambles_are_bijective_on_prefixes() {
        for kind in [ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
            assert_prefix_bijection(kind, 2, 6);
            assert_prefix_bijection(kind, 3, 4);
            assert_prefix_bijection(kind, 5, 3);
        }
    }

    #[test]
    fn randomize_keeps_rows_and_unit_interval() {
        let basis = first_primes(4).unwrap();
        let pts = PointSet::halton(&basis, 100, 50).unwrap();
        for kind in [ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
            let out = randomize(&pts, &spec(kind, 3, 1)).unwrap();
            assert_eq!(out.len(), 50);
            assert_eq!(out.start(), 100);
            assert!(out.rows().all(|(_, x)| x.iter().all(|v| (0.0..1.0).contains(v))));
            assert_eq!(out, randomize(&pts, &spec(kind, 3, 1)).unwrap());
        }
    }

    #[test]
    fn randomize_respects_depth_overrides() {
        let basis = first_primes(2).unwrap();
        let pts = PointSet::halton(&basis, 0, 3).unwrap();
        let mut s = spec(ScrambleKind::LinearDigitalShift, 1, 0);
        s.precision = Some(vec![70, 45]);
        let out = randomize(&pts, &s).unwrap();
        assert_eq!(out.point_digits(0)[0].precision(), 70);
        s.precision = Some(vec![3, 45]);
        assert!(randomize(&pts, &s).is_err());
    }

    #[test]
    fn stratum_occupancy_survives_scrambling() {
        let basis = first_primes(2).unwrap();
        let pts = PointSet::halton(&basis, 0, 6).unwrap();
        for kind in [ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
            for r in 0..200 {
                let counts = randomize(&pts, &spec(kind, 8, r)).unwrap().stratum_counts(&[1, 1]).unwrap();
                assert_eq!(counts.len(), 6);
                assert!(counts.values().all(|&c| c == 1));
            }
        }
    }
}
