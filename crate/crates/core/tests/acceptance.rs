//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the verdict lines always reach stdout.
//! The process exits nonzero if any criterion fails, except criteria listed in
//! `KNOWN_RED` (which must still fail, so the list cannot go stale).

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use scrambled_halton::cli::dispatch;
use scrambled_halton::gains::{
    gain_bruteforce, gain_exact, lower_bound_n_star, upper_bound_u_exact, CoordSubset, GainQuery,
};
use scrambled_halton::halton::{strata_total, PointSet};
use scrambled_halton::primes::{first_primes, PrimeBasis};
use scrambled_halton::rqmc::{rqmc_estimate, HaarIntegrand};
use scrambled_halton::scramble::{randomize, ScrambleKind, ScrambleSpec};
use scrambled_halton::Rational;
use serde_json::Value;

/// Criteria whose stated form is mathematically unattainable; see the README.
const KNOWN_RED: &[u32] = &[6];

type Verdict = Result<String, String>;

fn r(a: i128, b: i128) -> Rational {
    Rational::new(a, b).unwrap()
}

fn cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dispatch(std::iter::once("halton-gain").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    if elapsed.as_secs_f64() < limit_s {
        Ok(())
    } else {
        Err(format!("took {:.2} s, limit {limit_s} s", elapsed.as_secs_f64()))
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_values() -> Verdict {
    let t = Instant::now();
    let (code, out) = cli(&["gain", "--u", "1,2", "--k", "0,0", "--n", "2"]);
    check(code == 0 && out.trim() == "3/2 (1.5)", || format!("gain (1,2) printed {out:?}"))?;
    let (code, out) = cli(&["gain", "--u", "1,2,3", "--k", "0,0,0", "--n", "2"]);
    check(code == 0 && out.starts_with("7/8 "), || format!("gain (1,2,3) printed {out:?}"))?;
    let basis = first_primes(2).unwrap();
    for k in [[0, 0], [0, 1], [1, 0], [1, 1]] {
        let g = gain_exact(&GainQuery::new(&basis, &[1, 2], &k, 36).unwrap()).unwrap();
        check(g == Rational::ZERO, || format!("k = {k:?} gives {g} at n = 36"))?;
    }
    within(t.elapsed(), 1.0)?;
    Ok("3/2, 7/8 and four zero curves at n = 36".into())
}

fn oracle_equivalence() -> Verdict {
    let t = Instant::now();
    let basis = first_primes(3).unwrap();
    let mut checked = 0;
    for u in CoordSubset::nonempty_of(3) {
        let idx: Vec<usize> = u.indices().collect();
        for mask in 0..(1u32 << idx.len()) {
            let k: Vec<u32> = (0..idx.len()).map(|c| (mask >> c) & 1).collect();
            for n in 1..=90 {
                let q = GainQuery::new(&basis, &idx, &k, n).unwrap();
                let (a, b) = (gain_exact(&q).unwrap(), gain_bruteforce(&q).unwrap());
                check(a == b, || format!("u = {u}, k = {k:?}, n = {n}: {a} vs {b}"))?;
                checked += 1;
            }
        }
    }
    within(t.elapsed(), 30.0)?;
    Ok(format!("{checked} queries, zero mismatches"))
}

/// Random `(u, k, n)` with `d <= 4`, `k_j <= 2`, `n <= 5000`.
fn random_queries(basis: &PrimeBasis, count: usize) -> Vec<GainQuery> {
    let mut rng = StdRng::seed_from_u64(20_240_917);
    (0..count)
        .map(|_| {
            let u = CoordSubset::from_mask(rng.gen_range(1u64..16));
            let idx: Vec<usize> = u.indices().collect();
            let k: Vec<u32> = idx.iter().map(|_| rng.gen_range(0..=2)).collect();
            let n = rng.gen_range(1..=5000);
            GainQuery::new(basis, &idx, &k, n).unwrap()
        })
        .collect()
}

fn identity_suite(queries: &[GainQuery]) -> Verdict {
    let t = Instant::now();
    let g = |q: &GainQuery| gain_exact(q).unwrap();
    let mut checks = 0usize;
    for q in queries {
        let n = q.n();
        let value = g(q);
        let tag = || format!("u = {}, k = {:?}, n = {n}", q.u(), q.levels());
        // below m_under the gain is 1
        if (n as u128) < q.m_under() {
            check(value == Rational::ONE, || format!("below m_under: {} at {}", value, tag()))?;
            checks += 1;
        }
        // multiples of m_over give 0
        let m_over = q.m_over() as u64;
        for mult in 1..=3 {
            let z = g(&q.at(mult * m_over).unwrap());
            check(z == Rational::ZERO, || format!("{} at {mult} m_over for {}", z, tag()))?;
            checks += 1;
        }
        // G(q m_over + r) = (r / n) G(r)
        for n2 in [n, n + m_over, n + 7 * m_over] {
            let rem = n2 % m_over;
            let lhs = g(&q.at(n2).unwrap());
            let rhs = if rem == 0 {
                Rational::ZERO
            } else {
                r(rem as i128, n2 as i128).checked_mul(g(&q.at(rem).unwrap())).unwrap()
            };
            check(lhs == rhs, || format!("periodic damping fails at n = {n2} for {}", tag()))?;
            checks += 1;
        }
        // raising k_j and scaling n by b_j leaves the gain unchanged
        for j in q.u().indices() {
            let b = q.base_of(j).unwrap();
            let raised = q.raise_level(j).unwrap().at(n * b).unwrap();
            check(g(&raised) == value, || format!("raising level {j} changes the gain for {}", tag()))?;
            checks += 1;
        }
        // k = 0 at n equals k at n * prod b^k
        let scale = q.m_under() as u64;
        let zero = q.with_zero_levels();
        check(g(&q.at(n * scale).unwrap()) == g(&zero), || format!("level reduction fails for {}", tag()))?;
        checks += 1;
    }
    within(t.elapsed(), 60.0)?;
    Ok(format!("{} queries, {checks} identities, zero violations", queries.len()))
}

fn worst_case_search() -> Verdict {
    let t = Instant::now();
    let gamma = |d: &str| -> Value {
        let (code, out) = cli(&["gamma", "--d", d]);
        assert_eq!(code, 0, "gamma --d {d}");
        serde_json::from_str(&out).unwrap()
    };
    let g1 = gamma("1");
    check(g1["gamma"] == "1/1" && g1["argmax_n"] == 1, || format!("d = 1: {g1}"))?;
    let g2 = gamma("2");
    check(g2["gamma"] == "3/2" && g2["argmax_n"] == 2, || format!("d = 2: {g2}"))?;
    let g3 = gamma("3");
    let value: Rational = g3["gamma"].as_str().unwrap().parse().unwrap();
    check(value >= r(9, 5) && value <= r(15, 8), || format!("d = 3: {g3}"))?;
    within(t.elapsed(), 10.0)?;
    Ok(format!("Gamma_1 = 1, Gamma_2 = 3/2 at n = 2, Gamma_3 = {value} at n = {}", g3["argmax_n"]))
}

fn bound_consistency(queries: &[GainQuery], basis: &PrimeBasis) -> Verdict {
    for q in queries {
        let g = gain_exact(q).unwrap();
        let bound = upper_bound_u_exact(q.u(), basis).unwrap();
        check(g <= bound, || format!("u = {}, k = {:?}, n = {}: {g} > {bound}", q.u(), q.levels(), q.n()))?;
    }
    let mut witnesses = 0;
    for u in CoordSubset::nonempty_of(5) {
        for j_star in [1, 2].into_iter().filter(|&j| u.contains(j)) {
            let w = lower_bound_n_star(u, basis, j_star).unwrap();
            check(w.value == w.closed_form, || format!("u = {u}, j* = {j_star}: {} vs {}", w.value, w.closed_form))?;
            witnesses += 1;
        }
    }
    Ok(format!("{} upper-bound checks, {witnesses} exact lower-bound witnesses", queries.len()))
}

fn bounds_at_scale() -> Verdict {
    let t = Instant::now();
    let (code, out) = cli(&["bounds", "--d-max", "1000000"]);
    let elapsed = t.elapsed();
    check(code == 0, || format!("exit {code}"))?;
    let mut rows = Vec::with_capacity(1_000_000);
    for line in out.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        rows.push((v[0] as usize, v[1], v[2], v[3]));
    }
    check(rows.len() == 1_000_000, || format!("{} rows", rows.len()))?;
    within(elapsed, 60.0)?;
    let (_, lo2, hi2, _) = rows[1];
    check((lo2 - 1.5).abs() < 1e-12 && (hi2 - 1.5).abs() < 1e-12, || format!("d = 2: {lo2}, {hi2}"))?;
    let monotone = rows.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].2 >= w[0].2);
    check(monotone, || "bound columns are not nondecreasing".into())?;
    let above: Vec<&(usize, f64, f64, f64)> = rows[5..].iter().filter(|r| r.2 > r.3).collect();
    let worst = above.iter().map(|r| r.2 - r.3).fold(0.0, f64::max);
    check(above.is_empty(), || {
        format!(
            "runtime {:.1} s, d = 2 and monotonicity hold, but upper > 3/2 + ln(d/2) at {} of {} d in [6, 1e6] \
             (first d = {}, max excess {worst:.4})",
            elapsed.as_secs_f64(),
            above.len(),
            rows.len() - 5,
            above[0].0
        )
    })?;
    Ok(format!("{:.1} s, bounds below the guide", elapsed.as_secs_f64()))
}

fn variance_law() -> Verdict {
    let t = Instant::now();
    let basis = first_primes(2).unwrap();
    let f = HaarIntegrand::with_default_tables(&[1, 2], &[0, 0], &basis).unwrap();
    let mut notes = Vec::new();
    for kind in [ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
        let spec = ScrambleSpec::new(kind, 7);
        let at2 = rqmc_estimate(&f, &basis, 2, 100_000, &spec).unwrap();
        check((at2.empirical_gain - 1.5).abs() <= 0.05, || format!("{kind} n = 2: gain {}", at2.empirical_gain))?;
        let at6 = rqmc_estimate(&f, &basis, 6, 100_000, &spec).unwrap();
        check(at6.means.iter().all(|m| m.abs() <= 1e-12), || format!("{kind} n = 6: nonzero replicate mean"))?;
        let at1 = rqmc_estimate(&f, &basis, 1, 100_000, &spec).unwrap();
        check((at1.empirical_gain - 1.0).abs() <= 0.05, || format!("{kind} n = 1: gain {}", at1.empirical_gain))?;
        notes.push(format!("{kind}: {:.4} at n = 2, {:.4} at n = 1", at2.empirical_gain, at1.empirical_gain));
    }
    within(t.elapsed(), 120.0)?;
    Ok(notes.join("; "))
}

fn strata_balance() -> Verdict {
    let t = Instant::now();
    let basis = first_primes(3).unwrap();
    let mut rng = StdRng::seed_from_u64(8);
    let fine = [1, 2, 2];
    let coarse = [1, 1, 1];
    let window = strata_total(&basis, &fine).unwrap() as usize;
    check(window == 450, || format!("window {window}"))?;
    for trial in 0..20u64 {
        let start = rng.gen_range(0..1u64 << 40);
        let points = PointSet::halton(&basis, start, window).unwrap();
        for kind in [ScrambleKind::None, ScrambleKind::NestedUniform, ScrambleKind::LinearDigitalShift] {
            let set = randomize(&points, &ScrambleSpec::new(kind, trial)).unwrap();
            let counts = set.stratum_counts(&fine).unwrap();
            check(counts.len() == 450 && counts.values().all(|&c| c == 1), || {
                format!("{kind} start {start}: {} strata at k = (1,2,2)", counts.len())
            })?;
            let counts: BTreeMap<_, _> = set.stratum_counts(&coarse).unwrap();
            check(counts.len() == 30 && counts.values().all(|&c| c == 15), || {
                format!("{kind} start {start}: uneven at k = (1,1,1)")
            })?;
        }
    }
    within(t.elapsed(), 5.0)?;
    Ok("20 offsets x 3 scrambles: 450 strata once each at k = (1,2,2), 30 strata 15 times each at k = (1,1,1)".into())
}

fn main() {
    let basis = first_primes(5).unwrap();
    let queries = random_queries(&basis, 600);
    let criteria: Vec<(u32, Box<dyn Fn() -> Verdict>)> = vec![
        (1, Box::new(exact_values)),
        (2, Box::new(oracle_equivalence)),
        (3, Box::new(|| identity_suite(&queries))),
        (4, Box::new(worst_case_search)),
        (5, Box::new(|| bound_consistency(&queries, &basis))),
        (6, Box::new(bounds_at_scale)),
        (7, Box::new(variance_law)),
        (8, Box::new(strata_balance)),
    ];
    let mut unexpected = Vec::new();
    for (id, run) in &criteria {
        let t = Instant::now();
        let verdict = run();
        let secs = t.elapsed().as_secs_f64();
        let known = KNOWN_RED.contains(id);
        match &verdict {
            Ok(msg) => println!("criterion {id}: PASS ({secs:.2} s) {msg}"),
            Err(msg) => println!("criterion {id}: FAIL ({secs:.2} s) {msg}{}", if known { " [known red]" } else { "" }),
        }
        if verdict.is_ok() == known {
            unexpected.push(*id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected verdicts for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
