//! Acceptance gate. Each criterion prints one `PASS`/`FAIL` line on stderr (uncaptured) and then
//! asserts its verdict.

use std::io::Write;
use std::path::Path;
use std::process::Command;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sperner_core::antichain::{max_antichain_bruteforce, max_antichain_exact};
use sperner_core::bounds::{chernoff_dominates, union_bound_report};
use sperner_core::container::ContainerParams;
use sperner_core::enumeration::{census, census_dfs, census_independent};
use sperner_core::kleitman::{
    corollary_density_bound, verify_kleitman_exhaustive, DensityBoundParams,
};
use sperner_core::lattice::{induced_edges, middle_binomial};
use sperner_core::sampling::{inversions, median_ratios, ExperimentPoint};
use sperner_core::VertexSet;
use sperner_lab::drivers::{container_batch, kleitman_rows, run_experiment, Jobs, KleitmanMode};
use sperner_lab::io::format_vertex_set;

const BIN: &str = env!("CARGO_BIN_EXE_sperner");

// Pinned tolerances.
const SPERNER_MAX_N: u32 = 13;
const KLEITMAN_RANDOM_SAMPLES: u64 = 100_000;
const COROLLARY_TRIALS: usize = 200;
const CONTAINER_BATCH: u64 = 500;
const CONTAINER_BATCH_T2: u64 = 100;
const ORACLE_INSTANCES: usize = 500;
const ORACLE_MAX_SIZE: usize = 22;
const TREND_C: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];
const TREND_TRIALS: u64 = 30;
const TREND_SEED: u64 = 20_240_601;
const TREND_MAX_INVERSIONS: usize = 1;
const TREND_MIN_DROP: f64 = 0.15;
const CENSUS_TOTALS: [u64; 7] = [2, 3, 6, 20, 168, 7581, 7_828_354];

fn verdict(id: u32, name: &str, passed: bool, detail: &str) {
    let line = format!(
        "criterion {id} [{}] {name}: {detail}\n",
        if passed { "PASS" } else { "FAIL" }
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(passed, "criterion {id} failed: {detail}");
}

fn random_subset(rng: &mut ChaCha8Rng, n: u32, size: usize) -> VertexSet {
    let mut all: Vec<u32> = (0..1u32 << n).collect();
    let (chosen, _) = all.partial_shuffle(rng, size);
    VertexSet::from_ids(n, chosen.iter().copied()).unwrap()
}

fn write_file(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn criterion_1_sperner_exactness() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = Vec::new();
    for n in 1..=SPERNER_MAX_N {
        let full = VertexSet::full(n).unwrap();
        let input = write_file(dir.path(), &format!("p{n}.txt"), &format_vertex_set(&full));
        let out = Command::new(BIN)
            .args(["maxantichain", "--certificate", "--input"])
            .arg(&input)
            .output()
            .unwrap();
        let stdout = String::from_utf8_lossy(&out.stdout);
        let alpha: Option<u64> = stdout
            .lines()
            .nth(1)
            .and_then(|row| row.split(',').next())
            .and_then(|a| a.parse().ok());
        let w = max_antichain_exact(&full).unwrap();
        let ok = out.status.code() == Some(0)
            && alpha == Some(middle_binomial(n))
            && w.alpha == middle_binomial(n)
            && w.verify(&full);
        if !ok {
            bad.push(n);
        }
    }
    verdict(
        1,
        "Sperner exactness",
        bad.is_empty(),
        &format!("alpha(P(n)) = C(n, n/2) with certificate for n=1..={SPERNER_MAX_N}; failing n: {bad:?}"),
    );
}

#[test]
fn criterion_2_kleitman_oracle() {
    let mut failures = Vec::new();
    for n in 2..=4u32 {
        for r in 0..=1u64 << n {
            if !verify_kleitman_exhaustive(n, r).unwrap() {
                failures.push(format!("exhaustive n={n} r={r}"));
            }
        }
    }
    let rs: Vec<u64> = (0..=32).collect();
    let rows = kleitman_rows(
        5,
        &rs,
        KleitmanMode::Randomized {
            samples: KLEITMAN_RANDOM_SAMPLES,
            seed: 5,
        },
    )
    .unwrap();
    failures.extend(rows.iter().filter(|r| !r.verified).map(|r| format!("random n=5 r={}", r.r)));
    verdict(
        2,
        "Kleitman oracle",
        failures.is_empty(),
        &format!(
            "exhaustive n=2..=4 all r, {KLEITMAN_RANDOM_SAMPLES} random subsets per r at n=5; counterexamples: {failures:?}"
        ),
    );
}

#[test]
fn criterion_3_density_corollary() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = Vec::new();
    let mut checked = 0;
    for (n, t, eps) in [(8u32, 1u32, 0.25), (10, 1, 0.2), (8, 2, 0.05)] {
        let params = DensityBoundParams::new(n, t, eps).unwrap();
        let lo = params.min_size().ceil() as usize;
        let hi = 1usize << n;
        for _ in 0..COROLLARY_TRIALS {
            let size = rng.random_range(lo..=hi);
            let u = random_subset(&mut rng, n, size);
            let bound = corollary_density_bound(&params, size as u64).unwrap();
            let edges = induced_edges(&u);
            checked += 1;
            if edges as f64 <= bound {
                violations.push(format!("n={n} t={t} eps={eps} |U|={size}: {edges} <= {bound}"));
            }
        }
    }
    verdict(
        3,
        "density corollary",
        violations.is_empty(),
        &format!("{checked} random U, e(G[U]) > eps n^t |U| / (2t)^(t+1); violations: {violations:?}"),
    );
}

#[test]
fn criterion_4_container_lemma() {
    let mut details = Vec::new();
    let mut all_passed = true;
    let runs = [
        (ContainerParams::new(12, 1, 0.2).unwrap(), CONTAINER_BATCH),
        (ContainerParams::new(14, 1, 0.2).unwrap(), CONTAINER_BATCH),
        (ContainerParams::new(16, 1, 0.2).unwrap(), CONTAINER_BATCH),
        (ContainerParams::relaxed(14, 2, 0.03).unwrap(), CONTAINER_BATCH_T2),
    ];
    for (params, count) in runs {
        let batch = container_batch(&params, count, 4).unwrap();
        let mut bullet_failures: std::collections::BTreeMap<&str, usize> = Default::default();
        let mut not_idempotent = 0;
        let mut errors = 0;
        for item in &batch.items {
            match &item.report {
                Ok(r) => {
                    for f in r.failures() {
                        *bullet_failures.entry(f).or_default() += 1;
                    }
                }
                Err(_) => errors += 1,
            }
            if item.idempotent != Some(true) {
                not_idempotent += 1;
            }
        }
        let passed = batch.passed();
        all_passed &= passed as u64 == count;
        let f_range = batch
            .sizes
            .map(|s| (s.f_s1.min, s.f_s1.max))
            .unwrap_or_default();
        details.push(format!(
            "n={} t={} eps={}: {passed}/{count} pass, bullet failures {bullet_failures:?}, \
             not idempotent {not_idempotent}, errors {errors}, |f(S1)| in {f_range:?} vs (t+1+eps)m = {}",
            params.n(),
            params.t(),
            params.eps(),
            (f64::from(params.t()) + 1.0 + params.eps()) * middle_binomial(params.n()) as f64
        ));
    }
    verdict(4, "container lemma suite", all_passed, &details.join("; "));
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut mismatches = Vec::new();
    for i in 0..ORACLE_INSTANCES {
        let n = [5u32, 6, 8][i % 3];
        let size = rng.random_range(0..=ORACLE_MAX_SIZE);
        let s = random_subset(&mut rng, n, size);
        let exact = max_antichain_exact(&s).unwrap();
        let brute = max_antichain_bruteforce(&s).unwrap();
        if exact.alpha != brute || !exact.verify(&s) {
            mismatches.push(format!("n={n} {:?}: {} vs {brute}", s.ids(), exact.alpha));
        }
    }
    verdict(
        5,
        "exact vs brute force",
        mismatches.is_empty(),
        &format!("{ORACLE_INSTANCES} random sets with |s| <= {ORACLE_MAX_SIZE} over n in {{5,6,8}}; mismatches: {mismatches:?}"),
    );
}

#[test]
fn criterion_6_threshold_trend() {
    let points: Vec<ExperimentPoint> = TREND_C
        .iter()
        .map(|&c| ExperimentPoint::threshold(16, c).unwrap())
        .collect();
    let outcome = Jobs::Max
        .install(|| run_experiment(&points, TREND_TRIALS, TREND_SEED, false))
        .unwrap()
        .unwrap();
    let medians = median_ratios(&outcome.rows);
    let values: Vec<f64> = medians.iter().map(|&(_, m)| m).collect();
    let inv = inversions(&values);
    let drop = values.first().copied().unwrap_or(0.0) - values.last().copied().unwrap_or(0.0);
    let complete = outcome.skipped.is_empty() && values.len() == TREND_C.len();
    let reference: Vec<String> = TREND_C
        .iter()
        .map(|c| format!("{c}:{:.3}", 1.0 + (-c / 2.0f64).exp()))
        .collect();
    verdict(
        6,
        "threshold trend",
        complete && inv <= TREND_MAX_INVERSIONS && drop >= TREND_MIN_DROP,
        &format!(
            "n=16, {TREND_TRIALS} trials, medians {medians:?}, inversions {inv} (<= {TREND_MAX_INVERSIONS}), \
             drop {drop:.4} (>= {TREND_MIN_DROP}); 1+e^(-c/2) reference {reference:?}; skipped {:?}",
            outcome.skipped
        ),
    );
}

#[test]
fn criterion_7_bound_arithmetic() {
    let mut problems = Vec::new();
    let mut summary = Vec::new();
    for (t, eps, k) in [(1u32, 0.1, 16u32), (1, 0.05, 22), (2, 0.1, 16)] {
        let r = union_bound_report(k, t, eps).unwrap();
        summary.push(format!(
            "(t={t}, eps={eps}, n=10^{k}) margins [{:.2}, {:.2}, {:.2}] ln|log Pi| {:.4e} sign {}",
            r.margins.count,
            r.margins.first_selection,
            r.margins.second_selection,
            r.total_log_pi.ln_abs,
            r.total_log_pi.sign
        ));
        if !(r.total_negative && r.margins.all_negative()) {
            problems.push(format!("t={t} eps={eps} k={k}"));
        }
    }
    for eps in [0.05, 0.1, 0.25, 0.5, 1.0] {
        for pmt in [1e2, 1e4, 1e6] {
            if !chernoff_dominates(eps, pmt).unwrap() {
                problems.push(format!("Chernoff eps={eps} pmt={pmt}"));
            }
        }
    }
    verdict(
        7,
        "bound arithmetic",
        problems.is_empty(),
        &format!("{}; Chernoff grid 15 points; problems: {problems:?}", summary.join("; ")),
    );
}

#[test]
fn criterion_8_census() {
    let mut problems = Vec::new();
    let mut totals = Vec::new();
    for n in 0..=6u32 {
        let a = census_dfs(n).unwrap();
        let b = census_independent(n).unwrap();
        if a != b {
            problems.push(format!("n={n}: enumerators disagree"));
        }
        let (ta, tb): (u64, u64) = (a.iter().sum(), b.iter().sum());
        totals.push(ta);
        if ta != CENSUS_TOTALS[n as usize] || tb != CENSUS_TOTALS[n as usize] {
            problems.push(format!("n={n}: totals {ta}/{tb}"));
        }
        let c = census(n).unwrap();
        if n >= 2 {
            let v = 1u64 << n;
            let e = induced_edges(&VertexSet::full(n).unwrap());
            if c.counts[2] != v * (v - 1) / 2 - e {
                problems.push(format!("n={n}: counts[2]={} vs C(2^n,2)-e={}", c.counts[2], v * (v - 1) / 2 - e));
            }
        }
    }
    verdict(
        8,
        "antichain census",
        problems.is_empty(),
        &format!("totals n=0..=6 {totals:?}; problems: {problems:?}"),
    );
}

fn run_bin(args: &[&str]) -> (Option<i32>, Vec<u8>) {
    let out = Command::new(BIN).args(args).output().unwrap();
    (out.status.code(), out.stdout)
}

#[test]
fn criterion_9_determinism() {
    let mut problems = Vec::new();

    let points: Vec<ExperimentPoint> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&c| ExperimentPoint::threshold(12, c).unwrap())
        .collect();
    let runs: Vec<_> = [Jobs::Count(1), Jobs::Max, Jobs::Count(4)]
        .into_iter()
        .map(|j| j.install(|| run_experiment(&points, 10, 77, false)).unwrap().unwrap())
        .collect();
    if runs.windows(2).any(|w| w[0] != w[1]) {
        problems.push("library rows differ across pool sizes".to_owned());
    }

    let dir = tempfile::tempdir().unwrap();
    let commands: [&[&str]; 3] = [
        &["experiment", "threshold", "--n", "12", "--c-list", "0.5,1,2,4", "--trials", "8", "--seed", "9"],
        &["experiment", "window", "--n", "12", "--t", "2", "--p", "0.05", "--trials", "8", "--seed", "9"],
        &["kleitman", "--n", "6", "--all-r", "--samples", "200", "--seed", "9"],
    ];
    for (i, cmd) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for jobs in ["1", "max", "4"] {
            let file = dir.path().join(format!("run{i}-{jobs}.csv"));
            let file_arg = file.to_str().unwrap().to_owned();
            let mut args: Vec<&str> = cmd.to_vec();
            args.extend(["--jobs", jobs, "--out", &file_arg]);
            let (code, _) = run_bin(&args);
            if code != Some(0) {
                problems.push(format!("{cmd:?} --jobs {jobs}: exit {code:?}"));
            }
            outputs.push(std::fs::read(&file).unwrap_or_default());
            let mut stdout_args: Vec<&str> = cmd.to_vec();
            stdout_args.extend(["--jobs", jobs]);
            outputs.push(run_bin(&stdout_args).1);
        }
        if outputs.iter().any(|o| o.is_empty() || *o != outputs[0]) {
            problems.push(format!("{cmd:?}: outputs differ across --jobs"));
        }
    }
    verdict(
        9,
        "determinism",
        problems.is_empty(),
        &format!("library pools 1/max/4 and binary --jobs 1/max/4 on 3 commands; problems: {problems:?}"),
    );
}
