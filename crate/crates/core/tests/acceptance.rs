//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Runs the full 9 x 2 grid at length 50 twice plus nine extra `rwm` vs `base`
//! replications, so expect a few minutes in an optimised build.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use labs_topsis::bench::{read_trace, run_experiment, ExperimentConfig, ExperimentReport};
use labs_topsis::engine::{bit_flip_mutation, run, GaParams, MutationMode};
use labs_topsis::labs::{energy, energy_after_flip, exhaustive_optimum, BitGenome, CorrelationTable};
use labs_topsis::operators::{
    distinct_subset_size, follow_best, follow_best_distinct, gene_std_devs, repel_worst_gravity,
    repel_worst_gravity_multistep, softmax, weighted_sample_without_replacement, EliteSet, Mode,
    OperatorPipeline, Variant, WorstSet,
};
use labs_topsis::stats::{exact_p_value, normal_p_value, wilcoxon_rank_sum, EXACT_MAX_TOTAL, SIGNIFICANCE_LEVEL};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const REFERENCE_BASE_MEAN: f64 = 454.44;
const BASE_MEAN_TOLERANCE: f64 = 0.20;
const META_REPLICATIONS: u64 = 10;
const META_REQUIRED: usize = 7;
const BEST_FOUND_CEILING: u64 = 360;
const RWM_FAMILY: [Variant; 3] = [Variant::Rwm, Variant::FbRwm, Variant::FbdRwm];

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for length in 3..=12 {
        let (optimum, _) = exhaustive_optimum(length).map_err(|e| e.to_string())?;
        for (i, variant) in [Variant::Base, Variant::Rwm, Variant::FbdRw].into_iter().enumerate() {
            let pipeline = OperatorPipeline::for_variant(variant, Mode::Rate05, 5).map_err(|e| e.to_string())?;
            let params = GaParams {
                seed: length as u64 * 10 + i as u64,
                ..GaParams::default()
            };
            let trace = run(&params, &pipeline, length).map_err(|e| e.to_string())?;
            if trace.best.energy < optimum {
                failures.push(format!("L={length} {}: {} < {}", variant.id(), trace.best.energy.0, optimum.0));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut flip_errors = 0;
    for _ in 0..1000 {
        let g = BitGenome::random(50, &mut rng).map_err(|e| e.to_string())?;
        let pos = rng.random_range(0..50);
        let (e, table) = energy_after_flip(&g, pos, &CorrelationTable::new(&g)).map_err(|e| e.to_string())?;
        let mut flipped = g.clone();
        flipped.flip(pos);
        if e != energy(&flipped) || table != CorrelationTable::new(&flipped) {
            flip_errors += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        failures.is_empty() && flip_errors == 0 && secs < 60.0,
        format!(
            "GA below optimum: {failures:?}; flip mismatches {flip_errors}/1000; {secs:.1}s"
        ),
    )
}

fn operator_limit_cases() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut problems = Vec::new();
    let rand_genome = |rng: &mut ChaCha8Rng| BitGenome::random(50, rng).unwrap();
    for _ in 0..200 {
        let x = rand_genome(&mut rng);
        let members: Vec<BitGenome> = (0..5).map(|_| rand_genome(&mut rng)).collect();
        let elites = EliteSet::new(members.clone());
        let worst = WorstSet::new(members.clone());
        let mode = MutationMode::PerGeneRate;

        let y = follow_best(&x, &elites, 1.0, mode, &mut rng).unwrap();
        if !members.contains(&y) {
            problems.push("follow_best at rate 1 is not a teacher");
        }
        let y = repel_worst_gravity(&x, &worst, 1.0, mode, &mut rng).unwrap();
        if !members.iter().any(|m| m.complement() == y) {
            problems.push("repel_worst_gravity at rate 1 is not a complement");
        }
        let identities = [
            follow_best(&x, &elites, 0.0, mode, &mut rng).unwrap(),
            follow_best_distinct(&x, &elites, 0.0, mode, &mut rng).unwrap(),
            repel_worst_gravity(&x, &worst, 0.0, mode, &mut rng).unwrap(),
            repel_worst_gravity_multistep(&x, &worst, 0.0, mode, &mut rng).unwrap(),
        ];
        if identities.iter().any(|y| *y != x) {
            problems.push("an operator at rate 0 changed its input");
        }
        let pi = softmax(&gene_std_devs(&elites).unwrap());
        if (pi.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            problems.push("softmax weights do not sum to 1");
        }
        for rate in [0.02f64, 0.1, 0.25, 0.5, 0.77, 1.0] {
            let want = (50.0 * rate).round() as usize;
            let mut picked = weighted_sample_without_replacement(&pi, distinct_subset_size(50, rate), &mut rng);
            picked.sort_unstable();
            picked.dedup();
            if picked.len() != want {
                problems.push("wrong number of distinct positions");
            }
        }
    }
    // Identical elites leave the weights uniform and every rewritten position
    // visible against their complement.
    let base = BitGenome::random(50, &mut rng).unwrap();
    let same = EliteSet::new(vec![base.clone(); 5]);
    for rate in [0.1f64, 0.25, 0.5, 1.0] {
        let y = follow_best_distinct(&base.complement(), &same, rate, MutationMode::PerGeneRate, &mut rng).unwrap();
        if y.hamming(&base.complement()) != (50.0 * rate).round() as usize {
            problems.push("follow_best_distinct rewrote the wrong number of positions");
        }
    }
    problems.dedup();
    check(problems.is_empty(), format!("violations: {problems:?}"))
}

fn distributional_checks() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let x = BitGenome::zeros(50).unwrap();
    let params = GaParams::default();
    let trials = 10_000;
    let flips: usize = (0..trials).map(|_| bit_flip_mutation(&x, &params, &mut rng).hamming(&x)).sum();
    let mean = flips as f64 / trials as f64;
    let sigma = (50.0f64 * 0.25 / trials as f64).sqrt();
    let flips_ok = (mean - 25.0).abs() <= 3.0 * sigma;

    let elites = EliteSet::new(
        (0..5)
            .map(|_| BitGenome::random(50, &mut rng).unwrap())
            .collect(),
    );
    let pi = softmax(&gene_std_devs(&elites).unwrap());
    let draws = 100_000;
    let mut counts = vec![0usize; pi.len()];
    for _ in 0..draws {
        counts[weighted_sample_without_replacement(&pi, 1, &mut rng)[0]] += 1;
    }
    let stat: f64 = counts
        .iter()
        .zip(&pi)
        .map(|(&c, &p)| (c as f64 - p * draws as f64).powi(2) / (p * draws as f64))
        .sum();
    let p_chi = ChiSquared::new((pi.len() - 1) as f64).unwrap().sf(stat);
    let secs = start.elapsed().as_secs_f64();
    check(
        flips_ok && p_chi >= 0.01 && secs < 60.0,
        format!("mean flips {mean:.3} (3 sigma = {:.3}); chi-square p {p_chi:.3}; {secs:.1}s", 3.0 * sigma),
    )
}

fn wilcoxon_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut worst = (0.0f64, 0, 0);
    let mut failing_pairs = 0;
    let mut pairs = 0;
    for na in 1..EXACT_MAX_TOTAL {
        for nb in 1..=(EXACT_MAX_TOTAL - na) {
            pairs += 1;
            let mut pair_max = 0.0f64;
            for _ in 0..100 {
                let a: Vec<f64> = (0..na).map(|_| rng.random_range(0..30) as f64).collect();
                let b: Vec<f64> = (0..nb).map(|_| rng.random_range(0..30) as f64).collect();
                let gap = (normal_p_value(&a, &b).unwrap() - exact_p_value(&a, &b).unwrap()).abs();
                pair_max = pair_max.max(gap);
            }
            if pair_max > 0.02 {
                failing_pairs += 1;
            }
            if pair_max > worst.0 {
                worst = (pair_max, na, nb);
            }
        }
    }
    let mut min_identical = 1.0f64;
    for n in [1usize, 3, 8, 20, 50] {
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0..30) as f64).collect();
        min_identical = min_identical.min(wilcoxon_rank_sum(&a, &a).unwrap().p_value);
    }
    check(
        failing_pairs == 0 && min_identical >= 0.99,
        format!(
            "{failing_pairs}/{pairs} size pairs exceed 0.02 (worst {:.3} at {}+{}); identical-sample p >= {min_identical:.3}",
            worst.0, worst.1, worst.2
        ),
    )
}

struct GridRuns {
    first: ExperimentReport,
    first_dir: PathBuf,
    second_dir: PathBuf,
    second: ExperimentReport,
    grid_secs: f64,
}

fn grid(out: &Path, jobs: usize) -> labs_topsis::Result<(ExperimentReport, f64)> {
    let start = Instant::now();
    let report = run_experiment(&ExperimentConfig {
        out: out.to_path_buf(),
        jobs,
        ..ExperimentConfig::default()
    })?;
    Ok((report, start.elapsed().as_secs_f64()))
}

fn reproduction(runs: &GridRuns) -> Outcome {
    let r = &runs.first;
    let base = r.summary_for(Variant::Base, Mode::Rate05).ok_or("no base cell")?.mean;
    let rel = (base - REFERENCE_BASE_MEAN).abs() / REFERENCE_BASE_MEAN;
    let a = rel <= BASE_MEAN_TOLERANCE;

    let means: Vec<f64> = RWM_FAMILY
        .iter()
        .map(|&v| r.summary_for(v, Mode::Rate05).map(|s| s.mean).unwrap_or(f64::INFINITY))
        .collect();
    let b = means.iter().all(|&m| m < base);

    let mut significant = 0;
    let mut p_values = Vec::new();
    for seed in 1..=META_REPLICATIONS {
        let report = if seed == ExperimentConfig::default().seed {
            r.clone()
        } else {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            run_experiment(&ExperimentConfig {
                variants: vec![Variant::Rwm],
                modes: vec![Mode::Rate05],
                seed,
                out: dir.path().to_path_buf(),
                ..ExperimentConfig::default()
            })
            .map_err(|e| e.to_string())?
        };
        let p = report.significance_for(Variant::Rwm, Mode::Rate05).ok_or("no rwm row")?.p_value;
        if p < SIGNIFICANCE_LEVEL {
            significant += 1;
        }
        p_values.push(format!("{p:.1e}"));
    }
    let c = significant >= META_REQUIRED;

    let best = RWM_FAMILY
        .iter()
        .filter_map(|&v| r.best_for(v, Mode::Rate05).map(|b| b.energy))
        .min()
        .unwrap_or(u64::MAX);
    let d = best <= BEST_FOUND_CEILING;

    check(
        a && b && c && d,
        format!(
            "(a) base mean {base:.2} ({:+.1}% vs {REFERENCE_BASE_MEAN}) {}; (b) rwm/fb+rwm/fbd+rwm means {:.2}/{:.2}/{:.2} {}; \
             (c) rwm significant in {significant}/{META_REPLICATIONS} [{}] {}; (d) best {best} {}; grid {:.0}s",
            (base - REFERENCE_BASE_MEAN) / REFERENCE_BASE_MEAN * 100.0,
            verdict(a),
            means[0],
            means[1],
            means[2],
            verdict(b),
            p_values.join(" "),
            verdict(c),
            verdict(d),
            runs.grid_secs
        ),
    )
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAIL"
    }
}

fn files_under(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let bytes = fs::read(&p).unwrap();
                out.push((p.strip_prefix(dir).unwrap().to_path_buf(), bytes));
            }
        }
    }
    out.sort();
    out
}

fn determinism(runs: &GridRuns) -> Outcome {
    let a = files_under(&runs.first_dir);
    let b = files_under(&runs.second_dir);
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count();
    check(
        a.len() == b.len() && differing == 0 && runs.first == runs.second,
        format!("{} vs {} files, {differing} differ (jobs 1 vs 2)", a.len(), b.len()),
    )
}

fn monotonicity(runs: &GridRuns) -> Outcome {
    let mut scanned = 0;
    let mut bad = Vec::new();
    for dir in [&runs.first_dir, &runs.second_dir] {
        for entry in fs::read_dir(dir.join("traces")).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            let trace = read_trace(&path).map_err(|e| e.to_string())?;
            scanned += 1;
            if trace.best_energies.windows(2).any(|w| w[1] > w[0]) {
                bad.push(path.display().to_string());
            }
        }
    }
    check(
        scanned > 0 && bad.is_empty(),
        format!("{scanned} traces scanned, {} increase: {bad:?}", bad.len()),
    )
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut report = |id: &str, name: &str, outcome: Outcome| {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                all_ok = false;
                ("FAIL", d)
            }
        };
        println!("{tag} [{id}] {name}: {detail}");
    };

    report("1", "oracle equivalence", oracle_equivalence());
    report("2", "operator limit cases", operator_limit_cases());
    report("3", "distributional checks", distributional_checks());
    report("4", "rank-sum correctness", wilcoxon_correctness());

    let dir = tempfile::tempdir().expect("temporary directory");
    let grids = grid(&dir.path().join("jobs1"), 1).and_then(|(first, grid_secs)| {
        let (second, _) = grid(&dir.path().join("jobs2"), 2)?;
        Ok(GridRuns {
            first,
            first_dir: dir.path().join("jobs1"),
            second_dir: dir.path().join("jobs2"),
            second,
            grid_secs,
        })
    });
    match grids {
        Ok(runs) => {
            report("5", "full-scale reproduction", reproduction(&runs));
            report("6", "determinism", determinism(&runs));
            report("7", "elitism monotonicity", monotonicity(&runs));
        }
        Err(e) => {
            for (id, name) in [("5", "full-scale reproduction"), ("6", "determinism"), ("7", "elitism monotonicity")] {
                report(id, name, Err(format!("grid failed: {e}")));
            }
        }
    }

    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
