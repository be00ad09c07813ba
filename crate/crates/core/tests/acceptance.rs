//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p sequd-core --test acceptance`. The process exits
//! non-zero when any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sequd_core::augud::{construct_ud, run_augud, AugudConfig};
use sequd_core::design::{cd2, cd2_squared, Cd2Cache, LevelDesign, UnitDesign};
use sequd_core::harness::{run_experiment, ExperimentConfig, ExternalObjectiveSpec, Method, ObjectiveSpec};
use sequd_core::objective::Direction;
use sequd_core::sequd::{run_seqrand, run_sequd, snap_existing, SequdConfig, SubspaceGrid};
use sequd_core::space::SearchSpace;
use sequd_core::bench;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(n: usize, s: usize, r: &mut ChaCha8Rng) -> UnitDesign {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..s).map(|_| r.random()).collect()).collect();
    UnitDesign::from_rows(&rows, s).unwrap()
}

fn random_levels(n: usize, s: usize, q: usize, r: &mut ChaCha8Rng) -> LevelDesign {
    let rows: Vec<Vec<u32>> = (0..n)
        .map(|_| (0..s).map(|_| r.random_range(1..=q as u32)).collect())
        .collect();
    LevelDesign::from_rows(&rows, s, q).unwrap()
}

fn c1_discrepancy() -> Verdict {
    let start = Instant::now();
    let mut worst_closed: f64 = 0.0;
    for s in [1usize, 2, 3, 5] {
        let d = UnitDesign::from_rows(&[vec![0.5; s]], s).unwrap();
        let expected = ((13.0f64 / 12.0).powi(s as i32) - 1.0).sqrt();
        worst_closed = worst_closed.max((cd2(&d).unwrap() - expected).abs());
    }
    let mut r = rng(1);
    let design = random_levels(30, 5, 30, &mut r);
    let mut cache = Cd2Cache::new(&design.to_unit()).unwrap();
    let mut worst_delta: f64 = 0.0;
    for _ in 0..1000 {
        let col = r.random_range(0..5);
        let a = r.random_range(0..30);
        let mut b = r.random_range(0..29);
        if b >= a {
            b += 1;
        }
        let before = cache.squared();
        let delta = cache.exchange_delta(col, a, b).unwrap();
        cache.commit_exchange(col, a, b).unwrap();
        let full = cd2_squared(&cache.to_unit_design()).unwrap();
        worst_delta = worst_delta.max((before + delta - full).abs());
        worst_delta = worst_delta.max((cache.squared() - full).abs());
    }
    let elapsed = start.elapsed();
    verdict(
        worst_closed <= 1e-12 && worst_delta <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("closed-form err {worst_closed:.1e}, exchange err {worst_delta:.1e}, {elapsed:.2?}"),
    )
}

fn c2_invariance() -> Verdict {
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = r.random_range(1..=40);
        let s = r.random_range(1..=6);
        let d = random_unit(n, s, &mut r);
        let base = cd2(&d).unwrap();
        worst = worst.max((cd2(&d.reflect()).unwrap() - base).abs());
        let mut rows = d.to_rows();
        rows.shuffle(&mut r);
        let mut cols: Vec<usize> = (0..s).collect();
        cols.shuffle(&mut r);
        let permuted: Vec<Vec<f64>> = rows.iter().map(|row| cols.iter().map(|&c| row[c]).collect()).collect();
        let p = UnitDesign::from_rows(&permuted, s).unwrap();
        worst = worst.max((cd2(&p).unwrap() - base).abs());
    }
    verdict(worst <= 1e-12, format!("200 designs, max deviation {worst:.1e}"))
}

fn ud_100() -> Vec<(f64, Duration)> {
    (0..10)
        .map(|seed| {
            let t = Instant::now();
            let res = construct_ud(100, 2, 100, &AugudConfig::default().with_seed(seed)).unwrap();
            (res.combined_cd2_squared, t.elapsed())
        })
        .collect()
}

fn c3_ud_quality(results: &[(f64, Duration)]) -> Verdict {
    let roots: Vec<f64> = results.iter().map(|(sq, _)| sq.sqrt()).collect();
    let slow = results.iter().map(|r| r.1).max().unwrap();
    let sobol_level = roots.iter().filter(|&&v| v <= 1.42e-4).count();
    let target = roots.iter().filter(|&&v| v <= 5e-5).count();
    verdict(
        sobol_level >= 9 && target >= 5 && slow < Duration::from_secs(30),
        format!(
            "root CD2 <= 1.42e-4 in {sobol_level}/10, <= 5e-5 in {target}/10 (min {:.3e}, max {:.3e}), slowest {slow:.2?}",
            roots.iter().cloned().fold(f64::INFINITY, f64::min),
            roots.iter().cloned().fold(0.0, f64::max)
        ),
    )
}

fn c3_squared(results: &[(f64, Duration)]) -> Verdict {
    let sobol_level = results.iter().filter(|r| r.0 <= 1.42e-4).count();
    let target = results.iter().filter(|r| r.0 <= 5e-5).count();
    let best = results.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let worst = results.iter().map(|r| r.0).fold(0.0, f64::max);
    verdict(
        sobol_level >= 9 && target >= 5,
        format!("squared CD2 <= 1.42e-4 in {sobol_level}/10, <= 5e-5 in {target}/10 (min {best:.3e}, max {worst:.3e})"),
    )
}

struct AugmentRun {
    augud: f64,
    independent: f64,
    random: f64,
}

fn augment_runs() -> (Vec<AugmentRun>, Duration) {
    let start = Instant::now();
    let (q, s) = (20usize, 2usize);
    let runs = (0..10u64)
        .map(|seed| {
            let mut r = rng(100 + seed);
            // 5 existing points on the 20-level grid, distinct levels per column
            let mut cols: Vec<Vec<u32>> = (0..s)
                .map(|_| {
                    let mut levels: Vec<u32> = (1..=q as u32).collect();
                    levels.shuffle(&mut r);
                    levels.truncate(5);
                    levels
                })
                .collect();
            let rows: Vec<Vec<u32>> = (0..5).map(|i| cols.iter_mut().map(|c| c[i]).collect()).collect();
            let fixed = LevelDesign::from_rows(&rows, s, q).unwrap();
            let fixed_unit = fixed.to_unit();

            let aug = run_augud(&fixed, 15, s, q, &AugudConfig::default().with_seed(seed)).unwrap();
            let ud = construct_ud(15, s, 15, &AugudConfig::default().with_seed(seed)).unwrap();
            let independent = cd2_squared(&fixed_unit.stack(&ud.design.to_unit()).unwrap()).unwrap();
            let rand_block = random_unit(15, s, &mut r);
            let random = cd2_squared(&fixed_unit.stack(&rand_block).unwrap()).unwrap();
            AugmentRun {
                augud: aug.combined_cd2_squared,
                independent,
                random,
            }
        })
        .collect();
    (runs, start.elapsed())
}

fn c4_augmentation(runs: &[AugmentRun], elapsed: Duration) -> Verdict {
    let ordered = runs.iter().filter(|r| r.augud < r.independent && r.independent < r.random).count();
    let within = runs.iter().filter(|r| r.augud.sqrt() <= 5e-3).count();
    let mean_root = runs.iter().map(|r| r.augud.sqrt()).sum::<f64>() / runs.len() as f64;
    verdict(
        ordered >= 9 && within == runs.len() && elapsed < Duration::from_secs(10),
        format!("ordering in {ordered}/10, AugUD root CD2 <= 5e-3 in {within}/10 (mean {mean_root:.4}), {elapsed:.2?}"),
    )
}

fn c4_squared(runs: &[AugmentRun]) -> Verdict {
    let ordered = runs.iter().filter(|r| r.augud < r.independent && r.independent < r.random).count();
    let within = runs.iter().filter(|r| r.augud <= 5e-3).count();
    let mean = runs.iter().map(|r| r.augud).sum::<f64>() / runs.len() as f64;
    verdict(
        ordered >= 9 && within == runs.len(),
        format!("ordering in {ordered}/10, AugUD squared CD2 <= 5e-3 in {within}/10 (mean {mean:.2e})"),
    )
}

fn mean_best(method: Method, function: &str, reps: usize) -> (f64, Vec<f64>) {
    let mut cfg = ExperimentConfig::builtin(method, function, 100);
    cfg.repetitions = reps;
    cfg.workers = 4;
    let out = run_experiment(&cfg).unwrap();
    let bests: Vec<f64> = out.summary.runs.iter().map(|r| r.best.unwrap()).collect();
    (out.summary.mean_best.unwrap(), bests)
}

fn c5_cliff() -> Verdict {
    let start = Instant::now();
    let (sequd, _) = mean_best(Method::Sequd, "cliff", 20);
    let (random, _) = mean_best(Method::Random, "cliff", 20);
    let elapsed = start.elapsed();
    verdict(
        sequd >= 0.99 && random <= 0.96 && elapsed < Duration::from_secs(60),
        format!("SeqUD mean {sequd:.4}, random mean {random:.4}, {elapsed:.2?}"),
    )
}

fn c6_octopus() -> Verdict {
    let start = Instant::now();
    let (sequd, _) = mean_best(Method::Sequd, "octopus", 20);
    let (seqrand, _) = mean_best(Method::Seqrand, "octopus", 20);
    let elapsed = start.elapsed();
    verdict(
        sequd >= 2.85 && sequd >= seqrand && elapsed < Duration::from_secs(60),
        format!("SeqUD mean {sequd:.4}, SeqRand mean {seqrand:.4}, {elapsed:.2?}"),
    )
}

fn c7_spot_checks() -> Verdict {
    let (_, branin) = mean_best(Method::Sequd, "branin", 10);
    let (_, camel) = mean_best(Method::Sequd, "camel6", 10);
    let b = branin.iter().filter(|&&v| v <= 0.40).count();
    let c = camel.iter().filter(|&&v| v <= -1.025).count();
    verdict(
        b >= 8 && c >= 8,
        format!("branin <= 0.40 in {b}/10, camel6 <= -1.025 in {c}/10"),
    )
}

fn c8_budget() -> Verdict {
    let functions: Vec<bench::BenchmarkFunction> = bench::registry();
    let small = AugudConfig {
        m_outer: 3,
        m_inner: 10,
        ..AugudConfig::default()
    };
    let mut r = rng(8);
    let mut violations = 0;
    let mut runs = 0;
    for i in 0..1000 {
        let method = Method::ALL[i % Method::ALL.len()];
        let f = loop {
            let f = &functions[r.random_range(0..functions.len())];
            if method != Method::Grid || f.dimension() == 2 {
                break f;
            }
        };
        let mut cfg = ExperimentConfig::builtin(method, f.name, r.random_range(1..=120));
        cfg.seed = r.random();
        cfg.augud = small.clone();
        cfg.parallelism = r.random_range(1..=3);
        if method.is_sequential() {
            let q = r.random_range(1..=8);
            let n = q * r.random_range(1..=2);
            cfg.q_levels = Some(q);
            cfg.n_per_stage = Some(n);
            cfg.budget = cfg.budget.max(n);
        }
        let out = run_experiment(&cfg).unwrap();
        runs += 1;
        let trials = out.histories[0].len();
        if trials > cfg.budget || out.summary.total_trials != trials {
            violations += 1;
        }
    }

    // n_e = n: a single-level grid always re-snaps the only point, so every
    // stage after the first is empty and the run must still terminate
    let space = SearchSpace::unit_box(&[(0.0, 1.0), (0.0, 1.0)]).unwrap();
    let cfg = SequdConfig {
        t_max: 10,
        n_per_stage: 1,
        q_levels: 1,
        ..SequdConfig::default()
    };
    let flat = |_: &sequd_core::space::TrialConfig, _| Ok(0.0);
    let h = run_sequd(&space, &flat, &cfg).unwrap();
    let degenerate_ok = h.len() == 1;

    // a full subspace: n points already inside the zoomed box
    let grid = SubspaceGrid::zoomed(&[0.5, 0.5], 2, 3).unwrap();
    let pts: Vec<Vec<f64>> = grid.axes[0].levels.iter().map(|&x| vec![x, x]).collect();
    let (_, used) = snap_existing(pts.iter().map(Vec::as_slice), &grid).unwrap();
    let full_ok = used.len() == 3;

    // exact fit and one short of a further stage
    let cliff = bench::lookup("cliff").unwrap();
    let mut edges_ok = true;
    for t_max in [15, 16, 29, 30, 31] {
        let cfg = SequdConfig {
            t_max,
            ..SequdConfig::default()
        };
        edges_ok &= run_sequd(&cliff.space(), &cliff, &cfg).unwrap().len() <= t_max;
        edges_ok &= run_seqrand(&cliff.space(), &cliff, &cfg).unwrap().len() <= t_max;
    }
    verdict(
        violations == 0 && degenerate_ok && full_ok && edges_ok,
        format!(
            "{runs} randomized runs, {violations} violations; n_e = n stage terminates: {degenerate_ok}; full subspace snapped: {full_ok}; boundary budgets: {edges_ok}"
        ),
    )
}

fn traces(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn c9_determinism() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let mut mismatches = Vec::new();
    for method in Method::ALL {
        let function = if method == Method::Grid { "branin" } else { "hart3" };
        let run = |tag: &str, parallelism: usize, workers: usize| {
            let mut cfg = ExperimentConfig::builtin(method, function, 60);
            cfg.repetitions = 3;
            cfg.seed = 11;
            cfg.parallelism = parallelism;
            cfg.workers = workers;
            let dir = tmp.path().join(format!("{method}_{tag}"));
            cfg.output = Some(dir.clone());
            run_experiment(&cfg).unwrap();
            traces(&dir)
        };
        let a = run("a", 1, 1);
        let b = run("b", 1, 1);
        let c = run("c", 8, 3);
        if a.len() != 3 || a != b || a != c {
            mismatches.push(method.to_string());
        }
    }
    verdict(
        mismatches.is_empty(),
        format!("7 methods x 3 reps, repeat and parallelism 1 vs 8; mismatches: {mismatches:?}"),
    )
}

const BOWL: &str = r#"import json, sys
p = json.loads(sys.stdin.readline())["params"]
print("evaluating", file=sys.stderr)
print((p["x"] - 1.0) ** 2 + (p["y"] + 2.0) ** 2)
"#;

const MALFORMED: &str = r#"import sys
sys.stdin.readline()
print("value: unknown")
"#;

fn external_cfg(command: Vec<String>, budget: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::builtin(Method::Sequd, "cliff", budget);
    cfg.objective = ObjectiveSpec::External(ExternalObjectiveSpec {
        command,
        timeout_secs: 30.0,
        failure_policy: Default::default(),
    });
    cfg.space = Some(serde_json::json!([
        {"name": "x", "kind": "continuous", "lo": -5.0, "hi": 5.0},
        {"name": "y", "kind": "continuous", "lo": -5.0, "hi": 5.0}
    ]));
    cfg.direction = Some(Direction::Minimize);
    cfg.parallelism = 4;
    cfg
}

fn c10_external() -> Verdict {
    let tmp = tempfile::tempdir().unwrap();
    let script = |name: &str, body: &str| {
        let path = tmp.path().join(name);
        std::fs::write(&path, body).unwrap();
        vec!["python3".to_string(), path.to_string_lossy().into_owned()]
    };
    let bowl = run_experiment(&external_cfg(script("bowl.py", BOWL), 100)).unwrap();
    let best = bowl.summary.runs[0].best.unwrap();
    let trials = bowl.summary.total_trials;

    let malformed = run_experiment(&external_cfg(script("bad.py", MALFORMED), 30)).unwrap();
    let exit1 = run_experiment(&external_cfg(vec!["sh".into(), "-c".into(), "exit 1".into()], 30)).unwrap();
    let all_failed = |h: &sequd_core::sequd::History| !h.is_empty() && h.failures() == h.len();
    let malformed_ok = all_failed(&malformed.histories[0]);
    let exit_ok = all_failed(&exit1.histories[0]);
    verdict(
        best.abs() <= 1e-2 && trials <= 100 && malformed_ok && exit_ok,
        format!(
            "bowl best {best:.2e} in {trials} trials; malformed output recorded as failures: {malformed_ok} ({} trials); exit 1 recorded as failures: {exit_ok} ({} trials)",
            malformed.histories[0].len(),
            exit1.histories[0].len()
        ),
    )
}

fn main() {
    let mut failed = 0;
    let mut report = |id: &str, title: &str, check: &mut dyn FnMut() -> Verdict| {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let (tag, detail) = match outcome {
            Ok(v) if v.pass => ("PASS", v.detail),
            Ok(v) => ("FAIL", v.detail),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                ("FAIL", format!("panicked: {msg}"))
            }
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] criterion {id}: {title} -- {detail}");
    };

    report("1", "discrepancy correctness", &mut c1_discrepancy);
    report("2", "reflection and permutation invariance", &mut c2_invariance);
    let ud = ud_100();
    report("3", "UD construction quality, root CD2", &mut || c3_ud_quality(&ud));
    report("3s", "UD construction quality, squared CD2", &mut || c3_squared(&ud));
    let (aug, aug_time) = augment_runs();
    report("4", "augmentation ordering, root CD2", &mut || c4_augmentation(&aug, aug_time));
    report("4s", "augmentation ordering, squared CD2", &mut || c4_squared(&aug));
    report("5", "cliff reproduction", &mut c5_cliff);
    report("6", "octopus reproduction", &mut c6_octopus);
    report("7", "branin and camel6 spot checks", &mut c7_spot_checks);
    report("8", "budget discipline", &mut c8_budget);
    report("9", "determinism", &mut c9_determinism);
    report("10", "external objective protocol", &mut c10_external);

    if failed > 0 {
        println!("{failed} criterion check(s) failed");
        std::process::exit(1);
    }
    println!("all criteria passed");
}
