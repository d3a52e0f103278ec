//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (no libtest harness) and exits nonzero when any
//! criterion fails.

#[path = "../../core/tests/common/oracles.rs"]
mod oracles;

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use oracles::{
    binomial_sd, gamma_q_quadrature, gaussian_q_inv_bisect, marcum_q_quadrature, rel_err,
};
use osa_cli::commands::roc::{roc_table, RocSpec};
use osa_cli::commands::{sweep, train, RunContext};
use osa_cli::config::{DetectorForm, ScenarioConfig};
use osa_cli::presets;
use osa_core::channel::{complex_gaussian, generate_trace, ChannelParams, SlotState};
use osa_core::mac::{
    belief_predict, run_simulation, BeliefState, DpPolicy, Policy, RewardParams, Scenario,
    SensingModel,
};
use osa_core::metrics::{mse, psnr_db, rmse, snr_db, SignalPair};
use osa_core::predictor::{
    encode_series, evaluate, gradient_check, make_samples, train as fit, RnnConfig, RnnModel,
};
use osa_core::rng::{derive_seed, seeded};
use osa_core::sensing::{
    analytic_pd_marcum, analytic_pf_gamma, channels_to_sense, control_time, detect,
    energy_statistic, lrt_detect, lrt_log_statistic, lrt_log_threshold, sensing_time,
    DetectorConfig, SensingTimeForm,
};
use osa_core::special::{gamma_q, gaussian_q_inv, marcum_q};
use rand::Rng;
use tempfile::TempDir;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
}

fn roc_fidelity() -> Check {
    let start = Instant::now();
    let trials = 100_000;
    let workers = pool(std::thread::available_parallelism().map_or(1, |n| n.get()));
    let (mut points, mut worst) = (0, 0.0f64);
    for (k, &nb) in [1usize, 10, 50].iter().enumerate() {
        for (j, &snr) in [0.25, 0.5, 1.0].iter().enumerate() {
            let spec = RocSpec {
                channel: ChannelParams::new(0.2, 0.3, snr, 1.0).map_err(|e| e.to_string())?,
                form: DetectorForm::Energy,
                nb,
                u: 1,
                lambdas: vec![0.8, 1.1, 1.5],
                trials,
                literal: false,
                seed: derive_seed(101, (3 * k + j) as u64),
            };
            for r in roc_table(&spec, &workers).map_err(|e| e.to_string())? {
                for (emp, ana, what) in [
                    (r.pf_empirical, r.pf_analytic, "P_f"),
                    (r.pd_empirical, r.pd_analytic, "P_d"),
                ] {
                    let sd = binomial_sd(ana, trials);
                    let z = if sd > 0.0 {
                        (emp - ana).abs() / sd
                    } else {
                        0.0
                    };
                    worst = worst.max(z);
                    ensure((emp - ana).abs() <= 4.0 * sd, || {
                        format!("NB={nb} snr={snr} λ={}: {what} empirical {emp} analytic {ana} ({z:.2}σ)", r.lambda)
                    })?;
                }
                points += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(points >= 20, || format!("only {points} grid points"))?;
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "{points} points x {trials} trials, worst {worst:.2}σ, {secs:.1} s"
    ))
}

fn special_functions() -> Check {
    let mut worst = 0.0f64;
    for a in [1u32, 2, 3, 5, 10, 20, 50, 100] {
        for s in [0.05, 0.3, 0.7, 0.95, 1.0, 1.1, 1.6, 3.0] {
            let x = s * a as f64;
            let got = gamma_q(a as f64, x).map_err(|e| e.to_string())?;
            let err = rel_err(got, gamma_q_quadrature(a, x));
            worst = worst.max(err);
            ensure(err < 1e-8, || format!("Q({a}, {x}) relative error {err:e}"))?;
        }
    }
    for m in [1u32, 2, 3, 5] {
        for a in [0.5, 1.0, 2.0, 5.0, 10.0] {
            for b in [0.5, 1.0, 2.0, 4.0, 8.0, 12.0] {
                let want = marcum_q_quadrature(m, a, b);
                if want < 1e-200 {
                    continue;
                }
                let got = marcum_q(m, a, b).map_err(|e| e.to_string())?;
                let err = rel_err(got, want);
                worst = worst.max(err);
                ensure(err < 1e-8, || {
                    format!("Q_{m}({a}, {b}) relative error {err:e}")
                })?;
            }
        }
    }
    let mut zero_snr = 0.0f64;
    for u in [1u32, 2, 3, 5, 8] {
        for lambda in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0] {
            let cfg = DetectorConfig::new(lambda, 1, u).map_err(|e| e.to_string())?;
            let pd = analytic_pd_marcum(&cfg, 0.0).map_err(|e| e.to_string())?;
            let pf = analytic_pf_gamma(&cfg).map_err(|e| e.to_string())?;
            zero_snr = zero_snr.max((pd - pf).abs());
            ensure((pd - pf).abs() <= 1e-10, || {
                format!("u={u} λ={lambda}: P_D(0) {pd} vs P_F {pf}")
            })?;
        }
    }
    Ok(format!(
        "worst relative error {worst:.1e}, zero-SNR gap {zero_snr:.1e}"
    ))
}

fn lrt_equivalence() -> Check {
    let mut rng = seeded(2024);
    let mut busy_votes = 0;
    for i in 0..10_000 {
        let n = rng.random_range(1..=64);
        let sigma_n2 = rng.random_range(0.1..4.0);
        let sigma_s2 = rng.random_range(0.05..4.0);
        let lambda = sigma_n2 * rng.random_range(0.3..3.0);
        let busy = rng.random_bool(0.5);
        let y: Vec<Complex64> = (0..n)
            .map(|_| {
                let z = complex_gaussian(sigma_n2, &mut rng);
                if busy {
                    z + complex_gaussian(sigma_s2, &mut rng)
                } else {
                    z
                }
            })
            .collect();
        let energy = detect(
            energy_statistic(&y, true).map_err(|e| e.to_string())?,
            lambda,
        );
        let thr = lrt_log_threshold(lambda, n, sigma_n2, sigma_s2).map_err(|e| e.to_string())?;
        let lrt = lrt_detect(
            lrt_log_statistic(&y, sigma_n2, sigma_s2).map_err(|e| e.to_string())?,
            thr,
        );
        ensure(energy == lrt, || {
            format!("set {i}: energy {energy:?}, LRT {lrt:?}")
        })?;
        busy_votes += usize::from(energy == osa_core::sensing::Hypothesis::H1Busy);
    }
    Ok(format!("10000 sets identical ({busy_votes} busy)"))
}

fn belief_dynamics() -> Check {
    let mut rng = seeded(4);
    let mut cases = 0;
    for &(p, q) in &[
        (0.2, 0.3),
        (0.05, 0.05),
        (0.45, 0.45),
        (0.7, 0.6),
        (0.9, 0.05),
        (0.99, 0.98),
    ] {
        let ch =
            ChannelParams::with_memory_check(p, q, 1.0, 1.0, false).map_err(|e| e.to_string())?;
        let target = p / (p + q);
        let rate = (1.0f64 - p - q).abs();
        for _ in 0..100 {
            let x0: f64 = rng.random_range(0.0..=1.0);
            let start = BeliefState::new(x0).map_err(|e| e.to_string())?;
            let mut x = start;
            for _ in 0..20_000 {
                x = belief_predict(x, &ch);
            }
            ensure((x.value() - target).abs() < 1e-9, || {
                format!("p={p} q={q} x0={x0}: ended at {}", x.value())
            })?;
            if (x0 - target).abs() > 1e-3 {
                let measured =
                    (belief_predict(start, &ch).value() - target).abs() / (x0 - target).abs();
                ensure((measured - rate).abs() < 1e-12, || {
                    format!("p={p} q={q}: contraction {measured} vs {rate}")
                })?;
            }
            cases += 1;
        }
    }
    Ok(format!("{cases} starts converged, contraction = |1-p-q|"))
}

fn policy_dominance() -> Check {
    let ch = ChannelParams::new(0.2, 0.3, 1.0, 1.0).map_err(|e| e.to_string())?;
    let rewards = RewardParams::new(1.0, 9.0, 0.05).map_err(|e| e.to_string())?;
    let horizon = 10_000;
    let scenario = Scenario::single(ch, rewards, horizon);
    let dp = Policy::Dp(
        DpPolicy::solve(&ch, &rewards, SensingModel::Perfect, horizon, 1001)
            .map_err(|e| e.to_string())?,
    );
    let myopic = Policy::Myopic { margin: 0.0 };
    let (mut dp_total, mut my_total) = (0.0, 0.0);
    let seeds = 100;
    for s in 0..seeds {
        let seed = derive_seed(55, s);
        dp_total += run_simulation(&scenario, &dp, seed)
            .map_err(|e| e.to_string())?
            .summary
            .total_reward;
        my_total += run_simulation(&scenario, &myopic, seed)
            .map_err(|e| e.to_string())?
            .summary
            .total_reward;
    }
    let (dp_mean, my_mean) = (dp_total / seeds as f64, my_total / seeds as f64);
    ensure(dp_mean >= my_mean, || {
        format!("DP mean {dp_mean} < myopic mean {my_mean}")
    })?;

    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let ctx = context("simulate-genie", dir.path())?;
    osa_cli::commands::simulate::run(&ctx).map_err(|e| e.to_string())?;
    let summary: serde_json::Value = read_json(&dir.path().join("summary.json"))?;
    let collisions = summary["collisions"].as_u64().unwrap_or(u64::MAX);
    ensure(collisions == 0, || {
        format!("genie preset collided {collisions} times")
    })?;
    Ok(format!(
        "mean reward DP {dp_mean} >= myopic {my_mean} over {seeds} seeds; genie collisions 0"
    ))
}

fn plan_arithmetic() -> Check {
    let l = channels_to_sense(10, 4, 0.1, 0.01, 0.005).map_err(|e| e.to_string())?;
    ensure(l == 3, || format!("worked example gives L={l}"))?;
    ensure(channels_to_sense(6, 6, 0.1, 0.01, 0.005) == Ok(1), || {
        "N = M_s should give 1".into()
    })?;
    ensure(channels_to_sense(10, 2, 0.1, 0.01, 1.0) == Ok(1), || {
        "huge t_s should give 1".into()
    })?;
    ensure(channels_to_sense(10, 4, 0.1, 0.01, 0.0) == Ok(3), || {
        "t_s = 0 should give ⌈N/M_s⌉".into()
    })?;
    let tc = control_time(0.001, 0.001, 10, 0.0001, 0.000016).map_err(|e| e.to_string())?;
    ensure((tc - 0.00308).abs() <= 4.0 * f64::EPSILON * 0.00308, || {
        format!("T_c = {tc}")
    })?;
    ensure(control_time(0.0, 0.0, 7, 0.0, 0.0) == Ok(0.0), || {
        "zero T_c".into()
    })?;
    ensure(control_time(0.0, 0.0, 1, 0.0042, 0.0) == Ok(0.0042), || {
        "identity T_c".into()
    })?;

    let ts =
        sensing_time(0.1, 6e6, 0.9, 0.1, SensingTimeForm::Standard).map_err(|e| e.to_string())?;
    let qd = gaussian_q_inv_bisect(0.9);
    let qf = gaussian_q_inv_bisect(0.1);
    let oracle = ((1.2f64.sqrt() * qd - qf) / (0.1 * 6e6f64.sqrt())).powi(2);
    ensure(
        rel_err(ts, oracle) < 1e-10 && (ts - 1.202e-4).abs() < 5e-8,
        || format!("t_s = {ts}, oracle {oracle}"),
    )?;
    ensure(
        sensing_time(0.1, 6e6, 0.5, 0.5, SensingTimeForm::Standard) == Ok(0.0),
        || "t_s at P_d = P_f = 0.5".into(),
    )?;
    ensure(
        (gaussian_q_inv(0.9).map_err(|e| e.to_string())? - qd).abs() < 1e-12,
        || "Q⁻¹(0.9)".into(),
    )?;

    let mut rng = seeded(6);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let snr = rng.random_range(0.01..10.0);
        let b = 10f64.powf(rng.random_range(3.0..8.0));
        let pd = rng.random_range(0.01..0.99);
        let pf = rng.random_range(0.01..0.99);
        for form in [SensingTimeForm::Standard, SensingTimeForm::Swapped] {
            let one = sensing_time(snr, b, pd, pf, form).map_err(|e| e.to_string())?;
            let two = sensing_time(snr, 2.0 * b, pd, pf, form).map_err(|e| e.to_string())?;
            if one == 0.0 {
                continue;
            }
            let err = (two - one / 2.0).abs() / one;
            worst = worst.max(err);
            ensure(err <= 1e-12, || {
                format!("B-halving off by {err:e} at snr={snr} B={b}")
            })?;
        }
    }
    Ok(format!(
        "worked examples exact, t_s = {ts:.4e} s, B-halving worst {worst:.1e}"
    ))
}

fn markov_series(p: f64, q: f64, len: usize, seed: u64) -> Result<Vec<f64>, String> {
    let ch = ChannelParams::new(p, q, 1.0, 1.0).map_err(|e| e.to_string())?;
    let trace = generate_trace(&ch, len, SlotState::Idle, 0.01, &mut seeded(seed))
        .map_err(|e| e.to_string())?;
    Ok(encode_series(&trace))
}

fn predictor_correctness() -> Check {
    let start = Instant::now();
    let e = |err: osa_core::Error| err.to_string();

    let config = RnnConfig {
        hidden_size: 4,
        window: 6,
        ..RnnConfig::default()
    };
    let model = RnnModel::init(&config, &mut seeded(12)).map_err(e)?;
    let batch = make_samples(&markov_series(0.3, 0.2, 30, 12)?, None, 6).map_err(e)?;
    let grad = gradient_check(&model, &batch[..8])
        .map_err(e)?
        .max_relative_error;
    ensure(grad < 1e-4, || {
        format!("gradient check relative error {grad:e}")
    })?;

    let series: Vec<f64> = (0..240)
        .map(|i| if i % 2 == 0 { -1.0 } else { 1.0 })
        .collect();
    let samples = make_samples(&series, None, 10).map_err(e)?;
    let (tr, va) = samples.split_at(160);
    let config = RnnConfig::default();
    let (model, report) = fit(&config, tr, va, &mut seeded(1)).map_err(e)?;
    ensure(report.train_rmse.len() <= 400, || {
        "more than 400 epochs".into()
    })?;
    let period_hit = evaluate(&model, va)
        .map_err(e)?
        .hit_rate(config.classify_threshold);
    ensure(period_hit >= 0.99, || {
        format!("period-2 hit rate {period_hit}")
    })?;

    let (p, q) = (0.2, 0.2);
    let series = markov_series(p, q, 10_000, 7)?;
    let config = RnnConfig {
        epochs: 15,
        ..RnnConfig::default()
    };
    let samples = make_samples(&series, None, config.window).map_err(e)?;
    let split = samples.len() * 4 / 5;
    let (tr, va) = samples.split_at(split);
    let (model, _) = fit(&config, tr, va, &mut seeded(2)).map_err(e)?;
    let hit = evaluate(&model, va)
        .map_err(e)?
        .hit_rate(config.classify_threshold);
    // With p, q < 1/2 the most likely next state is the current one.
    let bayes = {
        let tail = &series[split..];
        let hits = (config.window..tail.len())
            .filter(|&i| tail[i] == tail[i - 1])
            .count();
        hits as f64 / (tail.len() - config.window) as f64
    };
    ensure(hit >= 0.95 * bayes, || {
        format!("Markov hit rate {hit} < 0.95 x Bayes {bayes}")
    })?;

    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "gradient {grad:.1e}, period-2 hit {period_hit}, Markov hit {hit:.4} vs Bayes {bayes:.4}, {secs:.1} s"
    ))
}

fn context(preset: &str, out: &Path) -> Result<RunContext, String> {
    let config = ScenarioConfig::from_json(presets::get(preset).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok(RunContext::new(config, out.to_path_buf(), 1))
}

fn read_json(path: &Path) -> Result<serde_json::Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| e.to_string())
}

fn trained_metrics() -> Check {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let ctx = context("train", dir.path())?;
    train::run(&ctx).map_err(|e| e.to_string())?;
    let m = read_json(&dir.path().join("metrics.json"))?;
    let field = |k: &str| {
        m[k].as_f64()
            .ok_or_else(|| format!("metrics.json lacks `{k}`"))
    };

    let baseline = field("baseline_rmse_val")?;
    let val = field("rmse_val")?;
    ensure(val <= 0.8 * baseline, || {
        format!("validation RMSE {val} vs untrained {baseline}")
    })?;

    let text =
        std::fs::read_to_string(dir.path().join("predictions.csv")).map_err(|e| e.to_string())?;
    let mut splits: [(Vec<f64>, Vec<f64>); 3] = Default::default();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let k = match cells[0] {
            "train" => 0,
            "validation" => 1,
            "test" => 2,
            other => return Err(format!("unknown split {other}")),
        };
        splits[k]
            .0
            .push(cells[2].parse().map_err(|_| "bad target".to_string())?);
        splits[k]
            .1
            .push(cells[3].parse().map_err(|_| "bad prediction".to_string())?);
    }
    let pair = |k: usize| SignalPair::new(&splits[k].0, &splits[k].1).map_err(|e| e.to_string());
    let test = pair(2)?;
    let test_mse = mse(&test);
    let signal = splits[2].0.iter().map(|t| t * t).sum::<f64>() / splits[2].0.len() as f64;
    let recomputed = [
        ("rmse_train", rmse(&pair(0)?)),
        ("rmse_val", rmse(&pair(1)?)),
        ("rmse_test", rmse(&test)),
        ("mse", test_mse),
        (
            "psnr_db",
            psnr_db(train::PSNR_MAX, test_mse).map_err(|e| e.to_string())?,
        ),
        (
            "snr_db",
            snr_db(signal, test_mse).map_err(|e| e.to_string())?,
        ),
    ];
    for (k, v) in recomputed {
        let got = field(k)?;
        ensure((got - v).abs() <= 1e-12 * v.abs().max(1.0), || {
            format!("{k}: JSON {got}, recomputed {v}")
        })?;
    }
    println!(
        "    reference figures from an unavailable dataset (not targets): \
         RMSE 0.2143 / 0.2116, MSE 0.46, PSNR 21.4549 dB, SNR 27.4231 dB"
    );
    println!(
        "    this run: RMSE train {:.4} / val {val:.4} / test {:.4}, MSE {test_mse:.4}, PSNR {:.4} dB, SNR {:.4} dB",
        field("rmse_train")?,
        field("rmse_test")?,
        field("psnr_db")?,
        field("snr_db")?
    );
    Ok(format!(
        "validation RMSE {val:.4} is {:.1}% below untrained {baseline:.4}; fields match predictions.csv",
        100.0 * (1.0 - val / baseline)
    ))
}

fn sweep_shape() -> Check {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let ctx = context("sweep", dir.path())?;
    let n = ctx.config.simulation.as_ref().map_or(1, |s| s.n_channels);
    let rows = sweep::sweep_rows(&ctx).map_err(|e| e.to_string())?;
    for r in &rows {
        ensure((0.0..=1.0).contains(&r.normalized_throughput), || {
            format!(
                "density {}: normalized {}",
                r.density, r.normalized_throughput
            )
        })?;
        ensure((0.0..=1.0).contains(&r.per_user_throughput), || {
            format!("density {}: per user {}", r.density, r.per_user_throughput)
        })?;
    }
    let past: Vec<_> = rows.iter().filter(|r| r.users > n).collect();
    ensure(past.len() >= 2, || {
        "fewer than two points past the channel count".into()
    })?;
    for w in past.windows(2) {
        ensure(w[1].per_user_throughput <= w[0].per_user_throughput, || {
            format!(
                "per-user throughput rises from {} to {} between {} and {} users",
                w[0].per_user_throughput, w[1].per_user_throughput, w[0].users, w[1].users
            )
        })?;
    }
    Ok(format!(
        "{} densities, {} past N = {n}, nonincreasing",
        rows.len(),
        past.len()
    ))
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map(|it| {
            it.filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .map(|p| {
                    (
                        p.file_name().unwrap().to_string_lossy().into_owned(),
                        std::fs::read(&p).unwrap(),
                    )
                })
                .collect()
        })
        .unwrap_or_default();
    files.sort();
    files
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_osa");
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let runs = [
        ("roc", "roc"),
        ("sense-plan", "sense-plan-targets"),
        ("simulate", "simulate-myopic"),
        ("sweep", "sweep"),
        ("train", "train"),
    ];
    let mut compared = 0;
    for (cmd, preset) in runs {
        let first = dir.path().join(format!("{cmd}-1"));
        let second = dir.path().join(format!("{cmd}-2"));
        let status = Command::new(bin)
            .args([cmd, "--preset", preset, "--jobs", "1", "--out"])
            .arg(&first)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            format!("{cmd}: {}", String::from_utf8_lossy(&status.stderr))
        })?;
        let manifest = first.join(format!("{cmd}.manifest.json"));
        let status = Command::new(bin)
            .args([cmd, "--jobs", "3", "--config"])
            .arg(&manifest)
            .arg("--out")
            .arg(&second)
            .output()
            .map_err(|e| e.to_string())?;
        ensure(status.status.success(), || {
            format!("{cmd} rerun: {}", String::from_utf8_lossy(&status.stderr))
        })?;
        let (a, b) = (csv_files(&first), csv_files(&second));
        ensure(!a.is_empty(), || format!("{cmd} wrote no CSV"))?;
        ensure(a == b, || format!("{cmd}: CSV bytes differ on rerun"))?;
        let m1 = read_json(&manifest)?;
        let m2 = read_json(&second.join(format!("{cmd}.manifest.json")))?;
        ensure(m1["config_hash"] == m2["config_hash"], || {
            format!("{cmd}: config hash changed")
        })?;
        compared += a.len();
    }
    Ok(format!(
        "{} subcommands rerun from manifests, {compared} CSV files byte-identical",
        runs.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("ROC fidelity", roc_fidelity),
        ("special-function accuracy", special_functions),
        ("LRT equivalence", lrt_equivalence),
        ("belief dynamics", belief_dynamics),
        ("policy dominance", policy_dominance),
        ("sensing plan arithmetic", plan_arithmetic),
        ("predictor correctness", predictor_correctness),
        ("trained metrics", trained_metrics),
        ("sweep shape", sweep_shape),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
