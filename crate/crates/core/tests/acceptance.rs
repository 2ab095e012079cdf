//! Acceptance checks for the estimator, baselines and simulation harness.
//!
//! Runs every check, prints one `PASS`/`FAIL` line each and exits non-zero if
//! any check fails. Run with `cargo test -p sieve-core --test acceptance`.

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sieve_core::baselines::{brownian_mercer_partial_sum, eval_expansion, projection_fit};
use sieve_core::estimator::{fraction_bits, Quantization};
use sieve_core::simulation::presets::{example1, example1_kernel_sgd, example2, example3};
use sieve_core::simulation::{
    aggregate, fit_loglog_points, fit_loglog_slope, run_experiment, AggregateRow, ExperimentConfig,
    ExperimentResult, MseMethod, Noise, XDist,
};
use sieve_core::{BasisFamily, Loss, SieveConfig, SieveState};

const N_MAX: u64 = 10_000;
/// Start of the last 1.5 decades below `N_MAX`.
const WINDOW_START: u64 = 316;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn outcome(id: &'static str, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome {
        id,
        name,
        pass,
        detail,
    }
}

fn run(config: &ExperimentConfig) -> ExperimentResult {
    let result = run_experiment(config).unwrap_or_else(|e| panic!("{}: {e}", config.run_id));
    assert_eq!(result.config.run.n_max, config.run.n_max);
    result
}

fn final_row(result: &ExperimentResult) -> AggregateRow {
    aggregate(&result.records).pop().expect("no records")
}

fn mse_slope(result: &ExperimentResult, n_min: u64) -> f64 {
    fit_loglog_slope(&result.records, n_min)
        .expect("slope fit")
        .slope
}

fn regret_slope(result: &ExperimentResult, n_min: u64) -> f64 {
    let points: Vec<(u64, f64)> = aggregate(&result.records)
        .iter()
        .map(|r| (r.n, r.regret.expect("regret missing")))
        .collect();
    fit_loglog_points(&points, n_min).expect("slope fit").slope
}

fn rate_example2() -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut finals = Vec::new();
    for (id, alpha) in [("1a", 0.43), ("1b", 0.15)] {
        let result = run(&example2(alpha));
        let slope = mse_slope(&result, WINDOW_START);
        finals.push(final_row(&result).mse);
        out.push(outcome(
            id,
            if alpha == 0.43 {
                "example2 alpha=0.43 slope in [-1.00, -0.70]"
            } else {
                "example2 alpha=0.15 slope in [-1.00, -0.70]"
            },
            (-1.0..=-0.7).contains(&slope),
            format!("slope={slope:.4} over n>={WINDOW_START}"),
        ));
    }
    let under = final_row(&run(&example2(0.10))).mse;
    let ratio = under / finals[0];
    out.push(outcome(
        "2",
        "example2 alpha=0.10 final MSE >= 3x alpha=0.43",
        ratio >= 3.0,
        format!(
            "mse(0.10)={under:.4e} mse(0.43)={:.4e} ratio={ratio:.2}",
            finals[0]
        ),
    ));
    out
}

fn rate_example1() -> Vec<Outcome> {
    let base = run(&example1());
    let slope = mse_slope(&base, WINDOW_START);

    let mut shifted = example1();
    shifted.run_id = "example1_uniform2575".into();
    shifted.data.x_dist = XDist::Uniform2575;
    shifted.data.noise = Noise::UniformPm02;
    shifted.run.mse_method = MseMethod::Quadrature;
    shifted.run.eval_points = 2_000;
    let shifted_result = run(&shifted);
    assert_eq!(shifted_result.mse_method, MseMethod::Quadrature);
    let shifted_slope = mse_slope(&shifted_result, WINDOW_START);
    vec![
        outcome(
            "3a",
            "example1 slope in [-0.95, -0.65]",
            (-0.95..=-0.65).contains(&slope),
            format!("slope={slope:.4} over n>={WINDOW_START}"),
        ),
        outcome(
            "3b",
            "example1 on Unif[0.25, 0.75] slope <= -0.65",
            shifted_slope <= -0.65,
            format!("slope={shifted_slope:.4} over n>={WINDOW_START}"),
        ),
    ]
}

fn logistic_regret() -> Vec<Outcome> {
    let main = run(&example3(0.33));
    assert_eq!(main.config.estimator.gamma0, 6.0);
    let slope = regret_slope(&main, WINDOW_START);
    let flat = run(&example3(0.10));
    let last_decade = regret_slope(&flat, N_MAX / 10);
    vec![
        outcome(
            "4a",
            "example3 alpha=0.33 regret slope in [-0.80, -0.50]",
            (-0.8..=-0.5).contains(&slope),
            format!("slope={slope:.4} over n>={WINDOW_START}"),
        ),
        outcome(
            "4b",
            "example3 alpha=0.10 regret slope > -0.4 over last decade",
            last_decade > -0.4,
            format!(
                "slope={last_decade:.4} over n>={}; regret {:.4e} -> {:.4e}",
                N_MAX / 10,
                aggregate(&flat.records)
                    .iter()
                    .find(|r| r.n >= N_MAX / 10)
                    .and_then(|r| r.regret)
                    .unwrap_or(f64::NAN),
                final_row(&flat).regret.unwrap_or(f64::NAN)
            ),
        ),
    ]
}

fn psi(family: BasisFamily, j: usize, x: f64) -> f64 {
    match family {
        BasisFamily::SineHalf => SQRT_2 * ((2 * j - 1) as f64 * PI * x / 2.0).sin(),
        BasisFamily::CosineEigen if j == 1 => 1.0,
        BasisFamily::CosineEigen => SQRT_2 * ((j - 1) as f64 * PI * x).cos(),
        BasisFamily::TrigPairs => {
            let k = j.div_ceil(2) as f64;
            if j.is_multiple_of(2) {
                (2.0 * PI * k * x).sin()
            } else {
                (2.0 * PI * k * x).cos()
            }
        }
    }
}

/// Functional recursion `f_i = f_(i-1) + gamma_i (y_i - f_(i-1)(X_i)) K_i(X_i, .)`
/// evaluated on a grid, with `K_i(s, t) = sum_{j <= J_i} j^(-2 omega) psi_j(s) psi_j(t)`.
fn oracle_equivalence() -> Vec<Outcome> {
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..10u64 {
        let family = [
            BasisFamily::SineHalf,
            BasisFamily::CosineEigen,
            BasisFamily::TrigPairs,
        ][seed as usize % 3];
        let (alpha, omega, gamma0, s) = (0.43, 1.0, 1.0, 2.0);
        let mut state = SieveState::new(SieveConfig::new(alpha, omega, gamma0, s, family)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // (X_k, gamma_k * residual_k, J_k)
        let mut history: Vec<(f64, f64, usize)> = Vec::new();
        let mut raw = vec![0.0; grid.len()];
        let mut avg = vec![0.0; grid.len()];
        let kernel = |level: usize, s: f64, t: f64| -> f64 {
            (1..=level)
                .map(|j| (j as f64).powf(-2.0 * omega) * psi(family, j, s) * psi(family, j, t))
                .sum()
        };
        for i in 1..=200u64 {
            let x: f64 = rng.gen();
            let y = (2.0 * PI * x).sin() + x * x + rng.gen_range(-0.5..0.5);
            let fitted: f64 = history
                .iter()
                .map(|&(xk, scale, jk)| scale * kernel(jk, xk, x))
                .sum();
            let gamma = gamma0 * (i as f64).powf(-1.0 / (2.0 * s + 1.0));
            let level = ((i as f64).powf(alpha).floor() as usize).max(1);
            let scale = gamma * (y - fitted);
            history.push((x, scale, level));
            state.update(x, y, Loss::Squared).unwrap();
            for (k, &t) in grid.iter().enumerate() {
                raw[k] += scale * kernel(level, x, t);
                avg[k] = (i as f64 * avg[k] + raw[k]) / (i + 1) as f64;
                worst = worst
                    .max((state.predict_raw(t).unwrap() - raw[k]).abs())
                    .max((state.predict(t).unwrap() - avg[k]).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    vec![outcome(
        "5",
        "coefficient form matches functional recursion to 1e-9",
        worst <= 1e-9,
        format!("max |diff|={worst:.3e} over 10 seeds x 200 steps x 101 points in {secs:.2}s"),
    )]
}

fn averaging_identity() -> Vec<Outcome> {
    let config = example2(0.43).estimator;
    let mut state = SieveState::new(SieveConfig::new(
        config.alpha,
        config.omega,
        config.gamma0,
        config.s,
        config.family,
    ))
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let n = 1_000u64;
    let mut iterates: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..n {
        let x: f64 = rng.gen();
        let y = 4.0 * x * (1.0 - x) + rng.gen_range(-1.0..1.0);
        state.update(x, y, Loss::Squared).unwrap();
        iterates.push(state.raw_coefs().to_vec());
    }
    let len = state.truncation();
    let mut worst = 0.0f64;
    for j in 0..len {
        let mean = iterates
            .iter()
            .map(|b| b.get(j).copied().unwrap_or(0.0))
            .sum::<f64>()
            / (n + 1) as f64;
        worst = worst.max((mean - state.avg_coefs()[j]).abs());
    }
    vec![outcome(
        "6",
        "running average equals snapshot mean at n=1000 to 1e-10",
        worst <= 1e-10,
        format!("max |diff|={worst:.3e} over J={len}"),
    )]
}

fn mercer_check() -> Vec<Outcome> {
    let grid: Vec<f64> = (0..=100).map(|k| k as f64 / 100.0).collect();
    let sup = |terms: usize| {
        let mut e = 0.0f64;
        for &s in &grid {
            for &t in &grid {
                e = e.max((brownian_mercer_partial_sum(terms, s, t) - s.min(t)).abs());
            }
        }
        e
    };
    let errs: Vec<f64> = [8, 32, 128].into_iter().map(sup).collect();
    vec![outcome(
        "7",
        "min(s,t) partial sums: sup error <= 0.02 at J=128, decreasing over 8, 32, 128",
        errs[2] <= 0.02 && errs[0] > errs[1] && errs[1] > errs[2],
        format!(
            "sup error J=8 {:.4e}, J=32 {:.4e}, J=128 {:.4e}",
            errs[0], errs[1], errs[2]
        ),
    )]
}

fn projection_recovery() -> Vec<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for family in BasisFamily::ALL {
        for j in [1usize, 5, 12] {
            let theta: Vec<f64> = (0..j).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let xs: Vec<f64> = (0..4 * j + 20).map(|_| rng.gen()).collect();
            let ys: Vec<f64> = xs
                .iter()
                .map(|&x| eval_expansion(&theta, family, x).unwrap())
                .collect();
            let fit = projection_fit(&xs, &ys, j, family).unwrap();
            for (a, b) in fit.iter().zip(&theta) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    vec![outcome(
        "8",
        "projection fit recovers noiseless span targets to 1e-8",
        worst <= 1e-8,
        format!("max coefficient error={worst:.3e}"),
    )]
}

fn cost_scaling() -> Vec<Outcome> {
    let mut configs = [example2(0.43), example2(0.15)];
    for c in configs.iter_mut() {
        c.run.replications = 2;
    }
    let ops: Vec<f64> = configs
        .iter()
        .map(|c| final_row(&run(c)).op_count)
        .collect();
    let ratio = ops[0] / ops[1];
    let target = (N_MAX as f64).powf(0.28);
    let within = ratio >= target / 2.0 && ratio <= target * 2.0;

    let mut per_update_ok = true;
    let mut worst_excess = i64::MIN;
    for alpha in [0.1, 0.15, 0.43, 0.7] {
        let mut state = SieveState::new(SieveConfig::new(
            alpha,
            3.0,
            1.0,
            3.0,
            BasisFamily::SineHalf,
        ))
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2_000 {
            let before = state.op_count();
            let x: f64 = rng.gen();
            state.update(x, x.sin(), Loss::Squared).unwrap();
            let cost = (state.op_count() - before) as i64;
            let bound = 3 * state.truncation() as i64;
            worst_excess = worst_excess.max(cost - bound);
            per_update_ok &= cost <= bound;
        }
    }
    vec![
        outcome(
            "9a",
            "op_count ratio alpha 0.43/0.15 at n=1e4 within 2x of 1e4^0.28",
            within,
            format!("ratio={ratio:.3} target={target:.3}"),
        ),
        outcome(
            "9b",
            "per-update cost <= 3 J_i at every step",
            per_update_ok,
            format!("max(cost - 3 J_i)={worst_excess}"),
        ),
    ]
}

fn quantized_mode() -> Vec<Outcome> {
    let full = example2(0.43);
    let mut quant = full.clone();
    quant.run_id = "example2_quantized".into();
    quant.estimator.quantization = Some(Quantization::default());
    let full_result = run(&full);
    let quant_result = run(&quant);
    let a = final_row(&full_result).mse;
    let b = final_row(&quant_result).mse;
    let rel = (b - a).abs() / a;

    let mut storage_ok = true;
    let mut checked = 0;
    for r in &quant_result.records {
        let expect = r.coef_count as u64 * u64::from(fraction_bits(r.n) + 16);
        storage_ok &= r.storage_bits == Some(expect);
        checked += 1;
    }
    let last = quant_result.records.last().unwrap();
    vec![
        outcome(
            "10a",
            "quantized final MSE within 1% of full precision",
            rel <= 0.01,
            format!("full={a:.6e} quantized={b:.6e} rel={rel:.3e}"),
        ),
        outcome(
            "10b",
            "storage_bits = J_n (ceil(3 log2 n) + 16)",
            storage_ok && checked > 0,
            format!(
                "{checked} rows; at n={} J={} bits={:?}",
                last.n, last.coef_count, last.storage_bits
            ),
        ),
    ]
}

fn kernel_baseline() -> Vec<Outcome> {
    const N: u64 = 3_000;
    let mut kernel = example1_kernel_sgd();
    kernel.run.n_max = N;
    kernel.run.mse_method = MseMethod::Quadrature;
    kernel.run.eval_points = 1_000;
    let kernel_result = run(&kernel);
    let n_min = (N as f64 / 10f64.powf(1.5)).round() as u64;
    let slope = mse_slope(&kernel_result, n_min);

    let mut sieve = example1();
    sieve.run.n_max = N;
    let sieve_rows = aggregate(&run(&sieve).records);
    let kernel_rows = aggregate(&kernel_result.records);
    // kernel SGD spends no evaluations on its first few updates
    let compared: Vec<(u64, f64, f64)> = sieve_rows
        .iter()
        .zip(&kernel_rows)
        .filter(|(s, _)| s.n >= 10)
        .map(|(s, k)| {
            assert_eq!(s.n, k.n);
            (s.n, s.op_count, k.op_count)
        })
        .collect();
    let cheaper = !compared.is_empty() && compared.iter().all(|(_, s, k)| s < k);
    let (n, s_ops, k_ops) = *compared.last().unwrap();
    vec![
        outcome(
            "11a",
            "averaged kernel SGD on example1 slope <= -0.6 (n <= 3000)",
            slope <= -0.6,
            format!("slope={slope:.4} over n>={n_min}"),
        ),
        outcome(
            "11b",
            "sieve op_count < kernel SGD op_count at equal n",
            cheaper,
            format!(
                "{} checkpoints with n>=10; at n={n}: sieve {s_ops:.0} vs kernel {k_ops:.0}",
                compared.len()
            ),
        ),
    ]
}

fn main() -> ExitCode {
    let checks: [fn() -> Vec<Outcome>; 10] = [
        rate_example2,
        rate_example1,
        logistic_regret,
        oracle_equivalence,
        averaging_identity,
        mercer_check,
        projection_recovery,
        cost_scaling,
        quantized_mode,
        kernel_baseline,
    ];
    let start = Instant::now();
    let mut failed = 0;
    let mut total = 0;
    for check in checks {
        let t = Instant::now();
        for o in check() {
            total += 1;
            if !o.pass {
                failed += 1;
            }
            println!(
                "[{}] {:<4} {} | {} ({:.1}s)",
                if o.pass { "PASS" } else { "FAIL" },
                o.id,
                o.name,
                o.detail,
                t.elapsed().as_secs_f64()
            );
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.1}s)",
        total - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
