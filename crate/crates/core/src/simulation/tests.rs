use proptest::prelude::*;
use rand::Rng;

use super::presets::{example1, example2, example3, noise_sd_for_snr};
use super::*;
use crate::basis::BasisFamily;
use crate::estimator::{Loss, SieveConfig, SieveState};

fn small(mut config: ExperimentConfig, n_max: u64, replications: usize) -> ExperimentConfig {
    config.run.n_max = n_max;
    config.run.replications = replications;
    config.run.eval_points = 2_000;
    config
}

fn without_time(records: &[RunRecord]) -> Vec<RunRecord> {
    records
        .iter()
        .cloned()
        .map(|mut r| {
            r.wall_time_s = 0.0;
            r
        })
        .collect()
}

#[test]
fn target_examples() {
    let b4 = TargetFunction::Bernoulli4Poly.eval(&[0.0]).unwrap();
    assert!((b4 + 1.0 / 30.0).abs() < 1e-15);
    assert!(TargetFunction::SineSeries50.eval(&[0.0]).unwrap().abs() < 1e-15);
    assert_eq!(
        eval_target(TargetFunction::LogisticTent, &[0.5]).unwrap(),
        5.0
    );
    assert_eq!(TargetFunction::LogisticTent.eval(&[0.0]).unwrap(), 0.0);
    // both tents peak at 1/4 in two dimensions: 3 products of 1/2 * 1/2
    let v = TargetFunction::TentInteraction.eval(&[0.5, 0.5]).unwrap();
    assert!((v - 0.75).abs() < 1e-15);
    assert!(TargetFunction::Bernoulli4Poly.eval(&[1.5]).is_err());
    assert!(TargetFunction::SineSeries50.eval(&[0.2, 0.3]).is_err());
}

#[test]
fn sine_series_coefficients_by_quadrature() {
    let m = 20_000;
    let family = BasisFamily::SineHalf;
    for j in 1..=52 {
        let proj: f64 = (0..m)
            .map(|k| {
                let x = (k as f64 + 0.5) / m as f64;
                TargetFunction::SineSeries50.eval(&[x]).unwrap() * family.eval(j, x).unwrap()
            })
            .sum::<f64>()
            / m as f64;
        let expected = if j <= 50 {
            4.0 * (-1f64).powi(j as i32 + 1) / (j as f64).powi(4)
        } else {
            0.0
        };
        assert!(
            (proj - expected).abs() < 1e-6,
            "j={j}: {proj} vs {expected}"
        );
    }
}

#[test]
fn mse_monte_carlo_examples() {
    let t = TargetFunction::Bernoulli4Poly;
    let exact = mse_monte_carlo(|x| t.eval(x), t, XDist::Uniform01, 1, 1000, 3).unwrap();
    assert_eq!(exact, 0.0);
    let shifted =
        mse_monte_carlo(|x| Ok(t.eval(x)? + 0.1), t, XDist::Uniform01, 1, 1000, 3).unwrap();
    assert!((shifted - 0.01).abs() < 1e-12);
    assert!(mse_monte_carlo(|_| Ok(0.0), t, XDist::Uniform01, 1, 0, 3).is_err());
}

#[test]
fn zero_predictor_against_sine_series() {
    let oracle: f64 = (1..=50).map(|j| 16.0 / (j as f64).powi(8)).sum();
    let coef =
        mse_coefficient_space(&[], TargetFunction::SineSeries50, BasisFamily::SineHalf).unwrap();
    assert!((coef - oracle).abs() < 1e-12);
    // 16 zeta(8) is the untruncated value; the tail past 50 is below 16 / (7 * 50^7)
    let tail = 16.0 * std::f64::consts::PI.powi(8) / 9450.0 - oracle;
    assert!(tail > 0.0 && tail < 16.0 / (7.0 * 50f64.powi(7)));

    let (mc, se) = mse_monte_carlo_with_se(
        |_| Ok(0.0),
        TargetFunction::SineSeries50,
        XDist::Uniform01,
        1,
        1_000_000,
        11,
    )
    .unwrap();
    assert!(
        (mc - oracle).abs() <= 3.0 * se,
        "{mc} vs {oracle} (se {se})"
    );
}

#[test]
fn coefficient_space_examples() {
    let theta = TargetFunction::SineSeries50
        .known_coefficients(BasisFamily::SineHalf)
        .unwrap();
    let fam = BasisFamily::SineHalf;
    let t = TargetFunction::SineSeries50;
    assert_eq!(mse_coefficient_space(&theta, t, fam).unwrap(), 0.0);
    let base = mse_coefficient_space(&[0.0; 3], t, fam).unwrap();
    let mut bumped = theta.clone();
    bumped[0] += 0.1;
    assert!((mse_coefficient_space(&bumped, t, fam).unwrap() - 0.01).abs() < 1e-15);
    // coefficients past the 50th count in full
    let mut long = theta.clone();
    long.push(0.5);
    assert!((mse_coefficient_space(&long, t, fam).unwrap() - 0.25).abs() < 1e-15);
    assert!(base > 16.0);
    assert!(matches!(
        mse_coefficient_space(
            &[1.0],
            TargetFunction::Bernoulli4Poly,
            BasisFamily::CosineEigen
        ),
        Err(SieveError::NoKnownExpansion { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn monte_carlo_agrees_with_coefficient_space(
        coefs in prop::collection::vec(-5.0f64..5.0, 1..12),
        seed in any::<u64>(),
    ) {
        let fam = BasisFamily::SineHalf;
        let predict = |x: &[f64]| crate::baselines::eval_expansion(&coefs, fam, x[0]);
        let (mc, se) = mse_monte_carlo_with_se(
            predict, TargetFunction::SineSeries50, XDist::Uniform01, 1, 100_000, seed,
        ).unwrap();
        let exact = mse_coefficient_space(&coefs, TargetFunction::SineSeries50, fam).unwrap();
        prop_assert!((mc - exact).abs() <= 3.0 * se + 1e-12, "{} vs {} (se {})", mc, exact, se);
    }

    #[test]
    fn conditional_logistic_excess_is_non_negative(fhat in -20.0f64..20.0, fstar in -6.0f64..6.0) {
        prop_assert!(conditional_logistic_excess(fhat, fstar) >= -1e-15);
    }
}

#[test]
fn logistic_regret_examples() {
    let fstar = |x: &[f64]| TargetFunction::LogisticTent.eval(x);
    assert_eq!(logistic_regret(fstar, 10_000, 5).unwrap(), 0.0);
    assert!(logistic_regret(|_| Ok(0.0), 10_000, 5).unwrap() > 0.0);
    let near = logistic_regret(|x| Ok(fstar(x)? + 0.01), 10_000, 5).unwrap();
    let far = logistic_regret(|x| Ok(fstar(x)? + 0.1), 10_000, 5).unwrap();
    assert!(near >= 0.0 && near <= far, "{near} {far}");
}

/// Direct Monte Carlo over labels, independent of the integrated form.
#[test]
fn logistic_regret_matches_sampled_labels() {
    let fstar = |x: f64| 5.0 * (1.0 - 2.0 * (x - 0.5).abs());
    let loss = |y: f64, v: f64| (1.0 + (-y * v).exp()).ln();
    let mut rng = rng_for(99, 0);
    let m = 400_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..m {
        let x: f64 = rng.gen();
        let g = 1.0 / (1.0 + (-fstar(x)).exp());
        let y = if rng.gen::<f64>() < g { 1.0 } else { -1.0 };
        let d = loss(y, 0.0) - loss(y, fstar(x));
        sum += d;
        sum_sq += d * d;
    }
    let mean = sum / m as f64;
    let se = ((sum_sq / m as f64 - mean * mean) / m as f64).sqrt();
    let integrated = logistic_regret(|_| Ok(0.0), 200_000, 1).unwrap();
    assert!(
        (integrated - mean).abs() < 4.0 * se + 1e-3,
        "{integrated} vs {mean}"
    );
}

#[test]
fn slope_fit_examples() {
    let exact: Vec<(u64, f64)> = [10u64, 100, 1000, 10_000]
        .iter()
        .map(|&n| (n, (n as f64).powi(-2)))
        .collect();
    let fit = fit_loglog_points(&exact, 1).unwrap();
    assert!((fit.slope + 2.0).abs() < 1e-9 && fit.intercept.abs() < 1e-9);

    let flat: Vec<(u64, f64)> = (1..6).map(|k| (10u64.pow(k), 0.3)).collect();
    assert!(fit_loglog_points(&flat, 1).unwrap().slope.abs() < 1e-12);

    let mut rng = rng_for(8, 0);
    let noisy: Vec<(u64, f64)> = Checkpoints::PerDecade(10)
        .resolve(100_000)
        .into_iter()
        .filter(|&n| n >= 10)
        .map(|n| {
            (
                n,
                7.0 * (n as f64).powf(-0.8) * (1.0 + 0.01 * rng.gen_range(-1.0..1.0)),
            )
        })
        .collect();
    let fit = fit_loglog_points(&noisy, 10).unwrap();
    assert!((fit.slope + 0.8).abs() < 0.02);
    assert!((10f64.powf(fit.intercept) - 7.0).abs() < 0.2);

    assert!(matches!(
        fit_loglog_points(&exact[..2], 1),
        Err(SieveError::SlopeFit(_))
    ));
    assert!(fit_loglog_points(&exact, 1000).is_err());
    let zero = [(10, 1.0), (100, 0.0), (1000, 0.1)];
    assert!(matches!(
        fit_loglog_points(&zero, 1),
        Err(SieveError::SlopeFit(_))
    ));
    assert!(fit_loglog_points(&zero, 1000).is_err());
}

#[test]
fn slope_of_records_uses_replication_means() {
    let record = |replication, n: u64, mse| RunRecord {
        run_id: "t".into(),
        replication,
        n,
        mse,
        regret: None,
        op_count: 0,
        coef_count: 0,
        storage_bits: None,
        wall_time_s: 0.0,
    };
    // means are 1e-1, 1e-2, 1e-3 although single replications are not a power law
    let records = vec![
        record(0, 10, 0.15),
        record(1, 10, 0.05),
        record(0, 100, 0.018),
        record(1, 100, 0.002),
        record(0, 1000, 0.0015),
        record(1, 1000, 0.0005),
    ];
    let fit = fit_loglog_slope(&records, 1).unwrap();
    assert!((fit.slope + 1.0).abs() < 1e-12);
    let rows = aggregate(&records);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0].replications, 2);
    assert_eq!(rows[1].regret, None);
}

#[test]
fn checkpoint_grids() {
    let grid = Checkpoints::PerDecade(10).resolve(1000);
    assert_eq!(&grid[..10], &[1, 2, 3, 4, 5, 6, 8, 10, 13, 16]);
    assert_eq!(*grid.last().unwrap(), 1000);
    assert_eq!(grid.len(), 28);
    assert_eq!(
        Checkpoints::PerDecade(1).resolve(500),
        vec![1, 10, 100, 500]
    );
    assert_eq!(Checkpoints::List(vec![5, 50]).resolve(100), vec![5, 50]);
}

#[test]
fn replication_seeds_differ_and_streams_repeat() {
    let seeds: Vec<u64> = (0..100).map(|r| replication_seed(7, r)).collect();
    let mut unique = seeds.clone();
    unique.sort_unstable();
    unique.dedup();
    assert_eq!(unique.len(), seeds.len());
    assert_eq!(splitmix64(0), 0xE220_A839_7B1D_CDAF);

    let make = |seed| {
        DataStream::new(
            TargetFunction::SineSeries50,
            XDist::Uniform01,
            Noise::StdNormal,
            1,
            seed,
        )
        .unwrap()
    };
    let a: Vec<_> = make(5).take(200).collect();
    let b: Vec<_> = make(5).take(200).collect();
    let c: Vec<_> = make(6).take(200).collect();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn design_supports() {
    let mut rng = rng_for(1, 0);
    let mut x = vec![0.0; 10];
    for _ in 0..10_000 {
        XDist::Uniform2575.sample_into(&mut rng, &mut x);
        assert!(x.iter().all(|&v| (0.25..=0.75).contains(&v)));
        XDist::DependentChain.sample_into(&mut rng, &mut x);
        assert!(x.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }
}

#[test]
fn dependent_chain_correlation() {
    // x_2 = (u_2 - u_1 + 1) / 2 has covariance -1/24 with x_1 = u_1
    let mut rng = rng_for(2, 0);
    let m = 200_000;
    let mut x = [0.0; 2];
    let (mut s1, mut s2, mut s12) = (0.0, 0.0, 0.0);
    for _ in 0..m {
        XDist::DependentChain.sample_into(&mut rng, &mut x);
        s1 += x[0];
        s2 += x[1];
        s12 += x[0] * x[1];
    }
    let m = m as f64;
    let cov = s12 / m - (s1 / m) * (s2 / m);
    assert!((cov + 1.0 / 24.0).abs() < 2e-3, "{cov}");
}

#[test]
fn bernoulli_labels_match_probability() {
    let x = 0.3;
    let f = TargetFunction::LogisticTent.eval(&[x]).unwrap();
    let g = 1.0 / (1.0 + (-5.0 * (1.0 - 2.0 * (x - 0.5f64).abs())).exp());
    assert!((label_probability(f) - g).abs() < 1e-15);
    let mut rng = rng_for(3, 0);
    let m = 100_000;
    let mean = (0..m)
        .map(|_| Noise::BernoulliLabel.respond(&mut rng, f))
        .sum::<f64>()
        / m as f64;
    let se = 2.0 * (g * (1.0 - g) / m as f64).sqrt();
    assert!((mean - (2.0 * g - 1.0)).abs() <= 3.0 * se);
}

#[test]
fn noise_levels() {
    let mut rng = rng_for(4, 0);
    for _ in 0..1000 {
        assert!(Noise::UniformPm002.respond(&mut rng, 1.0).abs() - 1.0 <= 0.02);
        assert!((Noise::UniformPm02.respond(&mut rng, 0.0)).abs() <= 0.2);
        assert_eq!(Noise::None.respond(&mut rng, 0.7), 0.7);
    }
    assert!(Noise::Gaussian { sd: -1.0 }.validate().is_err());
    // Var B4(U) = 1/2100 for U uniform on [0, 1]
    let sd = noise_sd_for_snr(TargetFunction::Bernoulli4Poly, XDist::Uniform01, 1, 3.0);
    assert!((sd / (1.0 / 6300f64).sqrt() - 1.0).abs() < 0.01, "{sd}");
}

#[test]
fn equal_seeds_give_identical_records() {
    let config = small(example2(0.43), 500, 2);
    let a = run_experiment(&config).unwrap();
    let b = run_experiment(&config).unwrap();
    assert_eq!(without_time(&a.records), without_time(&b.records));
    assert_eq!(a.seeds, b.seeds);
    assert_eq!(a.mse_method, MseMethod::CoefficientSpace);
    let rep0: Vec<_> = a
        .records
        .iter()
        .filter(|r| r.replication == 0)
        .map(|r| r.mse)
        .collect();
    let rep1: Vec<_> = a
        .records
        .iter()
        .filter(|r| r.replication == 1)
        .map(|r| r.mse)
        .collect();
    assert_ne!(rep0, rep1);
}

#[test]
fn records_respect_invariants() {
    for config in [small(example1(), 300, 2), small(example3(0.33), 300, 2)] {
        let result = run_experiment(&config).unwrap();
        let checkpoints = config.run.checkpoints.resolve(config.run.n_max);
        assert_eq!(result.records.len(), 2 * checkpoints.len());
        for rep in 0..2 {
            let rows: Vec<_> = result
                .records
                .iter()
                .filter(|r| r.replication == rep)
                .collect();
            assert!(rows.windows(2).all(|w| w[0].op_count <= w[1].op_count));
            assert!(rows.iter().all(|r| r.mse >= 0.0));
            assert_eq!(rows.iter().map(|r| r.n).collect::<Vec<_>>(), checkpoints);
        }
        let logistic = config.run.loss == Loss::Logistic;
        assert!(result
            .records
            .iter()
            .all(|r| r.regret.is_some() == logistic));
    }
}

#[test]
fn harness_matches_direct_estimator() {
    let config = small(example2(0.43), 300, 1);
    let result = run_experiment(&config).unwrap();
    let mut stream = DataStream::new(
        TargetFunction::SineSeries50,
        XDist::Uniform01,
        Noise::StdNormal,
        1,
        replication_seed(config.run.seed, 0),
    )
    .unwrap();
    let mut state =
        SieveState::new(SieveConfig::new(0.43, 3.0, 1.0, 3.0, BasisFamily::SineHalf)).unwrap();
    for _ in 0..300 {
        let (x, y) = stream.next_sample();
        state.update(x[0], y, Loss::Squared).unwrap();
    }
    let last = result.records.last().unwrap();
    let direct = mse_coefficient_space(
        state.avg_coefs(),
        TargetFunction::SineSeries50,
        BasisFamily::SineHalf,
    )
    .unwrap();
    assert_eq!(last.mse, direct);
    assert_eq!(last.op_count, state.op_count());
    assert_eq!(last.coef_count, state.avg_coefs().len());
}

#[test]
fn noiseless_run_improves_tenfold() {
    let mut config = small(example2(0.43), 10_000, 1);
    config.data.noise = Noise::None;
    let result = run_experiment(&config).unwrap();
    let first = result.records.first().unwrap().mse;
    let last = result.records.last().unwrap().mse;
    assert!(last * 10.0 <= first, "{first} -> {last}");
}

#[test]
fn explicit_checkpoints_feed_slope_fit() {
    let mut config = small(example2(0.43), 10_000, 2);
    config.run.checkpoints = Checkpoints::List(vec![100, 1000, 10_000]);
    let result = run_experiment(&config).unwrap();
    assert_eq!(result.records.len(), 6);
    let fit = fit_loglog_slope(&result.records, 100).unwrap();
    assert_eq!(fit.points, 3);
    assert!(fit.slope < 0.0);
}

#[test]
fn coefficient_space_request_falls_back() {
    let mut config = small(example1(), 100, 1);
    config.estimator.family = BasisFamily::CosineEigen;
    config.run.mse_method = MseMethod::CoefficientSpace;
    let result = run_experiment(&config).unwrap();
    assert_eq!(result.mse_method, MseMethod::MonteCarlo);
    assert_eq!(result.warnings.len(), 1);
    assert!(result.warnings[0].contains("falling back"));

    let mut config = small(example2(0.43), 100, 1);
    config.data.x_dist = XDist::Uniform2575;
    assert_eq!(
        run_experiment(&config).unwrap().mse_method,
        MseMethod::MonteCarlo
    );
}

#[test]
fn quadrature_agrees_with_monte_carlo() {
    let mut a = small(example1(), 2000, 1);
    a.run.mse_method = MseMethod::Quadrature;
    a.run.eval_points = 4000;
    let mut b = a.clone();
    b.run.mse_method = MseMethod::MonteCarlo;
    b.run.eval_points = 200_000;
    let qa = run_experiment(&a).unwrap().records.last().unwrap().mse;
    let mb = run_experiment(&b).unwrap().records.last().unwrap().mse;
    assert!((qa / mb - 1.0).abs() < 0.05, "{qa} vs {mb}");
}

#[test]
fn baselines_run_in_harness() {
    for kind in [
        EstimatorKind::KernelSgd,
        EstimatorKind::Projection,
        EstimatorKind::Krr,
    ] {
        let mut config = small(example2(0.43), 200, 1);
        config.estimator.kind = kind;
        config.estimator.ridge = 1e-3;
        let result = run_experiment(&config).unwrap();
        let rows = &result.records;
        assert!(
            rows.last().unwrap().mse < rows[0].mse.max(1e-12) * 10.0,
            "{kind}"
        );
        assert!(
            rows.windows(2).all(|w| w[0].op_count <= w[1].op_count),
            "{kind}"
        );
    }
    // projection reports the coefficient-space error of its own fit
    let mut config = small(example2(0.43), 200, 1);
    config.estimator.kind = EstimatorKind::Projection;
    assert_eq!(
        run_experiment(&config).unwrap().mse_method,
        MseMethod::CoefficientSpace
    );
}

#[test]
fn multivariate_estimators_run_in_harness() {
    let mut config = small(super::presets::appendix_b(2), 300, 1);
    config.run.gamma0_grid.clear();
    config.run.c_grid.clear();
    let tensor = run_experiment(&config).unwrap();
    assert!(tensor.selections.iter().all(Option::is_none));
    config.estimator.kind = EstimatorKind::SieveSgdAdditive;
    config.estimator.truncation = crate::estimator::TruncationRule::PowerLaw;
    config.estimator.intercept = true;
    config.estimator.centered = true;
    let additive = run_experiment(&config).unwrap();
    assert!(additive.records.last().unwrap().mse < additive.records[0].mse);
}

#[test]
fn oracle_sweep_picks_smallest_final_error() {
    let mut config = small(example2(0.43), 300, 2);
    config.run.gamma0_grid = vec![0.2, 1.0, 3.0];
    let swept = run_experiment(&config).unwrap();
    for rep in 0..2 {
        let choice = swept.selections[rep].unwrap();
        let best = config
            .run
            .gamma0_grid
            .iter()
            .map(|&g| {
                let mut single = config.clone();
                single.run.gamma0_grid.clear();
                single.estimator.gamma0 = g;
                let r = run_experiment(&single).unwrap();
                let last = r
                    .records
                    .iter()
                    .rfind(|r| r.replication == rep)
                    .unwrap()
                    .mse;
                (last, g)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .unwrap();
        assert_eq!(choice.gamma0, Some(best.1));
        let reported = swept
            .records
            .iter()
            .rfind(|r| r.replication == rep)
            .unwrap()
            .mse;
        assert_eq!(reported, best.0);
    }
}

#[test]
fn failures_carry_replication_and_step() {
    let mut config = small(example2(0.43), 50, 2);
    config.estimator.gamma0 = 1e300;
    config.data.noise = Noise::None;
    let result = run_replications(&config).unwrap();
    assert!(result.is_partial());
    assert_eq!(result.failures.len(), 2);
    match &result.failures[0] {
        SieveError::Replication {
            replication,
            step,
            source,
        } => {
            assert_eq!(*replication, 0);
            assert!(*step >= 1);
            assert!(matches!(**source, SieveError::NonFinite { .. }));
        }
        other => panic!("unexpected {other:?}"),
    }
    assert!(run_experiment(&config).is_err());
}

#[test]
fn validation_names_keys() {
    let key_of = |config: &ExperimentConfig| match config.validate() {
        Err(SieveError::InvalidConfig { key, .. }) => key,
        other => panic!("expected invalid config, got {other:?}"),
    };
    let mut c = example2(0.43);
    c.estimator.alpha = -1.0;
    assert_eq!(key_of(&c), "alpha");
    let mut c = example2(0.43);
    c.estimator.omega = 0.5;
    assert_eq!(key_of(&c), "omega");
    let mut c = example2(0.43);
    c.run.replications = 0;
    assert_eq!(key_of(&c), "replications");
    let mut c = example2(0.43);
    c.data.dim = 2;
    assert_eq!(key_of(&c), "dim");
    let mut c = example2(0.43);
    c.run.checkpoints = Checkpoints::List(vec![10, 5]);
    assert_eq!(key_of(&c), "checkpoints");
    let mut c = example2(0.43);
    c.run.ridge_grid = vec![1.0];
    assert_eq!(key_of(&c), "ridge_grid");
    let mut c = example2(0.43);
    c.estimator.kind = EstimatorKind::Krr;
    c.estimator.ridge = 0.0;
    assert_eq!(key_of(&c), "ridge");
    let mut c = example2(0.43);
    c.estimator.kind = EstimatorKind::Projection;
    c.run.loss = Loss::Logistic;
    assert_eq!(key_of(&c), "loss");
    for name in presets::PRESET_NAMES {
        presets::preset(name).unwrap().validate().unwrap();
        assert!(presets::describe(name).is_some());
    }
}

#[test]
fn outputs_round_trip() {
    let config = small(example3(0.33), 100, 2);
    let result = run_experiment(&config).unwrap();
    let dir = std::env::temp_dir().join(format!("sieve-core-out-{}", std::process::id()));
    let (csv_path, json_path) = write_outputs(&dir, &result).unwrap();
    let back = read_csv(&csv_path).unwrap();
    assert_eq!(back, result.records);
    let header = std::fs::read_to_string(&csv_path).unwrap();
    assert!(header.starts_with(
        "run_id,replication,n,mse,regret,op_count,coef_count,storage_bits,wall_time_s\n"
    ));
    let meta: Metadata = serde_json::from_reader(std::fs::File::open(&json_path).unwrap()).unwrap();
    assert_eq!(meta.config, config);
    assert_eq!(meta.replication_seeds, result.seeds);
    assert_eq!(meta.generator, GENERATOR);
    assert!(!meta.partial);
    std::fs::remove_dir_all(&dir).unwrap();
}
