//! Named experiment bundles for the published simulation settings.

use super::{
    rng_for, Checkpoints, DataConfig, EstimatorKind, EstimatorParams, ExperimentConfig, Noise,
    RunConfig, TargetFunction, XDist,
};
use crate::baselines::Kernel;
use crate::basis::BasisFamily;
use crate::estimator::{Loss, TruncationRule};

pub const PRESET_NAMES: [&str; 4] = ["example1", "example2", "example3", "appendixB"];

pub fn preset(name: &str) -> Option<ExperimentConfig> {
    match name {
        "example1" => Some(example1()),
        "example2" => Some(example2(0.43)),
        "example3" => Some(example3(0.33)),
        "appendixB" => Some(appendix_b(2)),
        _ => None,
    }
}

/// One-line summary of the settings behind a preset.
pub fn describe(name: &str) -> Option<&'static str> {
    Some(match name {
        "example1" => {
            "f = B4(x); s = 2; J_n = n^0.21; t_j = j^-1.02 (omega 0.51); trig pairs cos/sin(2 pi ceil(j/2) x); \
             kernel -B4({s-t})/24; noise Unif[-0.02, 0.02]; gamma0 = 3"
        }
        "example2" => {
            "f = 4 sqrt2 sum_{j<=50} (-1)^(j+1) j^-4 sin((2j-1) pi x/2); s = 3; J_n = n^0.43 (also 0.10, 0.15); \
             t_j = j^-6; basis sqrt2 sin((2j-1) pi x/2); kernel min(s,t); noise N(0,1); gamma0 = 1"
        }
        "example3" => {
            "logistic loss, Y = 2 Ber(g(X)) - 1 with logit g = 5(1 - 2|x - 0.5|); s = 1; J_n = n^0.33 (also 0.10, 0.50); \
             t_j = j^-2; basis sqrt2 sin((2j-1) pi x/2); gamma0 = 6"
        }
        "appendixB" => {
            "p = 2, x_1 = u_1, x_k = (u_k - u_(k-1) + 1)/2; f = sum_{k<=l} tent(x_k) tent(x_l); Gaussian noise at SNR 3; \
             tensor cosine basis in hyperbolic-cross order, J_i = ceil(c p i^(1/5)); omega 0.51; s = 2; \
             sweep gamma0 in {0.1, 0.5}, c in {4, 8}; kernel prod(1 + min)"
        }
        _ => return None,
    })
}

fn base(run_id: &str, estimator: EstimatorParams, data: DataConfig) -> ExperimentConfig {
    ExperimentConfig {
        run_id: run_id.to_string(),
        estimator,
        data,
        run: RunConfig {
            n_max: 10_000,
            checkpoints: Checkpoints::PerDecade(10),
            replications: 20,
            seed: 2021,
            ..RunConfig::default()
        },
    }
}

pub fn example1() -> ExperimentConfig {
    base(
        "example1",
        EstimatorParams {
            kind: EstimatorKind::SieveSgd,
            alpha: 0.21,
            omega: 0.51,
            gamma0: 3.0,
            s: 2.0,
            family: BasisFamily::TrigPairs,
            kernel: Kernel::Bernoulli4,
            ..EstimatorParams::default()
        },
        DataConfig {
            target: TargetFunction::Bernoulli4Poly,
            x_dist: XDist::Uniform01,
            noise: Noise::UniformPm002,
            dim: 1,
        },
    )
}

pub fn example2(alpha: f64) -> ExperimentConfig {
    base(
        "example2",
        EstimatorParams {
            kind: EstimatorKind::SieveSgd,
            alpha,
            omega: 3.0,
            gamma0: 1.0,
            s: 3.0,
            family: BasisFamily::SineHalf,
            kernel: Kernel::BrownianMin,
            ..EstimatorParams::default()
        },
        DataConfig {
            target: TargetFunction::SineSeries50,
            x_dist: XDist::Uniform01,
            noise: Noise::StdNormal,
            dim: 1,
        },
    )
}

/// Averaged kernel SGD on the first example, with step scale
/// `1 / (4 sup K(x, x))`.
pub fn example1_kernel_sgd() -> ExperimentConfig {
    let mut config = example1();
    config.run_id = "example1_kernel_sgd".into();
    config.estimator.kind = EstimatorKind::KernelSgd;
    config.estimator.gamma0 = 0.25 / config.estimator.kernel.max_diagonal(1);
    config
}

/// The component rates are not published for this example; `omega = 1`
/// matches `t_j = j^(-2s)` for `s = 1`.
pub fn example3(alpha: f64) -> ExperimentConfig {
    let mut config = base(
        "example3",
        EstimatorParams {
            kind: EstimatorKind::SieveSgd,
            alpha,
            omega: 1.0,
            gamma0: 6.0,
            s: 1.0,
            family: BasisFamily::SineHalf,
            kernel: Kernel::BrownianMin,
            ..EstimatorParams::default()
        },
        DataConfig {
            target: TargetFunction::LogisticTent,
            x_dist: XDist::Uniform01,
            noise: Noise::BernoulliLabel,
            dim: 1,
        },
    );
    config.run.loss = Loss::Logistic;
    config
}

pub fn appendix_b(dim: usize) -> ExperimentConfig {
    let sd = noise_sd_for_snr(
        TargetFunction::TentInteraction,
        XDist::DependentChain,
        dim,
        3.0,
    );
    let mut config = base(
        "appendixB",
        EstimatorParams {
            kind: EstimatorKind::SieveSgdTensor,
            alpha: 0.2,
            omega: 0.51,
            gamma0: 0.5,
            s: 2.0,
            family: BasisFamily::CosineEigen,
            truncation: TruncationRule::Proportional { c: 4.0 },
            kernel: Kernel::SobolevTensor,
            ..EstimatorParams::default()
        },
        DataConfig {
            target: TargetFunction::TentInteraction,
            x_dist: XDist::DependentChain,
            noise: Noise::Gaussian { sd },
            dim,
        },
    );
    config.run.eval_points = 10_000;
    config.run.gamma0_grid = vec![0.1, 0.5];
    config.run.c_grid = vec![4.0, 8.0];
    config
}

/// Noise standard deviation giving `Var f(X) / sd^2 = snr`, with the signal
/// variance estimated from 200 000 fixed draws.
pub fn noise_sd_for_snr(target: TargetFunction, x_dist: XDist, dim: usize, snr: f64) -> f64 {
    const DRAWS: usize = 200_000;
    let mut rng = rng_for(0x5eed, 7);
    let mut x = vec![0.0; dim];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..DRAWS {
        x_dist.sample_into(&mut rng, &mut x);
        let f = target.eval_unchecked(&x);
        sum += f;
        sum_sq += f * f;
    }
    let mean = sum / DRAWS as f64;
    let var = sum_sq / DRAWS as f64 - mean * mean;
    (var / snr).sqrt()
}
