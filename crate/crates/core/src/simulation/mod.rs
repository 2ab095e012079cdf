//! Synthetic data streams, error metrics, rate-slope fits and the replicated
//! experiment runner.
//!
//! All randomness comes from [`ChaCha8Rng`]. Replication `r` of an experiment
//! with base seed `s` uses seed `s ^ splitmix64(r)`; within a replication the
//! training stream and the evaluation points use separate ChaCha streams.

mod experiment;
mod metrics;
mod output;
pub mod presets;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::baselines::bernoulli4;
use crate::basis::BasisFamily;
use crate::error::{check_unit, Result, SieveError};

pub use experiment::{
    in_pool, run_experiment, run_experiment_with_threads, run_replications, Checkpoints,
    DataConfig, EstimatorKind, EstimatorParams, ExperimentConfig, ExperimentResult, GridChoice,
    MseMethod, RunConfig, RunRecord,
};
pub use metrics::{
    aggregate, conditional_logistic_excess, fit_loglog_points, fit_loglog_slope, logistic_regret,
    mse_coefficient_space, mse_monte_carlo, mse_monte_carlo_with_se, AggregateRow, SlopeFit,
};
pub use output::{read_csv, read_records, write_csv, write_outputs, Metadata, GENERATOR};

/// Number of terms in [`TargetFunction::SineSeries50`].
pub const SINE_SERIES_TERMS: usize = 50;

/// SplitMix64 finalizer, used to derive replication seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replication_seed(seed: u64, replication: usize) -> u64 {
    seed ^ splitmix64(replication as u64)
}

/// Generator for ChaCha stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) const TRAIN_STREAM: u64 = 0;
pub(crate) const EVAL_STREAM: u64 = 1;

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn tent(x: f64) -> f64 {
    0.5 - (x - 0.5).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetFunction {
    /// `x^4 - 2x^3 + x^2 - 1/30`.
    Bernoulli4Poly,
    /// `4 sqrt(2) sum_{j<=50} (-1)^(j+1) j^-4 sin((2j-1) pi x / 2)`.
    SineSeries50,
    /// `5 (1 - 2|x - 0.5|)`, the log-odds of the label model.
    LogisticTent,
    /// `sum_{k<=l} (0.5 - |x_k - 0.5|)(0.5 - |x_l - 0.5|)`, any dimension.
    TentInteraction,
}

impl TargetFunction {
    pub const ALL: [TargetFunction; 4] = [
        TargetFunction::Bernoulli4Poly,
        TargetFunction::SineSeries50,
        TargetFunction::LogisticTent,
        TargetFunction::TentInteraction,
    ];

    pub fn key(self) -> &'static str {
        match self {
            TargetFunction::Bernoulli4Poly => "bernoulli4_poly",
            TargetFunction::SineSeries50 => "sine_series50",
            TargetFunction::LogisticTent => "logistic_tent",
            TargetFunction::TentInteraction => "tent_interaction",
        }
    }

    pub fn accepts_dim(self, dim: usize) -> bool {
        match self {
            TargetFunction::TentInteraction => dim >= 1,
            _ => dim == 1,
        }
    }

    /// `theta_j = 4 (-1)^(j+1) j^-4` of [`TargetFunction::SineSeries50`] in the
    /// half-sine basis, zero past the last term.
    pub fn sine_half_coefficient(j: usize) -> f64 {
        if j == 0 || j > SINE_SERIES_TERMS {
            return 0.0;
        }
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        4.0 * sign / (j as f64).powi(4)
    }

    /// The full coefficient vector in `family`, or an error when none is known.
    pub fn known_coefficients(self, family: BasisFamily) -> Result<Vec<f64>> {
        match (self, family) {
            (TargetFunction::SineSeries50, BasisFamily::SineHalf) => Ok((1..=SINE_SERIES_TERMS)
                .map(TargetFunction::sine_half_coefficient)
                .collect()),
            _ => Err(SieveError::NoKnownExpansion {
                family: family.key(),
            }),
        }
    }

    pub fn eval(self, x: &[f64]) -> Result<f64> {
        if !self.accepts_dim(x.len()) {
            return Err(SieveError::DimensionMismatch {
                expected: 1,
                found: x.len(),
            });
        }
        x.iter().try_for_each(|&v| check_unit(v))?;
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(self, x: &[f64]) -> f64 {
        match self {
            TargetFunction::Bernoulli4Poly => bernoulli4(x[0]),
            TargetFunction::SineSeries50 => {
                let family = BasisFamily::SineHalf;
                (1..=SINE_SERIES_TERMS).fold(0.0, |acc, j| {
                    acc + TargetFunction::sine_half_coefficient(j) * family.eval_unchecked(j, x[0])
                })
            }
            TargetFunction::LogisticTent => 5.0 * (1.0 - 2.0 * (x[0] - 0.5).abs()),
            TargetFunction::TentInteraction => {
                let t: Vec<f64> = x.iter().map(|&v| tent(v)).collect();
                let mut total = 0.0;
                for k in 0..t.len() {
                    for l in k..t.len() {
                        total += t[k] * t[l];
                    }
                }
                total
            }
        }
    }
}

pub fn eval_target(t: TargetFunction, x: &[f64]) -> Result<f64> {
    t.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XDist {
    /// Independent `Unif[0, 1]` coordinates.
    Uniform01,
    /// Independent `Unif[0.25, 0.75]` coordinates.
    Uniform2575,
    /// `x_1 = u_1`, `x_k = (u_k - u_{k-1} + 1) / 2` with `u_k` iid uniform.
    DependentChain,
}

impl XDist {
    pub const ALL: [XDist; 3] = [XDist::Uniform01, XDist::Uniform2575, XDist::DependentChain];

    pub fn key(self) -> &'static str {
        match self {
            XDist::Uniform01 => "uniform01",
            XDist::Uniform2575 => "uniform2575",
            XDist::DependentChain => "dependent_chain",
        }
    }

    pub fn sample_into<R: Rng + ?Sized>(self, rng: &mut R, out: &mut [f64]) {
        match self {
            XDist::Uniform01 => out.iter_mut().for_each(|v| *v = rng.gen::<f64>()),
            XDist::Uniform2575 => out.iter_mut().for_each(|v| *v = rng.gen_range(0.25..0.75)),
            XDist::DependentChain => {
                let mut prev = 0.0;
                for (k, v) in out.iter_mut().enumerate() {
                    let u: f64 = rng.gen();
                    *v = if k == 0 { u } else { (u - prev + 1.0) / 2.0 };
                    prev = u;
                }
            }
        }
    }

    /// Interval of a one-dimensional uniform law, used for midpoint quadrature.
    pub fn uniform_support(self) -> Option<(f64, f64)> {
        match self {
            XDist::Uniform01 => Some((0.0, 1.0)),
            XDist::Uniform2575 => Some((0.25, 0.75)),
            XDist::DependentChain => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Noise {
    None,
    /// `Unif[-0.02, 0.02]`.
    UniformPm002,
    /// `Unif[-0.2, 0.2]`.
    UniformPm02,
    StdNormal,
    Gaussian {
        sd: f64,
    },
    /// `y = +1` with probability `sigmoid(f(x))`, else `-1`.
    BernoulliLabel,
}

impl Noise {
    pub fn key(self) -> &'static str {
        match self {
            Noise::None => "none",
            Noise::UniformPm002 => "uniform_pm002",
            Noise::UniformPm02 => "uniform_pm02",
            Noise::StdNormal => "std_normal",
            Noise::Gaussian { .. } => "gaussian",
            Noise::BernoulliLabel => "bernoulli_label",
        }
    }

    pub fn validate(self) -> Result<()> {
        match self {
            Noise::Gaussian { sd } if !(sd >= 0.0 && sd.is_finite()) => Err(SieveError::invalid(
                "noise_sd",
                format!("must be finite and >= 0, got {sd}"),
            )),
            _ => Ok(()),
        }
    }

    /// Response for signal value `f` at one draw.
    pub fn respond<R: Rng + ?Sized>(self, rng: &mut R, f: f64) -> f64 {
        match self {
            Noise::None => f,
            Noise::UniformPm002 => f + rng.gen_range(-0.02..0.02),
            Noise::UniformPm02 => f + rng.gen_range(-0.2..0.2),
            Noise::StdNormal => f + rng.sample::<f64, _>(StandardNormal),
            Noise::Gaussian { sd } => f + sd * rng.sample::<f64, _>(StandardNormal),
            Noise::BernoulliLabel => {
                if rng.gen::<f64>() < sigmoid(f) {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

/// Probability of the label `+1` under [`Noise::BernoulliLabel`].
pub fn label_probability(f: f64) -> f64 {
    sigmoid(f)
}

macro_rules! key_from_str {
    ($ty:ty, $name:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.key())
            }
        }

        impl FromStr for $ty {
            type Err = SieveError;

            fn from_str(s: &str) -> Result<Self> {
                <$ty>::ALL
                    .into_iter()
                    .find(|v| v.key() == s)
                    .ok_or_else(|| SieveError::invalid($name, format!("unknown value {s:?}")))
            }
        }
    };
}

key_from_str!(TargetFunction, "target");
key_from_str!(XDist, "x_dist");

/// Reproducible stream of `(x, y)` pairs.
#[derive(Debug, Clone)]
pub struct DataStream {
    target: TargetFunction,
    x_dist: XDist,
    noise: Noise,
    dim: usize,
    rng: ChaCha8Rng,
}

impl DataStream {
    pub fn new(
        target: TargetFunction,
        x_dist: XDist,
        noise: Noise,
        dim: usize,
        seed: u64,
    ) -> Result<Self> {
        if !target.accepts_dim(dim) {
            return Err(SieveError::invalid(
                "dim",
                format!("target {} does not accept dimension {dim}", target.key()),
            ));
        }
        noise.validate()?;
        Ok(DataStream {
            target,
            x_dist,
            noise,
            dim,
            rng: rng_for(seed, TRAIN_STREAM),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Draws the next feature vector into `x` and returns its response.
    pub fn next_into(&mut self, x: &mut [f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        self.x_dist.sample_into(&mut self.rng, x);
        let f = self.target.eval_unchecked(x);
        self.noise.respond(&mut self.rng, f)
    }

    pub fn next_sample(&mut self) -> (Vec<f64>, f64) {
        let mut x = vec![0.0; self.dim];
        let y = self.next_into(&mut x);
        (x, y)
    }
}

impl Iterator for DataStream {
    type Item = (Vec<f64>, f64);

    fn next(&mut self) -> Option<Self::Item> {
        Some(self.next_sample())
    }
}

#[cfg(test)]
mod tests;
