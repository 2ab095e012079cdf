//! TOML experiment files.
//!
//! A file may name a `preset`; every key it sets then overrides the preset's
//! value. Without a preset the library defaults are the base.
//!
//! ```toml
//! preset = "example2"
//! run_id = "ex2_small"
//!
//! [estimator]
//! alpha = 0.15
//!
//! [run]
//! n_max = 1000
//! replications = 2
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use sieve_core::estimator::{FractionBits, Quantization};
use sieve_core::simulation::{
    presets, Checkpoints, EstimatorKind, ExperimentConfig, MseMethod, Noise, TargetFunction, XDist,
};
use sieve_core::{BasisFamily, Kernel, Loss, SieveError, TruncationRule};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("unknown preset {name:?} (known: {known})")]
    UnknownPreset { name: String, known: String },
    #[error(transparent)]
    Invalid(#[from] SieveError),
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    run_id: Option<String>,
    #[serde(default)]
    estimator: RawEstimator,
    #[serde(default)]
    data: RawData,
    #[serde(default)]
    run: RawRun,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawEstimator {
    #[serde(skip_serializing_if = "Option::is_none")]
    kind: Option<EstimatorKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<BasisFamily>,
    /// `power_law`, `power_log_squared` or `proportional` (with `c`).
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quantization: Option<RawQuantization>,
    #[serde(skip_serializing_if = "Option::is_none")]
    kernel: Option<Kernel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ridge: Option<f64>,
    #[serde(rename = "J", skip_serializing_if = "Option::is_none")]
    j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    intercept: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    centered: Option<bool>,
}

/// `quantization = true`, or a table with any of `log_factor`, `fixed_bits`, `header_bits`.
#[derive(Debug, Deserialize, Serialize)]
#[serde(untagged)]
enum RawQuantization {
    Enabled(bool),
    Settings(RawQuantizationSettings),
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawQuantizationSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    log_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    header_bits: Option<u32>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    #[serde(skip_serializing_if = "Option::is_none")]
    target: Option<TargetFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x_dist: Option<XDist>,
    /// Noise key; `gaussian` also needs `noise_sd`.
    #[serde(skip_serializing_if = "Option::is_none")]
    noise: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    noise_sd: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
}

#[derive(Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawRun {
    #[serde(skip_serializing_if = "Option::is_none")]
    n_max: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checkpoints_per_decade: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checkpoints: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    replications: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    loss: Option<Loss>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mse_method: Option<MseMethod>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eval_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma0_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    c_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ridge_grid: Option<Vec<f64>>,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn parse_noise(key: &str, sd: Option<f64>) -> Result<Noise, SieveError> {
    let noise = match key {
        "none" => Noise::None,
        "uniform_pm002" => Noise::UniformPm002,
        "uniform_pm02" => Noise::UniformPm02,
        "std_normal" => Noise::StdNormal,
        "bernoulli_label" => Noise::BernoulliLabel,
        "gaussian" => Noise::Gaussian {
            sd: sd.ok_or_else(|| {
                SieveError::invalid("noise_sd", "required when noise = \"gaussian\"")
            })?,
        },
        other => {
            return Err(SieveError::invalid(
                "noise",
                format!("unknown noise {other:?}"),
            ))
        }
    };
    if sd.is_some() && !matches!(noise, Noise::Gaussian { .. }) {
        return Err(SieveError::invalid(
            "noise_sd",
            "only used with noise = \"gaussian\"",
        ));
    }
    Ok(noise)
}

fn parse_truncation(
    rule: Option<&str>,
    c: Option<f64>,
    current: TruncationRule,
) -> Result<TruncationRule, SieveError> {
    let rule = match (rule, current) {
        (Some("power_law"), _) => TruncationRule::PowerLaw,
        (Some("power_log_squared"), _) => TruncationRule::PowerLogSquared,
        (Some("proportional"), TruncationRule::Proportional { c })
        | (None, TruncationRule::Proportional { c }) => TruncationRule::Proportional { c },
        (Some("proportional"), _) => TruncationRule::Proportional {
            c: c.ok_or_else(|| {
                SieveError::invalid("c", "required when truncation = \"proportional\"")
            })?,
        },
        (Some(other), _) => {
            return Err(SieveError::invalid(
                "truncation",
                format!("unknown rule {other:?}"),
            ))
        }
        (None, rule) => rule,
    };
    match (rule, c) {
        (TruncationRule::Proportional { .. }, Some(c)) => Ok(TruncationRule::Proportional { c }),
        (_, Some(_)) => Err(SieveError::invalid(
            "c",
            "only used with truncation = \"proportional\"",
        )),
        (rule, None) => Ok(rule),
    }
}

fn parse_quantization(
    raw: RawQuantization,
    current: Option<Quantization>,
) -> Result<Option<Quantization>, SieveError> {
    Ok(match raw {
        RawQuantization::Enabled(false) => None,
        RawQuantization::Enabled(true) => Some(current.unwrap_or_default()),
        RawQuantization::Settings(s) => {
            let mut q = current.unwrap_or_default();
            match (s.log_factor, s.fixed_bits) {
                (Some(_), Some(_)) => {
                    return Err(SieveError::invalid(
                        "quantization",
                        "set at most one of log_factor and fixed_bits",
                    ))
                }
                (Some(factor), None) => q.fraction_bits = FractionBits::LogScaled { factor },
                (None, Some(bits)) => q.fraction_bits = FractionBits::Fixed(bits),
                (None, None) => {}
            }
            set(&mut q.header_bits, s.header_bits);
            Some(q)
        }
    })
}

/// Parses and validates an experiment file.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let mut config = match &raw.preset {
        Some(name) => presets::preset(name).ok_or_else(|| ConfigError::UnknownPreset {
            name: name.clone(),
            known: presets::PRESET_NAMES.join(", "),
        })?,
        None => ExperimentConfig::default(),
    };
    set(&mut config.run_id, raw.run_id);

    let e = raw.estimator;
    let p = &mut config.estimator;
    set(&mut p.kind, e.kind);
    set(&mut p.alpha, e.alpha);
    set(&mut p.omega, e.omega);
    set(&mut p.gamma0, e.gamma0);
    set(&mut p.s, e.s);
    set(&mut p.family, e.family);
    p.truncation = parse_truncation(e.truncation.as_deref(), e.c, p.truncation)?;
    if let Some(q) = e.quantization {
        p.quantization = parse_quantization(q, p.quantization)?;
    }
    set(&mut p.kernel, e.kernel);
    set(&mut p.ridge, e.ridge);
    if e.j.is_some() {
        p.j = e.j;
    }
    set(&mut p.intercept, e.intercept);
    set(&mut p.centered, e.centered);

    let d = raw.data;
    let data = &mut config.data;
    set(&mut data.target, d.target);
    set(&mut data.x_dist, d.x_dist);
    match (d.noise.as_deref(), d.noise_sd) {
        (Some(key), sd) => data.noise = parse_noise(key, sd)?,
        (None, Some(sd)) => match data.noise {
            Noise::Gaussian { .. } => data.noise = Noise::Gaussian { sd },
            _ => {
                return Err(
                    SieveError::invalid("noise_sd", "only used with noise = \"gaussian\"").into(),
                )
            }
        },
        (None, None) => {}
    }
    set(&mut data.dim, d.dim);

    let r = raw.run;
    let run = &mut config.run;
    set(&mut run.n_max, r.n_max);
    match (r.checkpoints_per_decade, r.checkpoints) {
        (Some(_), Some(_)) => {
            return Err(SieveError::invalid(
                "checkpoints",
                "set either checkpoints or checkpoints_per_decade",
            )
            .into())
        }
        (Some(k), None) => run.checkpoints = Checkpoints::PerDecade(k),
        (None, Some(list)) => run.checkpoints = Checkpoints::List(list),
        (None, None) => {}
    }
    set(&mut run.replications, r.replications);
    set(&mut run.seed, r.seed);
    set(&mut run.loss, r.loss);
    set(&mut run.mse_method, r.mse_method);
    set(&mut run.eval_points, r.eval_points);
    set(&mut run.gamma0_grid, r.gamma0_grid);
    set(&mut run.c_grid, r.c_grid);
    set(&mut run.ridge_grid, r.ridge_grid);

    config.validate()?;
    Ok(config)
}

/// Writes every field of `config` explicitly, without a preset.
pub fn render(config: &ExperimentConfig) -> String {
    let p = &config.estimator;
    let (truncation, c) = match p.truncation {
        TruncationRule::PowerLaw => ("power_law", None),
        TruncationRule::PowerLogSquared => ("power_log_squared", None),
        TruncationRule::Proportional { c } => ("proportional", Some(c)),
    };
    let quantization = match p.quantization {
        None => RawQuantization::Enabled(false),
        Some(q) => {
            let (log_factor, fixed_bits) = match q.fraction_bits {
                FractionBits::LogScaled { factor } => (Some(factor), None),
                FractionBits::Fixed(bits) => (None, Some(bits)),
            };
            RawQuantization::Settings(RawQuantizationSettings {
                log_factor,
                fixed_bits,
                header_bits: Some(q.header_bits),
            })
        }
    };
    let (noise_sd, noise) = match config.data.noise {
        Noise::Gaussian { sd } => (Some(sd), "gaussian"),
        n => (None, n.key()),
    };
    let (checkpoints_per_decade, checkpoints) = match &config.run.checkpoints {
        Checkpoints::PerDecade(k) => (Some(*k), None),
        Checkpoints::List(list) => (None, Some(list.clone())),
    };
    let raw = RawConfig {
        preset: None,
        run_id: Some(config.run_id.clone()),
        estimator: RawEstimator {
            kind: Some(p.kind),
            alpha: Some(p.alpha),
            omega: Some(p.omega),
            gamma0: Some(p.gamma0),
            s: Some(p.s),
            family: Some(p.family),
            truncation: Some(truncation.to_string()),
            c,
            quantization: Some(quantization),
            kernel: Some(p.kernel),
            ridge: Some(p.ridge),
            j: p.j,
            intercept: Some(p.intercept),
            centered: Some(p.centered),
        },
        data: RawData {
            target: Some(config.data.target),
            x_dist: Some(config.data.x_dist),
            noise: Some(noise.to_string()),
            noise_sd,
            dim: Some(config.data.dim),
        },
        run: RawRun {
            n_max: Some(config.run.n_max),
            checkpoints_per_decade,
            checkpoints,
            replications: Some(config.run.replications),
            seed: Some(config.run.seed),
            loss: Some(config.run.loss),
            mse_method: Some(config.run.mse_method),
            eval_points: Some(config.run.eval_points),
            gamma0_grid: Some(config.run.gamma0_grid.clone()),
            c_grid: Some(config.run.c_grid.clone()),
            ridge_grid: Some(config.run.ridge_grid.clone()),
        },
    };
    toml::to_string(&raw).expect("experiment config is always representable in TOML")
}
