use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{coefficient_distance, EvalSet};
use super::{replication_seed, DataStream, Noise, TargetFunction, XDist};
use crate::baselines::{projection_fit, Kernel, KernelSgdState, KrrProblem};
use crate::basis::BasisFamily;
use crate::error::{Result, SieveError};
use crate::estimator::{
    validate_common, AdditiveComponent, AdditiveConfig, AdditiveSieveState, Loss, OnlineRegressor,
    Quantization, SieveConfig, SieveState, TensorSieveState, TruncationRule,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    SieveSgd,
    SieveSgdTensor,
    SieveSgdAdditive,
    KernelSgd,
    Projection,
    Krr,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 6] = [
        EstimatorKind::SieveSgd,
        EstimatorKind::SieveSgdTensor,
        EstimatorKind::SieveSgdAdditive,
        EstimatorKind::KernelSgd,
        EstimatorKind::Projection,
        EstimatorKind::Krr,
    ];

    pub fn key(self) -> &'static str {
        match self {
            EstimatorKind::SieveSgd => "sieve_sgd",
            EstimatorKind::SieveSgdTensor => "sieve_sgd_tensor",
            EstimatorKind::SieveSgdAdditive => "sieve_sgd_additive",
            EstimatorKind::KernelSgd => "kernel_sgd",
            EstimatorKind::Projection => "projection",
            EstimatorKind::Krr => "krr",
        }
    }

    fn is_sieve(self) -> bool {
        matches!(
            self,
            EstimatorKind::SieveSgd
                | EstimatorKind::SieveSgdTensor
                | EstimatorKind::SieveSgdAdditive
        )
    }

    fn is_batch(self) -> bool {
        matches!(self, EstimatorKind::Projection | EstimatorKind::Krr)
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for EstimatorKind {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.key() == s)
            .ok_or_else(|| SieveError::invalid("kind", format!("unknown estimator {s:?}")))
    }
}

/// Estimator hyperparameters. Each kind reads the fields it needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorParams {
    pub kind: EstimatorKind,
    pub alpha: f64,
    pub omega: f64,
    pub gamma0: f64,
    pub s: f64,
    pub family: BasisFamily,
    pub truncation: TruncationRule,
    pub quantization: Option<Quantization>,
    pub kernel: Kernel,
    pub ridge: f64,
    /// Fixed number of basis functions for `projection`; `floor(n^alpha)` when unset.
    pub j: Option<usize>,
    /// Additive model: fit a free intercept.
    pub intercept: bool,
    /// Additive model: drop the constant cosine function from every coordinate.
    pub centered: bool,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        EstimatorParams {
            kind: EstimatorKind::SieveSgd,
            alpha: 0.25,
            omega: 1.0,
            gamma0: 1.0,
            s: 2.0,
            family: BasisFamily::CosineEigen,
            truncation: TruncationRule::PowerLaw,
            quantization: None,
            kernel: Kernel::BrownianMin,
            ridge: 1e-3,
            j: None,
            intercept: false,
            centered: false,
        }
    }
}

impl EstimatorParams {
    fn sieve_config(&self) -> SieveConfig {
        SieveConfig::new(self.alpha, self.omega, self.gamma0, self.s, self.family)
            .with_truncation(self.truncation)
            .with_quantization(self.quantization)
    }

    fn additive_config(&self, dim: usize) -> AdditiveConfig {
        let component = AdditiveComponent {
            truncation: self.truncation,
            ..AdditiveComponent::new(self.family, self.omega, self.alpha).centered(self.centered)
        };
        AdditiveConfig {
            gamma0: self.gamma0,
            s: self.s,
            intercept: self.intercept,
            components: vec![component; dim],
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        validate_common(self.alpha, self.omega, self.gamma0, self.s)?;
        if let TruncationRule::Proportional { c } = self.truncation {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SieveError::invalid("c", format!("must be > 0, got {c}")));
            }
        }
        if self.quantization.is_some() && self.kind != EstimatorKind::SieveSgd {
            return Err(SieveError::invalid(
                "quantization",
                format!("only supported for sieve_sgd, not {}", self.kind),
            ));
        }
        match self.kind {
            EstimatorKind::SieveSgd | EstimatorKind::Projection if dim != 1 => {
                return Err(SieveError::invalid(
                    "dim",
                    format!("{} needs dim = 1, got {dim}", self.kind),
                ));
            }
            EstimatorKind::KernelSgd | EstimatorKind::Krr
                if self.kernel != Kernel::SobolevTensor && dim != 1 =>
            {
                return Err(SieveError::invalid(
                    "kernel",
                    format!("{} only accepts dim = 1, got {dim}", self.kernel),
                ));
            }
            EstimatorKind::Krr if !(self.ridge > 0.0 && self.ridge.is_finite()) => {
                return Err(SieveError::invalid(
                    "ridge",
                    format!("must be > 0, got {}", self.ridge),
                ));
            }
            EstimatorKind::Projection if self.j == Some(0) => {
                return Err(SieveError::invalid("J", "must be at least 1"));
            }
            EstimatorKind::SieveSgdAdditive => self.additive_config(dim).validate()?,
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub target: TargetFunction,
    pub x_dist: XDist,
    pub noise: Noise,
    pub dim: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            target: TargetFunction::SineSeries50,
            x_dist: XDist::Uniform01,
            noise: Noise::StdNormal,
            dim: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Checkpoints {
    /// `round(10^(k / per_decade))` for `k = 0, 1, ...`, plus `n_max`.
    PerDecade(u32),
    List(Vec<u64>),
}

impl Checkpoints {
    pub fn resolve(&self, n_max: u64) -> Vec<u64> {
        let mut out: Vec<u64> = match self {
            Checkpoints::PerDecade(k) => (0..)
                .map(|i| 10f64.powf(i as f64 / *k as f64).round() as u64)
                .take_while(|&n| n <= n_max)
                .chain(std::iter::once(n_max))
                .collect(),
            Checkpoints::List(list) => list.clone(),
        };
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MseMethod {
    /// Coefficient space when available, otherwise Monte Carlo.
    Auto,
    CoefficientSpace,
    MonteCarlo,
    /// Midpoint rule over the support of a one-dimensional uniform design.
    Quadrature,
}

impl MseMethod {
    pub const ALL: [MseMethod; 4] = [
        MseMethod::Auto,
        MseMethod::CoefficientSpace,
        MseMethod::MonteCarlo,
        MseMethod::Quadrature,
    ];

    pub fn key(self) -> &'static str {
        match self {
            MseMethod::Auto => "auto",
            MseMethod::CoefficientSpace => "coefficient_space",
            MseMethod::MonteCarlo => "monte_carlo",
            MseMethod::Quadrature => "quadrature",
        }
    }
}

impl FromStr for MseMethod {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        MseMethod::ALL
            .into_iter()
            .find(|k| k.key() == s)
            .ok_or_else(|| SieveError::invalid("mse_method", format!("unknown method {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n_max: u64,
    pub checkpoints: Checkpoints,
    pub replications: usize,
    pub seed: u64,
    pub loss: Loss,
    pub mse_method: MseMethod,
    /// Monte Carlo sample size or quadrature nodes.
    pub eval_points: usize,
    /// Oracle sweeps: every combination is run on the same data and the one
    /// with the smallest final MSE is reported, per replication.
    pub gamma0_grid: Vec<f64>,
    pub c_grid: Vec<f64>,
    pub ridge_grid: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_max: 10_000,
            checkpoints: Checkpoints::PerDecade(10),
            replications: 20,
            seed: 2021,
            loss: Loss::Squared,
            mse_method: MseMethod::Auto,
            eval_points: 100_000,
            gamma0_grid: Vec::new(),
            c_grid: Vec::new(),
            ridge_grid: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run_id: String,
    pub estimator: EstimatorParams,
    pub data: DataConfig,
    pub run: RunConfig,
}

fn check_grid(key: &str, grid: &[f64], allowed: bool, kind: EstimatorKind) -> Result<()> {
    if !grid.is_empty() && !allowed {
        return Err(SieveError::invalid(
            key,
            format!("not used by estimator {kind}"),
        ));
    }
    match grid.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        Some(v) => Err(SieveError::invalid(
            key,
            format!("entries must be > 0, got {v}"),
        )),
        None => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let kind = self.estimator.kind;
        let data = &self.data;
        let run = &self.run;
        if data.dim == 0 {
            return Err(SieveError::invalid("dim", "must be at least 1"));
        }
        if !data.target.accepts_dim(data.dim) {
            return Err(SieveError::invalid(
                "dim",
                format!(
                    "target {} does not accept dimension {}",
                    data.target, data.dim
                ),
            ));
        }
        data.noise.validate()?;
        self.estimator.validate(data.dim)?;

        if run.n_max == 0 {
            return Err(SieveError::invalid("n_max", "must be at least 1"));
        }
        if run.replications == 0 {
            return Err(SieveError::invalid("replications", "must be at least 1"));
        }
        if run.eval_points == 0 {
            return Err(SieveError::invalid("eval_points", "must be at least 1"));
        }
        match &run.checkpoints {
            Checkpoints::PerDecade(0) => {
                return Err(SieveError::invalid(
                    "checkpoints_per_decade",
                    "must be at least 1",
                ));
            }
            Checkpoints::List(list) => {
                if list.is_empty() {
                    return Err(SieveError::invalid("checkpoints", "must not be empty"));
                }
                if list.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(SieveError::invalid(
                        "checkpoints",
                        "must be strictly increasing",
                    ));
                }
                if list[0] == 0 || *list.last().unwrap() > run.n_max {
                    return Err(SieveError::invalid(
                        "checkpoints",
                        format!("must lie in [1, n_max = {}]", run.n_max),
                    ));
                }
            }
            _ => {}
        }
        if kind.is_batch() && run.loss != Loss::Squared {
            return Err(SieveError::invalid(
                "loss",
                format!("{kind} only fits squared loss"),
            ));
        }
        check_grid(
            "gamma0_grid",
            &run.gamma0_grid,
            kind.is_sieve() || kind == EstimatorKind::KernelSgd,
            kind,
        )?;
        check_grid("c_grid", &run.c_grid, kind.is_sieve(), kind)?;
        check_grid(
            "ridge_grid",
            &run.ridge_grid,
            kind == EstimatorKind::Krr,
            kind,
        )?;
        Ok(())
    }

    /// The regret column is filled for logistic loss on labelled data.
    fn reports_regret(&self) -> bool {
        self.run.loss == Loss::Logistic && self.data.noise == Noise::BernoulliLabel
    }

    fn grid(&self) -> Vec<GridChoice> {
        fn axis(grid: &[f64]) -> Vec<Option<f64>> {
            if grid.is_empty() {
                vec![None]
            } else {
                grid.iter().copied().map(Some).collect()
            }
        }
        let mut out = Vec::new();
        for &gamma0 in &axis(&self.run.gamma0_grid) {
            for &c in &axis(&self.run.c_grid) {
                for &ridge in &axis(&self.run.ridge_grid) {
                    out.push(GridChoice { gamma0, c, ridge });
                }
            }
        }
        out
    }
}

/// One point of an oracle sweep; `None` keeps the configured value.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GridChoice {
    pub gamma0: Option<f64>,
    pub c: Option<f64>,
    pub ridge: Option<f64>,
}

impl GridChoice {
    fn is_empty(&self) -> bool {
        self.gamma0.is_none() && self.c.is_none() && self.ridge.is_none()
    }

    fn apply(&self, params: &EstimatorParams) -> EstimatorParams {
        let mut p = params.clone();
        if let Some(g) = self.gamma0 {
            p.gamma0 = g;
        }
        if let Some(c) = self.c {
            p.truncation = TruncationRule::Proportional { c };
        }
        if let Some(r) = self.ridge {
            p.ridge = r;
        }
        p
    }
}

/// One checkpoint of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: String,
    pub replication: usize,
    pub n: u64,
    pub mse: f64,
    pub regret: Option<f64>,
    pub op_count: u64,
    pub coef_count: usize,
    pub storage_bits: Option<u64>,
    pub wall_time_s: f64,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Ordered by replication, then `n`.
    pub records: Vec<RunRecord>,
    pub seeds: Vec<u64>,
    /// Error metric actually used after any fallback.
    pub mse_method: MseMethod,
    pub warnings: Vec<String>,
    /// Selected sweep point per replication, when a sweep was configured.
    pub selections: Vec<Option<GridChoice>>,
    /// Replications that failed; their records are absent.
    pub failures: Vec<SieveError>,
}

impl ExperimentResult {
    pub fn is_partial(&self) -> bool {
        !self.failures.is_empty()
    }
}

enum Evaluator {
    Coefficients(Vec<f64>),
    Points(EvalSet),
}

fn resolve_method(config: &ExperimentConfig, warnings: &mut Vec<String>) -> MseMethod {
    let data = &config.data;
    let p = &config.estimator;
    let coefficient_ok = matches!(p.kind, EstimatorKind::SieveSgd | EstimatorKind::Projection)
        && data.x_dist == XDist::Uniform01
        && data.target.known_coefficients(p.family).is_ok();
    let mut fallback = |reason: String| {
        let msg = format!(
            "{reason}; falling back to monte_carlo with {} points",
            config.run.eval_points
        );
        warn!("{msg}");
        warnings.push(msg);
        MseMethod::MonteCarlo
    };
    match config.run.mse_method {
        MseMethod::Auto if coefficient_ok => MseMethod::CoefficientSpace,
        MseMethod::Auto => MseMethod::MonteCarlo,
        MseMethod::CoefficientSpace if !coefficient_ok => fallback(format!(
            "coefficient_space MSE unavailable for target {} with {} family {} under {}",
            data.target, p.kind, p.family, data.x_dist
        )),
        MseMethod::Quadrature if data.dim != 1 || data.x_dist.uniform_support().is_none() => {
            fallback(format!(
                "quadrature MSE needs a one-dimensional uniform design, got {}",
                data.x_dist
            ))
        }
        m => m,
    }
}

enum Model {
    Online(Box<dyn OnlineRegressor>),
    Projection(EstimatorParams),
    Krr(EstimatorParams),
}

fn build_model(params: &EstimatorParams, dim: usize) -> Result<Model> {
    Ok(match params.kind {
        EstimatorKind::SieveSgd => Model::Online(Box::new(SieveState::new(params.sieve_config())?)),
        EstimatorKind::SieveSgdTensor => {
            Model::Online(Box::new(TensorSieveState::new(params.sieve_config(), dim)?))
        }
        EstimatorKind::SieveSgdAdditive => Model::Online(Box::new(AdditiveSieveState::new(
            params.additive_config(dim),
        )?)),
        EstimatorKind::KernelSgd => Model::Online(Box::new(KernelSgdState::new(
            params.kernel,
            dim,
            params.gamma0,
            params.s,
        )?)),
        EstimatorKind::Projection => Model::Projection(params.clone()),
        EstimatorKind::Krr => Model::Krr(params.clone()),
    })
}

struct Measured {
    mse: f64,
    regret: Option<f64>,
}

fn measure<P: Fn(&[f64]) -> Result<f64>>(
    predict: P,
    coefficients: Option<&[f64]>,
    evaluator: &Evaluator,
    regret_points: Option<&EvalSet>,
) -> Result<Measured> {
    let mse = match evaluator {
        Evaluator::Coefficients(theta) => {
            let coefs = coefficients
                .ok_or_else(|| SieveError::invalid("mse_method", "estimator has no expansion"))?;
            coefficient_distance(coefs, theta)
        }
        Evaluator::Points(points) => points.mse(&predict)?,
    };
    let regret = regret_points
        .map(|p| p.logistic_regret(&predict))
        .transpose()?;
    Ok(Measured { mse, regret })
}

fn with_context(replication: usize, step: u64) -> impl FnOnce(SieveError) -> SieveError {
    move |e| SieveError::Replication {
        replication,
        step,
        source: Box::new(e),
    }
}

fn run_single(
    config: &ExperimentConfig,
    params: &EstimatorParams,
    replication: usize,
    seed: u64,
    checkpoints: &[u64],
    method: MseMethod,
) -> Result<Vec<RunRecord>> {
    let data = &config.data;
    let run = &config.run;
    let dim = data.dim;
    let mut stream = DataStream::new(data.target, data.x_dist, data.noise, dim, seed)?;

    let points = || match (method, data.x_dist.uniform_support()) {
        (MseMethod::Quadrature, Some(support)) => {
            EvalSet::midpoint(data.target, support, run.eval_points)
        }
        _ => EvalSet::monte_carlo(data.target, data.x_dist, dim, run.eval_points, seed),
    };
    let evaluator = match method {
        MseMethod::CoefficientSpace => {
            Evaluator::Coefficients(data.target.known_coefficients(params.family)?)
        }
        _ => Evaluator::Points(points()),
    };
    let regret_points = match (&evaluator, config.reports_regret()) {
        (_, false) => None,
        (Evaluator::Points(p), true) => Some(p.clone()),
        (Evaluator::Coefficients(_), true) => Some(points()),
    };

    let mut model = build_model(params, dim)?;
    let mut records = Vec::with_capacity(checkpoints.len());
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut x = vec![0.0; dim];
    let mut elapsed = 0.0;
    let mut next = checkpoints.iter().copied().peekable();
    let loss = run.loss;

    for i in 1..=run.n_max {
        let ctx = with_context(replication, i);
        let y = stream.next_into(&mut x);
        match &mut model {
            Model::Online(m) => {
                let start = Instant::now();
                m.observe(&x, y, loss).map_err(ctx)?;
                elapsed += start.elapsed().as_secs_f64();
            }
            Model::Projection(_) | Model::Krr(_) => {
                xs.extend_from_slice(&x);
                ys.push(y);
            }
        }
        if next.peek() != Some(&i) {
            continue;
        }
        next.next();
        let ctx = with_context(replication, i);

        let (m, op_count, coef_count, storage_bits, fit_time) = match &model {
            Model::Online(m) => {
                let m = m.as_ref();
                let measured = measure(
                    |x| m.predict(x),
                    m.expansion().map(|e| e.0),
                    &evaluator,
                    regret_points.as_ref(),
                )
                .map_err(ctx)?;
                (
                    measured,
                    m.op_count(),
                    m.coef_count(),
                    m.storage_bits(),
                    elapsed,
                )
            }
            Model::Projection(p) => {
                let n = i as usize;
                let j =
                    p.j.unwrap_or_else(|| p.truncation.level(i, p.alpha, p.s, 1))
                        .min(n);
                let start = Instant::now();
                let theta = projection_fit(&xs, &ys, j, p.family).map_err(ctx)?;
                let fit_time = start.elapsed().as_secs_f64();
                let family = p.family;
                let predict = |x: &[f64]| crate::baselines::eval_expansion(&theta, family, x[0]);
                let measured = measure(predict, Some(&theta), &evaluator, regret_points.as_ref())
                    .map_err(with_context(replication, i))?;
                (measured, (n * j) as u64, j, None, fit_time)
            }
            Model::Krr(p) => {
                let centers: Vec<Vec<f64>> = xs.chunks_exact(dim).map(<[f64]>::to_vec).collect();
                let start = Instant::now();
                let problem = KrrProblem::new(&centers, &ys, p.kernel).map_err(ctx)?;
                let fit = problem
                    .solve(p.ridge)
                    .map_err(with_context(replication, i))?;
                let fit_time = start.elapsed().as_secs_f64();
                let measured =
                    measure(|x| fit.predict(x), None, &evaluator, regret_points.as_ref())
                        .map_err(with_context(replication, i))?;
                (
                    measured,
                    problem.kernel_evaluations(),
                    centers.len(),
                    None,
                    fit_time,
                )
            }
        };
        records.push(RunRecord {
            run_id: config.run_id.clone(),
            replication,
            n: i,
            mse: m.mse,
            regret: m.regret,
            op_count,
            coef_count,
            storage_bits,
            wall_time_s: fit_time,
        });
    }
    Ok(records)
}

fn run_replication(
    config: &ExperimentConfig,
    replication: usize,
    checkpoints: &[u64],
    method: MseMethod,
) -> Result<(Vec<RunRecord>, Option<GridChoice>)> {
    let seed = replication_seed(config.run.seed, replication);
    let mut best: Option<(f64, Vec<RunRecord>, GridChoice)> = None;
    for choice in config.grid() {
        let params = choice.apply(&config.estimator);
        let records = run_single(config, &params, replication, seed, checkpoints, method)?;
        let last = records.last().map_or(f64::INFINITY, |r| r.mse);
        if best.as_ref().is_none_or(|(b, _, _)| last < *b) {
            best = Some((last, records, choice));
        }
    }
    let (_, records, choice) = best.expect("grid has at least one point");
    Ok((records, (!choice.is_empty()).then_some(choice)))
}

/// Runs every replication, keeping going after failures so completed
/// replications can still be reported. Replications run on the current rayon
/// pool.
pub fn run_replications(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let mut warnings = Vec::new();
    let method = resolve_method(config, &mut warnings);
    let checkpoints = config.run.checkpoints.resolve(config.run.n_max);
    let seeds: Vec<u64> = (0..config.run.replications)
        .map(|r| replication_seed(config.run.seed, r))
        .collect();

    let outcomes: Vec<Result<(Vec<RunRecord>, Option<GridChoice>)>> = (0..config.run.replications)
        .into_par_iter()
        .map(|r| run_replication(config, r, &checkpoints, method))
        .collect();

    let mut records = Vec::new();
    let mut selections = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok((r, choice)) => {
                records.extend(r);
                selections.push(choice);
            }
            Err(e) => {
                selections.push(None);
                failures.push(e);
            }
        }
    }
    Ok(ExperimentResult {
        config: config.clone(),
        records,
        seeds,
        mse_method: method,
        warnings,
        selections,
        failures,
    })
}

/// Runs the experiment and fails on the first failed replication.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let mut result = run_replications(config)?;
    if result.failures.is_empty() {
        Ok(result)
    } else {
        Err(result.failures.swap_remove(0))
    }
}

/// Runs `f` on a dedicated rayon pool of `threads` workers.
pub fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| SieveError::invalid("workers", e.to_string()))?;
    Ok(pool.install(f))
}

/// [`run_experiment`] on a dedicated pool of `threads` workers.
pub fn run_experiment_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentResult> {
    in_pool(threads, || run_experiment(config))?
}
