//! Sieve-SGD: stochastic gradient descent over a basis expansion whose
//! truncation level grows with the sample size, with component-wise learning
//! rates `t_j = j^(-2 omega)` and Polyak averaging of the iterates.
//!
//! After `i` observations the raw iterate is `f_i = sum_j b_j psi_j` over the
//! first `J_i` basis functions and the returned estimate is the running mean
//! `(f_0 + ... + f_i) / (i + 1)` with `f_0 = 0`.

mod loss;
mod multivariate;
mod quantize;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::basis::BasisFamily;
use crate::error::{check_unit, Result, SieveError};

pub use loss::{log1p_exp, Loss};
pub use multivariate::{AdditiveComponent, AdditiveConfig, AdditiveSieveState, TensorSieveState};
pub use quantize::{fraction_bits, quantize_value, FractionBits, Quantization};

/// Schedule for the number of active basis functions `J_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule")]
pub enum TruncationRule {
    /// `floor(i^alpha)`, at least 1.
    PowerLaw,
    /// `max(floor(i^(1/(2s+1)) ln^2 i), 1)`.
    PowerLogSquared,
    /// `ceil(c p i^(1/(2s+1)))` for input dimension `p`.
    Proportional { c: f64 },
}

impl TruncationRule {
    pub fn level(&self, i: u64, alpha: f64, s: f64, dim: usize) -> usize {
        let i_f = i.max(1) as f64;
        let root = i_f.powf(1.0 / (2.0 * s + 1.0));
        let level = match *self {
            TruncationRule::PowerLaw => i_f.powf(alpha).floor(),
            TruncationRule::PowerLogSquared => {
                let ln = i_f.ln();
                (root * ln * ln).floor()
            }
            TruncationRule::Proportional { c } => (c * dim as f64 * root).ceil(),
        };
        (level as usize).max(1)
    }
}

/// Hyperparameters of a univariate Sieve-SGD estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveConfig {
    /// Truncation exponent.
    pub alpha: f64,
    /// Component rate exponent, `t_j = j^(-2 omega)`.
    pub omega: f64,
    /// Step-size scale, `gamma_i = gamma0 i^(-1/(2s+1))`.
    pub gamma0: f64,
    /// Assumed smoothness.
    pub s: f64,
    pub family: BasisFamily,
    pub truncation: TruncationRule,
    #[serde(default)]
    pub quantization: Option<Quantization>,
}

impl SieveConfig {
    pub fn new(alpha: f64, omega: f64, gamma0: f64, s: f64, family: BasisFamily) -> Self {
        SieveConfig {
            alpha,
            omega,
            gamma0,
            s,
            family,
            truncation: TruncationRule::PowerLaw,
            quantization: None,
        }
    }

    pub fn with_truncation(mut self, truncation: TruncationRule) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_quantization(mut self, quantization: Option<Quantization>) -> Self {
        self.quantization = quantization;
        self
    }

    pub fn validate(&self) -> Result<()> {
        validate_common(self.alpha, self.omega, self.gamma0, self.s)?;
        if let TruncationRule::Proportional { c } = self.truncation {
            if !(c > 0.0 && c.is_finite()) {
                return Err(SieveError::invalid("c", format!("must be > 0, got {c}")));
            }
        }
        if let Some(q) = self.quantization {
            if let FractionBits::LogScaled { factor } = q.fraction_bits {
                if !(factor > 0.0 && factor.is_finite()) {
                    return Err(SieveError::invalid(
                        "fraction_bits",
                        format!("log factor must be > 0, got {factor}"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// `gamma0 * i^(-1/(2s+1))`.
    pub fn step_size(&self, i: u64) -> f64 {
        step_size(self.gamma0, self.s, i)
    }
}

pub(crate) fn validate_common(alpha: f64, omega: f64, gamma0: f64, s: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(SieveError::invalid(
            "alpha",
            format!("must be > 0, got {alpha}"),
        ));
    }
    if !(omega > 0.5 && omega.is_finite()) {
        return Err(SieveError::invalid(
            "omega",
            format!("must be > 0.5, got {omega}"),
        ));
    }
    if !(gamma0 > 0.0 && gamma0.is_finite()) {
        return Err(SieveError::invalid(
            "gamma0",
            format!("must be > 0, got {gamma0}"),
        ));
    }
    if !(s >= 1.0 && s.is_finite()) {
        return Err(SieveError::invalid("s", format!("must be >= 1, got {s}")));
    }
    Ok(())
}

#[inline]
pub(crate) fn step_size(gamma0: f64, s: f64, i: u64) -> f64 {
    gamma0 / (i as f64).powf(1.0 / (2.0 * s + 1.0))
}

#[inline]
pub(crate) fn component_weight(index: f64, omega: f64) -> f64 {
    index.powf(-2.0 * omega)
}

/// Number of active basis functions after observation `i` (univariate).
pub fn truncation_level(i: u64, config: &SieveConfig) -> usize {
    config.truncation.level(i, config.alpha, config.s, 1)
}

/// Raw and Polyak-averaged coefficient vectors of equal length.
#[derive(Debug, Clone, Default)]
pub(crate) struct Coefficients {
    pub raw: Vec<f64>,
    pub avg: Vec<f64>,
    scratch: Vec<f64>,
}

impl Coefficients {
    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn from_parts(raw: Vec<f64>, avg: Vec<f64>) -> Self {
        Coefficients {
            raw,
            avg,
            scratch: Vec::new(),
        }
    }

    /// `sum_j coef_j psi_j` over the current length; `psi` may be longer.
    #[inline]
    pub fn dot(coef: &[f64], psi: &[f64]) -> f64 {
        coef.iter().zip(psi).fold(0.0, |acc, (b, p)| acc + b * p)
    }

    /// Stages `raw_j + scale * weights_j * psi_j` for `j < psi.len()` and
    /// checks that every staged value is finite. Nothing is committed.
    pub fn stage(&mut self, scale: f64, weights: &[f64], psi: &[f64], step: u64) -> Result<()> {
        self.scratch.clear();
        for (j, (&w, &p)) in weights.iter().zip(psi).enumerate() {
            let old = self.raw.get(j).copied().unwrap_or(0.0);
            let new = old + scale * (w * p);
            if !new.is_finite() {
                return Err(SieveError::NonFinite {
                    step,
                    what: "coefficient update",
                });
            }
            self.scratch.push(new);
        }
        Ok(())
    }

    /// Commits the staged iterate and folds it into the average for observation `i`.
    pub fn commit(&mut self, i: u64) {
        let len = self.scratch.len().max(self.raw.len());
        self.raw.resize(len, 0.0);
        self.avg.resize(len, 0.0);
        self.raw[..self.scratch.len()].copy_from_slice(&self.scratch);
        let keep = i as f64 / (i + 1) as f64;
        let add = 1.0 / (i + 1) as f64;
        for (a, &b) in self.avg.iter_mut().zip(&self.raw) {
            *a = keep * *a + add * b;
        }
    }

    pub fn quantize(&mut self, bits: u32) {
        for v in self.raw.iter_mut().chain(self.avg.iter_mut()) {
            *v = quantize_value(*v, bits);
        }
    }
}

/// Common surface of the streaming estimators driven by the simulation harness.
pub trait OnlineRegressor: Send {
    /// Processes one observation.
    fn observe(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()>;
    /// The returned (averaged) estimate at `x`.
    fn predict(&self, x: &[f64]) -> Result<f64>;
    /// Basis or kernel evaluations spent on updates so far.
    fn op_count(&self) -> u64;
    /// Number of stored coefficients or centers.
    fn coef_count(&self) -> usize;
    fn storage_bits(&self) -> Option<u64> {
        None
    }
    /// Averaged coefficients together with their univariate basis, when the
    /// estimate is a plain expansion in one family.
    fn expansion(&self) -> Option<(&[f64], BasisFamily)> {
        None
    }
}

/// Univariate Sieve-SGD state.
#[derive(Debug, Clone)]
pub struct SieveState {
    config: SieveConfig,
    coefs: Coefficients,
    weights: Vec<f64>,
    psi: Vec<f64>,
    step: u64,
    op_count: u64,
    storage_bits: Option<u64>,
}

impl SieveState {
    pub fn new(config: SieveConfig) -> Result<Self> {
        config.validate()?;
        Ok(SieveState {
            config,
            coefs: Coefficients::default(),
            weights: Vec::new(),
            psi: Vec::new(),
            step: 0,
            op_count: 0,
            storage_bits: None,
        })
    }

    pub fn config(&self) -> &SieveConfig {
        &self.config
    }

    /// Number of observations processed.
    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn op_count(&self) -> u64 {
        self.op_count
    }

    /// Current truncation level `J_step` (0 before the first update).
    pub fn truncation(&self) -> usize {
        self.coefs.len()
    }

    pub fn raw_coefs(&self) -> &[f64] {
        &self.coefs.raw
    }

    pub fn avg_coefs(&self) -> &[f64] {
        &self.coefs.avg
    }

    pub fn storage_bits(&self) -> Option<u64> {
        self.storage_bits
    }

    /// A copy of this state with quantized storage switched off.
    pub fn without_quantization(&self) -> Self {
        let mut copy = self.clone();
        copy.config.quantization = None;
        copy.storage_bits = None;
        copy
    }

    fn eval_expansion(&self, coef: &[f64], x: f64) -> Result<f64> {
        check_unit(x)?;
        let family = self.config.family;
        Ok(coef
            .iter()
            .enumerate()
            .fold(0.0, |acc, (k, b)| acc + b * family.eval_unchecked(k + 1, x)))
    }

    /// The current raw iterate `f_step(x)`.
    pub fn predict_raw(&self, x: f64) -> Result<f64> {
        self.eval_expansion(&self.coefs.raw, x)
    }

    /// The averaged estimate at `x`.
    pub fn predict(&self, x: f64) -> Result<f64> {
        self.eval_expansion(&self.coefs.avg, x)
    }

    /// Processes observation `(x, y)`. On error the state is left unchanged.
    pub fn update(&mut self, x: f64, y: f64, loss: Loss) -> Result<()> {
        check_unit(x)?;
        let i = self.step + 1;
        if !y.is_finite() {
            return Err(SieveError::NonFinite {
                step: i,
                what: "response",
            });
        }
        let prev = self.coefs.len();
        let level = truncation_level(i, &self.config).max(prev);

        let family = self.config.family;
        self.psi.resize(level, 0.0);
        family.fill(x, &mut self.psi);
        while self.weights.len() < level {
            let j = self.weights.len() + 1;
            self.weights
                .push(component_weight(j as f64, self.config.omega));
        }

        // residual uses the truncation level before this observation
        let fitted = Coefficients::dot(&self.coefs.raw, &self.psi[..prev]);
        let g = loss.pseudo_residual(y, fitted);
        let scale = self.config.step_size(i) * g;
        self.coefs
            .stage(scale, &self.weights[..level], &self.psi, i)?;
        self.coefs.commit(i);

        self.step = i;
        self.op_count += (prev + 2 * level) as u64;
        if self.config.quantization.is_some() {
            self.quantize(i);
        }
        Ok(())
    }

    /// Rounds both coefficient vectors to the precision used after observation
    /// `i`. A no-op when quantization is not configured.
    pub fn quantize(&mut self, i: u64) {
        if let Some(q) = self.config.quantization {
            self.coefs.quantize(q.fraction_bits.at(i));
            self.storage_bits = Some(q.storage_bits(self.coefs.len(), i));
        }
    }

    pub fn snapshot(&self) -> SieveSnapshot {
        SieveSnapshot {
            format_version: SieveSnapshot::FORMAT_VERSION,
            config: self.config.clone(),
            step: self.step,
            op_count: self.op_count,
            raw_coefs: self.coefs.raw.clone(),
            avg_coefs: self.coefs.avg.clone(),
        }
    }

    pub fn from_snapshot(snapshot: SieveSnapshot) -> Result<Self> {
        if snapshot.format_version != SieveSnapshot::FORMAT_VERSION {
            return Err(SieveError::Snapshot(format!(
                "unsupported format version {}",
                snapshot.format_version
            )));
        }
        if snapshot.raw_coefs.len() != snapshot.avg_coefs.len() {
            return Err(SieveError::Snapshot(
                "coefficient vectors differ in length".into(),
            ));
        }
        let mut state = SieveState::new(snapshot.config)?;
        state.step = snapshot.step;
        state.op_count = snapshot.op_count;
        state.weights = (1..=snapshot.raw_coefs.len())
            .map(|j| component_weight(j as f64, state.config.omega))
            .collect();
        state.coefs = Coefficients::from_parts(snapshot.raw_coefs, snapshot.avg_coefs);
        if state.step > 0 {
            if let Some(q) = state.config.quantization {
                state.storage_bits = Some(q.storage_bits(state.coefs.len(), state.step));
            }
        }
        Ok(state)
    }

    /// Writes a JSON snapshot; floats round-trip exactly.
    pub fn save<W: Write>(&self, writer: W) -> Result<()> {
        serde_json::to_writer_pretty(writer, &self.snapshot())?;
        Ok(())
    }

    pub fn load<R: Read>(reader: R) -> Result<Self> {
        let snapshot: SieveSnapshot = serde_json::from_reader(reader)?;
        SieveState::from_snapshot(snapshot)
    }
}

impl OnlineRegressor for SieveState {
    fn observe(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        match x {
            [x] => self.update(*x, y, loss),
            _ => Err(SieveError::DimensionMismatch {
                expected: 1,
                found: x.len(),
            }),
        }
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        match x {
            [x] => SieveState::predict(self, *x),
            _ => Err(SieveError::DimensionMismatch {
                expected: 1,
                found: x.len(),
            }),
        }
    }

    fn op_count(&self) -> u64 {
        self.op_count
    }

    fn coef_count(&self) -> usize {
        self.coefs.len()
    }

    fn storage_bits(&self) -> Option<u64> {
        self.storage_bits
    }

    fn expansion(&self) -> Option<(&[f64], BasisFamily)> {
        Some((&self.coefs.avg, self.config.family))
    }
}

/// Serialized form of a [`SieveState`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SieveSnapshot {
    pub format_version: u32,
    pub config: SieveConfig,
    pub step: u64,
    pub op_count: u64,
    pub raw_coefs: Vec<f64>,
    pub avg_coefs: Vec<f64>,
}

impl SieveSnapshot {
    pub const FORMAT_VERSION: u32 = 1;
}
