//! Multivariate Sieve-SGD: tensor-product bases ordered by hyperbolic cross,
//! and additive models with a common intercept.

use serde::{Deserialize, Serialize};

use super::{
    component_weight, step_size, validate_common, Coefficients, Loss, OnlineRegressor, SieveConfig,
    TruncationRule,
};
use crate::basis::{eval_tensor_unchecked, BasisFamily, HyperbolicCross, MultiIndex};
use crate::error::{check_unit, Result, SieveError};

fn check_point(x: &[f64], dim: usize) -> Result<()> {
    if x.len() != dim {
        return Err(SieveError::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    x.iter().try_for_each(|&v| check_unit(v))
}

/// Sieve-SGD over tensor products of a univariate family. Basis function `m`
/// in hyperbolic-cross order has weight `(prod_k j_k)^(-2 omega)`.
#[derive(Debug, Clone)]
pub struct TensorSieveState {
    config: SieveConfig,
    dim: usize,
    cross: HyperbolicCross,
    coefs: Coefficients,
    weights: Vec<f64>,
    psi: Vec<f64>,
    step: u64,
    op_count: u64,
}

impl TensorSieveState {
    pub fn new(config: SieveConfig, dim: usize) -> Result<Self> {
        config.validate()?;
        if dim == 0 {
            return Err(SieveError::invalid("dim", "must be at least 1"));
        }
        Ok(TensorSieveState {
            config,
            dim,
            cross: HyperbolicCross::new(dim),
            coefs: Coefficients::default(),
            weights: Vec::new(),
            psi: Vec::new(),
            step: 0,
            op_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn raw_coefs(&self) -> &[f64] {
        &self.coefs.raw
    }

    pub fn avg_coefs(&self) -> &[f64] {
        &self.coefs.avg
    }

    /// Active multi-indices, in coefficient order.
    pub fn active_indices(&self) -> &[MultiIndex] {
        &self.cross.cached()[..self.coefs.len()]
    }

    pub fn truncation_level(&self, i: u64) -> usize {
        self.config
            .truncation
            .level(i, self.config.alpha, self.config.s, self.dim)
    }

    fn eval_expansion(&self, coef: &[f64], x: &[f64]) -> Result<f64> {
        check_point(x, self.dim)?;
        let active = self.active_indices();
        Ok(coef.iter().zip(active).fold(0.0, |acc, (b, mi)| {
            acc + b * eval_tensor_unchecked(self.config.family, mi, x)
        }))
    }

    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        self.eval_expansion(&self.coefs.raw, x)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.eval_expansion(&self.coefs.avg, x)
    }

    pub fn update(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        check_point(x, self.dim)?;
        let i = self.step + 1;
        if !y.is_finite() {
            return Err(SieveError::NonFinite {
                step: i,
                what: "response",
            });
        }
        let prev = self.coefs.len();
        let level = self.truncation_level(i).max(prev);

        let family = self.config.family;
        let active = self.cross.prefix(level);
        self.psi.clear();
        self.psi
            .extend(active.iter().map(|mi| eval_tensor_unchecked(family, mi, x)));
        while self.weights.len() < level {
            let product = active[self.weights.len()].product() as f64;
            self.weights
                .push(component_weight(product, self.config.omega));
        }

        let fitted = Coefficients::dot(&self.coefs.raw, &self.psi[..prev]);
        let g = loss.pseudo_residual(y, fitted);
        let scale = self.config.step_size(i) * g;
        self.coefs
            .stage(scale, &self.weights[..level], &self.psi, i)?;
        self.coefs.commit(i);

        self.step = i;
        self.op_count += (prev + 2 * level) as u64;
        Ok(())
    }
}

impl OnlineRegressor for TensorSieveState {
    fn observe(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        self.update(x, y, loss)
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        TensorSieveState::predict(self, x)
    }

    fn op_count(&self) -> u64 {
        self.op_count
    }

    fn coef_count(&self) -> usize {
        self.coefs.len()
    }
}

/// One coordinate of an additive model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveComponent {
    pub family: BasisFamily,
    pub omega: f64,
    pub alpha: f64,
    pub truncation: TruncationRule,
    /// Drop the constant function of `cosine_eigen` so the component has zero
    /// mean and the intercept is identifiable.
    #[serde(default)]
    pub centered: bool,
}

impl AdditiveComponent {
    pub fn new(family: BasisFamily, omega: f64, alpha: f64) -> Self {
        AdditiveComponent {
            family,
            omega,
            alpha,
            truncation: TruncationRule::PowerLaw,
            centered: false,
        }
    }

    pub fn centered(mut self, centered: bool) -> Self {
        self.centered = centered;
        self
    }

    /// Index shift applied to the underlying family.
    fn offset(&self) -> usize {
        usize::from(self.centered && self.family == BasisFamily::CosineEigen)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdditiveConfig {
    pub gamma0: f64,
    pub s: f64,
    pub intercept: bool,
    pub components: Vec<AdditiveComponent>,
}

impl AdditiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.components.is_empty() {
            return Err(SieveError::invalid(
                "components",
                "at least one component is required",
            ));
        }
        for c in &self.components {
            validate_common(c.alpha, c.omega, self.gamma0, self.s)?;
            if c.centered && c.family == BasisFamily::SineHalf {
                return Err(SieveError::invalid(
                    "centered",
                    "sine_half has no constant function to drop",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
struct ComponentState {
    coefs: Coefficients,
    weights: Vec<f64>,
    psi: Vec<f64>,
}

/// Additive Sieve-SGD: one shared residual drives every coordinate's
/// expansion and the intercept.
#[derive(Debug, Clone)]
pub struct AdditiveSieveState {
    config: AdditiveConfig,
    parts: Vec<ComponentState>,
    intercept_raw: f64,
    intercept_avg: f64,
    step: u64,
    op_count: u64,
}

impl AdditiveSieveState {
    pub fn new(config: AdditiveConfig) -> Result<Self> {
        config.validate()?;
        let parts = config
            .components
            .iter()
            .map(|_| ComponentState {
                coefs: Coefficients::default(),
                weights: Vec::new(),
                psi: Vec::new(),
            })
            .collect();
        Ok(AdditiveSieveState {
            config,
            parts,
            intercept_raw: 0.0,
            intercept_avg: 0.0,
            step: 0,
            op_count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.config.components.len()
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn intercept_raw(&self) -> f64 {
        self.intercept_raw
    }

    pub fn intercept_avg(&self) -> f64 {
        self.intercept_avg
    }

    pub fn raw_coefs(&self, k: usize) -> &[f64] {
        &self.parts[k].coefs.raw
    }

    pub fn avg_coefs(&self, k: usize) -> &[f64] {
        &self.parts[k].coefs.avg
    }

    fn eval(&self, x: &[f64], averaged: bool) -> Result<f64> {
        check_point(x, self.dim())?;
        let mut total = if averaged {
            self.intercept_avg
        } else {
            self.intercept_raw
        };
        for ((comp, part), &xk) in self.config.components.iter().zip(&self.parts).zip(x) {
            let coef = if averaged {
                &part.coefs.avg
            } else {
                &part.coefs.raw
            };
            let offset = comp.offset();
            total += coef.iter().enumerate().fold(0.0, |acc, (j, b)| {
                acc + b * comp.family.eval_unchecked(j + 1 + offset, xk)
            });
        }
        Ok(total)
    }

    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        self.eval(x, false)
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        self.eval(x, true)
    }

    pub fn update(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        check_point(x, self.dim())?;
        let i = self.step + 1;
        if !y.is_finite() {
            return Err(SieveError::NonFinite {
                step: i,
                what: "response",
            });
        }

        let mut fitted = self.intercept_raw;
        let mut levels = Vec::with_capacity(self.parts.len());
        for ((comp, part), &xk) in self.config.components.iter().zip(&mut self.parts).zip(x) {
            let prev = part.coefs.len();
            let level = comp
                .truncation
                .level(i, comp.alpha, self.config.s, 1)
                .max(prev);
            let offset = comp.offset();
            part.psi.clear();
            part.psi
                .extend((1..=level).map(|j| comp.family.eval_unchecked(j + offset, xk)));
            while part.weights.len() < level {
                let j = part.weights.len() + 1;
                part.weights.push(component_weight(j as f64, comp.omega));
            }
            fitted += Coefficients::dot(&part.coefs.raw, &part.psi[..prev]);
            levels.push((prev, level));
        }

        let g = loss.pseudo_residual(y, fitted);
        let scale = step_size(self.config.gamma0, self.config.s, i) * g;
        for (part, &(_, level)) in self.parts.iter_mut().zip(&levels) {
            part.coefs
                .stage(scale, &part.weights[..level], &part.psi, i)?;
        }
        let intercept = if self.config.intercept {
            let v = self.intercept_raw + scale;
            if !v.is_finite() {
                return Err(SieveError::NonFinite {
                    step: i,
                    what: "intercept update",
                });
            }
            v
        } else {
            0.0
        };

        for part in &mut self.parts {
            part.coefs.commit(i);
        }
        self.intercept_raw = intercept;
        self.intercept_avg =
            i as f64 / (i + 1) as f64 * self.intercept_avg + 1.0 / (i + 1) as f64 * intercept;
        self.step = i;
        self.op_count += levels.iter().map(|&(p, l)| (p + 2 * l) as u64).sum::<u64>();
        Ok(())
    }
}

impl OnlineRegressor for AdditiveSieveState {
    fn observe(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        self.update(x, y, loss)
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        AdditiveSieveState::predict(self, x)
    }

    fn op_count(&self) -> u64 {
        self.op_count
    }

    fn coef_count(&self) -> usize {
        self.parts.iter().map(|p| p.coefs.len()).sum::<usize>() + usize::from(self.config.intercept)
    }
}
