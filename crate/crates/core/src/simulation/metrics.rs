use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{label_probability, rng_for, RunRecord, TargetFunction, XDist, EVAL_STREAM};
use crate::basis::BasisFamily;
use crate::error::{Result, SieveError};
use crate::estimator::log1p_exp;

/// Fixed evaluation points with the target value at each.
#[derive(Debug, Clone)]
pub(crate) struct EvalSet {
    dim: usize,
    xs: Vec<f64>,
    fx: Vec<f64>,
}

impl EvalSet {
    pub(crate) fn monte_carlo(
        target: TargetFunction,
        x_dist: XDist,
        dim: usize,
        m: usize,
        seed: u64,
    ) -> Self {
        let mut rng = rng_for(seed, EVAL_STREAM);
        let mut xs = vec![0.0; m * dim];
        for x in xs.chunks_exact_mut(dim) {
            x_dist.sample_into(&mut rng, x);
        }
        Self::from_points(target, dim, xs)
    }

    /// Midpoint rule on `[a, b]`.
    pub(crate) fn midpoint(target: TargetFunction, (a, b): (f64, f64), m: usize) -> Self {
        let h = (b - a) / m as f64;
        let xs = (0..m).map(|k| a + (k as f64 + 0.5) * h).collect();
        Self::from_points(target, 1, xs)
    }

    fn from_points(target: TargetFunction, dim: usize, xs: Vec<f64>) -> Self {
        let fx = xs
            .chunks_exact(dim)
            .map(|x| target.eval_unchecked(x))
            .collect();
        EvalSet { dim, xs, fx }
    }

    fn len(&self) -> usize {
        self.fx.len()
    }

    /// Mean of `loss(predict(x_k), f(x_k))` and its standard error.
    pub(crate) fn mean_with_se<P, L>(&self, predict: P, loss: L) -> Result<(f64, f64)>
    where
        P: Fn(&[f64]) -> Result<f64>,
        L: Fn(f64, f64) -> f64,
    {
        let m = self.len() as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for (x, &f) in self.xs.chunks_exact(self.dim).zip(&self.fx) {
            let v = loss(predict(x)?, f);
            sum += v;
            sum_sq += v * v;
        }
        let mean = sum / m;
        let var = if self.len() > 1 {
            ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0)
        } else {
            0.0
        };
        Ok((mean, (var / m).sqrt()))
    }

    pub(crate) fn mse<P: Fn(&[f64]) -> Result<f64>>(&self, predict: P) -> Result<f64> {
        Ok(self.mean_with_se(predict, |p, f| (p - f) * (p - f))?.0)
    }

    pub(crate) fn logistic_regret<P: Fn(&[f64]) -> Result<f64>>(&self, predict: P) -> Result<f64> {
        Ok(self.mean_with_se(predict, conditional_logistic_excess)?.0)
    }
}

/// Monte Carlo estimate of `E (predict(X) - f(X))^2` over `m` draws of `X`.
pub fn mse_monte_carlo<P>(
    predict: P,
    target: TargetFunction,
    x_dist: XDist,
    dim: usize,
    m: usize,
    seed: u64,
) -> Result<f64>
where
    P: Fn(&[f64]) -> Result<f64>,
{
    Ok(mse_monte_carlo_with_se(predict, target, x_dist, dim, m, seed)?.0)
}

/// As [`mse_monte_carlo`], also returning the standard error of the mean.
pub fn mse_monte_carlo_with_se<P>(
    predict: P,
    target: TargetFunction,
    x_dist: XDist,
    dim: usize,
    m: usize,
    seed: u64,
) -> Result<(f64, f64)>
where
    P: Fn(&[f64]) -> Result<f64>,
{
    if m == 0 {
        return Err(SieveError::invalid("eval_points", "must be at least 1"));
    }
    if !target.accepts_dim(dim) {
        return Err(SieveError::invalid(
            "dim",
            format!("target {target} does not accept dimension {dim}"),
        ));
    }
    EvalSet::monte_carlo(target, x_dist, dim, m, seed)
        .mean_with_se(predict, |p, f| (p - f) * (p - f))
}

/// Exact `L2(Unif[0,1])` error `sum_j (b_j - theta_j)^2` of an expansion in
/// `family` against the target's known coefficients.
pub fn mse_coefficient_space(
    avg_coefs: &[f64],
    target: TargetFunction,
    family: BasisFamily,
) -> Result<f64> {
    Ok(coefficient_distance(
        avg_coefs,
        &target.known_coefficients(family)?,
    ))
}

/// Squared distance between two coefficient vectors, padding with zeros.
pub(crate) fn coefficient_distance(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|j| {
            let d = a.get(j).copied().unwrap_or(0.0) - b.get(j).copied().unwrap_or(0.0);
            d * d
        })
        .sum()
}

/// `E[l(Y, fhat) - l(Y, fstar) | X]` for logistic loss when
/// `P(Y = 1 | X) = sigmoid(fstar)`. Non-negative, zero only at `fhat = fstar`.
pub fn conditional_logistic_excess(fhat: f64, fstar: f64) -> f64 {
    let g = label_probability(fstar);
    g * (log1p_exp(-fhat) - log1p_exp(-fstar)) + (1.0 - g) * (log1p_exp(fhat) - log1p_exp(fstar))
}

/// Excess logistic risk of `predict` under the tent label model with
/// `X ~ Unif[0,1]`. Both risks are taken at the same `m` draws of `X` and the
/// label is integrated out exactly.
pub fn logistic_regret<P: Fn(&[f64]) -> Result<f64>>(
    predict: P,
    m: usize,
    seed: u64,
) -> Result<f64> {
    if m == 0 {
        return Err(SieveError::invalid("eval_points", "must be at least 1"));
    }
    EvalSet::monte_carlo(TargetFunction::LogisticTent, XDist::Uniform01, 1, m, seed)
        .logistic_regret(predict)
}

/// Least-squares line through `(log10 n, log10 v)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub n_min: u64,
    pub points: usize,
}

/// Fits `log10 v = intercept + slope log10 n` over the points with `n >= n_min`.
pub fn fit_loglog_points(points: &[(u64, f64)], n_min: u64) -> Result<SlopeFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| *n >= n_min)
        .map(|&(n, v)| {
            if v > 0.0 && v.is_finite() {
                Ok(((n as f64).log10(), v.log10()))
            } else {
                Err(SieveError::SlopeFit(format!(
                    "non-positive value {v} at n = {n}"
                )))
            }
        })
        .collect::<Result<_>>()?;
    if used.len() < 3 {
        return Err(SieveError::SlopeFit(format!(
            "need at least 3 checkpoints with n >= {n_min}, found {}",
            used.len()
        )));
    }
    let k = used.len() as f64;
    let mx = used.iter().map(|p| p.0).sum::<f64>() / k;
    let my = used.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = used.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = used.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= 0.0 {
        return Err(SieveError::SlopeFit(
            "checkpoints do not span more than one n".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(SlopeFit {
        slope,
        intercept: my - slope * mx,
        n_min,
        points: used.len(),
    })
}

/// Slope of the replication-mean MSE against `n`.
pub fn fit_loglog_slope(records: &[RunRecord], n_min: u64) -> Result<SlopeFit> {
    let points: Vec<(u64, f64)> = aggregate(records).iter().map(|r| (r.n, r.mse)).collect();
    fit_loglog_points(&points, n_min)
}

/// Replication means at one checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub n: u64,
    pub replications: usize,
    pub mse: f64,
    pub regret: Option<f64>,
    pub op_count: f64,
    pub coef_count: f64,
}

pub fn aggregate(records: &[RunRecord]) -> Vec<AggregateRow> {
    #[derive(Default)]
    struct Acc {
        count: usize,
        mse: f64,
        regret: f64,
        regret_count: usize,
        ops: f64,
        coefs: f64,
    }
    let mut by_n: BTreeMap<u64, Acc> = BTreeMap::new();
    for r in records {
        let acc = by_n.entry(r.n).or_default();
        acc.count += 1;
        acc.mse += r.mse;
        if let Some(g) = r.regret {
            acc.regret += g;
            acc.regret_count += 1;
        }
        acc.ops += r.op_count as f64;
        acc.coefs += r.coef_count as f64;
    }
    by_n.into_iter()
        .map(|(n, a)| {
            let c = a.count as f64;
            AggregateRow {
                n,
                replications: a.count,
                mse: a.mse / c,
                regret: (a.regret_count > 0).then(|| a.regret / a.regret_count as f64),
                op_count: a.ops / c,
                coef_count: a.coefs / c,
            }
        })
        .collect()
}
