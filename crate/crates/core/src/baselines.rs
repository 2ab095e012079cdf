//! Reference estimators: averaged kernel SGD, the batch projection estimator
//! and kernel ridge regression, plus the closed-form kernels they use.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::BasisFamily;
use crate::error::{check_unit, Result, SieveError};
use crate::estimator::{step_size, Loss, OnlineRegressor};

/// Degree-4 Bernoulli polynomial `x^4 - 2x^3 + x^2 - 1/30`.
pub fn bernoulli4(x: f64) -> f64 {
    x * x * (x * x - 2.0 * x + 1.0) - 1.0 / 30.0
}

/// Fractional part `x - floor(x)`, in `[0, 1)` for negative inputs too.
pub fn fractional_part(x: f64) -> f64 {
    x - x.floor()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kernel {
    /// `-B4({s - t}) / 24`, the periodic Sobolev kernel of order 2.
    Bernoulli4,
    /// `min(s, t)`.
    BrownianMin,
    /// `prod_k (1 + min(s_k, t_k))`.
    SobolevTensor,
}

impl Kernel {
    pub const ALL: [Kernel; 3] = [
        Kernel::Bernoulli4,
        Kernel::BrownianMin,
        Kernel::SobolevTensor,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Kernel::Bernoulli4 => "bernoulli4",
            Kernel::BrownianMin => "brownian_min",
            Kernel::SobolevTensor => "sobolev_tensor",
        }
    }

    fn univariate(self) -> bool {
        !matches!(self, Kernel::SobolevTensor)
    }

    pub fn eval(self, s: &[f64], t: &[f64]) -> Result<f64> {
        if s.len() != t.len() {
            return Err(SieveError::DimensionMismatch {
                expected: s.len(),
                found: t.len(),
            });
        }
        if self.univariate() && s.len() != 1 {
            return Err(SieveError::DimensionMismatch {
                expected: 1,
                found: s.len(),
            });
        }
        for &v in s.iter().chain(t) {
            check_unit(v)?;
        }
        Ok(self.eval_unchecked(s, t))
    }

    #[inline]
    pub(crate) fn eval_unchecked(self, s: &[f64], t: &[f64]) -> f64 {
        match self {
            // B4(x) = B4(1 - x), so {|s - t|} gives the same value and is exactly symmetric
            Kernel::Bernoulli4 => -bernoulli4(fractional_part((s[0] - t[0]).abs())) / 24.0,
            Kernel::BrownianMin => s[0].min(t[0]),
            Kernel::SobolevTensor => s.iter().zip(t).map(|(a, b)| 1.0 + a.min(*b)).product(),
        }
    }

    /// `sup_x K(x, x)` on `[0, 1]^dim`.
    pub fn max_diagonal(self, dim: usize) -> f64 {
        match self {
            Kernel::Bernoulli4 => -bernoulli4(0.0) / 24.0,
            Kernel::BrownianMin => 1.0,
            Kernel::SobolevTensor => 2f64.powi(dim as i32),
        }
    }

    /// Gram matrix `K(x_i, x_j)` over the given points.
    pub fn gram(self, xs: &[Vec<f64>]) -> Result<DMatrix<f64>> {
        let n = xs.len();
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = self.eval(&xs[i], &xs[j])?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Kernel {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.key() == s)
            .ok_or_else(|| SieveError::invalid("kernel", format!("unknown kernel {s:?}")))
    }
}

pub fn kernel_eval(k: Kernel, s: &[f64], t: &[f64]) -> Result<f64> {
    k.eval(s, t)
}

/// `sum_{j <= terms} lambda_j psi_j(s) psi_j(t)` for the half-sine family with
/// `lambda_j = ((2j - 1) pi / 2)^-2`; converges to `min(s, t)`.
pub fn brownian_mercer_partial_sum(terms: usize, s: f64, t: f64) -> f64 {
    let family = BasisFamily::SineHalf;
    (1..=terms)
        .map(|j| {
            let freq = (2 * j - 1) as f64 * std::f64::consts::PI / 2.0;
            family.eval_unchecked(j, s) * family.eval_unchecked(j, t) / (freq * freq)
        })
        .sum()
}

/// Kernel SGD with Polyak averaging. The iterate after `n` steps is
/// `sum_i c_i K(X_i, .)`; weights are fixed once appended.
#[derive(Debug, Clone)]
pub struct KernelSgdState {
    kernel: Kernel,
    dim: usize,
    centers: Vec<f64>,
    weights: Vec<f64>,
    gamma0: f64,
    s: f64,
    op_count: u64,
}

impl KernelSgdState {
    pub fn new(kernel: Kernel, dim: usize, gamma0: f64, s: f64) -> Result<Self> {
        if !(gamma0 > 0.0 && gamma0.is_finite()) {
            return Err(SieveError::invalid(
                "gamma0",
                format!("must be > 0, got {gamma0}"),
            ));
        }
        if !(s >= 1.0 && s.is_finite()) {
            return Err(SieveError::invalid("s", format!("must be >= 1, got {s}")));
        }
        if dim == 0 || (kernel.univariate() && dim != 1) {
            return Err(SieveError::invalid(
                "dim",
                format!("kernel {kernel} does not accept dimension {dim}"),
            ));
        }
        Ok(KernelSgdState {
            kernel,
            dim,
            centers: Vec::new(),
            weights: Vec::new(),
            gamma0,
            s,
            op_count: 0,
        })
    }

    pub fn step(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn center(&self, i: usize) -> &[f64] {
        &self.centers[i * self.dim..(i + 1) * self.dim]
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(SieveError::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        x.iter().try_for_each(|&v| check_unit(v))
    }

    fn weighted_sum(&self, x: &[f64], weight: impl Fn(usize, f64) -> f64) -> f64 {
        self.centers
            .chunks_exact(self.dim)
            .zip(&self.weights)
            .enumerate()
            .fold(0.0, |acc, (i, (c, &w))| {
                acc + weight(i, w) * self.kernel.eval_unchecked(c, x)
            })
    }

    /// The current iterate `f_n(x)`.
    pub fn predict_raw(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.weighted_sum(x, |_, w| w))
    }

    /// `(f_0 + ... + f_n)(x) / (n + 1)`. Center `i` (1-based) is present in
    /// `n + 1 - i` of the iterates, which gives triangular weights.
    pub fn predict_averaged(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        let n = self.weights.len();
        let denom = (n + 1) as f64;
        Ok(self.weighted_sum(x, |i, w| (n - i) as f64 / denom * w))
    }

    pub fn update(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        self.check(x)?;
        let n = self.weights.len() as u64 + 1;
        let fitted = self.weighted_sum(x, |_, w| w);
        let weight = step_size(self.gamma0, self.s, n) * loss.pseudo_residual(y, fitted);
        if !weight.is_finite() {
            return Err(SieveError::NonFinite {
                step: n,
                what: "kernel weight",
            });
        }
        self.op_count += n - 1;
        self.centers.extend_from_slice(x);
        self.weights.push(weight);
        Ok(())
    }
}

pub fn kernel_sgd_predict_averaged(state: &KernelSgdState, x: &[f64]) -> Result<f64> {
    state.predict_averaged(x)
}

impl OnlineRegressor for KernelSgdState {
    fn observe(&mut self, x: &[f64], y: f64, loss: Loss) -> Result<()> {
        self.update(x, y, loss)
    }

    fn predict(&self, x: &[f64]) -> Result<f64> {
        self.predict_averaged(x)
    }

    fn op_count(&self) -> u64 {
        self.op_count
    }

    fn coef_count(&self) -> usize {
        self.weights.len()
    }
}

/// Least-squares fit of `y` on the first `j` basis functions.
pub fn projection_fit(xs: &[f64], ys: &[f64], j: usize, family: BasisFamily) -> Result<Vec<f64>> {
    if xs.len() != ys.len() {
        return Err(SieveError::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if j == 0 {
        return Err(SieveError::invalid("J", "must be at least 1"));
    }
    let n = xs.len();
    if n < j {
        return Err(SieveError::TooFewObservations {
            needed: j,
            found: n,
        });
    }
    let mut design = DMatrix::zeros(n, j);
    for (r, &x) in xs.iter().enumerate() {
        check_unit(x)?;
        for c in 0..j {
            design[(r, c)] = family.eval_unchecked(c + 1, x);
        }
    }
    let svd = design.svd(true, true);
    let max_sv = svd.singular_values.max();
    let tol = max_sv * f64::EPSILON * n.max(j) as f64 * 16.0;
    let rank = svd.rank(tol);
    if rank < j {
        return Err(SieveError::SingularFit { rank, columns: j });
    }
    let y = DVector::from_column_slice(ys);
    let theta = svd
        .solve(&y, tol)
        .map_err(|e| SieveError::Solver(e.to_string()))?;
    Ok(theta.iter().copied().collect())
}

/// Evaluates `sum_j theta_j psi_j(x)`.
pub fn eval_expansion(theta: &[f64], family: BasisFamily, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(theta
        .iter()
        .enumerate()
        .fold(0.0, |acc, (k, t)| acc + t * family.eval_unchecked(k + 1, x)))
}

/// Batch kernel ridge regression solving `(G + n ridge I) a = y`.
#[derive(Debug, Clone)]
pub struct KrrModel {
    kernel: Kernel,
    centers: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl KrrModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for (c, w) in self.centers.iter().zip(&self.weights) {
            total += w * self.kernel.eval(c, x)?;
        }
        Ok(total)
    }
}

/// Holds the Gram matrix so several ridge values can be solved cheaply.
#[derive(Debug, Clone)]
pub struct KrrProblem {
    kernel: Kernel,
    centers: Vec<Vec<f64>>,
    ys: DVector<f64>,
    gram: DMatrix<f64>,
}

impl KrrProblem {
    pub fn new(xs: &[Vec<f64>], ys: &[f64], kernel: Kernel) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(SieveError::DimensionMismatch {
                expected: xs.len(),
                found: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(SieveError::TooFewObservations {
                needed: 1,
                found: 0,
            });
        }
        Ok(KrrProblem {
            kernel,
            centers: xs.to_vec(),
            ys: DVector::from_column_slice(ys),
            gram: kernel.gram(xs)?,
        })
    }

    /// Kernel evaluations spent building the Gram matrix.
    pub fn kernel_evaluations(&self) -> u64 {
        let n = self.centers.len() as u64;
        n * (n + 1) / 2
    }

    pub fn solve(&self, ridge: f64) -> Result<KrrModel> {
        if !(ridge > 0.0 && ridge.is_finite()) {
            return Err(SieveError::invalid(
                "ridge",
                format!("must be > 0, got {ridge}"),
            ));
        }
        let n = self.centers.len();
        let mut system = self.gram.clone();
        for i in 0..n {
            system[(i, i)] += n as f64 * ridge;
        }
        let chol = system.cholesky().ok_or_else(|| {
            SieveError::Solver("regularized Gram matrix is not positive definite".into())
        })?;
        let a = chol.solve(&self.ys);
        if a.iter().any(|v| !v.is_finite()) {
            return Err(SieveError::Solver("non-finite dual weights".into()));
        }
        Ok(KrrModel {
            kernel: self.kernel,
            centers: self.centers.clone(),
            weights: a.iter().copied().collect(),
        })
    }
}

pub fn krr_fit(xs: &[Vec<f64>], ys: &[f64], kernel: Kernel, ridge: f64) -> Result<KrrModel> {
    KrrProblem::new(xs, ys, kernel)?.solve(ridge)
}
