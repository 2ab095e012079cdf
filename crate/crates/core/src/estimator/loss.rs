use serde::{Deserialize, Serialize};

/// Loss in the prediction argument `v`, with labels or responses `y`.
///
/// The SGD direction is scaled by the pseudo-residual `g(y, v) = -dl/dv`, so
/// every update is a descent step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    /// `l(y, v) = (y - v)^2 / 2`, `g = y - v`.
    #[default]
    Squared,
    /// `l(y, v) = log(1 + exp(-y v))` for `y` in `{-1, +1}`, `g = y / (1 + exp(y v))`.
    Logistic,
}

impl Loss {
    pub fn key(self) -> &'static str {
        match self {
            Loss::Squared => "squared",
            Loss::Logistic => "logistic",
        }
    }

    #[inline]
    pub fn pseudo_residual(self, y: f64, v: f64) -> f64 {
        match self {
            Loss::Squared => y - v,
            Loss::Logistic => y / (1.0 + (y * v).exp()),
        }
    }

    pub fn value(self, y: f64, v: f64) -> f64 {
        match self {
            Loss::Squared => 0.5 * (y - v) * (y - v),
            Loss::Logistic => log1p_exp(-y * v),
        }
    }
}

/// `log(1 + exp(z))` without overflow for large `z`.
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}
