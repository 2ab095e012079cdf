//! Univariate basis families on `[0, 1]` and their tensor products.
//!
//! Multivariate indices are ordered by a hyperbolic cross: index vectors with
//! a smaller coordinate product come first, ties broken lexicographically.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_unit, Result, SieveError};

/// An indexed function system `psi_1, psi_2, ...` on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisFamily {
    /// `1, sqrt(2) cos(pi x), sqrt(2) cos(2 pi x), ...`; orthonormal on `[0, 1]`.
    CosineEigen,
    /// `sqrt(2) sin((2j - 1) pi x / 2)`; orthonormal on `[0, 1]`.
    SineHalf,
    /// `cos(2 pi ceil(j/2) x)` for odd `j`, `sin(2 pi ceil(j/2) x)` for even `j`.
    /// Not unit-normalized and has no constant term.
    TrigPairs,
}

impl BasisFamily {
    pub const ALL: [BasisFamily; 3] = [
        BasisFamily::CosineEigen,
        BasisFamily::SineHalf,
        BasisFamily::TrigPairs,
    ];

    pub fn key(self) -> &'static str {
        match self {
            BasisFamily::CosineEigen => "cosine_eigen",
            BasisFamily::SineHalf => "sine_half",
            BasisFamily::TrigPairs => "trig_pairs",
        }
    }

    /// Evaluates `psi_j(x)`, rejecting `j = 0` and `x` outside `[0, 1]`.
    pub fn eval(self, j: usize, x: f64) -> Result<f64> {
        if j == 0 {
            return Err(SieveError::ZeroIndex(j));
        }
        check_unit(x)?;
        Ok(self.eval_unchecked(j, x))
    }

    /// Same as [`BasisFamily::eval`] without argument validation. `j` must be
    /// at least 1.
    #[inline]
    pub fn eval_unchecked(self, j: usize, x: f64) -> f64 {
        debug_assert!(j >= 1);
        match self {
            BasisFamily::CosineEigen => {
                if j == 1 {
                    1.0
                } else {
                    SQRT_2 * ((j - 1) as f64 * PI * x).cos()
                }
            }
            BasisFamily::SineHalf => SQRT_2 * ((2 * j - 1) as f64 * PI * x / 2.0).sin(),
            BasisFamily::TrigPairs => {
                let freq = 2.0 * PI * j.div_ceil(2) as f64 * x;
                if j.is_multiple_of(2) {
                    freq.sin()
                } else {
                    freq.cos()
                }
            }
        }
    }

    /// Writes `psi_1(x), ..., psi_len(x)` into `out`.
    pub(crate) fn fill(self, x: f64, out: &mut [f64]) {
        for (k, v) in out.iter_mut().enumerate() {
            *v = self.eval_unchecked(k + 1, x);
        }
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for BasisFamily {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self> {
        BasisFamily::ALL
            .into_iter()
            .find(|f| f.key() == s)
            .ok_or_else(|| SieveError::invalid("family", format!("unknown basis family {s:?}")))
    }
}

/// Evaluates a single basis function; see [`BasisFamily::eval`].
pub fn eval_basis(family: BasisFamily, j: usize, x: f64) -> Result<f64> {
    family.eval(j, x)
}

/// A multi-index `(j_1, ..., j_p)` with all entries at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    indices: Vec<usize>,
    product: u64,
}

impl MultiIndex {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if let Some(&z) = indices.iter().find(|&&j| j == 0) {
            return Err(SieveError::ZeroIndex(z));
        }
        let product = indices.iter().map(|&j| j as u64).product();
        Ok(MultiIndex { indices, product })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn dim(&self) -> usize {
        self.indices.len()
    }

    pub fn product(&self) -> u64 {
        self.product
    }
}

fn collect_bounded(
    dim: usize,
    bound: u64,
    prefix: &mut Vec<usize>,
    prod: u64,
    out: &mut Vec<MultiIndex>,
) {
    if prefix.len() == dim {
        out.push(MultiIndex {
            indices: prefix.clone(),
            product: prod,
        });
        return;
    }
    let mut j = 1u64;
    while prod * j <= bound {
        prefix.push(j as usize);
        collect_bounded(dim, bound, prefix, prod * j, out);
        prefix.pop();
        j += 1;
    }
}

/// The `count` multi-indices in `p` dimensions with the smallest coordinate
/// products, ascending by product and then lexicographically.
pub fn hyperbolic_cross_indices(p: usize, count: usize) -> Vec<MultiIndex> {
    assert!(p >= 1, "dimension must be positive");
    if count == 0 {
        return Vec::new();
    }
    // Every index vector with product <= bound is enumerated, so once the
    // enumeration holds `count` vectors it contains the first `count` overall.
    let mut bound = count as u64;
    loop {
        let mut all = Vec::new();
        collect_bounded(p, bound, &mut Vec::with_capacity(p), 1, &mut all);
        if all.len() >= count {
            all.sort_unstable_by(|a, b| {
                a.product
                    .cmp(&b.product)
                    .then_with(|| a.indices.cmp(&b.indices))
            });
            all.truncate(count);
            return all;
        }
        bound *= 2;
    }
}

/// Growable prefix of the hyperbolic-cross ordering for a fixed dimension.
#[derive(Debug, Clone)]
pub struct HyperbolicCross {
    dim: usize,
    indices: Vec<MultiIndex>,
}

impl HyperbolicCross {
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        HyperbolicCross {
            dim,
            indices: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Everything enumerated so far.
    pub fn cached(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Returns the first `count` indices, extending the cache as needed.
    pub fn prefix(&mut self, count: usize) -> &[MultiIndex] {
        if self.indices.len() < count {
            let target = count.max(2 * self.indices.len());
            self.indices = hyperbolic_cross_indices(self.dim, target);
        }
        &self.indices[..count]
    }
}

/// Product of univariate evaluations `prod_k psi_{mi_k}(x_k)`.
pub fn eval_tensor_basis(family: BasisFamily, mi: &MultiIndex, x: &[f64]) -> Result<f64> {
    if mi.dim() != x.len() {
        return Err(SieveError::DimensionMismatch {
            expected: mi.dim(),
            found: x.len(),
        });
    }
    for &xk in x {
        check_unit(xk)?;
    }
    Ok(eval_tensor_unchecked(family, mi, x))
}

#[inline]
pub(crate) fn eval_tensor_unchecked(family: BasisFamily, mi: &MultiIndex, x: &[f64]) -> f64 {
    mi.indices
        .iter()
        .zip(x)
        .fold(1.0, |acc, (&j, &xk)| acc * family.eval_unchecked(j, xk))
}

/// `|int_0^1 psi_i psi_j dx - delta_ij|` by the composite midpoint rule.
pub fn orthonormality_defect(
    family: BasisFamily,
    i: usize,
    j: usize,
    quadrature_points: usize,
) -> f64 {
    assert!(i >= 1 && j >= 1, "basis indices start at 1");
    assert!(
        quadrature_points >= 2,
        "need at least two quadrature points"
    );
    let h = 1.0 / quadrature_points as f64;
    let integral: f64 = (0..quadrature_points)
        .map(|k| {
            let x = (k as f64 + 0.5) * h;
            family.eval_unchecked(i, x) * family.eval_unchecked(j, x)
        })
        .sum::<f64>()
        * h;
    let delta = if i == j { 1.0 } else { 0.0 };
    (integral - delta).abs()
}
