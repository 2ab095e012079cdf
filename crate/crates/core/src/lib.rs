//! Streaming nonparametric regression with Sieve-SGD.
//!
//! The crate is organised as
//! - [`basis`]: univariate basis families on `[0, 1]` and hyperbolic-cross tensor products,
//! - [`estimator`]: the Sieve-SGD state machine (univariate, tensor, additive, quantized),
//! - [`baselines`]: kernel SGD, the projection estimator and kernel ridge regression,
//! - [`simulation`]: data generators, error metrics, slope fits and the experiment runner.

pub mod baselines;
pub mod basis;
pub mod error;
pub mod estimator;
pub mod simulation;

pub use baselines::{Kernel, KernelSgdState};
pub use basis::{BasisFamily, MultiIndex};
pub use error::{Result, SieveError};
pub use estimator::{Loss, OnlineRegressor, SieveConfig, SieveState, TruncationRule};
