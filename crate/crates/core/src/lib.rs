//! Factor-adjusted Bayesian sparse regression.
//!
//! Covariates are modelled as `X = F Bᵀ + U`; latent factors and
//! idiosyncratic parts are estimated by PCA and the response is regressed
//! on both with a dense Gaussian prior on the factor coefficients and a
//! spike-and-slab prior on the idiosyncratic ones. The crate also carries
//! the lasso and principal-component baselines, a simulation harness and
//! a rolling-window forecaster.
//!
//! Numerical code is generic over [`Real`]; the aliases below fix `f64`,
//! which is what the command-line tool uses.

pub mod baselines;
pub mod bench;
pub mod cli;
pub mod error;
pub mod factor;
pub mod forecast;
pub mod gibbs;
pub mod linalg;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use rng::RngStream;
pub use scalar::Real;

pub type Matrix = linalg::Matrix<f64>;
pub type DataMatrix = factor::DataMatrix<f64>;
pub type FactorDecomposition = factor::FactorDecomposition<f64>;
pub type PriorConfig = gibbs::PriorConfig<f64>;
pub type GibbsState = gibbs::GibbsState<f64>;
pub type ChainResult = gibbs::ChainResult<f64>;
pub type LassoFit = baselines::LassoFit<f64>;
pub type PcrFit = baselines::PcrFit<f64>;
pub type PanelData = forecast::PanelData<f64>;
pub type ForecastResult = forecast::ForecastResult<f64>;
