use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{lasso_cv_default, CvRule, lasso_fit, pcr_fit};
use crate::error::{Error, Result};
use crate::factor::{center_columns, estimate_k_from_spectrum, gram_spectrum, pca_decompose_with, DataMatrix, FactorDecomposition};
use crate::forecast::ingest::PanelData;
use crate::gibbs::{run_chain, ChainConfig, PriorConfig};
use crate::linalg::dot;
use crate::rng::RngStream;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ForecastMethod {
    FaBayes,
    GenericBayes,
    FaLasso,
    GenericLasso,
    Pcr,
}

impl ForecastMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::FaBayes => "fa-bayes",
            Self::GenericBayes => "generic-bayes",
            Self::FaLasso => "fa-lasso",
            Self::GenericLasso => "generic-lasso",
            Self::Pcr => "pcr",
        }
    }

    pub fn is_factor_adjusted(self) -> bool {
        matches!(self, Self::FaBayes | Self::FaLasso)
    }
}

/// Number of factors used by the factor-adjusted methods in each window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KPolicy {
    Fixed(usize),
    /// Eigenvalue-ratio estimate, recomputed per window.
    Estimate(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    pub window: usize,
    pub method: ForecastMethod,
    pub k_policy: KPolicy,
    pub s0: f64,
    pub pcr_components: usize,
    /// Index into [`PanelData::y`].
    pub response: usize,
    pub iterations: usize,
    pub burn_in: usize,
    /// Fixed lasso penalty; cross-validated per window when unset.
    pub lasso_lambda: Option<f64>,
    /// Penalty choice when `lasso_lambda` is unset.
    pub lasso_cv_rule: CvRule,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window: 100,
            method: ForecastMethod::FaBayes,
            k_policy: KPolicy::Estimate(10),
            s0: 10.0,
            pcr_components: 8,
            response: 0,
            iterations: 20,
            burn_in: 10,
            lasso_lambda: None,
            lasso_cv_rule: CvRule::OneStandardError,
        }
    }
}

impl RollingConfig {
    pub fn validate<T: Real>(&self, panel: &PanelData<T>) -> Result<()> {
        let total = panel.len();
        if self.window < 3 || self.window + 2 > total {
            return Err(Error::Config(format!(
                "window must satisfy 3 <= window and window + 2 <= {total} rows, got {}",
                self.window
            )));
        }
        if self.response >= panel.y.len() {
            return Err(Error::Config(format!(
                "response index {} but the panel has {} response series",
                self.response,
                panel.y.len()
            )));
        }
        if !(self.s0 > 0.0) {
            return Err(Error::Config(format!("s0 must be positive, got {}", self.s0)));
        }
        if self.burn_in >= self.iterations {
            return Err(Error::Config(format!(
                "burn-in {} leaves no draws out of {} iterations",
                self.burn_in, self.iterations
            )));
        }
        if self.method == ForecastMethod::Pcr && self.pcr_components < 1 {
            return Err(Error::Config("pcr needs at least one component".into()));
        }
        if let Some(l) = self.lasso_lambda {
            if !(l >= 0.0) {
                return Err(Error::Config(format!("lasso penalty must be non-negative, got {l}")));
            }
        }
        Ok(())
    }
}

/// Time-aligned one-step-ahead forecasts. Index `i` of every vector refers
/// to the 1-based time `t[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastResult<T> {
    pub t: Vec<usize>,
    pub predictions: Vec<T>,
    pub actuals: Vec<T>,
    pub rolling_means: Vec<T>,
    pub model_sizes: Vec<T>,
    pub r2: T,
}

impl<T: Real> ForecastResult<T> {
    pub fn avg_model_size(&self) -> T {
        let m = self.model_sizes.len();
        if m == 0 {
            return T::zero();
        }
        self.model_sizes.iter().copied().sum::<T>() / T::of_usize(m)
    }
}

/// `1 - Σ(ŷ_t - y_t)² / Σ(ȳ_t - y_t)²`.
pub fn out_of_sample_r2<T: Real>(result: &ForecastResult<T>) -> Result<T> {
    let n = result.actuals.len();
    if result.predictions.len() != n || result.rolling_means.len() != n {
        return Err(Error::Dimension(format!(
            "{} predictions and {} rolling means for {n} actuals",
            result.predictions.len(),
            result.rolling_means.len()
        )));
    }
    let mut sse = T::zero();
    let mut base = T::zero();
    for i in 0..n {
        let y = result.actuals[i];
        sse += (result.predictions[i] - y).powi(2);
        base += (result.rolling_means[i] - y).powi(2);
    }
    if !(base > T::zero()) {
        return Err(Error::DegenerateSeries(
            "actuals equal the rolling means at every forecast time".into(),
        ));
    }
    Ok(T::one() - sse / base)
}

struct WindowForecast<T> {
    prediction: T,
    mean: T,
    model_size: T,
}

/// Refits on every window of `cfg.window` lagged pairs and predicts the next
/// value. Window `t` draws from substream `t` of `rng`, so results do not
/// depend on scheduling.
pub fn rolling_forecast<T: Real>(panel: &PanelData<T>, cfg: &RollingConfig, rng: &RngStream) -> Result<ForecastResult<T>> {
    cfg.validate(panel)?;
    let total = panel.len();
    let y = &panel.y[cfg.response];
    let times: Vec<usize> = (cfg.window + 2..=total).collect();
    let fits: Vec<WindowForecast<T>> = times
        .par_iter()
        .map(|&t| {
            let mut stream = rng.substream(t as u64);
            forecast_at(panel, y, cfg, t, &mut stream).map_err(|e| Error::Window {
                t,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;
    let mut result = ForecastResult {
        actuals: times.iter().map(|&t| y[t - 1]).collect(),
        predictions: fits.iter().map(|f| f.prediction).collect(),
        rolling_means: fits.iter().map(|f| f.mean).collect(),
        model_sizes: fits.iter().map(|f| f.model_size).collect(),
        t: times,
        r2: T::nan(),
    };
    result.r2 = out_of_sample_r2(&result)?;
    Ok(result)
}

/// Forecast of `y_t` (1-based) from the pairs `(y_i, x_{i-1})`,
/// `i = t - window .. t - 1`.
fn forecast_at<T: Real>(
    panel: &PanelData<T>,
    y: &[T],
    cfg: &RollingConfig,
    t: usize,
    rng: &mut RngStream,
) -> Result<WindowForecast<T>> {
    let w = cfg.window;
    // 0-based: targets y[t-1-w .. t-2], covariates x[t-2-w .. t-3], predictor x[t-2]
    let first = t - 1 - w;
    let targets = &y[first..t - 1];
    let rows: Vec<usize> = (first - 1..t - 2).collect();
    let x_new = panel.x_raw.row(t - 2);
    let mean = targets.iter().copied().sum::<T>() / T::of_usize(w);

    if cfg.method == ForecastMethod::Pcr {
        let dm = DataMatrix::raw(panel.x_raw.select_rows(&rows));
        let fit = pcr_fit(&dm, targets, cfg.pcr_components)?;
        return Ok(WindowForecast {
            prediction: fit.predict(x_new)?,
            mean,
            model_size: T::of_usize(fit.m),
        });
    }

    let dm = center_columns(&panel.x_raw.select_rows(&rows))?;
    let yc: Vec<T> = targets.iter().map(|&v| v - mean).collect();
    let dec = window_decomposition(&dm, cfg)?;
    let (f_new, u_new) = dec.project(&dm.center_row(x_new))?;
    let (alpha, beta, model_size) = match cfg.method {
        ForecastMethod::FaBayes | ForecastMethod::GenericBayes => {
            let prior = PriorConfig::default().with_s0(T::lit(cfg.s0));
            let chain = ChainConfig::new(cfg.iterations, cfg.burn_in);
            let res = run_chain(&dec, &yc, &prior, &chain, None, rng)?;
            let size = res.avg_model_size();
            (res.posterior_mean_alpha, res.posterior_mean_beta, size)
        }
        _ => {
            let fit = match cfg.lasso_lambda {
                Some(l) => lasso_fit(&dec, &yc, T::lit(l))?,
                None => lasso_cv_default(&dec, &yc, cfg.lasso_cv_rule, rng)?,
            };
            let size = T::of_usize(fit.selected.len());
            (fit.alpha_hat, fit.beta_hat, size)
        }
    };
    Ok(WindowForecast {
        prediction: mean + dot(&f_new, &alpha) + dot(&u_new, &beta),
        mean,
        model_size,
    })
}

fn window_decomposition<T: Real>(dm: &DataMatrix<T>, cfg: &RollingConfig) -> Result<FactorDecomposition<T>> {
    if !cfg.method.is_factor_adjusted() {
        return Ok(FactorDecomposition::without_factors(dm));
    }
    let spectrum = gram_spectrum(&dm.x)?;
    let k = match cfg.k_policy {
        KPolicy::Fixed(0) => return Ok(FactorDecomposition::without_factors(dm)),
        KPolicy::Fixed(k) => k,
        KPolicy::Estimate(k_max) => {
            // nonzero covariance eigenvalues coincide with those of the Gram matrix
            let usable = (dm.n() - 1).min(dm.p());
            if k_max < 1 || k_max + 1 > usable {
                return Err(Error::Config(format!(
                    "k_max must lie in 1..={} for windows of {} rows and {} covariates, got {k_max}",
                    usable.saturating_sub(1),
                    dm.n(),
                    dm.p()
                )));
            }
            estimate_k_from_spectrum(&spectrum.eigenvalues, k_max)?
        }
    };
    pca_decompose_with(dm, &spectrum, k)
}
