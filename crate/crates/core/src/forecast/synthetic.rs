use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forecast::ingest::PanelData;
use crate::linalg::{dot, Matrix};
use crate::rng::RngStream;

/// Factor-structured monthly-style panel with a response driven by the
/// previous period's factors and a few idiosyncratic components. The
/// default has three persistent factors, a dominant first one that alone
/// moves the response, and three relevant covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticPanelConfig {
    pub total: usize,
    pub p: usize,
    pub k: usize,
    /// Scale of the first factor's loadings relative to the others.
    pub lead_strength: f64,
    /// Factor persistence, `f_t = φ f_{t-1} + √(1-φ²) e_t`.
    pub persistence: f64,
    pub alpha: Vec<f64>,
    /// Nonzero idiosyncratic coefficients, placed on the first covariates.
    pub beta: Vec<f64>,
    pub sigma: f64,
}

impl Default for SyntheticPanelConfig {
    fn default() -> Self {
        Self {
            total: 480,
            p: 131,
            k: 3,
            lead_strength: 1.5,
            persistence: 0.5,
            alpha: vec![1.0, 0.0, 0.0],
            beta: vec![0.5, 0.5, 0.5],
            sigma: 1.0,
        }
    }
}

impl SyntheticPanelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.total < 3 || self.p < 1 {
            return Err(Error::Config(format!(
                "panel needs at least 3 rows and 1 covariate, got {}x{}",
                self.total, self.p
            )));
        }
        if self.alpha.len() != self.k {
            return Err(Error::Config(format!("{} factor coefficients for k = {}", self.alpha.len(), self.k)));
        }
        if self.beta.len() > self.p {
            return Err(Error::Config(format!("{} idiosyncratic coefficients for p = {}", self.beta.len(), self.p)));
        }
        if !(self.persistence.abs() < 1.0) || !(self.sigma >= 0.0) {
            return Err(Error::Config("persistence must lie in (-1, 1) and sigma be non-negative".into()));
        }
        Ok(())
    }
}

/// Draws loadings, the factor path, idiosyncratic noise and response noise
/// in that order. The response is named `y` and the covariates `x1..xp`.
pub fn synthetic_panel(cfg: &SyntheticPanelConfig, rng: &mut RngStream) -> Result<PanelData<f64>> {
    cfg.validate()?;
    let (total, p, k) = (cfg.total, cfg.p, cfg.k);
    let b = Matrix::from_fn(p, k, |_, j| {
        let v = rng.uniform_range(-1.0, 1.0);
        if j == 0 {
            cfg.lead_strength * v
        } else {
            v
        }
    });
    let innovation = (1.0 - cfg.persistence * cfg.persistence).sqrt();
    let mut f = Matrix::zeros(total, k);
    for t in 0..total {
        for j in 0..k {
            let prev = if t == 0 { rng.standard_normal() } else { f[(t - 1, j)] };
            f[(t, j)] = cfg.persistence * prev + innovation * rng.standard_normal();
        }
    }
    let u = Matrix::from_fn(total, p, |_, _| rng.standard_normal());
    let common = f.matmul(&b.transpose())?;
    let x = common.add(&u)?;
    let mut y = vec![0.0; total];
    y[0] = cfg.sigma * rng.standard_normal();
    for t in 1..total {
        let idio = dot(&u.row(t - 1)[..cfg.beta.len()], &cfg.beta);
        y[t] = dot(f.row(t - 1), &cfg.alpha) + idio + cfg.sigma * rng.standard_normal();
    }
    Ok(PanelData {
        dates: None,
        y: vec![y],
        x_raw: x,
        series_names: vec!["y".into()],
        covariate_names: (1..=p).map(|j| format!("x{j}")).collect(),
    })
}
