use serde::{Deserialize, Serialize};

use crate::baselines::CvRule;
use crate::error::{Error, Result};
use crate::gibbs::ChainConfig;
use crate::linalg::Matrix;
use crate::rng::RngStream;

/// Data-generating scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// `Y = Fα* + Uβ* + σ*ε` with correlated covariates.
    FactorAdjusted,
    /// No common factors: `X = U`.
    NoCorrelation,
    /// `α* = Bᵀβ*`, so `Y = Xβ* + σ*ε`.
    SubModel,
}

/// Estimation method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    FaBayes,
    GenericBayes,
    FaLasso,
    GenericLasso,
}

impl Method {
    pub fn is_bayes(self) -> bool {
        matches!(self, Method::FaBayes | Method::GenericBayes)
    }

    pub fn is_factor_adjusted(self) -> bool {
        matches!(self, Method::FaBayes | Method::FaLasso)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::FaBayes => "fa-bayes",
            Method::GenericBayes => "generic-bayes",
            Method::FaLasso => "fa-lasso",
            Method::GenericLasso => "generic-lasso",
        }
    }
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::FactorAdjusted => "factor-adjusted",
            Scenario::NoCorrelation => "no-correlation",
            Scenario::SubModel => "sub-model",
        }
    }
}

/// One simulation setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub n: usize,
    pub p: usize,
    pub s: usize,
    pub k: usize,
    pub alpha_star: Vec<f64>,
    pub beta_star_values: Vec<f64>,
    pub sigma_star: f64,
    pub scenario: Scenario,
    pub replicates: usize,
    /// Number of estimated factors; `0` or a generic method fits without
    /// factor adjustment.
    pub khat_used: usize,
    pub method: Method,
    pub s0: f64,
    pub iterations: usize,
    pub burn_in: usize,
    /// Penalty choice for the lasso methods.
    pub cv_rule: CvRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n: 200,
            p: 500,
            s: 5,
            k: 3,
            alpha_star: vec![0.8, 1.0, 1.2],
            beta_star_values: vec![0.3; 5],
            sigma_star: 0.5,
            scenario: Scenario::FactorAdjusted,
            replicates: 100,
            khat_used: 3,
            method: Method::FaBayes,
            s0: 1.0,
            iterations: 20,
            burn_in: 10,
            cv_rule: CvRule::OneStandardError,
        }
    }
}

impl SimConfig {
    /// Factors fitted by the method.
    pub fn effective_khat(&self) -> usize {
        if self.method.is_factor_adjusted() {
            self.khat_used
        } else {
            0
        }
    }

    /// Factors used by the generator.
    pub fn generator_k(&self) -> usize {
        match self.scenario {
            Scenario::NoCorrelation => 0,
            _ => self.k,
        }
    }

    pub fn chain(&self) -> ChainConfig {
        ChainConfig::new(self.iterations, self.burn_in)
    }

    /// Adapts the per-dimension vectors after `s` or `k` changed: the
    /// signal values keep their first entry and `α*` cycles through its
    /// current entries.
    pub fn resize(&mut self) {
        let b = self.beta_star_values.first().copied().unwrap_or(0.3);
        self.beta_star_values.resize(self.s, b);
        if self.alpha_star.is_empty() {
            self.alpha_star = vec![1.0; self.k];
        } else {
            let base = self.alpha_star.clone();
            self.alpha_star = (0..self.k).map(|i| base[i % base.len()]).collect();
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 3 || self.p < 1 {
            return bad(format!("need n >= 3 and p >= 1, got n={}, p={}", self.n, self.p));
        }
        if self.s > self.p {
            return bad(format!("s = {} exceeds p = {}", self.s, self.p));
        }
        if self.k > self.n {
            return bad(format!("k = {} exceeds n = {}", self.k, self.n));
        }
        if self.beta_star_values.len() != self.s {
            return bad(format!(
                "{} signal values for s = {}",
                self.beta_star_values.len(),
                self.s
            ));
        }
        if self.scenario == Scenario::FactorAdjusted && self.alpha_star.len() != self.k {
            return bad(format!("{} factor coefficients for k = {}", self.alpha_star.len(), self.k));
        }
        if !(self.sigma_star > 0.0) {
            return bad(format!("sigma_star must be positive, got {}", self.sigma_star));
        }
        if self.replicates < 1 {
            return bad("at least one replicate is required".into());
        }
        if self.effective_khat() >= self.n {
            return bad(format!("khat = {} must be below n = {}", self.khat_used, self.n));
        }
        if self.method.is_bayes() && self.burn_in >= self.iterations {
            return bad(format!(
                "burn-in {} must be smaller than {} iterations",
                self.burn_in, self.iterations
            ));
        }
        if self.method.is_bayes() && !(self.s0 > 0.0 && self.s0 < self.p as f64) {
            return bad(format!("s0 must lie in (0, p), got {}", self.s0));
        }
        Ok(())
    }
}

/// Parameters a dataset was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct Truth {
    pub alpha_star: Vec<f64>,
    /// Length `p`, nonzero on `support`.
    pub beta_star: Vec<f64>,
    pub support: Vec<usize>,
    pub sigma2_star: f64,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub f: Matrix<f64>,
    pub u: Matrix<f64>,
    pub b: Matrix<f64>,
    pub x: Matrix<f64>,
    pub y: Vec<f64>,
    pub truth: Truth,
}

/// Draws `F`, `U`, `B` and `ε` in that order and assembles `X` and `Y`.
pub fn generate_dataset(cfg: &SimConfig, rng: &mut RngStream) -> Result<Dataset> {
    cfg.validate()?;
    let (n, p, k) = (cfg.n, cfg.p, cfg.generator_k());
    let f = Matrix::from_fn(n, k, |_, _| rng.standard_normal());
    let u = Matrix::from_fn(n, p, |_, _| rng.standard_normal());
    let b = Matrix::from_fn(p, k, |_, _| rng.uniform_range(-1.0, 1.0));
    let eps: Vec<f64> = rng.normal_vec(n);

    let x = if k == 0 {
        u.clone()
    } else {
        f.matmul(&b.transpose())?.add(&u)?
    };
    let mut beta_star = vec![0.0; p];
    beta_star[..cfg.s].copy_from_slice(&cfg.beta_star_values);
    let alpha_star = match cfg.scenario {
        Scenario::FactorAdjusted => cfg.alpha_star.clone(),
        Scenario::NoCorrelation => Vec::new(),
        Scenario::SubModel => b.tr_mul_vec(&beta_star)?,
    };
    let fa = if k == 0 {
        vec![0.0; n]
    } else {
        f.mul_vec(&alpha_star)?
    };
    let ub = u.mul_vec(&beta_star)?;
    let y = (0..n).map(|i| fa[i] + ub[i] + cfg.sigma_star * eps[i]).collect();
    let support = (0..p).filter(|&j| beta_star[j] != 0.0).collect();
    Ok(Dataset {
        f,
        u,
        b,
        x,
        y,
        truth: Truth {
            alpha_star,
            beta_star,
            support,
            sigma2_star: cfg.sigma_star * cfg.sigma_star,
        },
    })
}
