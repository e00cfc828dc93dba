use serde::{Deserialize, Serialize};

use crate::baselines::LassoFit;
use crate::bench::sim::Truth;
use crate::factor::FactorDecomposition;
use crate::gibbs::ChainResult;

/// The five accuracy measures for one fit (or their replicate averages).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EvalReport {
    pub beta_l2_error: f64,
    pub model_selection_rate: f64,
    pub sure_screening_rate: f64,
    pub avg_model_size: f64,
    pub sigma2_rel_error: f64,
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `support` must be sorted.
fn contains_all(support: &[usize], truth: &[usize]) -> bool {
    truth.iter().all(|j| support.binary_search(j).is_ok())
}

/// Scores the retained draws of a chain against the truth.
pub fn evaluate_chain(chain: &ChainResult<f64>, truth: &Truth) -> EvalReport {
    let m = chain.samples.len() as f64;
    let mut hits = 0usize;
    let mut screens = 0usize;
    let mut sizes = 0usize;
    for s in &chain.samples {
        if s.xi == truth.support {
            hits += 1;
        }
        if contains_all(&s.xi, &truth.support) {
            screens += 1;
        }
        sizes += s.xi.len();
    }
    EvalReport {
        beta_l2_error: l2_distance(&chain.posterior_mean_beta, &truth.beta_star),
        model_selection_rate: hits as f64 / m,
        sure_screening_rate: screens as f64 / m,
        avg_model_size: sizes as f64 / m,
        sigma2_rel_error: (chain.posterior_mean_sigma2 - truth.sigma2_star).abs() / truth.sigma2_star,
    }
}

/// Scores a point estimate: the rates are 0 or 1 and `σ²` is the residual
/// variance with `|selected| + k` degrees of freedom removed.
pub fn evaluate_lasso(fit: &LassoFit<f64>, dec: &FactorDecomposition<f64>, y: &[f64], truth: &Truth) -> EvalReport {
    let n = y.len();
    let fa = if dec.k == 0 {
        vec![0.0; n]
    } else {
        dec.fhat.mul_vec(&fit.alpha_hat).expect("alpha matches factors")
    };
    let ub = dec.uhat.mul_vec(&fit.beta_hat).expect("beta matches covariates");
    let rss: f64 = (0..n).map(|i| (y[i] - fa[i] - ub[i]).powi(2)).sum();
    let used = fit.selected.len() + dec.k;
    let dof = if used < n { n - used } else { n };
    let sigma2 = rss / dof as f64;
    let hit = fit.selected == truth.support;
    let screen = contains_all(&fit.selected, &truth.support);
    EvalReport {
        beta_l2_error: l2_distance(&fit.beta_hat, &truth.beta_star),
        model_selection_rate: if hit { 1.0 } else { 0.0 },
        sure_screening_rate: if screen { 1.0 } else { 0.0 },
        avg_model_size: fit.selected.len() as f64,
        sigma2_rel_error: (sigma2 - truth.sigma2_star).abs() / truth.sigma2_star,
    }
}

/// Field-wise mean. Each field is summed in sorted order so the result does
/// not depend on the order of the reports.
pub fn average(reports: &[EvalReport]) -> EvalReport {
    let mean = |get: fn(&EvalReport) -> f64| {
        let mut v: Vec<f64> = reports.iter().map(get).collect();
        v.sort_by(f64::total_cmp);
        v.iter().sum::<f64>() / v.len() as f64
    };
    EvalReport {
        beta_l2_error: mean(|r| r.beta_l2_error),
        model_selection_rate: mean(|r| r.model_selection_rate),
        sure_screening_rate: mean(|r| r.sure_screening_rate),
        avg_model_size: mean(|r| r.avg_model_size),
        sigma2_rel_error: mean(|r| r.sigma2_rel_error),
    }
}
