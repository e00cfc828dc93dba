use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::factor::FactorDecomposition;
use crate::gibbs::flip::{logistic, SupportFactor};
use crate::gibbs::prior::{rescale_design, PriorConfig, ScaledDesign};
use crate::linalg::{axpy, dot, Cholesky, Matrix};
use crate::rng::{sample_inverse_gamma, RngStream};
use crate::scalar::Real;

/// One state of the chain.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsState<T> {
    pub sigma2: T,
    pub alpha: Vec<T>,
    /// Idiosyncratic coefficients on the original scale, `β_j = τ_j γ_j`.
    pub beta: Vec<T>,
    /// Unit-scale coefficients used internally by the sampler.
    pub gamma: Vec<T>,
    /// Support, sorted ascending.
    pub xi: Vec<usize>,
    /// `Y - F̂α - W_ξ γ_ξ`, maintained incrementally.
    pub cached_residual: Vec<T>,
}

impl<T: Real> GibbsState<T> {
    /// `(σ, α, β) = (1, 0, 0)` with an empty support.
    pub fn initial(n: usize, p: usize, k: usize, y: &[T]) -> Self {
        debug_assert_eq!(y.len(), n);
        Self {
            sigma2: T::one(),
            alpha: vec![T::zero(); k],
            beta: vec![T::zero(); p],
            gamma: vec![T::zero(); p],
            xi: Vec::new(),
            cached_residual: y.to_vec(),
        }
    }

    pub fn model_size(&self) -> usize {
        self.xi.len()
    }

    /// Recomputes `Y - F̂α - W_ξ γ_ξ` from scratch.
    pub fn recompute_residual(&self, design: &ScaledDesign<T>, fhat: &Matrix<T>, y: &[T]) -> Vec<T> {
        let fa = factor_fit(fhat, &self.alpha);
        let wg = design.mul_support(&self.xi, &self.gamma);
        y.iter()
            .zip(&fa)
            .zip(&wg)
            .map(|((&yi, &a), &b)| yi - a - b)
            .collect()
    }

    fn sync_beta(&mut self, tau: &[T]) {
        for ((b, &g), &t) in self.beta.iter_mut().zip(&self.gamma).zip(tau) {
            *b = g * t;
        }
    }
}

fn factor_fit<T: Real>(fhat: &Matrix<T>, alpha: &[T]) -> Vec<T> {
    if alpha.is_empty() {
        vec![T::zero(); fhat.rows()]
    } else {
        fhat.mul_vec(alpha).expect("alpha matches factor count")
    }
}

fn check_sigma2<T: Real>(sigma2: T) -> Result<()> {
    if sigma2 > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("sigma2 must be positive, got {sigma2}")))
    }
}

/// One random scan over all inclusion indicators, in place.
///
/// Coefficients of removed covariates are zeroed at once (and the residual
/// cache adjusted); newly added covariates keep `γ_j = 0` until the next
/// coefficient draw.
pub(crate) fn scan_support_in_place<T: Real>(
    state: &mut GibbsState<T>,
    design: &ScaledDesign<T>,
    fhat: &Matrix<T>,
    y: &[T],
    prior: &PriorConfig<T>,
    rng: &mut RngStream,
) -> Result<()> {
    check_sigma2(state.sigma2)?;
    let p = design.p();
    let fa = factor_fit(fhat, &state.alpha);
    let r: Vec<T> = y.iter().zip(&fa).map(|(&a, &b)| a - b).collect();
    let wtr = design.tr_mul(&r);
    let log_odds = prior.log_prior_odds(p);

    let mut member = vec![false; p];
    for &j in &state.xi {
        member[j] = true;
    }
    let mut support = state.xi.clone();
    let mut cached: Option<SupportFactor<T>> = None;

    for j in rng.permutation(p) {
        let bf = if member[j] {
            let omega: Vec<usize> = support.iter().copied().filter(|&a| a != j).collect();
            SupportFactor::new(design, omega, &wtr).log_bayes_factor(design, j, wtr[j], state.sigma2)
        } else {
            cached
                .get_or_insert_with(|| SupportFactor::new(design, support.clone(), &wtr))
                .log_bayes_factor(design, j, wtr[j], state.sigma2)
        };
        let prob = logistic(log_odds + bf);
        let include = T::lit(rng.uniform()) < prob;
        if include != member[j] {
            member[j] = include;
            cached = None;
            if include {
                support.push(j);
            } else {
                support.retain(|&a| a != j);
                let g = state.gamma[j];
                if g != T::zero() {
                    axpy(g, design.column(j), &mut state.cached_residual);
                    state.gamma[j] = T::zero();
                    state.beta[j] = T::zero();
                }
            }
        }
    }
    support.sort_unstable();
    state.xi = support;
    Ok(())
}

/// One random scan of the inclusion indicators; returns the updated state.
pub fn scan_support<T: Real>(
    state: &GibbsState<T>,
    design: &ScaledDesign<T>,
    fhat: &Matrix<T>,
    y: &[T],
    prior: &PriorConfig<T>,
    rng: &mut RngStream,
) -> Result<GibbsState<T>> {
    let mut next = state.clone();
    scan_support_in_place(&mut next, design, fhat, y, prior, rng)?;
    Ok(next)
}

/// Mean and unit-scale covariance of a Gaussian full conditional; the
/// actual covariance is `σ² · cov_unit`.
#[derive(Debug, Clone)]
pub struct GaussianConditional<T> {
    pub mean: Vec<T>,
    pub cov_unit: Matrix<T>,
}

fn support_precision<T: Real>(xi: &[usize], design: &ScaledDesign<T>) -> Cholesky<T> {
    Cholesky::factor_with(xi.len(), |a, b| {
        let g = design.cross(xi[a], xi[b]);
        if a == b {
            g + T::one()
        } else {
            g
        }
    })
    .expect("WᵀW + I is positive definite")
}

/// Conditional of `γ_ξ` given `ξ`, `α`, `σ²`: mean `(W_ξᵀW_ξ + I)⁻¹W_ξᵀr`
/// with `r = Y - F̂α`, covariance `σ²(W_ξᵀW_ξ + I)⁻¹`.
pub fn beta_conditional<T: Real>(
    xi: &[usize],
    design: &ScaledDesign<T>,
    r: &[T],
) -> GaussianConditional<T> {
    let m = xi.len();
    if m == 0 {
        return GaussianConditional {
            mean: Vec::new(),
            cov_unit: Matrix::zeros(0, 0),
        };
    }
    let chol = support_precision(xi, design);
    let rhs: Vec<T> = xi.iter().map(|&j| dot(design.column(j), r)).collect();
    let mean = chol.solve(&rhs);
    let mut cov = Matrix::zeros(m, m);
    for c in 0..m {
        let mut e = vec![T::zero(); m];
        e[c] = T::one();
        for (row, v) in chol.solve(&e).into_iter().enumerate() {
            cov[(row, c)] = v;
        }
    }
    GaussianConditional {
        mean,
        cov_unit: cov,
    }
}

/// Draws unit-scale coefficients given the support. Entries off the
/// support are exactly zero.
pub fn sample_beta_given<T: Real>(
    xi: &[usize],
    design: &ScaledDesign<T>,
    falpha: &[T],
    y: &[T],
    sigma2: T,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    check_sigma2(sigma2)?;
    let r: Vec<T> = y.iter().zip(falpha).map(|(&a, &b)| a - b).collect();
    let mut gamma = vec![T::zero(); design.p()];
    for (j, v) in xi.iter().zip(draw_support_coefficients(xi, design, &r, sigma2, rng)) {
        gamma[*j] = v;
    }
    Ok(gamma)
}

fn draw_support_coefficients<T: Real>(
    xi: &[usize],
    design: &ScaledDesign<T>,
    r: &[T],
    sigma2: T,
    rng: &mut RngStream,
) -> Vec<T> {
    if xi.is_empty() {
        return Vec::new();
    }
    let chol = support_precision(xi, design);
    let rhs: Vec<T> = xi.iter().map(|&j| dot(design.column(j), r)).collect();
    let mean = chol.solve(&rhs);
    // precision A = L Lᵀ, so L⁻ᵀ z has covariance A⁻¹
    let mut noise: Vec<T> = rng.normal_vec(xi.len());
    chol.backward(&mut noise);
    let sigma = sigma2.sqrt();
    mean.iter().zip(&noise).map(|(&m, &e)| m + sigma * e).collect()
}

/// Draws `α ~ N(F̂ᵀ(Y - Û_ξβ_ξ)/(n+1), σ² I/(n+1))`, which relies on
/// `F̂ᵀF̂ = nI`. `beta_part` is `Û_ξβ_ξ` (equivalently `W_ξγ_ξ`).
pub fn sample_alpha_given<T: Real>(
    beta_part: &[T],
    fhat: &Matrix<T>,
    y: &[T],
    sigma2: T,
    rng: &mut RngStream,
) -> Result<Vec<T>> {
    check_sigma2(sigma2)?;
    let k = fhat.cols();
    if k == 0 {
        return Ok(Vec::new());
    }
    let target: Vec<T> = y.iter().zip(beta_part).map(|(&a, &b)| a - b).collect();
    let n1 = T::of_usize(fhat.rows() + 1);
    let sd = (sigma2 / n1).sqrt();
    let mean = fhat.tr_mul_vec(&target)?;
    Ok(mean
        .into_iter()
        .map(|m| m / n1 + sd * T::lit(rng.standard_normal()))
        .collect())
}

/// Shape and scale of the inverse-gamma conditional of `σ²`.
pub fn sigma2_conditional<T: Real>(
    alpha: &[T],
    gamma: &[T],
    xi: &[usize],
    residual: &[T],
    prior: &PriorConfig<T>,
) -> (T, T) {
    let half = T::lit(0.5);
    let shape = prior.a0 + T::of_usize(xi.len() + alpha.len() + residual.len()) * half;
    let g2: T = xi.iter().map(|&j| gamma[j] * gamma[j]).sum();
    let scale = prior.b0 + (g2 + dot(alpha, alpha) + dot(residual, residual)) * half;
    (shape, scale)
}

pub fn sample_sigma2_given<T: Real>(
    alpha: &[T],
    gamma: &[T],
    xi: &[usize],
    residual: &[T],
    prior: &PriorConfig<T>,
    rng: &mut RngStream,
) -> Result<T> {
    let (shape, scale) = sigma2_conditional(alpha, gamma, xi, residual, prior);
    sample_inverse_gamma(rng, shape, scale)
}

/// Chain length and burn-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    pub iterations: usize,
    /// Defaults to `iterations / 2`.
    pub burn_in: Option<usize>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            iterations: 20,
            burn_in: None,
        }
    }
}

impl ChainConfig {
    pub fn new(iterations: usize, burn_in: usize) -> Self {
        Self {
            iterations,
            burn_in: Some(burn_in),
        }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in.unwrap_or(self.iterations / 2)
    }
}

/// Retained draws and their summaries.
#[derive(Debug, Clone)]
pub struct ChainResult<T> {
    pub samples: Vec<GibbsState<T>>,
    pub burn_in: usize,
    pub total_iters: usize,
    pub posterior_mean_beta: Vec<T>,
    pub posterior_mean_alpha: Vec<T>,
    pub posterior_mean_sigma2: T,
    /// Most frequently visited support; ties go to the smaller model, then
    /// the lexicographically smaller one.
    pub modal_model: Vec<usize>,
    pub tau: Vec<T>,
}

impl<T: Real> ChainResult<T> {
    pub fn avg_model_size(&self) -> T {
        let total: usize = self.samples.iter().map(GibbsState::model_size).sum();
        T::of_usize(total) / T::of_usize(self.samples.len())
    }

    pub fn inclusion_probabilities(&self) -> Vec<T> {
        let mut counts = vec![0usize; self.posterior_mean_beta.len()];
        for s in &self.samples {
            for &j in &s.xi {
                counts[j] += 1;
            }
        }
        let m = T::of_usize(self.samples.len());
        counts.into_iter().map(|c| T::of_usize(c) / m).collect()
    }

    /// Thresholding of the posterior-mean coefficients at
    /// `σ̄ √(|ξ̂| log p / n)`, with `σ̄² ` the posterior mean of `σ²` and
    /// `ξ̂` the modal model.
    pub fn threshold_selection(&self, n: usize) -> Vec<usize> {
        threshold_select(
            &self.posterior_mean_beta,
            self.posterior_mean_sigma2.sqrt(),
            self.modal_model.len(),
            n,
        )
    }

    fn summarise(samples: Vec<GibbsState<T>>, burn_in: usize, total_iters: usize, tau: Vec<T>) -> Self {
        let m = T::of_usize(samples.len());
        let p = tau.len();
        let k = samples[0].alpha.len();
        let mut beta = vec![T::zero(); p];
        let mut alpha = vec![T::zero(); k];
        let mut sigma2 = T::zero();
        let mut counts: HashMap<&[usize], usize> = HashMap::new();
        for s in &samples {
            for (acc, &b) in beta.iter_mut().zip(&s.beta) {
                *acc += b;
            }
            for (acc, &a) in alpha.iter_mut().zip(&s.alpha) {
                *acc += a;
            }
            sigma2 += s.sigma2;
            *counts.entry(s.xi.as_slice()).or_default() += 1;
        }
        for v in beta.iter_mut().chain(alpha.iter_mut()) {
            *v /= m;
        }
        sigma2 /= m;
        let modal_model = counts
            .into_iter()
            .max_by(|(a, ca), (b, cb)| {
                ca.cmp(cb)
                    .then_with(|| b.len().cmp(&a.len()))
                    .then_with(|| b.cmp(a))
            })
            .map(|(xi, _)| xi.to_vec())
            .unwrap_or_default();
        Self {
            samples,
            burn_in,
            total_iters,
            posterior_mean_beta: beta,
            posterior_mean_alpha: alpha,
            posterior_mean_sigma2: sigma2,
            modal_model,
            tau,
        }
    }
}

/// One full sweep: support, coefficients, factor coefficients, variance.
pub(crate) fn gibbs_iteration<T: Real>(
    state: &mut GibbsState<T>,
    design: &ScaledDesign<T>,
    fhat: &Matrix<T>,
    y: &[T],
    prior: &PriorConfig<T>,
    rng: &mut RngStream,
) -> Result<()> {
    // (1) support given α, σ²
    scan_support_in_place(state, design, fhat, y, prior, rng)?;

    // (2) γ_ξ given ξ, α, σ²
    let fa = factor_fit(fhat, &state.alpha);
    let r: Vec<T> = y.iter().zip(&fa).map(|(&a, &b)| a - b).collect();
    let drawn = draw_support_coefficients(&state.xi, design, &r, state.sigma2, rng);
    for (&j, g) in state.xi.iter().zip(drawn) {
        let delta = g - state.gamma[j];
        axpy(-delta, design.column(j), &mut state.cached_residual);
        state.gamma[j] = g;
    }

    // (3) α given γ, σ²
    if fhat.cols() > 0 {
        let beta_part = design.mul_support(&state.xi, &state.gamma);
        let alpha = sample_alpha_given(&beta_part, fhat, y, state.sigma2, rng)?;
        let delta: Vec<T> = alpha.iter().zip(&state.alpha).map(|(&a, &b)| a - b).collect();
        let shift = fhat.mul_vec(&delta)?;
        for (r, s) in state.cached_residual.iter_mut().zip(&shift) {
            *r -= *s;
        }
        state.alpha = alpha;
    }

    // (4) σ² given the rest
    state.sigma2 = sample_sigma2_given(
        &state.alpha,
        &state.gamma,
        &state.xi,
        &state.cached_residual,
        prior,
        rng,
    )?;
    state.sync_beta(&design.tau);
    Ok(())
}

/// Runs the sampler on the pseudo-posterior built from a factor
/// decomposition.
pub fn run_chain<T: Real>(
    dec: &FactorDecomposition<T>,
    y: &[T],
    prior: &PriorConfig<T>,
    config: &ChainConfig,
    init: Option<GibbsState<T>>,
    rng: &mut RngStream,
) -> Result<ChainResult<T>> {
    prior.validate(dec.p())?;
    let design = rescale_design(dec, prior)?;
    run_chain_on(&design, &dec.fhat, y, prior, config, init, rng)
}

/// As [`run_chain`] with an explicit unit-scale design.
pub fn run_chain_on<T: Real>(
    design: &ScaledDesign<T>,
    fhat: &Matrix<T>,
    y: &[T],
    prior: &PriorConfig<T>,
    config: &ChainConfig,
    init: Option<GibbsState<T>>,
    rng: &mut RngStream,
) -> Result<ChainResult<T>> {
    let (n, p, k) = (design.n(), design.p(), fhat.cols());
    if y.len() != n || fhat.rows() != n {
        return Err(Error::Dimension(format!(
            "response of length {} and {}-row factors for {n} observations",
            y.len(),
            fhat.rows()
        )));
    }
    prior.validate(p)?;
    let burn_in = config.burn_in();
    if burn_in >= config.iterations {
        return Err(Error::Config(format!(
            "burn-in {burn_in} must be smaller than the {} iterations",
            config.iterations
        )));
    }
    let mut state = match init {
        Some(s) => {
            if s.beta.len() != p || s.alpha.len() != k || s.cached_residual.len() != n {
                return Err(Error::Dimension("initial state does not match the design".into()));
            }
            s
        }
        None => GibbsState::initial(n, p, k, y),
    };
    let mut samples = Vec::with_capacity(config.iterations - burn_in);
    for it in 0..config.iterations {
        gibbs_iteration(&mut state, design, fhat, y, prior, rng)?;
        if it >= burn_in {
            samples.push(state.clone());
        }
    }
    Ok(ChainResult::summarise(
        samples,
        burn_in,
        config.iterations,
        design.tau.clone(),
    ))
}

/// `{j : |β_j| ≥ σ √(|ξ| log p / n)}`; empty when `|ξ| = 0`.
pub fn threshold_select<T: Real>(beta: &[T], sigma: T, model_size: usize, n: usize) -> Vec<usize> {
    if model_size == 0 {
        return Vec::new();
    }
    let p = T::of_usize(beta.len());
    let thr = sigma * (T::of_usize(model_size) * p.ln() / T::of_usize(n)).sqrt();
    beta.iter()
        .enumerate()
        .filter(|(_, b)| b.abs() >= thr)
        .map(|(j, _)| j)
        .collect()
}
