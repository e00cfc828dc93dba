//! Conditional inclusion probability of one covariate given the rest of
//! the support, with the coefficients integrated out.
//!
//! With `S_ω = W_ω W_ωᵀ + I` and `r = Y - F̂α`, adding `j` to `ω` changes
//! the collapsed density by the factor
//!
//! ```text
//! d_j^{-1/2} exp( (W_jᵀ S_ω⁻¹ r)² / (2 σ² d_j) ),   d_j = 1 + W_jᵀ S_ω⁻¹ W_j
//! ```
//!
//! Both quadratic forms are evaluated through the `|ω| x |ω|` matrix
//! `A_ω = W_ωᵀ W_ω + I` using `S_ω⁻¹ = I - W_ω A_ω⁻¹ W_ωᵀ`, so `S_ω` is never
//! formed.

use crate::error::{Error, Result};
use crate::gibbs::prior::{PriorConfig, ScaledDesign};
use crate::gibbs::sampler::GibbsState;
use crate::linalg::{dot, Cholesky};
use crate::scalar::Real;

/// Cholesky factor of `A_ω` together with `L⁻¹ W_ωᵀ r`.
pub(crate) struct SupportFactor<T> {
    support: Vec<usize>,
    chol: Cholesky<T>,
    z: Vec<T>,
}

impl<T: Real> SupportFactor<T> {
    /// `wtr[j]` must hold `W_jᵀ r` for every column.
    pub(crate) fn new(design: &ScaledDesign<T>, support: Vec<usize>, wtr: &[T]) -> Self {
        let m = support.len();
        let chol = Cholesky::factor_with(m, |a, b| {
            let g = design.cross(support[a], support[b]);
            if a == b {
                g + T::one()
            } else {
                g
            }
        })
        .expect("WᵀW + I is positive definite");
        let mut z: Vec<T> = support.iter().map(|&j| wtr[j]).collect();
        chol.forward(&mut z);
        Self { support, chol, z }
    }

    /// Log Bayes factor of `ω ∪ {j}` against `ω` for `j ∉ ω`.
    pub(crate) fn log_bayes_factor(&self, design: &ScaledDesign<T>, j: usize, wtr_j: T, sigma2: T) -> T {
        let mut y: Vec<T> = self.support.iter().map(|&a| design.cross(a, j)).collect();
        self.chol.forward(&mut y);
        let d = T::one() + design.column_sq(j) - dot(&y, &y);
        let q = wtr_j - dot(&y, &self.z);
        -T::lit(0.5) * d.ln() + q * q / (T::lit(2.0) * sigma2 * d)
    }
}

#[inline]
pub(crate) fn logistic<T: Real>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `P(j ∈ ξ | ξ \ {j}, α, σ², Y)` under the collapsed conditional.
///
/// `falpha` is `F̂α`. The current membership of `j` in `state.xi` does not
/// matter; only the rest of the support is used.
pub fn flip_probability<T: Real>(
    state: &GibbsState<T>,
    j: usize,
    design: &ScaledDesign<T>,
    falpha: &[T],
    y: &[T],
    prior: &PriorConfig<T>,
) -> Result<T> {
    if !(state.sigma2 > T::zero()) {
        return Err(Error::Domain(format!(
            "sigma2 must be positive, got {}",
            state.sigma2
        )));
    }
    let (n, p) = (design.n(), design.p());
    if j >= p || y.len() != n || falpha.len() != n {
        return Err(Error::Dimension(format!(
            "index {j}, response length {}, F̂α length {} for a {n}x{p} design",
            y.len(),
            falpha.len()
        )));
    }
    let r: Vec<T> = y.iter().zip(falpha).map(|(&a, &b)| a - b).collect();
    let omega: Vec<usize> = state.xi.iter().copied().filter(|&a| a != j).collect();
    let mut wtr = vec![T::zero(); p];
    for &a in omega.iter().chain(std::iter::once(&j)) {
        wtr[a] = dot(design.column(a), &r);
    }
    let factor = SupportFactor::new(design, omega, &wtr);
    let log_ratio = prior.log_prior_odds(p) + factor.log_bayes_factor(design, j, wtr[j], state.sigma2);
    Ok(logistic(log_ratio))
}
