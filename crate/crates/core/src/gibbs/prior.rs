use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::FactorDecomposition;
use crate::linalg::{dot, Matrix};
use crate::scalar::Real;

/// Slab density for the included coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Slab {
    #[default]
    Gaussian,
}

/// Per-coefficient prior scales.
#[derive(Debug, Clone, PartialEq)]
pub enum TauPolicy<T> {
    /// `τ_j = √n / ‖Û_j‖`, which puts every column on the same footing.
    ColumnScale,
    Fixed(Vec<T>),
}

/// Hyperparameters of the spike-and-slab prior.
///
/// `σ² ~ InvGamma(a0, b0)`, `α | σ² ~ N(0, σ² I)`,
/// `1{j ∈ ξ} ~ Bernoulli(s0 / p)` and `β_j | σ² ~ N(0, τ_j² σ²)` on the
/// support.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorConfig<T> {
    pub a0: T,
    pub b0: T,
    pub s0: T,
    pub tau: TauPolicy<T>,
    pub slab: Slab,
}

impl<T: Real> Default for PriorConfig<T> {
    fn default() -> Self {
        Self {
            a0: T::one(),
            b0: T::one(),
            s0: T::one(),
            tau: TauPolicy::ColumnScale,
            slab: Slab::Gaussian,
        }
    }
}

impl<T: Real> PriorConfig<T> {
    pub fn with_s0(mut self, s0: T) -> Self {
        self.s0 = s0;
        self
    }

    pub fn validate(&self, p: usize) -> Result<()> {
        if !(self.a0 > T::zero()) || !(self.b0 > T::zero()) {
            return Err(Error::Domain(format!(
                "inverse-gamma hyperparameters must be positive, got a0={}, b0={}",
                self.a0, self.b0
            )));
        }
        if !(self.s0 > T::zero()) || !(self.s0 < T::of_usize(p)) {
            return Err(Error::Domain(format!(
                "sparsity weight must satisfy 0 < s0 < p = {p}, got {}",
                self.s0
            )));
        }
        if let TauPolicy::Fixed(tau) = &self.tau {
            if tau.len() != p {
                return Err(Error::Dimension(format!(
                    "{} prior scales for {p} covariates",
                    tau.len()
                )));
            }
            if let Some(j) = tau.iter().position(|&t| !(t > T::zero())) {
                return Err(Error::Domain(format!("prior scale tau[{j}] is not positive")));
            }
        }
        Ok(())
    }

    /// `log[(s0/p) / (1 - s0/p)]`.
    pub fn log_prior_odds(&self, p: usize) -> T {
        let q = self.s0 / T::of_usize(p);
        q.ln() - (T::one() - q).ln()
    }
}

/// Idiosyncratic design rescaled to unit prior scale: `W_j = τ_j Û_j`.
///
/// The sampler works with `γ_j = β_j / τ_j`, for which the slab is
/// `N(0, σ²)`, and maps back with `β_j = τ_j γ_j`.
#[derive(Debug, Clone)]
pub struct ScaledDesign<T> {
    pub w: Matrix<T>,
    pub tau: Vec<T>,
    columns: Vec<Vec<T>>,
    col_sq: Vec<T>,
}

impl<T: Real> ScaledDesign<T> {
    pub fn from_matrix(w: Matrix<T>, tau: Vec<T>) -> Self {
        let columns = w.columns();
        let col_sq = columns.iter().map(|c| dot(c, c)).collect();
        Self {
            w,
            tau,
            columns,
            col_sq,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.w.rows()
    }

    #[inline]
    pub fn p(&self) -> usize {
        self.w.cols()
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    #[inline]
    pub fn column_sq(&self, j: usize) -> T {
        self.col_sq[j]
    }

    /// `W_aᵀ W_b`.
    #[inline]
    pub fn cross(&self, a: usize, b: usize) -> T {
        if a == b {
            self.col_sq[a]
        } else {
            dot(&self.columns[a], &self.columns[b])
        }
    }

    /// `Wᵀ v` for every column.
    pub fn tr_mul(&self, v: &[T]) -> Vec<T> {
        self.columns.iter().map(|c| dot(c, v)).collect()
    }

    /// `W_ξ γ_ξ`.
    pub fn mul_support(&self, xi: &[usize], gamma: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n()];
        for &j in xi {
            crate::linalg::axpy(gamma[j], &self.columns[j], &mut out);
        }
        out
    }

    pub fn to_original(&self, gamma: &[T]) -> Vec<T> {
        gamma.iter().zip(&self.tau).map(|(&g, &t)| g * t).collect()
    }
}

/// Builds the unit-scale design from `Û` and the prior's scale policy.
pub fn rescale_design<T: Real>(
    dec: &FactorDecomposition<T>,
    prior: &PriorConfig<T>,
) -> Result<ScaledDesign<T>> {
    let (n, p) = dec.uhat.shape();
    let tau = match &prior.tau {
        TauPolicy::ColumnScale => {
            let root_n = T::of_usize(n).sqrt();
            let mut norms = vec![T::zero(); p];
            for i in 0..n {
                for (s, &v) in norms.iter_mut().zip(dec.uhat.row(i)) {
                    *s += v * v;
                }
            }
            let mut tau = Vec::with_capacity(p);
            for (j, s) in norms.into_iter().enumerate() {
                let norm = s.sqrt();
                if !(norm > T::zero()) {
                    return Err(Error::ColumnScale { index: j });
                }
                tau.push(root_n / norm);
            }
            tau
        }
        TauPolicy::Fixed(t) => {
            if t.len() != p {
                return Err(Error::Dimension(format!(
                    "{} prior scales for {p} covariates",
                    t.len()
                )));
            }
            t.clone()
        }
    };
    let w = Matrix::from_fn(n, p, |i, j| dec.uhat[(i, j)] * tau[j]);
    Ok(ScaledDesign::from_matrix(w, tau))
}
