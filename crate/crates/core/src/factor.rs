//! Principal-component estimation of an approximate factor model
//! `X = F Bᵀ + U`, the eigenvalue-ratio estimator of the number of factors,
//! and recovery diagnostics against a known truth.

use crate::error::{Error, Result};
use crate::linalg::{dot, sym_eig, Cholesky, Matrix, SymEigResult};
use crate::scalar::Real;

/// Observation panel with `n` rows (observations) and `p` columns.
#[derive(Debug, Clone)]
pub struct DataMatrix<T> {
    pub x: Matrix<T>,
    /// Means removed from each column (zero when the input was not centered).
    pub column_means: Vec<T>,
    pub centered: bool,
}

impl<T: Real> DataMatrix<T> {
    /// Wraps a matrix the caller has already prepared, without centering.
    pub fn raw(x: Matrix<T>) -> Self {
        let p = x.cols();
        Self {
            x,
            column_means: vec![T::zero(); p],
            centered: false,
        }
    }

    pub fn n(&self) -> usize {
        self.x.rows()
    }

    pub fn p(&self) -> usize {
        self.x.cols()
    }

    /// Applies the stored centering to a new observation.
    pub fn center_row(&self, row: &[T]) -> Vec<T> {
        row.iter().zip(&self.column_means).map(|(&v, &m)| v - m).collect()
    }
}

/// Demeans every column, keeping the means for later use.
pub fn center_columns<T: Real>(raw: &Matrix<T>) -> Result<DataMatrix<T>> {
    let (n, p) = raw.shape();
    if n < 2 || p == 0 {
        return Err(Error::Dimension(format!(
            "centering needs at least 2 rows and 1 column, got {n}x{p}"
        )));
    }
    let mut means = vec![T::zero(); p];
    for i in 0..n {
        for (m, &v) in means.iter_mut().zip(raw.row(i)) {
            *m += v;
        }
    }
    let nf = T::of_usize(n);
    for m in means.iter_mut() {
        *m /= nf;
    }
    let x = Matrix::from_fn(n, p, |i, j| raw[(i, j)] - means[j]);
    Ok(DataMatrix {
        x,
        column_means: means,
        centered: true,
    })
}

/// Eigendecomposition of `X Xᵀ / n`.
pub fn gram_spectrum<T: Real>(x: &Matrix<T>) -> Result<SymEigResult<T>> {
    let n = T::of_usize(x.rows());
    sym_eig(&x.outer_gram().scaled(T::one() / n))
}

/// Leading `min(n, p)` eigenvalues of `XᵀX / n`, descending, computed from
/// whichever Gram matrix is smaller.
pub fn covariance_eigenvalues<T: Real>(x: &Matrix<T>) -> Result<Vec<T>> {
    let (n, p) = x.shape();
    if n <= p {
        Ok(gram_spectrum(x)?.eigenvalues)
    } else {
        let g = x.gram().scaled(T::one() / T::of_usize(n));
        Ok(sym_eig(&g)?.eigenvalues)
    }
}

/// Eigenvalue-ratio estimate of the number of factors.
///
/// Returns the `k <= k_max` maximising `λ_k / λ_{k+1}` of `XᵀX / n`. Ratios
/// equal to within a relative `1e-12` are resolved toward the smaller `k`.
pub fn estimate_k<T: Real>(x: &DataMatrix<T>, k_max: usize) -> Result<usize> {
    let limit = x.n().min(x.p());
    if k_max < 1 || k_max + 1 > limit {
        return Err(Error::Config(format!(
            "k_max must lie in 1..={} for a {}x{} panel, got {k_max}",
            limit.saturating_sub(1),
            x.n(),
            x.p()
        )));
    }
    if !x.centered {
        return Err(Error::Config("estimate_k expects a centered panel".into()));
    }
    estimate_k_from_spectrum(&covariance_eigenvalues(&x.x)?, k_max)
}

/// Ratio estimator applied to a descending spectrum.
pub fn estimate_k_from_spectrum<T: Real>(eigenvalues: &[T], k_max: usize) -> Result<usize> {
    if k_max < 1 || eigenvalues.len() < k_max + 1 {
        return Err(Error::Config(format!(
            "need at least k_max + 1 = {} eigenvalues, have {}",
            k_max + 1,
            eigenvalues.len()
        )));
    }
    let lead = eigenvalues[0];
    let floor = T::lit(1e-12) * lead.abs();
    if let Some(i) = eigenvalues[..=k_max].iter().position(|&l| !(l > floor)) {
        return Err(Error::RankDeficient(format!(
            "eigenvalue {} is numerically zero; ratio undefined",
            i + 1
        )));
    }
    let tie = T::lit(1e-12);
    let mut best_k = 1;
    let mut best = eigenvalues[0] / eigenvalues[1];
    for k in 2..=k_max {
        let r = eigenvalues[k - 1] / eigenvalues[k];
        if r > best * (T::one() + tie) {
            best = r;
            best_k = k;
        }
    }
    Ok(best_k)
}

/// PCA estimates of factors, loadings and idiosyncratic components.
#[derive(Debug, Clone)]
pub struct FactorDecomposition<T> {
    pub k: usize,
    /// `n x k`, scaled so that `F̂ᵀF̂ / n = I`.
    pub fhat: Matrix<T>,
    /// `p x k`, `X ᵀF̂ / n`.
    pub bhat: Matrix<T>,
    /// `n x p`, `(I - F̂F̂ᵀ/n) X`.
    pub uhat: Matrix<T>,
    /// Spectrum of `X Xᵀ / n`, descending. Empty for the no-factor block.
    pub eigenvalues: Vec<T>,
    /// Set when `λ_k - λ_{k+1}` is numerically zero, in which case the
    /// estimated factor space is not identified.
    pub degenerate_gap: bool,
}

impl<T: Real> FactorDecomposition<T> {
    /// Empty factor block: `Û = X`. Used by the generic (unadjusted) methods.
    pub fn without_factors(x: &DataMatrix<T>) -> Self {
        Self {
            k: 0,
            fhat: Matrix::zeros(x.n(), 0),
            bhat: Matrix::zeros(x.p(), 0),
            uhat: x.x.clone(),
            eigenvalues: Vec::new(),
            degenerate_gap: false,
        }
    }

    pub fn n(&self) -> usize {
        self.uhat.rows()
    }

    pub fn p(&self) -> usize {
        self.uhat.cols()
    }

    /// Scores a new (centered) observation: `f = (B̂ᵀB̂)⁻¹B̂ᵀx` and
    /// `u = x - B̂ f`.
    pub fn project(&self, x_new: &[T]) -> Result<(Vec<T>, Vec<T>)> {
        if x_new.len() != self.p() {
            return Err(Error::Dimension(format!(
                "observation of length {} for {} covariates",
                x_new.len(),
                self.p()
            )));
        }
        if self.k == 0 {
            return Ok((Vec::new(), x_new.to_vec()));
        }
        let btb = self.bhat.gram();
        let btx = self.bhat.tr_mul_vec(x_new)?;
        let f = Cholesky::factor(&btb)
            .map_err(|_| Error::RankDeficient("loading matrix is rank deficient".into()))?
            .solve(&btx);
        let fitted = self.bhat.mul_vec(&f)?;
        let u = x_new.iter().zip(&fitted).map(|(&a, &b)| a - b).collect();
        Ok((f, u))
    }
}

/// Decomposes a centered panel with `k` factors.
pub fn pca_decompose<T: Real>(x: &DataMatrix<T>, k: usize) -> Result<FactorDecomposition<T>> {
    let spectrum = gram_spectrum(&x.x)?;
    pca_decompose_with(x, &spectrum, k)
}

/// As [`pca_decompose`], reusing a spectrum from [`gram_spectrum`].
pub fn pca_decompose_with<T: Real>(
    x: &DataMatrix<T>,
    spectrum: &SymEigResult<T>,
    k: usize,
) -> Result<FactorDecomposition<T>> {
    let (n, p) = x.x.shape();
    if k < 1 || k >= n {
        return Err(Error::Config(format!(
            "number of factors must satisfy 1 <= k < n = {n}, got {k}"
        )));
    }
    if spectrum.dim() != n {
        return Err(Error::Dimension(format!(
            "spectrum of size {} for {n} observations",
            spectrum.dim()
        )));
    }
    let nf = T::of_usize(n);
    let root_n = nf.sqrt();
    let fhat = Matrix::from_fn(n, k, |i, j| spectrum.eigenvectors[(i, j)] * root_n);
    let bhat = x.x.tr_matmul(&fhat)?.scaled(T::one() / nf);
    let common = fhat.matmul(&bhat.transpose())?;
    let uhat = x.x.sub(&common)?;

    let ev = &spectrum.eigenvalues;
    let degenerate_gap = ev[k - 1] - ev[k] <= T::lit(1e-12) * ev[0].abs();
    debug_assert!(p > 0);
    Ok(FactorDecomposition {
        k,
        fhat,
        bhat,
        uhat,
        eigenvalues: ev.clone(),
        degenerate_gap,
    })
}

/// Estimation quality against a simulated truth.
#[derive(Debug, Clone)]
pub struct RecoveryDiagnostics<T> {
    /// `|λ̂_i - λ_i(BᵀB)| / p` for `i = 1..k`.
    pub eigenvalue_errors: Vec<T>,
    /// Frobenius norm of the sines of the principal angles between the
    /// estimated and true factor spaces.
    pub sin_theta_norm: T,
    /// `‖F̂H - F‖_F`.
    pub factor_error_fro: T,
    /// `max_j ‖Û_j - U_j‖`.
    pub max_idio_col_error: T,
    /// Least-squares alignment `F̂ᵀF / n`.
    pub h: Matrix<T>,
}

pub fn recovery_diagnostics<T: Real>(
    dec: &FactorDecomposition<T>,
    f_true: &Matrix<T>,
    u_true: &Matrix<T>,
    b_true: &Matrix<T>,
) -> Result<RecoveryDiagnostics<T>> {
    let (n, p, k) = (dec.n(), dec.p(), dec.k);
    if f_true.shape() != (n, k) || u_true.shape() != (n, p) || b_true.shape() != (p, k) {
        return Err(Error::Dimension(format!(
            "truth shapes F {:?}, U {:?}, B {:?} do not match n={n}, p={p}, k={k}",
            f_true.shape(),
            u_true.shape(),
            b_true.shape()
        )));
    }
    let nf = T::of_usize(n);
    let h = dec.fhat.tr_matmul(f_true)?.scaled(T::one() / nf);
    let factor_error_fro = dec.fhat.matmul(&h)?.sub(f_true)?.frobenius();

    // F̃ = F L⁻ᵀ with FᵀF/n = L Lᵀ has F̃ᵀF̃/n = I and spans col(F); the
    // cosines of the principal angles are the singular values of
    // F̂ᵀF̃/n = H L⁻ᵀ, so Σ sin² = k - ‖H L⁻ᵀ‖_F².
    let ftf = f_true.gram().scaled(T::one() / nf);
    let chol = Cholesky::factor(&ftf)
        .map_err(|_| Error::Alignment("true factor matrix is rank deficient".into()))?;
    let mut cos_sq = T::zero();
    for r in 0..k {
        let mut row = h.row(r).to_vec();
        chol.forward(&mut row);
        cos_sq += dot(&row, &row);
    }
    let kf = T::of_usize(k);
    let sin_theta_norm = (kf - cos_sq).max(T::zero()).sqrt().min(kf.sqrt());

    let true_spec = sym_eig(&b_true.gram())?.eigenvalues;
    let pf = T::of_usize(p);
    let eigenvalue_errors = (0..k)
        .map(|i| (dec.eigenvalues.get(i).copied().unwrap_or(T::zero()) - true_spec[i]).abs() / pf)
        .collect();

    let mut max_idio_col_error = T::zero();
    for j in 0..p {
        let mut s = T::zero();
        for i in 0..n {
            let d = dec.uhat[(i, j)] - u_true[(i, j)];
            s += d * d;
        }
        max_idio_col_error = max_idio_col_error.max(s.sqrt());
    }

    Ok(RecoveryDiagnostics {
        eigenvalue_errors,
        sin_theta_norm,
        factor_error_fro,
        max_idio_col_error,
        h,
    })
}
