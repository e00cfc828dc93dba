use crate::error::{Error, Result};
use crate::factor::{center_columns, DataMatrix};
use crate::linalg::{dot, sym_eig, Matrix};
use crate::scalar::Real;

/// Regression on the leading principal-component scores plus intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct PcrFit<T> {
    pub m: usize,
    pub coef: Vec<T>,
    pub intercept: T,
    /// `p x m` unit loading vectors.
    pub loadings: Matrix<T>,
    pub column_means: Vec<T>,
}

impl<T: Real> PcrFit<T> {
    /// Prediction for a raw (uncentered) observation.
    pub fn predict(&self, x_new: &[T]) -> Result<T> {
        if x_new.len() != self.column_means.len() {
            return Err(Error::Dimension(format!(
                "observation of length {} for {} covariates",
                x_new.len(),
                self.column_means.len()
            )));
        }
        let centered: Vec<T> = x_new.iter().zip(&self.column_means).map(|(&a, &b)| a - b).collect();
        let scores = self.loadings.tr_mul_vec(&centered)?;
        Ok(self.intercept + dot(&scores, &self.coef))
    }
}

const RANK_TOL: f64 = 1e-10;

/// Fits on `m` components. An uncentered panel is centered first; a
/// centered one keeps its stored means so predictions take raw rows.
pub fn pcr_fit<T: Real>(x: &DataMatrix<T>, y: &[T], m: usize) -> Result<PcrFit<T>> {
    let owned;
    let x = if x.centered {
        x
    } else {
        owned = center_columns(&x.x)?;
        &owned
    };
    let (n, p) = x.x.shape();
    if y.len() != n {
        return Err(Error::Dimension(format!(
            "response of length {} for {n} observations",
            y.len()
        )));
    }
    if m < 1 || m > n.min(p) {
        return Err(Error::Config(format!(
            "component count must satisfy 1 <= m <= min(n, p) = {}, got {m}",
            n.min(p)
        )));
    }
    let nf = T::of_usize(n);
    // right singular vectors of X, from whichever Gram matrix is smaller
    let (loadings, sq_norms) = if n <= p {
        let eig = sym_eig(&x.x.outer_gram().scaled(T::one() / nf))?;
        check_rank(&eig.eigenvalues, m)?;
        let u = eig.eigenvectors.leading_columns(m);
        let xtu = x.x.tr_matmul(&u)?;
        let sq: Vec<T> = eig.eigenvalues[..m].iter().map(|&l| l * nf).collect();
        let v = Matrix::from_fn(p, m, |i, j| xtu[(i, j)] / sq[j].sqrt());
        (v, sq)
    } else {
        let eig = sym_eig(&x.x.gram().scaled(T::one() / nf))?;
        check_rank(&eig.eigenvalues, m)?;
        let sq = eig.eigenvalues[..m].iter().map(|&l| l * nf).collect();
        (eig.eigenvectors.leading_columns(m), sq)
    };
    let intercept = y.iter().copied().sum::<T>() / nf;
    let centered_y: Vec<T> = y.iter().map(|&v| v - intercept).collect();
    let scores = x.x.matmul(&loadings)?;
    let szy = scores.tr_mul_vec(&centered_y)?;
    let coef = szy.iter().zip(&sq_norms).map(|(&a, &b)| a / b).collect();
    Ok(PcrFit {
        m,
        coef,
        intercept,
        loadings,
        column_means: x.column_means.clone(),
    })
}

fn check_rank<T: Real>(eigenvalues: &[T], m: usize) -> Result<()> {
    let top = eigenvalues[0];
    if !(top > T::zero()) || eigenvalues[m - 1] <= T::lit(RANK_TOL) * top {
        return Err(Error::RankDeficient(format!(
            "principal-component scores are collinear at {m} components"
        )));
    }
    Ok(())
}
