use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    n: usize,
    /// Packed row-major lower triangle.
    l: Vec<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(a: &Matrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Dimension(format!(
                "Cholesky needs a square matrix, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        Self::factor_with(n, |i, j| a[(i, j)])
    }

    /// Factors the matrix whose `(i, j)` entry (`j <= i`) is `entry(i, j)`.
    pub fn factor_with(n: usize, entry: impl Fn(usize, usize) -> T) -> Result<Self> {
        let mut l = vec![T::zero(); n * (n + 1) / 2];
        for i in 0..n {
            let ri = i * (i + 1) / 2;
            for j in 0..=i {
                let rj = j * (j + 1) / 2;
                let mut s = entry(i, j);
                for k in 0..j {
                    s -= l[ri + k] * l[rj + k];
                }
                if i == j {
                    if !(s > T::zero()) {
                        return Err(Error::NotPositiveDefinite {
                            pivot: i,
                            value: s.as_f64(),
                        });
                    }
                    l[ri + i] = s.sqrt();
                } else {
                    l[ri + j] = s / l[rj + j];
                }
            }
        }
        Ok(Self { n, l })
    }

    /// Wraps an already computed packed row-major lower factor.
    pub(crate) fn from_packed(n: usize, l: Vec<T>) -> Self {
        debug_assert_eq!(l.len(), n * (n + 1) / 2);
        Self { n, l }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        if j > i {
            T::zero()
        } else {
            self.l[i * (i + 1) / 2 + j]
        }
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [T]) {
        for i in 0..self.n {
            let ri = i * (i + 1) / 2;
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[ri + k] * b[k];
            }
            b[i] = s / self.l[ri + i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward(&self, y: &mut [T]) {
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in (i + 1)..self.n {
                s -= self.l[k * (k + 1) / 2 + i] * y[k];
            }
            y[i] = s / self.l[i * (i + 1) / 2 + i];
        }
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    pub fn log_det(&self) -> T {
        (0..self.n)
            .map(|i| self.l[i * (i + 1) / 2 + i].ln())
            .sum::<T>()
            * T::lit(2.0)
    }

    pub fn to_matrix(&self) -> Matrix<T> {
        Matrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }
}

/// Solves `A x = b` for symmetric positive-definite `A`.
pub fn solve_spd<T: Real>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    if b.len() != a.rows() {
        return Err(Error::Dimension(format!(
            "right-hand side of length {} for a {}x{} system",
            b.len(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(Cholesky::factor(a)?.solve(b))
}
