//! Symmetric eigendecomposition by Householder tridiagonalisation followed
//! by implicit QL iterations (the EISPACK `tred2`/`tql2` pair).

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Spectral decomposition `A = V diag(λ) Vᵀ`.
#[derive(Debug, Clone)]
pub struct SymEigResult<T> {
    /// Sorted descending.
    pub eigenvalues: Vec<T>,
    /// Column `i` is the unit eigenvector of `eigenvalues[i]`.
    pub eigenvectors: Matrix<T>,
}

impl<T: Real> SymEigResult<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<T> {
        self.eigenvectors.column(i)
    }
}

const MAX_QL_ITERATIONS: usize = 60;

/// Full eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come back in descending order. Each eigenvector is signed
/// so that its largest-magnitude entry is positive (first index wins ties).
pub fn sym_eig<T: Real>(a: &Matrix<T>) -> Result<SymEigResult<T>> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_symmetric(T::lit(1e-12)) {
        return Err(Error::Shape("matrix is not symmetric".into()));
    }
    let n = a.rows();
    let mut v: Vec<Vec<T>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);

    // QL rotations act on columns of V; work on the transpose so that they
    // touch contiguous rows.
    let mut z: Vec<Vec<T>> = (0..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect();
    drop(v);
    ql_implicit(&mut d, &mut e, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[j].partial_cmp(&d[i]).expect("finite eigenvalues"));

    let eigenvalues: Vec<T> = order.iter().map(|&i| d[i]).collect();
    let mut eigenvectors = Matrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let vec = &mut z[src];
        fix_sign(vec);
        for (row, &x) in vec.iter().enumerate() {
            eigenvectors[(row, col)] = x;
        }
    }
    Ok(SymEigResult {
        eigenvalues,
        eigenvectors,
    })
}

fn fix_sign<T: Real>(v: &mut [T]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < T::zero() {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
}

/// Householder reduction to tridiagonal form. On return `d` holds the
/// diagonal, `e[1..]` the sub-diagonal and `v` the accumulated transform.
fn tridiagonalize<T: Real>(v: &mut [Vec<T>], d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }

    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for &dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = zero;
                v[j][i] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }

            for j in 0..i {
                let f = d[j];
                v[j][i] = f;
                let mut g = e[j] + v[j][j] * f;
                for k in (j + 1)..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            let mut f = zero;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[k][j] -= upd;
                }
                d[j] = v[i - 1][j];
                v[i][j] = zero;
            }
        }
        d[i] = h;
    }

    for i in 0..n.saturating_sub(1) {
        v[n - 1][i] = v[i][i];
        v[i][i] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[k][j] -= upd;
                }
            }
        }
        for row in v.iter_mut().take(i + 1) {
            row[i + 1] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = zero;
    }
    if n > 0 {
        v[n - 1][n - 1] = T::one();
        e[0] = zero;
    }
}

/// Implicit QL on the tridiagonal `(d, e)`; `z[i]` is the running
/// eigenvector attached to `d[i]`.
fn ql_implicit<T: Real>(d: &mut [T], e: &mut [T], z: &mut [Vec<T>]) -> Result<()> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let zero = T::zero();
    let one = T::one();
    let two = T::lit(2.0);
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            let mut iter = 0;
            loop {
                iter += 1;
                if iter > MAX_QL_ITERATIONS {
                    return Err(Error::Convergence {
                        routine: "sym_eig",
                        iterations: MAX_QL_ITERATIONS,
                    });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (lo, hi) = z.split_at_mut(i + 1);
                    let zi = &mut lo[i];
                    let zi1 = &mut hi[0];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let hb = *b;
                        *b = s * *a + c * hb;
                        *a = c * *a - s * hb;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = zero;
    }
    Ok(())
}
