//! Factor-adjusted lasso by cyclic coordinate descent.
//!
//! The penalty `λ Σ_j (‖Û_j‖/√n)|β_j|` becomes a plain `λ‖γ‖₁` on the
//! rescaled design `W_j = (√n/‖Û_j‖) Û_j`, so the solver works with `γ` and
//! maps back through `β = τγ`. The factor coefficients are unpenalized and
//! refit by least squares after every sweep.
//!
//! Near the interpolation limit (`p > n`, small `λ`) plain coordinate
//! descent needs thousands of sweeps, so the active-set passes are
//! periodically polished by an exact solve on the current sign pattern.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::FactorDecomposition;
use crate::gibbs::{rescale_design, PriorConfig, ScaledDesign};
use crate::linalg::{axpy, dot, norm2, Cholesky};
use crate::rng::RngStream;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100_000;
const CONVERGENCE_TOL: f64 = 1e-7;
const POLISH_EVERY: usize = 10;
const SATURATION: f64 = 0.999;
const REFINE_STEPS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit<T> {
    pub alpha_hat: Vec<T>,
    pub beta_hat: Vec<T>,
    pub lambda: T,
    /// Indices with `beta_hat[j] != 0`, ascending.
    pub selected: Vec<usize>,
    /// `(λ, mean held-out squared error)` per grid point; empty for a
    /// single fit.
    pub cv_table: Vec<(T, T)>,
    pub sweeps: usize,
}

/// Least-squares problem on a subset of rows, in solver coordinates.
#[derive(Clone)]
pub(crate) struct Problem<T> {
    f_cols: Vec<Vec<T>>,
    f_chol: Option<Cholesky<T>>,
    w_cols: Vec<Vec<T>>,
    w_sq: Vec<T>,
    y: Vec<T>,
}

impl<T: Real> Problem<T> {
    pub(crate) fn new(fhat: &[Vec<T>], design: &ScaledDesign<T>, y: &[T], rows: Option<&[usize]>) -> Result<Self> {
        let pick = |c: &[T]| -> Vec<T> {
            match rows {
                Some(r) => r.iter().map(|&i| c[i]).collect(),
                None => c.to_vec(),
            }
        };
        let f_cols: Vec<Vec<T>> = fhat.iter().map(|c| pick(c)).collect();
        let w_cols: Vec<Vec<T>> = (0..design.p()).map(|j| pick(design.column(j))).collect();
        let w_sq = w_cols.iter().map(|c| dot(c, c)).collect();
        let k = f_cols.len();
        let f_chol = if k == 0 {
            None
        } else {
            Some(
                Cholesky::factor_with(k, |a, b| dot(&f_cols[a], &f_cols[b]))
                    .map_err(|_| Error::RankDeficient("factor block is collinear on these rows".into()))?,
            )
        };
        Ok(Self {
            f_cols,
            f_chol,
            w_cols,
            w_sq,
            y: pick(y),
        })
    }

    fn n(&self) -> usize {
        self.y.len()
    }

    fn p(&self) -> usize {
        self.w_cols.len()
    }

    /// Least-squares `α` for a given partial residual.
    fn refit_alpha(&self, target: &[T]) -> Vec<T> {
        match &self.f_chol {
            None => Vec::new(),
            Some(ch) => {
                let ftr: Vec<T> = self.f_cols.iter().map(|c| dot(c, target)).collect();
                ch.solve(&ftr)
            }
        }
    }

    /// Smallest `λ` at which `γ = 0` is optimal.
    pub(crate) fn lambda_max(&self) -> T {
        let alpha = self.refit_alpha(&self.y);
        let mut r = self.y.clone();
        for (c, &a) in self.f_cols.iter().zip(&alpha) {
            axpy(-a, c, &mut r);
        }
        let nf = T::of_usize(self.n());
        self.w_cols
            .iter()
            .map(|c| dot(c, &r).abs() / nf)
            .fold(T::zero(), T::max)
    }

    pub(crate) fn predict(&self, alpha: &[T], gamma: &[T], i: usize) -> T {
        let mut v = T::zero();
        for (c, &a) in self.f_cols.iter().zip(alpha) {
            v += c[i] * a;
        }
        for (c, &g) in self.w_cols.iter().zip(gamma) {
            if g != T::zero() {
                v += c[i] * g;
            }
        }
        v
    }
}

/// Coordinate-descent state for one problem.
pub(crate) struct Solver<'a, T> {
    prob: &'a Problem<T>,
    pub(crate) alpha: Vec<T>,
    pub(crate) gamma: Vec<T>,
    resid: Vec<T>,
    lambda: T,
}

impl<'a, T: Real> Solver<'a, T> {
    pub(crate) fn new(prob: &'a Problem<T>, lambda: T) -> Self {
        let mut s = Self {
            prob,
            alpha: vec![T::zero(); prob.f_cols.len()],
            gamma: vec![T::zero(); prob.p()],
            resid: prob.y.clone(),
            lambda,
        };
        s.update_alpha();
        s
    }

    pub(crate) fn set_lambda(&mut self, lambda: T) {
        self.lambda = lambda;
    }

    /// `(1/2n)‖r‖² + λ‖γ‖₁`.
    #[cfg(test)]
    pub(crate) fn objective(&self) -> T {
        let nf = T::of_usize(self.prob.n());
        dot(&self.resid, &self.resid) / (T::lit(2.0) * nf)
            + self.lambda * self.gamma.iter().map(|g| g.abs()).sum::<T>()
    }

    fn update_alpha(&mut self) -> T {
        if self.alpha.is_empty() {
            return T::zero();
        }
        let delta = self.prob.refit_alpha(&self.resid);
        let mut change = T::zero();
        for ((a, &d), c) in self.alpha.iter_mut().zip(&delta).zip(&self.prob.f_cols) {
            *a += d;
            axpy(-d, c, &mut self.resid);
            change = change.max(d.abs());
        }
        change
    }

    fn update_coordinate(&mut self, j: usize) -> T {
        let sq = self.prob.w_sq[j];
        if sq == T::zero() {
            return T::zero();
        }
        let nf = T::of_usize(self.prob.n());
        let col = &self.prob.w_cols[j];
        let old = self.gamma[j];
        let z = (dot(col, &self.resid) + sq * old) / nf;
        let new = soft_threshold(z, self.lambda) / (sq / nf);
        if new != old {
            axpy(old - new, col, &mut self.resid);
            self.gamma[j] = new;
        }
        (new - old).abs()
    }

    /// One cyclic pass followed by the exact `α` update. Returns the largest
    /// coefficient change.
    pub(crate) fn sweep(&mut self, active_only: bool) -> T {
        let mut change = T::zero();
        for j in 0..self.prob.p() {
            if active_only && self.gamma[j] == T::zero() {
                continue;
            }
            change = change.max(self.update_coordinate(j));
        }
        change.max(self.update_alpha())
    }

    /// Active-set step on the sign orthant of the current iterate, where
    /// the objective is a convex quadratic.
    ///
    /// With `Z = [F W_A]` of full column rank it moves towards the exact
    /// minimizer `ZᵀZ θ = ZᵀY - nλ(0, sign γ_A)`; when `Z` is column rank
    /// deficient it moves along a null direction of `Z` that lowers the
    /// penalty. Either way it stops at the first sign crossing and drops
    /// that coordinate, so the objective cannot increase.
    fn polish(&mut self) -> bool {
        let k = self.alpha.len();
        let active: Vec<usize> = (0..self.prob.p()).filter(|&j| self.gamma[j] != T::zero()).collect();
        if active.is_empty() {
            return false;
        }
        let cols: Vec<&[T]> = self
            .prob
            .f_cols
            .iter()
            .map(Vec::as_slice)
            .chain(active.iter().map(|&j| self.prob.w_cols[j].as_slice()))
            .collect();
        let m0 = cols.len();
        let mut gram = vec![T::zero(); m0 * m0];
        for a in 0..m0 {
            for b in 0..=a {
                let g = dot(cols[a], cols[b]);
                gram[a * m0 + b] = g;
                gram[b * m0 + a] = g;
            }
        }
        let nl = T::of_usize(self.prob.n()) * self.lambda;
        let sign: Vec<T> = (0..m0)
            .map(|c| if c < k { T::zero() } else { self.gamma[active[c - k]].signum() })
            .collect();
        let rhs: Vec<T> = (0..m0).map(|c| dot(cols[c], &self.prob.y) - nl * sign[c]).collect();
        let mut theta: Vec<T> = self
            .alpha
            .iter()
            .copied()
            .chain(active.iter().map(|&j| self.gamma[j]))
            .collect();

        let mut keep: Vec<usize> = (0..m0).collect();
        let mut moved = false;
        while keep.len() > k {
            let (direction, mut step) = match factor_subset(&gram, m0, &keep) {
                SubsetFactor::Full(chol) => {
                    let mut target = chol.solve(&keep.iter().map(|&c| rhs[c]).collect::<Vec<_>>());
                    if target.iter().any(|v| !v.is_finite()) {
                        break;
                    }
                    // the Gram system squares the condition number; refine
                    // against residuals formed from the columns themselves
                    for _ in 0..REFINE_STEPS {
                        let mut r = self.prob.y.clone();
                        for (&c, &t) in keep.iter().zip(&target) {
                            axpy(-t, cols[c], &mut r);
                        }
                        let g: Vec<T> = keep.iter().map(|&c| dot(cols[c], &r) - nl * sign[c]).collect();
                        let fix = chol.solve(&g);
                        if fix.iter().any(|v| !v.is_finite()) {
                            break;
                        }
                        let mut biggest = T::zero();
                        for (t, &d) in target.iter_mut().zip(&fix) {
                            *t += d;
                            biggest = biggest.max(d.abs());
                        }
                        let scale = target.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                        if biggest <= T::epsilon() * scale {
                            break;
                        }
                    }
                    let dir: Vec<T> = keep.iter().zip(&target).map(|(&c, &t)| t - theta[c]).collect();
                    (dir, T::one())
                }
                SubsetFactor::Null(d) => {
                    // exact line search on the orthant; the direction is
                    // only numerically null, so either orientation may descend
                    let mut zd = vec![T::zero(); self.prob.n()];
                    let mut r = self.prob.y.clone();
                    for (&c, &v) in keep.iter().zip(&d) {
                        axpy(v, cols[c], &mut zd);
                        axpy(-theta[c], cols[c], &mut r);
                    }
                    let slope: T = keep.iter().zip(&d).map(|(&c, &v)| sign[c] * v).sum();
                    let pull = dot(&zd, &r) - nl * slope;
                    if pull == T::zero() {
                        break;
                    }
                    let curvature = dot(&zd, &zd);
                    let orient = pull.signum();
                    let step = if curvature > T::zero() { pull.abs() / curvature } else { T::infinity() };
                    (d.iter().map(|&v| v * orient).collect(), step)
                }
            };
            let mut blocking = None;
            for (i, &c) in keep.iter().enumerate() {
                if sign[c] * direction[i] < T::zero() {
                    let t = -theta[c] / direction[i];
                    if t < step {
                        step = t;
                        blocking = Some(i);
                    }
                }
            }
            if !step.is_finite() {
                break;
            }
            for (i, &c) in keep.iter().enumerate() {
                theta[c] += step * direction[i];
            }
            moved = true;
            match blocking {
                None => break,
                Some(i) => {
                    theta[keep[i]] = T::zero();
                    keep.remove(i);
                }
            }
        }
        if moved {
            let before = self.penalized_rss();
            let saved = (self.alpha.clone(), self.gamma.clone(), self.resid.clone());
            self.alpha.copy_from_slice(&theta[..k]);
            for (i, &j) in active.iter().enumerate() {
                self.gamma[j] = theta[k + i];
            }
            let mut r = self.prob.y.clone();
            for (c, &t) in cols.iter().zip(&theta) {
                if t != T::zero() {
                    axpy(-t, c, &mut r);
                }
            }
            self.resid = r;
            if self.penalized_rss() > before {
                (self.alpha, self.gamma, self.resid) = saved;
                return false;
            }
        }
        moved
    }

    /// `‖r‖² + 2nλ‖γ‖₁`, the objective up to a positive factor.
    fn penalized_rss(&self) -> T {
        let nl = T::of_usize(self.prob.n()) * self.lambda;
        dot(&self.resid, &self.resid) + T::lit(2.0) * nl * self.gamma.iter().map(|g| g.abs()).sum::<T>()
    }

    /// Sweeps the active set to convergence, then confirms with a full
    /// sweep. Active-set passes are interleaved with [`Self::polish`].
    /// Returns the number of sweeps.
    pub(crate) fn solve(&mut self, tol: T, budget: usize) -> std::result::Result<usize, (usize, T)> {
        let mut sweeps = 0;
        loop {
            let change = self.sweep(false);
            sweeps += 1;
            if change < tol {
                return Ok(sweeps);
            }
            let mut inner = 0;
            loop {
                if sweeps >= budget {
                    return Err((sweeps, change));
                }
                let c = self.sweep(true);
                sweeps += 1;
                inner += 1;
                if c < tol {
                    break;
                }
                if inner % POLISH_EVERY == 0 && self.polish() {
                    break;
                }
            }
            if sweeps >= budget {
                return Err((sweeps, change));
            }
        }
    }
}

enum SubsetFactor<T> {
    Full(Cholesky<T>),
    /// Null vector of the Gram submatrix, over the subset.
    Null(Vec<T>),
}

/// Cholesky of the `keep` submatrix of the `m x m` Gram matrix, or a null
/// vector built from the first column that is (numerically) in the span of
/// the preceding ones.
fn factor_subset<T: Real>(gram: &[T], m: usize, keep: &[usize]) -> SubsetFactor<T> {
    let q = keep.len();
    let g = |a: usize, b: usize| gram[keep[a] * m + keep[b]];
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(q);
    for i in 0..q {
        let mut y: Vec<T> = (0..i).map(|j| g(i, j)).collect();
        for j in 0..i {
            let mut v = y[j];
            for t in 0..j {
                v -= rows[j][t] * y[t];
            }
            y[j] = v / rows[j][j];
        }
        let pivot = g(i, i) - dot(&y, &y);
        if !(pivot > T::lit(1e-10) * g(i, i)) {
            // Lᵀc = y gives Σ_j c_j z_j ≈ z_i
            let mut c = y;
            for j in (0..i).rev() {
                let mut v = c[j];
                for t in (j + 1)..i {
                    v -= rows[t][j] * c[t];
                }
                c[j] = v / rows[j][j];
            }
            let mut d = vec![T::zero(); q];
            d[..i].copy_from_slice(&c);
            d[i] = -T::one();
            return SubsetFactor::Null(d);
        }
        y.push(pivot.sqrt());
        rows.push(y);
    }
    SubsetFactor::Full(Cholesky::from_packed(q, rows.concat()))
}

#[inline]
fn soft_threshold<T: Real>(z: T, lambda: T) -> T {
    if z > lambda {
        z - lambda
    } else if z < -lambda {
        z + lambda
    } else {
        T::zero()
    }
}

fn tolerance<T: Real>(y: &[T]) -> T {
    let scale = norm2(y) / T::of_usize(y.len()).sqrt();
    T::lit(CONVERGENCE_TOL) * if scale > T::zero() { scale } else { T::one() }
}

fn lasso_design<T: Real>(dec: &FactorDecomposition<T>, y: &[T]) -> Result<(Vec<Vec<T>>, ScaledDesign<T>)> {
    if y.len() != dec.n() {
        return Err(Error::Dimension(format!(
            "response of length {} for {} observations",
            y.len(),
            dec.n()
        )));
    }
    let design = rescale_design(dec, &PriorConfig::default())?;
    Ok((dec.fhat.columns(), design))
}

fn finish<T: Real>(design: &ScaledDesign<T>, solver: &Solver<'_, T>, lambda: T, sweeps: usize) -> LassoFit<T> {
    let beta_hat = design.to_original(&solver.gamma);
    let selected = (0..beta_hat.len()).filter(|&j| beta_hat[j] != T::zero()).collect();
    LassoFit {
        alpha_hat: solver.alpha.clone(),
        beta_hat,
        lambda,
        selected,
        cv_table: Vec::new(),
        sweeps,
    }
}

fn not_converged<T: Real>(design: &ScaledDesign<T>, solver: &Solver<'_, T>, sweeps: usize, change: T) -> Error {
    Error::LassoNotConverged {
        sweeps,
        max_change: change.as_f64(),
        last_beta: design.to_original(&solver.gamma).iter().map(|v| v.as_f64()).collect(),
        last_alpha: solver.alpha.iter().map(|v| v.as_f64()).collect(),
    }
}

/// Minimizes `(1/2n)‖Y - F̂α - Ûβ‖² + λ Σ_j (‖Û_j‖/√n)|β_j|`.
pub fn lasso_fit<T: Real>(dec: &FactorDecomposition<T>, y: &[T], lambda: T) -> Result<LassoFit<T>> {
    if !(lambda >= T::zero()) {
        return Err(Error::Domain(format!("lambda must be nonnegative, got {lambda}")));
    }
    let (f, design) = lasso_design(dec, y)?;
    let prob = Problem::new(&f, &design, y, None)?;
    let mut solver = Solver::new(&prob, lambda);
    match solver.solve(tolerance(y), MAX_SWEEPS) {
        Ok(sweeps) => Ok(finish(&design, &solver, lambda, sweeps)),
        Err((sweeps, change)) => Err(not_converged(&design, &solver, sweeps, change)),
    }
}

/// `len` log-spaced values from the null-model threshold down to
/// `ratio` times it.
pub fn lambda_grid<T: Real>(dec: &FactorDecomposition<T>, y: &[T], len: usize, ratio: T) -> Result<Vec<T>> {
    if len == 0 || !(ratio > T::zero()) || ratio > T::one() {
        return Err(Error::Config(format!(
            "lambda grid needs len >= 1 and 0 < ratio <= 1, got {len}, {ratio}"
        )));
    }
    let (f, design) = lasso_design(dec, y)?;
    let lmax = Problem::new(&f, &design, y, None)?.lambda_max();
    Ok(log_grid(lmax, len, ratio))
}

pub(crate) fn log_grid<T: Real>(lmax: T, len: usize, ratio: T) -> Vec<T> {
    if len == 1 {
        return vec![lmax];
    }
    let step = ratio.ln() / T::of_usize(len - 1);
    (0..len).map(|i| lmax * (step * T::of_usize(i)).exp()).collect()
}

/// Solves along a descending grid with warm starts; returns `(α, γ)` per
/// grid point. Once the fit explains all but `1 - SATURATION` of the
/// variation left after the factors, smaller penalties reuse that solution.
fn solve_path<T: Real>(prob: &Problem<T>, grid: &[T], tol: T) -> Result<Vec<(Vec<T>, Vec<T>)>> {
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[b].partial_cmp(&grid[a]).expect("finite grid"));
    let mut out = vec![(Vec::new(), Vec::new()); grid.len()];
    let mut solver = Solver::new(prob, grid[order[0]]);
    let null_rss = dot(&solver.resid, &solver.resid);
    let mut saturated = false;
    for &g in &order {
        if !saturated {
            solver.set_lambda(grid[g]);
            if let Err((sweeps, change)) = solver.solve(tol, MAX_SWEEPS) {
                return Err(Error::LassoNotConverged {
                    sweeps,
                    max_change: change.as_f64(),
                    last_beta: solver.gamma.iter().map(|v| v.as_f64()).collect(),
                    last_alpha: solver.alpha.iter().map(|v| v.as_f64()).collect(),
                });
            }
            saturated = dot(&solver.resid, &solver.resid) < T::lit(1.0 - SATURATION) * null_rss;
        }
        out[g] = (solver.alpha.clone(), solver.gamma.clone());
    }
    Ok(out)
}

/// Chooses `λ` from `grid` by `folds`-fold cross-validation and refits on
/// the full data. Ties go to the larger `λ`.
pub fn lasso_cv<T: Real>(
    dec: &FactorDecomposition<T>,
    y: &[T],
    grid: &[T],
    folds: usize,
    rng: &mut RngStream,
) -> Result<LassoFit<T>> {
    lasso_cv_with(dec, y, grid, folds, CvRule::MinError, rng)
}

/// How the penalty is picked from the cross-validation curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CvRule {
    /// The grid value with the smallest mean held-out error.
    #[default]
    MinError,
    /// The largest grid value whose mean error is within one standard
    /// error of the minimum, as glmnet reports by default.
    OneStandardError,
}

/// [`lasso_cv`] with an explicit selection rule.
pub fn lasso_cv_with<T: Real>(
    dec: &FactorDecomposition<T>,
    y: &[T],
    grid: &[T],
    folds: usize,
    rule: CvRule,
    rng: &mut RngStream,
) -> Result<LassoFit<T>> {
    if grid.is_empty() || folds < 2 {
        return Err(Error::Config(format!(
            "cross-validation needs a nonempty grid and at least 2 folds, got {} and {folds}",
            grid.len()
        )));
    }
    if let Some(bad) = grid.iter().find(|l| !(**l >= T::zero())) {
        return Err(Error::Domain(format!("lambda must be nonnegative, got {bad}")));
    }
    let n = y.len();
    if n / folds < 2 {
        return Err(Error::Config(format!(
            "{folds} folds over {n} observations leave fewer than 2 per fold"
        )));
    }
    let (f, design) = lasso_design(dec, y)?;
    let tol = tolerance(y);

    let perm = rng.permutation(n);
    let mut assignment = vec![0usize; n];
    for (pos, &i) in perm.iter().enumerate() {
        assignment[i] = pos % folds;
    }

    let fold_errors: Vec<Vec<T>> = (0..folds)
        .into_par_iter()
        .map(|fold| -> Result<Vec<T>> {
            let train: Vec<usize> = (0..n).filter(|&i| assignment[i] != fold).collect();
            let test: Vec<usize> = (0..n).filter(|&i| assignment[i] == fold).collect();
            let train_prob = Problem::new(&f, &design, y, Some(&train))?;
            let test_prob = Problem::new(&f, &design, y, Some(&test))?;
            let path = solve_path(&train_prob, grid, tol)?;
            Ok(path
                .iter()
                .map(|(a, g)| {
                    (0..test.len())
                        .map(|i| {
                            let e = test_prob.y[i] - test_prob.predict(a, g, i);
                            e * e
                        })
                        .sum::<T>()
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let nf = T::of_usize(n);
    let cv_table: Vec<(T, T)> = grid
        .iter()
        .enumerate()
        .map(|(g, &l)| (l, fold_errors.iter().map(|e| e[g]).sum::<T>() / nf))
        .collect();
    let mut best = 0;
    for (g, &(l, e)) in cv_table.iter().enumerate() {
        let (bl, be) = cv_table[best];
        if e < be || (e == be && l > bl) {
            best = g;
        }
    }
    if rule == CvRule::OneStandardError {
        // fold means weighted by fold size; spread scaled by 1/(folds - 1)
        let mean = cv_table[best].1;
        let mut spread = T::zero();
        for (fold, errors) in fold_errors.iter().enumerate() {
            let size = T::of_usize(assignment.iter().filter(|&&a| a == fold).count());
            let d = errors[best] / size - mean;
            spread += size * d * d;
        }
        let se = (spread / nf / T::of_usize(folds - 1)).sqrt();
        for (g, &(l, e)) in cv_table.iter().enumerate() {
            if e <= mean + se && l > cv_table[best].0 {
                best = g;
            }
        }
    }
    let lambda = grid[best];

    // refit along the grid down to the chosen value for warm starts
    let prob = Problem::new(&f, &design, y, None)?;
    let path_grid: Vec<T> = grid.iter().copied().filter(|&l| l >= lambda).collect();
    let path = solve_path(&prob, &path_grid, tol)?;
    let pos = path_grid.iter().position(|&l| l == lambda).expect("chosen lambda on path");
    let mut solver = Solver::new(&prob, lambda);
    solver.alpha = path[pos].0.clone();
    solver.gamma = path[pos].1.clone();
    let mut fit = finish(&design, &solver, lambda, 0);
    fit.cv_table = cv_table;
    Ok(fit)
}

/// Default grid and 10-fold CV.
pub fn lasso_cv_default<T: Real>(
    dec: &FactorDecomposition<T>,
    y: &[T],
    rule: CvRule,
    rng: &mut RngStream,
) -> Result<LassoFit<T>> {
    let grid = lambda_grid(dec, y, 50, T::lit(1e-3))?;
    lasso_cv_with(dec, y, &grid, 10, rule, rng)
}
