//! Seeded random streams and the variate generators used by the samplers.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Real;

/// Deterministic ChaCha8 stream.
///
/// The same seed yields the same variates on every platform. Independent
/// sub-streams are derived with [`RngStream::substream`], which is how
/// replicates and rolling windows get their own generators.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream `id`. Depends only on this stream's seed and `id`, not on
    /// how many variates have been drawn from it.
    pub fn substream(&self, id: u64) -> Self {
        let derived = splitmix64(self.seed ^ splitmix64(id.wrapping_add(0x5851_F42D_4C95_7F2D)));
        let mut inner = ChaCha8Rng::seed_from_u64(derived);
        inner.set_stream(id);
        Self {
            seed: derived,
            inner,
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn shuffle<X>(&mut self, items: &mut [X]) {
        items.shuffle(&mut self.inner);
    }

    /// Uniformly random permutation of `0..n`.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx
    }

    pub fn gamma(&mut self, shape: f64, scale: f64) -> Result<f64> {
        let dist = Gamma::new(shape, scale)
            .map_err(|e| Error::Domain(format!("gamma({shape}, {scale}): {e}")))?;
        Ok(dist.sample(&mut self.inner))
    }

    pub fn normal_vec<T: Real>(&mut self, len: usize) -> Vec<T> {
        (0..len).map(|_| T::lit(self.standard_normal())).collect()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws `mean + L z` with `z` standard normal, reading only the lower
/// triangle of `cov_cholesky`.
pub fn sample_gaussian_vec<T: Real>(
    rng: &mut RngStream,
    mean: &[T],
    cov_cholesky: &Matrix<T>,
) -> Result<Vec<T>> {
    let d = mean.len();
    if cov_cholesky.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "mean of length {d} with a {}x{} covariance factor",
            cov_cholesky.rows(),
            cov_cholesky.cols()
        )));
    }
    let z: Vec<T> = rng.normal_vec(d);
    Ok((0..d)
        .map(|i| {
            let row = cov_cholesky.row(i);
            mean[i] + (0..=i).map(|k| row[k] * z[k]).sum::<T>()
        })
        .collect())
}

/// Inverse-gamma variate with density proportional to
/// `x^(-shape-1) exp(-scale/x)`.
pub fn sample_inverse_gamma<T: Real>(rng: &mut RngStream, shape: T, scale: T) -> Result<T> {
    if !(shape > T::zero()) || !(scale > T::zero()) {
        return Err(Error::Domain(format!(
            "inverse-gamma needs positive shape and scale, got ({shape}, {scale})"
        )));
    }
    let g = rng.gamma(shape.as_f64(), 1.0 / scale.as_f64())?;
    Ok(T::lit(1.0 / g))
}
