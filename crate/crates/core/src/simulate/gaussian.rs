//! Brownian part with drift on an arbitrary grid.

use crate::error::{LevyError, Result};
use crate::linalg::SquareMatrix;
use crate::measure::{LevyMeasure, LevyTriplet, Violation};
use crate::rng::UniformSource;
use crate::scalar::Real;

/// Square-root factor of `Q`, prepared once.
#[derive(Debug, Clone)]
pub(crate) struct GaussianFactor<T> {
    factor: SquareMatrix<T>,
    degenerate: bool,
}

impl<T: Real> GaussianFactor<T> {
    pub fn new(covariance: &[Vec<T>], max_jitter: T) -> Result<Self> {
        let n = covariance.len();
        let probe = LevyTriplet::new(vec![T::zero(); n], covariance.to_vec(), LevyMeasure::empty(n));
        let report = probe.validate();
        if report
            .violations
            .iter()
            .any(|v| !matches!(v, Violation::UnsupportedDimension(_)))
        {
            return Err(LevyError::InvalidTriplet(report));
        }
        let q = SquareMatrix::from_rows(covariance).expect("validated square covariance");
        let factor = q.sampling_factor(max_jitter).ok_or_else(|| {
            LevyError::arg("covariance could not be factored within the jitter budget")
        })?;
        let degenerate = factor.data.iter().all(|&v| v == T::zero());
        Ok(Self { factor, degenerate })
    }

    pub fn dimension(&self) -> usize {
        self.factor.n
    }

    /// Writes `drift·tᵢ + Bᵢ` into `out` (row-major, one row per grid time),
    /// with `B₀ = 0` and independent increments `N(0, Q·Δtᵢ)`.
    pub fn fill<R: UniformSource>(&self, drift: &[T], grid: &[T], rng: &mut R, out: &mut [T]) {
        let n = self.dimension();
        let mut z = vec![T::zero(); n];
        let mut lz = vec![T::zero(); n];
        let mut b = vec![T::zero(); n];
        for (i, &t) in grid.iter().enumerate() {
            if i > 0 && !self.degenerate {
                let root_dt = (t - grid[i - 1]).sqrt();
                for zj in z.iter_mut() {
                    *zj = T::lit(rng.normal());
                }
                self.factor.mul_vec(&z, &mut lz);
                for j in 0..n {
                    b[j] += lz[j] * root_dt;
                }
            }
            for j in 0..n {
                out[i * n + j] = drift[j] * t + b[j];
            }
        }
    }
}

/// Values of `a·t + B_t` at the grid times (row-major, `grid.len() × n`),
/// starting from 0. `Q = 0` gives exactly `a·t`.
pub fn sample_gaussian_skeleton<T: Real, R: UniformSource>(
    covariance: &[Vec<T>],
    drift: &[T],
    grid: &[T],
    rng: &mut R,
) -> Result<Vec<T>> {
    if drift.len() != covariance.len() {
        return Err(LevyError::Dimension {
            expected: covariance.len(),
            found: drift.len(),
        });
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(LevyError::arg("grid must be strictly increasing"));
    }
    let g = GaussianFactor::new(covariance, T::lit(1e-10))?;
    let mut out = vec![T::zero(); grid.len() * drift.len()];
    g.fill(drift, grid, rng, &mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn grid(n: usize, t: f64) -> Vec<f64> {
        (0..=n).map(|i| t * i as f64 / n as f64).collect()
    }

    #[test]
    fn degenerate_is_drift_line() {
        let g = grid(10, 1.0);
        let mut r = RngStream::new(0, 0).generator();
        let v = sample_gaussian_skeleton(&[vec![0.0]], &[3.0], &g, &mut r).unwrap();
        for (x, t) in v.iter().zip(&g) {
            assert_eq!(*x, 3.0 * t);
        }
    }

    #[test]
    fn scaling_with_shared_seed() {
        let g = grid(50, 1.0);
        let a = sample_gaussian_skeleton(&[vec![1.0]], &[0.0], &g, &mut RngStream::new(9, 1).generator())
            .unwrap();
        let b = sample_gaussian_skeleton(&[vec![4.0]], &[0.0], &g, &mut RngStream::new(9, 1).generator())
            .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(2.0 * x, *y);
        }
    }

    #[test]
    fn non_psd_rejected() {
        let mut r = RngStream::new(0, 0).generator();
        let e = sample_gaussian_skeleton(&[vec![-1.0]], &[0.0], &[0.0, 1.0], &mut r);
        assert!(matches!(e, Err(LevyError::InvalidTriplet(_))));
    }

    #[test]
    fn terminal_variance() {
        let n = 100_000;
        let mut s2 = 0.0;
        for i in 0..n {
            let mut r = RngStream::new(11, i).generator();
            let v = sample_gaussian_skeleton(&[vec![1.0]], &[0.0], &[0.0, 0.5, 1.0], &mut r).unwrap();
            s2 += v[2] * v[2];
        }
        let var = s2 / n as f64;
        assert!((var - 1.0).abs() <= 4.0 * (2.0 / n as f64).sqrt(), "{var}");
    }

    #[test]
    fn correlated_two_dimensional() {
        let q = vec![vec![1.0, 0.5], vec![0.5, 2.0]];
        let n = 50_000;
        let (mut c01, mut c11) = (0.0, 0.0);
        for i in 0..n {
            let mut r = RngStream::new(12, i).generator();
            let v = sample_gaussian_skeleton(&q, &[0.0, 0.0], &[0.0, 1.0], &mut r).unwrap();
            c01 += v[2] * v[3];
            c11 += v[3] * v[3];
        }
        let nf = n as f64;
        assert!((c01 / nf - 0.5).abs() < 4.0 * (1.25f64 / nf).sqrt() * 1.5);
        assert!((c11 / nf - 2.0).abs() < 4.0 * (8.0f64 / nf).sqrt());
    }
}
