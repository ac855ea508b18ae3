//! Dense helpers for the small (n ≤ 3) covariance matrices carried by a triplet.

use crate::scalar::Real;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SquareMatrix<T> {
    pub n: usize,
    pub data: Vec<T>,
}

impl<T: Real> SquareMatrix<T> {
    pub fn from_rows(rows: &[Vec<T>]) -> Option<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return None;
        }
        Some(Self {
            n,
            data: rows.iter().flatten().copied().collect(),
        })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Eigenvalues of the symmetric part, by cyclic Jacobi rotations.
    pub fn symmetric_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let half = T::lit(0.5);
        let mut a: Vec<T> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                half * (self.at(i, j) + self.at(j, i))
            })
            .collect();
        for _sweep in 0..64 {
            let off: T = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i * n + j] * a[i * n + j])
                .sum();
            if off <= T::epsilon() * T::epsilon() {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (T::lit(2.0) * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).collect()
    }

    /// Lower Cholesky factor; `None` if a pivot is not strictly positive.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = self.at(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) {
                return None;
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Some(Self { n, data: l })
    }

    /// Square-root factor for sampling `N(0, Q)`: exact zero for `Q = 0`,
    /// Cholesky otherwise, retried with diagonal jitter up to `max_jitter`
    /// for numerically rank-deficient `Q`.
    pub fn sampling_factor(&self, max_jitter: T) -> Option<Self> {
        if self.data.iter().all(|&v| v == T::zero()) {
            return Some(self.clone());
        }
        if let Some(l) = self.cholesky() {
            return Some(l);
        }
        let mut jitter = max_jitter * T::lit(1e-4);
        while jitter <= max_jitter {
            let mut q = self.clone();
            for i in 0..self.n {
                q.data[i * self.n + i] += jitter;
            }
            if let Some(l) = q.cholesky() {
                return Some(l);
            }
            jitter = jitter * T::lit(10.0);
        }
        // Positive semidefinite with exact zero rows (e.g. diag(1, 0)):
        // factor the nonzero block, leave zero rows zero.
        self.semidefinite_factor()
    }

    fn semidefinite_factor(&self) -> Option<Self> {
        let n = self.n;
        let mut l = vec![T::zero(); n * n];
        for j in 0..n {
            let mut d = self.at(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d < -T::lit(1e-12) {
                return None;
            }
            if d <= T::lit(1e-12) {
                continue;
            }
            let djj = d.sqrt();
            l[j * n + j] = djj;
            for i in (j + 1)..n {
                let mut s = self.at(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / djj;
            }
        }
        Some(Self { n, data: l })
    }

    /// `self * v` for a lower-triangular or full matrix.
    pub fn mul_vec(&self, v: &[T], out: &mut [T]) {
        for i in 0..self.n {
            let mut s = T::zero();
            for j in 0..self.n {
                s += self.at(i, j) * v[j];
            }
            out[i] = s;
        }
    }

    /// Quadratic form `uᵀ Q u`.
    pub fn quadratic_form(&self, u: &[T]) -> T {
        let mut s = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                s += u[i] * self.at(i, j) * u[j];
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal_and_rotated() {
        let m = SquareMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let mut ev = m.symmetric_eigenvalues();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0f64).abs() < 1e-14);
        assert!((ev[1] - 3.0f64).abs() < 1e-14);
    }

    #[test]
    fn cholesky_reconstructs() {
        let m = SquareMatrix::from_rows(&[
            vec![4.0, 2.0, 0.4],
            vec![2.0, 3.0, 0.1],
            vec![0.4, 0.1, 1.0],
        ])
        .unwrap();
        let l = m.cholesky().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| l.at(i, k) * l.at(j, k)).sum();
                assert!((s - m.at(i, j)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rank_deficient_factor() {
        let m = SquareMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let l = m.sampling_factor(1e-10).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let s: f64 = (0..2).map(|k| l.at(i, k) * l.at(j, k)).sum();
                assert!((s - m.at(i, j)).abs() < 1e-6);
            }
        }
        let z = SquareMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let lz = z.sampling_factor(1e-10).unwrap();
        assert!((lz.at(0, 0) - 1.0f64).abs() < 1e-4);
    }

    #[test]
    fn negative_definite_has_no_factor() {
        let m = SquareMatrix::from_rows(&[vec![-1.0f64]]).unwrap();
        assert!(m.sampling_factor(1e-10).is_none());
    }
}
