//! Jump measure of a path: stopping times `S^n_B`, counts `N_t(B)`, jump
//! integrals `∫_B f(x) N_t(dx)` and compensated processes `Y_t(B)`.
//!
//! Everything is read from the explicit jump list of a [`PathSample`].

use std::fmt;
use std::str::FromStr;

use crate::error::{LevyError, Result};
use crate::measure::{LevyMeasure, Region};
use crate::scalar::Real;
use crate::simulate::PathSample;

/// A region bounded away from the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BorelRegion<T>(Region<T>);

impl<T: Real> BorelRegion<T> {
    pub fn new(region: Region<T>) -> Result<Self> {
        if region.touches_origin() {
            return Err(LevyError::InvalidRegion(format!(
                "0 lies in the closure of {region}"
            )));
        }
        if let Region::Annulus { inner, outer, .. } = &region {
            if !(*inner > T::zero() && *outer >= *inner) {
                return Err(LevyError::InvalidRegion(region.to_string()));
            }
        }
        Ok(Self(region))
    }

    pub fn region(&self) -> &Region<T> {
        &self.0
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.0.contains(x)
    }
}

impl<T: Real> FromStr for BorelRegion<T> {
    type Err = LevyError;

    fn from_str(s: &str) -> Result<Self> {
        Self::new(s.parse()?)
    }
}

impl<T: Real> fmt::Display for BorelRegion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

fn check_time<T: Real>(p: &PathSample<T>, t: T) -> Result<()> {
    if t >= T::zero() && t <= p.horizon() {
        Ok(())
    } else {
        Err(LevyError::TimeOutOfRange {
            time: t.as_f64(),
            horizon: p.horizon().as_f64(),
        })
    }
}

/// `S¹_B < S²_B < …`
pub fn jump_times_in<T: Real>(p: &PathSample<T>, b: &BorelRegion<T>) -> Vec<T> {
    p.jumps()
        .filter(|(_, d)| b.contains(d))
        .map(|(t, _)| t)
        .collect()
}

/// `N_t(B)`.
pub fn count_jumps<T: Real>(p: &PathSample<T>, b: &BorelRegion<T>, t: T) -> Result<usize> {
    check_time(p, t)?;
    Ok(p.jumps().filter(|&(s, d)| s <= t && b.contains(d)).count())
}

/// `∫_B f(x) N_t(dx) = Σ_{τ ≤ t, Δ ∈ B} f(Δ)`.
pub fn jump_integral<T: Real, F: Fn(&[T]) -> T>(
    p: &PathSample<T>,
    f: F,
    b: &BorelRegion<T>,
    t: T,
) -> Result<T> {
    check_time(p, t)?;
    let mut s = T::zero();
    for (tau, d) in p.jumps() {
        if tau <= t && b.contains(d) {
            s += f(d);
        }
    }
    Ok(s)
}

/// `X_t(B) = ∫_B x N_t(dx)`, one entry per dimension.
pub fn jump_sum<T: Real>(p: &PathSample<T>, b: &BorelRegion<T>, t: T) -> Result<Vec<T>> {
    check_time(p, t)?;
    let mut s = vec![T::zero(); p.dimension()];
    for (tau, d) in p.jumps() {
        if tau <= t && b.contains(d) {
            for (acc, &x) in s.iter_mut().zip(d) {
                *acc += x;
            }
        }
    }
    Ok(s)
}

/// `∫_B x ν(dx)`, one entry per dimension.
pub fn region_first_moment<T: Real>(m: &LevyMeasure<T>, b: &BorelRegion<T>) -> Result<Vec<T>> {
    (0..m.dimension())
        .map(|j| Ok(m.nu_integral(|x| x[j], b.region())?.value))
        .collect()
}

/// `Y_t(B) = X_t(B) − t ∫_B x ν(dx)`.
pub fn compensated_jump_process<T: Real>(
    p: &PathSample<T>,
    b: &BorelRegion<T>,
    m: &LevyMeasure<T>,
    t: T,
) -> Result<Vec<T>> {
    let x = jump_sum(p, b, t)?;
    let mean = region_first_moment(m, b)?;
    Ok(x.iter().zip(&mean).map(|(&x, &c)| x - t * c).collect())
}

/// Diagnostic only: grid times whose preceding increment exceeds
/// `6σ√Δt` in norm, where `σ²` bounds the diffusion variance per unit time.
/// Small jumps below the grid resolution are missed and large Gaussian
/// moves can be flagged; exact jumps are in the path's jump list.
pub fn flag_large_increments<T: Real>(p: &PathSample<T>, sigma: T) -> Vec<T> {
    let g = p.grid();
    let mut out = Vec::new();
    for i in 1..g.len() {
        let inc: T = p
            .value(i)
            .iter()
            .zip(p.value(i - 1))
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt();
        if inc > T::lit(6.0) * sigma * (g[i] - g[i - 1]).sqrt() {
            out.push(g[i]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> PathSample<f64> {
        PathSample::pure_jump_1d(1.0, &[(0.3, 2.0), (0.7, -1.5), (0.9, 0.2)]).unwrap()
    }

    fn region(s: &str) -> BorelRegion<f64> {
        s.parse().unwrap()
    }

    #[test]
    fn stopping_times() {
        let p = path();
        assert_eq!(jump_times_in(&p, &region("[1,inf)")), vec![0.3]);
        assert_eq!(jump_times_in(&p, &region("|x| in [1,inf)")), vec![0.3, 0.7]);
        let empty = PathSample::pure_jump_1d(1.0, &[]).unwrap();
        assert!(jump_times_in(&empty, &region("[1,inf)")).is_empty());
    }

    #[test]
    fn counts() {
        let p = path();
        let b = region("|x| in [1,inf)");
        assert_eq!(count_jumps(&p, &b, 0.5).unwrap(), 1);
        assert_eq!(count_jumps(&p, &b, 0.0).unwrap(), 0);
        assert!(count_jumps(&p, &b, 1.5).is_err());
        let b1 = region("[1,inf)");
        let b2 = region("(-inf,-1]");
        for t in [0.0, 0.3, 0.5, 0.8, 1.0] {
            assert_eq!(
                count_jumps(&p, &b1, t).unwrap() + count_jumps(&p, &b2, t).unwrap(),
                count_jumps(&p, &b, t).unwrap()
            );
        }
    }

    #[test]
    fn integrals() {
        let p = path();
        let b = region("|x| in [1,inf)");
        assert_eq!(jump_integral(&p, |x| x[0] * x[0], &b, 1.0).unwrap(), 6.25);
        assert_eq!(jump_integral(&p, |_| 1.0, &b, 1.0).unwrap(), 2.0);
        assert_eq!(jump_integral(&p, |x| x[0], &region("[1,inf)"), 0.5).unwrap(), 2.0);
    }

    #[test]
    fn compensated_plug_in() {
        let p = PathSample::pure_jump_1d(1.0, &[(0.4, 2.0)]).unwrap();
        let m = LevyMeasure::atoms_1d(&[(2.0, 3.0)]);
        let b = region("[2,2]");
        assert_eq!(compensated_jump_process(&p, &b, &m, 1.0).unwrap(), vec![-4.0]);
        let sym = LevyMeasure::atoms_1d(&[(1.5, 1.0), (-1.5, 1.0)]);
        let bs = region("|x| in [1,2]");
        let p2 = path();
        assert_eq!(
            compensated_jump_process(&p2, &bs, &sym, 1.0).unwrap(),
            jump_sum(&p2, &bs, 1.0).unwrap()
        );
    }

    #[test]
    fn origin_regions_rejected() {
        assert!("(0,1]".parse::<BorelRegion<f64>>().is_err());
        assert!("all".parse::<BorelRegion<f64>>().is_err());
    }

    #[test]
    fn diagnostic_flags_big_jump() {
        let p = PathSample::pure_jump_1d(1.0, &[(0.5, 3.0)]).unwrap();
        assert_eq!(flag_large_increments(&p, 0.1), vec![0.5]);
    }
}
