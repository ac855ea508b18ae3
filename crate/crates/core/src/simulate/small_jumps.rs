//! Compensated small jumps `∫_{ε<|x|<1} x (N_t(dx) − tν(dx))` over the shells
//! `B_k = {1/(k+1) < |x| ≤ 1/k}` (with `B_1` open at 1 and the last shell cut
//! at ε). Jumps of size `|x| ≤ ε` are dropped; their second moment is
//! reported as the omitted-variance bound.

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::measure::{LevyMeasure, Region};
use crate::rng::UniformSource;
use crate::scalar::{dot, Real};
use crate::simulate::poisson::{Jump, JumpSampler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmallJumpMode {
    /// One compound Poisson process per shell `B_k`.
    #[default]
    ShellSeries,
    /// A single compound Poisson process on `{ε < |x| < 1}`, sizes drawn
    /// from the whole restriction by inversion or rejection.
    RejectionDirect,
}

/// Output of [`sample_compensated_small_jumps`].
#[derive(Debug, Clone, PartialEq)]
pub struct SmallJumps<T> {
    /// Sorted by time.
    pub jumps: Vec<Jump<T>>,
    /// `−∫_{ε<|x|<1} x ν(dx)` per unit time, one entry per dimension.
    pub compensator_rate: Vec<T>,
    /// `t·∫_{|x|≤ε} |x|² ν(dx)`.
    pub omitted_variance_bound: T,
}

/// Shell samplers and compensator, prepared once per measure.
#[derive(Debug, Clone)]
pub(crate) struct SmallJumpPlan<T> {
    samplers: Vec<JumpSampler<T>>,
    pub compensator_rate: Vec<T>,
    /// `∫_{|x|≤ε} |x|² ν(dx)`.
    pub omitted_second_moment: T,
}

fn shell<T: Real>(lo: T, hi: T, hi_closed: bool) -> Region<T> {
    Region::Annulus {
        inner: lo,
        outer: hi,
        inner_closed: false,
        outer_closed: hi_closed,
        bbox: None,
    }
}

/// Number of shells `K` with `1/(K+1) ≤ ε < 1/K`.
pub(crate) fn shell_count<T: Real>(epsilon: T) -> usize {
    let mut k = ((T::one() / epsilon) - T::one()).ceil().to_usize().unwrap_or(0);
    // guard the rounding of 1/ε
    while k > 0 && T::one() / T::from_usize_lossy(k) <= epsilon {
        k -= 1;
    }
    while T::one() / T::from_usize_lossy(k + 1) > epsilon {
        k += 1;
    }
    k
}

/// `∫_{|x| ≤ ε} |x|² ν(dx)`.
pub(crate) fn omitted_second_moment<T: Real>(measure: &LevyMeasure<T>, epsilon: T) -> Result<T> {
    let region = Region::Annulus {
        inner: T::zero(),
        outer: epsilon,
        inner_closed: false,
        outer_closed: true,
        bbox: None,
    };
    Ok(measure.nu_integral(|x| dot(x, x), &region)?.value)
}

impl<T: Real> SmallJumpPlan<T> {
    pub fn new(
        measure: &LevyMeasure<T>,
        epsilon: T,
        k_max: usize,
        mode: SmallJumpMode,
    ) -> Result<Self> {
        if !(epsilon > T::zero() && epsilon <= T::one()) {
            return Err(LevyError::arg(format!("ε must lie in (0, 1], got {epsilon}")));
        }
        if epsilon < T::one() / T::from_usize_lossy(k_max + 1) {
            return Err(LevyError::arg(format!(
                "ε = {epsilon} needs more than K_max = {k_max} shells (require ε ≥ 1/(K_max+1))"
            )));
        }
        let n = measure.dimension();
        let regions: Vec<Region<T>> = match mode {
            SmallJumpMode::ShellSeries => (1..=shell_count(epsilon))
                .map(|k| {
                    let hi = T::one() / T::from_usize_lossy(k);
                    let lo = (T::one() / T::from_usize_lossy(k + 1)).max(epsilon);
                    shell(lo, hi, k > 1)
                })
                .collect(),
            SmallJumpMode::RejectionDirect if epsilon < T::one() => {
                vec![shell(epsilon, T::one(), false)]
            }
            SmallJumpMode::RejectionDirect => Vec::new(),
        };
        let mut samplers = Vec::new();
        let mut compensator_rate = vec![T::zero(); n];
        for region in &regions {
            let sampler = JumpSampler::new(measure, region)?;
            if sampler.rate() == T::zero() {
                continue;
            }
            for (j, c) in compensator_rate.iter_mut().enumerate() {
                *c -= measure.nu_integral(|x| x[j], region)?.value;
            }
            samplers.push(sampler);
        }
        Ok(Self {
            samplers,
            compensator_rate,
            omitted_second_moment: omitted_second_moment(measure, epsilon)?,
        })
    }

    /// Shell by shell in order of decreasing jump size, each shell drawing
    /// its times then its sizes; the result is sorted by time.
    pub fn sample<R: UniformSource>(&self, horizon: T, rng: &mut R) -> Result<Vec<Jump<T>>> {
        let mut jumps = Vec::new();
        for s in &self.samplers {
            jumps.extend(s.sample(horizon, rng)?);
        }
        jumps.sort_by(|a, b| a.time.partial_cmp(&b.time).expect("finite jump times"));
        Ok(jumps)
    }
}

/// Small jumps with `ε < |Δ| < 1`, their compensator rate and the
/// omitted-variance bound over `[0, horizon]`.
pub fn sample_compensated_small_jumps<T: Real, R: UniformSource>(
    measure: &LevyMeasure<T>,
    epsilon: T,
    horizon: T,
    rng: &mut R,
    k_max: usize,
    mode: SmallJumpMode,
) -> Result<SmallJumps<T>> {
    let plan = SmallJumpPlan::new(measure, epsilon, k_max, mode)?;
    Ok(SmallJumps {
        jumps: plan.sample(horizon, rng)?,
        compensator_rate: plan.compensator_rate.clone(),
        omitted_variance_bound: horizon * plan.omitted_second_moment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{DensityForm, Side, Support};
    use crate::rng::RngStream;

    fn inverse_square(side: Side) -> LevyMeasure<f64> {
        LevyMeasure::density(
            DensityForm::PowerLaw {
                coefficient: 1.0,
                exponent: 2.0,
            },
            Support {
                inner: 0.0,
                outer: 1.0,
                side,
            },
        )
    }

    #[test]
    fn shell_counts() {
        assert_eq!(shell_count(1.0f64), 0);
        assert_eq!(shell_count(0.5f64), 1);
        assert_eq!(shell_count(0.25f64), 3);
        assert_eq!(shell_count(0.3f64), 3);
        assert_eq!(shell_count(0.01f64), 99);
    }

    #[test]
    fn large_atoms_only() {
        let m = LevyMeasure::atoms_1d(&[(1.0, 2.0), (-3.0, 1.0)]);
        let mut r = RngStream::new(0, 0).generator();
        let s = sample_compensated_small_jumps(&m, 0.1, 1.0, &mut r, 100, SmallJumpMode::ShellSeries)
            .unwrap();
        assert!(s.jumps.is_empty());
        assert_eq!(s.compensator_rate, vec![0.0]);
        assert_eq!(s.omitted_variance_bound, 0.0);
    }

    #[test]
    fn inverse_square_bound() {
        let m = inverse_square(Side::Positive);
        let mut r = RngStream::new(0, 0).generator();
        let s = sample_compensated_small_jumps(&m, 0.25, 1.0, &mut r, 100, SmallJumpMode::ShellSeries)
            .unwrap();
        assert!((s.omitted_variance_bound - 0.25).abs() < 1e-8);
        // −∫_{0.25}^1 x·x^{-2} dx = −ln 4
        assert!((s.compensator_rate[0] + 4f64.ln()).abs() < 1e-8);
        assert!(s.jumps.iter().all(|j| j.size[0] > 0.25 && j.size[0] < 1.0));
    }

    #[test]
    fn symmetric_compensator_is_zero() {
        let m = inverse_square(Side::Both);
        let mut r = RngStream::new(0, 0).generator();
        let s = sample_compensated_small_jumps(&m, 0.05, 1.0, &mut r, 100, SmallJumpMode::ShellSeries)
            .unwrap();
        assert_eq!(s.compensator_rate, vec![0.0]);
        let atoms = LevyMeasure::atoms_1d(&[(0.3, 1.0), (-0.3, 1.0), (0.7, 2.0), (-0.7, 2.0)]);
        let s = sample_compensated_small_jumps(&atoms, 0.05, 1.0, &mut r, 100, SmallJumpMode::ShellSeries)
            .unwrap();
        assert_eq!(s.compensator_rate, vec![0.0]);
    }

    #[test]
    fn epsilon_precondition() {
        let m = inverse_square(Side::Positive);
        let mut r = RngStream::new(0, 0).generator();
        assert!(
            sample_compensated_small_jumps(&m, 0.001, 1.0, &mut r, 10, SmallJumpMode::ShellSeries)
                .is_err()
        );
    }

    #[test]
    fn modes_agree_in_mean_count() {
        // ν(0.1 < x < 1) = 9 for x^{-2}
        let m = inverse_square(Side::Positive);
        for mode in [SmallJumpMode::ShellSeries, SmallJumpMode::RejectionDirect] {
            let plan = SmallJumpPlan::new(&m, 0.1, 100, mode).unwrap();
            let n = 20_000;
            let mut count = 0usize;
            for i in 0..n {
                let mut r = RngStream::new(5, i).generator();
                count += plan.sample(1.0, &mut r).unwrap().len();
            }
            let mean = count as f64 / n as f64;
            assert!((mean - 9.0).abs() < 4.0 * (9.0 / n as f64).sqrt(), "{mode:?}: {mean}");
        }
    }
}
