//! Poisson event times and compound Poisson jumps on a region.

use crate::error::{LevyError, Result};
use crate::measure::{DensityForm, LevyMeasure, RadialDensity, Region, SignedRange};
use crate::rng::UniformSource;
use crate::scalar::Real;

/// A jump `(time, size)`; `size` has one entry per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump<T> {
    pub time: T,
    pub size: Vec<T>,
}

/// Event times of a rate-`rate` Poisson process on `(0, horizon]`: partial
/// sums of `Exp(rate)` inter-arrivals.
pub fn sample_poisson_events<T: Real, R: UniformSource>(
    rate: T,
    horizon: T,
    rng: &mut R,
) -> Result<Vec<T>> {
    if !(rate >= T::zero()) || !rate.is_finite() {
        return Err(LevyError::arg(format!("Poisson rate must be finite and ≥ 0, got {rate}")));
    }
    if !(horizon > T::zero()) {
        return Err(LevyError::arg("horizon must be positive"));
    }
    let mut times = Vec::new();
    if rate == T::zero() {
        return Ok(times);
    }
    let rate = rate.as_f64();
    let horizon = horizon.as_f64();
    let mut t = 0.0;
    loop {
        t += rng.exponential(rate);
        if t > horizon {
            break;
        }
        times.push(T::lit(t));
    }
    Ok(times)
}

#[derive(Debug, Clone)]
enum SizeLaw<T> {
    Atoms {
        locations: Vec<Vec<T>>,
        cumulative: Vec<f64>,
    },
    Density {
        form: DensityForm<T>,
        ranges: Vec<SignedRange<T>>,
        cumulative: Vec<f64>,
        masses: Vec<f64>,
    },
}

/// `ν` restricted to a region of finite mass, normalized.
#[derive(Debug, Clone)]
pub struct JumpSampler<T> {
    rate: T,
    dimension: usize,
    law: SizeLaw<T>,
}

fn categorical(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().expect("non-empty categorical");
    let target = u * total;
    cumulative
        .partition_point(|&c| c <= target)
        .min(cumulative.len() - 1)
}

impl<T: Real> JumpSampler<T> {
    /// Fails with `InfiniteActivity` when `ν(B) = ∞`.
    pub fn new(measure: &LevyMeasure<T>, region: &Region<T>) -> Result<Self> {
        let dimension = measure.dimension();
        match measure {
            LevyMeasure::FiniteAtomic { atoms, .. } => {
                let mut locations = Vec::new();
                let mut cumulative = Vec::new();
                let mut acc = 0.0;
                for a in atoms.iter().filter(|a| region.contains(&a.location)) {
                    acc += a.mass.as_f64();
                    locations.push(a.location.clone());
                    cumulative.push(acc);
                }
                let rate = atoms
                    .iter()
                    .filter(|a| region.contains(&a.location))
                    .map(|a| a.mass)
                    .sum();
                Ok(Self {
                    rate,
                    dimension,
                    law: SizeLaw::Atoms {
                        locations,
                        cumulative,
                    },
                })
            }
            LevyMeasure::RadialDensity(d) => {
                let rate = measure.mass(region)?;
                if rate.is_infinite() {
                    return Err(LevyError::InfiniteActivity(region.to_string()));
                }
                let ranges = d.ranges_in(region);
                let mut masses = Vec::with_capacity(ranges.len());
                let mut cumulative = Vec::with_capacity(ranges.len());
                let mut acc = 0.0;
                for rg in &ranges {
                    let m = range_mass(d, *rg)?;
                    acc += m;
                    masses.push(m);
                    cumulative.push(acc);
                }
                Ok(Self {
                    rate,
                    dimension,
                    law: SizeLaw::Density {
                        form: d.form,
                        ranges,
                        cumulative,
                        masses,
                    },
                })
            }
        }
    }

    /// `ν(B)`.
    pub fn rate(&self) -> T {
        self.rate
    }

    pub fn sample_size<R: UniformSource>(&self, rng: &mut R) -> Vec<T> {
        match &self.law {
            SizeLaw::Atoms {
                locations,
                cumulative,
            } => {
                if locations.len() == 1 {
                    return locations[0].clone();
                }
                locations[categorical(cumulative, rng.uniform())].clone()
            }
            SizeLaw::Density {
                form,
                ranges,
                cumulative,
                masses,
            } => {
                let k = if ranges.len() == 1 {
                    0
                } else {
                    categorical(cumulative, rng.uniform())
                };
                let rg = ranges[k];
                let r = sample_radius(form, rg.lo.as_f64(), rg.hi.as_f64(), masses[k], rng);
                vec![rg.sign * T::lit(r)]
            }
        }
    }

    /// Jumps on `(0, horizon]`: all event times first, then one size each.
    pub fn sample<R: UniformSource>(&self, horizon: T, rng: &mut R) -> Result<Vec<Jump<T>>> {
        let times = sample_poisson_events(self.rate, horizon, rng)?;
        Ok(times
            .into_iter()
            .map(|time| Jump {
                time,
                size: self.sample_size(rng),
            })
            .collect())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

fn range_mass<T: Real>(d: &RadialDensity<T>, rg: SignedRange<T>) -> Result<f64> {
    let m = LevyMeasure::RadialDensity(d.clone());
    let region = Region::Intervals(vec![if rg.sign > T::zero() {
        crate::measure::Interval::closed(rg.lo, rg.hi)
    } else {
        crate::measure::Interval::closed(-rg.hi, -rg.lo)
    }]);
    Ok(m.mass(&region)?.as_f64())
}

/// `∫_lo^hi r^{−p} dr` inverse CDF at `u`.
fn power_law_inverse(p: f64, lo: f64, hi: f64, u: f64) -> f64 {
    if (p - 1.0).abs() < 1e-12 {
        lo * (hi / lo).powf(u)
    } else {
        let q = 1.0 - p;
        let a = lo.powf(q);
        let b = hi.powf(q);
        (a + u * (b - a)).powf(1.0 / q)
    }
}

fn sample_radius<T: Real, R: UniformSource>(
    form: &DensityForm<T>,
    lo: f64,
    hi: f64,
    range_mass: f64,
    rng: &mut R,
) -> f64 {
    match *form {
        DensityForm::PowerLaw { exponent, .. } => {
            power_law_inverse(exponent.as_f64(), lo, hi, rng.uniform())
        }
        DensityForm::Uniform { .. } => lo + (hi - lo) * rng.uniform(),
        DensityForm::TemperedPowerLaw {
            exponent, decay, ..
        } => {
            let p = exponent.as_f64();
            let lam = decay.as_f64();
            if hi.is_finite() && (p >= 0.0 || lo > 0.0) {
                // power-law proposal, accept with e^{−λ(r−lo)}
                loop {
                    let r = power_law_inverse(p, lo, hi, rng.uniform());
                    if rng.uniform() <= (-lam * (r - lo)).exp() {
                        return r;
                    }
                }
            } else if p >= 0.0 {
                // lo + Exp(λ) proposal, accept with (lo/r)^p
                loop {
                    let r = lo + rng.exponential(lam);
                    if r <= hi && rng.uniform() <= (lo / r).powf(p) {
                        return r;
                    }
                }
            } else {
                // lo + Exp(λ/2) proposal; r^{−p}e^{−λr/2} peaks at r* = max(lo, −2p/λ)
                let peak = lo.max(-2.0 * p / lam);
                loop {
                    let r = lo + rng.exponential(0.5 * lam);
                    let ratio = (r / peak).powf(-p) * (-0.5 * lam * (r - peak)).exp();
                    if r <= hi && rng.uniform() <= ratio {
                        return r;
                    }
                }
            }
        }
        DensityForm::GaussianBump {
            mass,
            center,
            width,
        } => {
            let (c, w) = (center.as_f64(), width.as_f64());
            if range_mass >= 1e-3 * mass.as_f64() || !hi.is_finite() {
                loop {
                    let r = c + w * rng.normal();
                    if r >= lo && r <= hi {
                        return r;
                    }
                }
            } else {
                let z = |r: f64| ((r - c) / w).powi(2);
                let peak_z = if c < lo {
                    z(lo)
                } else if c > hi {
                    z(hi)
                } else {
                    0.0
                };
                loop {
                    let r = lo + (hi - lo) * rng.uniform();
                    if rng.uniform() <= (-0.5 * (z(r) - peak_z)).exp() {
                        return r;
                    }
                }
            }
        }
    }
}

/// Compound Poisson jumps with rate `ν(B)` and sizes from `ν|_B / ν(B)`.
pub fn sample_compound_poisson_jumps<T: Real, R: UniformSource>(
    measure: &LevyMeasure<T>,
    region: &Region<T>,
    horizon: T,
    rng: &mut R,
) -> Result<Vec<Jump<T>>> {
    JumpSampler::new(measure, region)?.sample(horizon, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{Side, Support};
    use crate::rng::{FixedUniforms, RngStream};

    #[test]
    fn zero_rate_is_empty() {
        let mut r = RngStream::new(1, 0).generator();
        assert!(sample_poisson_events(0.0f64, 5.0, &mut r).unwrap().is_empty());
    }

    #[test]
    fn fixed_half_uniforms_give_ln2_spacing() {
        let mut f = FixedUniforms::new(vec![0.5]);
        let t = sample_poisson_events(1.0f64, 3.0, &mut f).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert_eq!(t.len(), 4);
        for (k, &x) in t.iter().enumerate() {
            assert!((x - (k + 1) as f64 * ln2).abs() < 1e-12);
        }
    }

    #[test]
    fn negative_rate_rejected() {
        let mut r = RngStream::new(1, 0).generator();
        assert!(sample_poisson_events(-1.0f64, 1.0, &mut r).is_err());
    }

    #[test]
    fn single_atom_sizes() {
        let m = LevyMeasure::atoms_1d(&[(2.0, 3.0)]);
        let region: Region<f64> = "[1,inf)".parse().unwrap();
        let mut r = RngStream::new(3, 0).generator();
        let jumps = sample_compound_poisson_jumps(&m, &region, 10.0, &mut r).unwrap();
        assert!(!jumps.is_empty());
        assert!(jumps.iter().all(|j| j.size == vec![2.0]));
        assert!(jumps.windows(2).all(|w| w[0].time < w[1].time));
    }

    #[test]
    fn empty_region_no_jumps() {
        let m = LevyMeasure::atoms_1d(&[(2.0, 3.0)]);
        let region: Region<f64> = "(-inf,-1]".parse().unwrap();
        let mut r = RngStream::new(3, 0).generator();
        assert!(sample_compound_poisson_jumps(&m, &region, 10.0, &mut r)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn infinite_activity_is_refused() {
        let m = LevyMeasure::density(
            DensityForm::PowerLaw {
                coefficient: 1.0,
                exponent: 2.0,
            },
            Support {
                inner: 0.0,
                outer: 1.0,
                side: Side::Positive,
            },
        );
        let mut r = RngStream::new(3, 0).generator();
        let err = sample_compound_poisson_jumps(&m, &"(0,1]".parse().unwrap(), 1.0, &mut r);
        assert!(matches!(err, Err(LevyError::InfiniteActivity(_))));
        assert!(err.unwrap_err().to_string().contains("use shell series"));
    }

    #[test]
    fn power_law_sizes_match_mean() {
        // x^{-2} on (0.5, 1]: mean size = ln 2 / 1
        let m = LevyMeasure::density(
            DensityForm::PowerLaw {
                coefficient: 1.0,
                exponent: 2.0,
            },
            Support {
                inner: 0.0,
                outer: 1.0,
                side: Side::Positive,
            },
        );
        let s = JumpSampler::new(&m, &"(0.5,1]".parse().unwrap()).unwrap();
        assert!((s.rate() - 1.0f64).abs() < 1e-9);
        let mut r = RngStream::new(4, 0).generator();
        let n = 100_000;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..n {
            let x = s.sample_size(&mut r)[0];
            assert!(x > 0.5 && x <= 1.0);
            sum += x;
            sq += x * x;
        }
        let mean = sum / n as f64;
        let var = 0.5 - std::f64::consts::LN_2.powi(2);
        assert!((mean - std::f64::consts::LN_2).abs() < 4.0 * (var / n as f64).sqrt());
        assert!(sq > 0.0);
    }

    #[test]
    fn tempered_tail_mean() {
        // e^{-x} on [1, ∞) (p = 0): size − 1 ~ Exp(1)
        let m = LevyMeasure::density(
            DensityForm::TemperedPowerLaw {
                coefficient: 1.0,
                exponent: 0.0,
                decay: 1.0,
            },
            Support {
                inner: 1.0,
                outer: f64::INFINITY,
                side: Side::Both,
            },
        );
        let s = JumpSampler::new(&m, &"|x| in [1,inf)".parse().unwrap()).unwrap();
        let mut r = RngStream::new(5, 0).generator();
        let n = 50_000;
        let mut abs_sum = 0.0;
        let mut pos = 0usize;
        for _ in 0..n {
            let x = s.sample_size(&mut r)[0];
            abs_sum += x.abs();
            pos += (x > 0.0) as usize;
        }
        assert!((abs_sum / n as f64 - 2.0).abs() < 4.0 / (n as f64).sqrt());
        assert!((pos as f64 / n as f64 - 0.5).abs() < 4.0 * 0.5 / (n as f64).sqrt());
    }
}
