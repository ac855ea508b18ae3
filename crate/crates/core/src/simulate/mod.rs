//! Path simulation by the Lévy–Itô decomposition
//!
//! `X_t = a t + B_t + Σ_{s≤t, |ΔX_s|≥1} ΔX_s + (Σ_{s≤t, ε<|ΔX_s|<1} ΔX_s + c t)`
//!
//! with `c = −∫_{ε<|x|<1} x ν(dx)`. The Gaussian part, the large jumps and
//! the small jumps draw from separate component streams of the replicate's
//! [`RngStream`].

mod gaussian;
mod poisson;
mod small_jumps;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::measure::{LevyMeasure, LevyTriplet, Region};
use crate::rng::{component, RngStream};
use crate::scalar::Real;

pub use gaussian::sample_gaussian_skeleton;
pub(crate) use gaussian::GaussianFactor;
pub use poisson::{sample_compound_poisson_jumps, sample_poisson_events, Jump, JumpSampler};
pub use small_jumps::{sample_compensated_small_jumps, SmallJumpMode, SmallJumps};
pub(crate) use small_jumps::{omitted_second_moment, SmallJumpPlan};

/// Extra observation times `τ + lag` after the first jump `τ` with size in
/// `region`. Path values are only defined at grid times, so statistics that
/// look at a random time plus a lag need these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Probe<T> {
    pub region: Region<T>,
    pub lags: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", deny_unknown_fields)]
pub struct SimConfig<T> {
    pub horizon: T,
    /// Step of the regular part of the grid.
    pub dt: T,
    /// Small jumps with `|Δ| ≤ ε` are dropped.
    #[serde(default = "default_epsilon")]
    pub epsilon: T,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default)]
    pub small_jump_mode: SmallJumpMode,
    #[serde(default)]
    pub probe: Option<Probe<T>>,
    /// Largest diagonal jitter tried when factoring `Q`.
    #[serde(default = "default_jitter")]
    pub max_jitter: T,
}

fn default_epsilon<T: Real>() -> T {
    T::lit(0.01)
}

fn default_k_max() -> usize {
    10_000
}

fn default_jitter<T: Real>() -> T {
    T::lit(1e-10)
}

impl<T: Real> SimConfig<T> {
    /// `ε = 0.01`, `K_max = 10⁴`, shell series, no probes.
    pub fn new(horizon: T, dt: T) -> Self {
        Self {
            horizon,
            dt,
            epsilon: default_epsilon(),
            k_max: default_k_max(),
            small_jump_mode: SmallJumpMode::ShellSeries,
            probe: None,
            max_jitter: default_jitter(),
        }
    }

    pub fn with_epsilon(mut self, epsilon: T) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_mode(mut self, mode: SmallJumpMode) -> Self {
        self.small_jump_mode = mode;
        self
    }

    pub fn with_probe(mut self, region: Region<T>, lags: Vec<T>) -> Self {
        self.probe = Some(Probe { region, lags });
        self
    }

    /// Largest `ε = 2^{−j} ≥ 1/(K_max+1)` whose omitted bound per unit
    /// time `∫_{|x|≤ε}|x|²ν` is at most `target`; falls back to the smallest
    /// admissible ε. Returns the bound actually achieved.
    pub fn with_auto_epsilon(mut self, measure: &LevyMeasure<T>, target: T) -> Result<(Self, T)> {
        let floor = T::one() / T::from_usize_lossy(self.k_max + 1);
        let mut eps = T::one();
        loop {
            let bound = omitted_second_moment(measure, eps)?;
            if bound <= target {
                self.epsilon = eps;
                return Ok((self, bound));
            }
            let next = eps * T::lit(0.5);
            if next < floor {
                self.epsilon = floor;
                let bound = omitted_second_moment(measure, floor)?;
                return Ok((self, bound));
            }
            eps = next;
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon > T::zero() && self.horizon.is_finite()) {
            return Err(LevyError::arg("horizon must be positive and finite"));
        }
        if !(self.dt > T::zero() && self.dt <= self.horizon) {
            return Err(LevyError::arg("need 0 < dt ≤ horizon"));
        }
        if !(self.epsilon > T::zero() && self.epsilon <= T::one()) {
            return Err(LevyError::arg("need 0 < ε ≤ 1"));
        }
        if self.epsilon < T::one() / T::from_usize_lossy(self.k_max + 1) {
            return Err(LevyError::arg("need ε ≥ 1/(K_max+1)"));
        }
        if let Some(p) = &self.probe {
            if p.lags.iter().any(|&l| !(l > T::zero())) {
                return Err(LevyError::arg("probe lags must be positive"));
            }
        }
        Ok(())
    }

    /// `0, dt, 2dt, …` up to and including the horizon.
    pub fn regular_grid(&self) -> Vec<T> {
        let steps = (self.horizon / self.dt).floor().to_usize().unwrap_or(0);
        let mut g: Vec<T> = (0..=steps).map(|i| T::from_usize_lossy(i) * self.dt).collect();
        let last = *g.last().expect("grid starts at 0");
        if self.horizon - last > T::lit(1e-12) * self.horizon {
            g.push(self.horizon);
        } else {
            *g.last_mut().expect("non-empty") = self.horizon;
        }
        g
    }
}

/// One càdlàg trajectory: values on a grid that contains every jump time,
/// plus the explicit jump list.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSample<T> {
    dimension: usize,
    horizon: T,
    grid: Vec<T>,
    /// `grid.len() × dimension`, row-major.
    skeleton: Vec<T>,
    /// Drift, compensator and Gaussian part only.
    continuous: Vec<T>,
    jump_times: Vec<T>,
    /// `jump_times.len() × dimension`.
    jump_sizes: Vec<T>,
    epsilon: T,
    compensator_rate: Vec<T>,
    omitted_variance_bound: T,
    stream: RngStream,
}

impl<T: Real> PathSample<T> {
    /// Assembles a path from its continuous part on `grid` and its jumps.
    /// The grid must start at 0, end at `horizon` and contain every jump
    /// time; `skeleton = continuous + Σ_{τ ≤ t} Δ` is computed here.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        dimension: usize,
        horizon: T,
        grid: Vec<T>,
        continuous: Vec<T>,
        jumps: Vec<Jump<T>>,
        epsilon: T,
        compensator_rate: Vec<T>,
        omitted_variance_bound: T,
        stream: RngStream,
    ) -> Result<Self> {
        let m = grid.len();
        if m < 2 || grid[0] != T::zero() || grid[m - 1] != horizon {
            return Err(LevyError::arg("grid must run from 0 to the horizon"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LevyError::arg("grid must be strictly increasing"));
        }
        if continuous.len() != m * dimension {
            return Err(LevyError::Dimension {
                expected: m * dimension,
                found: continuous.len(),
            });
        }
        if continuous[..dimension].iter().any(|&v| v != T::zero()) {
            return Err(LevyError::arg("path must start at 0"));
        }
        let mut jump_times = Vec::with_capacity(jumps.len());
        let mut jump_sizes = Vec::with_capacity(jumps.len() * dimension);
        for j in &jumps {
            if j.size.len() != dimension {
                return Err(LevyError::Dimension {
                    expected: dimension,
                    found: j.size.len(),
                });
            }
            if !(j.time > T::zero() && j.time <= horizon) {
                return Err(LevyError::TimeOutOfRange {
                    time: j.time.as_f64(),
                    horizon: horizon.as_f64(),
                });
            }
            if j.size.iter().all(|&v| v == T::zero()) {
                return Err(LevyError::arg("jump sizes must be nonzero"));
            }
            if jump_times.last().is_some_and(|&last| !(j.time > last)) {
                return Err(LevyError::arg("jump times must be strictly increasing"));
            }
            if grid.binary_search_by(|g| g.partial_cmp(&j.time).expect("finite")).is_err() {
                return Err(LevyError::NotObserved(j.time.as_f64()));
            }
            jump_times.push(j.time);
            jump_sizes.extend_from_slice(&j.size);
        }
        let mut skeleton = continuous.clone();
        let mut cum = vec![T::zero(); dimension];
        let mut next = 0;
        for (i, &t) in grid.iter().enumerate() {
            while next < jump_times.len() && jump_times[next] <= t {
                for d in 0..dimension {
                    cum[d] += jump_sizes[next * dimension + d];
                }
                next += 1;
            }
            for d in 0..dimension {
                skeleton[i * dimension + d] = continuous[i * dimension + d] + cum[d];
            }
        }
        Ok(Self {
            dimension,
            horizon,
            grid,
            skeleton,
            continuous,
            jump_times,
            jump_sizes,
            epsilon,
            compensator_rate,
            omitted_variance_bound,
            stream,
        })
    }

    /// A one-dimensional pure-jump path with the given `(time, size)` jumps.
    pub fn pure_jump_1d(horizon: T, jumps: &[(T, T)]) -> Result<Self> {
        let mut grid = vec![T::zero(), horizon];
        grid.extend(jumps.iter().map(|j| j.0));
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        grid.dedup();
        let continuous = vec![T::zero(); grid.len()];
        let jumps = jumps
            .iter()
            .map(|&(time, size)| Jump {
                time,
                size: vec![size],
            })
            .collect();
        Self::from_parts(
            1,
            horizon,
            grid,
            continuous,
            jumps,
            T::zero(),
            vec![T::zero()],
            T::zero(),
            RngStream::new(0, 0),
        )
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn horizon(&self) -> T {
        self.horizon
    }

    pub fn grid(&self) -> &[T] {
        &self.grid
    }

    /// Value at grid index `i`.
    pub fn value(&self, i: usize) -> &[T] {
        &self.skeleton[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Continuous component at grid index `i`.
    pub fn continuous(&self, i: usize) -> &[T] {
        &self.continuous[i * self.dimension..(i + 1) * self.dimension]
    }

    /// Index of an observed time.
    pub fn index_of(&self, t: T) -> Result<usize> {
        if !(t >= T::zero() && t <= self.horizon) {
            return Err(LevyError::TimeOutOfRange {
                time: t.as_f64(),
                horizon: self.horizon.as_f64(),
            });
        }
        self.grid
            .binary_search_by(|g| g.partial_cmp(&t).expect("finite"))
            .map_err(|_| LevyError::NotObserved(t.as_f64()))
    }

    /// `X_t` at a grid (or jump) time.
    pub fn value_at(&self, t: T) -> Result<&[T]> {
        Ok(self.value(self.index_of(t)?))
    }

    /// `X_T`.
    pub fn terminal(&self) -> &[T] {
        self.value(self.grid.len() - 1)
    }

    pub fn jump_count(&self) -> usize {
        self.jump_times.len()
    }

    pub fn jump_times(&self) -> &[T] {
        &self.jump_times
    }

    pub fn jump_size(&self, k: usize) -> &[T] {
        &self.jump_sizes[k * self.dimension..(k + 1) * self.dimension]
    }

    /// `(τ, Δ)` in time order.
    pub fn jumps(&self) -> impl Iterator<Item = (T, &[T])> + '_ {
        self.jump_times
            .iter()
            .enumerate()
            .map(move |(k, &t)| (t, self.jump_size(k)))
    }

    /// Left limit `X_{τ−}` at the `k`-th jump.
    pub fn left_limit_at_jump(&self, k: usize) -> Vec<T> {
        let i = self.index_of(self.jump_times[k]).expect("jump times are on the grid");
        self.value(i)
            .iter()
            .zip(self.jump_size(k))
            .map(|(&x, &d)| x - d)
            .collect()
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn compensator_rate(&self) -> &[T] {
        &self.compensator_rate
    }

    pub fn omitted_variance_bound(&self) -> T {
        self.omitted_variance_bound
    }

    pub fn stream(&self) -> RngStream {
        self.stream
    }
}

/// A triplet and a configuration prepared for repeated sampling: the
/// covariance factor, the jump samplers and the compensator are computed once.
#[derive(Debug, Clone)]
pub struct Simulator<T> {
    dimension: usize,
    cfg: SimConfig<T>,
    regular_grid: Vec<T>,
    drift_rate: Vec<T>,
    gaussian: GaussianFactor<T>,
    large: JumpSampler<T>,
    small: SmallJumpPlan<T>,
}

impl<T: Real> Simulator<T> {
    pub fn new(triplet: &LevyTriplet<T>, cfg: &SimConfig<T>) -> Result<Self> {
        triplet.ensure_valid()?;
        cfg.validate()?;
        let measure = &triplet.measure;
        let small = SmallJumpPlan::new(measure, cfg.epsilon, cfg.k_max, cfg.small_jump_mode)?;
        let drift_rate = triplet
            .drift
            .iter()
            .zip(&small.compensator_rate)
            .map(|(&a, &c)| a + c)
            .collect();
        Ok(Self {
            dimension: triplet.dimension(),
            regular_grid: cfg.regular_grid(),
            cfg: cfg.clone(),
            drift_rate,
            gaussian: GaussianFactor::new(&triplet.covariance, cfg.max_jitter)?,
            large: JumpSampler::new(measure, &Region::outside(T::one()))?,
            small,
        })
    }

    pub fn config(&self) -> &SimConfig<T> {
        &self.cfg
    }

    /// `−∫_{ε<|x|<1} x ν(dx)`.
    pub fn compensator_rate(&self) -> &[T] {
        &self.small.compensator_rate
    }

    pub fn omitted_variance_bound(&self) -> T {
        self.cfg.horizon * self.small.omitted_second_moment
    }

    pub fn sample(&self, stream: RngStream) -> Result<PathSample<T>> {
        let horizon = self.cfg.horizon;
        let large = self
            .large
            .sample(horizon, &mut stream.component(component::LARGE_JUMPS))?;
        let small = self
            .small
            .sample(horizon, &mut stream.component(component::SMALL_JUMPS))?;
        let jumps = merge_by_time(large, small);

        let mut grid = self.regular_grid.clone();
        grid.extend(jumps.iter().map(|j| j.time));
        if let Some(probe) = &self.cfg.probe {
            if let Some(first) = jumps.iter().find(|j| probe.region.contains(&j.size)) {
                grid.extend(
                    probe
                        .lags
                        .iter()
                        .map(|&l| first.time + l)
                        .filter(|&t| t <= horizon),
                );
            }
        }
        grid.sort_by(|a, b| a.partial_cmp(b).expect("finite grid"));
        grid.dedup();

        let mut continuous = vec![T::zero(); grid.len() * self.dimension];
        self.gaussian.fill(
            &self.drift_rate,
            &grid,
            &mut stream.component(component::GAUSSIAN),
            &mut continuous,
        );
        PathSample::from_parts(
            self.dimension,
            horizon,
            grid,
            continuous,
            jumps,
            self.cfg.epsilon,
            self.small.compensator_rate.clone(),
            self.omitted_variance_bound(),
            stream,
        )
    }

    /// Replicates `0..count` of `seed`, generated in parallel and returned in
    /// replicate order.
    pub fn sample_batch(&self, seed: u64, count: usize) -> Result<Vec<PathSample<T>>> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample(RngStream::new(seed, i)))
            .collect()
    }
}

fn merge_by_time<T: Real>(a: Vec<Jump<T>>, b: Vec<Jump<T>>) -> Vec<Jump<T>> {
    if b.is_empty() {
        return a;
    }
    if a.is_empty() {
        return b;
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => {
                if x.time <= y.time {
                    out.push(ia.next().expect("peeked"));
                } else {
                    out.push(ib.next().expect("peeked"));
                }
            }
            (Some(_), None) => out.push(ia.next().expect("peeked")),
            (None, Some(_)) => out.push(ib.next().expect("peeked")),
            (None, None) => return out,
        }
    }
}

/// One path of the triplet on the configured grid.
pub fn sample_levy_path<T: Real>(
    triplet: &LevyTriplet<T>,
    cfg: &SimConfig<T>,
    stream: RngStream,
) -> Result<PathSample<T>> {
    Simulator::new(triplet, cfg)?.sample(stream)
}

/// `count` independent paths: replicate `i` uses stream `(seed, i)`.
pub fn simulate_batch<T: Real>(
    triplet: &LevyTriplet<T>,
    cfg: &SimConfig<T>,
    seed: u64,
    count: usize,
) -> Result<Vec<PathSample<T>>> {
    Simulator::new(triplet, cfg)?.sample_batch(seed, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn drift_only_is_exact_line() {
        let t = LevyTriplet::scalar(5.0, 0.0, LevyMeasure::empty(1));
        let p = sample_levy_path(&t, &SimConfig::new(1.0, 0.1), RngStream::new(1, 0)).unwrap();
        for (i, &g) in p.grid().iter().enumerate() {
            assert_eq!(p.value(i)[0], 5.0 * g);
        }
        assert_eq!(p.value(0)[0], 0.0);
        assert_eq!(p.terminal()[0], 5.0);
    }

    #[test]
    fn unit_jump_staircase() {
        let t = LevyTriplet::scalar(0.0, 0.0, LevyMeasure::atoms_1d(&[(1.0, 2.0)]));
        let p = sample_levy_path(&t, &SimConfig::new(5.0, 0.5), RngStream::new(2, 0)).unwrap();
        assert!(p.jump_count() > 0);
        for (i, &g) in p.grid().iter().enumerate() {
            let n = p.jump_times().iter().filter(|&&s| s <= g).count();
            assert_eq!(p.value(i)[0], n as f64);
        }
    }

    #[test]
    fn reconstruction_identity_is_exact() {
        let t = LevyTriplet::scalar(
            0.3,
            1.0,
            LevyMeasure::atoms_1d(&[(1.0, 1.0), (-1.0, 1.0), (0.4, 3.0)]),
        );
        let cfg = SimConfig::new(2.0, 0.25).with_epsilon(0.1);
        let p = sample_levy_path(&t, &cfg, RngStream::new(3, 7)).unwrap();
        for (i, &g) in p.grid().iter().enumerate() {
            let mut cum = 0.0;
            for (s, d) in p.jumps() {
                if s <= g {
                    cum += d[0];
                }
            }
            assert_eq!(p.value(i)[0], p.continuous(i)[0] + cum);
        }
        assert!(p.jump_times().windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(p.value_at(0.123_456), Err(LevyError::NotObserved(_))));
        assert!(matches!(p.value_at(3.0), Err(LevyError::TimeOutOfRange { .. })));
    }

    #[test]
    fn determinism() {
        let t = LevyTriplet::scalar(0.0, 1.0, LevyMeasure::atoms_1d(&[(1.0, 1.0), (-1.0, 1.0)]));
        let cfg = SimConfig::new(1.0, 0.1);
        let a = simulate_batch(&t, &cfg, 42, 50).unwrap();
        let b = simulate_batch(&t, &cfg, 42, 50).unwrap();
        assert_eq!(a, b);
        let c = simulate_batch(&t, &cfg, 43, 50).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn probe_times_are_observed() {
        let t = LevyTriplet::scalar(0.0, 1.0, LevyMeasure::atoms_1d(&[(1.0, 2.0)]));
        let cfg = SimConfig::new(10.0, 10.0).with_probe(Region::outside(1.0), vec![0.5]);
        let p = sample_levy_path(&t, &cfg, RngStream::new(4, 0)).unwrap();
        let tau = p.jump_times()[0];
        assert!(p.value_at(tau + 0.5).is_ok());
    }

    #[test]
    fn auto_epsilon() {
        let m = LevyMeasure::atoms_1d(&[(0.3, 1.0), (0.001, 0.5)]);
        let (cfg, bound) = SimConfig::new(1.0, 0.1).with_auto_epsilon(&m, 1e-6).unwrap();
        assert!((bound - 5e-7f64).abs() < 1e-18);
        assert!(cfg.epsilon >= 0.001 && cfg.epsilon < 0.3);
    }

    #[test]
    fn works_in_single_precision() {
        let t = LevyTriplet::<f32>::scalar(0.5, 1.0, LevyMeasure::atoms_1d(&[(1.0, 1.0)]));
        let p = sample_levy_path(&t, &SimConfig::new(1.0, 0.1), RngStream::new(1, 0)).unwrap();
        assert_eq!(p.value(0)[0], 0.0);
    }
}
