//! Statistical and exact checks of simulated paths against the laws they
//! must follow. Every check returns a [`CheckReport`]; tolerances come from
//! [`bands`]. Statistics are accumulated sequentially in replicate order, so
//! a report is a pure function of its inputs.

pub mod bands;
mod report;

use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{LevyError, Result};
use crate::jumpmeasure::{count_jumps, jump_integral, BorelRegion};
use crate::measure::{LevyExponent, LevyMeasure, LevyTriplet};
use crate::scalar::Real;
use crate::simulate::PathSample;

pub use report::{CheckReport, CheckStatus, Component};

/// Minimum replicate count for ECF-type checks.
pub const MIN_ECF_REPLICATES: usize = 10_000;
/// Minimum replicate count for the relative variance test of jump moments.
pub const MIN_MOMENT_REPLICATES: usize = 100_000;
/// Minimum retained replicates for the strong Markov check.
pub const MIN_RETAINED: usize = 1_000;
/// Required retained fraction under the horizon rule.
pub const MIN_RETAINED_FRACTION: f64 = 0.9999;

fn seed_of<T: Real>(paths: &[PathSample<T>]) -> Option<u64> {
    paths.first().map(|p| p.stream().seed)
}

fn nonempty<T>(paths: &[T]) -> Result<()> {
    if paths.is_empty() {
        Err(LevyError::EmptySample)
    } else {
        Ok(())
    }
}

fn to_f64<T: Real>(x: &[T]) -> Vec<f64> {
    x.iter().map(|v| v.as_f64()).collect()
}

fn dot64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cis(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

/// `(1/N) Σ e^{i⟨u, xₖ⟩}`.
fn ecf(samples: &[Vec<f64>], u: &[f64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for x in samples {
        acc += cis(dot64(u, x));
    }
    acc / samples.len() as f64
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (two-pass).
fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample standard deviation, used for data-driven CLT bands.
fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

fn u_label(u: &[f64]) -> String {
    if u.len() == 1 {
        format!("{}", u[0])
    } else {
        format!("{u:?}")
    }
}

fn values_at<T: Real>(paths: &[PathSample<T>], time: T) -> Result<Vec<Vec<f64>>> {
    paths.iter().map(|p| Ok(to_f64(p.value_at(time)?))).collect()
}

/// Sup over the u-grid of `|(1/N)Σ e^{i⟨u,X_t⟩} − e^{−tψ(u)}|`, band `4/√N`.
pub fn check_ecf<T: Real>(
    paths: &[PathSample<T>],
    triplet: &LevyTriplet<T>,
    time: T,
    u_grid: &[Vec<T>],
) -> Result<CheckReport> {
    nonempty(paths)?;
    let exponent = LevyExponent::new(triplet)?;
    let xs = values_at(paths, time)?;
    let n = paths.len();
    let tol = bands::ecf_band(n);
    let mut components = Vec::with_capacity(u_grid.len());
    for u in u_grid {
        let phi = exponent.char_fn(u, time)?;
        let phi = Complex64::new(phi.re.as_f64(), phi.im.as_f64());
        let uf = to_f64(u);
        let err = (ecf(&xs, &uf) - phi).norm();
        components.push(Component::band(format!("|ECF − φ| at u = {}", u_label(&uf)), err, 0.0, tol));
    }
    let report = CheckReport::from_components(
        "ecf",
        n,
        seed_of(paths),
        "sup_u |ECF(u) − e^{−tψ(u)}| ≤ 4/√N",
        components,
    );
    Ok(if n < MIN_ECF_REPLICATES {
        report.inconclusive("fewer than 10⁴ replicates")
    } else {
        report
    })
}

/// Chi-square bins for Poisson(λ): consecutive counts pooled until the
/// expected count reaches 5; an underfull tail joins the last bin.
fn poisson_bins(counts: &[u64], lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let n = counts.len() as f64;
    let max_count = counts.iter().copied().max().unwrap_or(0) as usize;
    let mut observed = vec![0f64; max_count + 1];
    for &c in counts {
        observed[c as usize] += 1.0;
    }
    let k_max = max_count.max((lambda + 10.0 * lambda.sqrt() + 10.0).ceil() as usize);
    let mut expected_bins = Vec::new();
    let mut observed_bins = Vec::new();
    let (mut e, mut o) = (0.0, 0.0);
    let mut p = (-lambda).exp();
    let mut cum = 0.0;
    for k in 0..=k_max {
        if k > 0 {
            p *= lambda / k as f64;
        }
        cum += p;
        e += n * p;
        o += observed.get(k).copied().unwrap_or(0.0);
        if e >= bands::MIN_EXPECTED_PER_BIN {
            expected_bins.push(e);
            observed_bins.push(o);
            e = 0.0;
            o = 0.0;
        }
    }
    e += n * (1.0 - cum).max(0.0);
    if e > 0.0 || o > 0.0 {
        if e >= bands::MIN_EXPECTED_PER_BIN || expected_bins.is_empty() {
            expected_bins.push(e);
            observed_bins.push(o);
        } else {
            *expected_bins.last_mut().expect("non-empty") += e;
            *observed_bins.last_mut().expect("non-empty") += o;
        }
    }
    (expected_bins, observed_bins)
}

/// Counts `N_t(B)` against Poisson(λ): chi-square at level 1e−3 with pooled
/// bins, plus mean and variance within `4√(λ/N)` of λ.
pub fn check_poisson_law(counts: &[u64], lambda: f64, seed: Option<u64>) -> Result<CheckReport> {
    nonempty(counts)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(LevyError::arg("λ must be finite and ≥ 0"));
    }
    let n = counts.len();
    let xs: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let tol = bands::poisson_band(lambda, n);
    let mut components = Vec::new();
    let (expected, observed) = poisson_bins(counts, lambda);
    if expected.len() >= 2 {
        let stat: f64 = expected
            .iter()
            .zip(&observed)
            .map(|(e, o)| (o - e) * (o - e) / e)
            .sum();
        let df = (expected.len() - 1) as f64;
        let p = ChiSquared::new(df)
            .map_err(|e| LevyError::arg(e.to_string()))?
            .sf(stat);
        components.push(Component::at_least(
            format!("chi-square p-value ({} bins)", expected.len()),
            p,
            bands::CHI_SQUARE_LEVEL,
        ));
    }
    components.push(Component::band("mean", mean(&xs), lambda, tol));
    components.push(Component::band("variance", variance(&xs), lambda, tol));
    Ok(CheckReport::from_components(
        "poisson_law",
        n,
        seed,
        "chi-square p ≥ 1e−3 (bins pooled to expected ≥ 5); |mean − λ| and |variance − λ| ≤ 4√(λ/N)",
        components,
    ))
}

/// `N_t(B)` for every path.
pub fn jump_counts<T: Real>(paths: &[PathSample<T>], region: &BorelRegion<T>, t: T) -> Result<Vec<u64>> {
    paths
        .iter()
        .map(|p| Ok(count_jumps(p, region, t)? as u64))
        .collect()
}

/// Mean of `∫_B f dN_t` against `t∫_B f dν` within `4√(t∫_B f²dν/N)`, and
/// the variance of the compensated integral against `t∫_B f²dν` within 5%.
pub fn check_jump_moments<T: Real, F: Fn(&[T]) -> T>(
    paths: &[PathSample<T>],
    f: F,
    region: &BorelRegion<T>,
    t: T,
    measure: &LevyMeasure<T>,
) -> Result<CheckReport> {
    nonempty(paths)?;
    let m1 = measure.nu_integral(&f, region.region())?.value.as_f64();
    let m2 = measure
        .nu_integral(|x| f(x) * f(x), region.region())?
        .value
        .as_f64();
    let tf = t.as_f64();
    let xs: Vec<f64> = paths
        .iter()
        .map(|p| Ok(jump_integral(p, &f, region, t)?.as_f64()))
        .collect::<Result<_>>()?;
    let compensated: Vec<f64> = xs.iter().map(|x| x - tf * m1).collect();
    let n = paths.len();
    let components = vec![
        Component::band(
            "mean of ∫f dN_t",
            mean(&xs),
            tf * m1,
            bands::clt_band((tf * m2).sqrt(), n),
        ),
        Component::band(
            "variance of compensated integral",
            variance(&compensated),
            tf * m2,
            0.05 * tf * m2,
        ),
    ];
    let report = CheckReport::from_components(
        "jump_moments",
        n,
        seed_of(paths),
        "|mean − t∫f dν| ≤ 4√(t∫f² dν/N); |variance − t∫f² dν| ≤ 5% of t∫f² dν",
        components,
    );
    Ok(if n < MIN_MOMENT_REPLICATES {
        report.inconclusive("fewer than 10⁵ replicates for the relative variance test")
    } else {
        report
    })
}

fn region_sums<T: Real>(paths: &[PathSample<T>], region: &BorelRegion<T>, t: T) -> Result<Vec<Vec<f64>>> {
    paths
        .iter()
        .map(|p| Ok(to_f64(&crate::jumpmeasure::jump_sum(p, region, t)?)))
        .collect()
}

/// Factorization `|Ê[e^{i(⟨u,X_t(B₁)⟩+⟨v,X_t(B₂)⟩)}] − Ê[e^{i⟨u,X_t(B₁)⟩}]Ê[e^{i⟨v,X_t(B₂)⟩}]|`
/// over the grid, band `8/√N`. Overlapping regions are an error.
pub fn check_disjoint_independence<T: Real>(
    paths: &[PathSample<T>],
    b1: &BorelRegion<T>,
    b2: &BorelRegion<T>,
    t: T,
    u_grid: &[Vec<T>],
    v_grid: &[Vec<T>],
) -> Result<CheckReport> {
    let dim = paths.first().map_or(1, |p| p.dimension());
    if b1.region().overlaps(b2.region(), dim) {
        return Err(LevyError::OverlappingRegions(b1.to_string(), b2.to_string()));
    }
    check_disjoint_independence_unchecked(paths, b1, b2, t, u_grid, v_grid)
}

/// [`check_disjoint_independence`] without the disjointness guard; only
/// meaningful as a negative control.
pub fn check_disjoint_independence_unchecked<T: Real>(
    paths: &[PathSample<T>],
    b1: &BorelRegion<T>,
    b2: &BorelRegion<T>,
    t: T,
    u_grid: &[Vec<T>],
    v_grid: &[Vec<T>],
) -> Result<CheckReport> {
    nonempty(paths)?;
    let x1 = region_sums(paths, b1, t)?;
    let x2 = region_sums(paths, b2, t)?;
    let n = paths.len();
    let tol = bands::factorization_band(n);
    let mut components = Vec::new();
    for u in u_grid {
        let uf = to_f64(u);
        let a = ecf(&x1, &uf);
        for v in v_grid {
            let vf = to_f64(v);
            let b = ecf(&x2, &vf);
            let mut joint = Complex64::new(0.0, 0.0);
            for (p, q) in x1.iter().zip(&x2) {
                joint += cis(dot64(&uf, p) + dot64(&vf, q));
            }
            joint /= n as f64;
            components.push(Component::band(
                format!("(u, v) = ({}, {})", u_label(&uf), u_label(&vf)),
                (joint - a * b).norm(),
                0.0,
                tol,
            ));
        }
    }
    Ok(CheckReport::from_components(
        "disjoint_independence",
        n,
        seed_of(paths),
        "max over (u, v) of |joint ECF − product of marginal ECFs| ≤ 8/√N",
        components,
    ))
}

/// `M^u_t = e^{i⟨u,X_t⟩}/φ_t(u)`: `|Ê[M_t] − 1| ≤ 4/(|φ_t(u)|√N)` and
/// `|Ê[(M_t − M_s)·conj(M_s)]| ≤ 4b/√N` with
/// `b = (1/|φ_t| + 1/|φ_s|)/|φ_s|` bounding the summand.
pub fn check_martingale_normalization<T: Real>(
    paths: &[PathSample<T>],
    triplet: &LevyTriplet<T>,
    u: &[T],
    s: T,
    t: T,
) -> Result<CheckReport> {
    nonempty(paths)?;
    if !(s >= T::zero() && s < t) {
        return Err(LevyError::arg("need 0 ≤ s < t"));
    }
    let exponent = LevyExponent::new(triplet)?;
    let c64 = |z: num_complex::Complex<T>| Complex64::new(z.re.as_f64(), z.im.as_f64());
    let phi_s = c64(exponent.char_fn(u, s)?);
    let phi_t = c64(exponent.char_fn(u, t)?);
    let uf = to_f64(u);
    let n = paths.len();
    let mut mean_t = Complex64::new(0.0, 0.0);
    let mut incr = Complex64::new(0.0, 0.0);
    for p in paths {
        let xs = to_f64(p.value_at(s)?);
        let xt = to_f64(p.value_at(t)?);
        let ms = cis(dot64(&uf, &xs)) / phi_s;
        let mt = cis(dot64(&uf, &xt)) / phi_t;
        mean_t += mt;
        incr += (mt - ms) * ms.conj();
    }
    mean_t /= n as f64;
    incr /= n as f64;
    let bound = (1.0 / phi_t.norm() + 1.0 / phi_s.norm()) / phi_s.norm();
    let components = vec![
        Component::band(
            "|Ê[M_t] − 1|",
            (mean_t - 1.0).norm(),
            0.0,
            bands::clt_band(1.0 / phi_t.norm(), n),
        ),
        Component::band(
            "|Ê[(M_t − M_s) conj(M_s)]|",
            incr.norm(),
            0.0,
            bands::clt_band(bound, n),
        ),
    ];
    Ok(CheckReport::from_components(
        "martingale",
        n,
        seed_of(paths),
        "|Ê[M_t] − 1| ≤ 4/(|φ_t|√N); |Ê[(M_t − M_s)conj(M_s)]| ≤ 4(1/|φ_t| + 1/|φ_s|)/(|φ_s|√N)",
        components,
    ))
}

/// Whether `M` is compensated by its mean drift.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Compensation {
    Compensated,
    /// Negative control: the raw jump integral, not a martingale.
    Uncompensated,
}

/// `E[M_t N_t] = E[Σ_{T_n ≤ t} ΔM_{T_n}]` for `M_t = ∫_{B_M} f dN_t − t∫_{B_M} f dν`
/// and `N_t = N_t(B_N)`. Both sample means are compared with
/// `t∫_{B_M∩B_N} f dν`, and their paired difference with 0, each within
/// `4σ̂/√N` using the sample standard deviation of the summands.
pub fn check_jump_covariance_identity<T: Real, F: Fn(&[T]) -> T>(
    paths: &[PathSample<T>],
    measure: &LevyMeasure<T>,
    f: F,
    m_region: &BorelRegion<T>,
    n_region: &BorelRegion<T>,
    t: T,
    compensation: Compensation,
) -> Result<CheckReport> {
    nonempty(paths)?;
    let tf = t.as_f64();
    let drift = match compensation {
        Compensation::Compensated => measure.nu_integral(&f, m_region.region())?.value.as_f64(),
        Compensation::Uncompensated => 0.0,
    };
    let expected = tf
        * measure
            .nu_integral(
                |x| if n_region.contains(x) { f(x) } else { T::zero() },
                m_region.region(),
            )?
            .value
            .as_f64();
    let mut lhs = Vec::with_capacity(paths.len());
    let mut rhs = Vec::with_capacity(paths.len());
    for p in paths {
        let mut m = -tf * drift;
        let mut count = 0.0;
        let mut sum_dm = 0.0;
        for (tau, d) in p.jumps() {
            if tau > t {
                break;
            }
            let in_m = m_region.contains(d);
            let in_n = n_region.contains(d);
            if in_m {
                m += f(d).as_f64();
            }
            if in_n {
                count += 1.0;
                if in_m {
                    sum_dm += f(d).as_f64();
                }
            }
        }
        lhs.push(m * count);
        rhs.push(sum_dm);
    }
    let diff: Vec<f64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    let n = paths.len();
    let components = vec![
        Component::band("Ê[M_t N_t]", mean(&lhs), expected, bands::clt_band(std_dev(&lhs), n)),
        Component::band(
            "Ê[Σ ΔM at jumps of N]",
            mean(&rhs),
            expected,
            bands::clt_band(std_dev(&rhs), n),
        ),
        Component::band("paired difference", mean(&diff), 0.0, bands::clt_band(std_dev(&diff), n)),
    ];
    let name = match compensation {
        Compensation::Compensated => "jump_covariance",
        Compensation::Uncompensated => "jump_covariance_control",
    };
    Ok(CheckReport::from_components(
        name,
        n,
        seed_of(paths),
        "each estimator within 4σ̂/√N of t∫_{B_M∩B_N} f dν; paired difference within 4σ̂/√N of 0",
        components,
    ))
}

/// Residual `R = X_t − Σ_{τ≤t} Δ − (a + c)t` (c the small-jump compensator
/// rate). With `Q = 0`, R must vanish up to rounding; otherwise its ECF is
/// tested against `e^{−½u²Qt}` within `4/√N` and its excess kurtosis
/// against 0 within `4√(24/N)`.
pub fn check_gaussian_residual<T: Real>(
    paths: &[PathSample<T>],
    triplet: &LevyTriplet<T>,
    time: T,
    u_grid: &[T],
) -> Result<CheckReport> {
    nonempty(paths)?;
    if triplet.dimension() != 1 {
        return Err(LevyError::Dimension {
            expected: 1,
            found: triplet.dimension(),
        });
    }
    triplet.ensure_valid()?;
    let tf = time.as_f64();
    let a = triplet.drift[0].as_f64();
    let q = triplet.covariance[0][0].as_f64();
    let mut residuals = Vec::with_capacity(paths.len());
    let mut scale = 0f64;
    for p in paths {
        let x = p.value_at(time)?[0].as_f64();
        let drift = (a + p.compensator_rate()[0].as_f64()) * tf;
        let mut jumps = 0.0;
        let mut abs_jumps = 0.0;
        for (tau, d) in p.jumps() {
            if tau <= time {
                jumps += d[0].as_f64();
                abs_jumps += d[0].as_f64().abs();
            }
        }
        residuals.push(x - jumps - drift);
        scale = scale.max(x.abs() + abs_jumps + drift.abs());
    }
    let n = paths.len();
    let seed = seed_of(paths);
    if q == 0.0 {
        // exact up to floating-point rounding of the reconstruction sums
        let tol = 64.0 * f64::EPSILON * scale.max(1.0);
        let worst = residuals.iter().fold(0f64, |m, r| m.max(r.abs()));
        return Ok(CheckReport::from_components(
            "gaussian_residual",
            n,
            seed,
            "Q = 0: max |R| ≤ 64·ε_mach·max(1, |X| + Σ|Δ| + |(a+c)t|)",
            vec![Component::band("max |R|", worst, 0.0, tol)],
        ));
    }
    let samples: Vec<Vec<f64>> = residuals.iter().map(|&r| vec![r]).collect();
    let tol = bands::ecf_band(n);
    let mut components = Vec::new();
    for &u in u_grid {
        let u = u.as_f64();
        let target = (-0.5 * u * u * q * tf).exp();
        let err = (ecf(&samples, &[u]) - target).norm();
        components.push(Component::band(format!("|ECF(R) − e^(−u²Qt/2)| at u = {u}"), err, 0.0, tol));
    }
    let m = mean(&residuals);
    let (mut m2, mut m4) = (0.0, 0.0);
    for r in &residuals {
        let d = (r - m) * (r - m);
        m2 += d;
        m4 += d * d;
    }
    m2 /= n as f64;
    m4 /= n as f64;
    components.push(Component::band(
        "excess kurtosis of R",
        m4 / (m2 * m2) - 3.0,
        0.0,
        bands::kurtosis_band(n),
    ));
    let report = CheckReport::from_components(
        "gaussian_residual",
        n,
        seed,
        "sup_u |ECF(R) − e^{−u²Qt/2}| ≤ 4/√N; |excess kurtosis| ≤ 4√(24/N)",
        components,
    );
    Ok(if n < MIN_ECF_REPLICATES {
        report.inconclusive("fewer than 10⁴ replicates")
    } else {
        report
    })
}

/// Restart at `T = ` first jump in `B`: the ECF of `X_{T+s} − X_T` over
/// retained replicates (`T + s ≤` horizon) against `e^{−sψ(u)}` within
/// `4/√N_ret`, and its factorization against the pre-`T` value `X_{T−}`
/// within `8/√N_ret`. Paths must observe `T + s` (see
/// [`crate::simulate::Probe`]). The horizon must be at least
/// `10(s + 1/ν(B))`; fewer than 10³ retained replicates is inconclusive.
pub fn check_strong_markov<T: Real>(
    paths: &[PathSample<T>],
    triplet: &LevyTriplet<T>,
    region: &BorelRegion<T>,
    lag: T,
    u_grid: &[Vec<T>],
) -> Result<CheckReport> {
    nonempty(paths)?;
    let exponent = LevyExponent::new(triplet)?;
    let rate = triplet.measure.mass(region.region())?;
    if !(rate > T::zero()) {
        return Err(LevyError::arg("strong Markov check needs ν(B) > 0"));
    }
    let min_horizon = T::lit(10.0) * (lag + T::one() / rate);
    if let Some(p) = paths.iter().find(|p| p.horizon() < min_horizon) {
        return Err(LevyError::arg(format!(
            "horizon {} is below 10(s + 1/ν(B)) = {}",
            p.horizon(),
            min_horizon
        )));
    }
    let mut post = Vec::new();
    let mut pre = Vec::new();
    for p in paths {
        let Some(k) = p.jumps().position(|(_, d)| region.contains(d)) else {
            continue;
        };
        let tau = p.jump_times()[k];
        let end = tau + lag;
        if end > p.horizon() {
            continue;
        }
        let x_end = to_f64(p.value_at(end)?);
        let x_tau = to_f64(p.value(p.index_of(tau)?));
        post.push(x_end.iter().zip(&x_tau).map(|(a, b)| a - b).collect::<Vec<f64>>());
        pre.push(to_f64(&p.left_limit_at_jump(k)));
    }
    let n = paths.len();
    let kept = post.len();
    let fraction = kept as f64 / n as f64;
    let mut components = vec![Component::at_least("retained fraction", fraction, MIN_RETAINED_FRACTION)];
    if kept > 0 {
        let tol = bands::ecf_band(kept);
        let tol_cross = bands::factorization_band(kept);
        for u in u_grid {
            let phi = exponent.char_fn(u, lag)?;
            let phi = Complex64::new(phi.re.as_f64(), phi.im.as_f64());
            let uf = to_f64(u);
            let a = ecf(&post, &uf);
            components.push(Component::band(
                format!("|ECF(X_(T+s) − X_T) − e^(−sψ)| at u = {}", u_label(&uf)),
                (a - phi).norm(),
                0.0,
                tol,
            ));
            let b = ecf(&pre, &uf);
            let mut joint = Complex64::new(0.0, 0.0);
            for (x, y) in post.iter().zip(&pre) {
                joint += cis(dot64(&uf, x) + dot64(&uf, y));
            }
            joint /= kept as f64;
            components.push(Component::band(
                format!("|cross factorization with X_T−| at u = {}", u_label(&uf)),
                (joint - a * b).norm(),
                0.0,
                tol_cross,
            ));
        }
    }
    let report = CheckReport::from_components(
        "strong_markov",
        kept,
        seed_of(paths),
        "retained fraction ≥ 0.9999; sup_u |ECF − e^{−sψ(u)}| ≤ 4/√N_ret; cross factorization with X_{T−} ≤ 8/√N_ret",
        components,
    );
    Ok(if kept < MIN_RETAINED {
        report.inconclusive("fewer than 10³ retained replicates")
    } else {
        report
    })
}

/// `[−k, …, k]` with the given step, as one-dimensional u-vectors.
pub fn symmetric_grid<T: Real>(half_count: usize, step: T) -> Vec<Vec<T>> {
    let k = half_count as i64;
    (-k..=k)
        .map(|j| vec![T::from_i64(j).expect("small integer") * step])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::simulate::{simulate_batch, SimConfig};

    #[test]
    fn bins_pool_to_five() {
        let counts: Vec<u64> = (0..1000).map(|i| (i % 5) as u64).collect();
        let (e, o) = poisson_bins(&counts, 2.0);
        assert!(e.iter().all(|&x| x >= 5.0));
        assert!((e.iter().sum::<f64>() - 1000.0).abs() < 1e-6);
        assert_eq!(o.iter().sum::<f64>(), 1000.0);
    }

    #[test]
    fn zero_rate_trivially_passes() {
        let r = check_poisson_law(&[0; 100], 0.0, None).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn poisson_law_and_wrong_rate_control() {
        let mut counts = Vec::new();
        for i in 0..100_000u64 {
            let mut rng = RngStream::new(77, i).generator();
            let t = crate::simulate::sample_poisson_events(2.0f64, 1.0, &mut rng).unwrap();
            counts.push(t.len() as u64);
        }
        let good = check_poisson_law(&counts, 2.0, Some(77)).unwrap();
        assert!(good.components[0].statistic >= 1e-3, "{good:?}");
        let bad = check_poisson_law(&counts, 2.5, Some(77)).unwrap();
        assert!(!bad.pass);
    }

    #[test]
    fn drift_paths_are_exact() {
        let t = LevyTriplet::scalar(5.0, 0.0, LevyMeasure::empty(1));
        let paths = simulate_batch(&t, &SimConfig::new(1.0, 0.5), 1, 10_000).unwrap();
        let r = check_ecf(&paths, &t, 1.0, &symmetric_grid(5, 1.0)).unwrap();
        assert!(r.pass && r.statistic < 1e-12, "{r}");
        let m = check_martingale_normalization(&paths, &t, &[1.0], 0.5, 1.0).unwrap();
        assert!(m.pass && m.components[0].statistic < 1e-12);
        let g = check_gaussian_residual(&paths, &t, 1.0, &[1.0]).unwrap();
        assert!(g.pass);
    }

    #[test]
    fn small_samples_are_inconclusive() {
        let t = LevyTriplet::brownian(1.0);
        let paths = simulate_batch(&t, &SimConfig::new(1.0, 1.0), 1, 100).unwrap();
        let r = check_ecf(&paths, &t, 1.0, &symmetric_grid(2, 1.0)).unwrap();
        assert_eq!(r.status, CheckStatus::Inconclusive);
        assert!(!r.pass);
    }

    #[test]
    fn overlapping_regions_error() {
        let t = LevyTriplet::scalar(0.0, 0.0, LevyMeasure::atoms_1d(&[(1.0, 1.0)]));
        let paths = simulate_batch(&t, &SimConfig::new(1.0, 1.0), 1, 10).unwrap();
        let b: BorelRegion<f64> = "[1,inf)".parse().unwrap();
        let g = symmetric_grid(1, 1.0);
        assert!(matches!(
            check_disjoint_independence(&paths, &b, &b, 1.0, &g, &g),
            Err(LevyError::OverlappingRegions(..))
        ));
    }

    #[test]
    fn empty_sample_is_error() {
        let t = LevyTriplet::brownian(1.0f64);
        assert!(matches!(
            check_ecf(&[], &t, 1.0, &symmetric_grid(1, 1.0)),
            Err(LevyError::EmptySample)
        ));
    }
}
