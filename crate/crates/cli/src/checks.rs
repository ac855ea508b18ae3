//! Named checks available to `verify`.

use levyito_core::jumpmeasure::BorelRegion;
use levyito_core::measure::LevyTriplet;
use levyito_core::simulate::PathSample;
use levyito_core::verify::{self, CheckReport, Compensation};

use crate::config::CheckParams;
use crate::error::{CliError, CliResult};

pub struct Context<'a> {
    pub triplet: &'a LevyTriplet<f64>,
    pub paths: &'a [PathSample<f64>],
    pub seed: u64,
    pub params: &'a CheckParams,
    pub time: f64,
}

impl Context<'_> {
    fn region(&self, s: &str) -> CliResult<BorelRegion<f64>> {
        s.parse()
            .map_err(|e| CliError::data(format!("check region '{s}': {e}")))
    }

    fn axis_points(&self, points: &[f64]) -> Vec<Vec<f64>> {
        let n = self.triplet.dimension();
        let mut out = Vec::with_capacity(points.len() * n);
        for axis in 0..n {
            for &p in points {
                let mut u = vec![0.0; n];
                u[axis] = p;
                out.push(u);
            }
        }
        out
    }
}

type CheckFn = fn(&Context) -> CliResult<CheckReport>;

pub const REGISTRY: [(&str, CheckFn); 10] = [
    ("ecf", ecf),
    ("poisson_law", poisson_law),
    ("jump_moments", jump_moments),
    ("disjoint_independence", disjoint_independence),
    ("disjoint_independence_control", disjoint_independence_control),
    ("martingale", martingale),
    ("jump_covariance", jump_covariance),
    ("jump_covariance_control", jump_covariance_control),
    ("gaussian_residual", gaussian_residual),
    ("strong_markov", strong_markov),
];

/// Run when a config selects no checks: everything except the controls.
pub fn default_battery() -> Vec<String> {
    REGISTRY
        .iter()
        .map(|(n, _)| n.to_string())
        .filter(|n| !n.ends_with("_control"))
        .collect()
}

pub fn run(name: &str, ctx: &Context) -> CliResult<CheckReport> {
    let (_, f) = REGISTRY
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| CliError::usage(format!("unknown check '{name}'")))?;
    f(ctx)
}

fn ecf(c: &Context) -> CliResult<CheckReport> {
    Ok(verify::check_ecf(c.paths, c.triplet, c.time, &c.axis_points(&c.params.u_points))?)
}

fn poisson_law(c: &Context) -> CliResult<CheckReport> {
    let b = c.region(&c.params.region)?;
    let counts = verify::jump_counts(c.paths, &b, c.time)?;
    let lambda = c.time * c.triplet.measure.mass(b.region())?;
    Ok(verify::check_poisson_law(&counts, lambda, Some(c.seed))?)
}

fn jump_moments(c: &Context) -> CliResult<CheckReport> {
    let b = c.region(&c.params.region)?;
    let f = c.params.jump_function;
    Ok(verify::check_jump_moments(c.paths, |x| f.eval(x), &b, c.time, &c.triplet.measure)?)
}

fn independence(c: &Context, control: bool) -> CliResult<CheckReport> {
    let b1 = c.region(&c.params.first_region)?;
    let grid = c.axis_points(&c.params.pair_u_points);
    if control {
        let mut r = verify::check_disjoint_independence_unchecked(c.paths, &b1, &b1, c.time, &grid, &grid)?;
        r.check = "disjoint_independence_control".into();
        Ok(r)
    } else {
        let b2 = c.region(&c.params.second_region)?;
        Ok(verify::check_disjoint_independence(c.paths, &b1, &b2, c.time, &grid, &grid)?)
    }
}

fn disjoint_independence(c: &Context) -> CliResult<CheckReport> {
    independence(c, false)
}

fn disjoint_independence_control(c: &Context) -> CliResult<CheckReport> {
    independence(c, true)
}

fn martingale(c: &Context) -> CliResult<CheckReport> {
    let mut u = vec![0.0; c.triplet.dimension()];
    u[0] = c.params.martingale_u;
    let s = c.params.martingale_s.unwrap_or(0.5 * c.time);
    Ok(verify::check_martingale_normalization(c.paths, c.triplet, &u, s, c.time)?)
}

fn covariance(c: &Context, compensation: Compensation) -> CliResult<CheckReport> {
    let b = c.region(&c.params.region)?;
    let f = c.params.jump_function;
    Ok(verify::check_jump_covariance_identity(
        c.paths,
        &c.triplet.measure,
        |x| f.eval(x),
        &b,
        &b,
        c.time,
        compensation,
    )?)
}

fn jump_covariance(c: &Context) -> CliResult<CheckReport> {
    covariance(c, Compensation::Compensated)
}

fn jump_covariance_control(c: &Context) -> CliResult<CheckReport> {
    covariance(c, Compensation::Uncompensated)
}

fn gaussian_residual(c: &Context) -> CliResult<CheckReport> {
    Ok(verify::check_gaussian_residual(c.paths, c.triplet, c.time, &c.params.u_points)?)
}

fn strong_markov(c: &Context) -> CliResult<CheckReport> {
    let b = c.region(&c.params.region)?;
    Ok(verify::check_strong_markov(
        c.paths,
        c.triplet,
        &b,
        c.params.lag,
        &c.axis_points(&c.params.u_points),
    )?)
}
