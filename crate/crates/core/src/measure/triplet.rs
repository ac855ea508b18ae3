use std::fmt;

use crate::error::{LevyError, Result};
use crate::linalg::SquareMatrix;
use crate::measure::levy_measure::{DensityForm, LevyMeasure, RadialDensity};
use crate::measure::region::Region;
use crate::quad::QuadOptions;
use crate::scalar::Real;

/// Largest dimension supported by exponent evaluation and simulation.
pub const MAX_DIMENSION: usize = 3;

const SYMMETRY_TOL: f64 = 1e-12;
const EIGEN_TOL: f64 = 1e-12;

/// Drift, Gaussian covariance and Lévy measure.
///
/// Construction does not validate; call [`LevyTriplet::validate`] or go
/// through an operation that does.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyTriplet<T> {
    pub drift: Vec<T>,
    /// Variance per unit time, row-major `n × n`.
    pub covariance: Vec<Vec<T>>,
    pub measure: LevyMeasure<T>,
}

impl<T: Real> LevyTriplet<T> {
    pub fn new(drift: Vec<T>, covariance: Vec<Vec<T>>, measure: LevyMeasure<T>) -> Self {
        Self {
            drift,
            covariance,
            measure,
        }
    }

    /// One-dimensional triplet `(a, σ², ν)`.
    pub fn scalar(drift: T, variance: T, measure: LevyMeasure<T>) -> Self {
        Self::new(vec![drift], vec![vec![variance]], measure)
    }

    pub fn brownian(variance: T) -> Self {
        Self::scalar(T::zero(), variance, LevyMeasure::empty(1))
    }

    pub fn dimension(&self) -> usize {
        self.drift.len()
    }

    pub(crate) fn covariance_matrix(&self) -> SquareMatrix<T> {
        SquareMatrix::from_rows(&self.covariance).expect("validated covariance is square")
    }

    /// Sum of independent Lévy processes: drifts and covariances add, atomic
    /// measures are concatenated.
    pub fn independent_sum(&self, other: &Self) -> Result<Self> {
        if self.dimension() != other.dimension() {
            return Err(LevyError::Dimension {
                expected: self.dimension(),
                found: other.dimension(),
            });
        }
        let drift = self.drift.iter().zip(&other.drift).map(|(&a, &b)| a + b).collect();
        let covariance = self
            .covariance
            .iter()
            .zip(&other.covariance)
            .map(|(r1, r2)| r1.iter().zip(r2).map(|(&a, &b)| a + b).collect())
            .collect();
        Ok(Self::new(drift, covariance, self.measure.combined_with(&other.measure)?))
    }

    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let n = self.dimension();
        if n == 0 {
            v.push(Violation::UnsupportedDimension(0));
        } else if n > MAX_DIMENSION {
            v.push(Violation::UnsupportedDimension(n));
        }
        if self.drift.iter().any(|x| !x.is_finite()) {
            v.push(Violation::NonFinite("drift".into()));
        }
        self.validate_covariance(n, &mut v);
        if self.measure.dimension() != n {
            v.push(Violation::MeasureDimension {
                triplet: n,
                measure: self.measure.dimension(),
            });
        }
        validate_measure(&self.measure, &mut v);
        ValidationReport { violations: v }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(LevyError::InvalidTriplet(report))
        }
    }

    fn validate_covariance(&self, n: usize, v: &mut Vec<Violation>) {
        if self.covariance.len() != n || self.covariance.iter().any(|r| r.len() != n) {
            v.push(Violation::CovarianceShape);
            return;
        }
        if self.covariance.iter().flatten().any(|x| !x.is_finite()) {
            v.push(Violation::NonFinite("covariance".into()));
            return;
        }
        let q = self.covariance_matrix();
        let mut asym = T::zero();
        for i in 0..n {
            for j in 0..n {
                asym = asym.max((q.at(i, j) - q.at(j, i)).abs());
            }
        }
        if asym > T::lit(SYMMETRY_TOL) {
            v.push(Violation::CovarianceNotSymmetric(asym.as_f64()));
        }
        let min_ev = q
            .symmetric_eigenvalues()
            .into_iter()
            .fold(T::infinity(), T::min);
        if min_ev < -T::lit(EIGEN_TOL) {
            v.push(Violation::CovarianceNotPsd(min_ev.as_f64()));
        }
    }
}

fn validate_measure<T: Real>(m: &LevyMeasure<T>, v: &mut Vec<Violation>) {
    match m {
        LevyMeasure::FiniteAtomic { dimension, atoms } => {
            for (i, a) in atoms.iter().enumerate() {
                if a.location.len() != *dimension {
                    v.push(Violation::AtomDimension(i));
                    continue;
                }
                if a.location.iter().any(|x| !x.is_finite()) || !a.mass.is_finite() {
                    v.push(Violation::NonFinite(format!("atom {i}")));
                    continue;
                }
                if a.location.iter().all(|&x| x == T::zero()) {
                    v.push(Violation::AtomAtOrigin(i));
                }
                if !(a.mass > T::zero()) {
                    v.push(Violation::NonPositiveMass(i));
                }
            }
        }
        LevyMeasure::RadialDensity(d) => validate_density(d, v),
    }
}

fn validate_density<T: Real>(d: &RadialDensity<T>, v: &mut Vec<Violation>) {
    let params: Vec<T> = match d.form {
        DensityForm::PowerLaw {
            coefficient,
            exponent,
        } => vec![coefficient, exponent],
        DensityForm::TemperedPowerLaw {
            coefficient,
            exponent,
            decay,
        } => vec![coefficient, exponent, decay],
        DensityForm::Uniform { height } => vec![height],
        DensityForm::GaussianBump {
            mass,
            center,
            width,
        } => vec![mass, center, width],
    };
    if params.iter().any(|p| !p.is_finite())
        || !d.support.inner.is_finite()
        || d.support.outer.is_nan()
        || !d.singularity_exponent.is_finite()
    {
        v.push(Violation::NonFinite("density parameters".into()));
        return;
    }
    let negative = match d.form {
        DensityForm::PowerLaw { coefficient, .. } => coefficient < T::zero(),
        DensityForm::TemperedPowerLaw {
            coefficient, decay, ..
        } => coefficient < T::zero() || decay < T::zero(),
        DensityForm::Uniform { height } => height < T::zero(),
        DensityForm::GaussianBump { mass, width, .. } => mass < T::zero() || !(width > T::zero()),
    };
    if negative {
        v.push(Violation::DensityParameter(
            "density must be nonnegative with positive width".into(),
        ));
    }
    if d.support.inner < T::zero() || !(d.support.outer > d.support.inner) {
        v.push(Violation::DensityParameter(
            "support needs 0 ≤ inner < outer".into(),
        ));
        return;
    }
    let beta = d.singularity_exponent;
    if beta < T::zero() || beta >= T::lit(3.0) {
        v.push(Violation::SingularityExponent(beta.as_f64()));
        return;
    }
    if d.support.inner == T::zero() && d.form.origin_exponent() > beta {
        v.push(Violation::SingularityExponent(d.form.origin_exponent().as_f64()));
        return;
    }
    if d.support.outer.is_infinite() {
        if let DensityForm::PowerLaw { exponent, .. } = d.form {
            if exponent <= T::one() {
                v.push(Violation::NotIntegrable(
                    "power law tail with exponent ≤ 1 has infinite large-jump mass".into(),
                ));
                return;
            }
        }
        if let DensityForm::Uniform { height } = d.form {
            if height > T::zero() {
                v.push(Violation::NotIntegrable(
                    "uniform density on an unbounded support".into(),
                ));
                return;
            }
        }
    }
    let opts = QuadOptions {
        rel_tol: 1e-6,
        ..QuadOptions::default()
    };
    let m = LevyMeasure::RadialDensity(d.clone());
    let weight = |x: &[T]| (x[0] * x[0]).min(T::one());
    match m.nu_integral_with(weight, &Region::All, opts) {
        Ok(i) if i.value.is_finite() => {}
        _ => v.push(Violation::NotIntegrable(
            "∫ |x|²∧1 ν(dx) did not converge".into(),
        )),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    UnsupportedDimension(usize),
    NonFinite(String),
    CovarianceShape,
    CovarianceNotSymmetric(f64),
    CovarianceNotPsd(f64),
    MeasureDimension { triplet: usize, measure: usize },
    AtomDimension(usize),
    AtomAtOrigin(usize),
    NonPositiveMass(usize),
    DensityParameter(String),
    SingularityExponent(f64),
    NotIntegrable(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnsupportedDimension(n) => {
                write!(f, "dimension {n} unsupported (1..={MAX_DIMENSION})")
            }
            Violation::NonFinite(what) => write!(f, "non-finite value in {what}"),
            Violation::CovarianceShape => write!(f, "covariance is not n×n"),
            Violation::CovarianceNotSymmetric(d) => {
                write!(f, "covariance not symmetric (max asymmetry {d:e})")
            }
            Violation::CovarianceNotPsd(ev) => {
                write!(f, "covariance not PSD (min eigenvalue {ev:e})")
            }
            Violation::MeasureDimension { triplet, measure } => write!(
                f,
                "measure dimension {measure} differs from triplet dimension {triplet}"
            ),
            Violation::AtomDimension(i) => write!(f, "atom {i} has wrong dimension"),
            Violation::AtomAtOrigin(i) => write!(f, "atom {i} located at the origin"),
            Violation::NonPositiveMass(i) => write!(f, "atom {i} has non-positive mass"),
            Violation::DensityParameter(msg) => write!(f, "density parameter: {msg}"),
            Violation::SingularityExponent(b) => {
                write!(f, "singularity exponent {b} outside [0, 3) or below the form's")
            }
            Violation::NotIntegrable(msg) => write!(f, "not a Lévy measure: {msg}"),
        }
    }
}

/// Violated invariants; empty means valid.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::levy_measure::{Atom, Side, Support};

    #[test]
    fn pure_brownian_is_valid() {
        assert!(LevyTriplet::brownian(1.0f64).validate().is_valid());
    }

    #[test]
    fn negative_variance_is_not_psd() {
        let r = LevyTriplet::brownian(-1.0f64).validate();
        assert_eq!(r.violations.len(), 1);
        assert!(r.to_string().contains("covariance not PSD"));
    }

    #[test]
    fn inverse_square_density_is_valid() {
        let m = LevyMeasure::density(
            DensityForm::PowerLaw {
                coefficient: 1.0f64,
                exponent: 2.0,
            },
            Support {
                inner: 0.0,
                outer: 1.0,
                side: Side::Both,
            },
        );
        let t = LevyTriplet::scalar(0.0, 0.0, m.clone());
        assert!(t.validate().is_valid());
        // ∫_{-1}^{1} |x|²·|x|^{-2} dx = 2
        let v = m.nu_integral(|x| x[0] * x[0], &Region::All).unwrap();
        assert!((v.value - 2.0).abs() < 1e-8);
    }

    #[test]
    fn too_singular_density_rejected() {
        let m = LevyMeasure::density(
            DensityForm::PowerLaw {
                coefficient: 1.0f64,
                exponent: 3.0,
            },
            Support {
                inner: 0.0,
                outer: 1.0,
                side: Side::Positive,
            },
        );
        let r = LevyTriplet::scalar(0.0, 0.0, m).validate();
        assert!(!r.is_valid());
    }

    #[test]
    fn atom_invariants() {
        let m = LevyMeasure::atomic(
            1,
            vec![Atom::scalar(0.0f64, 1.0), Atom::scalar(1.0, -2.0), Atom::scalar(f64::NAN, 1.0)],
        );
        let r = LevyTriplet::scalar(0.0, 0.0, m).validate();
        assert_eq!(r.violations.len(), 3);
    }

    #[test]
    fn asymmetric_and_non_finite_covariance() {
        let t = LevyTriplet::new(
            vec![0.0f64, 0.0],
            vec![vec![1.0, 0.5], vec![0.4, 1.0]],
            LevyMeasure::empty(2),
        );
        assert!(matches!(
            t.validate().violations[0],
            Violation::CovarianceNotSymmetric(_)
        ));
        let t = LevyTriplet::new(vec![f64::INFINITY], vec![vec![f64::NAN]], LevyMeasure::empty(1));
        let r = t.validate();
        assert!(r.violations.iter().all(|v| matches!(v, Violation::NonFinite(_))));
        assert_eq!(r.violations.len(), 2);
    }

    #[test]
    fn dimension_mismatch() {
        let t = LevyTriplet::new(
            vec![0.0f64],
            vec![vec![1.0]],
            LevyMeasure::atomic(2, vec![Atom::new(vec![1.0, 0.0], 1.0)]),
        );
        assert!(matches!(
            t.validate().violations[0],
            Violation::MeasureDimension { .. }
        ));
    }
}
