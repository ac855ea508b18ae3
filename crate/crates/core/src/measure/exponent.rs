//! The Lévy–Khintchine exponent
//!
//! ψ(u) = ½ uᵀQu − i⟨a,u⟩ + ∫_{|x|≥1} (1 − e^{i⟨u,x⟩}) ν(dx)
//!                        + ∫_{|x|<1} (1 − e^{i⟨u,x⟩} + i⟨u,x⟩) ν(dx)
//!
//! and the characteristic function φ_t(u) = e^{−tψ(u)}.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;

use crate::error::{LevyError, Result};
use crate::linalg::SquareMatrix;
use crate::measure::levy_measure::{stretch_for, LevyMeasure, RadialDensity};
use crate::measure::region::{Region, SignedRange};
use crate::measure::triplet::LevyTriplet;
use crate::quad::QuadOptions;
use crate::scalar::{dot, norm, Real};

/// `1 − cos θ` without cancellation.
#[inline]
pub(crate) fn one_minus_cos<T: Real>(theta: T) -> T {
    let s = (theta * T::lit(0.5)).sin();
    T::lit(2.0) * s * s
}

/// `θ − sin θ` without cancellation.
#[inline]
pub(crate) fn theta_minus_sin<T: Real>(theta: T) -> T {
    if theta.abs() < T::lit(1e-2) {
        let t2 = theta * theta;
        let t3 = t2 * theta;
        t3 / T::lit(6.0) * (T::one() - t2 / T::lit(20.0) * (T::one() - t2 / T::lit(42.0)))
    } else {
        theta - theta.sin()
    }
}

/// Kernel `1 − e^{iθ} + iθ·1_{small}` split into real and imaginary parts.
#[inline]
pub(crate) fn jump_kernel<T: Real>(theta: T, small: bool) -> Complex<T> {
    let re = one_minus_cos(theta);
    let im = if small {
        theta_minus_sin(theta)
    } else {
        -theta.sin()
    };
    Complex::new(re, im)
}

/// Exponent of a validated triplet, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub struct LevyExponent<T> {
    triplet: LevyTriplet<T>,
    q: SquareMatrix<T>,
    opts: QuadOptions,
}

impl<T: Real> LevyExponent<T> {
    pub fn new(triplet: &LevyTriplet<T>) -> Result<Self> {
        triplet.ensure_valid()?;
        Ok(Self {
            q: triplet.covariance_matrix(),
            triplet: triplet.clone(),
            opts: QuadOptions::default(),
        })
    }

    pub fn triplet(&self) -> &LevyTriplet<T> {
        &self.triplet
    }

    pub fn eval(&self, u: &[T]) -> Result<Complex<T>> {
        let n = self.triplet.dimension();
        if u.len() != n {
            return Err(LevyError::Dimension {
                expected: n,
                found: u.len(),
            });
        }
        let gauss = T::lit(0.5) * self.q.quadratic_form(u);
        let drift = dot(&self.triplet.drift, u);
        let jumps = match &self.triplet.measure {
            LevyMeasure::FiniteAtomic { atoms, .. } => {
                let mut acc = Complex::new(T::zero(), T::zero());
                for a in atoms {
                    let small = norm(&a.location) < T::one();
                    acc = acc + jump_kernel(dot(u, &a.location), small) * a.mass;
                }
                acc
            }
            LevyMeasure::RadialDensity(d) => density_jump_part(d, u[0], self.opts)?,
        };
        Ok(Complex::new(gauss, -drift) + jumps)
    }

    /// `e^{−t ψ(u)}`.
    pub fn char_fn(&self, u: &[T], time: T) -> Result<Complex<T>> {
        if time < T::zero() {
            return Err(LevyError::arg("time must be nonnegative"));
        }
        if time == T::zero() {
            return Ok(Complex::new(T::one(), T::zero()));
        }
        Ok((-self.eval(u)? * time).exp())
    }
}

fn density_jump_part<T: Real>(d: &RadialDensity<T>, u: T, opts: QuadOptions) -> Result<Complex<T>> {
    if u == T::zero() {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let small: Region<T> = Region::inside_open(T::one());
    let large: Region<T> = Region::outside(T::one());
    let mut re = T::zero();
    let mut im = T::zero();
    let beta = d.form.origin_exponent();
    for (region, is_small) in [(small, true), (large, false)] {
        for rg in d.ranges_in(&region) {
            let re_part = integrate_piece(d, rg, 2, beta, opts, |x| one_minus_cos(u * x))?;
            let im_part = if is_small {
                integrate_piece(d, rg, 3, beta, opts, |x| theta_minus_sin(u * x))?
            } else {
                integrate_piece(d, rg, 0, beta, opts, |x| -(u * x).sin())?
            };
            re += re_part;
            im += im_part;
        }
    }
    Ok(Complex::new(re, im))
}

fn integrate_piece<T: Real, F: FnMut(T) -> T>(
    d: &RadialDensity<T>,
    rg: SignedRange<T>,
    origin_power: i32,
    beta: T,
    opts: QuadOptions,
    f: F,
) -> Result<T> {
    let stretch = if rg.lo == T::zero() {
        stretch_for(T::from_i32(origin_power).unwrap() - beta)
    } else {
        1
    };
    Ok(d.integrate_range(rg, f, stretch, opts)?.value)
}

/// `ψ(u)` for the triplet; validates first.
pub fn psi<T: Real>(triplet: &LevyTriplet<T>, u: &[T]) -> Result<Complex<T>> {
    LevyExponent::new(triplet)?.eval(u)
}

/// `φ_t(u) = e^{−tψ(u)}`.
pub fn char_fn<T: Real>(triplet: &LevyTriplet<T>, u: &[T], time: T) -> Result<Complex<T>> {
    LevyExponent::new(triplet)?.char_fn(u, time)
}

/// Where a characteristic exponent came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    /// Sample ECF of `sample_size` draws.
    Empirical { sample_size: usize },
    /// Interpolated from a table.
    Tabulated,
}

type Evaluator<T> = dyn Fn(&[T]) -> Result<Complex<T>> + Send + Sync;

/// Abstract map `u ↦ ψ(u)`, the input to triplet recovery.
#[derive(Clone)]
pub struct CharacteristicExponentHandle<T> {
    dimension: usize,
    provenance: Provenance,
    evaluator: Arc<Evaluator<T>>,
}

impl<T> fmt::Debug for CharacteristicExponentHandle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharacteristicExponentHandle")
            .field("dimension", &self.dimension)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl<T: Real> CharacteristicExponentHandle<T> {
    pub fn from_fn<F>(dimension: usize, provenance: Provenance, f: F) -> Self
    where
        F: Fn(&[T]) -> Result<Complex<T>> + Send + Sync + 'static,
    {
        Self {
            dimension,
            provenance,
            evaluator: Arc::new(f),
        }
    }

    /// One-dimensional closure `ψ(u)`.
    pub fn scalar<F>(f: F) -> Self
    where
        F: Fn(T) -> Complex<T> + Send + Sync + 'static,
    {
        Self::from_fn(1, Provenance::Analytic, move |u: &[T]| Ok(f(u[0])))
    }

    pub fn analytic(triplet: &LevyTriplet<T>) -> Result<Self> {
        let exponent = LevyExponent::new(triplet)?;
        Ok(Self::from_fn(triplet.dimension(), Provenance::Analytic, move |u: &[T]| {
            exponent.eval(u)
        }))
    }

    /// `ψ̂(u) = −log(φ̂(u)) / t` from i.i.d. one-dimensional draws of `X_t`
    /// (principal branch of the logarithm).
    pub fn empirical(samples: Vec<T>, time: T) -> Result<Self> {
        if samples.is_empty() {
            return Err(LevyError::EmptySample);
        }
        if !(time > T::zero()) {
            return Err(LevyError::arg("empirical exponent needs a positive time"));
        }
        let n = samples.len();
        let inv_n = T::one() / T::from_usize_lossy(n);
        Ok(Self::from_fn(
            1,
            Provenance::Empirical { sample_size: n },
            move |u: &[T]| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &x in &samples {
                    let th = u[0] * x;
                    acc = acc + Complex::new(th.cos(), th.sin());
                }
                Ok(-(acc * inv_n).ln() / time)
            },
        ))
    }

    /// Piecewise-linear interpolation of `ψ` tabulated on an increasing grid.
    pub fn tabulated(grid: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(LevyError::InvalidExponent(
                "table needs at least two matching (u, ψ) rows".into(),
            ));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LevyError::InvalidExponent("u grid must be strictly increasing".into()));
        }
        Ok(Self::from_fn(1, Provenance::Tabulated, move |u: &[T]| {
            let x = u[0];
            let last = grid.len() - 1;
            if x < grid[0] || x > grid[last] {
                return Err(LevyError::InvalidExponent(format!(
                    "u = {x} outside tabulated range [{}, {}]",
                    grid[0], grid[last]
                )));
            }
            let k = grid.partition_point(|&g| g <= x).clamp(1, last);
            let (x0, x1) = (grid[k - 1], grid[k]);
            let w = (x - x0) / (x1 - x0);
            Ok(values[k - 1] * (T::one() - w) + values[k] * w)
        }))
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn eval(&self, u: &[T]) -> Result<Complex<T>> {
        (self.evaluator)(u)
    }

    pub fn eval1(&self, u: T) -> Result<Complex<T>> {
        (self.evaluator)(&[u])
    }

    /// Tolerance on `|ψ(0)|`: exact for analytic input, `4/√N` for an ECF.
    pub fn origin_tolerance(&self) -> T {
        match self.provenance {
            Provenance::Analytic | Provenance::Tabulated => T::lit(1e-12),
            Provenance::Empirical { sample_size } => {
                T::lit(4.0) / T::from_usize_lossy(sample_size).sqrt()
            }
        }
    }

    /// Checks the invariant `ψ(0) = 0`.
    pub fn check_origin(&self) -> Result<()> {
        let zero = vec![T::zero(); self.dimension];
        let v = self.eval(&zero)?;
        if v.norm() <= self.origin_tolerance() {
            Ok(())
        } else {
            Err(LevyError::InvalidExponent(format!(
                "ψ(0) = {} + {}i is not 0",
                v.re, v.im
            )))
        }
    }
}
