//! Lévy measures: finitely many atoms in ℝⁿ, or a one-dimensional density
//! with a declared singularity exponent at the origin.

use crate::error::{LevyError, Result};
use crate::measure::region::{Region, SignedRange};
use crate::quad::{integrate_radial, Integral, QuadOptions};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T> {
    pub location: Vec<T>,
    pub mass: T,
}

impl<T: Real> Atom<T> {
    pub fn new(location: Vec<T>, mass: T) -> Self {
        Self { location, mass }
    }

    pub fn scalar(x: T, mass: T) -> Self {
        Self::new(vec![x], mass)
    }
}

/// Which side(s) of the origin a radial density lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Positive,
    Negative,
    Both,
}

impl Side {
    pub(crate) fn signs(self) -> &'static [i8] {
        match self {
            Side::Positive => &[1],
            Side::Negative => &[-1],
            Side::Both => &[1, -1],
        }
    }
}

/// Radial support `inner ≤ |x| ≤ outer` on the chosen side(s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support<T> {
    pub inner: T,
    pub outer: T,
    pub side: Side,
}

/// Closed family of density shapes `d(r)`, `r = |x| > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityForm<T> {
    /// `c · r^{-p}`
    PowerLaw { coefficient: T, exponent: T },
    /// `c · r^{-p} · e^{-λ r}`
    TemperedPowerLaw { coefficient: T, exponent: T, decay: T },
    /// constant `h`
    Uniform { height: T },
    /// `m · N(r; center, width²)`, a smoothed atom of mass ≈ m
    GaussianBump { mass: T, center: T, width: T },
}

impl<T: Real> DensityForm<T> {
    pub fn eval(&self, r: T) -> T {
        match *self {
            DensityForm::PowerLaw {
                coefficient,
                exponent,
            } => coefficient * r.powf(-exponent),
            DensityForm::TemperedPowerLaw {
                coefficient,
                exponent,
                decay,
            } => coefficient * r.powf(-exponent) * (-decay * r).exp(),
            DensityForm::Uniform { height } => height,
            DensityForm::GaussianBump {
                mass,
                center,
                width,
            } => {
                let z = (r - center) / width;
                mass * (-T::lit(0.5) * z * z).exp() / (width * (T::lit(2.0) * T::PI()).sqrt())
            }
        }
    }

    /// Radii where adaptive quadrature must split so narrow features are seen.
    fn breakpoints(&self) -> Vec<T> {
        match *self {
            DensityForm::GaussianBump { center, width, .. } => {
                [-8.0, -2.0, 2.0, 8.0].iter().map(|&k| center + width * T::lit(k)).collect()
            }
            _ => Vec::new(),
        }
    }

    /// Power of the blow-up of `d(r)` as `r → 0`.
    pub fn origin_exponent(&self) -> T {
        match *self {
            DensityForm::PowerLaw { exponent, .. }
            | DensityForm::TemperedPowerLaw { exponent, .. } => exponent.max(T::zero()),
            _ => T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity<T> {
    pub form: DensityForm<T>,
    pub support: Support<T>,
    /// Declared β: `d(x)·|x|^β` bounded near 0, `0 ≤ β < 3`.
    pub singularity_exponent: T,
}

impl<T: Real> RadialDensity<T> {
    /// Density with β taken from the form when the support reaches 0.
    pub fn new(form: DensityForm<T>, support: Support<T>) -> Self {
        let beta = if support.inner == T::zero() {
            form.origin_exponent()
        } else {
            T::zero()
        };
        Self {
            form,
            support,
            singularity_exponent: beta,
        }
    }

    /// Density value at a point `x` of the real line.
    pub fn density_at(&self, x: T) -> T {
        let r = x.abs();
        let side_ok = match self.support.side {
            Side::Positive => x > T::zero(),
            Side::Negative => x < T::zero(),
            Side::Both => x != T::zero(),
        };
        if side_ok && r >= self.support.inner && r <= self.support.outer {
            self.form.eval(r)
        } else {
            T::zero()
        }
    }

    /// Signed radial ranges of `region ∩ support`.
    pub(crate) fn ranges_in(&self, region: &Region<T>) -> Vec<SignedRange<T>> {
        let mut out = Vec::new();
        for rg in region.signed_ranges() {
            let on_side = self
                .support
                .side
                .signs()
                .iter()
                .any(|&s| (s > 0) == (rg.sign > T::zero()));
            if !on_side {
                continue;
            }
            let lo = rg.lo.max(self.support.inner);
            let hi = rg.hi.min(self.support.outer);
            if hi > lo {
                out.push(SignedRange { sign: rg.sign, lo, hi });
            }
        }
        out
    }

    /// `∫ f(s·r) d(r) dr` over one signed range.
    pub(crate) fn integrate_range<F: FnMut(T) -> T>(
        &self,
        range: SignedRange<T>,
        mut f: F,
        stretch: u32,
        opts: QuadOptions,
    ) -> Result<Integral<T>> {
        let form = self.form;
        let sign = range.sign;
        let mut cuts = vec![range.lo];
        cuts.extend(
            form.breakpoints()
                .into_iter()
                .filter(|&c| c > range.lo && c < range.hi),
        );
        cuts.push(range.hi);
        let mut total = Integral::zero();
        for w in cuts.windows(2) {
            let part = integrate_radial(
                |r: T| {
                    let v = f(sign * r) * form.eval(r);
                    if v.is_finite() {
                        v
                    } else {
                        T::zero()
                    }
                },
                w[0],
                w[1],
                stretch,
                opts,
            )?;
            total = total.add(part);
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LevyMeasure<T> {
    FiniteAtomic { dimension: usize, atoms: Vec<Atom<T>> },
    /// One-dimensional only.
    RadialDensity(RadialDensity<T>),
}

impl<T: Real> LevyMeasure<T> {
    pub fn empty(dimension: usize) -> Self {
        LevyMeasure::FiniteAtomic {
            dimension,
            atoms: Vec::new(),
        }
    }

    pub fn atomic(dimension: usize, atoms: Vec<Atom<T>>) -> Self {
        LevyMeasure::FiniteAtomic { dimension, atoms }
    }

    /// One-dimensional atoms from `(location, mass)` pairs.
    pub fn atoms_1d(pairs: &[(T, T)]) -> Self {
        Self::atomic(1, pairs.iter().map(|&(x, m)| Atom::scalar(x, m)).collect())
    }

    pub fn density(form: DensityForm<T>, support: Support<T>) -> Self {
        LevyMeasure::RadialDensity(RadialDensity::new(form, support))
    }

    pub fn dimension(&self) -> usize {
        match self {
            LevyMeasure::FiniteAtomic { dimension, .. } => *dimension,
            LevyMeasure::RadialDensity(_) => 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LevyMeasure::FiniteAtomic { atoms, .. } if atoms.is_empty())
    }

    /// Atoms merged into a single atomic measure (sum of measures).
    pub fn combined_with(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (
                LevyMeasure::FiniteAtomic {
                    dimension: d1,
                    atoms: a1,
                },
                LevyMeasure::FiniteAtomic {
                    dimension: d2,
                    atoms: a2,
                },
            ) if d1 == d2 => Ok(LevyMeasure::FiniteAtomic {
                dimension: *d1,
                atoms: a1.iter().chain(a2).cloned().collect(),
            }),
            _ => Err(LevyError::arg(
                "only atomic measures of equal dimension can be combined",
            )),
        }
    }

    /// `∫_B f dν`.
    ///
    /// Atomic measures give the exact finite sum. Densities are integrated
    /// adaptively to relative tolerance 1e−8; when `B` reaches the origin the
    /// local power of `f·d` there must exceed −1, else the integral diverges
    /// and `NonIntegrable` is returned.
    pub fn nu_integral<F: Fn(&[T]) -> T>(&self, f: F, region: &Region<T>) -> Result<Integral<T>> {
        self.nu_integral_with(f, region, QuadOptions::default())
    }

    pub fn nu_integral_with<F: Fn(&[T]) -> T>(
        &self,
        f: F,
        region: &Region<T>,
        opts: QuadOptions,
    ) -> Result<Integral<T>> {
        match self {
            LevyMeasure::FiniteAtomic { atoms, .. } => {
                let mut s = T::zero();
                for a in atoms.iter().filter(|a| region.contains(&a.location)) {
                    s += a.mass * f(&a.location);
                }
                Ok(Integral {
                    value: s,
                    abs_error: T::zero(),
                })
            }
            LevyMeasure::RadialDensity(d) => {
                let mut total = Integral::zero();
                for rg in d.ranges_in(region) {
                    let stretch = if rg.lo == T::zero() {
                        let gamma = local_power(&f, rg) - d.form.origin_exponent();
                        if !(gamma > -T::one() + T::lit(1e-6)) {
                            return Err(LevyError::NonIntegrable(format!(
                                "integrand behaves like |x|^{:.3} at the origin on {}",
                                gamma.as_f64(),
                                region
                            )));
                        }
                        stretch_for(gamma)
                    } else {
                        1
                    };
                    let part = d.integrate_range(rg, |x| f(&[x]), stretch, opts)?;
                    total = total.add(part);
                }
                Ok(total)
            }
        }
    }

    /// `ν(B)`; infinite when the region reaches the origin of an
    /// infinite-activity density.
    pub fn mass(&self, region: &Region<T>) -> Result<T> {
        match self.nu_integral(|_| T::one(), region) {
            Ok(i) => Ok(i.value),
            Err(LevyError::NonIntegrable(_)) => Ok(T::infinity()),
            Err(e) => Err(e),
        }
    }
}

/// Local power law `|f(x)| ~ |x|^q` at the origin, estimated at two small radii.
fn local_power<T: Real, F: Fn(&[T]) -> T>(f: &F, rg: SignedRange<T>) -> T {
    let scale = rg.hi.min(T::one());
    let r1 = scale * T::lit(1e-4);
    let r2 = scale * T::lit(1e-6);
    let f1 = f(&[rg.sign * r1]).abs();
    let f2 = f(&[rg.sign * r2]).abs();
    if f1 == T::zero() && f2 == T::zero() {
        return T::infinity();
    }
    if f2 == T::zero() {
        return T::infinity();
    }
    (f1 / f2).ln() / (r1 / r2).ln()
}

/// Stretch exponent `k` with `k(γ+1) − 1 ≥ 1` so the mapped integrand is
/// bounded at the origin.
pub(crate) fn stretch_for<T: Real>(gamma: T) -> u32 {
    if !gamma.is_finite() || gamma >= T::one() {
        return 1;
    }
    let k = (T::lit(2.0) / (gamma + T::one())).ceil();
    k.to_u32().unwrap_or(16).clamp(1, 16)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inverse_square_one_sided() -> LevyMeasure<f64> {
        LevyMeasure::density(
            DensityForm::PowerLaw {
                coefficient: 1.0,
                exponent: 2.0,
            },
            Support {
                inner: 0.0,
                outer: 1.0,
                side: Side::Positive,
            },
        )
    }

    #[test]
    fn single_atom_sum() {
        let m = LevyMeasure::atoms_1d(&[(2.0, 3.0)]);
        let v = m.nu_integral(|x| x[0], &"[1,inf)".parse().unwrap()).unwrap();
        assert_eq!(v.value, 6.0);
    }

    #[test]
    fn atom_below_region_excluded() {
        let m = LevyMeasure::atoms_1d(&[(2.0, 3.0), (-0.5, 1.0)]);
        let v = m
            .nu_integral(|x| x[0] * x[0], &"|x| in [1,inf)".parse().unwrap())
            .unwrap();
        assert_eq!(v.value, 12.0);
    }

    #[test]
    fn second_moment_near_origin() {
        // ∫_0^ε x²·x^{-2} dx = ε
        let m = inverse_square_one_sided();
        let v = m
            .nu_integral(|x| x[0] * x[0], &"(0,0.25]".parse().unwrap())
            .unwrap();
        assert!((v.value - 0.25).abs() <= 1e-8 * 0.25, "{}", v.value);
        assert!(v.abs_error <= 1e-8 * 0.25);
    }

    #[test]
    fn divergent_near_origin_is_rejected() {
        let m = inverse_square_one_sided();
        let err = m.nu_integral(|x| x[0], &"(0,0.25]".parse().unwrap());
        assert!(matches!(err, Err(LevyError::NonIntegrable(_))));
        assert!(m.mass(&"(0,1]".parse().unwrap()).unwrap().is_infinite());
    }

    #[test]
    fn log_moment_of_inverse_square() {
        // ∫_{0.5}^1 x·x^{-2} dx = ln 2
        let m = inverse_square_one_sided();
        let v = m.nu_integral(|x| x[0], &"(0.5,1]".parse().unwrap()).unwrap();
        assert!((v.value - std::f64::consts::LN_2).abs() < 1e-10);
    }

    #[test]
    fn bump_approximates_atom() {
        let atom = LevyMeasure::atoms_1d(&[(1.5, 2.0)]);
        let bump = LevyMeasure::density(
            DensityForm::GaussianBump {
                mass: 2.0,
                center: 1.5,
                width: 1e-4,
            },
            Support {
                inner: 1.0,
                outer: 2.0,
                side: Side::Positive,
            },
        );
        let region: Region<f64> = "[1,2]".parse().unwrap();
        for f in [|x: &[f64]| x[0], |x: &[f64]| x[0].cos(), |x: &[f64]| x[0] * x[0]] {
            let a = atom.nu_integral(f, &region).unwrap().value;
            let b = bump.nu_integral(f, &region).unwrap().value;
            assert!((a - b).abs() < 1e-4, "{a} vs {b}");
        }
    }
}
