//! Adaptive Gauss–Kronrod (7/15) quadrature with global bisection, plus the
//! endpoint maps used for Lévy-measure integrals: an algebraic stretch at a
//! singular endpoint at the origin and a rational map for half-lines.

use crate::error::{LevyError, Result};
use crate::scalar::Real;

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Integral estimate with its absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub abs_error: T,
}

impl<T: Real> Integral<T> {
    pub fn zero() -> Self {
        Self {
            value: T::zero(),
            abs_error: T::zero(),
        }
    }

    pub fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error: self.abs_error + other.abs_error,
        }
    }

    pub fn scale(self, c: T) -> Self {
        Self {
            value: self.value * c,
            abs_error: self.abs_error * c.abs(),
        }
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-14,
            max_intervals: 4000,
        }
    }
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let center = T::lit(0.5) * (a + b);
    let half = T::lit(0.5) * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let s = f(center - dx) + f(center + dx);
        kronrod += T::lit(WGK[j]) * s;
        if j % 2 == 1 {
            gauss += T::lit(WG[j / 2]) * s;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Adaptive quadrature of `f` over the finite interval `[a, b]`.
///
/// The interval with the largest error estimate is bisected until the total
/// error drops below `max(abs_tol, rel_tol·|I|)`. Nodes never touch the
/// endpoints, so integrable endpoint singularities are admissible.
pub fn integrate<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    opts: QuadOptions,
) -> Result<Integral<T>> {
    if a == b {
        return Ok(Integral::zero());
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(LevyError::arg("integrate requires finite limits"));
    }
    let (v0, e0) = gk15(&mut f, a, b);
    let mut parts: Vec<(T, T, T, T)> = vec![(a, b, v0, e0)];
    let rel = T::lit(opts.rel_tol);
    let abs = T::lit(opts.abs_tol);
    loop {
        let total: T = parts.iter().map(|p| p.2).sum();
        let err: T = parts.iter().map(|p| p.3).sum();
        if !total.is_finite() {
            return Err(LevyError::Quadrature {
                value: total.as_f64(),
                error: err.as_f64(),
            });
        }
        if err <= abs.max(rel * total.abs()) {
            return Ok(Integral {
                value: total,
                abs_error: err,
            });
        }
        if parts.len() >= opts.max_intervals {
            return Err(LevyError::Quadrature {
                value: total.as_f64(),
                error: err.as_f64(),
            });
        }
        let (worst, _) = parts
            .iter()
            .enumerate()
            .fold((0usize, T::neg_infinity()), |(bi, be), (i, p)| {
                if p.3 > be {
                    (i, p.3)
                } else {
                    (bi, be)
                }
            });
        let (lo, hi, _, _) = parts.swap_remove(worst);
        let mid = T::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            // Interval exhausted at machine precision: accept what we have.
            let total: T = parts.iter().map(|p| p.2).sum();
            let err: T = parts.iter().map(|p| p.3).sum();
            return Ok(Integral {
                value: total,
                abs_error: err,
            });
        }
        let (vl, el) = gk15(&mut f, lo, mid);
        let (vr, er) = gk15(&mut f, mid, hi);
        parts.push((lo, mid, vl, el));
        parts.push((mid, hi, vr, er));
    }
}

/// Integral over `[0, b]` of a function that may be singular at 0,
/// using the stretch `x = b·s^k` which turns `x^γ` (γ > −1) into
/// `s^{k(γ+1)−1}`.
pub fn integrate_from_origin<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    b: T,
    stretch: u32,
    opts: QuadOptions,
) -> Result<Integral<T>> {
    let k = T::from_u32(stretch.max(1)).unwrap();
    integrate(
        |s: T| {
            if s <= T::zero() {
                return T::zero();
            }
            let x = b * s.powf(k);
            f(x) * b * k * s.powf(k - T::one())
        },
        T::zero(),
        T::one(),
        opts,
    )
}

/// Integral over `[a, ∞)` via `x = a + s/(1−s)`.
pub fn integrate_to_infinity<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    opts: QuadOptions,
) -> Result<Integral<T>> {
    integrate(
        |s: T| {
            let one_minus = T::one() - s;
            if one_minus <= T::zero() {
                return T::zero();
            }
            let x = a + s / one_minus;
            let v = f(x) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        },
        T::zero(),
        T::one(),
        opts,
    )
}

/// Integral over an interval `[lo, hi]` with `0 ≤ lo < hi ≤ ∞`, choosing the
/// origin stretch when `lo = 0` and the rational map when `hi = ∞`.
pub fn integrate_radial<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    stretch: u32,
    opts: QuadOptions,
) -> Result<Integral<T>> {
    if !(hi > lo) {
        return Ok(Integral::zero());
    }
    match (lo == T::zero(), hi.is_infinite()) {
        (false, false) => integrate(f, lo, hi, opts),
        (false, true) => integrate_to_infinity(f, lo, opts),
        (true, false) => integrate_from_origin(f, hi, stretch, opts),
        (true, true) => {
            let head = integrate_from_origin(&mut f, T::one(), stretch, opts)?;
            let tail = integrate_to_infinity(&mut f, T::one(), opts)?;
            Ok(head.add(tail))
        }
    }
}

/// Composite Simpson rule on `[a, b]` with an even number of panels.
pub fn simpson<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, panels: usize) -> T {
    let panels = panels.max(2) + panels % 2;
    let h = (b - a) / T::from_usize_lossy(panels);
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
        s += w * f(a + h * T::from_usize_lossy(i));
    }
    s * h / T::lit(3.0)
}
