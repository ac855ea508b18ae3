//! One-dimensional triplet recovery from a characteristic exponent.
//!
//! 1. `σ² = lim 2 Re ψ(s)/s²`, read off at the largest point of a geometric
//!    s-grid.
//! 2. With `ψ̃ = ψ − ½σ²u²`, the window transform
//!    `g(u) = −[ψ̃(u) − ½∫_{u−1}^{u+1} ψ̃(v) dv]` equals
//!    `∫ e^{iux} (1 − sin x/x) ν(dx)`, the Fourier transform of the finite
//!    measure `ρ(dx) = (1 − sin x/x) ν(dx)`. Drift and Gaussian terms cancel.
//! 3. `ρ` is recovered by a Fejér-damped discrete inverse transform. It is
//!    reported as cell masses on the x-grid; atoms are read off by
//!    integrating over a window of half-width `2h_x`, normalized by the
//!    fraction of the Fejér kernel the window captures.
//! 4. `a` follows by subtracting everything else from `Im ψ(u*)`.
//!
//! All arithmetic is `f64`; inputs of any scalar type are accepted.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::measure::{
    Atom, CharacteristicExponentHandle, LevyMeasure, LevyTriplet, Provenance,
};
use crate::quad::simpson;
use crate::scalar::Real;
use crate::verify::{CheckReport, Component};

/// Roundtrip tolerances.
pub const SIGMA2_TOLERANCE: f64 = 1e-3;
pub const MASS_RELATIVE_TOLERANCE: f64 = 0.05;
pub const DRIFT_TOLERANCE: f64 = 0.02;
pub const SPURIOUS_MASS_TOLERANCE: f64 = 1e-3;
/// Largest admissible share of negative mass in `ρ̂`.
pub const NEGATIVE_MASS_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Damping {
    /// Triangular weights `1 − |j|/(J+1)`: a nonnegative smoothing kernel.
    #[default]
    Fejer,
    /// Unit weights (Dirichlet kernel); ringing can make `ρ̂` negative.
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RecoveryConfig {
    /// Increasing s values for the `σ²` limit.
    pub s_grid: Vec<f64>,
    pub h_u: f64,
    pub u_max: f64,
    pub h_x: f64,
    pub x_max: f64,
    pub damping: Damping,
    /// Floor on `1 − sin x/x` when dividing `ρ̂` by it.
    pub delta_floor: f64,
    /// Simpson panels per unit length in the window average.
    pub panels_per_unit: usize,
    /// Drift is read at the first point and cross-checked at the second.
    pub drift_points: [f64; 2],
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            s_grid: (0..=10).map(|k| f64::from(1u32 << k)).collect(),
            h_u: 0.25,
            u_max: 256.0,
            h_x: 0.05,
            x_max: 12.0,
            damping: Damping::Fejer,
            delta_floor: 1e-6,
            panels_per_unit: 64,
            drift_points: [1.0, 2.0],
        }
    }
}

impl RecoveryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.s_grid.len() < 2 || self.s_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LevyError::arg("s-grid needs two or more increasing points"));
        }
        if !(self.s_grid[0] > 0.0) {
            return Err(LevyError::arg("s-grid must be positive"));
        }
        if !(self.h_u > 0.0 && self.u_max >= self.h_u && self.h_x > 0.0 && self.x_max >= self.h_x) {
            return Err(LevyError::arg("grid spacings and extents must be positive"));
        }
        if self.h_u * self.x_max > std::f64::consts::PI * (1.0 + 1e-12) {
            return Err(LevyError::arg(format!(
                "Nyquist condition h_u·X_max ≤ π violated ({} · {} = {})",
                self.h_u,
                self.x_max,
                self.h_u * self.x_max
            )));
        }
        if !(self.delta_floor > 0.0) {
            return Err(LevyError::arg("δ_floor must be positive"));
        }
        if self.panels_per_unit < 2 {
            return Err(LevyError::arg("need at least 2 Simpson panels per unit"));
        }
        Ok(())
    }

    fn u_half_count(&self) -> usize {
        (self.u_max / self.h_u).round() as usize
    }

    fn x_half_count(&self) -> usize {
        (self.x_max / self.h_x).round() as usize
    }

    /// Symmetric u-grid `j·h_u`, `|j| ≤ J`.
    pub fn u_grid(&self) -> Vec<f64> {
        let j = self.u_half_count() as i64;
        (-j..=j).map(|k| k as f64 * self.h_u).collect()
    }

    /// Symmetric x-grid `k·h_x`, `|k| ≤ K`.
    pub fn x_grid(&self) -> Vec<f64> {
        let k = self.x_half_count() as i64;
        (-k..=k).map(|i| i as f64 * self.h_x).collect()
    }

    /// Half-width of the atom readout window.
    pub fn window_half_width(&self) -> f64 {
        2.0 * self.h_x
    }
}

/// `1 − sin x / x`, accurate near 0.
pub fn one_minus_sinc(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0))
    } else {
        1.0 - x.sin() / x
    }
}

fn eval(psi: &CharacteristicExponentHandle<impl Real>, u: f64) -> Result<Complex64> {
    let v = psi.eval(&[Real::lit(u)])?;
    Ok(Complex64::new(v.re.as_f64(), v.im.as_f64()))
}

fn input_band<T: Real>(psi: &CharacteristicExponentHandle<T>) -> f64 {
    match psi.provenance() {
        Provenance::Empirical { sample_size } => 4.0 / (sample_size as f64).sqrt(),
        _ => 0.0,
    }
}

fn require_1d<T: Real>(psi: &CharacteristicExponentHandle<T>) -> Result<()> {
    if psi.dimension() != 1 {
        return Err(LevyError::Dimension {
            expected: 1,
            found: psi.dimension(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionEstimate {
    pub sigma2: f64,
    /// `|σ²(s_max) − σ²(s_max/2)|`-style difference of the two largest points.
    pub error: f64,
    /// Set when the successive differences are not decreasing.
    pub not_converging: bool,
}

/// `σ² ≈ 2 Re ψ(s_max)/s_max²`.
pub fn recover_diffusion_coefficient<T: Real>(
    psi: &CharacteristicExponentHandle<T>,
    cfg: &RecoveryConfig,
) -> Result<DiffusionEstimate> {
    require_1d(psi)?;
    cfg.validate()?;
    let ratios: Vec<f64> = cfg
        .s_grid
        .iter()
        .map(|&s| Ok(2.0 * eval(psi, s)?.re / (s * s)))
        .collect::<Result<_>>()?;
    let m = ratios.len();
    let diffs: Vec<f64> = ratios.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let last = diffs[m - 2];
    let s_max = cfg.s_grid[m - 1];
    let error = last + 2.0 * input_band(psi) / (s_max * s_max);
    let not_converging = m >= 3 && last > diffs[m - 3] && last > 1e-12 * ratios[m - 1].abs();
    Ok(DiffusionEstimate {
        sigma2: ratios[m - 1].max(0.0),
        error,
        not_converging,
    })
}

/// `g` on the symmetric u-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GTransform {
    pub h_u: f64,
    pub u: Vec<f64>,
    pub g: Vec<Complex64>,
}

/// `g(u) = −[ψ̃(u) − ½∫_{u−1}^{u+1} ψ̃(v) dv]`, `ψ̃ = ψ − ½σ²u²`, with the
/// inner integral by composite Simpson (`panels_per_unit` per unit). When
/// `h_u·panels_per_unit` is an integer, ψ is evaluated once on the fine
/// Simpson grid and shared between windows.
pub fn forward_g_transform<T: Real>(
    psi: &CharacteristicExponentHandle<T>,
    sigma2: f64,
    cfg: &RecoveryConfig,
) -> Result<GTransform> {
    require_1d(psi)?;
    cfg.validate()?;
    let u = cfg.u_grid();
    let p = cfg.panels_per_unit;
    let tilde = |v: f64| -> Result<Complex64> { Ok(eval(psi, v)? - 0.5 * sigma2 * v * v) };
    let stride = cfg.h_u * p as f64;
    let g = if (stride - stride.round()).abs() < 1e-9 {
        let stride = stride.round() as i64;
        let j = cfg.u_half_count() as i64;
        let half = p as i64;
        let k_max = j * stride + half;
        let h = 1.0 / p as f64;
        let fine: Vec<Complex64> = (-k_max..=k_max)
            .into_par_iter()
            .map(|k| tilde(k as f64 * h))
            .collect::<Result<_>>()?;
        (-j..=j)
            .map(|jj| {
                let c = (jj * stride + k_max) as usize;
                let window = &fine[c - half as usize..=c + half as usize];
                let mut s = window[0] + window[window.len() - 1];
                for (i, v) in window.iter().enumerate().take(window.len() - 1).skip(1) {
                    s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
                }
                let avg = 0.5 * s * h / 3.0;
                -(fine[c] - avg)
            })
            .collect()
    } else {
        u.par_iter()
            .map(|&uj| {
                let mut err = None;
                let re = simpson(
                    |v: f64| tilde(v).map(|z| z.re).unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    }),
                    uj - 1.0,
                    uj + 1.0,
                    2 * p,
                );
                let im = simpson(|v: f64| tilde(v).map_or(0.0, |z| z.im), uj - 1.0, uj + 1.0, 2 * p);
                if let Some(e) = err {
                    return Err(e);
                }
                Ok(-(tilde(uj)? - 0.5 * Complex64::new(re, im)))
            })
            .collect::<Result<_>>()?
    };
    Ok(GTransform { h_u: cfg.h_u, u, g })
}

fn weights(n: usize, damping: Damping) -> Vec<f64> {
    let j = (n / 2) as f64;
    (0..n)
        .map(|i| match damping {
            Damping::Fejer => 1.0 - (i as f64 - j).abs() / (j + 1.0),
            Damping::None => 1.0,
        })
        .collect()
}

/// `∫_{c−W}^{c+W} e^{−iux} dx`.
fn window_transform(u: f64, c: f64, w: f64) -> Complex64 {
    if u == 0.0 {
        Complex64::new(2.0 * w, 0.0)
    } else {
        Complex64::from_polar(2.0 * (u * w).sin() / u, -u * c)
    }
}

/// `∫_{c−W}^{c+W} x e^{−iux} dx`.
fn window_first_moment(u: f64, c: f64, w: f64) -> Complex64 {
    if u == 0.0 {
        return Complex64::new(2.0 * w * c, 0.0);
    }
    let anti = |x: f64| Complex64::from_polar(1.0, -u * x) * Complex64::new(1.0 / (u * u), x / u);
    anti(c + w) - anti(c - w)
}

/// Spectral synthesis: `(h_u/2π) Σ_j w_j g_j K(u_j)`.
struct Synthesis<'a> {
    u: &'a [f64],
    w: Vec<f64>,
    scale: f64,
}

impl<'a> Synthesis<'a> {
    fn new(gt: &'a GTransform, damping: Damping) -> Self {
        Self {
            u: &gt.u,
            w: weights(gt.u.len(), damping),
            scale: gt.h_u / (2.0 * std::f64::consts::PI),
        }
    }

    fn apply(&self, g: &[Complex64], kernel: impl Fn(f64) -> Complex64) -> f64 {
        let mut s = 0.0;
        for ((&u, &w), &gj) in self.u.iter().zip(&self.w).zip(g) {
            s += w * (gj * kernel(u)).re;
        }
        self.scale * s
    }

    /// `ρ̂([c−W, c+W])`.
    fn mass(&self, g: &[Complex64], c: f64, w: f64) -> f64 {
        self.apply(g, |u| window_transform(u, c, w))
    }

    /// `∫_{c−W}^{c+W} x ρ̂(dx)`.
    fn moment(&self, g: &[Complex64], c: f64, w: f64) -> f64 {
        self.apply(g, |u| window_first_moment(u, c, w))
    }

    /// Share of the damping kernel's unit mass inside `[−W, W]`.
    fn capture(&self, w: f64) -> f64 {
        let mut s = 0.0;
        for (&u, &wj) in self.u.iter().zip(&self.w) {
            s += wj * window_transform(u, 0.0, w).re;
        }
        self.scale * s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredAtom {
    /// Window centroid of `ρ̂`, or the given center.
    pub location: f64,
    /// Window center.
    pub center: f64,
    pub rho_mass: f64,
    pub nu_mass: f64,
    /// `1 − sin x/x` fell below δ_floor somewhere in the window.
    pub floor_active: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub x: Vec<f64>,
    /// Cell-averaged density of `ρ̂` on `[x − h_x/2, x + h_x/2]`.
    pub rho: Vec<f64>,
    /// `ρ̂ / max(1 − sin x/x, δ_floor)`.
    pub nu: Vec<f64>,
    /// `ρ̂` minus the kernel images of the atoms, as cell masses.
    pub residual_mass: Vec<f64>,
    pub atoms: Vec<RecoveredAtom>,
    pub h_x: f64,
    /// Negative mass of `ρ̂` over total `|ρ̂|` mass.
    pub negative_mass_fraction: f64,
    /// Negative share above 5%: the input is not the exponent of a Lévy process.
    pub inconsistent_input: bool,
    /// The floor was active in an atom window, or at points where the
    /// residual `ρ̂` carries more than 1e−4 of the total mass.
    pub floor_active: bool,
}

impl MeasureEstimate {
    /// `Σ |ν̂| h_x`.
    pub fn total_nu_mass(&self) -> f64 {
        self.nu.iter().map(|v| v.abs() * self.h_x).sum()
    }

    /// `Σ |ρ̂| h_x`.
    pub fn total_rho_mass(&self) -> f64 {
        self.rho.iter().map(|v| v.abs() * self.h_x).sum()
    }
}

/// Share of the total `|ρ̂|` mass that the residual must carry at floored
/// points before the floor is reported.
const FLOOR_FLAG_SHARE: f64 = 1e-4;

/// Fejér-damped inverse transform of `g` onto the x-grid, atom readout and
/// division by `1 − sin x/x`.
///
/// With `centers = Some(..)` the atom windows are centered there and the
/// atoms are placed at the centers (roundtrip against a known truth);
/// otherwise atoms are detected as isolated peaks
/// of the cell masses: a local maximum whose window holds at least ten times
/// the mass of the two flanking windows and at least 10⁻³ of the total.
pub fn invert_to_levy_measure(
    gt: &GTransform,
    cfg: &RecoveryConfig,
    centers: Option<&[f64]>,
) -> Result<MeasureEstimate> {
    cfg.validate()?;
    if (gt.h_u - cfg.h_u).abs() > 1e-15 || gt.u.len() != 2 * cfg.u_half_count() + 1 {
        return Err(LevyError::arg("g was computed on a different u-grid"));
    }
    let syn = Synthesis::new(gt, cfg.damping);
    let x = cfg.x_grid();
    let hx = cfg.h_x;
    let cell_mass: Vec<f64> = x.par_iter().map(|&xk| syn.mass(gt.g.as_slice(), xk, 0.5 * hx)).collect();
    let total_abs: f64 = cell_mass.iter().map(|m| m.abs()).sum();
    let negative = cell_mass.iter().filter(|&&m| m < 0.0).fold(0.0, |s, m| s - m);
    let negative_mass_fraction = if total_abs > 0.0 { negative / total_abs } else { 0.0 };

    let w = cfg.window_half_width();
    let capture = syn.capture(w);
    let known = centers.is_some();
    let centers: Vec<f64> = match centers {
        Some(c) => c.to_vec(),
        None => detect_peaks(&x, &cell_mass, &syn, gt, w, total_abs),
    };
    let mut atoms = Vec::with_capacity(centers.len());
    for &c in &centers {
        let raw = syn.mass(&gt.g, c, w);
        let rho_mass = raw / capture;
        let location = if !known && raw.abs() > 0.0 {
            syn.moment(&gt.g, c, w) / raw
        } else {
            c
        };
        let floor_active = x
            .iter()
            .filter(|&&xk| (xk - c).abs() <= w + 1e-12)
            .any(|&xk| one_minus_sinc(xk) < cfg.delta_floor)
            || one_minus_sinc(location) < cfg.delta_floor;
        atoms.push(RecoveredAtom {
            location,
            center: c,
            rho_mass,
            nu_mass: rho_mass / one_minus_sinc(location).max(cfg.delta_floor),
            floor_active,
        });
    }

    // remove the atoms' kernel images in the u-domain
    let mut g_rem = gt.g.clone();
    for a in &atoms {
        for (gj, &u) in g_rem.iter_mut().zip(&gt.u) {
            *gj -= a.rho_mass * Complex64::from_polar(1.0, u * a.location);
        }
    }
    let residual_mass: Vec<f64> = if atoms.is_empty() {
        cell_mass.clone()
    } else {
        x.par_iter().map(|&xk| syn.mass(&g_rem, xk, 0.5 * hx)).collect()
    };

    let rho: Vec<f64> = cell_mass.iter().map(|m| m / hx).collect();
    let nu: Vec<f64> = x
        .iter()
        .zip(&rho)
        .map(|(&xk, &r)| r / one_minus_sinc(xk).max(cfg.delta_floor))
        .collect();
    let floored_residual = x
        .iter()
        .zip(&residual_mass)
        .filter(|(&xk, _)| one_minus_sinc(xk) < cfg.delta_floor)
        .fold(0.0, |s, (_, m)| s + m.abs());
    let floor_active = atoms.iter().any(|a| a.floor_active)
        || (floored_residual > 0.0 && floored_residual > FLOOR_FLAG_SHARE * total_abs);
    Ok(MeasureEstimate {
        x,
        rho,
        nu,
        residual_mass,
        atoms,
        h_x: hx,
        negative_mass_fraction,
        inconsistent_input: negative_mass_fraction > NEGATIVE_MASS_LIMIT,
        floor_active,
    })
}

fn detect_peaks(
    x: &[f64],
    cell_mass: &[f64],
    syn: &Synthesis<'_>,
    gt: &GTransform,
    w: f64,
    total_abs: f64,
) -> Vec<f64> {
    let mut centers: Vec<f64> = Vec::new();
    if total_abs == 0.0 {
        return centers;
    }
    for k in 1..x.len().saturating_sub(1) {
        let m = cell_mass[k];
        if !(m > 0.0 && m >= cell_mass[k - 1] && m >= cell_mass[k + 1]) {
            continue;
        }
        if centers.last().is_some_and(|&c| x[k] - c <= 2.0 * w) {
            continue;
        }
        let inside = syn.mass(&gt.g, x[k], w);
        let flanks = syn.mass(&gt.g, x[k] - 2.0 * w, w).abs() + syn.mass(&gt.g, x[k] + 2.0 * w, w).abs();
        if inside >= 1e-3 * total_abs && inside >= 10.0 * flanks {
            centers.push(x[k]);
        }
    }
    centers
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftEstimate {
    /// `â` at the first drift point.
    pub drift: f64,
    /// `â` at the cross-check point.
    pub cross_check: f64,
    pub gap: f64,
    /// Combined error estimate of the two readings.
    pub error: f64,
    /// The gap exceeds the combined error estimate.
    pub flagged: bool,
}

/// `Im ∫ (1 − e^{iux} + iux·1_{|x|<1}) dν = ∫ (ux·1_{|x|<1} − sin ux) dν`.
fn im_kernel(u: f64, x: f64) -> f64 {
    let small = if x.abs() < 1.0 { u * x } else { 0.0 };
    small - (u * x).sin()
}

fn drift_at<T: Real>(
    psi: &CharacteristicExponentHandle<T>,
    diffusion: &DiffusionEstimate,
    nu: &MeasureEstimate,
    cfg: &RecoveryConfig,
    u: f64,
) -> Result<(f64, f64)> {
    let p = eval(psi, u)?;
    let mut im_j = 0.0;
    for a in &nu.atoms {
        im_j += a.nu_mass * im_kernel(u, a.location);
    }
    let mut residual = 0.0;
    let mut residual_abs = 0.0;
    for (&xk, &m) in nu.x.iter().zip(&nu.residual_mass) {
        let d = one_minus_sinc(xk);
        let h = if xk == 0.0 {
            0.0
        } else if xk.abs() < 1.0 {
            // (ux − sin ux)/(1 − sin x/x), both sides O(x³) and O(x²)
            crate::measure::theta_minus_sin(u * xk) / d.max(cfg.delta_floor)
        } else {
            -(u * xk).sin() / d
        };
        residual += h * m;
        residual_abs += (h * m).abs();
    }
    im_j += residual;
    let a = -(p.im - im_j) / u;
    let err = 0.5 * diffusion.error * u + residual_abs / u + input_band(psi) / u;
    Ok((a, err))
}

/// `â = −Im[ψ(u*) − ½σ²u*² − ∫(…)dν̂]/u*` at the first drift point, checked
/// against the second. Atoms enter with their exact kernel; the residual
/// measure enters through its cell masses.
pub fn recover_drift<T: Real>(
    psi: &CharacteristicExponentHandle<T>,
    diffusion: &DiffusionEstimate,
    nu: &MeasureEstimate,
    cfg: &RecoveryConfig,
) -> Result<DriftEstimate> {
    require_1d(psi)?;
    let [u1, u2] = cfg.drift_points;
    if !(u1 > 0.0 && u2 > 0.0) {
        return Err(LevyError::arg("drift points must be positive"));
    }
    let (a1, e1) = drift_at(psi, diffusion, nu, cfg, u1)?;
    let (a2, e2) = drift_at(psi, diffusion, nu, cfg, u2)?;
    let gap = (a1 - a2).abs();
    let error = e1 + e2;
    Ok(DriftEstimate {
        drift: a1,
        cross_check: a2,
        gap,
        error,
        flagged: gap > error + 1e-9 * (1.0 + a1.abs()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveredTriplet {
    pub diffusion: DiffusionEstimate,
    pub measure: MeasureEstimate,
    pub drift: DriftEstimate,
}

impl RecoveredTriplet {
    /// Triplet with the detected atoms as its Lévy measure. The continuous
    /// residual is not part of it; it is available in `measure`.
    pub fn to_triplet(&self) -> LevyTriplet<f64> {
        let atoms = self
            .measure
            .atoms
            .iter()
            .filter(|a| a.location != 0.0 && a.nu_mass > 0.0)
            .map(|a| Atom::scalar(a.location, a.nu_mass))
            .collect();
        LevyTriplet::scalar(
            self.drift.drift,
            self.diffusion.sigma2,
            LevyMeasure::atomic(1, atoms),
        )
    }
}

/// The full chain: `σ²`, `g`, `ρ̂`/`ν̂`, `â`.
pub fn recover_triplet<T: Real>(
    psi: &CharacteristicExponentHandle<T>,
    cfg: &RecoveryConfig,
    centers: Option<&[f64]>,
) -> Result<RecoveredTriplet> {
    psi.check_origin()?;
    let diffusion = recover_diffusion_coefficient(psi, cfg)?;
    let g = forward_g_transform(psi, diffusion.sigma2, cfg)?;
    let measure = invert_to_levy_measure(&g, cfg, centers)?;
    let drift = recover_drift(psi, &diffusion, &measure, cfg)?;
    Ok(RecoveredTriplet {
        diffusion,
        measure,
        drift,
    })
}

fn true_atoms(truth: &LevyTriplet<f64>) -> Vec<(f64, f64)> {
    match &truth.measure {
        LevyMeasure::FiniteAtomic { atoms, .. } => {
            atoms.iter().map(|a| (a.location[0], a.mass)).collect()
        }
        LevyMeasure::RadialDensity(_) => Vec::new(),
    }
}

/// Atom locations of a one-dimensional atomic truth, for use as window
/// centers.
pub fn truth_centers(truth: &LevyTriplet<f64>) -> Vec<f64> {
    true_atoms(truth).iter().map(|a| a.0).collect()
}

/// Compares a recovery (with windows centered on the true atoms) against
/// `truth`: `σ²` within 1e−3, each atom's mass within 5%, `â` within 0.02,
/// and for `ν = 0` a total spurious `|ν̂|` mass of at most 1e−3. Positivity
/// of `ρ̂` (negative share ≤ 5%) is part of the report. Density truths are
/// compared on `σ²` and `â` only.
pub fn compare_with_truth(rec: &RecoveredTriplet, truth: &LevyTriplet<f64>) -> Result<CheckReport> {
    if truth.dimension() != 1 {
        return Err(LevyError::Dimension {
            expected: 1,
            found: truth.dimension(),
        });
    }
    let atoms = true_atoms(truth);
    if rec.measure.atoms.len() != atoms.len() {
        return Err(LevyError::arg("recovery was not run with the truth's atom centers"));
    }
    let mut components = vec![Component::band(
        "σ²",
        rec.diffusion.sigma2,
        truth.covariance[0][0],
        SIGMA2_TOLERANCE,
    )];
    for ((x, m), got) in atoms.iter().zip(&rec.measure.atoms) {
        components.push(Component::band(
            format!("ν mass at x = {x} (relative)"),
            got.nu_mass / m,
            1.0,
            MASS_RELATIVE_TOLERANCE,
        ));
    }
    components.push(Component::band("drift", rec.drift.drift, truth.drift[0], DRIFT_TOLERANCE));
    if truth.measure.is_zero() {
        components.push(Component::band(
            "spurious |ν̂| mass",
            rec.measure.total_nu_mass(),
            0.0,
            SPURIOUS_MASS_TOLERANCE,
        ));
    }
    components.push(Component::band(
        "negative share of ρ̂",
        rec.measure.negative_mass_fraction,
        0.0,
        NEGATIVE_MASS_LIMIT,
    ));
    Ok(CheckReport::from_components(
        "roundtrip",
        1,
        None,
        "|σ̂² − σ²| ≤ 1e−3; atom masses within 5%; |â − a| ≤ 0.02; ν = 0 ⇒ spurious mass ≤ 1e−3; negative share ≤ 5%",
        components,
    ))
}

/// Runs the chain on the analytic exponent of a one-dimensional `truth`
/// with windows on the true atoms, then [`compare_with_truth`].
pub fn roundtrip_report(truth: &LevyTriplet<f64>, cfg: &RecoveryConfig) -> Result<CheckReport> {
    if truth.dimension() != 1 {
        return Err(LevyError::Dimension {
            expected: 1,
            found: truth.dimension(),
        });
    }
    let psi = CharacteristicExponentHandle::analytic(truth)?;
    let rec = recover_triplet(&psi, cfg, Some(&truth_centers(truth)))?;
    compare_with_truth(&rec, truth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn handle(f: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> CharacteristicExponentHandle<f64> {
        CharacteristicExponentHandle::scalar(f)
    }

    fn poisson_psi(x0: f64, m: f64) -> impl Fn(f64) -> Complex64 + Send + Sync {
        move |u: f64| m * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, u * x0))
    }

    #[test]
    fn nyquist_enforced() {
        let cfg = RecoveryConfig {
            x_max: 13.0,
            ..RecoveryConfig::default()
        };
        assert!(cfg.validate().is_err());
        assert!(RecoveryConfig::default().validate().is_ok());
    }

    #[test]
    fn sigma2_examples() {
        let cfg = RecoveryConfig::default();
        let g = handle(|u| Complex64::new(0.5 * u * u, 0.0));
        let d = recover_diffusion_coefficient(&g, &cfg).unwrap();
        assert_eq!(d.sigma2, 1.0);
        assert_eq!(d.error, 0.0);
        let zero = handle(|_| Complex64::new(0.0, 0.0));
        assert_eq!(recover_diffusion_coefficient(&zero, &cfg).unwrap().sigma2, 0.0);
        let cfg100 = RecoveryConfig {
            s_grid: vec![25.0, 50.0, 100.0],
            ..RecoveryConfig::default()
        };
        let p = poisson_psi(1.0, 1.0);
        let gp = handle(move |u| Complex64::new(0.5 * u * u, 0.0) + p(u));
        let d = recover_diffusion_coefficient(&gp, &cfg100).unwrap();
        assert!((d.sigma2 - 1.0).abs() <= 4.0 / 1e4);
    }

    #[test]
    fn g_of_single_atom() {
        let cfg = RecoveryConfig::default();
        let g = forward_g_transform(&handle(poisson_psi(2.0, 1.0)), 0.0, &cfg).unwrap();
        let c = 1.0 - (2.0f64).sin() / 2.0;
        for (u, gj) in g.u.iter().zip(&g.g) {
            let expect = c * Complex64::from_polar(1.0, 2.0 * u);
            assert!((gj - expect).norm() < 1e-8, "u = {u}");
        }
        let mid = g.u.len() / 2;
        assert!((g.g[mid].re - 0.5454).abs() < 1e-4);
    }

    #[test]
    fn gaussian_and_drift_annihilate() {
        let cfg = RecoveryConfig::default();
        for s2 in [0.3, 1.0, 7.0] {
            let g = forward_g_transform(&handle(move |u| Complex64::new(0.5 * s2 * u * u, 0.0)), s2, &cfg)
                .unwrap();
            assert!(g.g.iter().all(|z| z.norm() == 0.0));
        }
        let g = forward_g_transform(&handle(|u| Complex64::new(0.0, -3.0 * u)), 0.0, &cfg).unwrap();
        assert!(g.g.iter().all(|z| z.norm() < 1e-10));
    }

    #[test]
    fn zero_g_gives_zero_measure() {
        let cfg = RecoveryConfig::default();
        let g = forward_g_transform(&handle(|_| Complex64::new(0.0, 0.0)), 0.0, &cfg).unwrap();
        let m = invert_to_levy_measure(&g, &cfg, None).unwrap();
        assert!(m.nu.iter().all(|&v| v == 0.0));
        assert!(m.atoms.is_empty());
        assert!(!m.floor_active);
    }

    #[test]
    fn drift_examples() {
        let cfg = RecoveryConfig::default();
        let r = recover_triplet(&handle(|u| Complex64::new(0.0, -3.0 * u)), &cfg, None).unwrap();
        assert!((r.drift.drift - 3.0).abs() < 1e-12);
        let z = recover_triplet(&handle(|_| Complex64::new(0.0, 0.0)), &cfg, None).unwrap();
        assert_eq!(z.drift.drift, 0.0);
    }

    #[test]
    fn detected_atoms_off_grid() {
        let cfg = RecoveryConfig::default();
        let p = poisson_psi(PI / 2.0, 1.5);
        let r = recover_triplet(&handle(p), &cfg, None).unwrap();
        assert_eq!(r.measure.atoms.len(), 1);
        let a = &r.measure.atoms[0];
        assert!((a.location - PI / 2.0).abs() < 1e-3, "{a:?}");
        assert!((a.nu_mass / 1.5 - 1.0).abs() < 0.01, "{a:?}");
    }

    #[test]
    fn near_origin_atom_flags_floor() {
        let t = LevyTriplet::scalar(0.0, 0.0, LevyMeasure::atoms_1d(&[(0.05, 1.0)]));
        let psi = CharacteristicExponentHandle::analytic(&t).unwrap();
        let r = recover_triplet(&psi, &RecoveryConfig::default(), Some(&[0.05])).unwrap();
        assert!(r.measure.atoms[0].floor_active);
        assert!(r.measure.floor_active);
    }

    #[test]
    fn pure_poisson_at_unit_boundary() {
        let t = LevyTriplet::scalar(0.0, 0.0, LevyMeasure::atoms_1d(&[(1.0, 2.0)]));
        let r = roundtrip_report(&t, &RecoveryConfig::default()).unwrap();
        assert!(r.pass, "{r}");
    }

    #[test]
    fn drift_with_gaussian_and_atom() {
        let t = LevyTriplet::scalar(1.0, 1.0, LevyMeasure::atoms_1d(&[(2.0, 1.0)]));
        let r = roundtrip_report(&t, &RecoveryConfig::default()).unwrap();
        assert!(r.pass, "{r}");
        let drift = r.components.iter().find(|c| c.name == "drift").unwrap();
        assert!((drift.statistic - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_origin() {
        let cfg = RecoveryConfig::default();
        let bad = handle(|_| Complex64::new(1.0, 0.0));
        assert!(matches!(
            recover_triplet(&bad, &cfg, None),
            Err(LevyError::InvalidExponent(_))
        ));
    }
}
