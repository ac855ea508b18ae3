//! Borel regions used for ν-integrals and jump filtering.
//!
//! Text form (also the serialized form):
//!
//! * `all`: ℝⁿ∖{0}
//! * `[1,inf) U (-inf,-1]`: finite union of intervals (one-dimensional)
//! * `|x| in [0.5,1)`: radial annulus, optionally `& [a,b]x[c,d]` box

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{LevyError, Result};
use crate::scalar::{norm, Real};

/// Interval on the real line with per-endpoint closure flags.
/// Infinite endpoints are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval<T> {
    pub lo: T,
    pub hi: T,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl<T: Real> Interval<T> {
    pub fn new(lo: T, hi: T, lo_closed: bool, hi_closed: bool) -> Self {
        Self {
            lo,
            hi,
            lo_closed: lo_closed && lo.is_finite(),
            hi_closed: hi_closed && hi.is_finite(),
        }
    }

    pub fn closed(lo: T, hi: T) -> Self {
        Self::new(lo, hi, true, true)
    }

    /// `[lo, ∞)`
    pub fn at_least(lo: T) -> Self {
        Self::new(lo, T::infinity(), true, false)
    }

    /// `(-∞, hi]`
    pub fn at_most(hi: T) -> Self {
        Self::new(T::neg_infinity(), hi, false, true)
    }

    /// `(lo, hi]`
    pub fn left_open(lo: T, hi: T) -> Self {
        Self::new(lo, hi, false, true)
    }

    pub fn contains(&self, x: T) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }

    fn intersects(&self, other: &Self) -> bool {
        let lo_ok = if self.hi == other.lo {
            self.hi_closed && other.lo_closed
        } else {
            self.hi > other.lo
        };
        let hi_ok = if other.hi == self.lo {
            other.hi_closed && self.lo_closed
        } else {
            other.hi > self.lo
        };
        !self.is_empty() && !other.is_empty() && lo_ok && hi_ok
    }
}

/// Axis-aligned closed box, one `[lo, hi]` pair per coordinate.
pub type BoundingBox<T> = Vec<(T, T)>;

#[derive(Debug, Clone, PartialEq)]
pub enum Region<T> {
    /// ℝⁿ∖{0}.
    All,
    /// Finite union of intervals; one-dimensional only.
    Intervals(Vec<Interval<T>>),
    /// `{inner ≤ |x| ≤ outer}` (closure per flags), optionally intersected
    /// with a closed box.
    Annulus {
        inner: T,
        outer: T,
        inner_closed: bool,
        outer_closed: bool,
        bbox: Option<BoundingBox<T>>,
    },
}

/// A radial range `r ∈ [lo, hi]` on one side of the origin of the real line;
/// endpoint closure is irrelevant for absolutely continuous integrands.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct SignedRange<T> {
    pub sign: T,
    pub lo: T,
    pub hi: T,
}

impl<T: Real> Region<T> {
    pub fn interval(iv: Interval<T>) -> Self {
        Region::Intervals(vec![iv])
    }

    /// `{|x| ≥ r}`, closed at `r`, matching the large-jump convention.
    pub fn outside(r: T) -> Self {
        Region::Annulus {
            inner: r,
            outer: T::infinity(),
            inner_closed: true,
            outer_closed: false,
            bbox: None,
        }
    }

    /// `{lo < |x| ≤ hi}`, the half-open shell shape.
    pub fn shell(lo: T, hi: T) -> Self {
        Region::Annulus {
            inner: lo,
            outer: hi,
            inner_closed: false,
            outer_closed: true,
            bbox: None,
        }
    }

    /// `{0 < |x| < r}`, the compensated small-jump region.
    pub fn inside_open(r: T) -> Self {
        Region::Annulus {
            inner: T::zero(),
            outer: r,
            inner_closed: false,
            outer_closed: false,
            bbox: None,
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        if x.iter().all(|&v| v == T::zero()) {
            return false;
        }
        match self {
            Region::All => true,
            Region::Intervals(ivs) => x.len() == 1 && ivs.iter().any(|iv| iv.contains(x[0])),
            Region::Annulus {
                inner,
                outer,
                inner_closed,
                outer_closed,
                bbox,
            } => {
                let r = norm(x);
                let radial = Interval::new(*inner, *outer, *inner_closed, *outer_closed);
                radial.contains(r)
                    && bbox.as_ref().is_none_or(|b| {
                        b.len() == x.len()
                            && b.iter().zip(x).all(|(&(lo, hi), &v)| v >= lo && v <= hi)
                    })
            }
        }
    }

    /// Whether `0` lies in the closure of the region.
    pub fn touches_origin(&self) -> bool {
        match self {
            Region::All => true,
            Region::Intervals(ivs) => ivs
                .iter()
                .any(|iv| !iv.is_empty() && iv.lo <= T::zero() && iv.hi >= T::zero()),
            Region::Annulus { inner, bbox, .. } => {
                *inner == T::zero()
                    && bbox
                        .as_ref()
                        .is_none_or(|b| b.iter().all(|&(lo, hi)| lo <= T::zero() && hi >= T::zero()))
            }
        }
    }

    /// Representation on the real line as a union of intervals (n = 1).
    pub fn to_intervals_1d(&self) -> Vec<Interval<T>> {
        match self {
            Region::All => vec![
                Interval::new(T::neg_infinity(), T::zero(), false, false),
                Interval::new(T::zero(), T::infinity(), false, false),
            ],
            Region::Intervals(ivs) => ivs.clone(),
            Region::Annulus {
                inner,
                outer,
                inner_closed,
                outer_closed,
                bbox,
            } => {
                let (blo, bhi) = bbox
                    .as_ref()
                    .and_then(|b| b.first().copied())
                    .unwrap_or((T::neg_infinity(), T::infinity()));
                let pos = Interval::new(*inner, *outer, *inner_closed, *outer_closed);
                let neg = Interval::new(-*outer, -*inner, *outer_closed, *inner_closed);
                [neg, pos]
                    .into_iter()
                    .map(|iv| clip(iv, blo, bhi))
                    .filter(|iv| !iv.is_empty())
                    .collect()
            }
        }
    }

    /// Radial ranges per side of the origin (n = 1).
    pub(crate) fn signed_ranges(&self) -> Vec<SignedRange<T>> {
        let mut out = Vec::new();
        for iv in self.to_intervals_1d() {
            if iv.is_empty() {
                continue;
            }
            if iv.hi > T::zero() {
                out.push(SignedRange {
                    sign: T::one(),
                    lo: iv.lo.max(T::zero()),
                    hi: iv.hi,
                });
            }
            if iv.lo < T::zero() {
                out.push(SignedRange {
                    sign: -T::one(),
                    lo: (-iv.hi).max(T::zero()),
                    hi: -iv.lo,
                });
            }
        }
        out
    }

    /// Conservative overlap test: exact for one-dimensional regions; for
    /// annuli in higher dimension, overlapping radial ranges and boxes count
    /// as overlap.
    pub fn overlaps(&self, other: &Self, dimension: usize) -> bool {
        if dimension == 1 {
            let a = self.to_intervals_1d();
            let b = other.to_intervals_1d();
            return a.iter().any(|x| b.iter().any(|y| x.intersects(y)));
        }
        match (self, other) {
            (
                Region::Annulus {
                    inner: i1,
                    outer: o1,
                    inner_closed: ic1,
                    outer_closed: oc1,
                    bbox: b1,
                },
                Region::Annulus {
                    inner: i2,
                    outer: o2,
                    inner_closed: ic2,
                    outer_closed: oc2,
                    bbox: b2,
                },
            ) => {
                let r1 = Interval::new(*i1, *o1, *ic1, *oc1);
                let r2 = Interval::new(*i2, *o2, *ic2, *oc2);
                let boxes = match (b1, b2) {
                    (Some(x), Some(y)) => x
                        .iter()
                        .zip(y)
                        .all(|(&(l1, h1), &(l2, h2))| l1 <= h2 && l2 <= h1),
                    _ => true,
                };
                r1.intersects(&r2) && boxes
            }
            _ => true,
        }
    }
}

fn clip<T: Real>(iv: Interval<T>, lo: T, hi: T) -> Interval<T> {
    let (nlo, lc) = if lo > iv.lo { (lo, true) } else { (iv.lo, iv.lo_closed) };
    let (nhi, hc) = if hi < iv.hi { (hi, true) } else { (iv.hi, iv.hi_closed) };
    Interval::new(nlo, nhi, lc, hc)
}

fn fmt_num<T: Real>(v: T) -> String {
    if v == T::infinity() {
        "inf".into()
    } else if v == T::neg_infinity() {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

impl<T: Real> fmt::Display for Interval<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_num(self.lo),
            fmt_num(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl<T: Real> fmt::Display for Region<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::All => write!(f, "all"),
            Region::Intervals(ivs) => {
                let parts: Vec<String> = ivs.iter().map(|iv| iv.to_string()).collect();
                write!(f, "{}", parts.join(" U "))
            }
            Region::Annulus {
                inner,
                outer,
                inner_closed,
                outer_closed,
                bbox,
            } => {
                write!(
                    f,
                    "|x| in {}",
                    Interval::new(*inner, *outer, *inner_closed, *outer_closed)
                )?;
                if let Some(b) = bbox {
                    let parts: Vec<String> = b
                        .iter()
                        .map(|&(lo, hi)| format!("[{},{}]", fmt_num(lo), fmt_num(hi)))
                        .collect();
                    write!(f, " & {}", parts.join("x"))?;
                }
                Ok(())
            }
        }
    }
}

fn parse_num<T: Real>(s: &str) -> Result<T> {
    let s = s.trim();
    match s {
        "inf" | "+inf" => Ok(T::infinity()),
        "-inf" => Ok(T::neg_infinity()),
        _ => s
            .parse::<f64>()
            .map(T::lit)
            .map_err(|_| LevyError::Parse(format!("bad number `{s}`"))),
    }
}

fn parse_interval<T: Real>(s: &str) -> Result<Interval<T>> {
    let s = s.trim();
    let lo_closed = match s.chars().next() {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(LevyError::Parse(format!("interval `{s}` must open with [ or ("))),
    };
    let hi_closed = match s.chars().last() {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(LevyError::Parse(format!("interval `{s}` must close with ] or )"))),
    };
    let body = &s[1..s.len() - 1];
    let (a, b) = body
        .split_once(',')
        .ok_or_else(|| LevyError::Parse(format!("interval `{s}` needs two endpoints")))?;
    let lo = parse_num(a)?;
    let hi = parse_num(b)?;
    if lo > hi {
        return Err(LevyError::Parse(format!("interval `{s}` has lo > hi")));
    }
    Ok(Interval::new(lo, hi, lo_closed, hi_closed))
}

impl<T: Real> FromStr for Region<T> {
    type Err = LevyError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "all" {
            return Ok(Region::All);
        }
        if let Some(rest) = s.strip_prefix("|x| in") {
            let (radial, bbox) = match rest.split_once('&') {
                Some((r, b)) => (r, Some(b)),
                None => (rest, None),
            };
            let iv = parse_interval::<T>(radial)?;
            if iv.lo < T::zero() {
                return Err(LevyError::Parse("annulus radius must be nonnegative".into()));
            }
            let bbox = bbox
                .map(|b| {
                    b.split('x')
                        .map(|part| {
                            let iv = parse_interval::<T>(part)?;
                            Ok((iv.lo, iv.hi))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            return Ok(Region::Annulus {
                inner: iv.lo,
                outer: iv.hi,
                inner_closed: iv.lo_closed,
                outer_closed: iv.hi_closed,
                bbox,
            });
        }
        let ivs = s
            .split(" U ")
            .map(parse_interval)
            .collect::<Result<Vec<_>>>()?;
        Ok(Region::Intervals(ivs))
    }
}

impl<T: Real> Serialize for Region<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de, T: Real> Deserialize<'de> for Region<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
