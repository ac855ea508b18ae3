//! JSON document form of a triplet.
//!
//! ```json
//! {
//!   "dimension": 1,
//!   "drift": [0.7],
//!   "covariance": [[0.25]],
//!   "measure": { "type": "atomic", "atoms": [ { "x": -2.0, "mass": 0.5 } ] }
//! }
//! ```
//!
//! Density measures use
//! `{"type": "density", "density": {"form": "power_law", "params": {...},
//! "support": {"inner": 0, "outer": null, "side": "both"}},
//! "singularity_exponent": 2}` where `outer: null` means ∞.
//! Atom locations are a number in dimension one and an array otherwise.
//! Unknown fields and parameter names are rejected.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::measure::levy_measure::{Atom, DensityForm, LevyMeasure, RadialDensity, Side, Support};
use crate::measure::triplet::LevyTriplet;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Real")]
pub struct TripletDocument<T> {
    pub dimension: usize,
    pub drift: Vec<T>,
    pub covariance: Vec<Vec<T>>,
    pub measure: MeasureDocument<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
#[serde(bound = "T: Real")]
pub enum MeasureDocument<T> {
    Atomic {
        atoms: Vec<AtomDocument<T>>,
    },
    Density {
        density: DensityDocument<T>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        singularity_exponent: Option<T>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Real")]
pub struct AtomDocument<T> {
    pub x: Location<T>,
    pub mass: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
#[serde(bound = "T: Real")]
pub enum Location<T> {
    Scalar(T),
    Vector(Vec<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Real")]
pub struct DensityDocument<T> {
    pub form: String,
    pub params: BTreeMap<String, T>,
    pub support: SupportDocument<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound = "T: Real")]
pub struct SupportDocument<T> {
    pub inner: T,
    /// `None` is +∞.
    pub outer: Option<T>,
    pub side: String,
}

fn form_params(form: &str) -> Option<&'static [&'static str]> {
    Some(match form {
        "power_law" => &["coefficient", "exponent"],
        "tempered_power_law" => &["coefficient", "exponent", "decay"],
        "uniform" => &["height"],
        "gaussian_bump" => &["mass", "center", "width"],
        _ => return None,
    })
}

impl<T: Real> From<&LevyTriplet<T>> for TripletDocument<T> {
    fn from(t: &LevyTriplet<T>) -> Self {
        let n = t.dimension();
        let measure = match &t.measure {
            LevyMeasure::FiniteAtomic { atoms, .. } => MeasureDocument::Atomic {
                atoms: atoms
                    .iter()
                    .map(|a| AtomDocument {
                        x: if a.location.len() == 1 {
                            Location::Scalar(a.location[0])
                        } else {
                            Location::Vector(a.location.clone())
                        },
                        mass: a.mass,
                    })
                    .collect(),
            },
            LevyMeasure::RadialDensity(d) => {
                let (form, params): (&str, Vec<(&str, T)>) = match d.form {
                    DensityForm::PowerLaw {
                        coefficient,
                        exponent,
                    } => (
                        "power_law",
                        vec![("coefficient", coefficient), ("exponent", exponent)],
                    ),
                    DensityForm::TemperedPowerLaw {
                        coefficient,
                        exponent,
                        decay,
                    } => (
                        "tempered_power_law",
                        vec![
                            ("coefficient", coefficient),
                            ("exponent", exponent),
                            ("decay", decay),
                        ],
                    ),
                    DensityForm::Uniform { height } => ("uniform", vec![("height", height)]),
                    DensityForm::GaussianBump {
                        mass,
                        center,
                        width,
                    } => (
                        "gaussian_bump",
                        vec![("mass", mass), ("center", center), ("width", width)],
                    ),
                };
                let side = match d.support.side {
                    Side::Positive => "positive",
                    Side::Negative => "negative",
                    Side::Both => "both",
                };
                MeasureDocument::Density {
                    density: DensityDocument {
                        form: form.into(),
                        params: params.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                        support: SupportDocument {
                            inner: d.support.inner,
                            outer: if d.support.outer.is_infinite() {
                                None
                            } else {
                                Some(d.support.outer)
                            },
                            side: side.into(),
                        },
                    },
                    singularity_exponent: Some(d.singularity_exponent),
                }
            }
        };
        TripletDocument {
            dimension: n,
            drift: t.drift.clone(),
            covariance: t.covariance.clone(),
            measure,
        }
    }
}

impl<T: Real> TryFrom<TripletDocument<T>> for LevyTriplet<T> {
    type Error = LevyError;

    fn try_from(doc: TripletDocument<T>) -> Result<Self> {
        let n = doc.dimension;
        if doc.drift.len() != n {
            return Err(LevyError::Parse(format!(
                "drift has {} entries, dimension is {n}",
                doc.drift.len()
            )));
        }
        let measure = match doc.measure {
            MeasureDocument::Atomic { atoms } => LevyMeasure::atomic(
                n,
                atoms
                    .into_iter()
                    .map(|a| {
                        let location = match a.x {
                            Location::Scalar(v) => vec![v],
                            Location::Vector(v) => v,
                        };
                        Atom::new(location, a.mass)
                    })
                    .collect(),
            ),
            MeasureDocument::Density {
                density,
                singularity_exponent,
            } => {
                if n != 1 {
                    return Err(LevyError::Parse(
                        "density measures are one-dimensional".into(),
                    ));
                }
                let allowed = form_params(&density.form).ok_or_else(|| {
                    LevyError::Parse(format!("unknown density form '{}'", density.form))
                })?;
                for key in density.params.keys() {
                    if !allowed.contains(&key.as_str()) {
                        return Err(LevyError::Parse(format!(
                            "unknown parameter '{key}' for form '{}'",
                            density.form
                        )));
                    }
                }
                let p = |name: &str| {
                    density.params.get(name).copied().ok_or_else(|| {
                        LevyError::Parse(format!(
                            "missing parameter '{name}' for form '{}'",
                            density.form
                        ))
                    })
                };
                let form = match density.form.as_str() {
                    "power_law" => DensityForm::PowerLaw {
                        coefficient: p("coefficient")?,
                        exponent: p("exponent")?,
                    },
                    "tempered_power_law" => DensityForm::TemperedPowerLaw {
                        coefficient: p("coefficient")?,
                        exponent: p("exponent")?,
                        decay: p("decay")?,
                    },
                    "uniform" => DensityForm::Uniform {
                        height: p("height")?,
                    },
                    _ => DensityForm::GaussianBump {
                        mass: p("mass")?,
                        center: p("center")?,
                        width: p("width")?,
                    },
                };
                let side = match density.support.side.as_str() {
                    "positive" => Side::Positive,
                    "negative" => Side::Negative,
                    "both" => Side::Both,
                    other => return Err(LevyError::Parse(format!("unknown side '{other}'"))),
                };
                let support = Support {
                    inner: density.support.inner,
                    outer: density.support.outer.unwrap_or_else(T::infinity),
                    side,
                };
                let mut d = RadialDensity::new(form, support);
                if let Some(beta) = singularity_exponent {
                    d.singularity_exponent = beta;
                }
                LevyMeasure::RadialDensity(d)
            }
        };
        Ok(LevyTriplet::new(doc.drift, doc.covariance, measure))
    }
}

/// Parses a triplet document. The result is not validated.
pub fn triplet_from_json<T: Real>(text: &str) -> Result<LevyTriplet<T>> {
    let doc: TripletDocument<T> =
        serde_json::from_str(text).map_err(|e| LevyError::Parse(e.to_string()))?;
    doc.try_into()
}

pub fn triplet_to_json<T: Real>(triplet: &LevyTriplet<T>) -> String {
    serde_json::to_string_pretty(&TripletDocument::from(triplet))
        .expect("triplet documents always serialize")
}
