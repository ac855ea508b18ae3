//! Lévy triplets, Lévy measures and the characteristic exponent.

mod document;
mod exponent;
mod levy_measure;
mod region;
mod triplet;

pub use document::{
    triplet_from_json, triplet_to_json, AtomDocument, DensityDocument, Location, MeasureDocument,
    SupportDocument, TripletDocument,
};
pub use exponent::{char_fn, psi, CharacteristicExponentHandle, LevyExponent, Provenance};
pub(crate) use exponent::theta_minus_sin;
pub use levy_measure::{Atom, DensityForm, LevyMeasure, RadialDensity, Side, Support};
pub(crate) use region::SignedRange;
pub use region::{BoundingBox, Interval, Region};
pub use triplet::{LevyTriplet, ValidationReport, Violation, MAX_DIMENSION};

/// Validates every triplet and measure invariant.
pub fn validate_triplet<T: crate::scalar::Real>(t: &LevyTriplet<T>) -> ValidationReport {
    t.validate()
}
