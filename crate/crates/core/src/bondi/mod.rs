//! Bondi radiating metrics: asymptotic expansion, mass loss and null slices.

mod expansion;
pub mod radiation;
pub mod scenario;
pub mod slice;
mod time;

pub use expansion::{AngularField, BondiExpansion, BondiFunctions, Derived, Jet2, Mode};
pub use time::{TableSamples, TimeProfile, TimeTable};
