//! Eventually periodic ramification, the towers built from it and their
//! stability polynomials.

mod bracket;
mod fit;
mod general;
mod profile;

pub use bracket::{psi_quotient, BracketTower};
pub use fit::{disc_from_different, fit_stability, reindex_constants, LeadingCheck, StabilityFit};
pub use general::{GeneralDifferent, GeneralTower};
pub use profile::SenProfile;
