//! Covering of the action domain into non-resonant, simply-resonant and
//! residual zones, with Monte Carlo measures and the explicit residual bound.

mod bound;
mod classify;
mod measure;
mod scan;

pub use bound::{analytic_r2_bound, PairTerm, R2Bound};
pub use classify::{classify, Classifier, ZoneLabel, GENERATOR_WARN_LIMIT, THRESHOLD_TOL};
pub use measure::{estimate_measures, MeasureReport};
pub use scan::{scan2d, Scan2d, ScanCell, ZoneCode};
