//! Analytic conditions, the Routh–Hurwitz test, and stability diagrams.

pub mod conditions;
pub mod diagram;
pub mod hurwitz;

pub use conditions::{check_linear_stability, check_uniqueness, compute_alpha, ConditionReport, UniquenessReport};
pub use diagram::{scan_diagram, DiagramCell, DiagramGrid, DiagramRequest, Geometry, NumericStatus};
pub use hurwitz::{routh_hurwitz, HurwitzReport};
