//! The critical-value curve `theta -> c(theta)`.

pub mod scan;
pub mod shape;
pub mod verify;

pub use scan::{fill_slopes, scan, CCurveSample, Method, ScanSettings};
pub use shape::{classify_admissible_set, Shape, ShapeReport, SATURATION_TOL};
pub use verify::{verify_h4, H4Report, H4Tolerances, ItemCheck, Verdict};
