//! Closed measures, ordinal classification and the comparison oracle.

pub mod closed;
pub mod compare;
pub mod lp;
pub mod measure;
pub mod occupation;
pub mod ordinal;

pub use closed::{
    closed_measure_lp, closed_measure_lp_excluding, enumerate_mather_measures, face_integral_range,
    ClosedMeasureSolution, FaceRange,
};
pub use compare::{compare_with_measures, ComparisonMode, ComparisonVerdict};
pub use measure::{DiscreteMeasure, DEFAULT_TOL_CLOSED, MASS_TOL};
pub use occupation::occupation_measure;
pub use ordinal::{default_eps_ordinal, ordinal_classify, OrdinalReport, UArg, EPS_ORDINAL_FLOOR};
