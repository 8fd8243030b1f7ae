//! Shape of the admissible set from a scan and a probe.

use crate::weakkam::{ProbeOutcome, ProbeReport};

use super::scan::CCurveSample;

/// Relative change below this over a tenth of the range counts as saturated.
pub const SATURATION_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Point(f64),
    ClosedRay(f64),
    OpenRay(f64),
    Line,
    /// Closed or open ray, attainment unknown.
    RayUndetermined(f64),
    /// The samples fit none of the four shapes.
    Inconclusive,
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Point(_) => "point",
            Shape::ClosedRay(_) => "closed_ray",
            Shape::OpenRay(_) => "open_ray",
            Shape::Line => "line",
            Shape::RayUndetermined(_) => "closed_ray|open_ray",
            Shape::Inconclusive => "inconclusive",
        }
    }

    pub fn c0(&self) -> Option<f64> {
        match *self {
            Shape::Point(c) | Shape::ClosedRay(c) | Shape::OpenRay(c) | Shape::RayUndetermined(c) => Some(c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeReport {
    pub shape: Shape,
    pub attained: Option<bool>,
    pub lower_saturated: bool,
    pub upper_saturated: bool,
    /// Largest `c(mid) - (c(a) + c(b))/2` over symmetric sample triples.
    pub convexity_defect: f64,
    /// Largest drop `c(theta_k) - c(theta_{k+1})`.
    pub monotonicity_defect: f64,
    /// Largest `c - min c` over samples with an ordinal measure.
    pub ordinal_above_min: f64,
}

impl ShapeReport {
    pub fn convex(&self, tol_convex: f64) -> bool {
        self.convexity_defect <= tol_convex
    }

    pub fn monotone(&self, tol_mono: f64) -> bool {
        self.monotonicity_defect <= tol_mono
    }
}

fn saturated(cs: &[f64], first: bool) -> bool {
    let n = cs.len();
    let w = (n / 10).max(1);
    let (a, b) = if first { (cs[0], cs[w]) } else { (cs[n - 1 - w], cs[n - 1]) };
    (b - a).abs() <= SATURATION_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Reads the shape off the ends of the sampled curve; attainment of the
/// lower end comes from the probe.
pub fn classify_admissible_set(samples: &[CCurveSample], probe: Option<&ProbeReport>) -> ShapeReport {
    let ok: Vec<&CCurveSample> = samples.iter().filter(|s| s.is_ok()).collect();
    let cs: Vec<f64> = ok.iter().map(|s| s.c).collect();
    let mut convexity_defect = f64::NEG_INFINITY;
    let mut monotonicity_defect = f64::NEG_INFINITY;
    for k in 0..cs.len() {
        if k + 1 < cs.len() {
            monotonicity_defect = monotonicity_defect.max(cs[k] - cs[k + 1]);
        }
        for d in 1..=k.min(cs.len().saturating_sub(k + 1)) {
            // Only equally spaced triples.
            let (a, m, b) = (ok[k - d].theta, ok[k].theta, ok[k + d].theta);
            if ((a + b) / 2.0 - m).abs() <= 1e-9 * (1.0 + m.abs()) {
                convexity_defect = convexity_defect.max(cs[k] - 0.5 * (cs[k - d] + cs[k + d]));
            }
        }
    }
    let cmin = cs.iter().cloned().fold(f64::INFINITY, f64::min);
    let ordinal_above_min = ok.iter().filter(|s| s.ordinal_nonempty).map(|s| s.c - cmin).fold(0.0, f64::max);
    let attained = probe.and_then(|p| p.attained());
    let probe_all = matches!(probe.map(|p| p.outcome), Some(ProbeOutcome::BracketTooSmall { all_admissible: true }));
    let (lower, upper) = if cs.len() >= 5 { (saturated(&cs, true), saturated(&cs, false)) } else { (false, false) };
    let shape = if cs.len() < 5 {
        Shape::Inconclusive
    } else {
        let c0 = cs[0];
        match (lower, upper) {
            (true, true) if (cs[cs.len() - 1] - c0).abs() <= SATURATION_TOL * c0.abs().max(1.0) => Shape::Point(c0),
            (true, false) => match attained {
                Some(true) => Shape::ClosedRay(c0),
                Some(false) => Shape::OpenRay(c0),
                None => Shape::RayUndetermined(c0),
            },
            (false, false) if probe_all || probe.is_none() => Shape::Line,
            (false, false) => match probe.and_then(|p| p.infimum()) {
                Some(inf) if attained == Some(false) => Shape::OpenRay(inf),
                Some(inf) => Shape::RayUndetermined(inf),
                None => Shape::Line,
            },
            _ => Shape::Inconclusive,
        }
    };
    ShapeReport {
        shape,
        attained,
        lower_saturated: lower,
        upper_saturated: upper,
        convexity_defect: convexity_defect.max(0.0),
        monotonicity_defect: monotonicity_defect.max(0.0),
        ordinal_above_min,
    }
}
