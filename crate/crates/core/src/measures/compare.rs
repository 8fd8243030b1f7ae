//! Comparison of two solutions through their integrals against ordinal
//! measures.

use crate::error::Result;
use crate::weakkam::GridFunction;

use super::measure::DiscreteMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparisonMode {
    /// `u1 <= u2` is implied by `int u1 <= int u2` on every ordinal measure.
    Ordering,
    /// No ordinal measures: the two solutions must coincide.
    Uniqueness,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonVerdict {
    pub mode: ComparisonMode,
    /// `(int u1 dmu, int u2 dmu)` per measure.
    pub integrals: Vec<(f64, f64)>,
    pub hypothesis_holds: bool,
    /// `u1 <= u2 + tol_order` at every node.
    pub pointwise_le: bool,
    /// The implication hypothesis => conclusion holds; in uniqueness mode,
    /// `sup |u1 - u2| <= tol_order`.
    pub conclusion_holds: bool,
    /// `max (u1 - u2)^+`, or `sup |u1 - u2|` in uniqueness mode.
    pub max_violation: f64,
    pub tol_order: f64,
}

pub fn compare_with_measures(
    u1: &GridFunction,
    u2: &GridFunction,
    measures: &[DiscreteMeasure],
    tol_order: f64,
) -> Result<ComparisonVerdict> {
    u1.check_same_grid(u2)?;
    let excess = u1.values().iter().zip(u2.values()).map(|(a, b)| a - b).fold(0.0f64, f64::max);
    let pointwise_le = excess <= tol_order;
    if measures.is_empty() {
        let d = u1.sup_dist(u2)?;
        return Ok(ComparisonVerdict {
            mode: ComparisonMode::Uniqueness,
            integrals: Vec::new(),
            hypothesis_holds: true,
            pointwise_le,
            conclusion_holds: d <= tol_order,
            max_violation: d,
            tol_order,
        });
    }
    let mut integrals = Vec::with_capacity(measures.len());
    for mu in measures {
        integrals.push((mu.integrate_x(u1)?, mu.integrate_x(u2)?));
    }
    let hypothesis_holds = integrals.iter().all(|&(a, b)| a <= b + tol_order);
    Ok(ComparisonVerdict {
        mode: ComparisonMode::Ordering,
        integrals,
        hypothesis_holds,
        pointwise_le,
        conclusion_holds: !hypothesis_holds || pointwise_le,
        max_violation: excess,
        tol_order,
    })
}
