//! Sampling `theta -> c(theta)` with measure information at each sample.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::{closed_measure_lp, face_integral_range, DiscreteMeasure};
use crate::model::{ContactHamiltonian, LagrangianView, TorusGrid1D, VelocityGrid};
use crate::weakkam::{frozen_critical_value, Discretization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Lp,
    LaxOleinik,
    Both,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lp" => Ok(Method::Lp),
            "laxoleinik" => Ok(Method::LaxOleinik),
            "both" => Ok(Method::Both),
            other => Err(Error::Unsupported(format!("unknown scan method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub method: Method,
    pub lp_grid: TorusGrid1D,
    pub lp_vgrid: VelocityGrid,
    pub lo_disc: Discretization,
    pub lo_iters: usize,
    pub eps_ordinal: f64,
    /// Slack of the near-optimal face used for the ordinal test.
    pub tol_face: f64,
    /// Cross-method disagreement above this is flagged.
    pub gap_tol: f64,
}

#[derive(Debug, Clone)]
pub struct CCurveSample {
    pub theta: f64,
    pub c: f64,
    pub c_lp: Option<f64>,
    pub c_lo: Option<f64>,
    pub slope_left: Option<f64>,
    pub slope_right: Option<f64>,
    /// `int dH/du dmu` over the LP measure.
    pub integral_duh: f64,
    /// Range of the same integral over the near-optimal face.
    pub face_min: f64,
    pub face_max: f64,
    pub ordinal_nonempty: bool,
    /// Every face measure has `|int dH/du| >= 10 eps_ordinal`.
    pub robustly_non_ordinal: bool,
    pub method_gap: Option<f64>,
    pub gap_flagged: bool,
    pub measure: Option<DiscreteMeasure>,
    pub error: Option<String>,
}

impl CCurveSample {
    fn failed(theta: f64, e: &Error) -> Self {
        Self {
            theta,
            c: f64::NAN,
            c_lp: None,
            c_lo: None,
            slope_left: None,
            slope_right: None,
            integral_duh: f64::NAN,
            face_min: f64::NAN,
            face_max: f64::NAN,
            ordinal_nonempty: false,
            robustly_non_ordinal: false,
            method_gap: None,
            gap_flagged: false,
            measure: None,
            error: Some(e.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

fn sample(ham: &ContactHamiltonian, theta: f64, s: &ScanSettings) -> Result<CCurveSample> {
    let view = LagrangianView::new(ham, s.lp_vgrid.v_max(), s.lp_vgrid.len());
    let lp = closed_measure_lp(&view, theta, s.lp_grid, s.lp_vgrid)?;
    let c_lo = match s.method {
        Method::Lp => None,
        _ => Some(frozen_critical_value(ham, theta, s.lo_disc, s.lo_iters)?),
    };
    let c_lp = lp.critical_value;
    let c = match s.method {
        Method::LaxOleinik => c_lo.expect("computed above"),
        _ => c_lp,
    };
    let method_gap = c_lo.map(|l| (l - c_lp).abs());
    let integral_duh = lp.measure.integrate(|x, v| view.partials(x, v, theta).map(|p| -p.du).unwrap_or(f64::NAN));
    let face = face_integral_range(&view, theta, s.lp_grid, s.lp_vgrid, -c_lp, s.tol_face)?;
    let eps = s.eps_ordinal;
    Ok(CCurveSample {
        theta,
        c,
        c_lp: Some(c_lp),
        c_lo,
        slope_left: None,
        slope_right: None,
        integral_duh,
        face_min: face.min,
        face_max: face.max,
        ordinal_nonempty: face.min <= eps && face.max >= -eps,
        robustly_non_ordinal: face.min >= 10.0 * eps || face.max <= -10.0 * eps,
        method_gap,
        gap_flagged: method_gap.is_some_and(|g| g > s.gap_tol),
        measure: Some(lp.measure),
        error: None,
    })
}

/// Evaluates `n_samples` equally spaced values of `theta` concurrently.
/// Failures at single samples are recorded in the sample.
pub fn scan(
    ham: &ContactHamiltonian,
    theta_min: f64,
    theta_max: f64,
    n_samples: usize,
    settings: &ScanSettings,
) -> Result<Vec<CCurveSample>> {
    if !(theta_min < theta_max) || n_samples < 5 {
        return Err(Error::Precondition(format!(
            "scan needs theta_min < theta_max and at least 5 samples, got [{theta_min}, {theta_max}] with {n_samples}"
        )));
    }
    let step = (theta_max - theta_min) / (n_samples - 1) as f64;
    let mut samples: Vec<CCurveSample> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let theta = if k + 1 == n_samples { theta_max } else { theta_min + k as f64 * step };
            sample(ham, theta, settings).unwrap_or_else(|e| CCurveSample::failed(theta, &e))
        })
        .collect();
    fill_slopes(&mut samples);
    Ok(samples)
}

/// Neighbor differences; a slope is missing when a neighbor failed.
pub fn fill_slopes(samples: &mut [CCurveSample]) {
    let slope = |a: &CCurveSample, b: &CCurveSample| {
        let s = (b.c - a.c) / (b.theta - a.theta);
        s.is_finite().then_some(s)
    };
    for k in 0..samples.len() {
        let left = if k > 0 { slope(&samples[k - 1], &samples[k]) } else { None };
        let right = if k + 1 < samples.len() { slope(&samples[k], &samples[k + 1]) } else { None };
        samples[k].slope_left = left;
        samples[k].slope_right = right;
    }
}
