//! Invariance of lifted Mather sets under the contact flow.

use rayon::prelude::*;

use crate::error::Result;
use crate::measures::DiscreteMeasure;
use crate::model::{ContactHamiltonian, LagrangianView};
use crate::weakkam::GridFunction;

use super::ode::{integrate_contact, PhasePoint};

/// Support cells carry more than this much mass.
pub const SUPPORT_MASS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    /// Lifted support points `(x, p, u)`.
    pub lifted: Vec<PhasePoint>,
    /// Largest distance from a trajectory sample to the lifted set, in the
    /// max of circle distance, `|dp|` and `|du|`.
    pub deviation: f64,
    /// Largest `|p(t) - Du(x(t))|`, `Du` the one-sided difference on the side
    /// the orbit comes from.
    pub graph_deviation: f64,
    /// Largest `|p_a - p_b| / |x_a - x_b|` over pairs of lifted points.
    pub lipschitz_estimate: f64,
    pub blew_up: bool,
}

/// Lifts every support cell `(x, v)` of `mu` to `(x, L_v(x, v, u(x)), u(x))`,
/// integrates the contact flow for `t_end`, and measures how far the orbits
/// leave the lifted set.
pub fn mather_invariance_check(
    ham: &ContactHamiltonian,
    u: &GridFunction,
    c: f64,
    mu: &DiscreteMeasure,
    t_end: f64,
    dt: f64,
) -> Result<InvarianceReport> {
    let view = LagrangianView::new(ham, mu.vgrid().v_max(), mu.vgrid().len());
    let mut lifted = Vec::new();
    for (i, j) in mu.support(SUPPORT_MASS) {
        let x = mu.grid().node(i);
        let v = mu.vgrid().node(j);
        let ux = u.interpolate(x);
        lifted.push(PhasePoint::new(x, view.momentum(x, v, ux)?, ux));
    }
    let period = ham.period();
    let grid = *u.grid();
    let dist = |a: &PhasePoint, b: &PhasePoint| {
        let dx = (a.x - b.x).rem_euclid(period);
        dx.min(period - dx).max((a.y - b.y).abs()).max((a.u - b.u).abs())
    };
    let per_point: Vec<Result<(f64, f64, bool)>> = lifted
        .par_iter()
        .map(|start| {
            let traj = integrate_contact(ham, c, *start, t_end, dt)?;
            let mut dev = 0.0f64;
            let mut graph = 0.0f64;
            for s in &traj.samples {
                let d = lifted.iter().map(|l| dist(s, l)).fold(f64::INFINITY, f64::min);
                dev = dev.max(d);
                let i = grid.nearest_node(s.x);
                let du = if s.y >= 0.0 { u.d_minus(i) } else { u.d_plus(i) };
                graph = graph.max((s.y - du).abs());
            }
            if traj.blew_up {
                dev = f64::INFINITY;
            }
            Ok((dev, graph, traj.blew_up))
        })
        .collect();
    let mut report = InvarianceReport {
        lifted: Vec::new(),
        deviation: 0.0,
        graph_deviation: 0.0,
        lipschitz_estimate: 0.0,
        blew_up: false,
    };
    for r in per_point {
        let (dev, graph, blew) = r?;
        report.deviation = report.deviation.max(dev);
        report.graph_deviation = report.graph_deviation.max(graph);
        report.blew_up |= blew;
    }
    for a in 0..lifted.len() {
        for b in a + 1..lifted.len() {
            let dx = grid.dist(lifted[a].x, lifted[b].x);
            if dx > 0.0 {
                report.lipschitz_estimate = report.lipschitz_estimate.max((lifted[a].y - lifted[b].y).abs() / dx);
            }
        }
    }
    report.lifted = lifted;
    Ok(report)
}
