#![allow(dead_code)]

use std::f64::consts::PI;

use contact_weakkam::model::{TorusGrid1D, VelocityGrid};
use contact_weakkam::weakkam::{Discretization, GridFunction};

/// Closed-form family `u_lambda` of the pendulum preset at `c = 0`.
pub fn u_lambda(x: f64, lambda: f64) -> f64 {
    let x = x.rem_euclid(1.0);
    let c = (PI * x).cos() / PI;
    if x < 0.5 {
        1.0 - (c + lambda).powi(2)
    } else {
        1.0 - (lambda - c).powi(2)
    }
}

/// Derivative of `u_0`: `sin(2 pi x) / pi`.
pub fn du0(x: f64) -> f64 {
    (2.0 * PI * x).sin() / PI
}

/// Member of the family through the value `u(0)`.
pub fn lambda_from_origin(u_at_0: f64) -> f64 {
    (1.0 - u_at_0).sqrt() - 1.0 / PI
}

pub fn grid(n: usize) -> TorusGrid1D {
    TorusGrid1D::new(1.0, n).unwrap()
}

pub fn family(n: usize, lambda: f64) -> GridFunction {
    GridFunction::from_fn(grid(n), |x| u_lambda(x, lambda))
}

/// The solver's discretization: `v_max = 4`, 65 velocities.
pub fn solver_disc(g: TorusGrid1D) -> Discretization {
    Discretization::matched(g, VelocityGrid::new(4.0, 65).unwrap())
}

/// Fine velocity steps for curves.
pub fn curve_disc(n: usize) -> Discretization {
    Discretization::matched(grid(n), VelocityGrid::new(1.0, 129).unwrap())
}

/// `max_x` of the frozen pendulum potential `(1 - theta)(cos 2 pi x - 1)` on
/// a grid of `n` nodes.
pub fn pendulum_c_oracle(theta: f64, n: usize) -> f64 {
    (0..n)
        .map(|i| {
            let x = i as f64 / n as f64;
            (1.0 - theta) * ((2.0 * PI * x).cos() - 1.0)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
