//! One function per subcommand. Each writes its CSV files and `report.txt`
//! into the output directory and returns whether every checked property held.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contact_weakkam::ccurve::{classify_admissible_set, scan, verify_h4, H4Tolerances, ScanSettings};
use contact_weakkam::flows::{integrate_contact, integrate_el, mather_invariance_check, PhasePoint, Side};
use contact_weakkam::measures::{
    closed_measure_lp, compare_with_measures, default_eps_ordinal, enumerate_mather_measures, occupation_measure,
    ordinal_classify, DiscreteMeasure, UArg,
};
use contact_weakkam::model::{ContactHamiltonian, LagrangianView, TorusGrid1D, VelocityGrid};
use contact_weakkam::weakkam::{
    admissible_interval_probe, backward_curve, explore_multiplicity, frozen_critical_value, residual, solve_stationary,
    Discretization, GridFunction, ProbeOutcome, SolveOptions,
};

use crate::config::RunConfig;
use crate::fixtures::{family_member, g_branch, lambda_from_origin, Branch};
use crate::io::{fmt_f64, write_measure, write_scan, write_solution, write_table, write_trajectory, Report};

/// Report plus the names of failed checks.
#[derive(Debug, Default)]
pub struct Outcome {
    pub report: Report,
    pub failed: Vec<String>,
}

impl Outcome {
    fn check(&mut self, name: &str, ok: bool) {
        self.report.set(format!("check.{name}"), if ok { "pass" } else { "fail" });
        if !ok {
            self.failed.push(name.to_string());
        }
    }

    pub fn passed(&self) -> bool {
        self.failed.is_empty()
    }

    fn finish(mut self, dir: &Path) -> Result<Self> {
        self.report.set("checks_failed", self.failed.len());
        self.report.write(dir)?;
        Ok(self)
    }
}

fn prepare(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn hamiltonian(cfg: &RunConfig) -> Result<ContactHamiltonian> {
    cfg.hamiltonian().map_err(anyhow::Error::msg)
}

fn describe(cfg: &RunConfig, report: &mut Report) {
    match &cfg.hamiltonian {
        crate::config::HamiltonianSpec::Preset(name) => report.set("hamiltonian", name),
        crate::config::HamiltonianSpec::Mechanical { .. } => report.set("hamiltonian", "mechanical_contact"),
    }
    report.num("period", cfg.grid.period);
}

/// Initial datum of `solve`.
#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    Constant(f64),
    File(PathBuf),
}

impl std::str::FromStr for Init {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some(k) = s.strip_prefix("const:") {
            k.trim()
                .parse::<f64>()
                .ok()
                .filter(|k| k.is_finite())
                .map(Init::Constant)
                .ok_or_else(|| format!("bad constant in '{s}'"))
        } else if let Some(p) = s.strip_prefix("file:") {
            Ok(Init::File(PathBuf::from(p)))
        } else {
            Err(format!("expected const:K or file:PATH, got '{s}'"))
        }
    }
}

/// Brings `u` onto `grid` by interpolation when the grids differ.
fn on_grid(u: GridFunction, grid: TorusGrid1D) -> Result<GridFunction> {
    if *u.grid() == grid {
        return Ok(u);
    }
    ensure!(
        u.grid().period() == grid.period(),
        "function on a circle of length {} does not fit the grid of length {}",
        u.grid().period(),
        grid.period()
    );
    Ok(GridFunction::from_fn(grid, |x| u.interpolate(x)))
}

pub fn solve(cfg: &RunConfig, c: f64, init: &Init, ladder: bool, dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    let ham = hamiltonian(cfg)?;
    let disc = cfg.discretization().map_err(anyhow::Error::msg)?;
    let opts = cfg.solve_options();
    let u_init = match init {
        Init::Constant(k) => GridFunction::constant(disc.grid, *k),
        Init::File(p) => on_grid(crate::io::read_solution(p)?, disc.grid)?,
    };
    let mut out = Outcome::default();
    describe(cfg, &mut out.report);
    out.report.num("c", c);
    out.report.set("n_nodes", disc.grid.len());
    out.report.num("dt", disc.dt);
    let (u, rep) = solve_stationary(&ham, c, &u_init, disc, &opts)?;
    let res = residual(&ham, &u, c)?;
    write_solution(&dir.join("solution.csv"), &u, &res)?;
    out.report.set("status", format!("{:?}", rep.status).to_lowercase());
    out.report.flag("converged", rep.converged);
    out.report.set("iterations", rep.iterations);
    out.report.num("sup_update", rep.sup_update);
    out.report.num("drift_rate", rep.drift_rate);
    out.report.num("residual_linf", rep.residual_linf);
    out.report.num("residual_away_from_kinks", res.sup_excluding_kinks);
    out.report.set("kink_count", res.kink_nodes().len());
    out.report.num("lip", u.lip());
    if rep.converged {
        // A fixed point of the scheme solves the equation up to O(h + dt).
        let bound = 10.0 * (disc.grid.h() + disc.dt);
        out.report.num("residual_bound", bound);
        out.check("residual_consistent", res.sup_excluding_kinks <= bound);
    }
    if ladder {
        let (found, failed) = explore_multiplicity(&ham, c, disc, &cfg.solver.kappa_ladder, &opts)?;
        out.report.set("ladder_distinct", found.len());
        out.report.set("ladder_unconverged", failed.len());
        for (k, f) in found.iter().enumerate() {
            let r = residual(&ham, &f.solution, c)?;
            write_solution(&dir.join(format!("ladder_{k}.csv")), &f.solution, &r)?;
            out.report
                .set(format!("ladder_{k}.kappas"), f.kappas.iter().map(|&k| fmt_f64(k)).collect::<Vec<_>>().join(","));
            out.report.num(format!("ladder_{k}.residual_away_from_kinks"), r.sup_excluding_kinks);
        }
    }
    out.finish(dir)
}

fn lp_view<'a>(ham: &'a ContactHamiltonian, vg: &VelocityGrid) -> LagrangianView<'a> {
    LagrangianView::new(ham, vg.v_max(), vg.len())
}

fn eps_ordinal(
    cfg: &RunConfig,
    view: &LagrangianView<'_>,
    grid: &TorusGrid1D,
    vg: &VelocityGrid,
    theta: f64,
) -> Result<f64> {
    match cfg.measure.eps_ordinal {
        Some(e) => Ok(e),
        None => {
            let dt = cfg.discretization().map_err(anyhow::Error::msg)?.dt;
            Ok(default_eps_ordinal(view, grid, &vg.nodes().collect::<Vec<_>>(), dt, theta)?)
        }
    }
}

fn lo_disc(cfg: &RunConfig) -> Result<Discretization> {
    let g = TorusGrid1D::new(cfg.grid.period, cfg.scan.lo_nodes)?;
    Ok(Discretization::matched(g, VelocityGrid::new(cfg.grid.v_max, 33)?))
}

pub fn scan_c(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    let ham = hamiltonian(cfg)?;
    let (g, vg) = cfg.lp_grids().map_err(anyhow::Error::msg)?;
    let view = lp_view(&ham, &vg);
    let sc = &cfg.scan;
    let eps = eps_ordinal(cfg, &view, &g, &vg, sc.theta_min)?.max(eps_ordinal(cfg, &view, &g, &vg, sc.theta_max)?);
    let settings = ScanSettings {
        method: sc.method,
        lp_grid: g,
        lp_vgrid: vg,
        lo_disc: lo_disc(cfg)?,
        lo_iters: sc.lo_iters,
        eps_ordinal: eps,
        tol_face: 1e-6,
        gap_tol: 2e-2,
    };
    let samples = scan(&ham, sc.theta_min, sc.theta_max, sc.n_samples, &settings)?;
    write_scan(&dir.join("scan.csv"), &samples)?;

    let mut out = Outcome::default();
    describe(cfg, &mut out.report);
    out.report.set("method", format!("{:?}", sc.method).to_lowercase());
    out.report.set("n_samples", samples.len());
    out.report.num("eps_ordinal", eps);
    let failed: Vec<_> = samples.iter().filter(|s| !s.is_ok()).collect();
    out.report.set("failed_samples", failed.len());
    for s in &failed {
        out.report.set(format!("failed.theta_{}", fmt_f64(s.theta)), s.error.as_deref().unwrap_or(""));
    }
    out.report.set("gap_flagged", samples.iter().filter(|s| s.gap_flagged).count());

    let tol = H4Tolerances { eps_ordinal: eps, ..H4Tolerances::default() };
    let h4 = verify_h4(&samples, &view, &tol);
    for item in 1..=8 {
        let (pass, fail, na) = h4.tally(item);
        out.report.set(format!("h4.item{item}"), format!("pass={pass} fail={fail} not_applicable={na}"));
    }
    for f in h4.failures() {
        out.report.set(format!("h4.failure.item{}.theta_{}", f.item, fmt_f64(f.theta)), &f.detail);
    }
    out.check("h4", h4.all_passed());

    let probe = admissible_interval_probe(
        &ham,
        sc.probe_c_min,
        sc.probe_c_max,
        sc.probe_bisections,
        lo_disc(cfg)?,
        &cfg.solve_options(),
    );
    let probe = match probe {
        Ok(p) => Some(p),
        Err(e) => {
            out.report.set("probe_error", e);
            None
        }
    };
    match probe.as_ref().map(|p| p.outcome) {
        Some(ProbeOutcome::Bracketed { lo, hi, attained }) => {
            out.report.num("probe.inf_lo", lo);
            out.report.num("probe.inf_hi", hi);
            out.report.flag("probe.attained", attained);
        }
        Some(ProbeOutcome::BracketTooSmall { all_admissible }) => {
            out.report.set("probe.bracket", if all_admissible { "all_admissible" } else { "none_admissible" });
        }
        None => {}
    }
    let shape = classify_admissible_set(&samples, probe.as_ref());
    out.report.set("shape", shape.shape.name());
    if let Some(c0) = shape.shape.c0() {
        out.report.num("shape_c0", c0);
    }
    out.report.num("convexity_defect", shape.convexity_defect);
    out.report.num("monotonicity_defect", shape.monotonicity_defect);
    out.report.num("ordinal_above_min", shape.ordinal_above_min);
    out.check("monotone", failed.is_empty() && shape.monotone(1e-6));
    if ham.as_mechanical().is_some() {
        out.check("convex", failed.is_empty() && shape.convex(1e-3));
    }
    out.finish(dir)
}

pub struct MatherArgs {
    pub theta: f64,
    pub enumerate: usize,
    pub u: Option<PathBuf>,
    pub c: f64,
    pub time: f64,
}

pub fn mather(cfg: &RunConfig, args: &MatherArgs, dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    ensure!(args.enumerate >= 1, "--enumerate must be at least 1");
    let ham = hamiltonian(cfg)?;
    let (g, vg) = cfg.lp_grids().map_err(anyhow::Error::msg)?;
    let view = lp_view(&ham, &vg);
    let theta = args.theta;
    let eps = eps_ordinal(cfg, &view, &g, &vg, theta)?;
    let found = enumerate_mather_measures(&view, theta, g, vg, args.enumerate, cfg.measure.tol_value)?;
    let u = args.u.as_ref().map(|p| crate::io::read_solution(p)).transpose()?;

    let mut out = Outcome::default();
    describe(cfg, &mut out.report);
    out.report.num("theta", theta);
    out.report.num("eps_ordinal", eps);
    out.report.set("measures_found", found.len());
    out.report.num("critical_value_lp", found[0].critical_value);
    let c_lo = frozen_critical_value(&ham, theta, lo_disc(cfg)?, cfg.scan.lo_iters)?;
    out.report.num("critical_value_lo", c_lo);
    out.check("methods_agree", (c_lo - found[0].critical_value).abs() <= 2e-2);
    for (k, sol) in found.iter().enumerate() {
        let mu = &sol.measure;
        write_measure(&dir.join(format!("measure_{k}.csv")), mu)?;
        let key = |s: &str| format!("measure_{k}.{s}");
        out.report.num(key("critical_value"), sol.critical_value);
        let (mx, mv) = centroid(mu);
        out.report.num(key("centroid_x"), mx);
        out.report.num(key("centroid_v"), mv);
        out.report.set(key("support_cells"), mu.support(1e-9).len());
        let closed = mu.closedness_residual();
        out.report.num(key("closedness_residual"), closed);
        out.check(&key("closed"), closed <= cfg.measure.tol_closed);
        let ord = ordinal_classify(mu, &view, UArg::Constant(theta), eps)?;
        out.report.num(key("integral_dul"), ord.integral_dul);
        out.report.flag(key("ordinal"), ord.is_ordinal);
        if let Some(u) = &u {
            let inv = mather_invariance_check(&ham, u, args.c, mu, args.time, 1e-2)?;
            out.report.num(key("invariance_deviation"), inv.deviation);
            out.report.flag(key("blew_up"), inv.blew_up);
            out.check(&key("invariant"), !inv.blew_up && inv.deviation <= 1e-4);
        }
    }
    out.finish(dir)
}

/// Mass-weighted mean position (as an angle, so it respects periodicity) and
/// velocity.
fn centroid(mu: &DiscreteMeasure) -> (f64, f64) {
    let p = mu.grid().period();
    let (mut s, mut c, mut v) = (0.0, 0.0, 0.0);
    for (x, vel, m) in mu.nonzero() {
        let a = 2.0 * PI * x / p;
        s += m * a.sin();
        c += m * a.cos();
        v += m * vel;
    }
    let x = (s.atan2(c) / (2.0 * PI) * p).rem_euclid(p);
    // Snap roundoff just below the period back to 0.
    let x = if p - x < 1e-12 { 0.0 } else { x };
    (x + 0.0, v + 0.0)
}

pub fn compare(cfg: &RunConfig, u1: &Path, u2: &Path, theta: f64, dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    let ham = hamiltonian(cfg)?;
    let u1 = crate::io::read_solution(u1)?;
    let u2 = crate::io::read_solution(u2)?;
    u1.check_same_grid(&u2)?;
    ensure!(
        u1.grid().period() == ham.period(),
        "solutions live on a circle of length {}, the Hamiltonian on {}",
        u1.grid().period(),
        ham.period()
    );
    let (g, vg) = cfg.lp_grids().map_err(anyhow::Error::msg)?;
    let view = lp_view(&ham, &vg);
    let eps = eps_ordinal(cfg, &view, &g, &vg, theta)?;
    let found = enumerate_mather_measures(&view, theta, g, vg, 8, cfg.measure.tol_value)?;
    let mut ordinal = Vec::new();
    for sol in &found {
        if ordinal_classify(&sol.measure, &view, UArg::Constant(theta), eps)?.is_ordinal {
            ordinal.push(sol.measure.clone());
        }
    }
    let dt = cfg.discretization().map_err(anyhow::Error::msg)?.dt;
    let tol_order = 5.0 * (u1.grid().h() + dt);
    let v = compare_with_measures(&u1, &u2, &ordinal, tol_order)?;
    for (k, mu) in ordinal.iter().enumerate() {
        write_measure(&dir.join(format!("ordinal_measure_{k}.csv")), mu)?;
    }
    write_table(
        &dir.join("comparison.csv"),
        &["measure", "int_u1", "int_u2"],
        v.integrals.iter().enumerate().map(|(k, &(a, b))| vec![k as f64, a, b]),
    )?;

    let mut out = Outcome::default();
    describe(cfg, &mut out.report);
    out.report.num("theta", theta);
    out.report.set("mather_measures", found.len());
    out.report.set("ordinal_measures", ordinal.len());
    out.report.set("mode", format!("{:?}", v.mode).to_lowercase());
    out.report.flag("hypothesis_holds", v.hypothesis_holds);
    out.report.flag("pointwise_le", v.pointwise_le);
    out.report.flag("conclusion_holds", v.conclusion_holds);
    out.report.num("max_violation", v.max_violation);
    out.report.num("tol_order", tol_order);
    out.check("comparison", v.conclusion_holds);
    out.finish(dir)
}

pub struct FlowArgs {
    pub start: PhasePoint,
    pub time: f64,
    pub side: Side,
    pub dt: f64,
    pub c: f64,
}

pub fn flow(cfg: &RunConfig, args: &FlowArgs, dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    ensure!(args.time > 0.0, "--time must be positive");
    let ham = hamiltonian(cfg)?;
    let traj = match args.side {
        Side::Hamiltonian => integrate_contact(&ham, args.c, args.start, args.time, args.dt)?,
        Side::Lagrangian => integrate_el(&ham, args.c, args.start, args.time, args.dt)?,
    };
    write_trajectory(&dir.join("trajectory.csv"), &traj, &ham)?;
    let mut out = Outcome::default();
    describe(cfg, &mut out.report);
    out.report.set("side", format!("{:?}", args.side).to_lowercase());
    out.report.num("c", args.c);
    out.report.num("dt", traj.dt);
    out.report.set("steps", traj.samples.len() - 1);
    out.report.flag("blew_up", traj.blew_up);
    let last = traj.last();
    out.report.num("final_x", last.x);
    out.report.num("final_y", last.y);
    out.report.num("final_u", last.u);
    out.finish(dir)
}

pub fn example(cfg: &RunConfig, name: &str, seed: u64, dir: &Path) -> Result<Outcome> {
    match name {
        "fig1" => fig1(cfg, seed, dir),
        "fig2" => fig2(dir),
        other => bail!("unknown example '{other}' (known: fig1, fig2)"),
    }
}

/// Members of the closed-form family written and checked by `fig1`.
pub const FIG1_LAMBDAS: [f64; 4] = [0.0, 0.25, 0.5, 1.0];

fn lambda_tag(l: f64) -> String {
    format!("{l}")
}

fn fig1(cfg: &RunConfig, seed: u64, dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    let ham = ContactHamiltonian::pendulum_example();
    let grid = TorusGrid1D::new(1.0, 512)?;
    let mut out = Outcome::default();
    out.report.set("hamiltonian", "pendulum_example");
    out.report.num("c", 0.0);
    out.report.set("n_nodes", grid.len());
    out.report.set("seed", seed);

    let family: Vec<GridFunction> = FIG1_LAMBDAS.iter().map(|&l| family_member(grid, l)).collect();
    for (&l, u) in FIG1_LAMBDAS.iter().zip(&family) {
        let res = residual(&ham, u, 0.0)?;
        write_solution(&dir.join(format!("family_lambda_{}.csv", lambda_tag(l))), u, &res)?;
        let key = |s: &str| format!("family.lambda_{}.{s}", lambda_tag(l));
        out.report.num(key("residual_away_from_kinks"), res.sup_excluding_kinks);
        out.report
            .set(key("kinks"), res.kink_nodes().iter().map(|&i| fmt_f64(grid.node(i))).collect::<Vec<_>>().join(","));
        out.check(&key("residual"), res.sup_excluding_kinks <= 0.05);
    }

    let mut ordered = true;
    for a in 0..family.len() {
        for b in 0..a {
            // FIG1_LAMBDAS is increasing, so lambda_a > lambda_b.
            ordered &= family[a].values().iter().zip(family[b].values()).all(|(x, y)| x <= y);
        }
    }
    out.check("family_descends_in_lambda", ordered);

    let (g64, vg) = (TorusGrid1D::new(1.0, 64)?, VelocityGrid::new(2.0, 33)?);
    let view = lp_view(&ham, &vg);
    let lp = closed_measure_lp(&view, 0.0, g64, vg)?;
    write_measure(&dir.join("measure_theta0.csv"), &lp.measure)?;
    let mass = lp.measure.mass_near(0.0, 0.0, 1);
    let ord = ordinal_classify(&lp.measure, &view, UArg::Constant(0.0), 1e-2)?;
    out.report.num("lp.critical_value", lp.critical_value);
    out.report.num("lp.mass_near_rest", mass);
    out.report.num("lp.integral_dul", ord.integral_dul);
    out.check("lp.critical_value", lp.critical_value.abs() <= 1e-2);
    out.check("lp.concentrated_at_rest", mass >= 0.99);
    out.check("lp.ordinal", ord.is_ordinal);

    let c_lo = frozen_critical_value(
        &ham,
        0.0,
        Discretization::matched(TorusGrid1D::new(1.0, 128)?, VelocityGrid::new(4.0, 33)?),
        2000,
    )?;
    out.report.num("lo.critical_value", c_lo);
    out.check("lo.critical_value", c_lo.abs() <= 5e-3);

    let ordinal = [lp.measure.clone()];
    let mut rows = Vec::new();
    let mut all_hold = true;
    for a in 0..family.len() {
        for b in 0..a {
            let v = compare_with_measures(&family[a], &family[b], &ordinal, 1e-9)?;
            all_hold &= v.hypothesis_holds && v.conclusion_holds;
            rows.push(vec![
                FIG1_LAMBDAS[a],
                FIG1_LAMBDAS[b],
                v.integrals[0].0,
                v.integrals[0].1,
                v.hypothesis_holds as u8 as f64,
                v.pointwise_le as u8 as f64,
                v.conclusion_holds as u8 as f64,
                v.max_violation,
            ]);
        }
    }
    write_table(
        &dir.join("comparisons.csv"),
        &["lambda1", "lambda2", "int_u1", "int_u2", "hypothesis", "pointwise_le", "conclusion", "max_violation"],
        rows,
    )?;
    out.check("comparisons", all_hold);

    let disc = Discretization::matched(grid, VelocityGrid::new(4.0, 65)?);
    let (found, failed) = explore_multiplicity(&ham, 0.0, disc, &cfg.solver.kappa_ladder, &SolveOptions::default())?;
    out.report.set("ladder.distinct", found.len());
    out.report.set("ladder.unconverged", failed.len());
    let mut near_family = true;
    for (k, f) in found.iter().enumerate() {
        let lambda = lambda_from_origin(f.solution.get(0));
        let err = f.solution.sup_dist(&family_member(grid, lambda))?;
        let res = residual(&ham, &f.solution, 0.0)?;
        write_solution(&dir.join(format!("ladder_{k}.csv")), &f.solution, &res)?;
        out.report.num(format!("ladder_{k}.lambda"), lambda);
        out.report.num(format!("ladder_{k}.distance_to_family"), err);
        near_family &= err <= 2e-2;
    }
    out.check("ladder.multiple_solutions", found.len() >= 2.min(cfg.solver.kappa_ladder.len()));
    out.check("ladder.members_of_family", near_family);

    let cdisc = Discretization::matched(TorusGrid1D::new(1.0, 1024)?, VelocityGrid::new(1.0, 129)?);
    let u0 = family_member(cdisc.grid, 0.0);
    let horizon = 200.0;
    let curve = backward_curve(&ham, &u0, 0.0, cdisc, 0.3, (horizon / cdisc.dt) as usize, 0.1)?;
    let tol = 5.0 * (g64.h() + cdisc.dt);
    let occ = occupation_measure(&curve, 0.2 * horizon, horizon, g64, vg, tol)?;
    write_table(
        &dir.join("curve.csv"),
        &["t", "x", "v"],
        curve.samples.iter().enumerate().map(|(k, &(x, v))| vec![-(k as f64) * curve.dt, x, v]),
    )?;
    write_measure(&dir.join("occupation.csv"), &occ)?;
    out.report.num("curve.defect", curve.defect);
    out.report.num("curve.origin", curve.origin());
    out.report.num("occupation.mass_near_rest", occ.mass_near(0.0, 0.0, 1));
    out.check("curve.calibrated", curve.is_calibrated());
    out.check("occupation.concentrated_at_rest", occ.mass_near(0.0, 0.0, 1) >= 0.95);

    let inv = mather_invariance_check(&ham, &family[0], 0.0, &lp.measure, 100.0, 1e-2)?;
    out.report.num("invariance.deviation", inv.deviation);
    out.check("invariance", !inv.blew_up && inv.deviation <= 1e-6);

    let conj = legendre_conjugacy(&ham, seed, 20, 10.0, 1e-3)?;
    out.report.num("legendre_conjugacy.max_gap", conj);
    out.check("legendre_conjugacy", conj <= 1e-6);
    out.finish(dir)
}

/// Largest phase-space gap between the contact Hamilton flow and the
/// Euler-Lagrange flow over `n` random starts; for these Hamiltonians the
/// momentum equals the velocity.
pub fn legendre_conjugacy(ham: &ContactHamiltonian, seed: u64, n: usize, t_end: f64, dt: f64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let period = ham.period();
    let mut worst = 0.0f64;
    for _ in 0..n {
        let s = PhasePoint::new(rng.gen_range(0.0..period), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let a = integrate_el(ham, 0.0, s, t_end, dt)?;
        let b = integrate_contact(ham, 0.0, s, t_end, dt)?;
        ensure!(!a.blew_up && !b.blew_up, "orbit from {s:?} blew up");
        for (p, q) in a.samples.iter().zip(&b.samples) {
            let dx = (p.x - q.x).rem_euclid(period);
            let dx = dx.min(period - dx);
            worst = worst.max(dx).max((p.y - q.y).abs()).max((p.u - q.u).abs());
        }
    }
    Ok(worst)
}

/// Step of the backward integration of the g-branches.
pub const FIG2_DT_ODE: f64 = 1e-4;

const G2_NOTE: &str = "the source displays the same ODE for g1 and g2; g2 is taken as the negative square-root branch, the only reading giving two distinct C1 solutions";

fn fig2(dir: &Path) -> Result<Outcome> {
    prepare(dir)?;
    let ham = ContactHamiltonian::piecewise_example();
    let grid = TorusGrid1D::new(2.0, 1024)?;
    let mut out = Outcome::default();
    out.report.set("hamiltonian", "piecewise_example");
    out.report.num("c", 0.0);
    out.report.set("n_nodes", grid.len());
    out.report.set("note.g2", G2_NOTE);

    let plus = g_branch(Branch::Plus, FIG2_DT_ODE)?;
    let minus = g_branch(Branch::Minus, FIG2_DT_ODE)?;
    let (sp, sm) = (plus.samples(256), minus.samples(256));
    write_table(
        &dir.join("g_branches.csv"),
        &["x", "g_plus", "g_minus"],
        sp.iter().zip(&sm).map(|(a, b)| vec![a.0, a.1, b.1]),
    )?;
    for b in [&plus, &minus] {
        let key = |s: &str| format!("g_{}.{s}", b.branch.name());
        out.report.num(key("k"), b.k);
        out.report.num(key("value_at_half"), b.at_half());
        out.report.num(key("slope_at_half"), b.slope_at_half());
        // The free arcs leave x = 1/2 with slope +-2; C1 gluing needs the same.
        out.check(&key("c1_at_half"), (b.slope_at_half().abs() - 2.0).abs() <= 1e-2);
    }

    let u1 = plus.assemble(grid)?;
    let u2 = minus.assemble(grid)?;
    for (name, u) in [("u1", &u1), ("u2", &u2)] {
        let res = residual(&ham, u, 0.0)?;
        write_solution(&dir.join(format!("{name}.csv")), u, &res)?;
        out.report.num(format!("{name}.residual_away_from_kinks"), res.sup_excluding_kinks);
        out.report.set(format!("{name}.kink_count"), res.kink_nodes().len());
        out.check(&format!("{name}.residual"), res.sup_excluding_kinks <= 0.05);
    }
    let dist = u1.sup_dist(&u2)?;
    out.report.num("sup_distance_u1_u2", dist);
    out.check("two_distinct_solutions", dist > 0.1);

    let (g, vg) = (TorusGrid1D::new(2.0, 128)?, VelocityGrid::new(2.0, 33)?);
    let view = lp_view(&ham, &vg);
    let found = enumerate_mather_measures(&view, 0.0, g, vg, 4, 1e-3)?;
    out.report.set("mather_measures", found.len());
    let mut rest = None;
    let mut saddle = None;
    for (k, sol) in found.iter().enumerate() {
        let mu = &sol.measure;
        write_measure(&dir.join(format!("measure_{k}.csv")), mu)?;
        let ord = ordinal_classify(mu, &view, UArg::Constant(0.0), 1e-2)?;
        let (cx, cv) = centroid(mu);
        let key = |s: &str| format!("measure_{k}.{s}");
        out.report.num(key("critical_value"), sol.critical_value);
        out.report.num(key("centroid_x"), cx);
        out.report.num(key("centroid_v"), cv);
        out.report.num(key("integral_dul"), ord.integral_dul);
        out.report.flag(key("ordinal"), ord.is_ordinal);
        if mu.mass_near(0.0, 0.0, 1) >= 0.99 {
            rest = Some((mu.clone(), ord));
        } else if mu.mass_near(1.0, 0.0, 1) >= 0.99 {
            saddle = Some((mu.clone(), ord));
        }
    }
    out.check("support_near_0_0", rest.is_some());
    out.check("support_near_1_0", saddle.is_some());
    if let Some((mu, ord)) = &rest {
        out.check("ordinal_at_0_0", ord.is_ordinal);
        let inv = mather_invariance_check(&ham, &u1, 0.0, mu, 100.0, 1e-2)?;
        out.report.num("invariance_0_0.deviation", inv.deviation);
        out.check("invariance_0_0", !inv.blew_up && inv.deviation <= 1e-6);
        let v = compare_with_measures(&u1, &u2, std::slice::from_ref(mu), 1e-9)?;
        out.report.flag("comparison.hypothesis_holds", v.hypothesis_holds);
        out.report.flag("comparison.pointwise_le", v.pointwise_le);
        out.check("comparison", v.conclusion_holds);
    }
    if let Some((mu, ord)) = &saddle {
        out.check("non_ordinal_at_1_0", !ord.is_ordinal && (ord.integral_dul + 2.0).abs() <= 0.05);
        let inv = mather_invariance_check(&ham, &u1, 0.0, mu, 100.0, 1e-2)?;
        out.report.num("invariance_1_0.deviation", inv.deviation);
        out.check("invariance_1_0", !inv.blew_up && inv.deviation <= 1e-4);
    }
    out.finish(dir)
}
