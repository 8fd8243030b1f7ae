//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit status
//! when any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use contact_weakkam::ccurve::{scan, verify_h4, CCurveSample, H4Tolerances, Method, ScanSettings, Verdict};
use contact_weakkam::flows::{mather_invariance_check, step_defect, PhasePoint, Side};
use contact_weakkam::measures::{
    closed_measure_lp, compare_with_measures, enumerate_mather_measures, ordinal_classify, DiscreteMeasure, UArg,
    MASS_TOL,
};
use contact_weakkam::model::lagrangian::fenchel_max;
use contact_weakkam::model::{ContactHamiltonian, LagrangianView, TorusGrid1D, VelocityGrid};
use contact_weakkam::weakkam::{frozen_critical_value, residual, Coupling, Discretization, GridFunction, LaxOleinik};
use contact_weakkam_cli::fixtures::{g_branch, Branch};
use contact_weakkam_cli::pipelines::legendre_conjugacy;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn torus(period: f64, n: usize) -> TorusGrid1D {
    TorusGrid1D::new(period, n).unwrap()
}

fn vgrid(v_max: f64, m: usize) -> VelocityGrid {
    VelocityGrid::new(v_max, m).unwrap()
}

/// Closed form of the pendulum family, written out independently of the
/// library fixture.
fn family(n: usize, lambda: f64) -> GridFunction {
    GridFunction::from_fn(torus(1.0, n), |x| {
        let c = (PI * x).cos() / PI;
        if x < 0.5 {
            1.0 - (c + lambda) * (c + lambda)
        } else {
            1.0 - (lambda - c) * (lambda - c)
        }
    })
}

/// `max_x (1 - theta)(cos 2 pi x - 1)` on a fine sample of the circle.
fn frozen_potential_max(theta: f64) -> f64 {
    (0..4096).map(|i| (1.0 - theta) * ((2.0 * PI * i as f64 / 4096.0).cos() - 1.0)).fold(f64::NEG_INFINITY, f64::max)
}

fn critical_value(measures: &mut Vec<DiscreteMeasure>) -> Outcome {
    let h = ContactHamiltonian::pendulum_example();
    let t = Instant::now();
    let lo =
        frozen_critical_value(&h, 0.0, Discretization::matched(torus(1.0, 128), vgrid(4.0, 33)), 2000).map_err(e2s)?;
    let t_lo = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let view = LagrangianView::new(&h, 2.0, 33);
    let lp = closed_measure_lp(&view, 0.0, torus(1.0, 64), vgrid(2.0, 33)).map_err(e2s)?;
    let t_lp = t.elapsed().as_secs_f64();
    measures.push(lp.measure.clone());
    ensure(lo.abs() <= 5e-3, || format!("frozen c(0) = {lo}"))?;
    ensure(lp.critical_value.abs() <= 1e-2, || format!("LP c(0) = {}", lp.critical_value))?;
    ensure(t_lo < 30.0 && t_lp < 30.0, || format!("runtimes {t_lo:.2}s, {t_lp:.2}s"))?;
    Ok(format!("lax-oleinik {lo:.2e} in {t_lo:.2}s, lp {:.2e} in {t_lp:.2}s", lp.critical_value))
}

fn scan_pendulum() -> Vec<CCurveSample> {
    let h = ContactHamiltonian::pendulum_example();
    let settings = ScanSettings {
        method: Method::Both,
        lp_grid: torus(1.0, 64),
        lp_vgrid: vgrid(2.0, 33),
        lo_disc: Discretization::matched(torus(1.0, 128), vgrid(4.0, 33)),
        lo_iters: 2000,
        eps_ordinal: 1e-3,
        tol_face: 1e-6,
        gap_tol: 2e-2,
    };
    scan(&h, -1.0, 2.0, 31, &settings).unwrap()
}

fn c_curve(samples: &[CCurveSample], measures: &mut Vec<DiscreteMeasure>) -> Outcome {
    measures.extend(samples.iter().filter_map(|s| s.measure.clone()));
    ensure(samples.len() == 31 && samples.iter().all(|s| s.is_ok()), || "failed samples".into())?;
    let mut worst = 0.0f64;
    for s in samples {
        let exact = (2.0 * (s.theta - 1.0)).max(0.0);
        let oracle = frozen_potential_max(s.theta);
        ensure((oracle - exact).abs() <= 1e-6, || format!("oracle disagrees with closed form at {}", s.theta))?;
        worst = worst.max((s.c - exact).abs());
    }
    ensure(worst <= 1e-2, || format!("max error {worst}"))?;
    for w in samples.windows(3) {
        ensure(w[1].c >= w[0].c - 1e-9, || format!("not monotone at {}", w[1].theta))?;
        ensure(w[1].c <= 0.5 * (w[0].c + w[2].c) + 1e-6, || format!("not midpoint convex at {}", w[1].theta))?;
    }
    Ok(format!("max error {worst:.2e} over 31 samples, monotone, midpoint convex"))
}

fn h4_items(samples: &[CCurveSample]) -> Outcome {
    let h = ContactHamiltonian::pendulum_example();
    let view = LagrangianView::new(&h, 2.0, 33);
    let report = verify_h4(samples, &view, &H4Tolerances::default());
    let at = |theta: f64| samples.iter().find(|s| (s.theta - theta).abs() < 1e-9).unwrap();
    let s = at(1.5);
    for slope in [s.slope_left, s.slope_right] {
        let slope = slope.ok_or("missing slope at 1.5")?;
        ensure((slope - s.integral_duh).abs() <= 5e-2, || format!("slope {slope} vs integral {}", s.integral_duh))?;
        ensure((slope - 2.0).abs() <= 5e-2, || format!("slope {slope} at 1.5"))?;
    }
    ensure((s.integral_duh - 2.0).abs() <= 5e-2, || format!("integral {} at 1.5", s.integral_duh))?;
    ensure(report.at(4, s.theta).map(|c| c.verdict) == Some(Verdict::Pass), || "item 4 verdict at 1.5".into())?;
    let z = at(0.0);
    let left = z.slope_left.ok_or("missing left slope at 0")?;
    ensure(left.abs() <= 5e-2 && z.ordinal_nonempty, || format!("slope_left {left}, ordinal {}", z.ordinal_nonempty))?;
    ensure(report.at(2, z.theta).map(|c| c.verdict) == Some(Verdict::Pass), || "item 2 verdict at 0".into())?;
    Ok(format!(
        "slope at 1.5 = {:.3}, integral = {:.3}; slope_left at 0 = {left:.2e}",
        s.slope_left.unwrap(),
        s.integral_duh
    ))
}

fn example1_family(measures: &mut Vec<DiscreteMeasure>) -> Outcome {
    let h = ContactHamiltonian::pendulum_example();
    let lambdas = [0.0, 0.25, 0.5, 1.0];
    let us: Vec<GridFunction> = lambdas.iter().map(|&l| family(512, l)).collect();
    let mut worst = 0.0f64;
    for (l, u) in lambdas.iter().zip(&us) {
        let r = residual(&h, u, 0.0).map_err(e2s)?;
        ensure(r.sup_excluding_kinks <= 0.05, || format!("residual {} at lambda {l}", r.sup_excluding_kinks))?;
        worst = worst.max(r.sup_excluding_kinks);
    }
    let delta = DiscreteMeasure::dirac(torus(1.0, 64), vgrid(2.0, 33), 0.0, 0.0).map_err(e2s)?;
    measures.push(delta.clone());
    for a in 0..4 {
        for b in 0..a {
            let le = us[a].values().iter().zip(us[b].values()).all(|(x, y)| x <= y);
            ensure(le, || format!("u_{} > u_{} somewhere", lambdas[a], lambdas[b]))?;
            let v = compare_with_measures(&us[a], &us[b], std::slice::from_ref(&delta), 1e-9).map_err(e2s)?;
            ensure(v.hypothesis_holds && v.conclusion_holds, || {
                format!("verdict for ({}, {})", lambdas[a], lambdas[b])
            })?;
        }
    }
    Ok(format!("max residual {worst:.2e}, ordering and 6 comparisons hold"))
}

fn mather_concentration(measures: &mut Vec<DiscreteMeasure>) -> Outcome {
    let h = ContactHamiltonian::pendulum_example();
    let view = LagrangianView::new(&h, 2.0, 33);
    let lp = closed_measure_lp(&view, 0.0, torus(1.0, 64), vgrid(2.0, 33)).map_err(e2s)?;
    let mass = lp.measure.mass_near(0.0, 0.0, 1);
    let ord = ordinal_classify(&lp.measure, &view, UArg::Constant(0.0), 1e-2).map_err(e2s)?;
    measures.push(lp.measure);
    ensure(mass >= 0.99, || format!("mass near (0,0) = {mass}"))?;
    ensure(ord.integral_dul.abs() <= 1e-2, || format!("integral {}", ord.integral_dul))?;
    Ok(format!("mass near (0,0) = {mass:.4}, integral = {:.2e}", ord.integral_dul))
}

fn example2(measures: &mut Vec<DiscreteMeasure>) -> Outcome {
    let h = ContactHamiltonian::piecewise_example();
    let g = torus(2.0, 1024);
    let u1 = g_branch(Branch::Plus, 1e-4).and_then(|b| b.assemble(g)).map_err(e2s)?;
    let u2 = g_branch(Branch::Minus, 1e-4).and_then(|b| b.assemble(g)).map_err(e2s)?;
    let mut worst = 0.0f64;
    for u in [&u1, &u2] {
        let r = residual(&h, u, 0.0).map_err(e2s)?;
        worst = worst.max(r.sup_excluding_kinks);
    }
    ensure(worst <= 0.05, || format!("residual {worst}"))?;
    let dist = u1.sup_dist(&u2).map_err(e2s)?;
    ensure(dist > 0.1, || format!("sup distance {dist}"))?;
    let view = LagrangianView::new(&h, 2.0, 33);
    let found = enumerate_mather_measures(&view, 0.0, torus(2.0, 128), vgrid(2.0, 33), 4, 1e-3).map_err(e2s)?;
    let mut rest = None;
    let mut saddle = None;
    for sol in &found {
        measures.push(sol.measure.clone());
        let ord = ordinal_classify(&sol.measure, &view, UArg::Constant(0.0), 1e-2).map_err(e2s)?;
        if sol.measure.mass_near(0.0, 0.0, 1) >= 0.99 {
            rest = Some(ord);
        } else if sol.measure.mass_near(1.0, 0.0, 1) >= 0.99 {
            saddle = Some(ord);
        }
    }
    let rest = rest.ok_or("no measure near (0,0)")?;
    let saddle = saddle.ok_or("no measure near (1,0)")?;
    ensure(rest.is_ordinal, || format!("(0,0) integral {}", rest.integral_dul))?;
    ensure(!saddle.is_ordinal && (saddle.integral_dul + 2.0).abs() <= 0.05, || {
        format!("(1,0) integral {}", saddle.integral_dul)
    })?;
    Ok(format!(
        "residual {worst:.2e}, distance {dist:.3}, {} measures, (1,0) integral {:.3}",
        found.len(),
        saddle.integral_dul
    ))
}

fn flow_invariance(measures: &mut Vec<DiscreteMeasure>) -> Outcome {
    let pend = ContactHamiltonian::pendulum_example();
    let d00 = DiscreteMeasure::dirac(torus(1.0, 64), vgrid(2.0, 33), 0.0, 0.0).map_err(e2s)?;
    let r0 = mather_invariance_check(&pend, &family(512, 0.0), 0.0, &d00, 100.0, 1e-2).map_err(e2s)?;
    ensure(!r0.blew_up && r0.deviation <= 1e-6, || format!("(0,0) deviation {}", r0.deviation))?;

    let pw = ContactHamiltonian::piecewise_example();
    let u1 = g_branch(Branch::Plus, 1e-4).and_then(|b| b.assemble(torus(2.0, 1024))).map_err(e2s)?;
    let d10 = DiscreteMeasure::dirac(torus(2.0, 128), vgrid(2.0, 33), 1.0, 0.0).map_err(e2s)?;
    let r1 = mather_invariance_check(&pw, &u1, 0.0, &d10, 100.0, 1e-2).map_err(e2s)?;
    ensure(!r1.blew_up && r1.deviation <= 1e-4, || format!("(1,0) deviation {}", r1.deviation))?;
    measures.extend([d00, d10]);

    let conj = legendre_conjugacy(&pend, 2024, 20, 10.0, 1e-3).map_err(e2s)?;
    ensure(conj <= 1e-6, || format!("conjugacy gap {conj}"))?;
    Ok(format!("deviations {:.1e} and {:.1e}, conjugacy gap {conj:.1e}", r0.deviation, r1.deviation))
}

fn presets() -> Vec<ContactHamiltonian> {
    ["pendulum_example", "piecewise_example", "classical_pendulum", "free_particle", "discounted_free"]
        .iter()
        .map(|n| ContactHamiltonian::preset(n).unwrap())
        .collect()
}

fn check_measure(mu: &DiscreteMeasure) -> Result<(), String> {
    let total: f64 = mu.masses().iter().sum();
    ensure(mu.masses().iter().all(|&m| m >= 0.0), || "negative mass".into())?;
    ensure((total - 1.0).abs() <= MASS_TOL, || format!("total mass {total}"))?;
    ensure(mu.closedness_residual() <= mu.tol_closed(), || format!("closedness {}", mu.closedness_residual()))
}

fn run_example(name: &str, out: &Path) -> Result<(), String> {
    let st = Command::new(env!("CARGO_BIN_EXE_contact-weakkam"))
        .args(["example", "--name", name, "--out", out.to_str().unwrap()])
        .status()
        .map_err(e2s)?;
    ensure(st.success(), || format!("example {name} exited with {st}"))
}

fn same_outputs(a: &Path, b: &Path) -> Result<usize, String> {
    let mut names: Vec<_> = fs::read_dir(a).map_err(e2s)?.map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for n in &names {
        let (x, y) = (fs::read(a.join(n)).map_err(e2s)?, fs::read(b.join(n)).map_err(e2s)?);
        let same = if n == "report.txt" {
            let strip = |v: &[u8]| String::from_utf8_lossy(v).lines().skip(1).map(String::from).collect::<Vec<_>>();
            strip(&x) == strip(&y)
        } else {
            x == y
        };
        ensure(same, || format!("{n:?} differs between reruns"))?;
    }
    Ok(names.len())
}

fn properties(measures: &[DiscreteMeasure]) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let hams = presets();

    for pair in 0..100 {
        let h = &hams[pair % hams.len()];
        let g = torus(h.period(), 64);
        let op = LaxOleinik::new(h, Discretization::matched(g, vgrid(2.0, 9)), Coupling::Contact).map_err(e2s)?;
        let a: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = a.iter().map(|x| x + rng.gen_range(0.0..0.5)).collect();
        let c = rng.gen_range(-1.0..1.0);
        let ta = op.step(&GridFunction::new(g, a).map_err(e2s)?, c).map_err(e2s)?.values;
        let tb = op.step(&GridFunction::new(g, b).map_err(e2s)?, c).map_err(e2s)?.values;
        ensure(ta.values().iter().zip(tb.values()).all(|(x, y)| x <= y), || format!("monotonicity, pair {pair}"))?;
    }

    let mut fenchel = 0.0f64;
    for k in 0..1000 {
        let h = &hams[k % hams.len()];
        let view = LagrangianView::new(h, 4.0, 65);
        let (x, p, u) = (rng.gen_range(0.0..h.period()), rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0));
        let (_, hh) = fenchel_max(|v| Ok(p * v - view.value(x, v, u)?), 8.0, 260).map_err(e2s)?;
        fenchel = fenchel.max((hh - h.value(x, p, u).map_err(e2s)?).abs());
    }
    ensure(fenchel <= 1e-6, || format!("Fenchel involution gap {fenchel}"))?;

    for mu in measures {
        check_measure(mu)?;
    }

    let mut worst_ratio = f64::INFINITY;
    for h in [ContactHamiltonian::pendulum_example(), ContactHamiltonian::classical_pendulum()] {
        for _ in 0..10 {
            let s = PhasePoint::new(rng.gen_range(0.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for side in [Side::Hamiltonian, Side::Lagrangian] {
                let coarse = step_defect(&h, 0.0, side, &s, 1e-1).map_err(e2s)?;
                let fine = step_defect(&h, 0.0, side, &s, 5e-2).map_err(e2s)?;
                if coarse > 1e-13 {
                    worst_ratio = worst_ratio.min(coarse / fine);
                }
            }
        }
    }
    ensure(worst_ratio >= 8.0, || format!("RK4 defect ratio {worst_ratio}"))?;

    let tmp = std::env::temp_dir().join(format!("contact-weakkam-acceptance-{}", std::process::id()));
    let mut files = 0;
    for name in ["fig1", "fig2"] {
        let (a, b) = (tmp.join(format!("{name}-a")), tmp.join(format!("{name}-b")));
        run_example(name, &a)?;
        run_example(name, &b)?;
        files += same_outputs(&a, &b)?;
    }
    let _ = fs::remove_dir_all(&tmp);
    Ok(format!(
        "100 monotone pairs, Fenchel gap {fenchel:.1e}, {} measures valid, RK4 ratio >= {worst_ratio:.1}, {files} files identical on rerun",
        measures.len()
    ))
}

fn main() -> ExitCode {
    let mut measures = Vec::new();
    let samples = scan_pendulum();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 critical value", critical_value(&mut measures)),
        ("2 c(theta) curve", c_curve(&samples, &mut measures)),
        ("3 slopes and integrals", h4_items(&samples)),
        ("4 example 1 family", example1_family(&mut measures)),
        ("5 Mather measure concentration", mather_concentration(&mut measures)),
        ("6 example 2", example2(&mut measures)),
        ("7 flow invariance", flow_invariance(&mut measures)),
    ];
    results.push(("8 property suites", properties(&measures)));
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
