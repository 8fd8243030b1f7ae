use std::fs;
use std::path::Path;
use std::process::Command;

use contact_weakkam::model::ContactHamiltonian;
use contact_weakkam::model::TorusGrid1D;
use contact_weakkam::weakkam::{residual, GridFunction};
use contact_weakkam_cli::fixtures::u_lambda;
use contact_weakkam_cli::io::{read_report, write_solution};

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_contact-weakkam")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn report_value(dir: &Path, key: &str) -> String {
    read_report(&dir.join("report.txt"))
        .unwrap()
        .into_iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("{key} missing"))
        .1
}

#[test]
fn examples_pass() {
    for name in ["fig1", "fig2"] {
        let dir = tempfile::tempdir().unwrap();
        let (code, err) = run(&["example", "--name", name, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code, 0, "{name}: {err}");
        assert_eq!(report_value(dir.path(), "checks_failed"), "0");
    }
}

#[test]
fn divergence_is_a_finding() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["solve", "--c", "-1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(report_value(dir.path(), "status"), "diverged");
    let drift: f64 = report_value(dir.path(), "drift_rate").parse().unwrap();
    assert!(drift < 0.0);
    assert!(dir.path().join("solution.csv").exists());
}

#[test]
fn usage_and_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["solve", "--out", out]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["example", "--name", "fig3", "--out", out]).0, 1);
    assert_eq!(run(&["solve", "--c", "0", "--init", "zero", "--out", out]).0, 1);
    assert_eq!(run(&["flow", "--start", "0.1,0.2", "--time", "1", "--out", out]).0, 1);
    let cfg = dir.path().join("bad.cfg");
    fs::write(&cfg, "[hamiltonian]\npreset = pendulum_example\n[grid]\nn_nodes = -4\n").unwrap();
    let (code, err) = run(&["--config", cfg.to_str().unwrap(), "solve", "--c", "0", "--out", out]);
    assert_eq!(code, 1);
    assert!(err.contains("line 4"), "{err}");
    assert_eq!(run(&["--config", "/nonexistent/cfg", "solve", "--c", "0"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn failed_comparison_exits_with_2() {
    // u1 agrees with u2 at the rest point but exceeds it elsewhere: the
    // hypothesis holds on the ordinal measure while the conclusion fails.
    let dir = tempfile::tempdir().unwrap();
    let g = TorusGrid1D::new(1.0, 256).unwrap();
    let h = ContactHamiltonian::pendulum_example();
    let u2 = GridFunction::from_fn(g, |x| u_lambda(x, 0.0));
    let u1 = GridFunction::from_fn(g, |x| u_lambda(x, 0.0) + (std::f64::consts::PI * x).sin().powi(2));
    for (name, u) in [("u1.csv", &u1), ("u2.csv", &u2)] {
        write_solution(&dir.path().join(name), u, &residual(&h, u, 0.0).unwrap()).unwrap();
    }
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let out = p("out");
    let (code, err) = run(&["compare", "--u1", &p("u1.csv"), "--u2", &p("u2.csv"), "--theta", "0", "--out", &out]);
    assert_eq!(code, 2, "{err}");
    assert_eq!(report_value(Path::new(&out), "hypothesis_holds"), "true");
    assert_eq!(report_value(Path::new(&out), "conclusion_holds"), "false");
    let (code, _) = run(&["compare", "--u1", &p("u2.csv"), "--u2", &p("u1.csv"), "--theta", "0", "--out", &out]);
    assert_eq!(code, 0);
}

/// Every file of `a` equals its namesake in `b`; `report.txt` up to its
/// timestamp line.
fn same_outputs(a: &Path, b: &Path) {
    let mut names: Vec<_> = fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() > 1);
    for n in names {
        let (x, y) = (fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap());
        if n == "report.txt" {
            let strip = |v: &[u8]| String::from_utf8_lossy(v).lines().skip(1).collect::<Vec<_>>().join("\n");
            assert_eq!(strip(&x), strip(&y));
        } else {
            assert!(x == y, "{n:?} differs");
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = d.path().to_str().unwrap();
        assert_eq!(run(&["--seed", "3", "solve", "--c", "0", "--ladder", "--out", out]).0, 0);
    }
    same_outputs(a.path(), b.path());
}

#[test]
fn thread_cap_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let run_with = |threads: &str, out: &Path| {
        let st = Command::new(env!("CARGO_BIN_EXE_contact-weakkam"))
            .env("CONTACT_WEAKKAM_THREADS", threads)
            .args(["mather", "--theta", "0.5", "--enumerate", "2", "--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
    };
    run_with("1", a.path());
    run_with("4", b.path());
    same_outputs(a.path(), b.path());
}

#[test]
fn flow_and_scan_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["flow", "--start", "0.3,0,0.5", "--time", "2", "--out", out]).0, 0);
    let text = fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "t,x,p_or_v,u,H,multiplier");
    assert_eq!(text.lines().count(), 2002);
    assert_eq!(run(&["flow", "--side", "lagrangian", "--start", "0.3,0,0.5", "--time", "2", "--out", out]).0, 0);

    let cfg = dir.path().join("scan.cfg");
    fs::write(&cfg, "[hamiltonian]\npreset = discounted_free\n[scan]\nn_samples = 7\nmethod = lp\n").unwrap();
    let (code, err) = run(&["--config", cfg.to_str().unwrap(), "scan-c", "--out", out]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(report_value(dir.path(), "shape"), "line");
    let scan = fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    assert_eq!(scan.lines().count(), 8);
}
