use contact_weakkam::ccurve::Method;
use contact_weakkam::model::{ContactHamiltonian, UForm};
use contact_weakkam_cli::config::HamiltonianSpec;
use contact_weakkam_cli::parse_config;

fn line_of(text: &str) -> Option<usize> {
    parse_config(text).unwrap_err().line
}

#[test]
fn preset_with_defaults() {
    let cfg = parse_config("[hamiltonian]\npreset = pendulum_example\n").unwrap();
    assert_eq!(cfg.hamiltonian, HamiltonianSpec::Preset("pendulum_example".into()));
    assert_eq!((cfg.grid.n_nodes, cfg.grid.m_nodes, cfg.grid.v_max), (512, 65, 4.0));
    assert_eq!(cfg.grid.period, 1.0);
    assert_eq!(cfg.solver.dt, None);
    assert_eq!(cfg.solver.tol_fix, 1e-8);
    assert_eq!(cfg.solver.max_iter, 200_000);
    assert_eq!(cfg.scan.method, Method::Both);
    assert_eq!((cfg.scan.theta_min, cfg.scan.theta_max, cfg.scan.n_samples), (-1.0, 2.0, 31));
    let d = cfg.discretization().unwrap();
    assert_eq!(d.dt, 1.0 / 64.0);
    assert_eq!(d.reach(), 32);
}

#[test]
fn negative_node_count_names_its_line() {
    let text = "# grid only\n[hamiltonian]\npreset = pendulum_example\n\n[grid]\nn_nodes = -4\n";
    assert_eq!(line_of(text), Some(6));
}

#[test]
fn piecewise_preset_is_two_periodic() {
    let ok = parse_config("[hamiltonian]\npreset = piecewise_example\n[grid]\nperiod = 2\n").unwrap();
    assert_eq!(ok.grid.period, 2.0);
    let implied = parse_config("[hamiltonian]\npreset = piecewise_example\n").unwrap();
    assert_eq!(implied.grid.period, 2.0);
    assert_eq!(line_of("[hamiltonian]\npreset = piecewise_example\n[grid]\nperiod = 1\n"), Some(4));
}

#[test]
fn typos_are_errors() {
    assert_eq!(line_of("[hamiltonian]\npreset = pendulum_example\n[grid]\nn_node = 64\n"), Some(4));
    assert_eq!(line_of("[hamiltonian]\npreset = pendulum_example\n[grids]\n"), Some(3));
    assert_eq!(line_of("[hamiltonian]\npreset = pendulum\n"), Some(2));
    assert_eq!(line_of("preset = pendulum_example\n"), Some(1));
    assert_eq!(line_of("[hamiltonian]\npreset = pendulum_example\npreset = free_particle\n"), Some(3));
    assert_eq!(line_of("[hamiltonian]\npreset pendulum_example\n"), Some(2));
}

#[test]
fn constraint_violations() {
    let base = "[hamiltonian]\npreset = pendulum_example\n";
    for (extra, line) in [
        ("[grid]\nm_nodes = 64\n", 4),
        ("[grid]\nv_max = 0\n", 4),
        ("[grid]\nv_max = abc\n", 4),
        ("[solver]\ntol_fix = -1e-8\n", 4),
        ("[solver]\ndt = 0\n", 4),
        ("[scan]\ntheta_min = 2\ntheta_max = 1\n", 5),
        ("[scan]\nmethod = simplex\n", 4),
        ("[scan]\nn_samples = 3\n", 4),
        ("[measure]\neps_ordinal = 0\n", 4),
        ("[solver]\nkappa_ladder = 0, x\n", 4),
    ] {
        assert_eq!(line_of(&format!("{base}{extra}")), Some(line), "{extra}");
    }
    // A time step too small to reach the next node.
    assert!(parse_config(&format!("{base}[solver]\ndt = 1e-6\n")).is_err());
    assert!(parse_config("[grid]\nn_nodes = 64\n").is_err());
}

#[test]
fn mechanical_coefficients() {
    let text = "[hamiltonian]\nkind = mechanical_contact\npotential = -1, 1 cos 1\ncoupling = 1, -1 cos 1\n[solver]\nmax_iter = 2e5\n";
    let cfg = parse_config(text).unwrap();
    assert_eq!(cfg.solver.max_iter, 200_000);
    let h = cfg.hamiltonian().unwrap();
    let p = ContactHamiltonian::pendulum_example();
    for k in 0..50 {
        let (x, q, u) = (k as f64 / 50.0, 0.1 * k as f64 - 2.0, 0.03 * k as f64 - 0.7);
        assert!((h.value(x, q, u).unwrap() - p.value(x, q, u).unwrap()).abs() <= 1e-14);
    }

    let affine =
        parse_config("[hamiltonian]\nkind = mechanical_contact\ncoupling = 1\nu_form = affine\nu0 = 0.5\n").unwrap();
    match affine.hamiltonian().unwrap() {
        ContactHamiltonian::Mechanical(m) => assert_eq!(m.u_form, UForm::Affine { u0: 0.5 }),
        other => panic!("{other:?}"),
    }
    assert_eq!(line_of("[hamiltonian]\nkind = mechanical_contact\nu_form = affine\n"), Some(3));
    assert_eq!(line_of("[hamiltonian]\nkind = mechanical_contact\npotential = 1 tan 1\n"), Some(3));
    assert_eq!(line_of("[hamiltonian]\npreset = free_particle\ncoupling = 1\n"), Some(3));
    // Frequency 1/2 is not periodic on the unit circle.
    assert!(parse_config("[hamiltonian]\nkind = mechanical_contact\npotential = 1 cos 0.5\n").is_err());
    assert!(
        parse_config("[hamiltonian]\nkind = mechanical_contact\npotential = 1 cos 0.5\n[grid]\nperiod = 2\n").is_ok()
    );
}

#[test]
fn comments_and_output() {
    let cfg =
        parse_config("[hamiltonian] # the model\npreset = free_particle # H = p^2/2\n[output]\ndir = results/run1\n")
            .unwrap();
    assert_eq!(cfg.output_dir, std::path::PathBuf::from("results/run1"));
}
