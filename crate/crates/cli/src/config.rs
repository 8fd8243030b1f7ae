//! Run configuration: `key = value` lines grouped under `[section]` headers,
//! `#` starts a comment.
//!
//! ```text
//! [hamiltonian]
//! preset = pendulum_example
//!
//! [grid]
//! n_nodes = 512
//! ```
//!
//! A user-defined mechanical Hamiltonian `p^2/2 + V(x) + alpha(x) f(u)` is
//! given term by term, comma separated, each term one of `a`, `a cos f`,
//! `a sin f` for `a`, `a cos(2 pi f x)`, `a sin(2 pi f x)`:
//!
//! ```text
//! [hamiltonian]
//! kind = mechanical_contact
//! potential = -1, 1 cos 1
//! coupling = 1, -1 cos 1
//! u_form = affine
//! u0 = 0.5
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use contact_weakkam::ccurve::Method;
use contact_weakkam::model::{ContactHamiltonian, MechanicalContact, TorusGrid1D, TrigPoly, UForm, VelocityGrid};
use contact_weakkam::weakkam::{Discretization, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn err(line: Option<usize>, message: impl Into<String>) -> ConfigError {
    ConfigError { line, message: message.into() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HamiltonianSpec {
    Preset(String),
    Mechanical { potential: TrigPoly, coupling: TrigPoly, u_form: UForm },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub period: f64,
    pub n_nodes: usize,
    pub m_nodes: usize,
    pub v_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// `None` selects the matched step `((m_nodes - 1) / 2) h / v_max`.
    pub dt: Option<f64>,
    pub tol_fix: f64,
    pub max_iter: usize,
    pub divergence_threshold: f64,
    pub drift_tol: f64,
    pub kappa_ladder: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureConfig {
    /// `None` derives the tolerance from the Hamiltonian.
    pub eps_ordinal: Option<f64>,
    pub tol_closed: f64,
    pub lp_nodes: usize,
    pub lp_velocities: usize,
    pub lp_v_max: f64,
    /// Optimal values within this of the first count as Mather measures.
    pub tol_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub theta_min: f64,
    pub theta_max: f64,
    pub n_samples: usize,
    pub method: Method,
    pub lo_nodes: usize,
    pub lo_iters: usize,
    pub probe_c_min: f64,
    pub probe_c_max: f64,
    pub probe_bisections: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub hamiltonian: HamiltonianSpec,
    pub grid: GridConfig,
    pub solver: SolverConfig,
    pub measure: MeasureConfig,
    pub scan: ScanConfig,
    pub output_dir: PathBuf,
}

const SECTIONS: &[(&str, &[&str])] = &[
    ("hamiltonian", &["preset", "kind", "potential", "coupling", "u_form", "u0"]),
    ("grid", &["period", "n_nodes", "m_nodes", "v_max"]),
    ("solver", &["dt", "tol_fix", "max_iter", "divergence_threshold", "drift_tol", "kappa_ladder"]),
    ("measure", &["eps_ordinal", "tol_closed", "lp_nodes", "lp_velocities", "lp_v_max", "tol_value"]),
    (
        "scan",
        &[
            "theta_min",
            "theta_max",
            "n_samples",
            "method",
            "lo_nodes",
            "lo_iters",
            "probe_c_min",
            "probe_c_max",
            "probe_bisections",
        ],
    ),
    ("output", &["dir"]),
];

/// Raw `(line, value)` entries keyed by `section.key`.
struct Entries {
    map: BTreeMap<(String, String), (usize, String)>,
}

impl Entries {
    fn take(&mut self, section: &str, key: &str) -> Option<(usize, String)> {
        self.map.remove(&(section.to_string(), key.to_string()))
    }

    fn line(&self, section: &str, key: &str) -> Option<usize> {
        self.map.get(&(section.to_string(), key.to_string())).map(|e| e.0)
    }

    fn f64_or(&mut self, section: &str, key: &str, default: f64) -> Result<(f64, Option<usize>), ConfigError> {
        match self.take(section, key) {
            None => Ok((default, None)),
            Some((line, v)) => parse_f64(&v)
                .map(|x| (x, Some(line)))
                .ok_or_else(|| err(Some(line), format!("{key}: expected a number, got '{v}'"))),
        }
    }

    fn positive(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        let (x, line) = self.f64_or(section, key, default)?;
        if !(x > 0.0) {
            return Err(err(line, format!("{key} must be positive, got {x}")));
        }
        Ok(x)
    }

    fn usize_or(&mut self, section: &str, key: &str, default: usize, min: usize) -> Result<usize, ConfigError> {
        let (n, line) = match self.take(section, key) {
            None => (default, None),
            Some((line, v)) => {
                let n = v.parse::<usize>().ok().or_else(|| {
                    // Accept integral values written in float notation, e.g. 2e5.
                    parse_f64(&v).filter(|x| *x >= 0.0 && x.fract() == 0.0 && *x < 1e15).map(|x| x as usize)
                });
                match n {
                    Some(n) => (n, Some(line)),
                    None => return Err(err(Some(line), format!("{key}: expected a positive integer, got '{v}'"))),
                }
            }
        };
        if n < min {
            return Err(err(line, format!("{key} must be at least {min}, got {n}")));
        }
        Ok(n)
    }
}

fn parse_f64(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut map = BTreeMap::new();
    let mut section: Option<&str> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| err(Some(line), format!("malformed section header '{content}'")))?
                .trim();
            section = Some(
                SECTIONS
                    .iter()
                    .find(|(s, _)| *s == name)
                    .map(|(s, _)| *s)
                    .ok_or_else(|| err(Some(line), format!("unknown section [{name}]")))?,
            );
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(Some(line), format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| err(Some(line), format!("key '{key}' outside of any section")))?;
        let keys = SECTIONS.iter().find(|(s, _)| *s == sec).map(|(_, k)| *k).unwrap_or(&[]);
        if !keys.contains(&key) {
            return Err(err(Some(line), format!("unknown key '{key}' in [{sec}]")));
        }
        if value.is_empty() {
            return Err(err(Some(line), format!("{key}: missing value")));
        }
        if map.insert((sec.to_string(), key.to_string()), (line, value.to_string())).is_some() {
            return Err(err(Some(line), format!("duplicate key '{key}' in [{sec}]")));
        }
    }
    build(Entries { map })
}

fn build(mut e: Entries) -> Result<RunConfig, ConfigError> {
    let period_line = e.line("grid", "period");
    // A missing Hamiltonian is reported after the line-numbered errors.
    let ham = match hamiltonian_spec(&mut e) {
        Err(x) if x.line.is_some() => return Err(x),
        r => r,
    };
    let preset_period = ham.as_ref().ok().and_then(|h| h.1);
    let period = match (e.f64_or("grid", "period", preset_period.unwrap_or(1.0))?, preset_period) {
        ((p, line), _) if !(p > 0.0) => return Err(err(line, format!("period must be positive, got {p}"))),
        ((p, _), Some(q)) if p != q => {
            return Err(err(period_line, format!("the preset is {q}-periodic, got period = {p}")))
        }
        ((p, _), _) => p,
    };
    let m_line = e.line("grid", "m_nodes");
    let grid = GridConfig {
        period,
        n_nodes: e.usize_or("grid", "n_nodes", 512, 16)?,
        m_nodes: e.usize_or("grid", "m_nodes", 65, 3)?,
        v_max: e.positive("grid", "v_max", 4.0)?,
    };
    if grid.m_nodes % 2 == 0 {
        return Err(err(m_line, format!("m_nodes must be odd, got {}", grid.m_nodes)));
    }

    let dt_line = e.line("solver", "dt");
    let dt = match e.take("solver", "dt") {
        None => None,
        Some((line, v)) => match parse_f64(&v) {
            Some(x) if x > 0.0 => Some(x),
            _ => return Err(err(Some(line), format!("dt must be a positive number, got '{v}'"))),
        },
    };
    let kappa_ladder = match e.take("solver", "kappa_ladder") {
        None => vec![-1.0, 0.0, 0.5],
        Some((line, v)) => number_list(&v).map_err(|m| err(Some(line), format!("kappa_ladder: {m}")))?,
    };
    let solver = SolverConfig {
        dt,
        tol_fix: e.positive("solver", "tol_fix", 1e-8)?,
        max_iter: e.usize_or("solver", "max_iter", 200_000, 1)?,
        divergence_threshold: e.positive("solver", "divergence_threshold", 1e6)?,
        drift_tol: e.positive("solver", "drift_tol", 1e-3)?,
        kappa_ladder,
    };

    let eps_ordinal = match e.take("measure", "eps_ordinal") {
        None => None,
        Some((line, v)) => match parse_f64(&v) {
            Some(x) if x > 0.0 => Some(x),
            _ => return Err(err(Some(line), format!("eps_ordinal must be a positive number, got '{v}'"))),
        },
    };
    let lpv_line = e.line("measure", "lp_velocities");
    let measure = MeasureConfig {
        eps_ordinal,
        tol_closed: e.positive("measure", "tol_closed", 1e-6)?,
        lp_nodes: e.usize_or("measure", "lp_nodes", (64.0 * period).round().max(16.0) as usize, 16)?,
        lp_velocities: e.usize_or("measure", "lp_velocities", 33, 3)?,
        lp_v_max: e.positive("measure", "lp_v_max", 2.0)?,
        tol_value: e.positive("measure", "tol_value", 1e-3)?,
    };
    if measure.lp_velocities % 2 == 0 {
        return Err(err(lpv_line, format!("lp_velocities must be odd, got {}", measure.lp_velocities)));
    }

    let (theta_min, _) = e.f64_or("scan", "theta_min", -1.0)?;
    let (theta_max, tmax_line) = e.f64_or("scan", "theta_max", 2.0)?;
    if !(theta_min < theta_max) {
        return Err(err(tmax_line, format!("theta_max = {theta_max} must exceed theta_min = {theta_min}")));
    }
    let method = match e.take("scan", "method") {
        None => Method::Both,
        Some((line, v)) => v
            .parse::<Method>()
            .map_err(|_| err(Some(line), format!("method must be lp, laxoleinik or both, got '{v}'")))?,
    };
    let (probe_c_min, _) = e.f64_or("scan", "probe_c_min", -1.0)?;
    let (probe_c_max, pmax_line) = e.f64_or("scan", "probe_c_max", 1.0)?;
    if !(probe_c_min < probe_c_max) {
        return Err(err(pmax_line, "probe_c_max must exceed probe_c_min"));
    }
    let scan = ScanConfig {
        theta_min,
        theta_max,
        n_samples: e.usize_or("scan", "n_samples", 31, 5)?,
        method,
        lo_nodes: e.usize_or("scan", "lo_nodes", (128.0 * period).round().max(16.0) as usize, 16)?,
        lo_iters: e.usize_or("scan", "lo_iters", 2000, 8)?,
        probe_c_min,
        probe_c_max,
        probe_bisections: e.usize_or("scan", "probe_bisections", 10, 0)?,
    };

    let output_dir = e.take("output", "dir").map(|(_, v)| PathBuf::from(v)).unwrap_or_else(|| PathBuf::from("out"));

    let (hamiltonian, _) = ham?;
    let cfg = RunConfig { hamiltonian, grid, solver, measure, scan, output_dir };
    // Every key is consumed above; anything left over would be a bug here.
    debug_assert!(e.map.is_empty());
    cfg.discretization().map_err(|m| err(dt_line, m))?;
    cfg.hamiltonian().map_err(|m| err(None, m))?;
    Ok(cfg)
}

fn hamiltonian_spec(e: &mut Entries) -> Result<(HamiltonianSpec, Option<f64>), ConfigError> {
    let preset = e.take("hamiltonian", "preset");
    let kind = e.take("hamiltonian", "kind");
    let coeffs: Vec<_> =
        ["potential", "coupling", "u_form", "u0"].iter().map(|k| (*k, e.take("hamiltonian", k))).collect();
    if let Some((line, name)) = preset {
        if let Some((l, _)) = kind.as_ref().or_else(|| coeffs.iter().find_map(|(_, v)| v.as_ref())) {
            return Err(err(Some(*l), format!("preset = {name} (line {line}) excludes coefficient keys")));
        }
        let ham = ContactHamiltonian::preset(&name).ok_or_else(|| {
            err(
                Some(line),
                format!("unknown preset '{name}' (known: {})", contact_weakkam::model::hamiltonian::PRESETS.join(", ")),
            )
        })?;
        return Ok((HamiltonianSpec::Preset(name), Some(ham.period())));
    }
    match kind {
        Some((line, k)) if k != "mechanical_contact" => {
            return Err(err(Some(line), format!("unknown kind '{k}' (known: mechanical_contact)")))
        }
        None if coeffs.iter().all(|(_, v)| v.is_none()) => {
            return Err(err(None, "[hamiltonian] needs a preset or kind = mechanical_contact"))
        }
        _ => {}
    }
    let get = |name: &str| coeffs.iter().find(|(k, _)| *k == name).and_then(|(_, v)| v.clone());
    let poly = |name: &str| -> Result<TrigPoly, ConfigError> {
        match get(name) {
            None => Ok(TrigPoly::zero()),
            Some((line, v)) => trig_poly(&v).map_err(|m| err(Some(line), format!("{name}: {m}"))),
        }
    };
    let potential = poly("potential")?;
    let coupling = poly("coupling")?;
    let u0 = match get("u0") {
        None => None,
        Some((line, v)) => {
            Some(parse_f64(&v).ok_or_else(|| err(Some(line), format!("u0: expected a number, got '{v}'")))?)
        }
    };
    let u_form = match get("u_form") {
        None => match u0 {
            None => UForm::Linear,
            Some(_) => return Err(err(get("u0").map(|e| e.0), "u0 requires u_form = affine")),
        },
        Some((line, v)) => match (v.as_str(), u0) {
            ("linear", None) => UForm::Linear,
            ("affine", Some(u0)) => UForm::Affine { u0 },
            ("affine", None) => return Err(err(Some(line), "u_form = affine requires u0")),
            ("linear", Some(_)) => return Err(err(Some(line), "u0 requires u_form = affine")),
            _ => return Err(err(Some(line), format!("u_form must be linear or affine, got '{v}'"))),
        },
    };
    Ok((HamiltonianSpec::Mechanical { potential, coupling, u_form }, None))
}

fn number_list(s: &str) -> Result<Vec<f64>, String> {
    let v: Option<Vec<f64>> = s.split(',').map(|t| parse_f64(t.trim())).collect();
    match v {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("expected comma separated numbers, got '{s}'")),
    }
}

/// Parses `a, a cos f, a sin f, ...`.
fn trig_poly(s: &str) -> Result<TrigPoly, String> {
    let mut p = TrigPoly::zero();
    for term in s.split(',') {
        let words: Vec<&str> = term.split_whitespace().collect();
        let num = |w: &str| parse_f64(w).ok_or_else(|| format!("expected a number, got '{w}'"));
        match words.as_slice() {
            [a] => p.constant += num(a)?,
            [a, "cos", f] => p = p.with_term(num(f)?, num(a)?, 0.0),
            [a, "sin", f] => p = p.with_term(num(f)?, 0.0, num(a)?),
            _ => return Err(format!("bad term '{}': use 'a', 'a cos f' or 'a sin f'", term.trim())),
        }
    }
    Ok(p)
}

impl RunConfig {
    pub fn hamiltonian(&self) -> Result<ContactHamiltonian, String> {
        match &self.hamiltonian {
            HamiltonianSpec::Preset(name) => {
                ContactHamiltonian::preset(name).ok_or_else(|| format!("unknown preset '{name}'"))
            }
            HamiltonianSpec::Mechanical { potential, coupling, u_form } => {
                MechanicalContact::new(self.grid.period, potential.clone().into(), coupling.clone().into(), *u_form)
                    .map(ContactHamiltonian::Mechanical)
                    .map_err(|e| e.to_string())
            }
        }
    }

    pub fn torus(&self) -> Result<TorusGrid1D, String> {
        TorusGrid1D::new(self.grid.period, self.grid.n_nodes).map_err(|e| e.to_string())
    }

    pub fn discretization(&self) -> Result<Discretization, String> {
        let g = self.torus()?;
        let vg = VelocityGrid::new(self.grid.v_max, self.grid.m_nodes).map_err(|e| e.to_string())?;
        match self.solver.dt {
            None => Ok(Discretization::matched(g, vg)),
            Some(dt) => {
                let d = Discretization::new(g, vg, dt).map_err(|e| e.to_string())?;
                if d.reach() == 0 {
                    return Err(format!("dt * v_max = {} is below the grid spacing {}", dt * vg.v_max(), g.h()));
                }
                Ok(d)
            }
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol_fix: self.solver.tol_fix,
            max_iter: self.solver.max_iter,
            divergence_threshold: self.solver.divergence_threshold,
            drift_tol: self.solver.drift_tol,
            ..SolveOptions::default()
        }
    }

    pub fn lp_grids(&self) -> Result<(TorusGrid1D, VelocityGrid), String> {
        let g = TorusGrid1D::new(self.grid.period, self.measure.lp_nodes).map_err(|e| e.to_string())?;
        let vg = VelocityGrid::new(self.measure.lp_v_max, self.measure.lp_velocities).map_err(|e| e.to_string())?;
        Ok((g, vg))
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        parse_config("[hamiltonian]\npreset = pendulum_example\n").expect("default config is valid")
    }
}
