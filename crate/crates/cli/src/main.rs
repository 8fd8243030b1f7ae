use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use contact_weakkam::flows::{PhasePoint, Side};
use contact_weakkam_cli::pipelines::{self, FlowArgs, Init, MatherArgs};
use contact_weakkam_cli::{parse_config, Outcome, RunConfig};

/// Weak KAM solvers for contact Hamilton-Jacobi equations on the circle.
///
/// Exit status: 0 on success, 2 when a checked property fails, 1 on usage
/// or configuration errors. `CONTACT_WEAKKAM_THREADS` caps the worker count.
#[derive(Parser)]
#[command(name = "contact-weakkam", version)]
struct Cli {
    /// Configuration file; defaults to the pendulum preset.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, overriding `[output] dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized test points.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve H(x, u', u) = c by Lax-Oleinik iteration.
    Solve {
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        /// `const:K` or `file:PATH`.
        #[arg(long, default_value = "const:0")]
        init: Init,
        /// Also solve from every constant of `kappa_ladder`.
        #[arg(long)]
        ladder: bool,
    },
    /// Scan theta -> c(theta) over the `[scan]` range.
    ScanC,
    /// Mather measures of the Hamiltonian frozen at theta.
    Mather {
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
        #[arg(long, default_value_t = 1)]
        enumerate: usize,
        /// Solution used to lift the measures for the invariance check.
        #[arg(long)]
        u: Option<PathBuf>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        /// Flow time of the invariance check.
        #[arg(long, default_value_t = 100.0)]
        time: f64,
    },
    /// Compare two solutions through the ordinal Mather measures at theta.
    Compare {
        #[arg(long)]
        u1: PathBuf,
        #[arg(long)]
        u2: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        theta: f64,
    },
    /// Integrate the contact Hamilton (or Euler-Lagrange) flow.
    Flow {
        /// `x,p,u` (`x,v,u` on the Lagrangian side).
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long)]
        time: f64,
        #[arg(long, value_enum, default_value_t = FlowSide::Hamiltonian)]
        side: FlowSide,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
    },
    /// Reproduce a worked example.
    Example {
        #[arg(long, value_parser = ["fig1", "fig2"])]
        name: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FlowSide {
    Hamiltonian,
    Lagrangian,
}

fn parse_start(s: &str) -> anyhow::Result<PhasePoint> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| anyhow::anyhow!("--start expects x,p,u, got '{s}'"))?;
    match v.as_slice() {
        [x, p, u] => Ok(PhasePoint::new(*x, *p, *u)),
        _ => anyhow::bail!("--start expects three numbers x,p,u, got '{s}'"),
    }
}

fn load_config(path: Option<&PathBuf>) -> anyhow::Result<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", p.display()))?;
            Ok(parse_config(&text)?)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Outcome> {
    let cfg = load_config(cli.config.as_ref())?;
    let dir = cli.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    match cli.command {
        Command::Solve { c, init, ladder } => pipelines::solve(&cfg, c, &init, ladder, &dir),
        Command::ScanC => pipelines::scan_c(&cfg, &dir),
        Command::Mather { theta, enumerate, u, c, time } => {
            pipelines::mather(&cfg, &MatherArgs { theta, enumerate, u, c, time }, &dir)
        }
        Command::Compare { u1, u2, theta } => pipelines::compare(&cfg, &u1, &u2, theta, &dir),
        Command::Flow { start, time, side, dt, c } => {
            let side = match side {
                FlowSide::Hamiltonian => Side::Hamiltonian,
                FlowSide::Lagrangian => Side::Lagrangian,
            };
            let args = FlowArgs { start: parse_start(&start)?, time, side, dt, c };
            pipelines::flow(&cfg, &args, &dir)
        }
        Command::Example { name } => pipelines::example(&cfg, &name, cli.seed, &dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = std::env::var("CONTACT_WEAKKAM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli) {
        Ok(outcome) if outcome.passed() => ExitCode::SUCCESS,
        Ok(outcome) => {
            eprintln!("verification failed: {}", outcome.failed.join(", "));
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
