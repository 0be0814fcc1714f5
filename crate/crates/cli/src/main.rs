use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use cyllab_cli::config::{BdataSource, Command, ExperimentConfig, Profile};
use cyllab_cli::{run, StepStatus};
use cyllab_core::degeneration::SampleRule;
use cyllab_core::{VectorFieldModel, VectorFieldSequence};

/// Perturbed holomorphic cylinders: solve, check estimates, run degeneration
/// families and integrate flow lines.
#[derive(Parser)]
#[command(name = "cyllab", version)]
struct Cli {
    /// JSON experiment config; flags given on the command line override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: cyllab-out/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// CI profile: S = 512, T = 32, two family entries.
    #[arg(long, global = true)]
    quick: bool,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the resolved config and exit without running.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve one boundary-value problem and write the field.
    Solve(SolveArgs),
    /// Run the estimate checks on a field file.
    Check(CheckArgs),
    /// Run a degeneration family.
    Family(FamilyArgs),
    /// Integrate a flow line with RK4.
    Flowline(FlowlineArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Number of s-samples.
    #[arg(long)]
    s: Option<usize>,
    /// Number of t-modes.
    #[arg(long)]
    modes: Option<usize>,
    /// Boundary data JSON: a list of {side, k, re, im}.
    #[arg(long)]
    bdata: Option<PathBuf>,
    /// Vector-field model JSON.
    #[arg(long)]
    vfield: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct CheckArgs {
    /// Field header written by `solve`.
    #[arg(long)]
    field: Option<PathBuf>,
    #[arg(long)]
    vfield: Option<PathBuf>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    com_tol: Option<f64>,
    #[arg(long)]
    max_centers: Option<usize>,
    #[arg(long)]
    elliptic_corpus: Option<usize>,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long)]
    ell: Option<f64>,
    /// Comma-separated radii, strictly increasing.
    #[arg(long, value_delimiter = ',')]
    r_list: Option<Vec<f64>>,
    /// Vector-field sequence JSON, or a single model for a constant sequence.
    #[arg(long)]
    vfield: Option<PathBuf>,
    #[arg(long)]
    bdata: Option<PathBuf>,
    /// Same number of s-samples on every member.
    #[arg(long, conflicts_with = "samples_per_unit")]
    s: Option<usize>,
    /// s-samples per unit length on every member.
    #[arg(long)]
    samples_per_unit: Option<f64>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct FlowlineArgs {
    #[arg(long)]
    vfield: Option<PathBuf>,
    /// Comma-separated real coordinates of the start point.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    start: Option<Vec<f64>>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    backward: bool,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_sequence(path: &PathBuf) -> anyhow::Result<VectorFieldSequence> {
    match read_json::<VectorFieldSequence>(path) {
        Ok(seq) => Ok(seq),
        Err(_) => Ok(VectorFieldSequence::constant(read_json::<VectorFieldModel>(path)?)),
    }
}

fn resolve(cli: &Cli) -> anyhow::Result<ExperimentConfig> {
    let profile = if cli.quick { Profile::Quick } else { Profile::Full };
    let name = match cli.command {
        Sub::Solve(_) => "solve",
        Sub::Check(_) => "check",
        Sub::Family(_) => "family",
        Sub::Flowline(_) => "flowline",
    };
    let mut cfg = match &cli.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.command.name() != name {
                anyhow::bail!("config {} is for `{}`, not `{name}`", path.display(), cfg.command.name());
            }
            cfg
        }
        None => {
            let command = match &cli.command {
                Sub::Solve(_) => Command::Solve(profile.solve()),
                Sub::Check(a) => Command::Check(profile.check(a.field.clone().unwrap_or_else(|| "field.json".into()))),
                Sub::Family(_) => Command::Family(profile.family()),
                Sub::Flowline(_) => Command::Flowline(profile.flowline()),
            };
            ExperimentConfig { out_dir: PathBuf::from("cyllab-out").join(name), seed: 0, command }
        }
    };
    if let Some(out) = &cli.out {
        cfg.out_dir = out.clone();
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    match (&cli.command, &mut cfg.command) {
        (Sub::Solve(a), Command::Solve(c)) => {
            set(&mut c.grid.r, a.r);
            set(&mut c.eps, a.eps);
            set(&mut c.grid.s_samples, a.s);
            set(&mut c.grid.t_modes, a.modes);
            set(&mut c.tol, a.tol);
            if let Some(p) = &a.bdata {
                c.bdata = BdataSource::File(p.clone());
            }
            if let Some(p) = &a.vfield {
                c.vfield = read_json(p)?;
            }
        }
        (Sub::Check(a), Command::Check(c)) => {
            set(&mut c.field, a.field.clone());
            set(&mut c.eps, a.eps);
            set(&mut c.kappa, a.kappa);
            set(&mut c.com_tol, a.com_tol);
            set(&mut c.max_centers, a.max_centers);
            set(&mut c.elliptic_corpus, a.elliptic_corpus);
            if let Some(p) = &a.vfield {
                c.vfield = read_json(p)?;
            }
        }
        (Sub::Family(a), Command::Family(c)) => {
            set(&mut c.ell, a.ell);
            set(&mut c.r_list, a.r_list.clone());
            set(&mut c.grid.t_modes, a.modes);
            set(&mut c.tol, a.tol);
            if let Some(s_samples) = a.s {
                c.grid.samples = SampleRule::Fixed { s_samples };
            }
            if let Some(samples_per_unit) = a.samples_per_unit {
                c.grid.samples = SampleRule::Density { samples_per_unit };
            }
            if let Some(p) = &a.bdata {
                c.bdata = BdataSource::File(p.clone());
            }
            if let Some(p) = &a.vfield {
                c.vfield = read_sequence(p)?;
            }
        }
        (Sub::Flowline(a), Command::Flowline(c)) => {
            set(&mut c.start, a.start.clone());
            set(&mut c.duration, a.duration);
            set(&mut c.step, a.step);
            c.backward |= a.backward;
            if let Some(p) = &a.vfield {
                c.vfield = read_json(p)?;
            }
        }
        _ => unreachable!("command kinds matched above"),
    }
    Ok(cfg)
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn cap_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("CYLLAB_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("CYLLAB_THREADS = {v:?} is not a count"))?;
        if n == 0 {
            anyhow::bail!("CYLLAB_THREADS must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cap_threads().and_then(|_| resolve(&cli)).and_then(|cfg| {
        if cli.print_config {
            println!("{}", cfg.to_json());
            return Ok(None);
        }
        run(&cfg).map(Some)
    });
    match outcome {
        Ok(None) => ExitCode::SUCCESS,
        Ok(Some(m)) => {
            for s in &m.steps {
                let tag = match s.status {
                    StepStatus::Passed => "ok",
                    StepStatus::Failed => "FAIL",
                    StepStatus::Skipped => "skip",
                    StepStatus::Error => "ERROR",
                };
                eprint!("[{:>2}] {:<30} {:<5} {:8.3}s", s.index, s.name, tag, s.seconds);
                if let Some(msg) = &s.message {
                    eprint!("  {msg}");
                }
                eprintln!();
            }
            if m.success() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
