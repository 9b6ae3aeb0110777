use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use quasilocal::runner::{
    cmd_extend, cmd_mass, cmd_poisson_test, cmd_small_sphere, cmd_validate, exit_code, parse_list, read_input, Fault, Outcome,
    RunConfig,
};
use quasilocal::Result;

#[derive(Parser)]
#[command(name = "quasilocal", version, about = "Quasilocal mass estimates for near-round Bartnik data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file (flat key = value with [section] headers)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Data preset (round, schwarzschild, random) or metric preset
    /// (euclidean, s3, quartic, schwarzschild)
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Preset parameter, repeatable: --param m=0.01
    #[arg(long = "param", global = true, value_parser = parse_param)]
    params: Vec<(String, f64)>,
    /// Comma-separated small-sphere radii
    #[arg(long, global = true, value_parser = parse_list)]
    radii: Option<Vec<f64>>,
    #[arg(long, global = true, value_parser = parse_list)]
    flux_radii: Option<Vec<f64>>,
    #[arg(long, global = true)]
    fd_step: Option<f64>,
    #[arg(long, global = true)]
    epsilon_threshold: Option<f64>,
    #[arg(long, global = true)]
    band_limit: Option<usize>,
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Hawking, first-order and ADM masses of one data set
    Mass {
        /// Bartnik data file; overrides the preset
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Build the linearized extension and sweep its residuals over ε
    Extend {
        #[arg(long)]
        data: Option<PathBuf>,
    },
    /// Masses of small geodesic spheres in a metric preset
    SmallSphere,
    /// Analytic check of the exterior Poisson solver
    PoissonTest,
    /// Run the invariant suite
    Validate {
        #[arg(long, value_enum)]
        fault: Option<FaultArg>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    CorruptWeights,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let v = v.trim().parse().map_err(|_| format!("invalid number '{v}'"))?;
    Ok((k.trim().to_string(), v))
}

fn config(cli: &Cli) -> Result<RunConfig> {
    let mut c = match &cli.config {
        Some(path) => RunConfig::from_text(&read_input(path)?)?,
        None => {
            let mut c = RunConfig::default();
            if matches!(cli.command, Command::SmallSphere) {
                c.preset = "s3".into();
            }
            c
        }
    };
    if let Some(l) = cli.band_limit {
        c = c.with_band_limit(l);
    }
    if let Some(p) = &cli.preset {
        c.preset = p.clone();
    }
    for (k, v) in &cli.params {
        c.params.insert(k.clone(), *v);
    }
    if let Some(r) = &cli.radii {
        c.radii = r.clone();
    }
    if let Some(r) = &cli.flux_radii {
        c.flux_radii = r.clone();
    }
    if let Some(h) = cli.fd_step {
        c.fd_step = h;
    }
    if let Some(t) = cli.epsilon_threshold {
        c.epsilon_threshold = t;
    }
    if let Some(o) = &cli.out {
        c.out = o.clone();
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    c.validate()?;
    Ok(c)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let c = config(cli)?;
    match &cli.command {
        Command::Mass { data } => cmd_mass(&c, data.as_deref()),
        Command::Extend { data } => cmd_extend(&c, data.as_deref()),
        Command::SmallSphere => cmd_small_sphere(&c),
        Command::PoissonTest => cmd_poisson_test(&c),
        Command::Validate { fault } => cmd_validate(
            &c,
            fault.map(|f| match f {
                FaultArg::CorruptWeights => Fault::CorruptWeights,
            }),
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
