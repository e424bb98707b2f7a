use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use strongmax_cli::commands::{maximal_text, ratios_csv, read_text, select_text, write_text};
use strongmax_cli::{run_oracle_diff, run_sweep, CliError, CliResult, ExperimentConfig};

#[derive(Parser)]
#[command(name = "strongmax", version, about = "Multi-parameter dyadic maximal operators and weighted-inequality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write M_c f for a grid file.
    Maximal(Common),
    /// Run a greedy selection rule on a rectangle family file.
    Select(Common),
    /// Measure inequality ratios for a fixed f (and weight) from files.
    Ratios(Common),
    /// Seeded sweep over generated instances; writes CSV.
    Sweep(Common),
    /// Compare fast paths with brute-force oracles on small random instances.
    OracleDiff(Common),
}

/// Flags shared by every subcommand. Each one overrides the matching key of
/// `--config`.
#[derive(Args)]
struct Common {
    /// File of key=value lines, one per line.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dim: Option<String>,
    /// Levels as `3,4,5` or `3-6`.
    #[arg(long, visible_alias = "levels")]
    level: Option<String>,
    #[arg(long)]
    complexity: Option<String>,
    /// Comma-separated exponents; fractions like `3/2` are accepted.
    #[arg(long)]
    p: Option<String>,
    /// Comma-separated thresholds; fractions like `1/64` are accepted.
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// uniform, uniform-constant, point-mass, few-point-masses, checkerboard or power-law-profile.
    #[arg(long)]
    generator: Option<String>,
    /// half or exp.
    #[arg(long)]
    procedure: Option<String>,
    /// Comma-separated: weak, strong, endpoint, llogl2d, apstar, strong-mcw.
    #[arg(long)]
    inequality: Option<String>,
    #[arg(long)]
    input: Option<String>,
    /// Weight grid file for `ratios`.
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    output: Option<String>,
}

impl Common {
    fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&read_text(path)?)?;
        }
        let flags = [
            ("dim", &self.dim),
            ("level", &self.level),
            ("complexity", &self.complexity),
            ("p", &self.p),
            ("t", &self.t),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("generator", &self.generator),
            ("procedure", &self.procedure),
            ("inequality", &self.inequality),
            ("input", &self.input),
            ("weight", &self.weight),
            ("output", &self.output),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        Ok(cfg)
    }
}

fn input_of(cfg: &ExperimentConfig) -> CliResult<String> {
    let path = cfg.input.as_ref().ok_or_else(|| CliError::Input("--input is required".into()))?;
    read_text(path)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Maximal(common) => {
            let cfg = common.resolve()?;
            let out = maximal_text(&input_of(&cfg)?, cfg.complexity)?;
            write_text(cfg.output.as_deref(), &out)
        }
        Command::Select(common) => {
            let cfg = common.resolve()?;
            let out = select_text(&input_of(&cfg)?, cfg.procedure, cfg.complexity)?;
            eprint!("{}", out.log);
            write_text(cfg.output.as_deref(), &out.family)
        }
        Command::Ratios(common) => {
            let cfg = common.resolve()?;
            let f = input_of(&cfg)?;
            let w = cfg.weight.as_deref().map(read_text).transpose()?;
            let out = ratios_csv(&f, w.as_deref(), &cfg)?;
            write_text(cfg.output.as_deref(), &out)
        }
        Command::Sweep(common) => {
            let cfg = common.resolve()?;
            let out = run_sweep(&cfg)?;
            if out.skipped > 0 {
                eprintln!("skipped {} measurements with a vanishing denominator", out.skipped);
            }
            write_text(cfg.output.as_deref(), &out.to_csv())
        }
        Command::OracleDiff(common) => {
            let cfg = common.resolve()?;
            let report = run_oracle_diff(&cfg)?;
            println!("{report}");
            report.check()
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
