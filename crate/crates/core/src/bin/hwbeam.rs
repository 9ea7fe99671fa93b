use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hwbeam::scenario::{
    cmd_analyze, cmd_compare, cmd_simulate, cmd_sweep, parse_config, write_comparison_csv,
    write_json, write_key_value_csv, write_sweep_csv, Format, ScenarioConfig,
};
use hwbeam::{Error, Result};

/// Beam switching and handover on mmWave highways: closed-form analysis and
/// event-traced simulation.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form expectations.
    Analyze(Common),
    /// Monte Carlo ensemble with confidence intervals.
    Simulate(Common),
    /// Analysis next to simulation; exits 2 if a single-side check fails.
    Compare(Common),
    /// Both engines over the grid of the config's [sweep] section.
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the events of the first realizations as CSV (simulate only).
    #[arg(long)]
    event_log: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl Common {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = parse_config(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.run.seed = seed;
        }
        if let Some(n) = self.realizations {
            if n == 0 {
                return Err(Error::Usage("--realizations must be at least 1".into()));
            }
            cfg.run.realizations = n;
        }
        Ok(cfg)
    }

    fn format(&self, default: Format) -> Format {
        match self.format {
            Some(FormatArg::Json) => Format::Json,
            Some(FormatArg::Csv) => Format::Csv,
            None => default,
        }
    }

    fn output(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Analyze(args) => {
            let report = cmd_analyze(&args.load()?)?;
            match args.format(Format::Json) {
                Format::Json => write_json(args.output()?, &report)?,
                Format::Csv => write_key_value_csv(args.output()?, "analyze", &report)?,
            }
            Ok(0)
        }
        Command::Simulate(args) => {
            let report = cmd_simulate(&args.load()?, args.event_log.as_deref())?;
            match args.format(Format::Json) {
                Format::Json => write_json(args.output()?, &report)?,
                Format::Csv => write_key_value_csv(args.output()?, "simulate", &report)?,
            }
            Ok(0)
        }
        Command::Compare(args) => {
            let report = cmd_compare(&args.load()?)?;
            match args.format(Format::Json) {
                Format::Json => write_json(args.output()?, &report)?,
                Format::Csv => write_comparison_csv(args.output()?, &report)?,
            }
            Ok(report.exit_code())
        }
        Command::Sweep(args) => {
            let rows = cmd_sweep(&args.load()?)?;
            match args.format(Format::Csv) {
                Format::Json => write_json(args.output()?, &rows)?,
                Format::Csv => write_sweep_csv(args.output()?, &rows)?,
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
