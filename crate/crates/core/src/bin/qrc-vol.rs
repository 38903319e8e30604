use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qrc_vol::pipeline::{self, RunConfig};
use qrc_vol::Result;

#[derive(Parser)]
#[command(name = "qrc-vol", version, about = "Realized-volatility forecasting benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the monthly frame from daily returns and the feature table.
    Prepare(Common),
    /// Run every enabled model over the rolling windows and evaluate them.
    Benchmark(Common),
    /// Forward feature selection.
    Select(Common),
    /// Shapley attribution of the final forecast.
    Shapley(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the MCS bootstrap and Shapley sampling
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(out) = &self.out {
            cfg.paths.out = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Prepare(c) => {
            let out = pipeline::prepare(&c.load()?)?;
            println!("{}", out.summary);
            for w in &out.warnings {
                eprintln!("warning: {w}");
            }
            println!("wrote {}", out.frame_path.display());
            Ok(0)
        }
        Command::Benchmark(c) => {
            let out = pipeline::benchmark(&c.load()?)?;
            print!("{}", out.summary);
            println!("artifacts in {}", out.out_dir.display());
            Ok(out.exit_code() as u8)
        }
        Command::Select(c) => {
            let trace = pipeline::select(&c.load()?)?;
            for (i, (f, m)) in trace.selected.iter().zip(&trace.mse).enumerate() {
                println!("{:>2} {f:<6} {m:.6}", i + 1);
            }
            Ok(0)
        }
        Command::Shapley(c) => {
            let r = pipeline::shapley(&c.load()?)?;
            for (g, v) in r.groups.iter().zip(&r.values) {
                println!("{g:<12} {v:+.6}");
            }
            println!("efficiency residual {:.3e}", r.efficiency_residual);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
