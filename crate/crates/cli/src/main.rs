//! `vadg`: run Vlasov–Ampère simulations and studies from a config file.
//!
//! Exit status: 0 on success, 2 for an invalid configuration, 3 when a
//! solver fails, 1 for any other error (I/O).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vadg::harness::{
    cfl_sweep, conservation_study, reversibility_study, run_simulation, RunConfig, Table,
};
use vadg::Error;

#[derive(Parser)]
#[command(name = "vadg", version, about = "Energy-conserving DG solvers for 1D1V Vlasov-Ampere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single simulation and write its series, snapshots and summary.
    Run(Common),
    /// Reversibility-based convergence study over `study.meshes`.
    Convergence(Common),
    /// Run and print the maximum relative drift of each quantity.
    Conserve(Common),
    /// Iteration counts of an implicit scheme over `study.cfl_list`.
    Sweep(Common),
    /// Print the effective configuration.
    Config(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `run.output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// `section.key=value`, applied after the file. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn load(&self) -> vadg::Result<RunConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path).map_err(|e| {
                Error::InvalidConfig(format!("cannot read {}: {e}", path.display()))
            })?,
            None => String::new(),
        };
        let mut config = RunConfig::parse(&text, &self.overrides)?;
        if let Some(out) = &self.out {
            config.output_dir = Some(out.clone());
        }
        Ok(config)
    }
}

fn write_table(config: &RunConfig, name: &str, text: &str) -> vadg::Result<()> {
    if let Some(dir) = &config.output_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), text)?;
    }
    Ok(())
}

fn execute(cli: Cli) -> vadg::Result<()> {
    match cli.command {
        Command::Run(c) => {
            let config = c.load()?;
            let out = run_simulation(&config)?;
            println!(
                "t_final={} steps={} newton_solves={} nni={:.3} nli={:.3}",
                out.state.t,
                out.steps,
                out.stats.newton_solves,
                out.stats.nni(),
                out.stats.nli()
            );
            print!("{}", out.summary);
        }
        Command::Convergence(c) => {
            let config = c.load()?;
            let rows = reversibility_study(&config, config.study.t_half, &config.study.meshes)?;
            let text = Table(&rows).to_string();
            write_table(&config, "convergence.csv", &text)?;
            print!("{text}");
        }
        Command::Conserve(c) => {
            let mut config = c.load()?;
            config.output_dir = None;
            let summary = conservation_study(&config)?;
            let text = summary.to_string();
            if let Some(dir) = &c.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("summary.txt"), &text)?;
            }
            print!("{text}");
        }
        Command::Sweep(c) => {
            let config = c.load()?;
            let rows = cfl_sweep(&config, &config.study.cfl_list)?;
            let text = Table(&rows).to_string();
            write_table(&config, "sweep.csv", &text)?;
            print!("{text}");
        }
        Command::Config(c) => print!("{}", c.load()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(match &e {
                Error::InvalidConfig(_) | Error::Shape { .. } | Error::IncompatibleCharge { .. } => 2,
                e if e.is_solver_failure() => 3,
                _ => 1,
            })
        }
    }
}
