use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use spincool::config::{ExperimentConfig, Format, PROTOCOLS};
use spincool::golden::report_golden;
use spincool::runner::{run_config, RunOptions};

#[derive(Parser)]
#[command(name = "spincool", about = "Heat-bath and algorithmic cooling simulations")]
struct Cli {
    /// Directory for relative output paths.
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Format for surface outputs, overriding the config.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for grid scans (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write its outputs.
    Run { config: PathBuf },
    /// Run the reproduction suite and print the pass/fail table.
    ReportGolden,
    /// List protocol names and their parameters.
    ListProtocols,
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<ExitCode> {
    let opts = RunOptions {
        threads: cli.threads,
        format: cli.format,
        output_dir: cli.output_dir,
    };
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Run { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (run, artifacts) = run_config(&cfg, &opts)?;
            if artifacts.files.is_empty() {
                serde_json::to_writer_pretty(&mut stdout, &run)?;
                writeln!(stdout)?;
            } else {
                artifacts.write()?;
                for (path, _) in &artifacts.files {
                    writeln!(stdout, "wrote {}", path.display())?;
                }
            }
        }
        Command::ReportGolden => {
            let report = report_golden(opts.threads)?;
            let text = report.render();
            stdout.write_all(text.as_bytes())?;
            if let Some(dir) = &opts.output_dir {
                let path = dir.join("golden_report.txt");
                std::fs::write(&path, &text).with_context(|| format!("cannot write {}", path.display()))?;
            }
            if !report.all_pass() {
                for row in report.failures() {
                    eprintln!("failed: {} / {}", row.group, row.quantity);
                }
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::ListProtocols => {
            for (name, params) in PROTOCOLS {
                writeln!(stdout, "{name:<18} {params}")?;
            }
        }
        Command::Version => writeln!(stdout, "spincool {}", env!("CARGO_PKG_VERSION"))?,
    }
    Ok(ExitCode::SUCCESS)
}
