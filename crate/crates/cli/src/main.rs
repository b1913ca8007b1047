use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use ratlin_cli::config::{Format, Mode, PencilKind};
use ratlin_cli::report::{plot_csv, write_file};
use ratlin_cli::{run, CliResult, Overrides, PipelineConfig};

/// Build, verify and solve linearizations of rational and nonlinear
/// eigenvalue problems.
///
/// Exit status: 0 when every enabled check passes, 1 when a check fails or a
/// residual exceeds the threshold, 2 on configuration or input errors.
#[derive(Debug, Parser)]
#[command(name = "ratlin", version)]
struct Args {
    /// Pipeline configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    seed: Option<u64>,
    /// AAA tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Full or trimmed pencil.
    #[arg(long, value_enum)]
    pencil: Option<PencilKind>,
    /// Write the sample-versus-error table here.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("ratlin: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(args: &Args) -> CliResult<bool> {
    let overrides = Overrides {
        mode: args.mode,
        out: args.out.clone(),
        format: args.format,
        seed: args.seed,
        tol: args.tol,
        pencil: args.pencil,
        plot: args.plot.clone(),
        timings: args.timings,
    };
    let cfg = PipelineConfig::load(&args.config, &overrides)?;
    let out = run(&cfg)?;
    let text = match cfg.output.format {
        Format::Json => out.report.to_json(),
        Format::Csv => out.report.to_csv(),
    };
    match &cfg.output.path {
        Some(p) => write_file(p, &text)?,
        None => print!("{text}"),
    }
    if let Some(p) = &cfg.output.plot {
        write_file(p, &plot_csv(&out.plot))?;
    }
    for c in out.report.checks.iter().filter(|c| !c.passed) {
        eprintln!("ratlin: check {} failed: {}", c.name, c.detail);
    }
    Ok(out.report.passed)
}
