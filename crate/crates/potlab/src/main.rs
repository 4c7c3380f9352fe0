use clap::{Args, Parser, Subcommand};
use potlab::cli::{self, CliCommand, OutputFormat, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "potlab",
    about = "Numerical laboratory for bilinear Bessel potentials: kernel evaluation, Lorentz norms, operator quadrature, and the scaling/sharpness experiment catalog"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to a key-value config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the config's `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or structured (JSON).
    #[arg(long)]
    format: Option<String>,
    /// Worker threads for experiment dispatch (default: POTLAB_JOBS or all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the kernel on a radius list and fit its constants.
    Kernel(Common),
    /// Compute Lorentz norms of the configured functions.
    Norm(Common),
    /// Evaluate the bilinear potential of two functions at points.
    Apply(Common),
    /// Run one catalog experiment (requires experiment_id in the config).
    Experiment(Common),
    /// Run the full default experiment catalog.
    Suite(Common),
}

fn split(cmd: &Command) -> (CliCommand, &Common) {
    match cmd {
        Command::Kernel(c) => (CliCommand::Kernel, c),
        Command::Norm(c) => (CliCommand::Norm, c),
        Command::Apply(c) => (CliCommand::Apply, c),
        Command::Experiment(c) => (CliCommand::Experiment, c),
        Command::Suite(c) => (CliCommand::Suite, c),
    }
}

fn run() -> Result<i32, String> {
    let cli = Cli::parse();
    let (command, common) = split(&cli.command);

    let jobs = common.jobs.or_else(|| {
        std::env::var("POTLAB_JOBS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(jobs) = jobs {
        // ignore failure when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }

    let mut config: RunConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            cli::parse_config(&text).map_err(|e| format!("config error: {e}"))?
        }
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        config.output_path = out.clone();
    }
    if let Some(format) = &common.format {
        config.output_format = match format.as_str() {
            "csv" => OutputFormat::Csv,
            "structured" => OutputFormat::Structured,
            other => return Err(format!("unknown format '{other}' (csv|structured)")),
        };
    }

    cli::execute(command, &config).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(message) => {
            eprintln!("potlab: {message}");
            ExitCode::from(2)
        }
    }
}
