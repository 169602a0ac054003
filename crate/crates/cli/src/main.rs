use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdda_cli::commands::MutantKind;
use fdda_cli::{cmd_enumerate, cmd_run, cmd_sweep, CliError, EnumerateTarget, Format};
use fdda_core::FaultMode;

#[derive(Parser)]
#[command(
    name = "fdda",
    version,
    about = "Accuracy-based distributed fault diagnosis simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one diagnosis cycle and print the report.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's percent threshold.
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Re-qualify one cycle's final FCF at several thresholds.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// A value, a comma list, or an inclusive range `start..end:step`.
        #[arg(long)]
        threshold: String,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
    /// Check the protocol against the closed-form oracle over every fault subset.
    Enumerate(EnumerateArgs),
}

#[derive(Args)]
struct EnumerateArgs {
    /// Take the topology (and threshold) from a scenario file.
    #[arg(long, conflicts_with_all = ["topology", "random"])]
    scenario: Option<PathBuf>,
    /// Generated topology: path:N, ring:N, star:N or complete:N.
    #[arg(long, conflicts_with = "random")]
    topology: Option<String>,
    /// Check this many seeded random connected graphs instead.
    #[arg(long)]
    random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "fail_silent")]
    mode: FaultMode,
    #[arg(long)]
    threshold: Option<String>,
    #[arg(long, value_enum, hide = true)]
    mutant: Option<MutantKind>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            scenario,
            threshold,
            format,
        } => cmd_run(scenario, *format, threshold.as_deref()),
        Command::Sweep {
            scenario,
            threshold,
            format,
        } => cmd_sweep(scenario, threshold, *format),
        Command::Enumerate(args) => {
            let target = match (&args.scenario, &args.topology, args.random) {
                (Some(path), _, _) => Ok(EnumerateTarget::Scenario(path.clone())),
                (_, Some(spec), _) => Ok(EnumerateTarget::Topology(spec.clone())),
                (_, _, Some(count)) => Ok(EnumerateTarget::Random {
                    count,
                    seed: args.seed,
                }),
                _ => Err(CliError::Usage(
                    "one of --scenario, --topology or --random is required".into(),
                )),
            };
            target
                .and_then(|t| cmd_enumerate(&t, args.mode, args.threshold.as_deref(), args.mutant))
        }
    };
    match result {
        Ok(rendered) => {
            print!("{}", rendered.text);
            ExitCode::from(rendered.status.code() as u8)
        }
        Err(e) => {
            eprintln!("fdda: {e}");
            ExitCode::from(e.exit_status().code() as u8)
        }
    }
}
