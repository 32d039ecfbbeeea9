use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kicked_dirac::runner::{run_scenario, Overrides, ScenarioConfig, ScenarioKind};

/// Kicked Dirac rotor simulations.
#[derive(Parser)]
#[command(version, about, arg_required_else_help = true)]
struct Cli {
    /// Print the available scenarios and exit.
    #[arg(long)]
    list_scenarios: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a TOML config (or a previous run's manifest.json).
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file; scenario defaults are used when omitted.
    config: Option<PathBuf>,
    /// Scenario to run (overrides the config file).
    #[arg(long)]
    scenario: Option<ScenarioKind>,
    /// Output directory (overrides the config file and KICKED_DIRAC_OUT_DIR).
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Number of kicks.
    #[arg(long)]
    kicks: Option<usize>,
    /// Number of momentum modes (power of two).
    #[arg(long)]
    grid: Option<usize>,
    /// Also write momentum and coordinate densities.
    #[arg(long)]
    record_density: bool,
}

fn run(args: RunArgs) -> kicked_dirac::Result<()> {
    let mut config = match (&args.config, args.scenario) {
        (Some(path), _) => ScenarioConfig::load(path)?,
        (None, Some(kind)) => ScenarioConfig::defaults(kind),
        (None, None) => {
            return Err(kicked_dirac::Error::Config(
                "give a config file or --scenario (see --list-scenarios)".into(),
            ))
        }
    };
    config.apply_env();
    config.apply_overrides(&Overrides {
        scenario: args.scenario.filter(|_| args.config.is_some()),
        out_dir: args.out_dir,
        kicks: args.kicks,
        grid: args.grid,
        record_density: args.record_density,
    })?;
    let report = run_scenario(&config)?;
    println!(
        "{}: {} files in {} ({:.2} s){}",
        config.scenario,
        report.files.len(),
        report.output_dir.display(),
        report.wall_time.as_secs_f64(),
        if report.tainted { ", TAINTED by edge aliasing" } else { "" }
    );
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if cli.list_scenarios {
        for kind in ScenarioKind::ALL {
            println!("{:<18} {}", kind.name(), kind.description());
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run(args)) = cli.command else {
        return ExitCode::SUCCESS;
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.to_string().replace('\n', " "));
            ExitCode::from(match e {
                kicked_dirac::Error::Config(_) => 2,
                _ => 1,
            })
        }
    }
}
