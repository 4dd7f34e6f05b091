use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

/// Characteristics solver and vanishing-pressure experiment harness for the
/// Aw-Rascle traffic model.
#[derive(Parser, Debug)]
#[command(name = "awr", version, about)]
struct Args {
    /// Scenario/experiment config file (built-in defaults when omitted)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Experiment to run: solve | bounds | blowup | converge | weak | all
    #[arg(long, default_value = "all")]
    experiment: String,

    /// Output directory (defaults to the config's cli.out_dir)
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// RNG seed driving the weak-form test functions
    #[arg(long)]
    seed: Option<u64>,

    /// Lattice resolution override for the bounds report
    #[arg(long)]
    grid_n: Option<usize>,

    /// Repeatable config override, `section.key=value`
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    let code = aw_rascle::cli::run_to_exit_code(
        args.config.as_deref(),
        &args.experiment,
        args.out_dir,
        args.seed,
        args.grid_n,
        &args.overrides,
    );
    ExitCode::from(code as u8)
}
