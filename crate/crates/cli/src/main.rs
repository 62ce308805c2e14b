use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use log::{info, warn};
use optomech::scenario::{self, lookup, Overrides, Scenario};
use optomech::{par, Result};

#[derive(Parser)]
#[command(name = "optomech", version, about = "Optomechanical network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file (or a shipped scenario by name) and write its results.
    Run {
        scenario: String,
        /// Output directory; defaults to the scenario's `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override a config value, e.g. `params.q=0.02`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        /// Override a truncation, e.g. `c2=10`.
        #[arg(long = "truncation", value_name = "MODE=N")]
        truncation: Vec<String>,
        /// Integrator relative tolerance.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Parse and validate a scenario without running it.
    Validate { scenario: String },
    /// List the shipped scenarios.
    ListScenarios,
}

fn load(spec: &str, overrides: &Overrides) -> Result<Scenario> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Ok(entry) = lookup(spec) {
            return entry.load(overrides);
        }
    }
    Scenario::from_path(path, overrides)
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run {
            scenario,
            out,
            set,
            truncation,
            tolerance,
        } => {
            let overrides = Overrides {
                set,
                truncation,
                tolerance,
            };
            let sc = load(&scenario, &overrides)?;
            let threads = par::init_threads_from_env();
            info!("running `{}` on {threads} worker(s)", sc.name);
            let bundle = scenario::run(&sc)?;
            for w in &bundle.diagnostics.warnings {
                warn!("{w}");
            }
            let dir = out.unwrap_or_else(|| PathBuf::from(sc.output.dir.clone().unwrap_or_default()));
            let files = scenario::emit(&bundle, &dir)?;
            if let Some(t2) = bundle.diagnostics.t2 {
                println!("t2 = {t2}");
            }
            for f in files {
                println!("wrote {}", f.display());
            }
            println!("{}: done in {:.1} s", sc.name, bundle.wall_seconds);
            Ok(())
        }
        Command::Validate { scenario } => {
            let sc = load(&scenario, &Overrides::default())?;
            println!("{}: ok", sc.name);
            Ok(())
        }
        Command::ListScenarios => {
            for e in scenario::library() {
                println!("{:<20} {}", e.name, e.description());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
