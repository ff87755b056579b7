use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use nucgrow::harness::config::{
    self, BOOTSTRAP_TOML, COUPLE_TOML, DROPLET_TOML, GENEROUS_TOML, TAU_TOML, VERIFY_TOML,
};
use nucgrow::harness::{
    cmd_bootstrap, cmd_couple, cmd_droplet, cmd_generous, cmd_tau, cmd_verify, CommandReport, ExperimentConfig,
    HarnessError, RunOptions, VerifyConfig, EXIT_OK,
};

#[derive(Parser)]
#[command(name = "nucgrow", version, about = "Nucleation-and-growth simulator and verification harness")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Config file; defaults to the pinned config of the command.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Base seed, overriding the config.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 1, value_name = "N")]
    jobs: usize,
    /// Output directory.
    #[arg(long, global = true, default_value = "out", value_name = "DIR")]
    out: PathBuf,
    /// Write one JSON-lines event trace per run.
    #[arg(long, global = true)]
    trace: bool,
    /// Event budget per trace, overriding the config.
    #[arg(long, global = true, value_name = "N")]
    budget: Option<u64>,
    /// Override a config key, e.g. `--set replicas=50`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Relaxation times against the regime predictions.
    Tau,
    /// KS droplet growth times.
    Droplet,
    /// Critical density and coarse-grained bootstrap percolation.
    Bootstrap,
    /// Exponential-sum coupling dominance tests.
    Couple,
    /// Generous rectangles containment and AL analogues.
    Generous,
    /// Run the full property suite at pinned parameters.
    Verify,
    /// Print the pinned config of a command.
    ShowConfig { command: String },
}

fn load<T: DeserializeOwned>(g: &Global, pinned: &str) -> Result<T, HarnessError> {
    let mut overrides = g.set.clone();
    if let Some(s) = g.seed {
        overrides.push(format!("base_seed={s}"));
    }
    if let Some(b) = g.budget {
        overrides.push(format!("budget={b}"));
    }
    match &g.config {
        Some(p) => config::load_file(p, &overrides),
        None => config::load_str(pinned, &overrides),
    }
}

fn summarize(r: &CommandReport) {
    println!(
        "{} runs ({} censored) -> {}",
        r.manifest.runs.len(),
        r.manifest.censored(),
        r.dir.display()
    );
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    let g = &cli.global;
    let opts = RunOptions { jobs: g.jobs, out: g.out.clone(), trace: g.trace };
    let sweep = |pinned: &str, f: fn(&ExperimentConfig, &RunOptions) -> Result<CommandReport, HarnessError>| {
        let cfg: ExperimentConfig = load(g, pinned)?;
        let report = f(&cfg, &opts)?;
        summarize(&report);
        Ok(EXIT_OK)
    };
    match &cli.command {
        Command::Tau => sweep(TAU_TOML, cmd_tau),
        Command::Droplet => sweep(DROPLET_TOML, cmd_droplet),
        Command::Bootstrap => sweep(BOOTSTRAP_TOML, cmd_bootstrap),
        Command::Couple => sweep(COUPLE_TOML, cmd_couple),
        Command::Generous => sweep(GENEROUS_TOML, cmd_generous),
        Command::Verify => {
            let cfg: VerifyConfig = load(g, VERIFY_TOML)?;
            let report = cmd_verify(&cfg, &opts)?;
            for line in report.lines() {
                println!("{line}");
            }
            Ok(report.exit_code())
        }
        Command::ShowConfig { command } => {
            let text = match command.as_str() {
                "tau" => TAU_TOML,
                "droplet" => DROPLET_TOML,
                "bootstrap" => BOOTSTRAP_TOML,
                "couple" => COUPLE_TOML,
                "generous" => GENEROUS_TOML,
                "verify" => VERIFY_TOML,
                other => return Err(HarnessError::Config(format!("no pinned config for `{other}`"))),
            };
            print!("{text}");
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
