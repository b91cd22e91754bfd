use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use relay_aoi::experiment::scenario::OUT_DIR_ENV;
use relay_aoi::experiment::{self, render, Artifact, Format, Overrides, Preset, Scenario, ScenarioFile};
use relay_aoi::Error;

#[derive(Parser)]
#[command(name = "relay-aoi", version, about = "Age of information in a two-way AF relay: analysis, power allocation, simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Success probabilities and AoI at fixed powers, asymptotic and Monte Carlo.
    Analyze,
    /// Optimal source powers with the relay at its peak.
    Optimize,
    /// Slot-level simulation at fixed powers.
    Simulate,
    /// Weighted AoI along a one-dimensional power sweep.
    Sweep,
    /// Objective over a grid of source powers.
    Grid,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Optimize => "optimize",
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::Grid => "grid",
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Full,
    Quick,
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Base RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of slots to simulate (even).
    #[arg(long, global = true)]
    slots: Option<u64>,
    /// Monte Carlo samples per operating point.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Check the optimum against a brute-force grid with this step.
    #[arg(long, global = true, value_name = "STEP")]
    oracle: Option<f64>,
    /// Floor on both success probabilities.
    #[arg(long, global = true)]
    min_success: Option<f64>,
    /// Output file; defaults to $RELAY_AOI_OUT_DIR/<command>.<ext> or stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format (default csv).
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    /// Decoding threshold in dB.
    #[arg(long, global = true, allow_negative_numbers = true)]
    gamma_th_db: Option<f64>,
    /// Run lengths: full (1e7 slots and samples) or quick (1e5).
    #[arg(long, global = true, value_enum)]
    preset: Option<PresetArg>,
    /// Transmit power of source A.
    #[arg(long, global = true)]
    p_a: Option<f64>,
    /// Transmit power of source B.
    #[arg(long, global = true)]
    p_b: Option<f64>,
    /// Relay power (default: relay peak).
    #[arg(long, global = true)]
    p_r: Option<f64>,
    /// Print the resolved scenario as JSON and exit.
    #[arg(long, global = true)]
    print_config: bool,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            preset: self.preset.map(|p| match p {
                PresetArg::Full => Preset::Full,
                PresetArg::Quick => Preset::Quick,
            }),
            seed: self.seed,
            n_slots: self.slots,
            n_samples: self.samples,
            oracle_step: self.oracle,
            min_success: self.min_success,
            out: self.out.clone(),
            format: self.format.map(|f| match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            }),
            gamma_th_db: self.gamma_th_db,
            p_a: self.p_a,
            p_b: self.p_b,
            p_r: self.p_r,
        }
    }
}

fn emit<A: Artifact>(artifact: &A, scenario: &Scenario, command: &str) -> relay_aoi::Result<()> {
    let text = render(artifact, scenario.output.format)?;
    let echo = command == "analyze";
    let env_dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    match scenario.output_path(command, env_dir.as_deref()) {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(&path, &text)?;
            log::info!("wrote {}", path.display());
            if echo {
                std::io::stdout().write_all(text.as_bytes())?;
            }
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> relay_aoi::Result<()> {
    let file = match &cli.common.config {
        Some(path) => ScenarioFile::load(path)?,
        None => ScenarioFile::default(),
    };
    let scenario = Scenario::resolve(&file, &cli.common.overrides())?;
    if cli.common.print_config {
        let mut json = serde_json::to_string_pretty(&scenario)?;
        json.push('\n');
        std::io::stdout().write_all(json.as_bytes())?;
        return Ok(());
    }
    let name = cli.command.name();
    match cli.command {
        Command::Analyze => emit(&experiment::analyze(&scenario)?, &scenario, name),
        Command::Optimize => emit(&experiment::optimize(&scenario)?, &scenario, name),
        Command::Simulate => emit(&experiment::simulate(&scenario)?, &scenario, name),
        Command::Sweep => emit(&experiment::sweep(&scenario)?, &scenario, name),
        Command::Grid => emit(&experiment::grid(&scenario)?, &scenario, name),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Infeasible { intervals, .. } = &e {
                for iv in intervals {
                    eprintln!(
                        "  {:?} with fixed power {}: feasible range ({}, {})",
                        iv.direction, iv.fixed_power, iv.lower, iv.upper
                    );
                }
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
