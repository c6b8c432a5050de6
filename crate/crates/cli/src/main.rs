use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use planecon_core::output;
use planecon_core::planner::DistributionPolicy;
use planecon_core::sim;
use planecon_core::{preset, preset_names, ScenarioConfig};

#[derive(Parser)]
#[command(
    name = "planecon",
    about = "Agent-based simulator of a production economy run by a central planner",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its CSV series and summary.
    Simulate(SimulateArgs),
    /// List the built-in scenario presets.
    ListScenarios,
}

#[derive(Args)]
struct SimulateArgs {
    /// Preset name (see `list-scenarios`).
    #[arg(long, conflicts_with = "config")]
    scenario: Option<String>,
    /// TOML configuration file instead of a preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Simulated horizon in months.
    #[arg(long)]
    months: Option<u32>,
    #[arg(long)]
    firms: Option<usize>,
    /// Distribution policy: zero | total | random | proportional.
    #[arg(long)]
    policy: Option<DistributionPolicy>,
    /// Order-flow tilt toward investment (+) or consumption (-) producers.
    #[arg(long)]
    distortion: Option<f64>,
    #[arg(long)]
    duration_multiplier: Option<u32>,
    #[arg(long)]
    failure_prob: Option<f64>,
    /// Output directory (default from the config; `out/<scenario>` for presets).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated firm ids to dump per-tick trace rows for.
    #[arg(long, value_delimiter = ',')]
    trace_firms: Vec<usize>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the yearly accounts to stdout as well.
    #[arg(long)]
    print_yearly: bool,
}

impl std::str::FromStr for CliPolicy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.parse::<DistributionPolicy>().map(CliPolicy).map_err(|e| e.to_string())
    }
}

#[derive(Clone)]
struct CliPolicy(DistributionPolicy);

fn resolve_config(args: &SimulateArgs) -> anyhow::Result<ScenarioConfig> {
    let mut config = match (&args.scenario, &args.config) {
        (Some(name), None) => {
            let mut c = preset(name)?;
            c.out_dir = PathBuf::from("out").join(name);
            c
        }
        (None, Some(path)) => ScenarioConfig::from_toml_file(path)
            .with_context(|| format!("loading {}", path.display()))?,
        (None, None) => anyhow::bail!("pass either --scenario <name> or --config <path>"),
        (Some(_), Some(_)) => unreachable!("clap enforces the conflict"),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(months) = args.months {
        config.months = months;
    }
    if let Some(firms) = args.firms {
        config.n_firms = firms;
    }
    if let Some(policy) = args.policy {
        config.policy = policy;
    }
    if let Some(d) = args.distortion {
        config.order_distortion = d;
    }
    if let Some(m) = args.duration_multiplier {
        config.duration_multiplier = m;
    }
    if let Some(p) = args.failure_prob {
        config.failure_probability = p;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.clone();
    }
    if !args.trace_firms.is_empty() {
        config.trace_firms = args.trace_firms.clone();
    }
    config.threads = args.threads;
    config.validate()?;
    Ok(config)
}

fn simulate(args: &SimulateArgs) -> anyhow::Result<()> {
    let config = resolve_config(args)?;
    let out_dir = config.out_dir.clone();
    let threads = config.threads;

    let run = || sim::run_scenario(config.clone());
    let output = if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .context("building the worker pool")?
            .install(run)?
    } else {
        run()?
    };

    output::write_outputs(&output, &out_dir)?;
    let s = &output.summary;
    println!(
        "{}: {} firms, {} months (warm-up {})",
        s.scenario, s.config.n_firms, s.config.months, s.config.warmup_months
    );
    println!(
        "  final-year GDP {:.1}, peak {:.1} (year {}), mean {:.1}, cv {:.3}",
        s.final_year_gdp, s.peak_year_gdp, s.peak_year, s.mean_gdp, s.gdp_coefficient_of_variation
    );
    match s.consumption_over_investment {
        Some(ratio) => println!("  C/I ratio {ratio:.2}"),
        None => println!("  C/I ratio n/a (no investment in the final year)"),
    }
    println!(
        "  rejections {}, failures {}, completions {}, unsatisfied investment {:.1}",
        s.total_rejections, s.total_failures, s.total_completions, s.gross_inv_expected_final
    );
    if args.print_yearly {
        println!("  year consumption investment inventory_change gdp");
        for na in &output.yearly {
            println!(
                "  {:>4} {:>12.1} {:>10.1} {:>16.1} {:>10.1}",
                na.year, na.consumption, na.gross_investment, na.inventory_change, na.gdp
            );
        }
    }
    println!("  outputs in {}", out_dir.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(args) => simulate(args),
        Command::ListScenarios => {
            for name in preset_names() {
                println!("{name}");
            }
            Ok(())
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
