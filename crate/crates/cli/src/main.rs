mod commands;
mod error;
mod output;
mod parse;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{Ctx, DimensionArgs, Outcome, SimulateArgs};
use crate::error::CliError;
use crate::output::{Format, Meta, Numbers};

/// Exact Markov models and local dimensions for the random β-transformation.
///
/// β is given by its digits: `1,1` is the golden ratio, `1,1,1` the
/// tribonacci number, `2,1` the root of x² - 2x - 1.
#[derive(Parser, Debug)]
#[command(name = "betadim", version)]
struct Cli {
    /// Significant decimal digits for approximate output.
    #[arg(long, global = true, default_value_t = 15, value_parser = clap::value_parser!(u16).range(1..=2000))]
    precision: u16,
    /// Base seed; sample i uses ChaCha8 stream i of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal polynomial, β, Pisot verdict and greedy check.
    Field { digits: String },
    /// Markov partition, adjacency matrix and Parry measure, with validation.
    Model {
        digits: String,
        /// Maximum size of the orbit closure F.
        #[arg(long)]
        cap: Option<usize>,
        /// Random words used for the Q-additivity check.
        #[arg(long, default_value_t = 1000)]
        words: usize,
    },
    /// ν local dimension report, optionally with γ estimates for μ.
    Dimension {
        digits: String,
        /// Fixed point x (e.g. `1/2`, `beta-1`); ν-random points when omitted.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        /// Horizons, comma separated.
        #[arg(long, default_value = "1000")]
        k: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Horizons for γ estimation; skipped when omitted.
        #[arg(long)]
        gamma_k: Option<String>,
        #[arg(long, default_value_t = 50)]
        gamma_samples: usize,
    },
    /// Branch counts N_1..N_k at a point.
    Count {
        digits: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long)]
        k: usize,
    },
    /// Estimates of γ = lim log N_k / k at Lebesgue-random points.
    Gamma {
        digits: String,
        #[arg(long, default_value = "12,16,20")]
        k: String,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
    /// M_k/k traces along random orbits.
    Simulate {
        digits: String,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, default_value_t = 1000)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        orbits: usize,
        /// Keep every n-th point of each trace.
        #[arg(long, default_value_t = 1)]
        every: usize,
    },
    /// Asymmetric Bernoulli convolution at the golden ratio.
    Asym {
        /// Probability of digit 0, as a fraction or decimal.
        #[arg(long)]
        p: String,
        /// Cylinder length for the exhaustive pushforward check.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// γ estimate for the μ bounds.
        #[arg(long)]
        gamma: Option<f64>,
        /// Grid size of the p-curve in CSV output.
        #[arg(long, default_value_t = 99)]
        grid: usize,
    },
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Ctx { seed: cli.seed, num: Numbers { precision: cli.precision as usize } };
    match &cli.command {
        Command::Field { digits } => commands::field(&ctx, &parse::digits(digits)?),
        Command::Model { digits, cap, words } => commands::model(&ctx, &parse::digits(digits)?, *cap, *words),
        Command::Dimension { digits, x, k, samples, gamma_k, gamma_samples } => commands::dimension(
            &ctx,
            DimensionArgs {
                digits: &parse::digits(digits)?,
                x: x.as_deref(),
                k_list: parse::horizons(k)?,
                samples: *samples,
                gamma_k: gamma_k.as_deref().map(parse::horizons).transpose()?,
                gamma_samples: *gamma_samples,
            },
        ),
        Command::Count { digits, x, k } => commands::count(&ctx, &parse::digits(digits)?, x, *k),
        Command::Gamma { digits, k, samples } => commands::gamma(&ctx, &parse::digits(digits)?, &parse::horizons(k)?, *samples),
        Command::Simulate { digits, x, k, orbits, every } => commands::simulate(
            &ctx,
            SimulateArgs { digits: &parse::digits(digits)?, x: x.as_deref(), k: *k, orbits: *orbits, every: *every },
        ),
        Command::Asym { p, k, gamma, grid } => commands::asym(&ctx, &parse::rational(p)?, *k, *gamma, *grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let meta = Meta { seed: cli.seed, precision: cli.precision as usize };
    let result = run(&cli).and_then(|outcome| {
        let bytes = outcome.report.render(&meta, cli.format)?;
        output::emit(&bytes, cli.out.as_deref())?;
        match outcome.failure {
            Some(msg) => Err(CliError::Validation(msg)),
            None => Ok(()),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
