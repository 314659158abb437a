//! `cfree`: batch front end for the two-state free probability engine.

#![allow(clippy::result_large_err)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cfree::ScalarMode;
use commands::{CliError, Output};

#[derive(Parser, Debug)]
#[command(
    name = "cfree",
    version,
    about = "Exact computations with c-free and (φ|ψ)-free laws"
)]
struct Cli {
    /// Scalar engine: exact rationals or f64.
    #[arg(long, global = true, env = "CFREE_SCALAR_MODE", default_value = "exact", value_parser = parse_mode)]
    mode: ScalarMode,

    /// Write the artifact to this file instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Output format; each subcommand has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

fn parse_mode(s: &str) -> Result<ScalarMode, String> {
    s.parse().map_err(|e: cfree::Error| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Cumulant,
    Analytic,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    Constant,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Normalization {
    Phi,
    Psi,
}

#[derive(Args, Debug, Clone)]
pub struct OrderArg {
    /// Truncation order N.
    #[arg(long, short = 'N', default_value_t = 12, value_parser = clap::value_parser!(u8).range(1..=20))]
    order: u8,
}

impl OrderArg {
    pub fn get(&self) -> usize {
        usize::from(self.order)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Two-state cumulants R and free cumulants r of a law pair.
    Cumulants {
        /// Law pair JSON file.
        #[arg(long)]
        law: PathBuf,
        #[command(flatten)]
        order: OrderArg,
    },
    /// c-convolution of two law pairs.
    Convolve {
        /// Law pair JSON files (exactly two).
        #[arg(required = true, num_args = 2)]
        laws: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "cumulant")]
        route: Route,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Laha-Lukacs regression laws and their check.
    LahaLukacs {
        /// ψ-law ν JSON file.
        #[arg(long)]
        nu: PathBuf,
        #[arg(long, default_value = "0")]
        a: String,
        #[arg(long, default_value = "0")]
        b: String,
        #[arg(long, value_enum, default_value = "constant")]
        case: Case,
        /// Check the regression identities for n = 0..=n_max.
        #[arg(long, value_name = "N_MAX")]
        check_regression: Option<usize>,
        #[command(flatten)]
        order: OrderArg,
    },
    /// Normalized sums against the two-state central limit law.
    Clt {
        /// Sequence JSON file.
        #[arg(long)]
        laws: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "4,16,64,256")]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u8).range(1..=20))]
        max_moment: u8,
        /// Law ν of the limit; overrides the sequence file.
        #[arg(long)]
        nu: Option<PathBuf>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long = "S")]
        big_s: Option<String>,
        #[arg(long, value_enum, default_value = "phi")]
        normalization: Normalization,
    },
    /// Check Kargin's Condition A on a source of joint moments.
    CheckConditionA {
        /// `free`, `classical` or `oracle:<file>`.
        #[arg(long, default_value = "free")]
        source: String,
        /// Law pair for the free and classical sources.
        #[arg(long)]
        law: Option<PathBuf>,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
    },
    /// Cauchy transform and Stieltjes-inverted density of a closed form.
    CauchyGrid {
        /// gaussian_limit, mp_limit, semicircle or mp.
        #[arg(long)]
        form: String,
        #[arg(long)]
        param: f64,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 61)]
        points: usize,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// Run the built-in exact invariant suite.
    Selftest {
        /// Corrupt one coefficient inside the named property.
        #[arg(long, value_name = "PROPERTY")]
        inject_fault: Option<String>,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let mode = cli.mode;
    let format = cli.format;
    let json_only = match &cli.command {
        Command::Cumulants { .. } => Some("cumulants"),
        Command::Convolve { .. } => Some("convolve"),
        Command::LahaLukacs { .. } => Some("laha-lukacs"),
        Command::CheckConditionA { .. } => Some("check-condition-a"),
        _ => None,
    };
    if let Some(name) = json_only {
        commands::json_only(format, name)?;
    }
    match cli.command {
        Command::Cumulants { law, order } => commands::cumulants(mode, &law, order.get()),
        Command::Convolve { laws, route, order } => {
            commands::convolve(mode, &laws[0], &laws[1], route, order.get())
        }
        Command::LahaLukacs {
            nu,
            a,
            b,
            case,
            check_regression,
            order,
        } => commands::laha_lukacs(mode, &nu, &a, &b, case, check_regression, order.get()),
        Command::Clt {
            laws,
            n_list,
            max_moment,
            nu,
            s,
            big_s,
            normalization,
        } => commands::clt(
            mode,
            format,
            &commands::CltArgs {
                laws,
                n_list,
                max_moment: usize::from(max_moment),
                nu,
                s,
                big_s,
                normalization,
            },
        ),
        Command::CheckConditionA {
            source,
            law,
            max_order,
        } => commands::check_condition_a(mode, &source, law.as_deref(), max_order),
        Command::CauchyGrid {
            form,
            param,
            from,
            to,
            points,
            eps,
        } => commands::cauchy_grid(format, &form, param, from, to, points, eps),
        Command::Selftest { inject_fault } => commands::selftest(format, inject_fault.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = CliError::usage(e.kind(), e.to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code);
        }
    };
    let target = cli.output.clone();
    match run(cli).and_then(|out| out.write(target.as_deref())) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::from(err.exit_code)
        }
    }
}
