//! Subcommand wiring: argument types, dispatch, and the mapping from
//! library errors to process exit codes.

pub mod classify;
pub mod contract;
pub mod family;
pub mod simulate;
pub mod verify;

use clap::{Parser, Subcommand};

use ck_core::algebra::ScalarParseError;
use ck_core::dynamics::DynamicsError;
use ck_core::{ExprError, GeometryError, ParseError};

use crate::exit;

#[derive(Parser)]
#[command(
    name = "ckosc",
    version,
    about = "Contractions of the harmonic oscillator onto degenerate-metric spaces: \
             exact nilpotent-parameter arithmetic, symbolic action contraction, and \
             trajectory-family simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Apply a dressing substitution to an oscillator action and reduce it
    /// at a signature
    Contract(contract::ContractArgs),
    /// Integrate a single system and write its trajectory CSV
    Simulate(simulate::SimulateArgs),
    /// Generate a trajectory family (band, cylinder, or 3D region)
    Family(family::FamilyArgs),
    /// Describe a fibered space and its isolated-line bundles
    Classify(classify::ClassifyArgs),
    /// Evaluate the metric of a displacement, full or per fibration level
    Metric(classify::MetricArgs),
    /// Run the randomized invariant suite
    Verify(verify::VerifyArgs),
}

/// Error carrying the exit code it maps to; the message goes to stderr.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: String) -> CliError {
        CliError {
            code: exit::CONFIG_ERROR,
            message,
        }
    }

    pub fn parse(message: String) -> CliError {
        CliError {
            code: exit::PARSE_ERROR,
            message,
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> CliError {
        CliError {
            code: exit::PARSE_ERROR,
            message: e.to_string(),
        }
    }
}

impl From<ScalarParseError> for CliError {
    fn from(e: ScalarParseError) -> CliError {
        CliError {
            code: exit::PARSE_ERROR,
            message: e.to_string(),
        }
    }
}

impl From<ExprError> for CliError {
    fn from(e: ExprError) -> CliError {
        let code = match &e {
            ExprError::Indefinite { .. } => exit::INDEFINITE,
            ExprError::Unfreezable { .. } => exit::CONFIG_ERROR,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> CliError {
        let code = match &e {
            DynamicsError::InvalidStep { .. } => exit::INTEGRATION_ERROR,
            _ => exit::CONFIG_ERROR,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> CliError {
        let code = match &e {
            // A displacement that leaves its fiber has no definite level
            // metric, the geometric analogue of an indefinite expression.
            GeometryError::FiberConstraintViolated => exit::INDEFINITE,
            _ => exit::CONFIG_ERROR,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::config(e.to_string())
    }
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Contract(args) => contract::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Family(args) => family::run(args),
        Command::Classify(args) => classify::run_classify(args),
        Command::Metric(args) => classify::run_metric(args),
        Command::Verify(args) => verify::run(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
