//! `bergman`: batch driver for the bergman-core computations.

mod catalog;
mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::*;

#[derive(Parser)]
#[command(
    name = "bergman",
    version,
    about = "Bergman density and TYZ coefficient experiments"
)]
struct Cli {
    /// JSON config file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Conversion polynomials f_1..f_K as JSON.
    ConvertPoly(ConvertPolyArgs),
    /// Eigenfunction variation series and the admissible-eigenvalue scan.
    Variation(VariationArgs),
    /// Polynomiality criterion for k0 = 1..k0_max.
    Polynomiality(PolynomialityArgs),
    /// Fubini–Study density constancy and norm check.
    FsCheck(FsCheckArgs),
    /// CSV of Bergman densities over a grid and a range of m.
    Density(DensityArgs),
    /// Fit expansion coefficients from a density CSV.
    Fit(FitArgs),
    /// Kernel formula vs finite difference for the first variation.
    FirstVariation(FirstVariationArgs),
    /// Center a potential on CP¹ and write the iteration trace as CSV.
    Center(CenterArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, result) = match &cli.command {
        Command::ConvertPoly(a) => ("convert-poly", run(a, &cli.config, convert_poly)),
        Command::Variation(a) => ("variation", run(a, &cli.config, variation)),
        Command::Polynomiality(a) => ("polynomiality", run(a, &cli.config, polynomiality)),
        Command::FsCheck(a) => ("fs-check", run(a, &cli.config, fs_check)),
        Command::Density(a) => ("density", run(a, &cli.config, density)),
        Command::Fit(a) => ("fit", run(a, &cli.config, fit)),
        Command::FirstVariation(a) => ("first-variation", run(a, &cli.config, first_variation)),
        Command::Center(a) => ("center", run(a, &cli.config, center)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err((e, params)) => {
            eprintln!(
                "{}",
                report::json_text(&e.payload(name, &params)).trim_end()
            );
            ExitCode::from(e.code as u8)
        }
    }
}
