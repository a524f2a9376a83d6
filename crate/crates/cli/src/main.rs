//! polariton-lab: command-line front end for the disordered-polariton
//! analytics library — eigenvalue sweeps, spectra, relaxation and transport
//! rates, Monte Carlo ensembles, and figure-data reproduction.

mod config;
mod output;
mod run;

use clap::Parser;

fn main() {
    let cli = config::Cli::parse();
    std::process::exit(run::dispatch(cli));
}
