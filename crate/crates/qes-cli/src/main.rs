//! `qes` — algebraic band-edge spectra of elliptic potentials.
//!
//! Subcommands: `spectrum`, `poly`, `wavefunction`, `limit`, `verify`.
//! Exit codes: 0 success, 2 usage/constraint error, 3 numerical failure.

mod commands;
mod config;
mod render;

use clap::{Parser, Subcommand};
use std::io;

#[derive(Parser)]
#[command(
    name = "qes",
    version,
    about = "Algebraic band-edge spectra, eigenfunctions and orthogonal-polynomial \
             tables for three families of elliptic potentials",
    after_help = "Exit codes: 0 success, 2 usage or constraint error, 3 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file; individual flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<String>,

    /// Potential family: I, II or III
    #[arg(short = 'f', long, global = true, value_name = "FAMILY")]
    family: Option<String>,

    /// Coupling A as an exact rational ("1", "3/2"); decimals snap within 1e-9
    #[arg(short = 'A', global = true, value_name = "RATIONAL", allow_hyphen_values = true)]
    coupling_a: Option<String>,

    /// Coupling B as an exact rational
    #[arg(short = 'B', global = true, value_name = "RATIONAL", allow_hyphen_values = true)]
    coupling_b: Option<String>,

    /// Elliptic parameter m = k², strictly inside (0, 1)
    #[arg(short = 'm', global = true, value_name = "M", allow_hyphen_values = true)]
    modulus: Option<f64>,

    /// Sectors to use: comma-separated labels ("1.1,1.3") or "auto"
    #[arg(long, global = true, value_name = "ROWS")]
    rows: Option<String>,

    /// Grid points: wavefunction samples, oracle matrix size
    #[arg(long, global = true, value_name = "N")]
    grid_n: Option<usize>,

    /// Margin kept clear of singularities (default 1e-3·K)
    #[arg(long, global = true, value_name = "EPS", allow_hyphen_values = true)]
    epsilon: Option<f64>,

    /// Output file; stdout when absent
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<String>,

    /// Output format: csv or json
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Band-edge energies per sector and their multiset union
    Spectrum,
    /// Recurrence tables (lambda, rho, omega) and the critical polynomial
    Poly,
    /// Sample one band-edge eigenfunction on a grid
    Wavefunction {
        /// Level index into the (Re, Im)-sorted list of band edges
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Track the algebraic spectrum toward an exactly-solvable modulus limit
    Limit {
        /// Limit target: k1 (m -> 1) or k0 (m -> 0)
        #[arg(default_value = "k1", value_name = "TARGET")]
        target: String,
    },
    /// Run the closed-form, limit, degeneracy and oracle verification suites
    Verify,
}

fn run(cli: &Cli) -> qes_core::Result<commands::CommandOutcome> {
    let flags = config::FlagOverlay {
        family: cli.family.clone(),
        a: cli.coupling_a.clone(),
        b: cli.coupling_b.clone(),
        m: cli.modulus,
        rows: cli.rows.clone(),
        grid_n: cli.grid_n,
        epsilon: cli.epsilon,
        out: cli.out.clone(),
        format: cli.format.clone(),
    };
    let cfg = config::build_config(cli.config.as_deref(), &flags)?;
    let mut outcome = match &cli.command {
        Command::Spectrum => commands::cmd_spectrum(&cfg)?,
        Command::Poly => commands::cmd_poly(&cfg)?,
        Command::Wavefunction { level } => commands::cmd_wavefunction(&cfg, *level)?,
        Command::Limit { target } => commands::cmd_limit(&cfg, target)?,
        Command::Verify => commands::cmd_verify(&cfg)?,
    };
    outcome.path = cfg.output.path.clone();
    Ok(outcome)
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if let Some(path) = &outcome.path {
                if let Err(e) = std::fs::write(path, &outcome.text) {
                    eprintln!("error: cannot write {path}: {e}");
                    std::process::exit(3);
                }
            } else if let Err(e) = io::Write::write_all(&mut io::stdout(), outcome.text.as_bytes())
            {
                // A closed pipe (`qes ... | head`) truncates output by the
                // reader's choice; stop quietly instead of failing.
                if e.kind() != io::ErrorKind::BrokenPipe {
                    eprintln!("error: cannot write to stdout: {e}");
                    std::process::exit(3);
                }
            }
            std::process::exit(outcome.exit_code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
