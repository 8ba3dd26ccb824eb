//! Command-line front end: germ-file parsing and the `frobsurf` commands.

pub mod commands;
pub mod dgf;
pub mod report;

use std::ffi::OsString;
use std::io::Read;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "frobsurf", version, about = "Exact computations on log surface germs")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Primes, comma separated.
    #[arg(long = "p", global = true, value_delimiter = ',')]
    pub p: Vec<u64>,

    /// Largest Frobenius power tried by the monomial test.
    #[arg(long, global = true, default_value_t = 4)]
    pub e_max: u32,

    /// Named boundary from the germ file to use instead of the `coeff=` values.
    #[arg(long, global = true)]
    pub boundary: Option<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Terminal / canonical / klt / plt / lc classification.
    Classify { file: PathBuf },
    /// Discrepancies and crepant pullback coefficients of exceptional curves.
    Discrepancies { file: PathBuf },
    /// Negative definiteness of the exceptional intersection matrix.
    Negdef { file: PathBuf },
    /// Verify `--boundary` as a complement, or search for a minimal one.
    Complement {
        file: PathBuf,
        /// Level to verify at; defaults to the least admissible level clearing denominators.
        #[arg(long)]
        level: Option<u32>,
    },
    /// Build and check the B* certificate at each prime.
    Bstar {
        file: PathBuf,
        /// Re-verify certificates from a JSON report instead of building new ones.
        #[arg(long)]
        check: Option<PathBuf>,
    },
    /// Global F-regularity of (P^1, D) by the monomial test.
    #[command(name = "fregular-p1")]
    FregularP1 {
        /// Coefficients of D at 0, infinity and 1.
        #[arg(long, value_delimiter = ',', required = true)]
        coeffs: Vec<String>,
    },
    /// Exponent and witness table for the D1 and D2 triples.
    Hara,
    /// Binomial coefficients mod p by Lucas' theorem.
    Lucas { n: String, k: String },
}

/// Parses `args`, runs the command and returns `(stdout, stderr, exit code)`.
/// A file named `-` is read from `stdin`.
pub fn run_cli<I, T>(args: I, stdin: &mut dyn Read) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { report::EXIT_INPUT } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { (text, String::new(), 0) } else { (String::new(), text, code) };
        }
    };
    match commands::run(&cli, stdin) {
        Ok(r) => {
            let out = match cli.format {
                Format::Text => r.text(),
                Format::Json => r.json(),
            };
            (out, String::new(), r.exit)
        }
        Err(e) => (String::new(), format!("error: {e:#}\n"), report::EXIT_INPUT),
    }
}
