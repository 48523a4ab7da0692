mod commands;
mod settings;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use settings::{Flags, Plane, Reals, Size};

/// Quasiregular dynamics toolkit: derive the constants of the Zorich-based
/// map, verify its construction, and study escaping orbits.
#[derive(Parser, Debug)]
#[command(name = "qrdyn", version)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print c₀, L, L′, K_F and every star-centre certificate as key = value lines
    Constants,
    /// Run verification suites; prints `suite metric value limit PASS|FAIL` lines
    Verify {
        /// symmetry, seams, orientation, expansion, extension-roundtrip or escape-rates (repeatable; default all)
        #[arg(long)]
        suite: Vec<String>,
        /// Points per check, or per seam interface
        #[arg(long)]
        samples: Option<usize>,
        /// Point pairs per beam for the expansion suite
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Render an escape-time slice to a binary PPM (P6)
    ///
    /// Colours: blue to sand by first step n with x₃ < 0, amber for radial
    /// escape, near-black when the budget runs out.
    Render {
        /// Slicing plane, e.g. x2=0
        #[arg(long)]
        plane: Option<Plane>,
        /// h_min,h_max,v_min,v_max over the two free coordinates in order
        /// (default -4,4,-2,L+3)
        #[arg(long, allow_hyphen_values = true)]
        window: Option<Reals>,
        /// Image size WxH
        #[arg(long)]
        size: Option<Size>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write an orbit as CSV
    ///
    /// Columns: k, x1..xD (blank for steps past float range), rho = log|x_k|,
    /// a_k = log⁺(rho)/k (blank at k = 0), class of the whole orbit.
    Orbit {
        /// Start point, comma separated
        #[arg(long, allow_hyphen_values = true)]
        start: Option<Reals>,
    },
    /// Write an escape-rate series as CSV
    ///
    /// Columns: k, rho = log|map^{kp}(x)|, a_k = log⁺(rho)/k (blank at k = 0).
    Rates {
        /// Start point, comma separated
        #[arg(long, allow_hyphen_values = true)]
        start: Option<Reals>,
        /// Period p of the series
        #[arg(long)]
        period: Option<usize>,
    },
}

pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_CONSTRUCTION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command, &cli.flags) {
        Ok(()) => ExitCode::SUCCESS,
        Err(fail) => {
            eprintln!("qrdyn: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
