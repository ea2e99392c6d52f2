use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qudit_teleport_cli::{
    cmd_imperfect, cmd_noise, cmd_sweep, cmd_teleport, default_imperfect_grid, default_noise_grid, parse_list,
    parse_qubit, write_output, CliResult, Family, SweepConfig, DEFAULT_MC_SAMPLES, DEFAULT_NOISE_Q, DEFAULT_SEED,
};

#[derive(Parser)]
#[command(
    name = "qtele",
    version,
    about = "Qubit teleportation through two-qudit Schmidt channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Teleport one qubit and print outcomes and resources as JSON
    Teleport {
        /// Ascending Schmidt coefficients, comma separated
        #[arg(long)]
        coeffs: String,
        /// "alpha,beta" or "re,im,re,im"
        #[arg(long, default_value = "1,0")]
        qubit: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resource curves or random scatter as CSV
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        family: Family,
        /// x / y values (case1, case2) or vertex indices
        #[arg(long)]
        grid: Option<String>,
        /// Number of random channels
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase-noise responses versus a0^2 as CSV
    Noise {
        /// a0^2 values in [0, 1/3]
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_NOISE_Q)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average qutrit teleportation fidelity versus a0 as CSV
    Imperfect {
        /// a0 values in [0, 1/sqrt(3)]
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn grid_or(text: Option<String>, default: fn() -> Vec<f64>) -> CliResult<Vec<f64>> {
    text.map_or_else(|| Ok(default()), |t| parse_list(&t))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Teleport { coeffs, qubit, out } => {
            let (alpha, beta) = parse_qubit(&qubit)?;
            let text = cmd_teleport(&parse_list(&coeffs)?, alpha, beta)?;
            write_output(out.as_deref(), &text)
        }
        Command::Sweep {
            n,
            family,
            grid,
            samples,
            seed,
            out,
        } => {
            let config = SweepConfig {
                n,
                family,
                grid: grid.map(|g| parse_list(&g)).transpose()?,
                samples,
                seed,
            };
            write_output(out.as_deref(), &cmd_sweep(&config)?)
        }
        Command::Noise {
            grid,
            q,
            samples,
            seed,
            out,
        } => {
            let grid = grid_or(grid, default_noise_grid)?;
            write_output(out.as_deref(), &cmd_noise(&grid, q, samples, seed)?)
        }
        Command::Imperfect {
            grid,
            samples,
            seed,
            out,
        } => {
            let grid = grid_or(grid, default_imperfect_grid)?;
            write_output(out.as_deref(), &cmd_imperfect(&grid, samples, seed)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qtele: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
