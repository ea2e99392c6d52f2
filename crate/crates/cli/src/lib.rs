//! Subcommand implementations for `qtele`. Each command returns its full
//! output as a string so that runs can be compared byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use qudit_teleport::channel::SchmidtChannel;
use qudit_teleport::extensions::{
    fit_noise_response, imperfect_average_fidelity_closed, imperfect_teleport_mc, noise_response,
    standard_noise_response, Scheme,
};
use qudit_teleport::metrics::{case1_metrics, case2_metrics, resource_report, ResourceReport};
use qudit_teleport::protocol::{run_teleportation, OutcomeRecord};
use qudit_teleport::{fmt17, mc};
use serde::Serialize;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_RANDOM_SAMPLES: usize = 1000;
pub const DEFAULT_NOISE_Q: f64 = 0.05;

pub const SWEEP_HEADER: &str = "n,family,param,channel_entropy,measurement_entanglement,classical_bits";
pub const NOISE_HEADER: &str = "a0_sq,f0_closed,f1_closed,f0_fitted,f1_fitted,mc_stderr,standard";
pub const IMPERFECT_HEADER: &str = "a0,F_closed,F_mc,stderr";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<qudit_teleport::Error> for CliError {
    fn from(e: qudit_teleport::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn parse_number(token: &str) -> CliResult<f64> {
    let token = token.trim();
    let value = match token.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().map_err(|_| bad_number(token))?;
            let den: f64 = den.trim().parse().map_err(|_| bad_number(token))?;
            num / den
        }
        None => token.parse().map_err(|_| bad_number(token))?,
    };
    if !value.is_finite() {
        return Err(bad_number(token));
    }
    Ok(value)
}

fn bad_number(token: &str) -> CliError {
    CliError::Validation(format!("cannot parse number {token:?}"))
}

/// Comma-separated reals; `a/b` fractions are accepted.
pub fn parse_list(text: &str) -> CliResult<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(CliError::Validation("empty list".into()));
    }
    text.split(',').map(parse_number).collect()
}

/// `"α,β"` (real amplitudes) or `"re,im,re,im"`.
pub fn parse_qubit(text: &str) -> CliResult<(Complex64, Complex64)> {
    match parse_list(text)?.as_slice() {
        &[a, b] => Ok((Complex64::new(a, 0.0), Complex64::new(b, 0.0))),
        &[ar, ai, br, bi] => Ok((Complex64::new(ar, ai), Complex64::new(br, bi))),
        other => Err(CliError::Validation(format!(
            "qubit needs 2 or 4 numbers, got {}",
            other.len()
        ))),
    }
}

pub fn write_output(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

#[derive(Serialize)]
struct TeleportReport {
    n: usize,
    coeffs: Vec<f64>,
    outcomes: Vec<OutcomeRecord>,
    report: ResourceReport,
}

/// Runs the protocol once and renders the outcomes plus resources as JSON.
pub fn cmd_teleport(coeffs: &[f64], alpha: Complex64, beta: Complex64) -> CliResult<String> {
    let ch = SchmidtChannel::new(coeffs)?;
    let outcomes = run_teleportation(&ch, alpha, beta)?;
    let report = TeleportReport {
        n: ch.n(),
        coeffs: ch.coeffs().to_vec(),
        outcomes: outcomes.iter().map(|o| o.record()).collect(),
        report: resource_report(&ch),
    };
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Case1,
    Case2,
    Random,
    Vertex,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Case1 => "case1",
            Family::Case2 => "case2",
            Family::Random => "random",
            Family::Vertex => "vertex",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub family: Family,
    /// Curve parameter (`x`, `y`) or vertex index `τ`; unused for `random`.
    pub grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub seed: u64,
}

fn default_unit_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

fn sweep_row(out: &mut String, n: usize, family: Family, param: &str, r: &ResourceReport) {
    let _ = writeln!(
        out,
        "{n},{},{param},{},{},{}",
        family.name(),
        fmt17(r.channel_entropy),
        fmt17(r.measurement_entanglement),
        fmt17(r.classical_bits)
    );
}

/// Case I/II curves come from their closed forms, random and vertex channels
/// from the general pipeline.
pub fn cmd_sweep(config: &SweepConfig) -> CliResult<String> {
    let n = config.n;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    match config.family {
        Family::Case1 | Family::Case2 => {
            let grid = config.grid.clone().unwrap_or_else(default_unit_grid);
            for &t in &grid {
                let r = if config.family == Family::Case1 {
                    case1_metrics(n, t)?
                } else {
                    case2_metrics(n, t)?
                };
                sweep_row(&mut out, n, config.family, &fmt17(t), &r);
            }
        }
        Family::Vertex => {
            let taus: Vec<usize> = match &config.grid {
                Some(g) => g
                    .iter()
                    .map(|&t| {
                        if t >= 0.0 && t.fract() == 0.0 {
                            Ok(t as usize)
                        } else {
                            Err(CliError::Validation(format!(
                                "vertex index must be a non-negative integer, got {t}"
                            )))
                        }
                    })
                    .collect::<CliResult<_>>()?,
                None => (0..n).collect(),
            };
            for tau in taus {
                let r = resource_report(&SchmidtChannel::vertex(n, tau)?);
                sweep_row(&mut out, n, Family::Vertex, &tau.to_string(), &r);
            }
        }
        Family::Random => {
            let samples = config.samples.unwrap_or(DEFAULT_RANDOM_SAMPLES);
            check_samples(samples)?;
            for i in 0..samples {
                let mut rng = mc::shard_rng(config.seed, i as u64);
                let r = resource_report(&SchmidtChannel::sample_with(&mut rng, n)?);
                sweep_row(&mut out, n, Family::Random, &i.to_string(), &r);
            }
        }
    }
    Ok(out)
}

fn check_samples(samples: usize) -> CliResult<()> {
    if samples == 0 {
        return Err(CliError::Validation("samples must be at least 1".into()));
    }
    Ok(())
}

pub fn default_noise_grid() -> Vec<f64> {
    vec![0.0, 0.05, 0.1, 1.0 / 7.0, 0.2, 0.25, 0.3, 1.0 / 3.0]
}

pub fn default_imperfect_grid() -> Vec<f64> {
    let top = 1.0 / 3f64.sqrt();
    (0..=4).map(|i| top * i as f64 / 4.0).collect()
}

fn qutrit_from_a0_sq(t: f64) -> CliResult<SchmidtChannel> {
    if !(-1e-12..=1.0 / 3.0 + 1e-12).contains(&t) {
        return Err(CliError::Validation(format!("a0^2 = {t} outside [0, 1/3]")));
    }
    Ok(SchmidtChannel::qutrit(t.clamp(0.0, 1.0 / 3.0).sqrt())?)
}

/// One row per `a₀²`: reference responses, Monte Carlo fits for dephasing ket
/// 0 and ket 1, the larger fit standard error and the standard-scheme `1/3`.
pub fn cmd_noise(a0_sq_grid: &[f64], q: f64, samples: usize, seed: u64) -> CliResult<String> {
    check_samples(samples)?;
    if !(q > 0.0 && q <= 1.0) {
        return Err(CliError::Validation(format!("q = {q} outside (0, 1]")));
    }
    let mut out = String::from(NOISE_HEADER);
    out.push('\n');
    for &t in a0_sq_grid {
        let ch = qutrit_from_a0_sq(t)?;
        let scheme = Scheme::Perfect(ch.clone());
        let fit0 = fit_noise_response(&scheme, 0, q, samples, seed)?;
        let fit1 = fit_noise_response(&scheme, 1, q, samples, seed)?;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt17(t),
            fmt17(noise_response(&ch, 0)?),
            fmt17(noise_response(&ch, 1)?),
            fmt17(fit0.mean),
            fmt17(fit1.mean),
            fmt17(fit0.stderr.max(fit1.stderr)),
            fmt17(standard_noise_response(0)?)
        );
    }
    Ok(out)
}

pub fn cmd_imperfect(a0_grid: &[f64], samples: usize, seed: u64) -> CliResult<String> {
    check_samples(samples)?;
    let mut out = String::from(IMPERFECT_HEADER);
    out.push('\n');
    for &a0 in a0_grid {
        let ch = SchmidtChannel::qutrit(a0)?;
        let est = imperfect_teleport_mc(&ch, samples, seed)?;
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt17(a0),
            fmt17(imperfect_average_fidelity_closed(&ch)?),
            fmt17(est.mean),
            fmt17(est.stderr)
        );
    }
    Ok(out)
}
