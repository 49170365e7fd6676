//! Command-line interface: `share`, `reconstruct`, `analyze`, `verify`, `plot`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::channels::DEFAULT_ENUMERATION_CAP;
use crate::config::{ExperimentConfig, Overrides};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::oracle::Oracle;
use crate::plot::{read_sweep_csv, render_svg};
use crate::scheme::ShamirParams;
use crate::sweep::{run_markov, run_single, run_sweep, write_csv, write_markov_csv};

/// Environment variable overriding the enumeration cap.
pub const CAP_ENV: &str = "LEAKSHARE_ENUM_CAP";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "leakshare", version, about = "Secret sharing over GF(2^l) with leakage bounds and exact oracles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Split a secret into Shamir shares and write a JSON share file.
    Share(ShareArgs),
    /// Recover the secret from a share file.
    Reconstruct(ReconstructArgs),
    /// Print the bound report for a configuration as JSON.
    Analyze(RunArgs),
    /// Compare bounds against exact leakage and write a CSV.
    Verify(RunArgs),
    /// Draw a sweep CSV as an SVG chart.
    Plot(PlotArgs),
}

#[derive(Args, Debug)]
pub struct ShareArgs {
    #[arg(long)]
    pub secret: u32,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    /// Field as `l=3,poly=0b1011`; poly is optional.
    #[arg(long, value_parser = parse_field)]
    pub field: FieldSpec,
    /// Evaluation points; default 1..=n.
    #[arg(long, value_delimiter = ',')]
    pub gammas: Option<Vec<u32>>,
    /// Polynomial coefficients a_1..a_{t-1}; drawn from --seed when absent.
    #[arg(long, value_delimiter = ',')]
    pub coeffs: Option<Vec<u32>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    pub file: PathBuf,
    /// Indices (0-based) of the shares to use; default all.
    #[arg(long, value_delimiter = ',')]
    pub parties: Option<Vec<usize>>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub t: Option<usize>,
    #[arg(long)]
    pub t_prime: Option<usize>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Output file (CSV for verify, JSON for analyze); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the full rows as JSON (verify only).
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    pub csv: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Label of the x axis.
    #[arg(long, default_value = "axis")]
    pub label: String,
}

/// JSON share file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShareFile {
    pub field: FieldSpec,
    pub n: usize,
    pub t: usize,
    pub gammas: Vec<u32>,
    pub shares: Vec<u32>,
}

fn parse_int(s: &str) -> std::result::Result<u32, String> {
    let s = s.trim();
    let (digits, radix) = if let Some(b) = s.strip_prefix("0b") {
        (b, 2)
    } else if let Some(h) = s.strip_prefix("0x") {
        (h, 16)
    } else {
        (s, 10)
    };
    u32::from_str_radix(digits, radix).map_err(|e| format!("{s}: {e}"))
}

/// Parses `l=3,poly=0b1011` (poly optional).
pub fn parse_field(s: &str) -> std::result::Result<FieldSpec, String> {
    let mut l = None;
    let mut poly = None;
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=value, got {part}"))?;
        match k.trim() {
            "l" => l = Some(parse_int(v)?),
            "poly" => poly = Some(parse_int(v)?),
            other => return Err(format!("unknown field key {other}")),
        }
    }
    let l = l.ok_or("missing l")?;
    match poly {
        Some(p) => FieldSpec::new(l, p),
        None => FieldSpec::with_default_poly(l),
    }
    .map_err(|e| e.to_string())
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::StateSpaceTooLarge { .. } => EXIT_CAP,
        _ => EXIT_CONFIG,
    }
}

/// Oracle with the cap from the environment, if set.
pub fn oracle_from_env() -> Result<Oracle> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .map(Oracle::new)
            .map_err(|e| Error::Config(format!("{CAP_ENV}={v}: {e}"))),
        Err(_) => Ok(Oracle::new(DEFAULT_ENUMERATION_CAP)),
    }
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn load_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    cfg.apply(&Overrides {
        n: args.n,
        t: args.t,
        t_prime: args.t_prime,
        q: args.q,
        eps: args.eps,
        seed: args.seed,
        trials: args.trials,
    })?;
    Ok(cfg)
}

fn cmd_share(a: &ShareArgs) -> Result<i32> {
    let gammas = a.gammas.clone().unwrap_or_else(|| (1..=a.n as u32).collect());
    let params = ShamirParams::new(a.field, a.n, a.t, gammas.iter().map(|&g| FieldElement::new(g)).collect())?;
    let secret = a.field.element(a.secret)?;
    let shares = match &a.coeffs {
        Some(c) => {
            let coeffs = c.iter().map(|&v| a.field.element(v)).collect::<Result<Vec<_>>>()?;
            params.share(secret, &coeffs)?
        }
        None => params.share_seeded(secret, a.seed)?,
    };
    let file = ShareFile {
        field: a.field,
        n: a.n,
        t: a.t,
        gammas,
        shares: shares.as_slice().iter().map(|s| s.value()).collect(),
    };
    let mut text = serde_json::to_string_pretty(&file).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_reconstruct(a: &ReconstructArgs) -> Result<i32> {
    let text = fs::read_to_string(&a.file).map_err(|e| Error::Io(format!("{}: {e}", a.file.display())))?;
    let file: ShareFile = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", a.file.display())))?;
    if file.shares.len() != file.n || file.gammas.len() != file.n {
        return Err(Error::Config("share file lists inconsistent share and point counts".into()));
    }
    let params = ShamirParams::new(file.field, file.n, file.t, file.gammas.iter().map(|&g| FieldElement::new(g)).collect())?;
    let parties = a.parties.clone().unwrap_or_else(|| (0..file.n).collect());
    let pairs = parties
        .iter()
        .map(|&i| {
            if i >= file.n {
                return Err(Error::Parameter(format!("party {i} out of range")));
            }
            Ok((FieldElement::new(file.gammas[i]), file.field.element(file.shares[i])?))
        })
        .collect::<Result<Vec<_>>>()?;
    let secret = params.reconstruct(&pairs)?;
    write_output(None, format!("{}\n", secret.value()).as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_analyze(a: &RunArgs) -> Result<i32> {
    let cfg = load_config(a)?;
    let rep = cfg.build()?.report()?;
    let mut text = serde_json::to_string_pretty(&rep).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    write_output(a.out.as_deref(), text.as_bytes())?;
    Ok(EXIT_OK)
}

fn cmd_verify(a: &RunArgs) -> Result<i32> {
    let cfg = load_config(a)?;
    let csv_path = a.out.clone().or_else(|| cfg.output.csv.as_ref().map(PathBuf::from));
    let json_path = a.json.clone().or_else(|| cfg.output.json.as_ref().map(PathBuf::from));

    if let Some(m) = &cfg.markov {
        let rows = run_markov(m)?;
        let mut buf = Vec::new();
        write_markov_csv(&rows, &mut buf)?;
        write_output(csv_path.as_deref(), &buf)?;
        if let Some(p) = &json_path {
            let text = serde_json::to_string_pretty(&rows).map_err(|e| Error::Internal(e.to_string()))?;
            write_output(Some(p), text.as_bytes())?;
        }
        let failures = rows.iter().filter(|r| !r.passes()).count();
        if failures > 0 {
            eprintln!("{failures} of {} grid points exceed the Markov-gap tolerance", rows.len());
            return Ok(EXIT_VERIFY_FAILED);
        }
        return Ok(EXIT_OK);
    }

    let oracle = oracle_from_env()?;
    let outcome = if cfg.sweep.is_some() { run_sweep(&cfg, &oracle)? } else { run_single(&cfg, &oracle)? };
    for (v, msg) in &outcome.skipped {
        eprintln!("warning: skipped {}={v}: {msg}", outcome.axis);
    }
    let mut buf = Vec::new();
    write_csv(&outcome.rows, &mut buf)?;
    write_output(csv_path.as_deref(), &buf)?;
    if let Some(p) = &json_path {
        let text = serde_json::to_string_pretty(&outcome).map_err(|e| Error::Internal(e.to_string()))?;
        write_output(Some(p), text.as_bytes())?;
    }
    if !outcome.passes() {
        let bad = outcome.rows.iter().filter(|r| !r.passes()).count();
        eprintln!("{bad} of {} rows violate their bound", outcome.rows.len());
        return Ok(EXIT_VERIFY_FAILED);
    }
    if outcome.rows.is_empty() {
        eprintln!("every sweep point exceeded the enumeration cap");
        return Ok(EXIT_CAP);
    }
    Ok(EXIT_OK)
}

fn cmd_plot(a: &PlotArgs) -> Result<i32> {
    let file = fs::File::open(&a.csv).map_err(|e| Error::Io(format!("{}: {e}", a.csv.display())))?;
    let points = read_sweep_csv(file)?;
    let svg = render_svg(&points, &a.label)?;
    write_output(a.out.as_deref(), svg.as_bytes())?;
    Ok(EXIT_OK)
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Share(a) => cmd_share(a),
        Command::Reconstruct(a) => cmd_reconstruct(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
