//! Bound-versus-oracle sweeps and their CSV output.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{report, BoundReport};
use crate::channels::{Channel, LeakageProfile};
use crate::config::{Compare, Experiment, ExperimentConfig, MarkovConfig, SweepAxis};
use crate::error::{Error, Result};
use crate::oracle::{markov_gap, Oracle};

/// Margins below this count as a violated bound.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Header of the sweep CSV.
pub const CSV_HEADER: [&str; 4] = ["axis", "bound", "exact", "margin"];

/// One evaluated sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: f64,
    /// The bound being checked and the matching exact value.
    pub bound: f64,
    pub exact: f64,
    pub margin: f64,
    /// Per-bit sum bound (clamped) and the bitwise bound when it applies.
    pub sum_bound: f64,
    pub bitwise_bound: Option<f64>,
    /// DS/SS envelopes for the compared bound.
    pub ds_bound: f64,
    pub ss_bound: f64,
    /// max over secret distributions of I(S;Z)/l and of max_i I(S^i;Z).
    pub exact_total_per_bit: f64,
    pub exact_bit_max: f64,
    pub n_tilde: usize,
}

impl SweepRow {
    pub fn passes(&self) -> bool {
        self.margin >= -MARGIN_TOLERANCE
    }
}

/// Rows in axis order plus points skipped because of the enumeration cap.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub axis: String,
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<(f64, String)>,
}

impl SweepOutcome {
    pub fn passes(&self) -> bool {
        self.rows.iter().all(SweepRow::passes)
    }
}

/// Compares bound and exact leakage for one instantiated experiment.
pub fn evaluate(exp: &Experiment, compare: Compare, oracle: &Oracle, axis: f64) -> Result<SweepRow> {
    let scheme = &exp.scheme;
    let spec = scheme.spec();
    let channels = exp
        .channels
        .as_ref()
        .ok_or_else(|| Error::Config("verification needs channel or channels, not only eps".into()))?;
    let q = spec.order();
    let observed: Vec<Channel> = channels
        .iter()
        .enumerate()
        .map(|(i, c)| if i < exp.t_prime { Channel::identity(q) } else { c.clone() })
        .collect();
    let profile = LeakageProfile::new(exp.eps.clone(), spec.bits(), scheme.n(), scheme.t(), exp.t_prime)?
        .with_per_bit_bsc(exp.per_bit_bsc);
    let rep: BoundReport = report(&profile, scheme, None, exp.secret_model)?;

    let kernel = oracle.kernel(scheme, &observed)?;
    let l = spec.bits();
    let mut total = 0.0f64;
    let mut bit_max = 0.0f64;
    for dist in &exp.secrets {
        total = total.max(kernel.mutual_information(dist)? / l as f64);
        for b in 0..l {
            bit_max = bit_max.max(kernel.bit_mutual_information(dist, b)?);
        }
    }
    let (bound, exact, ds, ss) = match compare {
        Compare::Sum => (rep.sum_bound, total, rep.eta_ds_bound, rep.eta_ss_bound),
        Compare::Bitwise => {
            let b = rep.per_bit_bound.ok_or_else(|| {
                Error::Config(rep.note.clone().unwrap_or_else(|| "no applicable bitwise bound".to_string()))
            })?;
            (b, bit_max, rep.per_bit_ds_bound.unwrap_or(f64::NAN), rep.per_bit_ss_bound.unwrap_or(f64::NAN))
        }
    };
    Ok(SweepRow {
        axis,
        bound,
        exact,
        margin: bound - exact,
        sum_bound: rep.sum_bound,
        bitwise_bound: rep.per_bit_bound,
        ds_bound: ds,
        ss_bound: ss,
        exact_total_per_bit: total,
        exact_bit_max: bit_max,
        n_tilde: rep.n_tilde,
    })
}

/// Runs every sweep point (in parallel) and returns rows sorted by axis value.
/// Points over the enumeration cap are skipped and listed; other errors abort.
pub fn run_sweep(cfg: &ExperimentConfig, oracle: &Oracle) -> Result<SweepOutcome> {
    let sweep = cfg.sweep.as_ref().ok_or_else(|| Error::Config("missing [sweep] section".into()))?;
    let results: Vec<(f64, Result<SweepRow>)> = sweep
        .values
        .par_iter()
        .map(|&v| (v, cfg.at(sweep.axis, v).and_then(|c| c.build()).and_then(|e| evaluate(&e, sweep.compare, oracle, v))))
        .collect();
    let mut out = SweepOutcome { axis: sweep.axis.name().to_string(), ..Default::default() };
    for (v, r) in results {
        match r {
            Ok(row) => out.rows.push(row),
            Err(e @ Error::StateSpaceTooLarge { .. }) => out.skipped.push((v, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    out.rows.sort_by(|a, b| a.axis.total_cmp(&b.axis));
    Ok(out)
}

/// Sweep over a single point when the config has no `[sweep]` section.
pub fn run_single(cfg: &ExperimentConfig, oracle: &Oracle) -> Result<SweepOutcome> {
    let compare = cfg.sweep.as_ref().map(|s| s.compare).unwrap_or_default();
    let axis = cfg.scheme.as_ref().map_or(0, |s| s.n) as f64;
    let row = evaluate(&cfg.build()?, compare, oracle, axis)?;
    Ok(SweepOutcome { axis: SweepAxis::N.name().to_string(), rows: vec![row], skipped: vec![] })
}

/// Formats with 12 significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-5..=11).contains(&mag) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([fmt_sig(r.axis), fmt_sig(r.bound), fmt_sig(r.exact), fmt_sig(r.margin)]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

/// One point of a Markov-gap grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovRow {
    pub k: u32,
    pub q: f64,
    pub alpha: f64,
    pub gap_mi: f64,
    pub gap_markov: f64,
}

impl MarkovRow {
    pub fn passes(&self) -> bool {
        self.gap_mi <= MARGIN_TOLERANCE && self.gap_markov <= MARGIN_TOLERANCE
    }
}

/// Evaluates the full `k × q × alpha` grid in row-major order.
pub fn run_markov(m: &MarkovConfig) -> Result<Vec<MarkovRow>> {
    let points: Vec<(u32, f64, f64)> = m
        .k
        .iter()
        .flat_map(|&k| m.q.iter().flat_map(move |&q| m.alpha.iter().map(move |&a| (k, q, a))))
        .collect();
    points
        .par_iter()
        .map(|&(k, q, alpha)| {
            let g = markov_gap(k, q, alpha)?;
            Ok(MarkovRow { k, q, alpha, gap_mi: g.gap_mi, gap_markov: g.gap_markov })
        })
        .collect()
}

pub fn write_markov_csv<W: Write>(rows: &[MarkovRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "q", "alpha", "gap_mi", "gap_markov"]).map_err(csv_err)?;
    for r in rows {
        w.write_record([r.k.to_string(), fmt_sig(r.q), fmt_sig(r.alpha), fmt_sig(r.gap_mi), fmt_sig(r.gap_markov)])
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
