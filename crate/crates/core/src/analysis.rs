//! Hellinger distance/fidelity and per-step fidelity series.

use std::collections::BTreeSet;

use crate::dist::{Counts, Distribution};
use crate::error::{Error, Result};

/// Counts → probabilities (count / shots).
pub fn normalize_counts(counts: &Counts) -> Result<Distribution> {
    if counts.shots() == 0 {
        return Err(Error::validation("cannot normalize zero shots"));
    }
    let shots = counts.shots() as f64;
    let probs = counts
        .counts()
        .iter()
        .map(|(k, &c)| (k.clone(), c as f64 / shots))
        .collect();
    Distribution::new(probs)
}

/// Bhattacharyya coefficient Σ√(p_i·q_i); missing keys count as zero.
pub fn bhattacharyya(p: &Distribution, q: &Distribution) -> Result<f64> {
    match (p.bit_len(), q.bit_len()) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::validation(format!(
                "bitstring length mismatch: {a} vs {b}"
            )))
        }
        _ => {}
    }
    let keys: BTreeSet<&String> = p.probs().keys().chain(q.probs().keys()).collect();
    Ok(keys.iter().map(|k| (p.prob(k) * q.prob(k)).sqrt()).sum())
}

/// Normalized discrete Hellinger distance, H = sqrt(1 − Σ√(p_i·q_i)) ∈ [0,1].
pub fn hellinger_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    let bc = bhattacharyya(p, q)?;
    Ok((1.0 - bc.min(1.0)).max(0.0).sqrt())
}

/// Hellinger fidelity (1 − H²)² = (Σ√(p_i·q_i))², 1 at equality.
pub fn hellinger_fidelity(p: &Distribution, q: &Distribution) -> Result<f64> {
    let bc = bhattacharyya(p, q)?;
    Ok(bc.min(1.0).powi(2))
}

/// One fidelity measurement per walk length, with its spread over repeats.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelityPoint {
    pub step: usize,
    pub fidelity_mean: f64,
    pub std_error: f64,
    pub repeats: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    entries: Vec<FidelityPoint>,
}

impl FidelitySeries {
    pub fn new(entries: Vec<FidelityPoint>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.repeats < 1 {
                return Err(Error::validation("repeats must be at least 1"));
            }
            if e.std_error < 0.0 {
                return Err(Error::validation("standard error must be non-negative"));
            }
            if i > 0 && entries[i - 1].step >= e.step {
                return Err(Error::validation("steps must be strictly increasing"));
            }
        }
        Ok(FidelitySeries { entries })
    }

    pub fn entries(&self) -> &[FidelityPoint] {
        &self.entries
    }
}

/// Per-step fidelity of repeated candidate distributions against a
/// reference: mean over repeats and standard error (sample standard
/// deviation / √R; zero when R = 1).
pub fn fidelity_series(
    reference: &[Distribution],
    candidate: &[Vec<Distribution>],
) -> Result<FidelitySeries> {
    if reference.len() != candidate.len() {
        return Err(Error::validation("step ranges differ"));
    }
    let mut entries = Vec::with_capacity(reference.len());
    for (step, (reference_dist, repeats)) in reference.iter().zip(candidate).enumerate() {
        if repeats.is_empty() {
            return Err(Error::validation(format!("no repeats at step {step}")));
        }
        let fids: Vec<f64> = repeats
            .iter()
            .map(|d| hellinger_fidelity(d, reference_dist))
            .collect::<Result<_>>()?;
        let r = fids.len();
        let mean = fids.iter().sum::<f64>() / r as f64;
        let std_error = if r == 1 {
            0.0
        } else {
            let var = fids.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (r as f64 - 1.0);
            var.sqrt() / (r as f64).sqrt()
        };
        entries.push(FidelityPoint {
            step,
            fidelity_mean: mean,
            std_error,
            repeats: r,
        });
    }
    FidelitySeries::new(entries)
}

/// Render a float with 6 significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.5e}")
    }
}

/// CSV with header `step,fidelity,std_error,repeats`.
pub fn series_to_csv(series: &FidelitySeries) -> String {
    let mut out = String::from("step,fidelity,std_error,repeats\n");
    for e in series.entries() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.step,
            sig6(e.fidelity_mean),
            sig6(e.std_error),
            e.repeats
        ));
    }
    out
}

pub fn series_from_csv(text: &str) -> Result<FidelitySeries> {
    let mut lines = text.lines();
    match lines.next() {
        Some("step,fidelity,std_error,repeats") => {}
        other => {
            return Err(Error::parse(format!(
                "unexpected fidelity CSV header {other:?}"
            )))
        }
    }
    let mut entries = Vec::new();
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::parse(format!("malformed CSV row {line:?}")));
        }
        let parse_f = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(format!("bad number {s:?}")))
        };
        entries.push(FidelityPoint {
            step: fields[0]
                .parse()
                .map_err(|_| Error::parse(format!("bad step {:?}", fields[0])))?,
            fidelity_mean: parse_f(fields[1])?,
            std_error: parse_f(fields[2])?,
            repeats: fields[3]
                .parse()
                .map_err(|_| Error::parse(format!("bad repeats {:?}", fields[3])))?,
        });
    }
    FidelitySeries::new(entries)
}
