//! Outcome distributions and shot counts, plus their on-disk documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Render `value` as a bitstring of `len` bits, most-significant first.
pub fn bitstring(value: usize, len: usize) -> String {
    (0..len)
        .rev()
        .map(|b| if value & (1 << b) != 0 { '1' } else { '0' })
        .collect()
}

/// Probabilities over position bitstrings (MSB-first over the measured
/// qubits). All keys have equal length; probabilities sum to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn new(probs: BTreeMap<String, f64>) -> Result<Self> {
        let mut total = 0.0;
        let mut len = None;
        for (key, &p) in &probs {
            if p.is_nan() || p < 0.0 {
                return Err(Error::validation(format!(
                    "probability of {key:?} is negative"
                )));
            }
            if key.chars().any(|c| c != '0' && c != '1') {
                return Err(Error::validation(format!("{key:?} is not a bitstring")));
            }
            match len {
                None => len = Some(key.len()),
                Some(l) if l != key.len() => {
                    return Err(Error::validation("bitstring keys of unequal length"))
                }
                _ => {}
            }
            total += p;
        }
        if !probs.is_empty() && (total - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Distribution { probs })
    }

    pub fn point_mass(key: String) -> Self {
        let mut probs = BTreeMap::new();
        probs.insert(key, 1.0);
        Distribution { probs }
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    pub fn prob(&self, key: &str) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    /// Common bitstring length, or `None` for the empty distribution.
    pub fn bit_len(&self) -> Option<usize> {
        self.probs.keys().next().map(String::len)
    }

    /// Largest per-outcome probability difference against `other`,
    /// treating missing keys as zero.
    pub fn max_abs_diff(&self, other: &Distribution) -> f64 {
        let mut keys: Vec<&String> = self.probs.keys().collect();
        keys.extend(other.probs.keys());
        keys.iter()
            .map(|k| (self.prob(k) - other.prob(k)).abs())
            .fold(0.0, f64::max)
    }
}

/// Per-bitstring shot tallies.
#[derive(Debug, Clone, PartialEq)]
pub struct Counts {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl Counts {
    pub fn new(counts: BTreeMap<String, u64>, shots: u64) -> Result<Self> {
        let total: u64 = counts.values().sum();
        if total != shots {
            return Err(Error::validation(format!(
                "counts sum to {total} but shots is {shots}"
            )));
        }
        Ok(Counts { counts, shots })
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }
}

// --- counts/v1 and dist/v1 documents ---------------------------------------

#[derive(Serialize, Deserialize)]
struct CountsDoc {
    format: String,
    backend: String,
    nodes: u64,
    steps: u64,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

#[derive(Serialize, Deserialize)]
struct DistDoc {
    format: String,
    backend: String,
    nodes: u64,
    steps: u64,
    probs: BTreeMap<String, f64>,
}

/// Metadata carried alongside a counts or distribution payload.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMeta {
    pub backend: String,
    pub nodes: u64,
    pub steps: u64,
}

pub fn write_counts(meta: &RunMeta, counts: &Counts) -> String {
    let doc = CountsDoc {
        format: "counts/v1".into(),
        backend: meta.backend.clone(),
        nodes: meta.nodes,
        steps: meta.steps,
        shots: counts.shots(),
        counts: counts.counts().clone(),
    };
    serde_json::to_string_pretty(&doc).expect("counts document serializes")
}

pub fn read_counts(text: &str) -> Result<(RunMeta, Counts)> {
    let doc: CountsDoc =
        serde_json::from_str(text).map_err(|e| Error::parse(format!("counts/v1: {e}")))?;
    if doc.format != "counts/v1" {
        return Err(Error::parse(format!("unexpected format {:?}", doc.format)));
    }
    let meta = RunMeta {
        backend: doc.backend,
        nodes: doc.nodes,
        steps: doc.steps,
    };
    Ok((meta, Counts::new(doc.counts, doc.shots)?))
}

pub fn write_distribution(meta: &RunMeta, dist: &Distribution) -> String {
    let doc = DistDoc {
        format: "dist/v1".into(),
        backend: meta.backend.clone(),
        nodes: meta.nodes,
        steps: meta.steps,
        probs: dist.probs().clone(),
    };
    serde_json::to_string_pretty(&doc).expect("distribution document serializes")
}

pub fn read_distribution(text: &str) -> Result<(RunMeta, Distribution)> {
    let doc: DistDoc =
        serde_json::from_str(text).map_err(|e| Error::parse(format!("dist/v1: {e}")))?;
    if doc.format != "dist/v1" {
        return Err(Error::parse(format!("unexpected format {:?}", doc.format)));
    }
    let meta = RunMeta {
        backend: doc.backend,
        nodes: doc.nodes,
        steps: doc.steps,
    };
    Ok((meta, Distribution::new(doc.probs)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bitstring_renders_msb_first() {
        assert_eq!(bitstring(1, 3), "001");
        assert_eq!(bitstring(7, 3), "111");
        assert_eq!(bitstring(0, 4), "0000");
    }

    #[test]
    fn distribution_validation() {
        let mut m = BTreeMap::new();
        m.insert("00".to_string(), 0.5);
        m.insert("11".to_string(), 0.5);
        Distribution::new(m.clone()).unwrap();
        m.insert("111".to_string(), 0.0);
        assert!(Distribution::new(m).is_err());

        let mut short = BTreeMap::new();
        short.insert("0".to_string(), 0.7);
        assert!(Distribution::new(short).is_err());
    }

    #[test]
    fn counts_must_sum_to_shots() {
        let mut m = BTreeMap::new();
        m.insert("0".to_string(), 3u64);
        m.insert("1".to_string(), 1u64);
        Counts::new(m.clone(), 4).unwrap();
        assert!(Counts::new(m, 5).is_err());
    }

    #[test]
    fn counts_doc_round_trip() {
        let mut m = BTreeMap::new();
        m.insert("010".to_string(), 100u64);
        m.insert("110".to_string(), 28u64);
        let counts = Counts::new(m, 128).unwrap();
        let meta = RunMeta {
            backend: "device".into(),
            nodes: 8,
            steps: 3,
        };
        let text = write_counts(&meta, &counts);
        let (meta2, counts2) = read_counts(&text).unwrap();
        assert_eq!(meta, meta2);
        assert_eq!(counts, counts2);
    }
}
