//! Noise-strength sweeps over (strength × step) cells.
//!
//! Cells are independent and run data-parallel under the `parallel` feature
//! (rayon); without it the same code runs sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::analysis::hellinger_fidelity;
use crate::circuit::Circuit;
use crate::dist::Distribution;
use crate::error::{Error, Result};
use crate::noise::{NoiseMode, NoiseModel};
use crate::sim::{run_exact, sample_counts};
use crate::transpile::transpile;
use crate::walk::{walk_circuit, CoinInit, WalkSpec};

/// How sweep cells produce candidate distributions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepMode {
    /// Read probabilities straight off the density-matrix diagonal.
    Exact,
    /// Draw shots and report mean fidelity with standard error over repeats.
    Sampled {
        shots: u64,
        repeats: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Node count, a power of two.
    pub nodes: usize,
    pub max_steps: usize,
    /// Distinct strengths, sorted ascending, each in [0, 1].
    pub strengths: Vec<f64>,
    pub mode: SweepMode,
    pub coin_init: CoinInit,
    /// Base model whose strength field each sweep cell overrides.
    pub base_model: NoiseModel,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 2 || !self.nodes.is_power_of_two() {
            return Err(Error::validation(format!(
                "node count {} is not a power of two >= 2",
                self.nodes
            )));
        }
        if self.strengths.is_empty() {
            return Err(Error::validation("no strengths given"));
        }
        for (i, &s) in self.strengths.iter().enumerate() {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::validation(format!("strength {s} outside [0, 1]")));
            }
            if i > 0 && self.strengths[i - 1] >= s {
                return Err(Error::validation(
                    "strengths must be distinct and sorted ascending",
                ));
            }
        }
        if let SweepMode::Sampled { shots, repeats, .. } = self.mode {
            if shots < 1 || repeats < 1 {
                return Err(Error::validation("shots and repeats must be at least 1"));
            }
        }
        self.walk_spec(0).validate()
    }

    pub fn num_position_qubits(&self) -> usize {
        self.nodes.trailing_zeros() as usize
    }

    pub fn walk_spec(&self, steps: usize) -> WalkSpec {
        WalkSpec {
            num_position_qubits: self.num_position_qubits(),
            steps,
            coin_init: self.coin_init,
            use_optimized_4node: false,
        }
    }
}

/// One sweep cell result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub strength: f64,
    pub step: usize,
    pub fidelity: f64,
    pub std_error: f64,
}

/// The default strength grid: {0, 0.02, 0.06, 0.1, 0.2, ..., 1.0}.
pub fn default_strengths() -> Vec<f64> {
    let mut s = vec![0.0, 0.02, 0.06, 0.1];
    for i in 2..=10 {
        s.push(i as f64 / 10.0);
    }
    s
}

/// Map `eval` over `items`, in parallel when the `parallel` feature is on.
pub fn map_maybe_parallel<T: Sync, U: Send>(
    items: &[T],
    eval: impl Fn(&T) -> Result<U> + Sync + Send,
) -> Result<Vec<U>> {
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(eval).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(eval).collect()
    }
}

/// Always-sequential map, kept for benchmarking against the parallel path.
pub fn map_sequential<T, U>(items: &[T], eval: impl Fn(&T) -> Result<U>) -> Result<Vec<U>> {
    items.iter().map(eval).collect()
}

/// Build the circuit a noisy cell simulates: the walk circuit, transpiled
/// first when the model attaches noise to native gates.
fn candidate_circuit(spec: &WalkSpec, model: &NoiseModel) -> Result<Circuit> {
    let circuit = walk_circuit(spec)?;
    match model.mode {
        NoiseMode::Abstract => Ok(circuit),
        NoiseMode::Native => transpile(&circuit),
    }
}

/// Noisy exact distribution for one walk length under `model`.
pub fn noisy_distribution(spec: &WalkSpec, model: &NoiseModel) -> Result<Distribution> {
    run_exact(&candidate_circuit(spec, model)?, Some(model))
}

/// Per-step exact fidelity of `model` against the noiseless run, for the
/// given walk lengths.
pub fn fidelity_curve(spec: &WalkSpec, steps: &[usize], model: &NoiseModel) -> Result<Vec<f64>> {
    map_maybe_parallel(steps, |&t| {
        let step_spec = WalkSpec { steps: t, ..*spec };
        let reference = run_exact(&walk_circuit(&step_spec)?, None)?;
        let noisy = noisy_distribution(&step_spec, model)?;
        hellinger_fidelity(&noisy, &reference)
    })
}

fn eval_cell(config: &SweepConfig, strength: f64, step: usize) -> Result<SweepRow> {
    let spec = config.walk_spec(step);
    let reference = run_exact(&walk_circuit(&spec)?, None)?;
    let model = config.base_model.scaled(strength)?;
    let noisy = noisy_distribution(&spec, &model)?;
    match config.mode {
        SweepMode::Exact => Ok(SweepRow {
            strength,
            step,
            fidelity: hellinger_fidelity(&noisy, &reference)?,
            std_error: 0.0,
        }),
        SweepMode::Sampled {
            shots,
            repeats,
            seed,
        } => {
            let mut fids = Vec::with_capacity(repeats);
            for r in 0..repeats {
                let cell_seed = derive_seed(seed, &[strength.to_bits(), step as u64, r as u64]);
                let counts = sample_counts(&noisy, shots, cell_seed)?;
                fids.push(hellinger_fidelity(
                    &crate::analysis::normalize_counts(&counts)?,
                    &reference,
                )?);
            }
            let mean = fids.iter().sum::<f64>() / repeats as f64;
            let std_error = if repeats == 1 {
                0.0
            } else {
                let var = fids.iter().map(|f| (f - mean).powi(2)).sum::<f64>()
                    / (repeats as f64 - 1.0);
                var.sqrt() / (repeats as f64).sqrt()
            };
            Ok(SweepRow {
                strength,
                step,
                fidelity: mean,
                std_error,
            })
        }
    }
}

/// Stable per-cell seed derivation (splitmix-style mixing).
pub fn derive_seed(base: u64, words: &[u64]) -> u64 {
    let mut state = base;
    for &w in words {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(w);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        state = z ^ (z >> 31);
    }
    state
}

/// Run every (strength, step) cell; rows come back sorted by strength then
/// step regardless of execution order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let cells: Vec<(f64, usize)> = config
        .strengths
        .iter()
        .flat_map(|&s| (0..=config.max_steps).map(move |t| (s, t)))
        .collect();
    map_maybe_parallel(&cells, |&(s, t)| eval_cell(config, s, t))
}

/// Sequential twin of [`run_sweep`], for benchmark comparison.
pub fn run_sweep_sequential(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    let cells: Vec<(f64, usize)> = config
        .strengths
        .iter()
        .flat_map(|&s| (0..=config.max_steps).map(move |t| (s, t)))
        .collect();
    map_sequential(&cells, |&(s, t)| eval_cell(config, s, t))
}

/// Sweep rows as CSV: `strength,step,fidelity,std_error`.
pub fn sweep_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("strength,step,fidelity,std_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            crate::analysis::sig6(r.strength),
            r.step,
            crate::analysis::sig6(r.fidelity),
            crate::analysis::sig6(r.std_error)
        ));
    }
    out
}
