//! Exact statevector (noiseless) and density-matrix (noisy) evolution.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{embedded_unitary, single_qubit_matrix, Circuit, GateInstance};
use crate::dist::{Counts, Distribution};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::noise::NoiseModel;

/// Largest register the density-matrix path will accept.
pub const DENSITY_MAX_QUBITS: usize = 12;
/// Largest register the statevector path will accept.
pub const STATEVECTOR_MAX_QUBITS: usize = 24;

/// Normalized pure state over `2^n` basis amplitudes, qubit 0 least
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// |0...0⟩.
    pub fn zero_state(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { num_qubits, amps }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn apply_gate(&mut self, gate: &GateInstance) {
        let dim = self.amps.len();
        if let Some(m) = single_qubit_matrix(gate.kind()) {
            let mask = 1usize << gate.target();
            for i in 0..dim {
                if i & mask == 0 {
                    let a = self.amps[i];
                    let b = self.amps[i | mask];
                    self.amps[i] = m[0][0] * a + m[0][1] * b;
                    self.amps[i | mask] = m[1][0] * a + m[1][1] * b;
                }
            }
        } else {
            let controls = gate.controls();
            let tmask = 1usize << gate.target();
            for i in 0..dim {
                if i & tmask == 0 && controls.iter().all(|&c| i & (1 << c) != 0) {
                    self.amps.swap(i, i | tmask);
                }
            }
        }
    }
}

/// Apply every gate of `circuit` to `initial` in order.
pub fn evolve_statevector(circuit: &Circuit, initial: &Statevector) -> Result<Statevector> {
    if circuit.num_qubits() != initial.num_qubits() {
        return Err(Error::validation("statevector/circuit size mismatch"));
    }
    if circuit.num_qubits() > STATEVECTOR_MAX_QUBITS {
        return Err(Error::capacity(format!(
            "statevector path capped at {STATEVECTOR_MAX_QUBITS} qubits"
        )));
    }
    let mut state = initial.clone();
    for gate in circuit.gates() {
        state.apply_gate(gate);
    }
    debug_assert!((state.norm() - 1.0).abs() < 1e-10);
    Ok(state)
}

/// Mixed state as a dense 2^n × 2^n matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// |0...0⟩⟨0...0|.
    pub fn zero_state(num_qubits: usize) -> Self {
        let mut mat = CMatrix::zeros(1 << num_qubits);
        mat.set(0, 0, Complex64::new(1.0, 0.0));
        DensityMatrix { num_qubits, mat }
    }

    pub fn from_statevector(state: &Statevector) -> Self {
        let dim = state.amps.len();
        let mut mat = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                mat.set(i, j, state.amps[i] * state.amps[j].conj());
            }
        }
        DensityMatrix {
            num_qubits: state.num_qubits,
            mat,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.mat.dim()).map(|i| self.mat.get(i, i).re).collect()
    }

    /// Max-norm of ρ − ρ†.
    pub fn hermiticity_defect(&self) -> f64 {
        self.mat.max_abs_diff(&self.mat.dagger())
    }
}

/// ρ → UρU†.
pub fn apply_gate_density(rho: &DensityMatrix, gate: &GateInstance) -> DensityMatrix {
    let u = embedded_unitary(gate, rho.num_qubits);
    DensityMatrix {
        num_qubits: rho.num_qubits,
        mat: u.mul(&rho.mat).mul(&u.dagger()),
    }
}

/// Depolarizing channel on the subsystem of `qubits`:
/// E(ρ) = (1−λ)ρ + λ · Tr_sub[ρ] ⊗ I/2^k, re-embedded at the original
/// qubit positions. λ may run up to 4^k/(4^k−1).
pub fn apply_depolarizing(
    rho: &DensityMatrix,
    qubits: &[usize],
    lambda: f64,
) -> Result<DensityMatrix> {
    let k = qubits.len();
    if k == 0 {
        return Err(Error::validation("depolarizing channel needs target qubits"));
    }
    for (i, &q) in qubits.iter().enumerate() {
        if q >= rho.num_qubits {
            return Err(Error::validation(format!("qubit {q} out of range")));
        }
        if qubits[..i].contains(&q) {
            return Err(Error::validation(format!("duplicate qubit {q}")));
        }
    }
    let bound = 4f64.powi(k as i32) / (4f64.powi(k as i32) - 1.0);
    if !(0.0..=bound).contains(&lambda) {
        return Err(Error::validation(format!(
            "lambda {lambda} outside [0, {bound}] for {k} qubit(s)"
        )));
    }
    if lambda == 0.0 {
        return Ok(rho.clone());
    }

    let n = rho.num_qubits;
    let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    let sub_dim = 1usize << k;
    let rest_dim = 1usize << rest.len();
    // full basis index for (sub index s, rest index r)
    let full = |s: usize, r: usize| -> usize {
        let mut idx = 0usize;
        for (bit, &q) in qubits.iter().enumerate() {
            idx |= ((s >> bit) & 1) << q;
        }
        for (bit, &q) in rest.iter().enumerate() {
            idx |= ((r >> bit) & 1) << q;
        }
        idx
    };

    // partial trace over the subsystem
    let mut traced = CMatrix::zeros(rest_dim);
    for r in 0..rest_dim {
        for rp in 0..rest_dim {
            let mut sum = Complex64::new(0.0, 0.0);
            for s in 0..sub_dim {
                sum += rho.mat.get(full(s, r), full(s, rp));
            }
            traced.set(r, rp, sum);
        }
    }

    let mut out = rho.mat.scale(Complex64::new(1.0 - lambda, 0.0));
    let weight = lambda / sub_dim as f64;
    for r in 0..rest_dim {
        for rp in 0..rest_dim {
            let v = traced.get(r, rp) * weight;
            for s in 0..sub_dim {
                out.add_assign_at(full(s, r), full(s, rp), v);
            }
        }
    }
    Ok(DensityMatrix {
        num_qubits: n,
        mat: out,
    })
}

/// Marginalize full-register probabilities onto the measured qubits.
fn marginalize(probs: &[f64], measured: &[usize]) -> Result<Distribution> {
    let mut out: BTreeMap<String, f64> = BTreeMap::new();
    for (i, &p) in probs.iter().enumerate() {
        let p = p.max(0.0); // absorb −1e−9-scale floating point residue
        if p < 1e-15 {
            continue;
        }
        let key: String = measured
            .iter()
            .map(|&q| if i & (1 << q) != 0 { '1' } else { '0' })
            .collect();
        *out.entry(key).or_insert(0.0) += p;
    }
    if out.is_empty() {
        // all weight below threshold can only happen for the empty register
        out.insert(String::new(), 1.0);
    }
    Distribution::new(out)
}

/// Deterministic exact output distribution over the measured qubits.
///
/// Noiseless runs take the statevector path. With a noise model, the
/// density matrix is evolved and the depolarizing channel is applied on
/// each gate's operand qubits immediately after that gate, with λ resolved
/// by the model.
pub fn run_exact(circuit: &Circuit, noise: Option<&NoiseModel>) -> Result<Distribution> {
    match noise {
        None => {
            let state = evolve_statevector(circuit, &Statevector::zero_state(circuit.num_qubits()))?;
            let probs: Vec<f64> = state.amplitudes().iter().map(|a| a.norm_sqr()).collect();
            marginalize(&probs, circuit.measured_qubits())
        }
        Some(model) => {
            if circuit.num_qubits() > DENSITY_MAX_QUBITS {
                return Err(Error::capacity(format!(
                    "density-matrix path capped at {DENSITY_MAX_QUBITS} qubits"
                )));
            }
            let mut rho = DensityMatrix::zero_state(circuit.num_qubits());
            for gate in circuit.gates() {
                rho = apply_gate_density(&rho, gate);
                let lambda = model.lambda_for(gate);
                if lambda > 0.0 {
                    rho = apply_depolarizing(&rho, gate.operands(), lambda)?;
                }
            }
            marginalize(&rho.diagonal(), circuit.measured_qubits())
        }
    }
}

/// Multinomial draw of `shots` outcomes, fully determined by `seed`.
pub fn sample_counts(dist: &Distribution, shots: u64, seed: u64) -> Result<Counts> {
    if shots < 1 {
        return Err(Error::validation("shots must be at least 1"));
    }
    let outcomes: Vec<(&String, f64)> = dist.probs().iter().map(|(k, &p)| (k, p)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = outcomes.len() - 1;
        for (i, (_, p)) in outcomes.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        *counts.entry(outcomes[chosen].0.clone()).or_insert(0) += 1;
    }
    Counts::new(counts, shots)
}
