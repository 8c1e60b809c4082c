//! Cycle-graph walk circuits and the independent vector-space walk oracle.
//!
//! The register holds `n` position qubits (node count `N = 2^n`) plus the
//! coin at index `n`. Coin value 0 drives the clockwise (+1) shift, coin 1
//! the counter-clockwise (−1) shift, and the shift leaves the coin bit
//! unchanged.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::circuit::{Circuit, GateInstance, GateKind};
use crate::dist::{bitstring, Distribution};
use crate::error::{Error, Result};

/// Initial coin state at node 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoinInit {
    Zero,
    One,
    /// Amplitudes (1, i)/√2; spreads the walk symmetrically.
    Symmetric,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSpec {
    pub num_position_qubits: usize,
    pub steps: usize,
    pub coin_init: CoinInit,
    pub use_optimized_4node: bool,
}

impl WalkSpec {
    pub fn new(num_position_qubits: usize, steps: usize) -> Self {
        WalkSpec {
            num_position_qubits,
            steps,
            coin_init: CoinInit::Zero,
            use_optimized_4node: false,
        }
    }

    pub fn node_count(&self) -> usize {
        1usize << self.num_position_qubits
    }

    /// Position qubits plus the coin.
    pub fn register_size(&self) -> usize {
        self.num_position_qubits + 1
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_position_qubits < 1 {
            return Err(Error::validation("walk needs at least one position qubit"));
        }
        if self.use_optimized_4node && self.num_position_qubits != 2 {
            return Err(Error::validation(
                "the optimized STEP gate applies to 4-node walks only",
            ));
        }
        Ok(())
    }
}

fn coin_qubit(n: usize) -> usize {
    n
}

/// The coin-controlled +1 carry cascade shared by INCREMENT and DECREMENT:
/// MCX({coin, q0..q_{t−1}} → q_t) for t = n−1 down to 1, then CNOT(coin → q0).
fn carry_cascade(circuit: &mut Circuit, n: usize) -> Result<()> {
    let coin = coin_qubit(n);
    for target in (1..n).rev() {
        let mut operands = vec![coin];
        operands.extend(0..target);
        operands.push(target);
        circuit.append(GateInstance::new(GateKind::Mcx(target + 1), operands)?)?;
    }
    circuit.append(GateInstance::new(GateKind::Cnot, vec![coin, 0])?)?;
    Ok(())
}

/// Coin-conditional +1 (mod 2^n) on the position register, active when the
/// coin is 0. The coin is X-conjugated so the cascade controls see a 1.
pub fn increment_circuit(n: usize) -> Result<Circuit> {
    if n < 1 {
        return Err(Error::validation("increment needs at least one position qubit"));
    }
    let coin = coin_qubit(n);
    let mut c = Circuit::new(n + 1, (0..n).rev().collect())?;
    c.append(GateInstance::new(GateKind::X, vec![coin])?)?;
    carry_cascade(&mut c, n)?;
    c.append(GateInstance::new(GateKind::X, vec![coin])?)?;
    Ok(c)
}

/// Coin-conditional −1 (mod 2^n), active when the coin is 1, via the
/// two's-complement identity x−1 = ¬(¬x+1).
pub fn decrement_circuit(n: usize) -> Result<Circuit> {
    if n < 1 {
        return Err(Error::validation("decrement needs at least one position qubit"));
    }
    let mut c = Circuit::new(n + 1, (0..n).rev().collect())?;
    for q in 0..n {
        c.append(GateInstance::new(GateKind::X, vec![q])?)?;
    }
    carry_cascade(&mut c, n)?;
    for q in 0..n {
        c.append(GateInstance::new(GateKind::X, vec![q])?)?;
    }
    Ok(c)
}

/// The fused 4-node STEP: both shift directions with no multi-controlled
/// gates, unitarily equivalent to increment followed by decrement at n = 2.
pub fn four_node_step() -> Circuit {
    let mut c = Circuit::new(3, vec![1, 0]).expect("fixed 3-qubit register");
    let coin = 2;
    c.append(GateInstance::new(GateKind::Cnot, vec![0, 1]).unwrap())
        .unwrap();
    c.append(GateInstance::new(GateKind::Cnot, vec![coin, 1]).unwrap())
        .unwrap();
    c.append(GateInstance::new(GateKind::X, vec![0]).unwrap())
        .unwrap();
    c
}

/// Full walk circuit: coin initialization, then `steps` repetitions of
/// [H(coin), shift]. Measures the position register MSB-first.
pub fn walk_circuit(spec: &WalkSpec) -> Result<Circuit> {
    spec.validate()?;
    let n = spec.num_position_qubits;
    let coin = coin_qubit(n);
    let mut c = Circuit::new(n + 1, (0..n).rev().collect())?;
    match spec.coin_init {
        CoinInit::Zero => {}
        CoinInit::One => c.append(GateInstance::new(GateKind::X, vec![coin])?)?,
        CoinInit::Symmetric => {
            c.append(GateInstance::new(GateKind::H, vec![coin])?)?;
            c.append(GateInstance::new(
                GateKind::Rz(std::f64::consts::FRAC_PI_2),
                vec![coin],
            )?)?;
        }
    }
    let increment = increment_circuit(n)?;
    let decrement = decrement_circuit(n)?;
    let step = four_node_step();
    for _ in 0..spec.steps {
        c.append(GateInstance::new(GateKind::H, vec![coin])?)?;
        if spec.use_optimized_4node {
            c.extend_from(&step)?;
        } else {
            c.extend_from(&increment)?;
            c.extend_from(&decrement)?;
        }
    }
    Ok(c)
}

/// Direct vector-space walk: Hadamard coin then conditional shift
/// ζ(x,0) = (x+1 mod N, 0), ζ(x,1) = (x−1 mod N, 1), applied `steps` times.
/// Returns the position distribution marginalized over the coin.
///
/// This path never touches the circuit IR; it is the independent oracle the
/// circuit construction is checked against.
pub fn walk_oracle(spec: &WalkSpec) -> Result<Distribution> {
    spec.validate()?;
    let n = spec.num_position_qubits;
    let nodes = spec.node_count();
    if nodes * 2 > 1 << 20 {
        return Err(Error::capacity("walk oracle capped at 2^20 amplitudes"));
    }
    // amplitude layout: [coin=0 block | coin=1 block], node-major inside
    let mut amps = vec![Complex64::new(0.0, 0.0); 2 * nodes];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match spec.coin_init {
        CoinInit::Zero => amps[0] = Complex64::new(1.0, 0.0),
        CoinInit::One => amps[nodes] = Complex64::new(1.0, 0.0),
        CoinInit::Symmetric => {
            amps[0] = Complex64::new(s, 0.0);
            amps[nodes] = Complex64::new(0.0, s);
        }
    }
    for _ in 0..spec.steps {
        // coin flip
        for x in 0..nodes {
            let a0 = amps[x];
            let a1 = amps[nodes + x];
            amps[x] = (a0 + a1) * s;
            amps[nodes + x] = (a0 - a1) * s;
        }
        // conditional shift
        let mut next = vec![Complex64::new(0.0, 0.0); 2 * nodes];
        for x in 0..nodes {
            next[(x + 1) % nodes] = amps[x];
            next[nodes + (x + nodes - 1) % nodes] = amps[nodes + x];
        }
        amps = next;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        debug_assert!((norm - 1.0).abs() < 1e-10, "walk state lost normalization");
    }
    let mut probs = BTreeMap::new();
    for x in 0..nodes {
        let p = amps[x].norm_sqr() + amps[nodes + x].norm_sqr();
        if p > 0.0 {
            *probs.entry(bitstring(x, n)).or_insert(0.0) += p;
        }
    }
    // render zero-probability outcomes absent; keep at least the support
    Distribution::new(probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::CMatrix;

    /// Basis-state image of a permutation circuit, read off its unitary.
    fn permutation_image(c: &Circuit, input: usize) -> usize {
        let u = c.unitary_of().unwrap();
        let dim = u.dim();
        let mut out = None;
        for row in 0..dim {
            if u.get(row, input).norm() > 0.5 {
                assert!(out.is_none(), "not a permutation");
                out = Some(row);
            }
        }
        out.expect("column has an image")
    }

    #[test]
    fn increment_maps_coin0_sector() {
        let inc = increment_circuit(3).unwrap();
        for x in 0..8 {
            // coin = 0 (bit 3 clear): x -> x+1 mod 8
            assert_eq!(permutation_image(&inc, x), (x + 1) % 8);
            // coin = 1: fixed
            assert_eq!(permutation_image(&inc, 8 | x), 8 | x);
        }
    }

    #[test]
    fn increment_n1_two_cycle() {
        let inc = increment_circuit(1).unwrap();
        assert_eq!(permutation_image(&inc, 0), 1);
        assert_eq!(permutation_image(&inc, 1), 0);
        assert_eq!(permutation_image(&inc, 2), 2);
        assert_eq!(permutation_image(&inc, 3), 3);
    }

    #[test]
    fn decrement_maps_coin1_sector() {
        let dec = decrement_circuit(3).unwrap();
        for x in 0..8usize {
            assert_eq!(permutation_image(&dec, 8 | x), 8 | ((x + 7) % 8));
            assert_eq!(permutation_image(&dec, x), x);
        }
    }

    #[test]
    fn censuses_match_construction() {
        let inc = increment_circuit(3).unwrap().gate_census();
        assert_eq!(inc["MCX3"], 1);
        assert_eq!(inc["MCX2"], 1);
        assert_eq!(inc["CNOT"], 1);
        assert_eq!(inc["X"], 2);

        let dec = decrement_circuit(3).unwrap().gate_census();
        assert_eq!(dec["MCX3"], 1);
        assert_eq!(dec["MCX2"], 1);
        assert_eq!(dec["CNOT"], 1);
        assert_eq!(dec["X"], 6);
    }

    #[test]
    fn one_step_walk_census() {
        let c = walk_circuit(&WalkSpec::new(3, 1)).unwrap();
        let census = c.gate_census();
        assert_eq!(census["H"], 1);
        assert_eq!(census["MCX3"], 2);
        assert_eq!(census["MCX2"], 2);
        assert_eq!(census["CNOT"], 2);
        assert_eq!(census["X"], 8);
    }

    #[test]
    fn shift_period_is_node_count() {
        for n in 1..=4usize {
            let mut shift = increment_circuit(n).unwrap();
            shift.extend_from(&decrement_circuit(n).unwrap()).unwrap();
            let u = shift.unitary_of().unwrap();
            let mut acc = CMatrix::identity(u.dim());
            for _ in 0..(1 << n) {
                acc = u.mul(&acc);
            }
            assert!(
                acc.max_abs_diff(&CMatrix::identity(u.dim())) < 1e-12,
                "S^N != I for n={n}"
            );
        }
    }

    #[test]
    fn four_node_step_truth_tables() {
        let step = four_node_step();
        // coin=0: +1 cycle
        for x in 0..4 {
            assert_eq!(permutation_image(&step, x), (x + 1) % 4);
        }
        // coin=1: −1 cycle
        for x in 0..4usize {
            assert_eq!(permutation_image(&step, 4 | x), 4 | ((x + 3) % 4));
        }
    }

    #[test]
    fn four_node_step_matches_increment_decrement() {
        let mut composed = increment_circuit(2).unwrap();
        composed.extend_from(&decrement_circuit(2).unwrap()).unwrap();
        let diff = composed
            .unitary_of()
            .unwrap()
            .phase_aligned_diff(&four_node_step().unitary_of().unwrap());
        assert!(diff < 1e-12);
    }

    #[test]
    fn four_node_step_census_only_cnot_and_x() {
        let census = four_node_step().gate_census();
        assert_eq!(census.keys().collect::<Vec<_>>(), ["CNOT", "X"]);
    }

    #[test]
    fn oracle_step_zero_is_point_mass() {
        let d = walk_oracle(&WalkSpec::new(3, 0)).unwrap();
        assert_eq!(d.prob("000"), 1.0);
        assert_eq!(d.probs().len(), 1);
    }

    #[test]
    fn oracle_single_step() {
        let d = walk_oracle(&WalkSpec::new(3, 1)).unwrap();
        assert!((d.prob("001") - 0.5).abs() < 1e-12);
        assert!((d.prob("111") - 0.5).abs() < 1e-12);
    }

    #[test]
    fn optimized_spec_requires_four_nodes() {
        let mut spec = WalkSpec::new(3, 1);
        spec.use_optimized_4node = true;
        assert!(walk_circuit(&spec).is_err());
    }
}
