//! Lowering to the native set {CNOT, ID, RZ, SX, X}.
//!
//! H becomes RZ(π/2)·SX·RZ(π/2). MCX(k) becomes H-conjugated multi-controlled
//! Z realized as a Gray-code parity network with 2^{k+1}−2 CNOTs and
//! 2^{k+1}−1 RZ(±π/2^k) rotations. A peephole pass then fuses adjacent RZ
//! gates on the same qubit.

use crate::circuit::{Circuit, GateInstance, GateKind};
use crate::error::Result;

const TAU2: f64 = 4.0 * std::f64::consts::PI; // RZ period (up to global phase sign)

/// Native replacement for H on `qubit`: RZ(π/2), SX, RZ(π/2).
pub fn decompose_h(qubit: usize) -> Vec<GateInstance> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    vec![
        GateInstance::new(GateKind::Rz(half_pi), vec![qubit]).unwrap(),
        GateInstance::new(GateKind::Sx, vec![qubit]).unwrap(),
        GateInstance::new(GateKind::Rz(half_pi), vec![qubit]).unwrap(),
    ]
}

/// Multi-controlled Z phase network over `qubits`, accumulator-last.
///
/// Emits one RZ(±θ) per non-empty subset of `qubits` (sign by subset-size
/// parity) on a qubit holding that subset's parity. Subsets containing the
/// accumulator are walked in reflected Gray-code order so each transition
/// costs one CNOT; the remaining subsets recurse on the prefix.
fn mcz_network(qubits: &[usize], theta: f64, out: &mut Vec<GateInstance>) {
    let rz = |angle: f64, q: usize| GateInstance::new(GateKind::Rz(angle), vec![q]).unwrap();
    let cnot = |c: usize, t: usize| GateInstance::new(GateKind::Cnot, vec![c, t]).unwrap();
    // sign of the subset phase: + for odd-size subsets, − for even
    let signed = |size: usize| if size % 2 == 1 { theta } else { -theta };

    let (&acc, rest) = qubits.split_last().expect("non-empty qubit list");
    if rest.is_empty() {
        out.push(rz(signed(1), acc));
        return;
    }
    // subsets {acc} ∪ S for S ⊆ rest, S enumerated in Gray order
    out.push(rz(signed(1), acc));
    let mut gray_prev = 0usize;
    for i in 1..(1usize << rest.len()) {
        let gray = i ^ (i >> 1);
        let toggled = (gray ^ gray_prev).trailing_zeros() as usize;
        gray_prev = gray;
        out.push(cnot(rest[toggled], acc));
        out.push(rz(signed(gray.count_ones() as usize + 1), acc));
    }
    // the Gray walk ends at the top singleton; one CNOT restores the accumulator
    out.push(cnot(rest[rest.len() - 1], acc));
    mcz_network(rest, theta, out);
}

/// Native replacement for MCX: H(target), C^k-Z Gray-code network, H(target).
pub fn decompose_mcx(num_controls: usize, controls: &[usize], target: usize) -> Vec<GateInstance> {
    assert_eq!(controls.len(), num_controls);
    let theta = std::f64::consts::PI / (1u64 << num_controls) as f64;
    let mut qubits: Vec<usize> = controls.to_vec();
    qubits.push(target);
    let mut out = decompose_h(target);
    mcz_network(&qubits, theta, &mut out);
    out.extend(decompose_h(target));
    out
}

/// Fuse adjacent RZ gates on the same qubit; drop fused rotations whose
/// angle is ≡ 0 (mod 4π) within 1e−12.
pub fn merge_rz(circuit: &Circuit) -> Circuit {
    let mut out = Circuit::new(
        circuit.num_qubits(),
        circuit.measured_qubits().to_vec(),
    )
    .expect("source circuit already validated");
    let mut kept: Vec<GateInstance> = Vec::with_capacity(circuit.gates().len());
    for gate in circuit.gates() {
        if let GateKind::Rz(angle) = gate.kind() {
            let q = gate.target();
            // last kept gate touching q, if it is an RZ, absorbs this one
            let prev = kept
                .iter()
                .rposition(|g| g.operands().contains(&q));
            if let Some(idx) = prev {
                if let GateKind::Rz(prev_angle) = kept[idx].kind() {
                    let fused = prev_angle + angle;
                    let residue = fused.rem_euclid(TAU2);
                    if residue.min(TAU2 - residue) <= 1e-12 {
                        kept.remove(idx);
                    } else {
                        kept[idx] = GateInstance::new(GateKind::Rz(fused), vec![q]).unwrap();
                    }
                    continue;
                }
            }
        }
        kept.push(gate.clone());
    }
    for g in kept {
        out.append(g).expect("gates already validated");
    }
    out
}

/// Lower a circuit into the native gate set and fuse rotations.
/// Measured qubits are preserved; the result is unitarily equivalent to the
/// source up to global phase.
pub fn transpile(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.num_qubits(), circuit.measured_qubits().to_vec())?;
    for gate in circuit.gates() {
        match gate.kind() {
            GateKind::H => {
                for g in decompose_h(gate.target()) {
                    out.append(g)?;
                }
            }
            GateKind::Mcx(k) => {
                for g in decompose_mcx(*k, gate.controls(), gate.target()) {
                    out.append(g)?;
                }
            }
            _ => out.append(gate.clone())?,
        }
    }
    Ok(merge_rz(&out))
}
