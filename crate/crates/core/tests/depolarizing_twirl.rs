//! Cross-check of the trace-replacement depolarizing form against the
//! uniform Pauli-sum form, built here from raw matrices.

use num_complex::Complex64;

use coinwalk_core::circuit::{Circuit, GateInstance, GateKind};
use coinwalk_core::linalg::CMatrix;
use coinwalk_core::sim::{apply_depolarizing, evolve_statevector, DensityMatrix, Statevector};

fn pauli(which: usize) -> [[Complex64; 2]; 2] {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    match which {
        0 => [[z(1.0, 0.0), z(0.0, 0.0)], [z(0.0, 0.0), z(1.0, 0.0)]],
        1 => [[z(0.0, 0.0), z(1.0, 0.0)], [z(1.0, 0.0), z(0.0, 0.0)]],
        2 => [[z(0.0, 0.0), z(0.0, -1.0)], [z(0.0, 1.0), z(0.0, 0.0)]],
        3 => [[z(1.0, 0.0), z(0.0, 0.0)], [z(0.0, 0.0), z(-1.0, 0.0)]],
        _ => unreachable!(),
    }
}

/// Embed a product of single-qubit Paulis at the given qubit positions.
fn pauli_string(num_qubits: usize, assignment: &[(usize, usize)]) -> CMatrix {
    let dim = 1usize << num_qubits;
    let mut out = CMatrix::zeros(dim);
    for col in 0..dim {
        let mut row = col;
        let mut coeff = Complex64::new(1.0, 0.0);
        for &(qubit, which) in assignment {
            let m = pauli(which);
            let bit = (col >> qubit) & 1;
            // each Pauli has exactly one nonzero entry per column
            let (r, v) = if m[0][bit].norm() > 0.0 {
                (0, m[0][bit])
            } else {
                (1, m[1][bit])
            };
            row = (row & !(1 << qubit)) | (r << qubit);
            coeff *= v;
        }
        out.add_assign_at(row, col, coeff);
    }
    out
}

/// (1−λ)ρ + (λ/4^k)·Σ_P PρP† over all k-qubit Pauli strings on `qubits`.
fn pauli_sum_channel(rho: &DensityMatrix, qubits: &[usize], lambda: f64) -> CMatrix {
    let k = qubits.len();
    let mut acc = CMatrix::zeros(rho.matrix().dim());
    for combo in 0..4usize.pow(k as u32) {
        let assignment: Vec<(usize, usize)> = qubits
            .iter()
            .enumerate()
            .map(|(i, &q)| (q, (combo >> (2 * i)) & 3))
            .collect();
        let p = pauli_string(rho.num_qubits(), &assignment);
        let term = p.mul(rho.matrix()).mul(&p.dagger());
        for r in 0..acc.dim() {
            for c in 0..acc.dim() {
                acc.add_assign_at(r, c, term.get(r, c));
            }
        }
    }
    let weight = Complex64::new(lambda / 4f64.powi(k as i32), 0.0);
    let mut out = rho.matrix().scale(Complex64::new(1.0 - lambda, 0.0));
    for r in 0..acc.dim() {
        for c in 0..acc.dim() {
            out.add_assign_at(r, c, acc.get(r, c) * weight);
        }
    }
    out
}

fn entangled_state() -> DensityMatrix {
    let mut c = Circuit::new(3, vec![2, 1, 0]).unwrap();
    c.append(GateInstance::new(GateKind::H, vec![0]).unwrap())
        .unwrap();
    c.append(GateInstance::new(GateKind::Cnot, vec![0, 1]).unwrap())
        .unwrap();
    c.append(GateInstance::new(GateKind::Rz(0.7), vec![2]).unwrap())
        .unwrap();
    c.append(GateInstance::new(GateKind::Sx, vec![2]).unwrap())
        .unwrap();
    let state = evolve_statevector(&c, &Statevector::zero_state(3)).unwrap();
    DensityMatrix::from_statevector(&state)
}

#[test]
fn one_qubit_channel_matches_pauli_sum() {
    let rho = entangled_state();
    for &lambda in &[0.05, 0.5, 1.0, 4.0 / 3.0] {
        for q in 0..3 {
            let replaced = apply_depolarizing(&rho, &[q], lambda).unwrap();
            let twirled = pauli_sum_channel(&rho, &[q], lambda);
            let diff = replaced.matrix().max_abs_diff(&twirled);
            assert!(diff < 1e-12, "q={q} lambda={lambda}: diff {diff}");
        }
    }
}

#[test]
fn two_qubit_channel_matches_pauli_sum() {
    let rho = entangled_state();
    for &lambda in &[0.02, 0.6, 1.0] {
        for pair in [[0, 1], [0, 2], [2, 1]] {
            let replaced = apply_depolarizing(&rho, &pair, lambda).unwrap();
            let twirled = pauli_sum_channel(&rho, &pair, lambda);
            let diff = replaced.matrix().max_abs_diff(&twirled);
            assert!(diff < 1e-12, "pair={pair:?} lambda={lambda}: diff {diff}");
        }
    }
}
