//! Property tests over random circuits and distributions.

use std::collections::BTreeMap;

use proptest::prelude::*;

use coinwalk_core::analysis::{hellinger_distance, hellinger_fidelity};
use coinwalk_core::circuit::{Circuit, GateInstance, GateKind};
use coinwalk_core::dist::{bitstring, Distribution};
use coinwalk_core::transpile::{merge_rz, transpile};

const NUM_QUBITS: usize = 4;

fn arb_gate() -> impl Strategy<Value = GateInstance> {
    let qubit = 0..NUM_QUBITS;
    prop_oneof![
        qubit.clone().prop_map(|q| GateInstance::new(GateKind::H, vec![q]).unwrap()),
        qubit.clone().prop_map(|q| GateInstance::new(GateKind::X, vec![q]).unwrap()),
        qubit.clone().prop_map(|q| GateInstance::new(GateKind::Sx, vec![q]).unwrap()),
        (qubit.clone(), -6.3f64..6.3)
            .prop_map(|(q, a)| GateInstance::new(GateKind::Rz(a), vec![q]).unwrap()),
        (0..NUM_QUBITS, 0..NUM_QUBITS - 1).prop_map(|(c, t)| {
            let t = if t >= c { t + 1 } else { t };
            GateInstance::new(GateKind::Cnot, vec![c, t]).unwrap()
        }),
        Just(GateInstance::new(GateKind::Mcx(2), vec![0, 1, 2]).unwrap()),
        Just(GateInstance::new(GateKind::Mcx(3), vec![3, 1, 0, 2]).unwrap()),
    ]
}

fn arb_circuit() -> impl Strategy<Value = Circuit> {
    prop::collection::vec(arb_gate(), 0..12).prop_map(|gates| {
        let mut c = Circuit::new(NUM_QUBITS, (0..NUM_QUBITS).rev().collect()).unwrap();
        for g in gates {
            c.append(g).unwrap();
        }
        c
    })
}

fn arb_distribution() -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.001f64..1.0, 8).prop_map(|weights| {
        let total: f64 = weights.iter().sum();
        let probs: BTreeMap<String, f64> = weights
            .iter()
            .enumerate()
            .map(|(i, w)| (bitstring(i, 3), w / total))
            .collect();
        Distribution::new(probs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circuit_unitaries_are_unitary(c in arb_circuit()) {
        prop_assert!(c.unitary_of().unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn unitary_distributes_over_concatenation(a in arb_circuit(), b in arb_circuit()) {
        let mut ab = a.clone();
        ab.extend_from(&b).unwrap();
        let product = b.unitary_of().unwrap().mul(&a.unitary_of().unwrap());
        prop_assert!(ab.unitary_of().unwrap().max_abs_diff(&product) < 1e-12);
    }

    #[test]
    fn census_total_is_gate_count(c in arb_circuit()) {
        prop_assert_eq!(c.gate_census().values().sum::<usize>(), c.gates().len());
    }

    #[test]
    fn serde_round_trip_identity(c in arb_circuit()) {
        let text = coinwalk_core::circuit::serialize(&c);
        prop_assert_eq!(coinwalk_core::circuit::deserialize(&text).unwrap(), c);
    }

    #[test]
    fn transpile_native_and_equivalent(c in arb_circuit()) {
        let lowered = transpile(&c).unwrap();
        for g in lowered.gates() {
            prop_assert!(g.kind().is_native());
        }
        let diff = c
            .unitary_of()
            .unwrap()
            .phase_aligned_diff(&lowered.unitary_of().unwrap());
        prop_assert!(diff < 1e-9, "equivalence defect {}", diff);
    }

    #[test]
    fn merge_preserves_unitary_and_count(c in arb_circuit()) {
        let lowered = transpile(&c).unwrap();
        let merged = merge_rz(&lowered);
        prop_assert!(merged.gates().len() <= lowered.gates().len());
        let diff = lowered
            .unitary_of()
            .unwrap()
            .phase_aligned_diff(&merged.unitary_of().unwrap());
        prop_assert!(diff < 1e-9);
    }

    #[test]
    fn hellinger_ranges_and_symmetry(p in arb_distribution(), q in arb_distribution()) {
        let h = hellinger_distance(&p, &q).unwrap();
        let f = hellinger_fidelity(&p, &q).unwrap();
        prop_assert!((0.0..=1.0).contains(&h));
        prop_assert!((0.0..=1.0).contains(&f));
        prop_assert!((f - hellinger_fidelity(&q, &p).unwrap()).abs() < 1e-12);
        // route agreement: F = (1 − H²)²
        prop_assert!((f - (1.0 - h * h).powi(2)).abs() < 1e-12);
        prop_assert!((hellinger_fidelity(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        // self-distance is sqrt of the summation rounding error, not the error itself
        prop_assert!(hellinger_distance(&p, &p).unwrap() < 1e-7);
    }
}
