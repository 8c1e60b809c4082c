//! Gate set and circuit IR shared by the builder, transpiler and simulators.
//!
//! Qubit 0 is the least-significant bit of a basis-state index. Output
//! bitstrings render the most-significant measured qubit first.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Largest register the brute-force unitary oracle will handle.
pub const UNITARY_ORACLE_MAX_QUBITS: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    H,
    X,
    Sx,
    Id,
    /// Z-rotation, `diag(e^{-iθ/2}, e^{+iθ/2})`. Angles are stored exactly
    /// as given, no modular reduction.
    Rz(f64),
    Cnot,
    /// X with `num_controls >= 2` controls. A 1-control X is `Cnot`.
    Mcx(usize),
}

impl GateKind {
    /// Number of operands the kind acts on.
    pub fn arity(&self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Sx | GateKind::Id | GateKind::Rz(_) => 1,
            GateKind::Cnot => 2,
            GateKind::Mcx(k) => k + 1,
        }
    }

    /// Census key; MCX is keyed by control count ("MCX2", "MCX3", ...).
    pub fn census_key(&self) -> String {
        match self {
            GateKind::H => "H".into(),
            GateKind::X => "X".into(),
            GateKind::Sx => "SX".into(),
            GateKind::Id => "ID".into(),
            GateKind::Rz(_) => "RZ".into(),
            GateKind::Cnot => "CNOT".into(),
            GateKind::Mcx(k) => format!("MCX{k}"),
        }
    }

    /// Member of the hardware-native set {CNOT, ID, RZ, SX, X}?
    pub fn is_native(&self) -> bool {
        matches!(
            self,
            GateKind::X | GateKind::Sx | GateKind::Id | GateKind::Rz(_) | GateKind::Cnot
        )
    }

    fn validate(&self) -> Result<()> {
        match self {
            GateKind::Rz(angle) if !angle.is_finite() => {
                Err(Error::validation("RZ angle must be finite"))
            }
            GateKind::Mcx(k) if *k < 2 => Err(Error::validation(
                "MCX requires at least 2 controls (use CNOT or X for fewer)",
            )),
            _ => Ok(()),
        }
    }
}

/// A gate applied to concrete qubits: controls first, target last for
/// CNOT/MCX, a single operand otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    kind: GateKind,
    operands: Vec<usize>,
}

impl GateInstance {
    pub fn new(kind: GateKind, operands: Vec<usize>) -> Result<Self> {
        kind.validate()?;
        if operands.len() != kind.arity() {
            return Err(Error::validation(format!(
                "{} expects {} operand(s), got {}",
                kind.census_key(),
                kind.arity(),
                operands.len()
            )));
        }
        for (i, a) in operands.iter().enumerate() {
            if operands[..i].contains(a) {
                return Err(Error::validation(format!("duplicate operand qubit {a}")));
            }
        }
        Ok(GateInstance { kind, operands })
    }

    pub fn kind(&self) -> &GateKind {
        &self.kind
    }

    pub fn operands(&self) -> &[usize] {
        &self.operands
    }

    /// Control qubits (empty for single-qubit gates).
    pub fn controls(&self) -> &[usize] {
        &self.operands[..self.operands.len() - 1]
    }

    /// The target (last) operand.
    pub fn target(&self) -> usize {
        *self.operands.last().expect("gate has at least one operand")
    }

    fn check_against(&self, num_qubits: usize) -> Result<()> {
        for &q in &self.operands {
            if q >= num_qubits {
                return Err(Error::validation(format!(
                    "operand qubit {q} out of range for {num_qubits}-qubit circuit"
                )));
            }
        }
        Ok(())
    }
}

/// Ordered gate list over an indexed register, with an implicit terminal
/// measurement of `measured_qubits` (listed most-significant first).
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<GateInstance>,
    measured_qubits: Vec<usize>,
}

impl Circuit {
    pub fn new(num_qubits: usize, measured_qubits: Vec<usize>) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::validation("circuit needs at least one qubit"));
        }
        for (i, &q) in measured_qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(Error::validation(format!(
                    "measured qubit {q} out of range"
                )));
            }
            if measured_qubits[..i].contains(&q) {
                return Err(Error::validation(format!("duplicate measured qubit {q}")));
            }
        }
        Ok(Circuit {
            num_qubits,
            gates: Vec::new(),
            measured_qubits,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    pub fn measured_qubits(&self) -> &[usize] {
        &self.measured_qubits
    }

    pub fn append(&mut self, gate: GateInstance) -> Result<()> {
        gate.check_against(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Append every gate of `other` (registers must match in size).
    pub fn extend_from(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::validation("register size mismatch in extend"));
        }
        for g in &other.gates {
            self.append(g.clone())?;
        }
        Ok(())
    }

    /// Per-kind gate counts; counts sum to the gate-list length.
    pub fn gate_census(&self) -> BTreeMap<String, usize> {
        let mut census = BTreeMap::new();
        for g in &self.gates {
            *census.entry(g.kind().census_key()).or_insert(0) += 1;
        }
        census
    }

    /// Brute-force unitary: the product of the embedded gate matrices in
    /// application order. Desk-scale verification only.
    pub fn unitary_of(&self) -> Result<CMatrix> {
        if self.num_qubits > UNITARY_ORACLE_MAX_QUBITS {
            return Err(Error::capacity(format!(
                "unitary oracle capped at {UNITARY_ORACLE_MAX_QUBITS} qubits"
            )));
        }
        let dim = 1usize << self.num_qubits;
        let mut acc = CMatrix::identity(dim);
        for g in &self.gates {
            acc = embedded_unitary(g, self.num_qubits).mul(&acc);
        }
        Ok(acc)
    }
}

/// 2×2 matrix of a single-qubit kind.
pub fn single_qubit_matrix(kind: &GateKind) -> Option<[[Complex64; 2]; 2]> {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        GateKind::H => Some([[z(s, 0.0), z(s, 0.0)], [z(s, 0.0), z(-s, 0.0)]]),
        GateKind::X => Some([[z(0.0, 0.0), z(1.0, 0.0)], [z(1.0, 0.0), z(0.0, 0.0)]]),
        GateKind::Sx => Some([
            [z(0.5, 0.5), z(0.5, -0.5)],
            [z(0.5, -0.5), z(0.5, 0.5)],
        ]),
        GateKind::Id => Some([[z(1.0, 0.0), z(0.0, 0.0)], [z(0.0, 0.0), z(1.0, 0.0)]]),
        GateKind::Rz(theta) => Some([
            [Complex64::from_polar(1.0, -theta / 2.0), z(0.0, 0.0)],
            [z(0.0, 0.0), Complex64::from_polar(1.0, theta / 2.0)],
        ]),
        _ => None,
    }
}

/// Full 2^n × 2^n matrix of one gate embedded by its operand indices.
pub fn embedded_unitary(gate: &GateInstance, num_qubits: usize) -> CMatrix {
    let dim = 1usize << num_qubits;
    let mut out = CMatrix::zeros(dim);
    if let Some(m) = single_qubit_matrix(gate.kind()) {
        let q = gate.target();
        let mask = 1usize << q;
        for col in 0..dim {
            let b = usize::from(col & mask != 0);
            for (r, m_row) in m.iter().enumerate() {
                let row = (col & !mask) | (r << q);
                out.add_assign_at(row, col, m_row[b]);
            }
        }
    } else {
        // CNOT / MCX: a basis-state permutation.
        let controls = gate.controls();
        let tmask = 1usize << gate.target();
        for col in 0..dim {
            let active = controls.iter().all(|&c| col & (1 << c) != 0);
            let row = if active { col ^ tmask } else { col };
            out.set(row, col, Complex64::new(1.0, 0.0));
        }
    }
    out
}

// --- circuit/v1 document ---------------------------------------------------

#[derive(Serialize, Deserialize)]
struct CircuitDoc {
    version: u32,
    num_qubits: usize,
    measured_qubits: Vec<usize>,
    gates: Vec<GateDoc>,
}

#[derive(Serialize, Deserialize)]
struct GateDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    controls: Option<Vec<usize>>,
    target: usize,
}

/// Render a circuit as a circuit/v1 JSON document.
pub fn serialize(circuit: &Circuit) -> String {
    let gates = circuit
        .gates()
        .iter()
        .map(|g| {
            let controls = match g.kind() {
                GateKind::Cnot | GateKind::Mcx(_) => Some(g.controls().to_vec()),
                _ => None,
            };
            let angle = match g.kind() {
                GateKind::Rz(theta) => Some(*theta),
                _ => None,
            };
            GateDoc {
                kind: match g.kind() {
                    GateKind::Mcx(_) => "MCX".into(),
                    other => other.census_key(),
                },
                angle,
                controls,
                target: g.target(),
            }
        })
        .collect();
    let doc = CircuitDoc {
        version: 1,
        num_qubits: circuit.num_qubits(),
        measured_qubits: circuit.measured_qubits().to_vec(),
        gates,
    };
    serde_json::to_string_pretty(&doc).expect("circuit document serializes")
}

/// Parse a circuit/v1 JSON document, re-validating every invariant.
pub fn deserialize(text: &str) -> Result<Circuit> {
    let doc: CircuitDoc =
        serde_json::from_str(text).map_err(|e| Error::parse(format!("circuit/v1: {e}")))?;
    if doc.version != 1 {
        return Err(Error::parse(format!(
            "unsupported circuit document version {}",
            doc.version
        )));
    }
    let mut circuit = Circuit::new(doc.num_qubits, doc.measured_qubits)?;
    for g in doc.gates {
        let kind = match g.kind.as_str() {
            "H" => GateKind::H,
            "X" => GateKind::X,
            "SX" => GateKind::Sx,
            "ID" => GateKind::Id,
            "RZ" => GateKind::Rz(
                g.angle
                    .ok_or_else(|| Error::parse("RZ gate missing angle"))?,
            ),
            "CNOT" => GateKind::Cnot,
            "MCX" => {
                let n = g.controls.as_ref().map(Vec::len).unwrap_or(0);
                GateKind::Mcx(n)
            }
            other => return Err(Error::parse(format!("unknown gate kind {other:?}"))),
        };
        if g.angle.is_some() && !matches!(kind, GateKind::Rz(_)) {
            return Err(Error::parse(format!("{} does not take an angle", g.kind)));
        }
        let mut operands = match kind {
            GateKind::Cnot => {
                let c = g
                    .controls
                    .ok_or_else(|| Error::parse("CNOT missing controls"))?;
                if c.len() != 1 {
                    return Err(Error::parse("CNOT takes exactly one control"));
                }
                c
            }
            GateKind::Mcx(_) => g.controls.unwrap_or_default(),
            _ => {
                if g.controls.is_some() {
                    return Err(Error::parse(format!("{} does not take controls", g.kind)));
                }
                Vec::new()
            }
        };
        operands.push(g.target);
        circuit.append(GateInstance::new(kind, operands)?)?;
    }
    Ok(circuit)
}
