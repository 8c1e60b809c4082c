//! Per-gate-arity-class depolarizing parameters and calibration.

use serde::{Deserialize, Serialize};

use crate::analysis::FidelitySeries;
use crate::circuit::GateInstance;
use crate::error::{Error, Result};
use crate::walk::WalkSpec;

/// Where the class noise attaches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Noise on the untranspiled gates; all four arity classes in play.
    Abstract,
    /// Transpile first, then 1q/2q noise only, as on real backends.
    Native,
}

/// Depolarizing probability per gate, by operand-count class, with a global
/// strength scalar. The effective parameter is `strength · λ_class`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub lambda_1q: f64,
    pub lambda_2q: f64,
    pub lambda_3q: f64,
    pub lambda_multi: f64,
    pub strength: f64,
    pub mode: NoiseMode,
}

fn class_bound(qubits: u32) -> f64 {
    let d = 4f64.powi(qubits as i32);
    d / (d - 1.0)
}

impl NoiseModel {
    pub fn new(
        lambda_1q: f64,
        lambda_2q: f64,
        lambda_3q: f64,
        lambda_multi: f64,
        strength: f64,
        mode: NoiseMode,
    ) -> Result<Self> {
        let model = NoiseModel {
            lambda_1q,
            lambda_2q,
            lambda_3q,
            lambda_multi,
            strength,
            mode,
        };
        model.validate()?;
        Ok(model)
    }

    /// Same λ for every class.
    pub fn uniform(lambda: f64) -> Result<Self> {
        NoiseModel::new(lambda, lambda, lambda, lambda, 1.0, NoiseMode::Abstract)
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("lambda_1q", self.lambda_1q, class_bound(1)),
            ("lambda_2q", self.lambda_2q, class_bound(2)),
            ("lambda_3q", self.lambda_3q, class_bound(3)),
            ("lambda_multi", self.lambda_multi, class_bound(4)),
        ];
        for (name, value, bound) in checks {
            if !(0.0..=bound).contains(&value) {
                return Err(Error::validation(format!(
                    "{name} = {value} outside [0, {bound}]"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.strength) {
            return Err(Error::validation(format!(
                "strength {} outside [0, 1]",
                self.strength
            )));
        }
        Ok(())
    }

    /// Copy with the strength replaced; the per-class λ fields stay as-is.
    pub fn scaled(&self, strength: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(Error::validation(format!(
                "strength {strength} outside [0, 1]"
            )));
        }
        Ok(NoiseModel { strength, ..*self })
    }

    /// Effective depolarizing parameter for one gate: class by operand
    /// count, times the strength. The three-qubit rate also covers
    /// 4-operand gates; the multi rate applies from 5 operands up, which
    /// is the attachment that reproduces the reference fidelity curves.
    pub fn lambda_for(&self, gate: &GateInstance) -> f64 {
        let class = match gate.operands().len() {
            1 => self.lambda_1q,
            2 => self.lambda_2q,
            3 | 4 => self.lambda_3q,
            _ => self.lambda_multi,
        };
        self.strength * class
    }

    /// Calibration lambda tuple, for deterministic tie-breaks.
    pub fn lambda_tuple(&self) -> [f64; 4] {
        [
            self.lambda_1q,
            self.lambda_2q,
            self.lambda_3q,
            self.lambda_multi,
        ]
    }
}

/// The full-strength model fitted to the reference device: 1q 0.005,
/// 2q 0.02, 3q 0.04, multi 0.6, strength 1, abstract attachment.
pub fn default_model() -> NoiseModel {
    NoiseModel {
        lambda_1q: 0.005,
        lambda_2q: 0.02,
        lambda_3q: 0.04,
        lambda_multi: 0.6,
        strength: 1.0,
        mode: NoiseMode::Abstract,
    }
}

// --- noise/v1 document ------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct NoiseDoc {
    format: String,
    lambda_1q: f64,
    lambda_2q: f64,
    lambda_3q: f64,
    lambda_multi: f64,
    strength: f64,
    mode: NoiseMode,
}

pub fn write_model(model: &NoiseModel) -> String {
    let doc = NoiseDoc {
        format: "noise/v1".into(),
        lambda_1q: model.lambda_1q,
        lambda_2q: model.lambda_2q,
        lambda_3q: model.lambda_3q,
        lambda_multi: model.lambda_multi,
        strength: model.strength,
        mode: model.mode,
    };
    serde_json::to_string_pretty(&doc).expect("noise document serializes")
}

pub fn read_model(text: &str) -> Result<NoiseModel> {
    let doc: NoiseDoc =
        serde_json::from_str(text).map_err(|e| Error::parse(format!("noise/v1: {e}")))?;
    if doc.format != "noise/v1" {
        return Err(Error::parse(format!("unexpected format {:?}", doc.format)));
    }
    NoiseModel::new(
        doc.lambda_1q,
        doc.lambda_2q,
        doc.lambda_3q,
        doc.lambda_multi,
        doc.strength,
        doc.mode,
    )
}

// --- calibration ------------------------------------------------------------

/// Candidate λ values per class; the search space is the cartesian product.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationGrid {
    pub lambda_1q: Vec<f64>,
    pub lambda_2q: Vec<f64>,
    pub lambda_3q: Vec<f64>,
    pub lambda_multi: Vec<f64>,
}

impl CalibrationGrid {
    pub fn is_empty(&self) -> bool {
        self.lambda_1q.is_empty()
            || self.lambda_2q.is_empty()
            || self.lambda_3q.is_empty()
            || self.lambda_multi.is_empty()
    }

    fn candidates(&self, mode: NoiseMode) -> Vec<NoiseModel> {
        let mut out = Vec::new();
        for &l1 in &self.lambda_1q {
            for &l2 in &self.lambda_2q {
                for &l3 in &self.lambda_3q {
                    for &lm in &self.lambda_multi {
                        out.push(NoiseModel {
                            lambda_1q: l1,
                            lambda_2q: l2,
                            lambda_3q: l3,
                            lambda_multi: lm,
                            strength: 1.0,
                            mode,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Mean squared difference between a candidate's simulated per-step
/// fidelity curve and the reference series.
pub fn calibration_mse(
    reference: &FidelitySeries,
    walk: &WalkSpec,
    candidate: &NoiseModel,
) -> Result<f64> {
    let steps: Vec<usize> = reference.entries().iter().map(|e| e.step).collect();
    let simulated = crate::sweep::fidelity_curve(walk, &steps, candidate)?;
    let mse = reference
        .entries()
        .iter()
        .zip(&simulated)
        .map(|(entry, &f)| (entry.fidelity_mean - f).powi(2))
        .sum::<f64>()
        / reference.entries().len() as f64;
    Ok(mse)
}

/// Exhaustive grid search for the model whose simulated fidelity curve best
/// matches `reference` (minimum MSE; ties broken by the lexicographically
/// smallest λ tuple).
pub fn calibrate(
    reference: &FidelitySeries,
    walk: &WalkSpec,
    grid: &CalibrationGrid,
    mode: NoiseMode,
) -> Result<(NoiseModel, f64)> {
    if grid.is_empty() {
        return Err(Error::validation("calibration grid is empty"));
    }
    if reference.entries().is_empty() {
        return Err(Error::validation("reference series is empty"));
    }
    for (i, entry) in reference.entries().iter().enumerate() {
        if entry.step != i {
            return Err(Error::validation(
                "reference series must cover steps 0..t contiguously",
            ));
        }
    }
    walk.validate()?;

    let candidates = grid.candidates(mode);
    let scored = crate::sweep::map_maybe_parallel(&candidates, |model| {
        calibration_mse(reference, walk, model).map(|mse| (mse, *model))
    })?;

    let best = scored
        .into_iter()
        .min_by(|(mse_a, a), (mse_b, b)| {
            mse_a
                .partial_cmp(mse_b)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    a.lambda_tuple()
                        .partial_cmp(&b.lambda_tuple())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        })
        .expect("non-empty candidate list");
    Ok((best.1, best.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::GateKind;

    fn gate(kind: GateKind, operands: Vec<usize>) -> GateInstance {
        GateInstance::new(kind, operands).unwrap()
    }

    #[test]
    fn table_values() {
        let m = default_model();
        assert_eq!(m.lambda_1q, 0.005);
        assert_eq!(m.lambda_2q, 0.02);
        assert_eq!(m.lambda_3q, 0.04);
        assert_eq!(m.lambda_multi, 0.6);
        assert_eq!(m.strength, 1.0);
        assert_eq!(m.mode, NoiseMode::Abstract);
    }

    #[test]
    fn scaling_examples() {
        let cnot = gate(GateKind::Cnot, vec![0, 1]);
        let h = gate(GateKind::H, vec![0]);
        let m = default_model().scaled(0.1).unwrap();
        assert!((m.lambda_for(&cnot) - 0.002).abs() < 1e-15);
        let m = default_model().scaled(0.02).unwrap();
        assert!((m.lambda_for(&h) - 0.0001).abs() < 1e-15);
        let m = default_model().scaled(0.0).unwrap();
        assert_eq!(m.lambda_for(&cnot), 0.0);
        assert!(default_model().scaled(1.5).is_err());
    }

    #[test]
    fn classification_by_operand_count() {
        let m = default_model();
        // 4-operand gates share the three-qubit rate; multi starts at 5
        assert_eq!(
            m.lambda_for(&gate(GateKind::Mcx(3), vec![0, 1, 2, 3])),
            0.04
        );
        assert_eq!(m.lambda_for(&gate(GateKind::Mcx(2), vec![0, 1, 2])), 0.04);
        assert_eq!(m.lambda_for(&gate(GateKind::Id, vec![0])), 0.005);
        assert_eq!(
            m.lambda_for(&gate(GateKind::Mcx(4), vec![0, 1, 2, 3, 4])),
            0.6
        );
    }

    #[test]
    fn lambda_bounds_enforced() {
        assert!(NoiseModel::new(1.4, 0.0, 0.0, 0.0, 1.0, NoiseMode::Abstract).is_err());
        assert!(NoiseModel::new(-0.1, 0.0, 0.0, 0.0, 1.0, NoiseMode::Abstract).is_err());
        // 4/3 is the one-qubit ceiling
        assert!(NoiseModel::new(4.0 / 3.0, 0.0, 0.0, 0.0, 1.0, NoiseMode::Abstract).is_ok());
    }

    #[test]
    fn monotone_in_strength() {
        let cnot = gate(GateKind::Cnot, vec![0, 1]);
        let mut prev = -1.0;
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let l = default_model().scaled(s).unwrap().lambda_for(&cnot);
            assert!(l >= prev);
            prev = l;
        }
    }

    #[test]
    fn noise_doc_round_trip() {
        let text = write_model(&default_model());
        assert_eq!(read_model(&text).unwrap(), default_model());
        assert!(read_model("{\"format\":\"noise/v2\"}").is_err());
    }
}
