//! Grid-search calibration round trips.

use coinwalk_core::analysis::{FidelityPoint, FidelitySeries};
use coinwalk_core::noise::{
    calibrate, calibration_mse, default_model, CalibrationGrid, NoiseMode, NoiseModel,
};
use coinwalk_core::sweep::fidelity_curve;
use coinwalk_core::walk::WalkSpec;

fn series_from_curve(curve: &[f64]) -> FidelitySeries {
    FidelitySeries::new(
        curve
            .iter()
            .enumerate()
            .map(|(step, &f)| FidelityPoint {
                step,
                fidelity_mean: f,
                std_error: 0.0,
                repeats: 1,
            })
            .collect(),
    )
    .unwrap()
}

fn self_generated_reference(walk: &WalkSpec, model: &NoiseModel, max_steps: usize) -> FidelitySeries {
    let steps: Vec<usize> = (0..=max_steps).collect();
    series_from_curve(&fidelity_curve(walk, &steps, model).unwrap())
}

#[test]
fn recovers_generating_model() {
    // 16-node walk: its 5-operand gates make every class, multi included,
    // observable
    let walk = WalkSpec::new(4, 4);
    let truth = default_model();
    let reference = self_generated_reference(&walk, &truth, 4);
    let grid = CalibrationGrid {
        lambda_1q: vec![0.0, 0.005, 0.05],
        lambda_2q: vec![0.0, 0.02],
        lambda_3q: vec![0.0, 0.04],
        lambda_multi: vec![0.0, 0.6],
    };
    let (fitted, mse) = calibrate(&reference, &walk, &grid, NoiseMode::Abstract).unwrap();
    assert_eq!(fitted.lambda_tuple(), truth.lambda_tuple());
    assert_eq!(mse, 0.0);
}

#[test]
fn noiseless_reference_yields_zero_model() {
    let walk = WalkSpec::new(2, 4);
    let reference = series_from_curve(&[1.0; 5]);
    let grid = CalibrationGrid {
        lambda_1q: vec![0.0, 0.01],
        lambda_2q: vec![0.0, 0.05],
        lambda_3q: vec![0.0],
        lambda_multi: vec![0.0, 0.3],
    };
    let (fitted, mse) = calibrate(&reference, &walk, &grid, NoiseMode::Abstract).unwrap();
    assert_eq!(fitted.lambda_tuple(), [0.0; 4]);
    assert!(mse < 1e-18);
}

#[test]
fn nearest_point_wins_when_truth_excluded() {
    // data generated at half strength, grid only has zero and full models
    let walk = WalkSpec::new(2, 3);
    let truth = default_model().scaled(0.5).unwrap();
    let reference = self_generated_reference(&walk, &truth, 3);

    let zero = NoiseModel::new(0.0, 0.0, 0.0, 0.0, 1.0, NoiseMode::Abstract).unwrap();
    let full = default_model();
    let grid = CalibrationGrid {
        lambda_1q: vec![zero.lambda_1q, full.lambda_1q],
        lambda_2q: vec![zero.lambda_2q, full.lambda_2q],
        lambda_3q: vec![zero.lambda_3q, full.lambda_3q],
        lambda_multi: vec![zero.lambda_multi, full.lambda_multi],
    };
    let (fitted, mse) = calibrate(&reference, &walk, &grid, NoiseMode::Abstract).unwrap();

    // exhaustive check: the winner's objective is minimal over the grid
    for candidate in [&zero, &full] {
        let other = calibration_mse(&reference, &walk, candidate).unwrap();
        assert!(mse <= other + 1e-15);
    }
    let mse_fitted = calibration_mse(&reference, &walk, &fitted).unwrap();
    assert!((mse - mse_fitted).abs() < 1e-15);
}

#[test]
fn empty_grid_rejected() {
    let walk = WalkSpec::new(2, 2);
    let reference = series_from_curve(&[1.0, 1.0, 1.0]);
    let grid = CalibrationGrid {
        lambda_1q: vec![],
        lambda_2q: vec![0.0],
        lambda_3q: vec![0.0],
        lambda_multi: vec![0.0],
    };
    assert!(calibrate(&reference, &walk, &grid, NoiseMode::Abstract).is_err());
}

#[test]
fn non_contiguous_reference_rejected() {
    let walk = WalkSpec::new(2, 2);
    let reference = FidelitySeries::new(vec![
        FidelityPoint {
            step: 1,
            fidelity_mean: 1.0,
            std_error: 0.0,
            repeats: 1,
        },
        FidelityPoint {
            step: 3,
            fidelity_mean: 1.0,
            std_error: 0.0,
            repeats: 1,
        },
    ])
    .unwrap();
    let grid = CalibrationGrid {
        lambda_1q: vec![0.0],
        lambda_2q: vec![0.0],
        lambda_3q: vec![0.0],
        lambda_multi: vec![0.0],
    };
    assert!(calibrate(&reference, &walk, &grid, NoiseMode::Abstract).is_err());
}
