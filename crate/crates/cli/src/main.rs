//! `coinwalk`: build, transpile, simulate, sweep, compare and calibrate
//! coined walks on cycle graphs.
//!
//! Exit codes: 0 success, 1 validation or parse error, 2 I/O error.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use coinwalk_core::analysis::{
    fidelity_series, hellinger_fidelity, series_to_csv, sig6, FidelityPoint, FidelitySeries,
};
use coinwalk_core::circuit;
use coinwalk_core::dist::{
    read_counts, read_distribution, write_counts, write_distribution, Distribution, RunMeta,
};
use coinwalk_core::noise::{
    calibrate, default_model, read_model, write_model, CalibrationGrid, NoiseMode, NoiseModel,
};
use coinwalk_core::sim::{run_exact, sample_counts};
use coinwalk_core::sweep::{
    default_strengths, derive_seed, noisy_distribution, run_sweep, sweep_to_csv, SweepConfig,
    SweepMode, SweepRow,
};
use coinwalk_core::transpile::transpile;
use coinwalk_core::walk::{walk_circuit, CoinInit, WalkSpec};
use coinwalk_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "coinwalk",
    version,
    about = "Coined discrete-time quantum walks on cycle graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoinArg {
    Zero,
    One,
    Symmetric,
}

impl From<CoinArg> for CoinInit {
    fn from(value: CoinArg) -> CoinInit {
        match value {
            CoinArg::Zero => CoinInit::Zero,
            CoinArg::One => CoinInit::One,
            CoinArg::Symmetric => CoinInit::Symmetric,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum ModeArg {
    Exact,
    Sampled,
}

#[derive(Subcommand)]
enum Command {
    /// Build a walk circuit file (circuit/v1).
    Build {
        /// Node count, a power of two.
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = CoinArg::Zero)]
        coin_init: CoinArg,
        /// Use the two-CNOT STEP specialization (4-node walks only).
        #[arg(long)]
        optimized: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Lower a circuit file to the native gate set {CNOT, RZ, SX, X, ID}.
    Transpile {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write a JSON gate-census report (per-kind counts before and after).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Simulate walks of length 0..=T, one output file per step (per repeat
    /// in sampled mode). Each step length is a fresh run from the start.
    Run {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = CoinArg::Zero)]
        coin_init: CoinArg,
        /// Noise model: "none", "table2" (built-in device fit) or a
        /// noise/v1 file path.
        #[arg(long, default_value = "none")]
        noise: String,
        /// Noise strength multiplier in [0, 1].
        #[arg(long, default_value_t = 1.0)]
        strength: f64,
        /// Attach noise to transpiled native gates instead of walk gates.
        #[arg(long)]
        native_noise: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1024)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        /// Sampling seed; falls back to COINWALK_SEED, then 0.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Fidelity-versus-noise-strength table over (strength, step) cells.
    Sweep {
        #[arg(long)]
        nodes: usize,
        /// Largest step count; the sweep covers steps 0..=T.
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = CoinArg::Zero)]
        coin_init: CoinArg,
        /// Comma-separated strengths in [0, 1], sorted ascending.
        /// Default: 0, 0.02, 0.06, 0.1, 0.2, ..., 1.0.
        #[arg(long)]
        strengths: Option<String>,
        /// Noise model: "table2" or a noise/v1 file path.
        #[arg(long, default_value = "table2")]
        noise: String,
        #[arg(long)]
        native_noise: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = 1024)]
        shots: u64,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Bound on worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
        /// Optional SVG rendering of the fidelity curves.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Hellinger fidelity between two counts/v1 or dist/v1 files.
    Fidelity {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Per-step fidelity of a candidate run directory against a reference
    /// run directory, written as a fidelity-series CSV.
    Compare {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        candidate: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Grid-search noise parameters against a reference run directory.
    Calibrate {
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        steps: usize,
        /// Per-class candidate values, e.g.
        /// "l1=0,0.005;l2=0,0.02;l3=0.04;lm=0:0.2:4".
        /// Each axis takes a comma list of numbers and/or
        /// start:step:count ranges.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        native_noise: bool,
        /// Output noise/v1 path for the fitted model.
        #[arg(long)]
        out: PathBuf,
    },
}

enum CliError {
    App(CoreError),
    Io(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::App(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| io_error(path, e))
}

fn position_qubits(nodes: usize) -> CliResult<usize> {
    if nodes < 2 || !nodes.is_power_of_two() {
        return Err(CliError::App(CoreError::validation(format!(
            "node count {nodes} is not a power of two >= 2"
        ))));
    }
    Ok(nodes.trailing_zeros() as usize)
}

fn resolve_seed(seed: Option<u64>) -> CliResult<u64> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("COINWALK_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::App(CoreError::validation(format!(
                "COINWALK_SEED {text:?} is not an unsigned integer"
            )))
        }),
        Err(_) => Ok(0),
    }
}

/// "none" maps to no model; "table2" to the built-in device fit; anything
/// else is read as a noise/v1 path. `strength` scales the model.
fn resolve_model(
    noise: &str,
    strength: f64,
    native: bool,
) -> CliResult<Option<NoiseModel>> {
    let base = match noise {
        "none" => return Ok(None),
        "table2" => default_model(),
        path => read_model(&read_file(Path::new(path))?)?,
    };
    let mut model = base.scaled(strength)?;
    if native {
        model.mode = NoiseMode::Native;
    }
    Ok(Some(model))
}

fn parse_float(token: &str) -> CliResult<f64> {
    token
        .trim()
        .parse()
        .map_err(|_| CliError::App(CoreError::parse(format!("bad number {token:?}"))))
}

fn parse_strengths(text: &str) -> CliResult<Vec<f64>> {
    text.split(',').map(parse_float).collect()
}

/// One grid axis: comma list of numbers and/or start:step:count ranges.
fn parse_grid_axis(text: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if let Some((start, rest)) = token.split_once(':') {
            let (step, count) = rest.split_once(':').ok_or_else(|| {
                CliError::App(CoreError::parse(format!(
                    "range {token:?} is not start:step:count"
                )))
            })?;
            let start = parse_float(start)?;
            let step = parse_float(step)?;
            let count: usize = count.trim().parse().map_err(|_| {
                CliError::App(CoreError::parse(format!("bad range count {count:?}")))
            })?;
            for i in 0..count {
                out.push(start + step * i as f64);
            }
        } else {
            out.push(parse_float(token)?);
        }
    }
    Ok(out)
}

/// Grid spec "l1=...;l2=...;l3=...;lm=..." with all four axes present.
fn parse_grid(text: &str) -> CliResult<CalibrationGrid> {
    let mut axes: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (key, values) = part.split_once('=').ok_or_else(|| {
            CliError::App(CoreError::parse(format!("grid axis {part:?} has no '='")))
        })?;
        axes.insert(key.trim().to_string(), parse_grid_axis(values)?);
    }
    let mut take = |key: &str| {
        axes.remove(key).ok_or_else(|| {
            CliError::App(CoreError::validation(format!("grid is missing axis {key}")))
        })
    };
    let grid = CalibrationGrid {
        lambda_1q: take("l1")?,
        lambda_2q: take("l2")?,
        lambda_3q: take("l3")?,
        lambda_multi: take("lm")?,
    };
    if let Some(extra) = axes.keys().next() {
        return Err(CliError::App(CoreError::validation(format!(
            "unknown grid axis {extra}; expected l1, l2, l3, lm"
        ))));
    }
    Ok(grid)
}

/// Read a counts/v1 or dist/v1 file, normalizing counts to a distribution.
fn read_dist_any(path: &Path) -> CliResult<(RunMeta, Distribution)> {
    let text = read_file(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        CliError::App(CoreError::parse(format!("{}: {e}", path.display())))
    })?;
    match value.get("format").and_then(|f| f.as_str()) {
        Some("dist/v1") => Ok(read_distribution(&text)?),
        Some("counts/v1") => {
            let (meta, counts) = read_counts(&text)?;
            Ok((meta, coinwalk_core::analysis::normalize_counts(&counts)?))
        }
        other => Err(CliError::App(CoreError::parse(format!(
            "{}: unsupported format {other:?}",
            path.display()
        )))),
    }
}

/// Parse `step_TT.json` or `step_TT_rep_RR.json` into (step, repeat).
fn parse_run_filename(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_suffix(".json")?.strip_prefix("step_")?;
    match rest.split_once("_rep_") {
        Some((step, rep)) => Some((step.parse().ok()?, rep.parse().ok()?)),
        None => Some((rest.parse().ok()?, 0)),
    }
}

/// Load every recognized run file in a directory, keyed step -> repeat.
fn load_run_dir(dir: &Path) -> CliResult<BTreeMap<usize, BTreeMap<usize, Distribution>>> {
    let mut out: BTreeMap<usize, BTreeMap<usize, Distribution>> = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| io_error(dir, e))? {
        let entry = entry.map_err(|e| io_error(dir, e))?;
        let name = entry.file_name().to_string_lossy().into_owned();
        let Some((step, rep)) = parse_run_filename(&name) else {
            continue;
        };
        let (_, dist) = read_dist_any(&entry.path())?;
        if out.entry(step).or_default().insert(rep, dist).is_some() {
            return Err(CliError::App(CoreError::validation(format!(
                "duplicate step {step} repeat {rep} in {}",
                dir.display()
            ))));
        }
    }
    if out.is_empty() {
        return Err(CliError::App(CoreError::validation(format!(
            "no step_*.json run files in {}",
            dir.display()
        ))));
    }
    for (expected, &step) in out.keys().enumerate() {
        if step != expected {
            return Err(CliError::App(CoreError::validation(format!(
                "steps in {} are not contiguous from 0 (missing step {expected})",
                dir.display()
            ))));
        }
    }
    Ok(out)
}

/// A single distribution per step, rejecting multi-repeat directories.
fn single_per_step(
    runs: BTreeMap<usize, BTreeMap<usize, Distribution>>,
    role: &str,
) -> CliResult<Vec<Distribution>> {
    runs.into_iter()
        .map(|(step, mut reps)| {
            if reps.len() != 1 {
                return Err(CliError::App(CoreError::validation(format!(
                    "{role} step {step} has {} files, expected exactly one",
                    reps.len()
                ))));
            }
            Ok(reps.pop_first().expect("one repeat").1)
        })
        .collect()
}

fn set_jobs(jobs: usize) {
    #[cfg(feature = "parallel")]
    {
        // ignore the error if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
}

/// Minimal SVG line plot of fidelity against step, one polyline per strength.
fn sweep_svg(rows: &[SweepRow]) -> String {
    const PALETTE: [&str; 13] = [
        "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
        "#bcbd22", "#17becf", "#393b79", "#637939", "#8c6d31",
    ];
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const M: f64 = 50.0;
    let max_step = rows.iter().map(|r| r.step).max().unwrap_or(1).max(1) as f64;
    let x = |step: usize| M + (W - 2.0 * M) * step as f64 / max_step;
    let y = |fid: f64| H - M - (H - 2.0 * M) * fid.clamp(0.0, 1.0);

    let mut curves: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    for r in rows {
        match curves.last_mut() {
            Some((s, points)) if *s == r.strength => points.push((r.step, r.fidelity)),
            _ => curves.push((r.strength, vec![(r.step, r.fidelity)])),
        }
    }

    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n\
         <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
         <line x1=\"{M}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n\
         <line x1=\"{M}\" y1=\"{M}\" x2=\"{M}\" y2=\"{}\" stroke=\"black\"/>\n\
         <text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">step</text>\n\
         <text x=\"14\" y=\"{}\" font-size=\"13\" transform=\"rotate(-90 14 {})\" \
         text-anchor=\"middle\">fidelity</text>\n",
        H - M,
        W - M,
        H - M,
        H - M,
        W / 2.0,
        H - 12.0,
        H / 2.0,
        H / 2.0
    );
    for tick in 0..=4 {
        let fid = tick as f64 / 4.0;
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-size=\"11\">{:.2}</text>\n",
            M - 6.0,
            y(fid) + 4.0,
            fid
        ));
    }
    for (i, (strength, points)) in curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = points
            .iter()
            .map(|&(step, fid)| format!("{:.1},{:.1}", x(step), y(fid)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            path.join(" ")
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{color}\">s={}</text>\n",
            W - M + 4.0,
            y(points.last().map(|&(_, f)| f).unwrap_or(0.0)) + 4.0,
            sig6(*strength)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn census_json(census: &BTreeMap<String, usize>) -> serde_json::Value {
    serde_json::Value::Object(
        census
            .iter()
            .map(|(k, &v)| (k.clone(), serde_json::Value::from(v)))
            .collect(),
    )
}

fn cmd_build(
    nodes: usize,
    steps: usize,
    coin_init: CoinArg,
    optimized: bool,
    out: &Path,
) -> CliResult<()> {
    let spec = WalkSpec {
        num_position_qubits: position_qubits(nodes)?,
        steps,
        coin_init: coin_init.into(),
        use_optimized_4node: optimized,
    };
    let circuit = walk_circuit(&spec)?;
    write_file(out, &circuit::serialize(&circuit))?;
    println!(
        "wrote {}-qubit circuit with {} gates to {}",
        circuit.num_qubits(),
        circuit.gates().len(),
        out.display()
    );
    Ok(())
}

fn cmd_transpile(input: &Path, out: &Path, report: Option<&Path>) -> CliResult<()> {
    let source = circuit::deserialize(&read_file(input)?)?;
    let lowered = transpile(&source)?;
    write_file(out, &circuit::serialize(&lowered))?;
    let before = source.gate_census();
    let after = lowered.gate_census();
    let before_total: usize = before.values().sum();
    let after_total: usize = after.values().sum();
    println!("{before_total} gates in, {after_total} native gates out");
    if let Some(report_path) = report {
        let doc = serde_json::json!({
            "format": "census-report/v1",
            "before": census_json(&before),
            "before_total": before_total,
            "after": census_json(&after),
            "after_total": after_total,
        });
        let text = serde_json::to_string_pretty(&doc).expect("report serializes");
        write_file(report_path, &text)?;
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    nodes: usize,
    steps: usize,
    coin_init: CoinArg,
    noise: &str,
    strength: f64,
    native_noise: bool,
    mode: ModeArg,
    shots: u64,
    repeats: usize,
    seed: Option<u64>,
    out: &Path,
) -> CliResult<()> {
    if repeats < 1 {
        return Err(CliError::App(CoreError::validation("repeats must be >= 1")));
    }
    let n = position_qubits(nodes)?;
    let model = resolve_model(noise, strength, native_noise)?;
    let seed = resolve_seed(seed)?;
    ensure_dir(out)?;
    for t in 0..=steps {
        let spec = WalkSpec {
            num_position_qubits: n,
            steps: t,
            coin_init: coin_init.into(),
            use_optimized_4node: false,
        };
        let dist = match &model {
            Some(m) => noisy_distribution(&spec, m)?,
            None => run_exact(&walk_circuit(&spec)?, None)?,
        };
        let meta = RunMeta {
            backend: "simulator".into(),
            nodes: nodes as u64,
            steps: t as u64,
        };
        match mode {
            ModeArg::Exact => {
                let path = out.join(format!("step_{t:02}.json"));
                write_file(&path, &write_distribution(&meta, &dist))?;
            }
            ModeArg::Sampled => {
                for r in 0..repeats {
                    let cell_seed = derive_seed(seed, &[t as u64, r as u64]);
                    let counts = sample_counts(&dist, shots, cell_seed)?;
                    let path = out.join(format!("step_{t:02}_rep_{r:02}.json"));
                    write_file(&path, &write_counts(&meta, &counts))?;
                }
            }
        }
    }
    println!("wrote steps 0..={steps} to {}", out.display());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    nodes: usize,
    steps: usize,
    coin_init: CoinArg,
    strengths: Option<&str>,
    noise: &str,
    native_noise: bool,
    mode: ModeArg,
    shots: u64,
    repeats: usize,
    seed: Option<u64>,
    jobs: Option<usize>,
    out: &Path,
    plot: Option<&Path>,
) -> CliResult<()> {
    if let Some(j) = jobs {
        set_jobs(j);
    }
    let strengths = match strengths {
        Some(text) => parse_strengths(text)?,
        None => default_strengths(),
    };
    let base_model = resolve_model(noise, 1.0, native_noise)?.ok_or_else(|| {
        CliError::App(CoreError::validation(
            "sweep needs a noise model; pass --noise table2 or a noise/v1 path",
        ))
    })?;
    let config = SweepConfig {
        nodes,
        max_steps: steps,
        strengths,
        mode: match mode {
            ModeArg::Exact => SweepMode::Exact,
            ModeArg::Sampled => SweepMode::Sampled {
                shots,
                repeats,
                seed: resolve_seed(seed)?,
            },
        },
        coin_init: coin_init.into(),
        base_model,
    };
    let rows = run_sweep(&config)?;
    write_file(out, &sweep_to_csv(&rows))?;
    if let Some(plot_path) = plot {
        write_file(plot_path, &sweep_svg(&rows))?;
    }
    println!("wrote {} sweep rows to {}", rows.len(), out.display());
    Ok(())
}

fn cmd_fidelity(a: &Path, b: &Path) -> CliResult<()> {
    let (_, da) = read_dist_any(a)?;
    let (_, db) = read_dist_any(b)?;
    println!("{}", sig6(hellinger_fidelity(&da, &db)?));
    Ok(())
}

fn cmd_compare(reference: &Path, candidate: &Path, out: &Path) -> CliResult<()> {
    let reference_dists = single_per_step(load_run_dir(reference)?, "reference")?;
    let candidate_runs = load_run_dir(candidate)?;
    if candidate_runs.len() != reference_dists.len() {
        return Err(CliError::App(CoreError::validation(format!(
            "step ranges differ: reference 0..={}, candidate 0..={}",
            reference_dists.len() - 1,
            candidate_runs.len() - 1
        ))));
    }
    let candidate_dists: Vec<Vec<Distribution>> = candidate_runs
        .into_values()
        .map(|reps| reps.into_values().collect())
        .collect();
    let series = fidelity_series(&reference_dists, &candidate_dists)?;
    write_file(out, &series_to_csv(&series))?;
    println!(
        "wrote {} fidelity rows to {}",
        series.entries().len(),
        out.display()
    );
    Ok(())
}

fn cmd_calibrate(
    reference: &Path,
    nodes: usize,
    steps: usize,
    grid: &str,
    native_noise: bool,
    out: &Path,
) -> CliResult<()> {
    let n = position_qubits(nodes)?;
    let reference_dists = single_per_step(load_run_dir(reference)?, "reference")?;
    if reference_dists.len() != steps + 1 {
        return Err(CliError::App(CoreError::validation(format!(
            "reference covers steps 0..={}, expected 0..={steps}",
            reference_dists.len() - 1
        ))));
    }
    // the fit target: per-step fidelity of the reference data against the
    // noiseless walk
    let mut entries = Vec::with_capacity(steps + 1);
    for (t, dist) in reference_dists.iter().enumerate() {
        let noiseless = run_exact(&walk_circuit(&WalkSpec::new(n, t))?, None)?;
        entries.push(FidelityPoint {
            step: t,
            fidelity_mean: hellinger_fidelity(dist, &noiseless)?,
            std_error: 0.0,
            repeats: 1,
        });
    }
    let series = FidelitySeries::new(entries)?;
    let grid = parse_grid(grid)?;
    let mode = if native_noise {
        NoiseMode::Native
    } else {
        NoiseMode::Abstract
    };
    let (fitted, mse) = calibrate(&series, &WalkSpec::new(n, steps), &grid, mode)?;
    write_file(out, &write_model(&fitted))?;
    println!(
        "fitted l1={} l2={} l3={} lm={} mse={}",
        sig6(fitted.lambda_1q),
        sig6(fitted.lambda_2q),
        sig6(fitted.lambda_3q),
        sig6(fitted.lambda_multi),
        sig6(mse)
    );
    Ok(())
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Build {
            nodes,
            steps,
            coin_init,
            optimized,
            out,
        } => cmd_build(nodes, steps, coin_init, optimized, &out),
        Command::Transpile { input, out, report } => {
            cmd_transpile(&input, &out, report.as_deref())
        }
        Command::Run {
            nodes,
            steps,
            coin_init,
            noise,
            strength,
            native_noise,
            mode,
            shots,
            repeats,
            seed,
            out,
        } => cmd_run(
            nodes,
            steps,
            coin_init,
            &noise,
            strength,
            native_noise,
            mode,
            shots,
            repeats,
            seed,
            &out,
        ),
        Command::Sweep {
            nodes,
            steps,
            coin_init,
            strengths,
            noise,
            native_noise,
            mode,
            shots,
            repeats,
            seed,
            jobs,
            out,
            plot,
        } => cmd_sweep(
            nodes,
            steps,
            coin_init,
            strengths.as_deref(),
            &noise,
            native_noise,
            mode,
            shots,
            repeats,
            seed,
            jobs,
            &out,
            plot.as_deref(),
        ),
        Command::Fidelity { a, b } => cmd_fidelity(&a, &b),
        Command::Compare {
            reference,
            candidate,
            out,
        } => cmd_compare(&reference, &candidate, &out),
        Command::Calibrate {
            reference,
            nodes,
            steps,
            grid,
            native_noise,
            out,
        } => cmd_calibrate(&reference, nodes, steps, &grid, native_noise, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are successes; bad usage is a validation error
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::App(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("io error: {msg}");
            ExitCode::from(2)
        }
    }
}
