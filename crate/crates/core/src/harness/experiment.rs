//! Runs one configured experiment and writes its artefacts.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, ExperimentKind};
use super::{compare_logic, random_circuit, HarnessError, LogicSource};
use crate::circuit::{emit_netlist, layout, parse_circuit, CircuitIR, GateAssignment, LayoutOptions, NetlistMode, TermKind};
use crate::effective::{self, build_effective, build_isometry, EffectiveMode};
use crate::grid::GridSpec;
use crate::hambuild::{build_blocking_toy, build_h_string, SectorBasis};
use crate::solve::{self, arrival_statistics, evolve, SolverOptions};
use crate::sparse::{SparseOp, C64};
use crate::stringspace::{z_final, z_init};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub kind: ExperimentKind,
    pub version: String,
    pub parameters: Value,
    /// Seconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub data: Value,
    /// Files written, relative to the output directory.
    pub files: Vec<String>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Run<'a> {
    cfg: &'a ExperimentConfig,
    timings: BTreeMap<String, f64>,
    checks: Vec<Check>,
    warnings: Vec<String>,
    files: Vec<String>,
}

impl Run<'_> {
    fn timed<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        *self.timings.entry(stage.to_string()).or_default() += t.elapsed().as_secs_f64();
        out
    }

    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { name: name.to_string(), passed, detail });
    }

    fn path(&mut self, name: &str) -> Result<PathBuf, HarnessError> {
        self.files.push(name.to_string());
        Ok(self.cfg.out.join(name))
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>, HarnessError> {
        let path = self.path(name)?;
        File::create(&path).map(BufWriter::new).map_err(|source| io_err(&path, source))
    }

    fn write_json(&mut self, name: &str, value: &Value) -> Result<(), HarnessError> {
        let w = self.create(name)?;
        serde_json::to_writer_pretty(w, value).map_err(|e| HarnessError::Config(e.to_string()))
    }

    fn write_csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<(), HarnessError> {
        let path = self.path(name)?;
        let mut w = csv::Writer::from_path(&path).map_err(|e| HarnessError::Config(e.to_string()))?;
        for r in rows {
            w.serialize(r).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        w.flush().map_err(|source| io_err(&path, source))
    }

    fn dump(&mut self, name: &str, op: &SparseOp) -> Result<(), HarnessError> {
        if self.cfg.dump_ops {
            let path = self.cfg.out.join(name);
            let w = self.create(name)?;
            op.write_matrix_market(w).map_err(|source| io_err(&path, source))?;
        }
        Ok(())
    }
}

fn io_err(path: &Path, source: std::io::Error) -> HarnessError {
    HarnessError::Io { context: format!("writing {}", path.display()), source }
}

/// The configured circuit, or the empty circuit on the configured grid.
fn compile(cfg: &ExperimentConfig) -> Result<(CircuitIR, GridSpec, GateAssignment), HarnessError> {
    let circuit = match cfg.circuit_text()? {
        Some(text) => parse_circuit(&text)?,
        None => CircuitIR::new(2 * cfg.m.max(1) - 1),
    };
    let m = (circuit.wire_count + 1) / 2;
    let (grid, assignment) = layout(&circuit, m, LayoutOptions { default_length: cfg.params.length })?;
    Ok((circuit, grid, assignment))
}

fn input_bits(cfg: &ExperimentConfig, wires: usize) -> Result<Vec<u8>, HarnessError> {
    match &cfg.params.input {
        Some(bits) if bits.len() != wires => Err(HarnessError::InputLength { expected: wires, got: bits.len() }),
        Some(bits) => Ok(bits.clone()),
        None => Ok(vec![0; wires]),
    }
}

fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    let n = steps.max(1);
    (0..=n).map(|k| t_max * k as f64 / n as f64).collect()
}

/// Runs the experiment, writing `report.json` and any tables into `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, HarnessError> {
    let warnings = cfg.validate()?;
    std::fs::create_dir_all(&cfg.out).map_err(|source| io_err(&cfg.out, source))?;
    let mut run = Run { cfg, timings: BTreeMap::new(), checks: Vec::new(), warnings, files: Vec::new() };
    let data = match cfg.kind {
        ExperimentKind::DemoToy => demo_toy(&mut run)?,
        ExperimentKind::Spectrum => spectrum(&mut run)?,
        ExperimentKind::Evolve => evolve_run(&mut run)?,
        ExperimentKind::Adiabatic => adiabatic(&mut run)?,
        ExperimentKind::ValidatePt => validate_pt(&mut run)?,
        ExperimentKind::Leakage => leakage(&mut run)?,
        ExperimentKind::Netlist => netlist(&mut run)?,
        ExperimentKind::LogicCheck => logic_check(&mut run)?,
    };
    run.files.push("report.json".into());
    let report = Report {
        kind: cfg.kind,
        version: env!("CARGO_PKG_VERSION").to_string(),
        parameters: serde_json::to_value(cfg).expect("config serializes"),
        timings: run.timings,
        checks: run.checks,
        warnings: run.warnings,
        data,
        files: run.files,
    };
    let path = cfg.out.join("report.json");
    let w = File::create(&path).map(BufWriter::new).map_err(|source| io_err(&path, source))?;
    serde_json::to_writer_pretty(w, &report).map_err(|e| HarnessError::Config(e.to_string()))?;
    Ok(report)
}

#[derive(Serialize)]
struct ToyRow {
    g: f64,
    lower: f64,
    upper: f64,
    closed_lower: f64,
    closed_upper: f64,
}

fn demo_toy(run: &mut Run) -> Result<Value, HarnessError> {
    let delta = run.cfg.params.delta;
    let mut rows = Vec::new();
    let mut spectra = Vec::new();
    let mut worst: f64 = 0.0;
    for &g in &run.cfg.params.g_list {
        let h = build_blocking_toy(delta, g);
        let full = run.timed("diagonalise", || solve::eigenvalues(&h));
        // States 110 and 101: the particle on qubit 2 hops onto the blocked qubit 3.
        let blocked = solve::eigenvalues(&h.submatrix(&[0b110, 0b101]));
        let root = (1.0 + 4.0 * g * g / (delta * delta)).sqrt();
        let closed = [delta / 2.0 * (1.0 - root), delta / 2.0 * (1.0 + root)];
        worst = worst.max((blocked[0] - closed[0]).abs()).max((blocked[1] - closed[1]).abs());
        rows.push(ToyRow { g, lower: blocked[0], upper: blocked[1], closed_lower: closed[0], closed_upper: closed[1] });
        spectra.push(json!({ "g": g, "eigenvalues": full }));
        if run.cfg.dump_ops {
            run.dump(&format!("toy_g{g}.mtx"), &h)?;
        }
    }
    run.check("blocked pair matches closed form", worst <= 1e-12, format!("max error {worst:e}"));
    run.write_csv("toy.csv", &rows)?;
    Ok(json!({ "delta": delta, "spectra": spectra, "max_error": worst }))
}

fn spectrum(run: &mut Run) -> Result<Value, HarnessError> {
    let (_, grid, _) = run.timed("compile", || compile(run.cfg))?;
    let m = grid.m();
    let delta = run.cfg.params.delta;
    let sector = SectorBasis::new(&grid);
    let h = run.timed("assemble", || build_h_string(&grid, &sector, delta));
    let band = crate::stringspace::correct_string_basis(&grid).map_err(effective::EffectiveError::from)?.len();
    let k = run.cfg.params.eigenpairs.unwrap_or(band + 1).min(h.dim());
    let opts = SolverOptions { seed: run.cfg.seed, offset: (2 * m + 1) as f64 * delta, vectors: false, ..Default::default() };
    let spec = run.timed("solve", || solve::lowest_eigenpairs(&h, k, &opts))?;
    let ground = spec.eigenvalues.first().copied().unwrap_or(f64::NAN);
    run.check("ground level at (2m+1) delta", ground.abs() <= 1e-10, format!("E0 - (2m+1) delta = {ground:e}"));
    run.check(
        "ground degeneracy equals correct-string count",
        spec.ground_degeneracy() == band,
        format!("{} vs {band}", spec.ground_degeneracy()),
    );
    run.dump("h_string.mtx", &h)?;
    Ok(json!({
        "m": m,
        "dimension": h.dim(),
        "band": band,
        "gap": spec.band_gap(band),
        "spectrum": spec,
    }))
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    arrival: f64,
    norm: f64,
    energy: f64,
}

fn evolve_run(run: &mut Run) -> Result<Value, HarnessError> {
    let (circuit, grid, assignment) = run.timed("compile", || compile(run.cfg))?;
    let m = grid.m();
    let g = run.cfg.params.g;
    let input = input_bits(run.cfg, circuit.wire_count)?;
    let eff = run.timed("assemble", || build_effective(&grid, &assignment, g, &EffectiveMode::Hamiltonian))?;
    let basis = &eff.basis;
    let start = basis.graph.index_of(z_init(m)).expect("initial string exists");
    let mut psi0 = vec![C64::new(0.0, 0.0); basis.len()];
    psi0[basis.index(start, effective::input_word(&input))] = C64::new(1.0, 0.0);
    let t_max = if run.cfg.params.t_max > 0.0 { run.cfg.params.t_max } else { 5.0 * m as f64 / g };
    let times = time_grid(t_max, run.cfg.params.t_steps);
    let trace = run.timed("evolve", || evolve(&eff.op, &psi0, &times))?;
    let end = basis.graph.index_of(z_final(m)).expect("final string exists");
    let target: Vec<usize> = (0..basis.spin_dim() as u32).map(|s| basis.index(end, s)).collect();
    let arrival = arrival_statistics(&trace, &target, 0.5);
    let norms = trace.norms();
    let energies = trace.energies(&eff.op);
    let norm_err = norms.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let drift = energies.iter().map(|e| (e - energies[0]).abs()).fold(0.0, f64::max);
    run.check("norm conserved", norm_err <= 1e-10, format!("max |norm - 1| = {norm_err:e}"));
    run.check("energy conserved", drift <= 1e-8, format!("max drift {drift:e}"));
    let logic = compare_logic(&LogicSource::Trace { trace: &trace, basis }, &circuit, &input)?;
    run.check(
        "final-string state matches the circuit",
        logic.fidelity >= 1.0 - 1e-8,
        format!("fidelity {} at weight {}", logic.fidelity, logic.weight),
    );
    let rows: Vec<TraceRow> = (0..times.len())
        .map(|k| TraceRow { t: times[k], arrival: arrival.series[k], norm: norms[k], energy: energies[k] })
        .collect();
    run.write_csv("trace.csv", &rows)?;
    run.dump("h_eff.mtx", &eff.op)?;
    Ok(json!({
        "m": m,
        "dimension": basis.len(),
        "steps": trace.steps,
        "arrival": {
            "max_probability": arrival.max_probability,
            "time_of_max": arrival.time_of_max,
            "first_crossing": arrival.first_crossing,
            "threshold": arrival.threshold,
        },
        "logic": logic,
    }))
}

fn adiabatic(run: &mut Run) -> Result<Value, HarnessError> {
    let (circuit, grid, assignment) = run.timed("compile", || compile(run.cfg))?;
    let params = run.cfg.model_params();
    let input = input_bits(run.cfg, circuit.wire_count)?;
    let lambdas = &run.cfg.params.lambda_grid;
    let points = run.timed("sweep", || solve::adiabatic_sweep(&grid, &assignment, &params, lambdas, &input))?;
    let mut worst: f64 = 0.0;
    for &lambda in lambdas {
        let r = run.timed("chain check", || {
            effective::chain_equivalence(&grid, &assignment, params.g, lambda, &input, params.input_strength)
        })?;
        worst = worst.max(r.off_block).max(r.block);
    }
    run.check("rotated operator equals the chain", worst <= 1e-10, format!("max deviation {worst:e}"));
    if let Some(p) = points.iter().find(|p| p.lambda == 0.0) {
        run.check("ground state at lambda 0 is the mapped chain ground", p.overlap >= 1.0 - 1e-10, format!("overlap {}", p.overlap));
    }
    let min_gap = points.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min);
    run.write_csv("gap_curve.csv", &points)?;
    Ok(json!({ "points": points, "min_gap": min_gap }))
}

fn validate_pt(run: &mut Run) -> Result<Value, HarnessError> {
    let (_, grid, assignment) = run.timed("compile", || compile(run.cfg))?;
    let p = &run.cfg.params;
    let report = run.timed("validate", || effective::validate_perturbation(&grid, &assignment, &p.g_list, p.delta))?;
    run.warnings.extend(report.warnings.iter().cloned());
    for r in &report.rows {
        run.check(&format!("deviation within bound at g = {}", r.g), r.deviation <= r.bound, format!("{:e} vs {:e}", r.deviation, r.bound));
    }
    let slope = report.slope.unwrap_or(f64::NAN);
    let detail = if report.reliable { format!("slope {slope}") } else { format!("slope {slope} (unreliable)") };
    run.check("deviation scales as g^2", (slope - 2.0).abs() <= 0.2, detail);
    run.write_csv("deviation.csv", &report.rows)?;
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

fn leakage(run: &mut Run) -> Result<Value, HarnessError> {
    let p = &run.cfg.params;
    let report = run.timed("scan", || effective::cnot_leakage_scan(p.length, &p.g_list, p.delta, p.control))?;
    let slope = report.slope.unwrap_or(f64::NAN);
    run.check("slope fitted", slope.is_finite(), format!("slope {slope}"));
    run.write_csv("leakage.csv", &report.rows)?;
    Ok(serde_json::to_value(&report).expect("report serializes"))
}

fn netlist(run: &mut Run) -> Result<Value, HarnessError> {
    let (circuit, grid, assignment) = run.timed("compile", || compile(run.cfg))?;
    let params = run.cfg.model_params();
    let mode = match &run.cfg.params.input {
        Some(_) => NetlistMode::Adiabatic { lambda: params.lambda, input: Some(input_bits(run.cfg, circuit.wire_count)?) },
        None => NetlistMode::Hamiltonian,
    };
    let net = run.timed("emit", || emit_netlist(&grid, &assignment, &mode, &params))?;
    if mode == NetlistMode::Hamiltonian {
        let pairs = |k: TermKind| -> Vec<Vec<crate::circuit::Qubit>> {
            net.terms.iter().filter(|t| t.kind == k).map(|t| t.qubits.clone()).collect()
        };
        let zz = pairs(TermKind::ZZ);
        let shared = pairs(TermKind::XXpYY).iter().chain(pairs(TermKind::XYmYX).iter()).filter(|q| zz.contains(q)).count();
        run.check("ZZ and hop couplings act on disjoint pairs", shared == 0, format!("{shared} shared pairs"));
    }
    run.write_json("grid.json", &grid.to_json())?;
    run.write_json("netlist.json", &net.to_json())?;
    let csv_path = run.cfg.out.join("netlist.csv");
    let w = run.create("netlist.csv")?;
    net.write_csv(w).map_err(|e| HarnessError::Io { context: format!("writing {}", csv_path.display()), source: e.into() })?;
    Ok(json!({ "terms": net.terms.len(), "qubits": net.qubits().len(), "circuit": circuit.to_string() }))
}

#[derive(Serialize)]
struct LogicRow {
    seed: u64,
    gates: usize,
    input: String,
    isometry_fidelity: f64,
    dynamics_fidelity: f64,
    weight: f64,
}

fn logic_check(run: &mut Run) -> Result<Value, HarnessError> {
    let cfg = run.cfg;
    let m = cfg.m;
    let g = cfg.params.g;
    let wires = 2 * m - 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rows = Vec::new();
    for k in 0..cfg.params.circuits as u64 {
        let seed = cfg.seed.wrapping_add(k);
        let circuit = random_circuit(m, cfg.params.max_gates, seed, cfg.params.toffoli);
        let input: Vec<u8> = (0..wires).map(|_| rng.gen_range(0..2)).collect();
        let (grid, assignment) = layout(&circuit, m, LayoutOptions::default())?;
        let w = run.timed("isometry", || build_isometry(&grid, &assignment))?;
        let iso = compare_logic(&LogicSource::Isometry(&w), &circuit, &input)?;
        let eff = run.timed("assemble", || build_effective(&grid, &assignment, g, &EffectiveMode::Hamiltonian))?;
        let basis = &eff.basis;
        let mut psi0 = vec![C64::new(0.0, 0.0); basis.len()];
        psi0[basis.index(basis.graph.index_of(z_init(m)).unwrap(), effective::input_word(&input))] = C64::new(1.0, 0.0);
        let t_max = if cfg.params.t_max > 0.0 { cfg.params.t_max } else { 5.0 * m as f64 / g };
        let trace = run.timed("evolve", || evolve(&eff.op, &psi0, &time_grid(t_max, cfg.params.t_steps)))?;
        let dynamics = compare_logic(&LogicSource::Trace { trace: &trace, basis }, &circuit, &input)?;
        rows.push(LogicRow {
            seed,
            gates: circuit.gates.len(),
            input: input.iter().map(|b| b.to_string()).collect(),
            isometry_fidelity: iso.fidelity,
            dynamics_fidelity: dynamics.fidelity,
            weight: dynamics.weight,
        });
    }
    let iso_min = rows.iter().map(|r| r.isometry_fidelity).fold(1.0, f64::min);
    let dyn_min = rows.iter().map(|r| r.dynamics_fidelity).fold(1.0, f64::min);
    run.check("isometry reproduces every circuit", iso_min >= 1.0 - 1e-10, format!("min fidelity {iso_min}"));
    run.check("dynamics reproduce every circuit", dyn_min >= 1.0 - 1e-8, format!("min fidelity {dyn_min}"));
    run.write_csv("logic.csv", &rows)?;
    Ok(json!({ "circuits": rows.len(), "min_isometry_fidelity": iso_min, "min_dynamics_fidelity": dyn_min }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind, dir: &Path) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(kind);
        c.out = dir.to_path_buf();
        c
    }

    #[test]
    fn toy_and_spectrum_runs() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_experiment(&cfg(ExperimentKind::DemoToy, dir.path())).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!(dir.path().join("toy.csv").is_file() && dir.path().join("report.json").is_file());

        let mut c = cfg(ExperimentKind::Spectrum, dir.path());
        c.source = Some("wires 3; CNOT 2 1".into());
        c.dump_ops = true;
        let r = run_experiment(&c).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.data["band"], 48);
        assert!(dir.path().join("h_string.mtx").is_file());
    }

    #[test]
    fn netlist_and_evolve_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::Netlist, dir.path());
        c.source = Some("wires 3; H 0; T 2".into());
        let r = run_experiment(&c).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!(dir.path().join("netlist.csv").is_file());

        let mut c = cfg(ExperimentKind::Evolve, dir.path());
        c.source = Some("wires 3; CNOT 2 1".into());
        c.params.input = Some(vec![0, 1, 0]);
        c.params.t_steps = 50;
        let r = run_experiment(&c).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert!(r.timings.contains_key("evolve"));
    }

    #[test]
    fn logic_check_run() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = cfg(ExperimentKind::LogicCheck, dir.path());
        c.params.circuits = 2;
        c.params.max_gates = 4;
        c.params.t_steps = 40;
        let r = run_experiment(&c).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
    }
}
