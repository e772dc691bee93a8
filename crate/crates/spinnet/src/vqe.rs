//! Ansatz builders for the triangular-chain and Kagome experiments, Adam
//! optimization with exact adjoint gradients, and multi-seed sweep
//! orchestration with resumable on-disk records.

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SpinNetError};
use crate::ham::{ground_energy, normalized_energy, PauliHamiltonian};
use crate::lattice::{kagome_gate_order, LatticeSpec};
use crate::rng::{derive_seed, seeded_rng};
use crate::sim::{apply_gate, singlet_state, Circuit, GateKind, StateVector};

/// The circuit families used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnsatzKind {
    /// Two-qubit vertex gates on the triangular chain; 2np parameters.
    TwoVertexTriangular,
    /// Three-qubit vertex gates on the triangular chain; 4np parameters.
    ThreeVertexTriangular,
    /// Three-qubit vertex gates on the Kagome triangles; 48p parameters.
    ThreeVertexKagome,
}

impl AnsatzKind {
    pub fn name(&self) -> &'static str {
        match self {
            AnsatzKind::TwoVertexTriangular => "two-vertex-triangular",
            AnsatzKind::ThreeVertexTriangular => "three-vertex-triangular",
            AnsatzKind::ThreeVertexKagome => "three-vertex-kagome",
        }
    }
}

/// Declarative ansatz description: kind, register size, block count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub kind: AnsatzKind,
    pub n: usize,
    pub p: usize,
}

impl AnsatzSpec {
    pub fn param_count(&self) -> usize {
        match self.kind {
            AnsatzKind::TwoVertexTriangular => 2 * self.n * self.p,
            AnsatzKind::ThreeVertexTriangular => 4 * self.n * self.p,
            AnsatzKind::ThreeVertexKagome => 48 * self.p,
        }
    }
}

/// A built ansatz: the circuit plus the singlet matching of its initial state.
#[derive(Debug, Clone)]
pub struct Ansatz {
    pub spec: AnsatzSpec,
    pub circuit: Circuit,
    pub singlet_pairs: Vec<(usize, usize)>,
}

impl Ansatz {
    pub fn initial_state(&self) -> Result<StateVector> {
        singlet_state(&self.singlet_pairs, self.spec.n)
    }
}

/// Build the circuit for an ansatz spec. Products are read right-to-left
/// (rightmost factor applied first), so within each block the sub-products
/// run with descending gate index; blocks run 1..p. Parameter slices follow
/// gate push order, block-major.
pub fn build_ansatz(spec: &AnsatzSpec, lattice: Option<&LatticeSpec>) -> Result<Ansatz> {
    let n = spec.n;
    if spec.p == 0 {
        return Err(SpinNetError::Domain("block count p must be positive".into()));
    }
    let mut circuit = Circuit::new(n);
    let singlet_pairs: Vec<(usize, usize)>;
    match spec.kind {
        AnsatzKind::TwoVertexTriangular => {
            if n < 4 || n % 2 != 0 {
                return Err(SpinNetError::Domain(format!(
                    "triangular ansatz needs even n >= 4, got {n}"
                )));
            }
            for _ in 0..spec.p {
                // V_{2j-1, 2j}: disjoint pairs (1-based), j = n/2 .. 1.
                for j in (1..=n / 2).rev() {
                    circuit.push(GateKind::Vertex2, vec![2 * j - 2, 2 * j - 1])?;
                }
                // V_{2j, 2j+1}: staggered pairs, periodic.
                for j in (1..=n / 2).rev() {
                    circuit.push(GateKind::Vertex2, vec![2 * j - 1, (2 * j) % n])?;
                }
                // V_{j, j+2}: next-nearest pairs, periodic.
                for j in (1..=n).rev() {
                    circuit.push(GateKind::Vertex2, vec![j - 1, (j + 1) % n])?;
                }
            }
            singlet_pairs = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        }
        AnsatzKind::ThreeVertexTriangular => {
            if n < 4 || n % 2 != 0 {
                return Err(SpinNetError::Domain(format!(
                    "triangular ansatz needs even n >= 4, got {n}"
                )));
            }
            for _ in 0..spec.p {
                for j in (1..=n).rev() {
                    circuit.push(
                        GateKind::Vertex3,
                        vec![j - 1, j % n, (j + 1) % n],
                    )?;
                }
            }
            singlet_pairs = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        }
        AnsatzKind::ThreeVertexKagome => {
            let lattice = lattice.ok_or_else(|| {
                SpinNetError::Domain("the Kagome ansatz needs a lattice spec".into())
            })?;
            lattice.validate_strict()?;
            if lattice.n != n {
                return Err(SpinNetError::Dimension(format!(
                    "ansatz register {} does not match lattice sites {}",
                    n, lattice.n
                )));
            }
            let order = kagome_gate_order(lattice);
            for _ in 0..spec.p {
                // Lower-case triangles are the rightmost product: apply f..a
                // first, then F..A.
                let (lower, upper) = order.split_at(order.len() / 2);
                for tri in lower.iter().rev() {
                    circuit.push(GateKind::Vertex3, tri.to_vec())?;
                }
                for tri in upper.iter().rev() {
                    circuit.push(GateKind::Vertex3, tri.to_vec())?;
                }
            }
            singlet_pairs = lattice.singlet_matching.clone();
        }
    }
    debug_assert_eq!(circuit.param_count(), spec.param_count());
    Ok(Ansatz {
        spec: *spec,
        circuit,
        singlet_pairs,
    })
}

/// i.i.d. samples from U[0, alpha] / count.
pub fn init_params(count: usize, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(SpinNetError::Domain("parameter count must be >= 1".into()));
    }
    if alpha <= 0.0 {
        return Err(SpinNetError::Domain(format!(
            "init scale alpha must be positive, got {alpha}"
        )));
    }
    let mut rng = seeded_rng(seed);
    Ok((0..count)
        .map(|_| rng.gen_range(0.0..alpha) / count as f64)
        .collect())
}

/// Adam hyperparameters and run limits. The defaults are recorded into every
/// run record so results are self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stop when the best energy improves by less than `stall_tol` over the
    /// last `stall_window` iterations.
    pub stall_window: usize,
    pub stall_tol: f64,
    /// Scale of the initialization distribution U[0, alpha] / param_count.
    pub init_alpha: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_iters: 2000,
            stall_window: 200,
            stall_tol: 1e-9,
            init_alpha: 1.0,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if !(0.0 < self.beta1 && self.beta1 < 1.0) {
            problems.push(format!("beta1 must be in (0,1), got {}", self.beta1));
        }
        if !(0.0 < self.beta2 && self.beta2 < 1.0) {
            problems.push(format!("beta2 must be in (0,1), got {}", self.beta2));
        }
        if self.learning_rate <= 0.0 {
            problems.push(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.max_iters == 0 {
            problems.push("max_iters must be >= 1".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(SpinNetError::ConfigInvalid(problems.join("\n")))
        }
    }
}

/// Outcome of a generic Adam minimization.
#[derive(Debug, Clone)]
pub struct AdamOutcome {
    pub params: Vec<f64>,
    pub best_params: Vec<f64>,
    pub best_value: f64,
    pub trace: Vec<f64>,
    pub iters: usize,
}

/// Standard Adam with bias correction on an arbitrary differentiable
/// objective. Stops at max_iters or when the best value stalls.
pub fn adam_minimize_fn<F>(mut eval: F, x0: Vec<f64>, cfg: &OptimizerConfig) -> Result<AdamOutcome>
where
    F: FnMut(&[f64]) -> Result<(f64, Vec<f64>)>,
{
    cfg.validate()?;
    let dim = x0.len();
    let mut x = x0;
    let mut m = vec![0.0; dim];
    let mut v = vec![0.0; dim];
    let mut trace = Vec::with_capacity(cfg.max_iters);
    let mut best_value = f64::INFINITY;
    let mut best_params = x.clone();
    let mut best_at = 0usize;

    for t in 1..=cfg.max_iters {
        let (value, grad) = eval(&x)?;
        if !value.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(SpinNetError::OptimizerAbort(format!(
                "non-finite objective or gradient at iteration {t} (value {value})"
            )));
        }
        trace.push(value);
        if value < best_value - cfg.stall_tol {
            best_at = t;
        }
        if value < best_value {
            best_value = value;
            best_params = x.clone();
        }
        if t - best_at >= cfg.stall_window {
            return Ok(AdamOutcome {
                params: x,
                best_params,
                best_value,
                trace,
                iters: t,
            });
        }
        let b1t = 1.0 - cfg.beta1.powi(t as i32);
        let b2t = 1.0 - cfg.beta2.powi(t as i32);
        for i in 0..dim {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * grad[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            let mhat = m[i] / b1t;
            let vhat = v[i] / b2t;
            x[i] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.epsilon);
        }
    }
    Ok(AdamOutcome {
        params: x,
        best_params,
        best_value,
        trace,
        iters: cfg.max_iters,
    })
}

/// Everything recorded about one VQE run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub ansatz: String,
    pub problem: String,
    pub n: usize,
    pub p: usize,
    pub param_count: usize,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
    pub energy_trace: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Converged energy: the minimum energy seen over the run.
    pub final_energy: f64,
    pub e_gs: f64,
    pub final_e_tilde: f64,
    pub iters: usize,
    pub seconds: f64,
    /// Largest <J^2> observed in the spot checks along the optimization.
    pub max_total_spin: f64,
    /// Largest deviation from U^(x)n invariance observed in the spot checks.
    pub max_invariance_defect: f64,
}

/// Run Adam on a circuit ansatz from singlet initial conditions, recording
/// the energy trace and symmetry spot checks.
pub fn adam_minimize(
    ansatz: &Ansatz,
    h: &PauliHamiltonian,
    cfg: &OptimizerConfig,
    e_gs: f64,
    problem: &str,
) -> Result<RunRecord> {
    let start = Instant::now();
    let psi0 = ansatz.initial_state()?;
    let x0 = init_params(ansatz.circuit.param_count(), cfg.init_alpha, cfg.seed)?;

    let check_every = (cfg.max_iters / 10).max(1);
    let mut iter_counter = 0usize;
    let mut max_total_spin = 0.0f64;
    let mut max_invariance_defect = 0.0f64;
    let mut check_rng = seeded_rng(derive_seed(cfg.seed, 0xcafe));

    let outcome = adam_minimize_fn(
        |params| {
            iter_counter += 1;
            if iter_counter % check_every == 1 || check_every == 1 {
                let mut state = psi0.clone();
                ansatz.circuit.apply(&mut state, params)?;
                max_total_spin = max_total_spin.max(state.total_spin_expectation().abs());
                max_invariance_defect =
                    max_invariance_defect.max(invariance_defect(&state, &mut check_rng)?);
            }
            ansatz.circuit.energy_and_gradient(&psi0, params, h)
        },
        x0,
        cfg,
    )?;

    let final_e_tilde = normalized_energy(outcome.best_value, e_gs)?;
    Ok(RunRecord {
        ansatz: ansatz.spec.kind.name().to_string(),
        problem: problem.to_string(),
        n: ansatz.spec.n,
        p: ansatz.spec.p,
        param_count: ansatz.circuit.param_count(),
        seed: cfg.seed,
        optimizer: cfg.clone(),
        energy_trace: outcome.trace,
        final_params: outcome.best_params,
        final_energy: outcome.best_value,
        e_gs,
        final_e_tilde,
        iters: outcome.iters,
        seconds: start.elapsed().as_secs_f64(),
        max_total_spin,
        max_invariance_defect,
    })
}

/// || U(g)^(x)n |psi> - |psi> || for one Haar-random g, applied through the
/// gate kernel one qubit at a time.
fn invariance_defect(state: &StateVector, rng: &mut impl Rng) -> Result<f64> {
    let g = crate::su2::haar_sample(rng);
    let u = g.matrix2();
    let mut rotated = state.clone();
    for q in 0..state.n() {
        apply_gate(&mut rotated, &u, &[q])?;
    }
    let diff: f64 = rotated
        .amps()
        .iter()
        .zip(state.amps().iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    Ok(diff.sqrt())
}

/// The Hamiltonian side of a sweep.
#[derive(Debug, Clone)]
pub enum SweepProblem {
    Triangular { n: usize, j1: f64, j2: f64 },
    Kagome { lattice: LatticeSpec },
}

impl SweepProblem {
    pub fn label(&self) -> String {
        match self {
            SweepProblem::Triangular { n, j1, j2 } => {
                format!("triangular-n{n}-j1{j1}-j2{j2}")
            }
            SweepProblem::Kagome { lattice } => format!("kagome-n{}", lattice.n),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SweepProblem::Triangular { n, .. } => *n,
            SweepProblem::Kagome { lattice } => lattice.n,
        }
    }

    pub fn hamiltonian(&self) -> Result<PauliHamiltonian> {
        match self {
            SweepProblem::Triangular { n, j1, j2 } => crate::ham::triangular_1d(*n, *j1, *j2),
            SweepProblem::Kagome { lattice } => crate::ham::from_lattice(lattice),
        }
    }

    fn lattice(&self) -> Option<&LatticeSpec> {
        match self {
            SweepProblem::Triangular { .. } => None,
            SweepProblem::Kagome { lattice } => Some(lattice),
        }
    }
}

/// A full experiment: the cross-product of ansatz kinds, block counts, and
/// seeds on one problem.
#[derive(Debug, Clone)]
pub struct SweepPlan {
    pub problem: SweepProblem,
    /// One (ansatz kind, p grid) entry per circuit family in the sweep.
    pub grid: Vec<(AnsatzKind, Vec<usize>)>,
    pub seeds: usize,
    pub master_seed: u64,
    pub optimizer: OptimizerConfig,
    pub out_dir: Option<PathBuf>,
    pub max_seconds: Option<f64>,
    pub max_memory_mb: Option<usize>,
    pub jobs: usize,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub records: Vec<RunRecord>,
    pub e_gs: f64,
    /// True when the wall-clock budget truncated the sweep.
    pub truncated: bool,
    pub resumed: usize,
}

/// Estimated peak memory of one optimization cell (state vectors and scratch).
pub fn estimate_cell_memory_bytes(n: usize) -> usize {
    6 * (1usize << n) * std::mem::size_of::<crate::linalg::C64>()
}

/// Run (or resume) the sweep. Records are written one JSON file per cell as
/// they finish; existing records are loaded instead of re-run, so interrupted
/// sweeps pick up where they left off. A wall-clock budget truncates cleanly.
pub fn experiment_sweep(plan: &SweepPlan) -> Result<SweepOutcome> {
    if plan.grid.is_empty()
        || plan.grid.iter().any(|(_, ps)| ps.is_empty())
        || plan.seeds == 0
    {
        return Err(SpinNetError::ConfigInvalid(
            "sweep needs at least one ansatz kind, one p value per kind, and one seed".into(),
        ));
    }
    let jobs = plan.jobs.max(1);
    if let Some(cap_mb) = plan.max_memory_mb {
        let need = estimate_cell_memory_bytes(plan.problem.n()) * jobs;
        if need > cap_mb * 1024 * 1024 {
            return Err(SpinNetError::ConfigInvalid(format!(
                "estimated memory {} MiB exceeds budget {} MiB",
                need / (1024 * 1024),
                cap_mb
            )));
        }
    }
    if let Some(dir) = &plan.out_dir {
        std::fs::create_dir_all(dir)?;
    }

    let h = plan.problem.hamiltonian()?;
    let (e_gs, _) = ground_energy(&h, 1e-10)?;
    let problem_label = plan.problem.label();

    struct Cell {
        kind: AnsatzKind,
        p: usize,
        seed_index: usize,
        seed: u64,
    }
    let mut cells = Vec::new();
    let mut counter = 0u64;
    for (kind, ps) in &plan.grid {
        for &p in ps {
            for seed_index in 0..plan.seeds {
                cells.push(Cell {
                    kind: *kind,
                    p,
                    seed_index,
                    seed: derive_seed(plan.master_seed, counter),
                });
                counter += 1;
            }
        }
    }

    let start = Instant::now();
    let deadline_hit = AtomicBool::new(false);
    let records: Mutex<Vec<RunRecord>> = Mutex::new(Vec::new());
    let resumed = std::sync::atomic::AtomicUsize::new(0);

    let run_cell = |cell: &Cell| -> Result<()> {
        let file = plan.out_dir.as_ref().map(|d| {
            d.join(format!(
                "{}-p{}-seed{}.json",
                cell.kind.name(),
                cell.p,
                cell.seed_index
            ))
        });
        if let Some(path) = &file {
            if path.exists() {
                if let Ok(rec) = read_record(path) {
                    resumed.fetch_add(1, Ordering::Relaxed);
                    records.lock().unwrap().push(rec);
                    return Ok(());
                }
            }
        }
        if let Some(budget) = plan.max_seconds {
            if start.elapsed().as_secs_f64() > budget {
                deadline_hit.store(true, Ordering::Relaxed);
                return Ok(());
            }
        }
        let spec = AnsatzSpec {
            kind: cell.kind,
            n: plan.problem.n(),
            p: cell.p,
        };
        let ansatz = build_ansatz(&spec, plan.problem.lattice())?;
        let mut cfg = plan.optimizer.clone();
        cfg.seed = cell.seed;
        let record = adam_minimize(&ansatz, &h, &cfg, e_gs, &problem_label)?;
        if let Some(path) = &file {
            write_record(path, &record)?;
        }
        records.lock().unwrap().push(record);
        Ok(())
    };

    if jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| SpinNetError::Numerical(e.to_string()))?;
        pool.install(|| {
            use rayon::prelude::*;
            cells.par_iter().try_for_each(|c| run_cell(c))
        })?;
    } else {
        for cell in &cells {
            run_cell(cell)?;
        }
    }

    let mut records = records.into_inner().unwrap();
    records.sort_by(|a, b| {
        (a.ansatz.clone(), a.p, a.seed).cmp(&(b.ansatz.clone(), b.p, b.seed))
    });
    if let Some(dir) = &plan.out_dir {
        write_summary_csv(&dir.join("summary.csv"), &records)?;
    }
    Ok(SweepOutcome {
        records,
        e_gs,
        truncated: deadline_hit.load(Ordering::Relaxed),
        resumed: resumed.load(Ordering::Relaxed),
    })
}

fn read_record(path: &Path) -> Result<RunRecord> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| SpinNetError::Numerical(format!("corrupt record {path:?}: {e}")))
}

fn write_record(path: &Path, record: &RunRecord) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(
        &tmp,
        serde_json::to_string_pretty(record)
            .map_err(|e| SpinNetError::Numerical(e.to_string()))?,
    )?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// The plotting interface: one CSV row per run.
pub fn write_summary_csv(path: &Path, records: &[RunRecord]) -> Result<()> {
    let mut out =
        String::from("ansatz,n,problem,p,param_count,seed,final_E,final_Etilde,iters,seconds\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{:.12e},{:.6e},{},{:.3}\n",
            r.ansatz,
            r.n,
            r.problem,
            r.p,
            r.param_count,
            r.seed,
            r.final_energy,
            r.final_e_tilde,
            r.iters,
            r.seconds
        ));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// On-disk experiment description (TOML). Optimizer and budget sections are
/// optional; defaults are printed into every run record.
#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub ansatz: AnsatzConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub budget: BudgetConfig,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ProblemConfig {
    /// "triangular" or "kagome"
    pub kind: String,
    pub n: Option<usize>,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    /// Lattice spec file for kagome; the built-in 18-site cluster when absent.
    pub lattice: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AnsatzConfig {
    /// Kinds sharing the `p` grid below.
    #[serde(default)]
    pub kinds: Vec<AnsatzKind>,
    /// Block-count grid shared by `kinds`.
    #[serde(default)]
    pub p: Vec<usize>,
    /// Per-kind grids, for sweeps where the families use different depths.
    #[serde(default)]
    pub grid: Vec<AnsatzGridEntry>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AnsatzGridEntry {
    pub kind: AnsatzKind,
    pub p: Vec<usize>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RunConfig {
    pub seeds: usize,
    pub master_seed: u64,
    /// Output directory; falls back to the SPINNET_OUT_DIR environment
    /// variable, then to no persistence at all.
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
pub struct BudgetConfig {
    pub max_seconds: Option<f64>,
    pub max_memory_mb: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| SpinNetError::ConfigInvalid(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Flatten the shared-kind and per-kind grid forms.
    fn ansatz_grid(&self) -> Vec<(AnsatzKind, Vec<usize>)> {
        let mut out: Vec<(AnsatzKind, Vec<usize>)> = self
            .ansatz
            .kinds
            .iter()
            .map(|k| (*k, self.ansatz.p.clone()))
            .collect();
        for entry in &self.ansatz.grid {
            out.push((entry.kind, entry.p.clone()));
        }
        out
    }

    /// Validate every field, collecting all violations, and assemble the plan.
    pub fn to_plan(&self, jobs: usize) -> Result<SweepPlan> {
        let mut problems = Vec::new();
        let problem = match self.problem.kind.as_str() {
            "triangular" => {
                let n = self.problem.n.unwrap_or(0);
                if n < 4 || n % 2 != 0 {
                    problems.push(format!("problem.n must be even and >= 4, got {n}"));
                }
                if n > 20 {
                    problems.push(format!("problem.n must be <= 20, got {n}"));
                }
                SweepProblem::Triangular {
                    n,
                    j1: self.problem.j1.unwrap_or(1.0),
                    j2: self.problem.j2.unwrap_or(0.0),
                }
            }
            "kagome" => {
                let lattice = match &self.problem.lattice {
                    Some(path) => match std::fs::read_to_string(path) {
                        Ok(text) => match LatticeSpec::parse(&text) {
                            Ok(spec) => Some(spec),
                            Err(e) => {
                                problems.push(format!("problem.lattice: {e}"));
                                None
                            }
                        },
                        Err(e) => {
                            problems.push(format!("problem.lattice {path:?}: {e}"));
                            None
                        }
                    },
                    None => Some(LatticeSpec::kagome18_default()),
                };
                if let Some(spec) = &lattice {
                    if let Err(e) = spec.validate_strict() {
                        problems.push(e.to_string());
                    }
                }
                if !self
                    .ansatz_grid()
                    .iter()
                    .all(|(k, _)| *k == AnsatzKind::ThreeVertexKagome)
                {
                    problems.push(
                        "kagome problems support only the three-vertex-kagome ansatz".into(),
                    );
                }
                SweepProblem::Kagome {
                    lattice: lattice.unwrap_or_else(LatticeSpec::kagome18_default),
                }
            }
            other => {
                problems.push(format!(
                    "problem.kind must be \"triangular\" or \"kagome\", got {other:?}"
                ));
                SweepProblem::Triangular {
                    n: 4,
                    j1: 1.0,
                    j2: 0.0,
                }
            }
        };
        let grid = self.ansatz_grid();
        if self.problem.kind == "triangular"
            && grid.iter().any(|(k, _)| *k == AnsatzKind::ThreeVertexKagome)
        {
            problems.push("the three-vertex-kagome ansatz needs a kagome problem".into());
        }
        if grid.is_empty() {
            problems.push("ansatz.kinds (with ansatz.p) or ansatz.grid must not be empty".into());
        }
        if grid.iter().any(|(_, ps)| ps.is_empty() || ps.iter().any(|&p| p == 0)) {
            problems.push("every ansatz p grid must be a non-empty list of positive block counts".into());
        }
        if self.run.seeds == 0 {
            problems.push("run.seeds must be >= 1".into());
        }
        if let Err(e) = self.optimizer.validate() {
            problems.push(e.to_string());
        }
        if let Some(s) = self.budget.max_seconds {
            if s <= 0.0 {
                problems.push(format!("budget.max_seconds must be positive, got {s}"));
            }
        }
        if !problems.is_empty() {
            return Err(SpinNetError::ConfigInvalid(problems.join("\n")));
        }
        let out_dir = self
            .run
            .output
            .clone()
            .or_else(|| std::env::var_os("SPINNET_OUT_DIR").map(PathBuf::from));
        Ok(SweepPlan {
            problem,
            grid,
            seeds: self.run.seeds,
            master_seed: self.run.master_seed,
            optimizer: self.optimizer.clone(),
            out_dir,
            max_seconds: self.budget.max_seconds,
            max_memory_mb: self.budget.max_memory_mb,
            jobs,
        })
    }
}
