//! Python bindings: the main spin-network types and operations exposed
//! through numpy arrays. Build with `cargo build --release -p spinnet-py`;
//! see python/smoke_test.py for a loading recipe.

use numpy::{Complex64, PyArray2, PyReadonlyArray2, ToPyArray};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use spinnet::su2::Spin;

fn err<T>(r: spinnet::Result<T>) -> PyResult<T> {
    r.map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, all spins passed as 2x
/// their value (Condon-Shortley convention).
#[pyfunction]
fn cg_coefficient(
    twice_j1: u32,
    twice_m1: i32,
    twice_j2: u32,
    twice_m2: i32,
    twice_j: u32,
    twice_m: i32,
) -> PyResult<f64> {
    err(spinnet::su2::cg_coefficient(
        Spin::from_twice(twice_j1),
        twice_m1,
        Spin::from_twice(twice_j2),
        twice_m2,
        Spin::from_twice(twice_j),
        twice_m,
    ))
}

/// Schur-Weyl decomposition of n qubits as a list of
/// (twice_spin, multiplicity, dimension) triples, highest spin first.
#[pyfunction]
fn decompose_qubits(n: usize) -> PyResult<Vec<(u32, u64, usize)>> {
    let dec = err(spinnet::su2::decompose_qubits(n))?;
    Ok(dec
        .blocks
        .iter()
        .map(|b| (b.spin.twice(), b.multiplicity, b.dim()))
        .collect())
}

#[pyfunction]
fn catalan(n: u64) -> u64 {
    spinnet::su2::catalan(n) as u64
}

/// The dense 2^n x 2^n Schur transform.
#[pyfunction]
fn schur_matrix<'py>(py: Python<'py>, n: usize) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
    let s = err(spinnet::schur::build_schur(n))?;
    Ok(s.matrix().to_pyarray(py))
}

/// Row labels of the Schur transform: (coupling path, 2*Jz) per row.
#[pyfunction]
fn schur_row_labels(n: usize) -> PyResult<Vec<(String, i32)>> {
    let s = err(spinnet::schur::build_schur(n))?;
    Ok(s.rows()
        .iter()
        .map(|r| (s.paths()[r.path_index].to_string(), r.twice_m))
        .collect())
}

/// Two-qubit vertex gate V2(theta).
#[pyfunction]
fn vertex2<'py>(py: Python<'py>, theta: f64) -> Bound<'py, PyArray2<Complex64>> {
    spinnet::vertex::vertex2(theta).to_pyarray(py)
}

/// Three-qubit vertex gate V3(theta0..theta3).
#[pyfunction]
fn vertex3<'py>(py: Python<'py>, theta: [f64; 4]) -> Bound<'py, PyArray2<Complex64>> {
    spinnet::vertex::vertex3(&theta).to_pyarray(py)
}

/// General k-qubit vertex gate from a flat Hermitian-coefficient vector of
/// length Catalan(k).
#[pyfunction]
fn vertex_gate<'py>(
    py: Python<'py>,
    k: usize,
    params: Vec<f64>,
) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
    let dec = err(spinnet::su2::decompose_qubits(k))?;
    let bp = err(spinnet::vertex::BlockUnitaryParams::from_flat(&dec, &params))?;
    let v = err(spinnet::vertex::vertex(k, &bp))?;
    Ok(v.matrix.to_pyarray(py))
}

/// The scalar-product gate W(theta12, theta23, theta13, phi).
#[pyfunction]
fn scalar_gate<'py>(
    py: Python<'py>,
    theta12: f64,
    theta23: f64,
    theta13: f64,
    phi: f64,
) -> Bound<'py, PyArray2<Complex64>> {
    spinnet::vertex::scalar_gate(theta12, theta23, theta13, phi).to_pyarray(py)
}

/// Map scalar-gate angles onto the vertex chart; returns (theta[4], phase)
/// with W = exp(i phase) V3(theta).
#[pyfunction]
fn scalar_to_vertex3_params(
    theta12: f64,
    theta23: f64,
    theta13: f64,
    phi: f64,
) -> ([f64; 4], f64) {
    spinnet::vertex::scalar_to_vertex3_params(theta12, theta23, theta13, phi)
}

/// Operator realization of a three-qubit generator: "I", "X", "Y", or "Z".
#[pyfunction]
fn three_qubit_generator<'py>(
    py: Python<'py>,
    which: &str,
) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
    let g = spinnet::perm::three_qubit_generators();
    let elem = match which {
        "I" => g.g_i,
        "X" => g.g_x,
        "Y" => g.g_y,
        "Z" => g.g_z,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown generator {other:?}; expected I, X, Y, or Z"
            )))
        }
    };
    Ok(err(elem.to_matrix())?.to_pyarray(py))
}

/// Check U^(x)n-equivariance of a matrix; returns (ok, worst commutator norm).
#[pyfunction]
#[pyo3(signature = (matrix, trials = 10, tol = 1e-9, seed = 0))]
fn is_equivariant(
    matrix: PyReadonlyArray2<Complex64>,
    trials: usize,
    tol: f64,
    seed: u64,
) -> PyResult<(bool, f64)> {
    let m = matrix.as_array().to_owned();
    let dim = m.nrows();
    if !dim.is_power_of_two() || dim != m.ncols() {
        return Err(PyValueError::new_err(
            "matrix must be square with power-of-two dimension",
        ));
    }
    let n = dim.trailing_zeros() as usize;
    let mut rng = spinnet::rng::seeded_rng(seed);
    Ok(spinnet::twirl::is_equivariant(&m, n, trials, tol, &mut rng))
}

/// Exact SU(2) twirl of a Hermitian matrix via Schur-basis projection.
#[pyfunction]
fn project_to_commutant<'py>(
    py: Python<'py>,
    matrix: PyReadonlyArray2<Complex64>,
) -> PyResult<Bound<'py, PyArray2<Complex64>>> {
    let m = matrix.as_array().to_owned();
    Ok(err(spinnet::twirl::project_to_commutant(&m))?.to_pyarray(py))
}

/// Lanczos ground-state energy of the triangular-chain Heisenberg model;
/// returns (E_GS, residual).
#[pyfunction]
fn ground_energy_triangular(n: usize, j1: f64, j2: f64) -> PyResult<(f64, f64)> {
    let h = err(spinnet::ham::triangular_1d(n, j1, j2))?;
    err(spinnet::ham::ground_energy(&h, 1e-10))
}

/// The shipped 18-site Kagome cluster in the lattice text format.
#[pyfunction]
fn kagome18_lattice_text() -> String {
    spinnet::lattice::LatticeSpec::kagome18_default().to_text()
}

/// Run one VQE optimization. kind is "two-vertex-triangular",
/// "three-vertex-triangular", or "three-vertex-kagome" (the latter uses the
/// built-in 18-site cluster and ignores n/j1/j2). Returns a dict with the
/// run record essentials.
#[pyfunction]
#[pyo3(signature = (kind, n, p, seed, j1 = 1.0, j2 = 0.0, max_iters = 500))]
fn run_vqe<'py>(
    py: Python<'py>,
    kind: &str,
    n: usize,
    p: usize,
    seed: u64,
    j1: f64,
    j2: f64,
    max_iters: usize,
) -> PyResult<Bound<'py, PyDict>> {
    use spinnet::vqe::{adam_minimize, build_ansatz, AnsatzKind, AnsatzSpec, OptimizerConfig};
    let (kind, lattice) = match kind {
        "two-vertex-triangular" => (AnsatzKind::TwoVertexTriangular, None),
        "three-vertex-triangular" => (AnsatzKind::ThreeVertexTriangular, None),
        "three-vertex-kagome" => (
            AnsatzKind::ThreeVertexKagome,
            Some(spinnet::lattice::LatticeSpec::kagome18_default()),
        ),
        other => return Err(PyValueError::new_err(format!("unknown ansatz {other:?}"))),
    };
    let (h, n, problem) = match &lattice {
        Some(spec) => (
            err(spinnet::ham::from_lattice(spec))?,
            spec.n,
            "kagome-n18".to_string(),
        ),
        None => (
            err(spinnet::ham::triangular_1d(n, j1, j2))?,
            n,
            format!("triangular-n{n}-j1{j1}-j2{j2}"),
        ),
    };
    let ansatz = err(build_ansatz(&AnsatzSpec { kind, n, p }, lattice.as_ref()))?;
    let (e_gs, _) = err(spinnet::ham::ground_energy(&h, 1e-10))?;
    let cfg = OptimizerConfig {
        max_iters,
        seed,
        ..OptimizerConfig::default()
    };
    let record = err(adam_minimize(&ansatz, &h, &cfg, e_gs, &problem))?;

    let out = PyDict::new(py);
    out.set_item("ansatz", record.ansatz)?;
    out.set_item("problem", record.problem)?;
    out.set_item("n", record.n)?;
    out.set_item("p", record.p)?;
    out.set_item("param_count", record.param_count)?;
    out.set_item("seed", record.seed)?;
    out.set_item("final_energy", record.final_energy)?;
    out.set_item("e_gs", record.e_gs)?;
    out.set_item("final_e_tilde", record.final_e_tilde)?;
    out.set_item("iters", record.iters)?;
    out.set_item("energy_trace", record.energy_trace)?;
    out.set_item("max_total_spin", record.max_total_spin)?;
    Ok(out)
}

#[pymodule]
fn spinnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(cg_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_qubits, m)?)?;
    m.add_function(wrap_pyfunction!(catalan, m)?)?;
    m.add_function(wrap_pyfunction!(schur_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(schur_row_labels, m)?)?;
    m.add_function(wrap_pyfunction!(vertex2, m)?)?;
    m.add_function(wrap_pyfunction!(vertex3, m)?)?;
    m.add_function(wrap_pyfunction!(vertex_gate, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_gate, m)?)?;
    m.add_function(wrap_pyfunction!(scalar_to_vertex3_params, m)?)?;
    m.add_function(wrap_pyfunction!(three_qubit_generator, m)?)?;
    m.add_function(wrap_pyfunction!(is_equivariant, m)?)?;
    m.add_function(wrap_pyfunction!(project_to_commutant, m)?)?;
    m.add_function(wrap_pyfunction!(ground_energy_triangular, m)?)?;
    m.add_function(wrap_pyfunction!(kagome18_lattice_text, m)?)?;
    m.add_function(wrap_pyfunction!(run_vqe, m)?)?;
    Ok(())
}
