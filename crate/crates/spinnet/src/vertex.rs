//! Parameterised SU(2)-equivariant vertex gates.
//!
//! A k-qubit vertex gate is V = S_k^dagger P S_k where P is block diagonal in
//! the Schur row basis, with one unitary U_i in U(m_i) per irrep, acting on
//! the multiplicity index: P = (+)_i (U_i (x) 1_{d_i}). The two- and
//! three-qubit charts (a singlet phase, and a 2x2 unitary on the spin-1/2
//! copies) are provided alongside the general construction.
//!
//! The identity coefficient of every block is kept, so the parameter count of
//! the general gate is sum_i m_i^2 (the Catalan number of the arity); the
//! redundant global phase is documented rather than removed.

use std::collections::HashMap;
use std::sync::{Arc, LazyLock, Mutex};

use ndarray::Array2;

use crate::error::{Result, SpinNetError};
use crate::linalg::{
    dagger, expm, expm_frechet, identity, kron, pauli_x, pauli_y, pauli_z, CMat, C64, I, ONE,
};
use crate::schur::{build_schur, SchurTransform};
use crate::su2::{decompose_qubits, IrrepDecomposition};

static SCHUR_CACHE: LazyLock<Mutex<HashMap<usize, Arc<SchurTransform>>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// The k-qubit Schur transform, computed once per arity and shared.
pub fn schur_cached(k: usize) -> Result<Arc<SchurTransform>> {
    let mut cache = SCHUR_CACHE.lock().unwrap();
    if let Some(s) = cache.get(&k) {
        return Ok(s.clone());
    }
    let s = Arc::new(build_schur(k)?);
    cache.insert(k, s.clone());
    Ok(s)
}

/// Hermitian basis of m x m matrices used to chart each multiplicity block:
/// the identity first, then the generalized Gell-Mann matrices in a fixed
/// order (symmetric pairs lexicographically, antisymmetric pairs, diagonal
/// traceless). For m = 2 this is exactly (1, X, Y, Z).
pub fn hermitian_basis(m: usize) -> Vec<CMat> {
    let mut basis = vec![identity(m)];
    for j in 0..m {
        for k in j + 1..m {
            let mut s: CMat = Array2::zeros((m, m));
            s[(j, k)] = ONE;
            s[(k, j)] = ONE;
            basis.push(s);
        }
    }
    for j in 0..m {
        for k in j + 1..m {
            let mut a: CMat = Array2::zeros((m, m));
            a[(j, k)] = -I;
            a[(k, j)] = I;
            basis.push(a);
        }
    }
    for l in 1..m {
        let norm = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
        let mut d: CMat = Array2::zeros((m, m));
        for a in 0..l {
            d[(a, a)] = C64::new(norm, 0.0);
        }
        d[(l, l)] = C64::new(-norm * l as f64, 0.0);
        basis.push(d);
    }
    debug_assert_eq!(basis.len(), m * m);
    basis
}

/// Per-block Hermitian coefficient vectors, one vector of length m_i^2 per
/// irrep block of the decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockUnitaryParams {
    blocks: Vec<Vec<f64>>,
}

impl BlockUnitaryParams {
    pub fn new(dec: &IrrepDecomposition, blocks: Vec<Vec<f64>>) -> Result<Self> {
        if blocks.len() != dec.blocks.len() {
            return Err(SpinNetError::Dimension(format!(
                "expected {} parameter blocks, got {}",
                dec.blocks.len(),
                blocks.len()
            )));
        }
        for (pb, ib) in blocks.iter().zip(dec.blocks.iter()) {
            let want = (ib.multiplicity * ib.multiplicity) as usize;
            if pb.len() != want {
                return Err(SpinNetError::Dimension(format!(
                    "spin-{} block needs {} parameters, got {}",
                    ib.spin,
                    want,
                    pb.len()
                )));
            }
        }
        Ok(BlockUnitaryParams { blocks })
    }

    pub fn zeros(dec: &IrrepDecomposition) -> Self {
        let blocks = dec
            .blocks
            .iter()
            .map(|b| vec![0.0; (b.multiplicity * b.multiplicity) as usize])
            .collect();
        BlockUnitaryParams { blocks }
    }

    /// Split a flat parameter vector into per-block slices, block order
    /// matching the decomposition (spin descending).
    pub fn from_flat(dec: &IrrepDecomposition, flat: &[f64]) -> Result<Self> {
        let want: usize = dec.param_count() as usize;
        if flat.len() != want {
            return Err(SpinNetError::Dimension(format!(
                "expected {} parameters for arity {}, got {}",
                want,
                dec.n,
                flat.len()
            )));
        }
        let mut blocks = Vec::with_capacity(dec.blocks.len());
        let mut offset = 0;
        for b in &dec.blocks {
            let len = (b.multiplicity * b.multiplicity) as usize;
            blocks.push(flat[offset..offset + len].to_vec());
            offset += len;
        }
        Ok(BlockUnitaryParams { blocks })
    }

    pub fn blocks(&self) -> &[Vec<f64>] {
        &self.blocks
    }

    pub fn flat(&self) -> Vec<f64> {
        self.blocks.iter().flatten().copied().collect()
    }
}

/// A constructed k-qubit equivariant gate.
#[derive(Debug, Clone)]
pub struct VertexGate {
    pub arity: usize,
    pub params: Vec<f64>,
    pub matrix: CMat,
    pub decomposition: IrrepDecomposition,
}

/// The two-qubit block gate: identity on the triplet, a phase on the singlet
/// row.
pub fn p2(theta: f64) -> CMat {
    let mut p = identity(4);
    p[(3, 3)] = C64::from_polar(1.0, theta);
    p
}

/// The three-qubit block gate: identity on the spin-3/2 block and
/// U_2(theta) = exp(i(t0 1 + t1 X + t2 Y + t3 Z)) mixing the two spin-1/2
/// copies at fixed Jz.
pub fn p3(theta: &[f64; 4]) -> CMat {
    let u2 = u2_from_pauli_chart(theta);
    let mut p = identity(8);
    let block = kron(&u2, &identity(2));
    for i in 0..4 {
        for j in 0..4 {
            p[(4 + i, 4 + j)] = block[(i, j)];
        }
    }
    p
}

fn u2_from_pauli_chart(theta: &[f64; 4]) -> CMat {
    let h = identity(2).mapv(|z| z * theta[0])
        + pauli_x().mapv(|z| z * theta[1])
        + pauli_y().mapv(|z| z * theta[2])
        + pauli_z().mapv(|z| z * theta[3]);
    expm(&h.mapv(|z| z * I))
}

/// Two-qubit vertex gate V2(theta) = S2^dagger P2(theta) S2.
pub fn vertex2(theta: f64) -> CMat {
    let s = schur_cached(2).expect("arity 2 in range");
    dagger(s.matrix()).dot(&p2(theta)).dot(s.matrix())
}

/// d/dtheta of vertex2.
pub fn vertex2_deriv(theta: f64) -> CMat {
    let s = schur_cached(2).expect("arity 2 in range");
    let mut dp: CMat = Array2::zeros((4, 4));
    dp[(3, 3)] = I * C64::from_polar(1.0, theta);
    dagger(s.matrix()).dot(&dp).dot(s.matrix())
}

/// Three-qubit vertex gate V3(theta) = S3^dagger P3(theta) S3.
pub fn vertex3(theta: &[f64; 4]) -> CMat {
    let s = schur_cached(3).expect("arity 3 in range");
    dagger(s.matrix()).dot(&p3(theta)).dot(s.matrix())
}

/// vertex3 together with its four parameter derivatives.
pub fn vertex3_with_derivs(theta: &[f64; 4]) -> (CMat, Vec<CMat>) {
    let s = schur_cached(3).expect("arity 3 in range");
    let paulis = [identity(2), pauli_x(), pauli_y(), pauli_z()];
    let a = identity(2).mapv(|z| z * theta[0])
        + pauli_x().mapv(|z| z * theta[1])
        + pauli_y().mapv(|z| z * theta[2])
        + pauli_z().mapv(|z| z * theta[3]);
    let ia = a.mapv(|z| z * I);
    let mut value: Option<CMat> = None;
    let mut derivs = Vec::with_capacity(4);
    for p in &paulis {
        let (u2, du2) = expm_frechet(&ia, &p.mapv(|z| z * I));
        if value.is_none() {
            let mut pm = identity(8);
            let block = kron(&u2, &identity(2));
            for i in 0..4 {
                for j in 0..4 {
                    pm[(4 + i, 4 + j)] = block[(i, j)];
                }
            }
            value = Some(dagger(s.matrix()).dot(&pm).dot(s.matrix()));
        }
        let mut dp: CMat = Array2::zeros((8, 8));
        let dblock = kron(&du2, &identity(2));
        for i in 0..4 {
            for j in 0..4 {
                dp[(4 + i, 4 + j)] = dblock[(i, j)];
            }
        }
        derivs.push(dagger(s.matrix()).dot(&dp).dot(s.matrix()));
    }
    (value.unwrap(), derivs)
}

/// General k-qubit vertex gate from per-block Hermitian coefficients:
/// V = S_k^dagger [ (+)_i exp(i H(h_i)) (x) 1_{d_i} ] S_k.
pub fn vertex(k: usize, params: &BlockUnitaryParams) -> Result<VertexGate> {
    let (v, _) = vertex_inner(k, params, false)?;
    Ok(v)
}

/// General vertex gate plus derivatives with respect to every parameter, in
/// flat parameter order (blocks by descending spin, Hermitian basis order
/// within a block).
pub fn vertex_with_derivs(
    k: usize,
    params: &BlockUnitaryParams,
) -> Result<(VertexGate, Vec<CMat>)> {
    vertex_inner(k, params, true)
}

fn vertex_inner(
    k: usize,
    params: &BlockUnitaryParams,
    with_derivs: bool,
) -> Result<(VertexGate, Vec<CMat>)> {
    if k == 0 || k > 6 {
        return Err(SpinNetError::Domain(format!(
            "dense vertex gates support 1 <= k <= 6, got {k}"
        )));
    }
    let dec = decompose_qubits(k)?;
    // Re-validate in case params was built against a different decomposition.
    BlockUnitaryParams::new(&dec, params.blocks.clone())?;
    let s = schur_cached(k)?;
    let dim = 1usize << k;

    let mut p = identity(dim);
    let mut block_starts = Vec::with_capacity(dec.blocks.len());
    let mut start = 0usize;
    for (bi, block) in dec.blocks.iter().enumerate() {
        let m = block.multiplicity as usize;
        let d = block.dim();
        block_starts.push(start);
        let basis = hermitian_basis(m);
        let mut h: CMat = Array2::zeros((m, m));
        for (coef, b) in params.blocks[bi].iter().zip(basis.iter()) {
            h = h + b.mapv(|z| z * *coef);
        }
        let u = expm(&h.mapv(|z| z * I));
        let sub = kron(&u, &identity(d));
        for i in 0..m * d {
            for j in 0..m * d {
                p[(start + i, start + j)] = sub[(i, j)];
            }
        }
        start += m * d;
    }
    let sd = dagger(s.matrix());
    let matrix = sd.dot(&p).dot(s.matrix());

    let mut derivs = Vec::new();
    if with_derivs {
        for (bi, block) in dec.blocks.iter().enumerate() {
            let m = block.multiplicity as usize;
            let d = block.dim();
            let basis = hermitian_basis(m);
            let mut h: CMat = Array2::zeros((m, m));
            for (coef, b) in params.blocks[bi].iter().zip(basis.iter()) {
                h = h + b.mapv(|z| z * *coef);
            }
            let ih = h.mapv(|z| z * I);
            for b in basis.iter() {
                let (_, du) = expm_frechet(&ih, &b.mapv(|z| z * I));
                let sub = kron(&du, &identity(d));
                let mut dp: CMat = Array2::zeros((dim, dim));
                let start = block_starts[bi];
                for i in 0..m * d {
                    for j in 0..m * d {
                        dp[(start + i, start + j)] = sub[(i, j)];
                    }
                }
                derivs.push(sd.dot(&dp).dot(s.matrix()));
            }
        }
    }

    Ok((
        VertexGate {
            arity: k,
            params: params.flat(),
            matrix,
            decomposition: dec,
        },
        derivs,
    ))
}

/// sigma_i . sigma_j acting on 3 qubits (1-based positions).
fn sigma_dot_sigma3(a: usize, b: usize) -> CMat {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut out: CMat = Array2::zeros((8, 8));
    for p in &paulis {
        let mut factors = vec![identity(2), identity(2), identity(2)];
        factors[a - 1] = p.clone();
        factors[b - 1] = p.clone();
        out = out + kron(&kron(&factors[0], &factors[1]), &factors[2]);
    }
    out
}

/// sigma_1 . (sigma_2 x sigma_3) on 3 qubits.
fn sigma_triple_product3() -> CMat {
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let eps = |a: usize, b: usize, c: usize| -> f64 {
        match (a, b, c) {
            (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
            (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1.0,
            _ => 0.0,
        }
    };
    let mut out: CMat = Array2::zeros((8, 8));
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let e = eps(a, b, c);
                if e == 0.0 {
                    continue;
                }
                let term = kron(&kron(&paulis[a], &paulis[b]), &paulis[c]);
                out = out + term.mapv(|z| z * e);
            }
        }
    }
    out
}

/// The scalar-product gate
/// W = exp[i (t12 s1.s2 + t23 s2.s3 + t13 s1.s3) + i phi s1.(s2 x s3)],
/// built directly from Pauli tensor products.
pub fn scalar_gate(theta12: f64, theta23: f64, theta13: f64, phi: f64) -> CMat {
    let h = sigma_dot_sigma3(1, 2).mapv(|z| z * theta12)
        + sigma_dot_sigma3(2, 3).mapv(|z| z * theta23)
        + sigma_dot_sigma3(1, 3).mapv(|z| z * theta13)
        + sigma_triple_product3().mapv(|z| z * phi);
    expm(&h.mapv(|z| z * I))
}

/// The exact reparameterisation taking scalar-gate angles to the three-qubit
/// vertex chart: W = e^{i phase} V3(theta). Derived from
/// s1.s2 = 1 - 2 G_I + 2 G_Z, s2.s3 = 1 - 2 G_I - sqrt(3) G_X - G_Z,
/// s1.s3 = 1 - 2 G_I + sqrt(3) G_X - G_Z, s1.(s2 x s3) = +2 sqrt(3) G_Y
/// (the triple-product coefficient follows from
/// [s1.s2, s2.s3] = -2i s1.(s2 x s3) under the standard Pauli algebra).
pub fn scalar_to_vertex3_params(
    theta12: f64,
    theta23: f64,
    theta13: f64,
    phi: f64,
) -> ([f64; 4], f64) {
    let sum = theta12 + theta23 + theta13;
    let theta = [
        -2.0 * sum,
        3f64.sqrt() * (theta13 - theta23),
        2.0 * 3f64.sqrt() * phi,
        2.0 * theta12 - theta23 - theta13,
    ];
    (theta, sum)
}

/// Worst commutator norm max_g |V U(g)^(x)k - U(g)^(x)k V| over Haar samples;
/// a cheap local equivariance check used in tests and the verify suites.
pub fn equivariance_commutator_norm(
    v: &CMat,
    k: usize,
    trials: usize,
    rng: &mut impl rand::Rng,
) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let g = crate::su2::haar_sample(rng);
        let u = crate::su2::tensor_power_rep(&g, k);
        let comm = v.dot(&u) - u.dot(v);
        worst = worst.max(crate::linalg::frobenius_norm(&comm));
    }
    worst
}
