//! Heisenberg Hamiltonians as weighted Pauli strings with matrix-free
//! application, plus Lanczos exact diagonalization for reference ground-state
//! energies.

use std::path::Path;

use ndarray::Array2;

use crate::error::{Result, SpinNetError};
use crate::lattice::LatticeSpec;
use crate::linalg::{eigh_tridiagonal, CMat, C64, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

/// A product of single-qubit Paulis on distinct sites (identity elsewhere).
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    factors: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(mut factors: Vec<(usize, Pauli)>) -> Result<Self> {
        factors.sort_by_key(|(q, _)| *q);
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(SpinNetError::Domain(format!(
                    "duplicate qubit {} in Pauli string",
                    w[0].0
                )));
            }
        }
        Ok(PauliString { factors })
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    fn y_count(&self) -> usize {
        self.factors.iter().filter(|(_, p)| *p == Pauli::Y).count()
    }
}

/// H = sum_t w_t P_t with real weights; Hermitian by construction.
#[derive(Debug, Clone)]
pub struct PauliHamiltonian {
    n: usize,
    terms: Vec<(f64, PauliString)>,
    /// Heisenberg bonds (a, b, w) when the Hamiltonian was built as
    /// sum_b w_b sigma_a . sigma_b; enables the fast real matvec
    /// sigma.sigma = 2 SWAP - 1.
    bonds: Option<Vec<(usize, usize, f64)>>,
}

impl PauliHamiltonian {
    pub fn new(n: usize, terms: Vec<(f64, PauliString)>) -> Result<Self> {
        for (_, string) in &terms {
            if let Some((q, _)) = string.factors().iter().find(|(q, _)| *q >= n) {
                return Err(SpinNetError::Domain(format!(
                    "Pauli string references qubit {q} beyond register size {n}"
                )));
            }
        }
        Ok(PauliHamiltonian {
            n,
            terms,
            bonds: None,
        })
    }

    /// sum over bonds (a, b, w) of w (X_a X_b + Y_a Y_b + Z_a Z_b).
    pub fn heisenberg(n: usize, bonds: &[(usize, usize, f64)]) -> Result<Self> {
        let mut terms = Vec::with_capacity(3 * bonds.len());
        for &(a, b, w) in bonds {
            if a == b {
                return Err(SpinNetError::Domain(format!("self-bond on site {a}")));
            }
            for p in [Pauli::X, Pauli::Y, Pauli::Z] {
                terms.push((w, PauliString::new(vec![(a, p), (b, p)])?));
            }
        }
        let mut h = PauliHamiltonian::new(n, terms)?;
        h.bonds = Some(bonds.to_vec());
        Ok(h)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn bonds(&self) -> Option<&[(usize, usize, f64)]> {
        self.bonds.as_deref()
    }

    /// Triangle-inequality bound on the operator norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w.abs()).sum()
    }

    /// Matrix-free H|psi> on complex amplitudes.
    pub fn apply_complex(&self, amps: &[C64]) -> Vec<C64> {
        let dim = 1usize << self.n;
        assert_eq!(amps.len(), dim);
        let mut out = vec![ZERO; dim];
        for (w, string) in &self.terms {
            let mut flip = 0usize;
            for (q, p) in string.factors() {
                if matches!(p, Pauli::X | Pauli::Y) {
                    flip |= 1 << (self.n - 1 - q);
                }
            }
            for b in 0..dim {
                let mut phase = C64::new(*w, 0.0);
                for (q, p) in string.factors() {
                    let bit = (b >> (self.n - 1 - q)) & 1;
                    match p {
                        Pauli::X => {}
                        Pauli::Y => {
                            phase *= if bit == 0 {
                                C64::new(0.0, 1.0)
                            } else {
                                C64::new(0.0, -1.0)
                            };
                        }
                        Pauli::Z => {
                            if bit == 1 {
                                phase = -phase;
                            }
                        }
                    }
                }
                out[b ^ flip] += phase * amps[b];
            }
        }
        out
    }

    /// Matrix-free H|v> on real amplitudes; requires every term to have an
    /// even number of Y factors (true for Heisenberg terms).
    pub fn apply_real(&self, v: &[f64]) -> Result<Vec<f64>> {
        let dim = 1usize << self.n;
        assert_eq!(v.len(), dim);
        let mut out = vec![0.0f64; dim];
        if let Some(bonds) = &self.bonds {
            // sigma_a . sigma_b = 2 (a,b) - 1 on the pair.
            for &(a, b, w) in bonds {
                let pa = self.n - 1 - a;
                let pb = self.n - 1 - b;
                for s in 0..dim {
                    let bit_a = (s >> pa) & 1;
                    let bit_b = (s >> pb) & 1;
                    if bit_a == bit_b {
                        out[s] += w * v[s];
                    } else {
                        let swapped = s ^ (1 << pa) ^ (1 << pb);
                        out[s] += w * (2.0 * v[swapped] - v[s]);
                    }
                }
            }
            return Ok(out);
        }
        for (w, string) in &self.terms {
            if string.y_count() % 2 != 0 {
                return Err(SpinNetError::Domain(
                    "term with odd Y count maps real vectors out of the real field".into(),
                ));
            }
            let mut flip = 0usize;
            for (q, p) in string.factors() {
                if matches!(p, Pauli::X | Pauli::Y) {
                    flip |= 1 << (self.n - 1 - q);
                }
            }
            for b in 0..dim {
                let mut phase = C64::new(*w, 0.0);
                for (q, p) in string.factors() {
                    let bit = (b >> (self.n - 1 - q)) & 1;
                    match p {
                        Pauli::X => {}
                        Pauli::Y => {
                            phase *= if bit == 0 {
                                C64::new(0.0, 1.0)
                            } else {
                                C64::new(0.0, -1.0)
                            };
                        }
                        Pauli::Z => {
                            if bit == 1 {
                                phase = -phase;
                            }
                        }
                    }
                }
                debug_assert!(phase.im.abs() < 1e-12);
                out[b ^ flip] += phase.re * v[b];
            }
        }
        Ok(out)
    }

    /// Dense matrix (memory-guarded).
    pub fn to_dense(&self) -> Result<CMat> {
        if self.n > 12 {
            return Err(SpinNetError::Domain(format!(
                "dense Hamiltonian needs n <= 12, got {}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m: CMat = Array2::zeros((dim, dim));
        for b in 0..dim {
            let mut e = vec![ZERO; dim];
            e[b] = C64::new(1.0, 0.0);
            let col = self.apply_complex(&e);
            for r in 0..dim {
                m[(r, b)] = col[r];
            }
        }
        Ok(m)
    }
}

/// The 1D triangular-lattice Heisenberg Hamiltonian: nearest-neighbour bonds
/// weighted j1 and next-nearest weighted j2, periodic, with the bond sums
/// running over every site (so both sums have exactly n terms).
pub fn triangular_1d(n: usize, j1: f64, j2: f64) -> Result<PauliHamiltonian> {
    if n < 4 || n % 2 != 0 {
        return Err(SpinNetError::Domain(format!(
            "triangular chain needs even n >= 4, got {n}"
        )));
    }
    let mut bonds = Vec::new();
    for i in 0..n {
        bonds.push((i, (i + 1) % n, j1));
    }
    if j2 != 0.0 {
        for i in 0..n {
            bonds.push((i, (i + 2) % n, j2));
        }
    }
    PauliHamiltonian::heisenberg(n, &bonds)
}

/// Heisenberg Hamiltonian over the edges of a lattice spec.
pub fn from_lattice(spec: &LatticeSpec) -> Result<PauliHamiltonian> {
    let bonds: Vec<(usize, usize, f64)> = spec.edges.iter().map(|&(a, b, w)| (a, b, w)).collect();
    PauliHamiltonian::heisenberg(spec.n, &bonds)
}

/// Load (or default) the 18-site Kagome cluster, validate it, and build its
/// Hamiltonian: 36 edges x 3 flavours = 108 terms.
pub fn kagome_18(spec_file: Option<&Path>) -> Result<(PauliHamiltonian, LatticeSpec)> {
    let spec = match spec_file {
        Some(path) => LatticeSpec::parse(&std::fs::read_to_string(path)?)?,
        None => LatticeSpec::kagome18_default(),
    };
    spec.validate_strict()?;
    let h = from_lattice(&spec)?;
    Ok((h, spec))
}

/// The convergence metric (E - E_GS) / |E_GS|.
pub fn normalized_energy(e: f64, e_gs: f64) -> Result<f64> {
    if e_gs == 0.0 {
        return Err(SpinNetError::Domain(
            "normalized energy undefined for E_GS = 0".into(),
        ));
    }
    Ok((e - e_gs) / e_gs.abs())
}

/// Ground-state energy by Lanczos with full reorthogonalization on the
/// matrix-free real application. Returns (E_GS, residual) with
/// residual = |H v - E v| for the returned Ritz pair; residual < tol * |H|_1
/// is required for convergence.
pub fn ground_energy(h: &PauliHamiltonian, tol: f64) -> Result<(f64, f64)> {
    if h.n() > 20 {
        return Err(SpinNetError::Domain(format!(
            "ground_energy supports n <= 20, got {}",
            h.n()
        )));
    }
    let dim = 1usize << h.n();
    let scale = h.norm_bound().max(1.0);
    let max_krylov = 300.min(dim);

    // Deterministic pseudo-random start vector.
    let mut q: Vec<f64> = (0..dim)
        .map(|i| ((i as f64 + 1.0) * 0.6180339887498949).fract() - 0.5)
        .collect();
    normalize(&mut q);

    let mut basis: Vec<Vec<f64>> = vec![q.clone()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut best: Option<(f64, f64)> = None;

    for j in 0..max_krylov {
        let mut w = h.apply_real(&basis[j])?;
        let a = dot(&basis[j], &w);
        alpha.push(a);
        for (wi, qi) in w.iter_mut().zip(basis[j].iter()) {
            *wi -= a * qi;
        }
        if j > 0 {
            let b = beta[j - 1];
            for (wi, qi) in w.iter_mut().zip(basis[j - 1].iter()) {
                *wi -= b * qi;
            }
        }
        // Full reorthogonalization keeps the Krylov basis clean.
        for qv in &basis {
            let overlap = dot(qv, &w);
            for (wi, qi) in w.iter_mut().zip(qv.iter()) {
                *wi -= overlap * qi;
            }
        }
        let b = dot(&w, &w).sqrt();

        let check_now = b < 1e-14 || j + 1 == max_krylov || (j + 1) % 5 == 0;
        if check_now {
            let (theta, ritz) = lowest_ritz(&alpha, &beta, &basis)?;
            let hv = h.apply_real(&ritz)?;
            let mut res = 0.0;
            for (hvi, vi) in hv.iter().zip(ritz.iter()) {
                res += (hvi - theta * vi) * (hvi - theta * vi);
            }
            let res = res.sqrt();
            if best.map_or(true, |(_, r)| res < r) {
                best = Some((theta, res));
            }
            if res < tol * scale {
                return Ok((theta, res));
            }
        }
        if b < 1e-14 {
            // Invariant subspace: the Krylov space is exact.
            let (theta, res) = best.expect("checked above");
            return Ok((theta, res));
        }
        beta.push(b);
        let next: Vec<f64> = w.iter().map(|wi| wi / b).collect();
        basis.push(next);
    }

    let (theta, res) = best.unwrap();
    if res < tol * scale {
        Ok((theta, res))
    } else {
        Err(SpinNetError::NoConvergence {
            residual: res,
            iters: max_krylov,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    for x in v.iter_mut() {
        *x /= n;
    }
}

fn lowest_ritz(alpha: &[f64], beta: &[f64], basis: &[Vec<f64>]) -> Result<(f64, Vec<f64>)> {
    let m = alpha.len();
    let (vals, vecs) = eigh_tridiagonal(alpha, &beta[..m - 1])?;
    let theta = vals[0];
    let coeffs = &vecs[0];
    let dim = basis[0].len();
    let mut ritz = vec![0.0f64; dim];
    for (c, q) in coeffs.iter().zip(basis.iter()) {
        for (ri, qi) in ritz.iter_mut().zip(q.iter()) {
            *ri += c * qi;
        }
    }
    normalize(&mut ritz);
    Ok((theta, ritz))
}

/// Dense reference: smallest eigenvalue via full Hermitian diagonalization
/// (eigenvalues only; feasible up to n = 12, i.e. 4096-dimensional).
pub fn ground_energy_dense(h: &PauliHamiltonian) -> Result<f64> {
    let m = h.to_dense()?;
    let w = crate::linalg::eigvalsh(&m)?;
    Ok(w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_norm, hermiticity_defect};
    use crate::su2::{haar_sample, tensor_power_rep};
    use crate::testutil::rng;

    #[test]
    fn triangular_term_counts() {
        let h = triangular_1d(4, 1.0, 0.0).unwrap();
        assert_eq!(h.terms().len(), 12);
        let h = triangular_1d(20, 1.0, 0.44).unwrap();
        assert_eq!(h.terms().len(), 120);
        assert!(triangular_1d(3, 1.0, 0.0).is_err());
        assert!(triangular_1d(5, 1.0, 0.0).is_err());
    }

    #[test]
    fn single_bond_ground_energy_is_minus_three() {
        let h = PauliHamiltonian::heisenberg(2, &[(0, 1, 1.0)]).unwrap();
        let (e, res) = ground_energy(&h, 1e-10).unwrap();
        assert!((e + 3.0).abs() < 1e-9, "E = {e}");
        assert!(res < 1e-9);
    }

    #[test]
    fn dense_matches_matrix_free_application() {
        let h = triangular_1d(6, 1.0, 0.3).unwrap();
        let dense = h.to_dense().unwrap();
        assert!(hermiticity_defect(&dense) < 1e-12);
        let mut r = rng(107);
        use rand::Rng;
        let amps: Vec<C64> = (0..64)
            .map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let direct = h.apply_complex(&amps);
        for row in 0..64 {
            let mut expect = ZERO;
            for c in 0..64 {
                expect += dense[(row, c)] * amps[c];
            }
            assert!((direct[row] - expect).norm() < 1e-12);
        }
        // Real application agrees on real vectors.
        let v: Vec<f64> = (0..64).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let vr = h.apply_real(&v).unwrap();
        let vc: Vec<C64> = v.iter().map(|x| C64::new(*x, 0.0)).collect();
        let vc_out = h.apply_complex(&vc);
        for i in 0..64 {
            assert!((vr[i] - vc_out[i].re).abs() < 1e-12 && vc_out[i].im.abs() < 1e-12);
        }
    }

    #[test]
    fn lanczos_matches_dense_small_sizes() {
        for (n, j2) in [(4usize, 0.0), (6, 0.0), (6, 0.44), (8, 0.44)] {
            let h = triangular_1d(n, 1.0, j2).unwrap();
            let dense = ground_energy_dense(&h).unwrap();
            let (lanczos, _) = ground_energy(&h, 1e-10).unwrap();
            assert!(
                (dense - lanczos).abs() < 1e-9,
                "n={n} j2={j2}: dense {dense} vs lanczos {lanczos}"
            );
        }
    }

    #[test]
    fn lanczos_matches_dense_at_n12() {
        let h = triangular_1d(12, 1.0, 0.44).unwrap();
        let dense = ground_energy_dense(&h).unwrap();
        let (lanczos, _) = ground_energy(&h, 1e-10).unwrap();
        assert!(
            (dense - lanczos).abs() < 1e-9,
            "dense {dense} vs lanczos {lanczos}"
        );
    }

    #[test]
    fn heisenberg_commutes_with_tensor_representation() {
        let mut r = rng(109);
        let h = triangular_1d(6, 1.0, 0.44).unwrap().to_dense().unwrap();
        for _ in 0..5 {
            let u = tensor_power_rep(&haar_sample(&mut r), 6);
            let comm = h.dot(&u) - u.dot(&h);
            assert!(frobenius_norm(&comm) < 1e-9);
        }
    }

    #[test]
    fn hamiltonian_commutes_with_j2_and_jz() {
        let h = triangular_1d(6, 1.0, 0.44).unwrap().to_dense().unwrap();
        let j2 = crate::perm::total_spin_squared_matrix(6);
        assert!(frobenius_norm(&(h.dot(&j2) - j2.dot(&h))) < 1e-10);
        // Total Jz is diagonal: sum of single-site Z / 2.
        let dim = 64;
        let mut jz: CMat = Array2::zeros((dim, dim));
        for b in 0..dim {
            let ones = (b as u64).count_ones() as f64;
            jz[(b, b)] = C64::new((6.0 - 2.0 * ones) / 2.0, 0.0);
        }
        assert!(frobenius_norm(&(h.dot(&jz) - jz.dot(&h))) < 1e-10);
    }

    #[test]
    fn kagome_default_has_expected_shape() {
        let (h, spec) = kagome_18(None).unwrap();
        assert_eq!(spec.n, 18);
        assert_eq!(h.terms().len(), 108);
        assert_eq!(spec.triangles.len(), 12);
    }

    #[test]
    fn normalized_energy_values() {
        assert_eq!(normalized_energy(-10.0, -10.0).unwrap(), 0.0);
        assert_eq!(normalized_energy(0.0, -10.0).unwrap(), 1.0);
        assert!(normalized_energy(1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_out_of_range_qubits() {
        let s = PauliString::new(vec![(5, Pauli::X)]).unwrap();
        assert!(PauliHamiltonian::new(4, vec![(1.0, s)]).is_err());
        assert!(PauliString::new(vec![(1, Pauli::X), (1, Pauli::Z)]).is_err());
    }

    #[test]
    fn generic_real_apply_matches_bond_fast_path() {
        let n = 6;
        let bonds = [(0usize, 3usize, 0.7), (1, 2, -0.4), (4, 5, 1.1)];
        let fast = PauliHamiltonian::heisenberg(n, &bonds).unwrap();
        // Same Hamiltonian without the bond annotation.
        let slow = PauliHamiltonian::new(n, fast.terms().to_vec()).unwrap();
        let v: Vec<f64> = (0..64).map(|i| (i as f64 * 0.618).fract() - 0.5).collect();
        let a = fast.apply_real(&v).unwrap();
        let b = slow.apply_real(&v).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_ed_matches_known_heisenberg_ring() {
        // 4-site Heisenberg ring with sigma matrices: E_GS = -8 (j=1,
        // singlet sector), a standard exact value.
        let h = triangular_1d(4, 1.0, 0.0).unwrap();
        let e = ground_energy_dense(&h).unwrap();
        assert!((e + 8.0).abs() < 1e-10, "E = {e}");
    }
}
