//! Symmetric-group operators on qubits and the permutation-algebra view of
//! equivariant gates: formal complex sums of permutations, total-spin
//! projectors, and the worked three-qubit generators.
//!
//! Permutations act on qubit positions 0..n-1 (printed 0-based in cycle
//! notation); the operator realization permutes tensor factors by
//! alpha |v_0 ... v_{n-1}> = |v_{alpha^-1(0)} ... v_{alpha^-1(n-1)}>.

use std::collections::HashMap;

use ndarray::Array2;

use crate::error::{Result, SpinNetError};
use crate::linalg::{expm, identity, kron, pauli_x, pauli_y, pauli_z, CMat, C64, I, ONE, ZERO};
use crate::su2::{decompose_qubits, Spin};

/// A permutation of {0..n-1} stored as its image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            images: (0..n).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(SpinNetError::Domain(format!(
                    "not a bijection on 0..{n}: {images:?}"
                )));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Result<Self> {
        if a >= n || b >= n || a == b {
            return Err(SpinNetError::Domain(format!(
                "invalid transposition ({a},{b}) on {n} points"
            )));
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Ok(Permutation { images })
    }

    /// Build from one cycle (p_0 -> p_1 -> ... -> p_0), remaining points fixed.
    pub fn from_cycle(n: usize, cycle: &[usize]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        if cycle.len() < 2 {
            return Ok(Permutation { images });
        }
        for w in 0..cycle.len() {
            let from = cycle[w];
            let to = cycle[(w + 1) % cycle.len()];
            if from >= n || to >= n {
                return Err(SpinNetError::Domain(format!(
                    "cycle point out of range in {cycle:?} (n={n})"
                )));
            }
            images[from] = to;
        }
        Permutation::from_images(images)
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (from, &to) in self.images.iter().enumerate() {
            images[to] = from;
        }
        Permutation { images }
    }

    /// Group composition self . other (other applied first).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.n(), other.n());
        let images = (0..self.n()).map(|p| self.apply(other.apply(p))).collect();
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &im)| i == im)
    }

    /// Disjoint cycle decomposition, fixed points omitted.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut cur = self.images[start];
            while cur != start {
                seen[cur] = true;
                cycle.push(cur);
                cur = self.images[cur];
            }
            out.push(cycle);
        }
        out
    }

    /// Map a computational basis state through the qubit permutation. Qubit i
    /// owns bit position n-1-i (qubit 0 is the most significant bit).
    pub fn apply_to_basis_state(&self, basis: usize) -> usize {
        let n = self.n();
        let inv = self.inverse();
        let mut out = 0usize;
        for i in 0..n {
            let src = inv.apply(i);
            let bit = (basis >> (n - 1 - src)) & 1;
            out |= bit << (n - 1 - i);
        }
        out
    }

    /// Dense operator realization on (C^2)^(x)n.
    pub fn to_matrix(&self) -> CMat {
        let dim = 1usize << self.n();
        let mut m: CMat = Array2::zeros((dim, dim));
        for b in 0..dim {
            m[(self.apply_to_basis_state(b), b)] = ONE;
        }
        m
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "e");
        }
        for cycle in cycles {
            let parts: Vec<String> = cycle.iter().map(|p| p.to_string()).collect();
            write!(f, "({})", parts.join(" "))?;
        }
        Ok(())
    }
}

/// A formal complex-weighted sum of permutations of n qubits.
#[derive(Debug, Clone)]
pub struct PermAlgebraElement {
    n: usize,
    terms: HashMap<Permutation, C64>,
}

impl PermAlgebraElement {
    pub fn zero(n: usize) -> Self {
        PermAlgebraElement {
            n,
            terms: HashMap::new(),
        }
    }

    pub fn identity_element(n: usize) -> Self {
        PermAlgebraElement::from_permutation(Permutation::identity(n), ONE)
    }

    pub fn from_permutation(p: Permutation, coeff: C64) -> Self {
        let n = p.n();
        let mut terms = HashMap::new();
        terms.insert(p, coeff);
        PermAlgebraElement { n, terms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &HashMap<Permutation, C64> {
        &self.terms
    }

    pub fn add_term(&mut self, p: Permutation, coeff: C64) {
        assert_eq!(p.n(), self.n);
        let entry = self.terms.entry(p).or_insert(ZERO);
        *entry += coeff;
        if entry.norm() < 1e-15 {
            let p2: Vec<Permutation> = self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() < 1e-15)
                .map(|(p, _)| p.clone())
                .collect();
            for p in p2 {
                self.terms.remove(&p);
            }
        }
    }

    pub fn add(&self, other: &PermAlgebraElement) -> PermAlgebraElement {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), *c);
        }
        out
    }

    pub fn scale(&self, factor: C64) -> PermAlgebraElement {
        let mut out = PermAlgebraElement::zero(self.n);
        for (p, c) in &self.terms {
            out.add_term(p.clone(), c * factor);
        }
        out
    }

    /// Algebra product: composition of permutations, coefficients multiplied,
    /// equal permutations merged. No further normal form.
    pub fn mul(&self, other: &PermAlgebraElement) -> PermAlgebraElement {
        assert_eq!(self.n, other.n);
        let mut out = PermAlgebraElement::zero(self.n);
        for (pa, ca) in &self.terms {
            for (pb, cb) in &other.terms {
                out.add_term(pa.compose(pb), ca * cb);
            }
        }
        out
    }

    pub fn dagger(&self) -> PermAlgebraElement {
        let mut out = PermAlgebraElement::zero(self.n);
        for (p, c) in &self.terms {
            out.add_term(p.inverse(), c.conj());
        }
        out
    }

    /// Dense operator realization; guarded to keep the matrix in memory.
    pub fn to_matrix(&self) -> Result<CMat> {
        if self.n > 12 {
            return Err(SpinNetError::Domain(format!(
                "dense realization of a permutation sum needs n <= 12, got {}",
                self.n
            )));
        }
        let dim = 1usize << self.n;
        let mut m: CMat = Array2::zeros((dim, dim));
        for (p, c) in &self.terms {
            for b in 0..dim {
                m[(p.apply_to_basis_state(b), b)] += *c;
            }
        }
        Ok(m)
    }

    /// Matrix-free application to a state vector.
    pub fn apply_to_state(&self, amps: &[C64]) -> Vec<C64> {
        let dim = 1usize << self.n;
        assert_eq!(amps.len(), dim);
        let mut out = vec![ZERO; dim];
        for (p, c) in &self.terms {
            for b in 0..dim {
                out[p.apply_to_basis_state(b)] += *c * amps[b];
            }
        }
        out
    }
}

impl std::fmt::Display for PermAlgebraElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut entries: Vec<(String, C64)> = self
            .terms
            .iter()
            .map(|(p, c)| (p.to_string(), *c))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut first = true;
        for (perm, c) in entries {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.im.abs() < 1e-15 {
                write!(f, "{:.6}*{}", c.re, perm)?;
            } else {
                write!(f, "({:.6}{:+.6}i)*{}", c.re, c.im, perm)?;
            }
        }
        Ok(())
    }
}

/// The operator realization of one qubit permutation.
pub fn permutation_operator(alpha: &Permutation) -> CMat {
    alpha.to_matrix()
}

/// J^2 in the transposition form (4n - n^2)/4 + sum_{i > j} (i,j), as a formal
/// algebra element.
pub fn total_spin_squared_element(n: usize) -> PermAlgebraElement {
    let scalar = (4.0 * n as f64 - (n as f64) * (n as f64)) / 4.0;
    let mut out = PermAlgebraElement::from_permutation(
        Permutation::identity(n),
        C64::new(scalar, 0.0),
    );
    for j in 0..n {
        for i in j + 1..n {
            out.add_term(Permutation::transposition(n, i, j).unwrap(), ONE);
        }
    }
    out
}

/// J^2 built from the Pauli sum (1/4)(sum_i sigma_i)^2, dense.
pub fn total_spin_squared_matrix(n: usize) -> CMat {
    let dim = 1usize << n;
    let paulis = [pauli_x(), pauli_y(), pauli_z()];
    let mut total: CMat = Array2::zeros((dim, dim));
    for p in &paulis {
        let mut sum: CMat = Array2::zeros((dim, dim));
        for q in 0..n {
            sum = sum + single_site(p, q, n);
        }
        total = total + sum.dot(&sum);
    }
    total.mapv(|z| z * 0.25)
}

fn single_site(op: &CMat, qubit: usize, n: usize) -> CMat {
    let mut out = if qubit == 0 { op.clone() } else { identity(2) };
    for q in 1..n {
        let f = if q == qubit { op.clone() } else { identity(2) };
        out = kron(&out, &f);
    }
    out
}

/// Projector onto the total-spin-s subspace of n qubits.
#[derive(Debug, Clone)]
pub struct SpinProjector {
    pub n: usize,
    pub spin: Spin,
    pub matrix: CMat,
}

/// P_s = prod_{s' != s} (J^2 - c_{s'}) / (c_s - c_{s'}) with c_s = s(s+1),
/// evaluated as a matrix polynomial in J^2.
pub fn spin_projector(n: usize, s: Spin) -> Result<SpinProjector> {
    let dec = decompose_qubits(n)?;
    if dec.multiplicity_of(s).is_none() {
        return Err(SpinNetError::Domain(format!(
            "spin {s} does not occur in the decomposition of {n} qubits"
        )));
    }
    let casimir = |spin: Spin| spin.j() * (spin.j() + 1.0);
    let j2 = total_spin_squared_matrix(n);
    let dim = 1usize << n;
    let mut p = identity(dim);
    for block in &dec.blocks {
        if block.spin == s {
            continue;
        }
        let cj = casimir(block.spin);
        let denom = casimir(s) - cj;
        let factor = (&j2 - &identity(dim).mapv(|z| z * cj)).mapv(|z| z / denom);
        p = p.dot(&factor);
    }
    Ok(SpinProjector {
        n,
        spin: s,
        matrix: p,
    })
}

/// The three-qubit generators, as printed formal sums over S_3 (0-based
/// points; (0,1) is the paper's (1,2) and so on).
pub struct ThreeQubitGenerators {
    pub g_i: PermAlgebraElement,
    pub g_x: PermAlgebraElement,
    pub g_y: PermAlgebraElement,
    pub g_z: PermAlgebraElement,
}

pub fn three_qubit_generators() -> ThreeQubitGenerators {
    let n = 3;
    let e = Permutation::identity(n);
    let t12 = Permutation::transposition(n, 0, 1).unwrap();
    let t23 = Permutation::transposition(n, 1, 2).unwrap();
    let t13 = Permutation::transposition(n, 0, 2).unwrap();
    let c123 = Permutation::from_cycle(n, &[0, 1, 2]).unwrap();
    let c132 = Permutation::from_cycle(n, &[0, 2, 1]).unwrap();
    let r = |x: f64| C64::new(x, 0.0);

    // G_I = 1 - (1/3)[(1,2) + (2,3) + (1,3)]
    let mut g_i = PermAlgebraElement::from_permutation(e.clone(), ONE);
    for t in [&t12, &t23, &t13] {
        g_i.add_term((*t).clone(), r(-1.0 / 3.0));
    }

    // G_X = -(2/sqrt3)[-1/2 + (2,3) + (1/2)(1,2) - (1/2)(1,2,3) - (1/2)(1,3,2)]
    let s3 = 3f64.sqrt();
    let mut g_x = PermAlgebraElement::zero(n);
    g_x.add_term(e.clone(), r(1.0 / s3));
    g_x.add_term(t23.clone(), r(-2.0 / s3));
    g_x.add_term(t12.clone(), r(-1.0 / s3));
    g_x.add_term(c123.clone(), r(1.0 / s3));
    g_x.add_term(c132.clone(), r(1.0 / s3));

    // G_Y = (i/sqrt3)[1 + 2(1,2,3) - (1,2) - (2,3) - (1,3)]
    let mut g_y = PermAlgebraElement::zero(n);
    let iv = I * C64::new(1.0 / s3, 0.0);
    g_y.add_term(e.clone(), iv);
    g_y.add_term(c123.clone(), iv * 2.0);
    for t in [&t12, &t23, &t13] {
        g_y.add_term((*t).clone(), -iv);
    }

    // G_Z = (1,2) - (1/3)[1 + (1,3,2) + (1,2,3)]
    let mut g_z = PermAlgebraElement::from_permutation(t12, ONE);
    g_z.add_term(e, r(-1.0 / 3.0));
    g_z.add_term(c132, r(-1.0 / 3.0));
    g_z.add_term(c123, r(-1.0 / 3.0));

    ThreeQubitGenerators { g_i, g_x, g_y, g_z }
}

/// Relabel an algebra element on k points through `targets` into an n-qubit
/// register (every cycle point p becomes targets[p], other qubits fixed).
pub fn embed_generator(
    gen: &PermAlgebraElement,
    targets: &[usize],
    n: usize,
) -> Result<PermAlgebraElement> {
    if targets.len() != gen.n() {
        return Err(SpinNetError::Domain(format!(
            "generator acts on {} points but {} targets given",
            gen.n(),
            targets.len()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    for &t in targets {
        if t >= n || !seen.insert(t) {
            return Err(SpinNetError::Domain(format!(
                "targets must be distinct and within 0..{n}: {targets:?}"
            )));
        }
    }
    let mut out = PermAlgebraElement::zero(n);
    for (p, c) in gen.terms() {
        let mut images: Vec<usize> = (0..n).collect();
        for point in 0..gen.n() {
            images[targets[point]] = targets[p.apply(point)];
        }
        out.add_term(Permutation::from_images(images)?, *c);
    }
    Ok(out)
}

/// Matrix exponential of the operator realization of a generalized
/// permutation exponent.
pub fn generalized_perm_exp(element: &PermAlgebraElement) -> Result<CMat> {
    Ok(expm(&element.to_matrix()?))
}

/// The action of a 3-qubit permutation on the two spin-1/2 multiplicity
/// copies, as a real 2x2 matrix in the Schur basis (copy a = rows 4-5,
/// copy b = rows 6-7).
pub fn perm_rep_in_multiplicity_basis(alpha: &Permutation) -> Result<[[f64; 2]; 2]> {
    if alpha.n() != 3 {
        return Err(SpinNetError::Domain(
            "multiplicity-basis representation is implemented for n = 3".into(),
        ));
    }
    let s = crate::vertex::schur_cached(3)?;
    let m = s
        .matrix()
        .dot(&alpha.to_matrix())
        .dot(&crate::linalg::dagger(s.matrix()));
    // Rows (4, 6) hold the Jz = +1/2 pair; rows (5, 7) the Jz = -1/2 pair.
    let idx = [4usize, 6usize];
    let mut rep = [[0.0f64; 2]; 2];
    for (i, &ri) in idx.iter().enumerate() {
        for (j, &rj) in idx.iter().enumerate() {
            let up = m[(ri, rj)];
            let down = m[(ri + 1, rj + 1)];
            if (up - down).norm() > 1e-12 || up.im.abs() > 1e-12 {
                return Err(SpinNetError::Numerical(format!(
                    "multiplicity representation is not Jz-uniform/real at ({i},{j})"
                )));
            }
            rep[i][j] = up.re;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, max_abs_diff, trace};
    use crate::su2::decompose_qubits;
    use crate::testutil::rng;
    use crate::vertex::{p3, schur_cached};
    use rand::Rng;

    fn sigma_dot_sigma(n: usize, a: usize, b: usize) -> CMat {
        let paulis = [pauli_x(), pauli_y(), pauli_z()];
        let dim = 1usize << n;
        let mut out: CMat = Array2::zeros((dim, dim));
        for p in &paulis {
            out = out + single_site(p, a, n).dot(&single_site(p, b, n));
        }
        out
    }

    #[test]
    fn swap_matrix_on_two_qubits() {
        let t = Permutation::transposition(2, 0, 1).unwrap();
        let m = t.to_matrix();
        let mut expect: CMat = Array2::zeros((4, 4));
        expect[(0, 0)] = ONE;
        expect[(1, 2)] = ONE;
        expect[(2, 1)] = ONE;
        expect[(3, 3)] = ONE;
        assert!(max_abs_diff(&m, &expect) < 1e-15);
    }

    #[test]
    fn transposition_equals_pauli_sum_form() {
        // tau = (1/2) sigma^a . sigma^b + 1/2, entrywise, for all pairs.
        for n in 2..=6 {
            for a in 0..n {
                for b in a + 1..n {
                    let tau = Permutation::transposition(n, a, b).unwrap().to_matrix();
                    let dim = 1usize << n;
                    let pauli_form = (sigma_dot_sigma(n, a, b) + identity(dim))
                        .mapv(|z| z * 0.5);
                    assert!(max_abs_diff(&tau, &pauli_form) < 1e-13, "n={n} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn cycle_equals_product_of_swaps() {
        // (0,1,2) = (0,1)(1,2) as operators ((1,2) applied first).
        let c = Permutation::from_cycle(3, &[0, 1, 2]).unwrap();
        let t01 = Permutation::transposition(3, 0, 1).unwrap();
        let t12 = Permutation::transposition(3, 1, 2).unwrap();
        assert_eq!(c, t01.compose(&t12));
        let prod = t01.to_matrix().dot(&t12.to_matrix());
        assert!(max_abs_diff(&c.to_matrix(), &prod) < 1e-15);
    }

    #[test]
    fn operator_realization_is_a_representation() {
        let mut r = rng(61);
        for _ in 0..20 {
            let n = r.gen_range(2..=5);
            let mut imgs: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                imgs.swap(i, r.gen_range(0..=i));
            }
            let a = Permutation::from_images(imgs).unwrap();
            let mut imgs2: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                imgs2.swap(i, r.gen_range(0..=i));
            }
            let b = Permutation::from_images(imgs2).unwrap();
            let lhs = a.compose(&b).to_matrix();
            let rhs = a.to_matrix().dot(&b.to_matrix());
            assert!(max_abs_diff(&lhs, &rhs) < 1e-15);
        }
    }

    #[test]
    fn j2_forms_agree() {
        for n in 2..=6 {
            let from_perms = total_spin_squared_element(n).to_matrix().unwrap();
            let from_paulis = total_spin_squared_matrix(n);
            assert!(max_abs_diff(&from_perms, &from_paulis) < 1e-12, "n={n}");
        }
    }

    #[test]
    fn j2_spectrum_small_cases() {
        // n=2: eigenvalues {2 x3, 0 x1}; n=3: {15/4 x4, 3/4 x4}.
        let w2 = crate::linalg::eigvalsh(&total_spin_squared_matrix(2)).unwrap();
        let mut w2s = w2.clone();
        w2s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in w2s.iter().zip([0.0, 2.0, 2.0, 2.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        let w3 = crate::linalg::eigvalsh(&total_spin_squared_matrix(3)).unwrap();
        let low = w3.iter().filter(|x| (**x - 0.75).abs() < 1e-9).count();
        let high = w3.iter().filter(|x| (**x - 3.75).abs() < 1e-9).count();
        assert_eq!((low, high), (4, 4));
        // n=4: eigenvalue 6 (spin 2) with degeneracy 5.
        let w4 = crate::linalg::eigvalsh(&total_spin_squared_matrix(4)).unwrap();
        let six = w4.iter().filter(|x| (**x - 6.0).abs() < 1e-9).count();
        assert_eq!(six, 5);
    }

    #[test]
    fn j2_eigenvalue_counts_match_multiplicities() {
        for n in 2..=6 {
            let w = crate::linalg::eigvalsh(&total_spin_squared_matrix(n)).unwrap();
            let dec = decompose_qubits(n).unwrap();
            for block in &dec.blocks {
                let c = block.spin.j() * (block.spin.j() + 1.0);
                let count = w.iter().filter(|x| (**x - c).abs() < 1e-8).count();
                assert_eq!(
                    count,
                    block.multiplicity as usize * block.dim(),
                    "n={n} spin={}",
                    block.spin
                );
            }
        }
    }

    #[test]
    fn projectors_are_idempotent_hermitian_complete() {
        for n in 2..=6 {
            let dec = decompose_qubits(n).unwrap();
            let dim = 1usize << n;
            let mut sum: CMat = Array2::zeros((dim, dim));
            for block in &dec.blocks {
                let p = spin_projector(n, block.spin).unwrap();
                assert!(max_abs_diff(&p.matrix.dot(&p.matrix), &p.matrix) < 1e-10);
                assert!(crate::linalg::hermiticity_defect(&p.matrix) < 1e-10);
                let tr = trace(&p.matrix).re;
                let expect = (block.multiplicity as usize * block.dim()) as f64;
                assert!((tr - expect).abs() < 1e-8, "n={n} spin={}", block.spin);
                sum = sum + &p.matrix;
            }
            assert!(max_abs_diff(&sum, &identity(dim)) < 1e-10, "n={n}");
        }
    }

    #[test]
    fn projector_golden_three_qubits() {
        // P_{J=1/2} = 5/4 - J^2/3 on three qubits.
        let p = spin_projector(3, Spin::HALF).unwrap();
        let expect = (identity(8).mapv(|z| z * 1.25)
            - total_spin_squared_matrix(3).mapv(|z| z / 3.0))
        .mapv(|z| z);
        assert!(max_abs_diff(&p.matrix, &expect) < 1e-12);
        assert!((trace(&p.matrix).re - 4.0).abs() < 1e-10);
        // |000> is maximal spin: P_{3/2}|000> = |000>.
        let p32 = spin_projector(3, Spin::from_twice(3)).unwrap();
        for r in 0..8 {
            let expect = if r == 0 { ONE } else { ZERO };
            assert!((p32.matrix[(r, 0)] - expect).norm() < 1e-12);
        }
        // Singlet projector of two qubits has trace 1.
        let p0 = spin_projector(2, Spin::ZERO).unwrap();
        assert!((trace(&p0.matrix).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_rejects_absent_spin() {
        assert!(spin_projector(2, Spin::HALF).is_err());
        assert!(spin_projector(3, Spin::ONE).is_err());
    }

    #[test]
    fn generators_annihilate_the_stretched_state() {
        let g = three_qubit_generators();
        for (name, gen) in [("I", &g.g_i), ("X", &g.g_x), ("Y", &g.g_y), ("Z", &g.g_z)] {
            let m = gen.to_matrix().unwrap();
            for r in 0..8 {
                assert!(m[(r, 0)].norm() < 1e-13, "G_{name} |000> != 0 at row {r}");
            }
            // The whole spin-3/2 sector is annihilated.
            let s = schur_cached(3).unwrap();
            let in_schur = s.matrix().dot(&m).dot(&dagger(s.matrix()));
            for i in 0..4 {
                for j in 0..8 {
                    assert!(in_schur[(i, j)].norm() < 1e-12, "G_{name} row {i},{j}");
                    assert!(in_schur[(j, i)].norm() < 1e-12, "G_{name} col {i},{j}");
                }
            }
        }
    }

    #[test]
    fn generator_x_maps_copy_a_to_copy_b() {
        let g = three_qubit_generators();
        let s = schur_cached(3).unwrap();
        let sd = dagger(s.matrix());
        let gx = g.g_x.to_matrix().unwrap();
        // G_X S3^dagger|5> = S3^dagger|7>
        let col5: Vec<C64> = (0..8).map(|i| sd[(i, 5)]).collect();
        let out = {
            let mut out = vec![ZERO; 8];
            for r in 0..8 {
                for c in 0..8 {
                    out[r] += gx[(r, c)] * col5[c];
                }
            }
            out
        };
        for r in 0..8 {
            assert!(
                (out[r] - sd[(r, 7)]).norm() < 1e-12,
                "G_X S3^d|5> mismatch at {r}: {} vs {}",
                out[r],
                sd[(r, 7)]
            );
        }
    }

    #[test]
    fn generator_z_acts_as_z_between_copies() {
        let g = three_qubit_generators();
        let s = schur_cached(3).unwrap();
        let gz = g.g_z.to_matrix().unwrap();
        let in_schur = s.matrix().dot(&gz).dot(&dagger(s.matrix()));
        let expect = kron(&pauli_z(), &identity(2));
        for i in 0..4 {
            for j in 0..4 {
                assert!((in_schur[(4 + i, 4 + j)] - expect[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn generator_exponential_equals_vertex_gate() {
        let mut r = rng(67);
        let g = three_qubit_generators();
        let s = schur_cached(3).unwrap();
        for _ in 0..10 {
            let theta: [f64; 4] = [
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
                r.gen_range(-2.0..2.0),
            ];
            let exponent = g
                .g_i
                .scale(C64::new(theta[0], 0.0))
                .add(&g.g_x.scale(C64::new(theta[1], 0.0)))
                .add(&g.g_y.scale(C64::new(theta[2], 0.0)))
                .add(&g.g_z.scale(C64::new(theta[3], 0.0)))
                .scale(I);
            let from_perms = generalized_perm_exp(&exponent).unwrap();
            let from_schur = dagger(s.matrix()).dot(&p3(&theta)).dot(s.matrix());
            assert!(max_abs_diff(&from_perms, &from_schur) < 1e-11);
        }
    }

    #[test]
    fn perm_rep_golden_values() {
        let t12 = Permutation::transposition(3, 0, 1).unwrap();
        let rep = perm_rep_in_multiplicity_basis(&t12).unwrap();
        assert!((rep[0][0] - 1.0).abs() < 1e-12 && (rep[1][1] + 1.0).abs() < 1e-12);
        assert!(rep[0][1].abs() < 1e-12 && rep[1][0].abs() < 1e-12);

        let s32 = 3f64.sqrt() / 2.0;
        let t23 = Permutation::transposition(3, 1, 2).unwrap();
        let rep = perm_rep_in_multiplicity_basis(&t23).unwrap();
        assert!((rep[0][0] + 0.5).abs() < 1e-12);
        assert!((rep[0][1] + s32).abs() < 1e-12);
        assert!((rep[1][0] + s32).abs() < 1e-12);
        assert!((rep[1][1] - 0.5).abs() < 1e-12);

        let t13 = Permutation::transposition(3, 0, 2).unwrap();
        let rep = perm_rep_in_multiplicity_basis(&t13).unwrap();
        assert!((rep[0][0] + 0.5).abs() < 1e-12);
        assert!((rep[0][1] - s32).abs() < 1e-12);

        // (1,2,3) = (1,2)(2,3): -1/2 1 - i sqrt3/2 Y is the real rotation
        // [[-1/2, -s], [s, -1/2]].
        let c123 = Permutation::from_cycle(3, &[0, 1, 2]).unwrap();
        let rep = perm_rep_in_multiplicity_basis(&c123).unwrap();
        assert!((rep[0][0] + 0.5).abs() < 1e-12);
        assert!((rep[0][1] + s32).abs() < 1e-12);
        assert!((rep[1][0] - s32).abs() < 1e-12);
        assert!((rep[1][1] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn formal_elements_differ_but_operators_agree() {
        // (1,2,3) + (1,3,2) = (1,2) + (2,3) + (1,3) - 1 as operators on
        // (C^2)^(x)3, while the formal sums are different elements.
        let n = 3;
        let lhs = PermAlgebraElement::from_permutation(
            Permutation::from_cycle(n, &[0, 1, 2]).unwrap(),
            ONE,
        )
        .add(&PermAlgebraElement::from_permutation(
            Permutation::from_cycle(n, &[0, 2, 1]).unwrap(),
            ONE,
        ));
        let mut rhs = PermAlgebraElement::zero(n);
        rhs.add_term(Permutation::transposition(n, 0, 1).unwrap(), ONE);
        rhs.add_term(Permutation::transposition(n, 1, 2).unwrap(), ONE);
        rhs.add_term(Permutation::transposition(n, 0, 2).unwrap(), ONE);
        rhs.add_term(Permutation::identity(n), -ONE);
        assert!(max_abs_diff(&lhs.to_matrix().unwrap(), &rhs.to_matrix().unwrap()) < 1e-13);
        // Formal difference is nonzero: different supports.
        let mut support_l: Vec<String> =
            lhs.terms().keys().map(|p| p.to_string()).collect();
        let mut support_r: Vec<String> =
            rhs.terms().keys().map(|p| p.to_string()).collect();
        support_l.sort();
        support_r.sort();
        assert_ne!(support_l, support_r);
    }

    #[test]
    fn triple_product_matches_cycle_difference() {
        // -2i s1.(s2 x s3) = 4 (1,2,3) - 4 (1,3,2) as operators (the printed
        // version carries the opposite sign; see the commutator
        // [s1.s2, s2.s3] = [2(1,2)-1, 2(2,3)-1] evaluated directly below).
        let n = 3;
        let paulis = [pauli_x(), pauli_y(), pauli_z()];
        let eps = |a: usize, b: usize, c: usize| -> f64 {
            match (a, b, c) {
                (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
                (2, 1, 0) | (0, 2, 1) | (1, 0, 2) => -1.0,
                _ => 0.0,
            }
        };
        let mut triple: CMat = Array2::zeros((8, 8));
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let e = eps(a, b, c);
                    if e == 0.0 {
                        continue;
                    }
                    triple = triple
                        + single_site(&paulis[a], 0, n)
                            .dot(&single_site(&paulis[b], 1, n))
                            .dot(&single_site(&paulis[c], 2, n))
                            .mapv(|z| z * e);
                }
            }
        }
        let c123 = Permutation::from_cycle(n, &[0, 1, 2]).unwrap().to_matrix();
        let c132 = Permutation::from_cycle(n, &[0, 2, 1]).unwrap().to_matrix();
        let rhs = (c123 - c132).mapv(|z| z * 4.0);
        let lhs = triple.mapv(|z| z * C64::new(0.0, -2.0));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);

        // Same statement through the commutator of the sigma.sigma forms.
        let comm = {
            let a = sigma_dot_sigma(n, 0, 1);
            let b = sigma_dot_sigma(n, 1, 2);
            a.dot(&b) - b.dot(&a)
        };
        assert!(max_abs_diff(&comm, &triple.mapv(|z| z * C64::new(0.0, -2.0))) < 1e-12);
    }

    #[test]
    fn embed_generator_golden_targets() {
        // G_X embedded at targets (2,3,6) of 8 qubits: the paper's example
        // with points relabelled 0-based.
        let g = three_qubit_generators();
        let emb = embed_generator(&g.g_x, &[2, 3, 6], 8).unwrap();
        let s3 = 3f64.sqrt();
        let expect: Vec<(Permutation, f64)> = vec![
            (Permutation::identity(8), 1.0 / s3),
            (Permutation::transposition(8, 3, 6).unwrap(), -2.0 / s3),
            (Permutation::transposition(8, 2, 3).unwrap(), -1.0 / s3),
            (Permutation::from_cycle(8, &[2, 3, 6]).unwrap(), 1.0 / s3),
            (Permutation::from_cycle(8, &[2, 6, 3]).unwrap(), 1.0 / s3),
        ];
        assert_eq!(emb.terms().len(), expect.len());
        for (p, want) in expect {
            let got = emb.terms().get(&p).copied().unwrap_or(ZERO);
            assert!(
                (got - C64::new(want, 0.0)).norm() < 1e-13,
                "coefficient of {p} wrong: {got}"
            );
        }
        assert!(embed_generator(&g.g_x, &[1, 1, 2], 8).is_err());
        assert!(embed_generator(&g.g_x, &[1, 2, 9], 8).is_err());
    }

    #[test]
    fn embedded_generator_commutes_with_tensor_rep() {
        let g = three_qubit_generators();
        let emb = embed_generator(&g.g_y, &[0, 2, 4], 6).unwrap();
        let m = emb.to_matrix().unwrap();
        let mut r = rng(71);
        for _ in 0..5 {
            let u = crate::su2::tensor_power_rep(&crate::su2::haar_sample(&mut r), 6);
            let comm = m.dot(&u) - u.dot(&m);
            assert!(crate::linalg::frobenius_norm(&comm) < 1e-10);
        }
    }

    #[test]
    fn exp_of_zero_element_is_identity() {
        let z = PermAlgebraElement::zero(3);
        assert!(max_abs_diff(&generalized_perm_exp(&z).unwrap(), &identity(8)) < 1e-14);
    }

    #[test]
    fn exp_of_scaled_swap_matches_dense_oracle() {
        // exp(i pi/2 ((1,2) - 1)) against the dense exponential of the same
        // matrix assembled independently.
        let n = 2;
        let mut elem = PermAlgebraElement::from_permutation(
            Permutation::transposition(n, 0, 1).unwrap(),
            I * C64::new(std::f64::consts::FRAC_PI_2, 0.0),
        );
        elem.add_term(
            Permutation::identity(n),
            -I * C64::new(std::f64::consts::FRAC_PI_2, 0.0),
        );
        let got = generalized_perm_exp(&elem).unwrap();
        let swap = Permutation::transposition(n, 0, 1).unwrap().to_matrix();
        let gen = (swap - identity(4)).mapv(|z| z * I * std::f64::consts::FRAC_PI_2);
        assert!(max_abs_diff(&got, &expm(&gen)) < 1e-13);
    }

    #[test]
    fn algebra_display_is_readable() {
        let g = three_qubit_generators();
        let shown = g.g_i.to_string();
        assert!(shown.contains("(0 1)"));
        assert!(shown.contains("e"));
    }

    #[test]
    fn matrix_free_apply_matches_dense() {
        let g = three_qubit_generators();
        let mut r = rng(73);
        let amps: Vec<C64> = (0..8)
            .map(|_| C64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
            .collect();
        let dense = g.g_y.to_matrix().unwrap();
        let direct = g.g_y.apply_to_state(&amps);
        for r_i in 0..8 {
            let mut expect = ZERO;
            for c in 0..8 {
                expect += dense[(r_i, c)] * amps[c];
            }
            assert!((direct[r_i] - expect).norm() < 1e-13);
        }
    }
}
