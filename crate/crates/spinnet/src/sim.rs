//! Dense statevector engine: apply arity-k gates at arbitrary qubit
//! positions, expectation values through matrix-free Hamiltonian application,
//! and exact gradients by a reverse-mode adjoint sweep.
//!
//! Qubit 0 owns the most significant bit of the amplitude index, matching the
//! tensor-product convention of the gate matrices.

use crate::error::{Result, SpinNetError};
use crate::ham::PauliHamiltonian;
use crate::linalg::{dagger, CMat, C64, ZERO};
use crate::vertex::{vertex2, vertex2_deriv, vertex3_with_derivs, vertex_with_derivs};

/// A normalized n-qubit state.
#[derive(Debug, Clone)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// |0...0>
    pub fn zero_state(n: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n];
        amps[0] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != 1 << n {
            return Err(SpinNetError::Dimension(format!(
                "expected 2^{n} amplitudes, got {}",
                amps.len()
            )));
        }
        Ok(StateVector { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// <psi| H |psi>, discarding an imaginary residual below 1e-10.
    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.n() != self.n {
            return Err(SpinNetError::Dimension(format!(
                "Hamiltonian on {} qubits applied to {}-qubit state",
                h.n(),
                self.n
            )));
        }
        let hpsi = h.apply_complex(&self.amps);
        let val: C64 = self
            .amps
            .iter()
            .zip(hpsi.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        if val.im.abs() > 1e-10 * (1.0 + val.re.abs()) {
            return Err(SpinNetError::Numerical(format!(
                "expectation has imaginary residual {:.3e}",
                val.im
            )));
        }
        Ok(val.re)
    }

    /// <J^2> from the transposition form (4n - n^2)/4 + sum_{i>j} <SWAP_ij>.
    pub fn total_spin_expectation(&self) -> f64 {
        let n = self.n;
        let mut acc = (4.0 * n as f64 - (n as f64) * (n as f64)) / 4.0;
        for j in 0..n {
            for i in j + 1..n {
                let pi = n - 1 - i;
                let pj = n - 1 - j;
                let mut swap_exp = 0.0;
                for (b, amp) in self.amps.iter().enumerate() {
                    let bit_i = (b >> pi) & 1;
                    let bit_j = (b >> pj) & 1;
                    let swapped = if bit_i == bit_j {
                        b
                    } else {
                        b ^ (1 << pi) ^ (1 << pj)
                    };
                    swap_exp += (amp.conj() * self.amps[swapped]).re;
                }
                acc += swap_exp;
            }
        }
        acc
    }
}

/// Apply a dense 2^k x 2^k matrix at the given (distinct) qubit targets.
/// targets[0] owns the most significant bit of the gate index.
pub fn apply_gate(state: &mut StateVector, gate: &CMat, targets: &[usize]) -> Result<()> {
    let n = state.n;
    let k = targets.len();
    if gate.nrows() != (1 << k) || gate.ncols() != (1 << k) {
        return Err(SpinNetError::Dimension(format!(
            "gate of dimension {} does not match {} targets",
            gate.nrows(),
            k
        )));
    }
    if k > 6 {
        return Err(SpinNetError::Domain(format!(
            "gate arity {k} exceeds the dense-kernel limit of 6"
        )));
    }
    let mut seen = 0usize;
    for &t in targets {
        if t >= n {
            return Err(SpinNetError::Domain(format!(
                "target qubit {t} out of range for {n}-qubit register"
            )));
        }
        if seen & (1 << t) != 0 {
            return Err(SpinNetError::Domain(format!("duplicate target qubit {t}")));
        }
        seen |= 1 << t;
    }

    // Bit position of each target (gate-index order), plus ascending
    // positions for enumerating the non-target part of the index.
    let positions: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let mut sorted_positions = positions.clone();
    sorted_positions.sort_unstable();

    let group = 1usize << k;
    let rest = 1usize << (n - k);
    let mut buf = vec![ZERO; group];
    let amps = &mut state.amps;
    for r in 0..rest {
        // Spread r over the non-target bit positions.
        let mut base = r;
        for &p in &sorted_positions {
            let low = base & ((1usize << p) - 1);
            base = ((base >> p) << (p + 1)) | low;
        }
        // Gather, multiply, scatter.
        for g in 0..group {
            let mut idx = base;
            for (j, &p) in positions.iter().enumerate() {
                if (g >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            buf[g] = amps[idx];
        }
        for g_out in 0..group {
            let mut acc = ZERO;
            for (g_in, b) in buf.iter().enumerate() {
                let m = gate[(g_out, g_in)];
                if m != ZERO {
                    acc += m * b;
                }
            }
            let mut idx = base;
            for (j, &p) in positions.iter().enumerate() {
                if (g_out >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            amps[idx] = acc;
        }
    }
    Ok(())
}

/// Accumulate 2 Re <lam| dG |phi> restricted to the gate targets, for every
/// derivative matrix in one sweep; the adjoint-gradient inner loop.
fn gate_gradient_terms(
    phi: &StateVector,
    lam: &StateVector,
    derivs: &[CMat],
    targets: &[usize],
) -> Vec<f64> {
    let n = phi.n;
    let k = targets.len();
    let positions: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let mut sorted_positions = positions.clone();
    sorted_positions.sort_unstable();
    let group = 1usize << k;
    let rest = 1usize << (n - k);

    let mut acc = vec![C64::new(0.0, 0.0); derivs.len()];
    let mut phi_buf = vec![ZERO; group];
    let mut lam_buf = vec![ZERO; group];
    for r in 0..rest {
        let mut base = r;
        for &p in &sorted_positions {
            let low = base & ((1usize << p) - 1);
            base = ((base >> p) << (p + 1)) | low;
        }
        for g in 0..group {
            let mut idx = base;
            for (j, &p) in positions.iter().enumerate() {
                if (g >> (k - 1 - j)) & 1 == 1 {
                    idx |= 1 << p;
                }
            }
            phi_buf[g] = phi.amps[idx];
            lam_buf[g] = lam.amps[idx];
        }
        for (di, dg) in derivs.iter().enumerate() {
            let mut term = ZERO;
            for g_out in 0..group {
                let mut row = ZERO;
                for (g_in, pb) in phi_buf.iter().enumerate() {
                    let m = dg[(g_out, g_in)];
                    if m != ZERO {
                        row += m * pb;
                    }
                }
                term += lam_buf[g_out].conj() * row;
            }
            acc[di] += term;
        }
    }
    acc.iter().map(|z| 2.0 * z.re).collect()
}

/// Gate kinds understood by the circuit: the paper's parameterised vertex
/// gates plus fixed (constant) matrices.
#[derive(Debug, Clone)]
pub enum GateKind {
    /// Two-qubit vertex gate, 1 parameter (singlet phase).
    Vertex2,
    /// Three-qubit vertex gate, 4 parameters (Pauli chart on the copies).
    Vertex3,
    /// General k-qubit vertex gate with Catalan(k) parameters.
    VertexK(usize),
    /// A constant gate.
    Fixed(CMat),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::Vertex2 => 2,
            GateKind::Vertex3 => 3,
            GateKind::VertexK(k) => *k,
            GateKind::Fixed(m) => m.nrows().trailing_zeros() as usize,
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            GateKind::Vertex2 => 1,
            GateKind::Vertex3 => 4,
            GateKind::VertexK(k) => crate::su2::catalan(*k as u64) as usize,
            GateKind::Fixed(_) => 0,
        }
    }
}

/// One placed gate: a kind, its targets, and its slice of the global
/// parameter vector.
#[derive(Debug, Clone)]
pub struct PlacedGate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub param_offset: usize,
}

impl PlacedGate {
    fn params<'a>(&self, params: &'a [f64]) -> &'a [f64] {
        &params[self.param_offset..self.param_offset + self.kind.param_count()]
    }

    fn matrix(&self, params: &[f64]) -> Result<CMat> {
        let p = self.params(params);
        Ok(match &self.kind {
            GateKind::Vertex2 => vertex2(p[0]),
            GateKind::Vertex3 => vertex3_matrix(p),
            GateKind::VertexK(k) => {
                let dec = crate::su2::decompose_qubits(*k)?;
                let bp = crate::vertex::BlockUnitaryParams::from_flat(&dec, p)?;
                crate::vertex::vertex(*k, &bp)?.matrix
            }
            GateKind::Fixed(m) => m.clone(),
        })
    }

    fn matrix_with_derivs(&self, params: &[f64]) -> Result<(CMat, Vec<CMat>)> {
        let p = self.params(params);
        Ok(match &self.kind {
            GateKind::Vertex2 => (vertex2(p[0]), vec![vertex2_deriv(p[0])]),
            GateKind::Vertex3 => vertex3_with_derivs(&[p[0], p[1], p[2], p[3]]),
            GateKind::VertexK(k) => {
                let dec = crate::su2::decompose_qubits(*k)?;
                let bp = crate::vertex::BlockUnitaryParams::from_flat(&dec, p)?;
                let (v, d) = vertex_with_derivs(*k, &bp)?;
                (v.matrix, d)
            }
            GateKind::Fixed(m) => (m.clone(), Vec::new()),
        })
    }
}

fn vertex3_matrix(p: &[f64]) -> CMat {
    crate::vertex::vertex3(&[p[0], p[1], p[2], p[3]])
}

/// An ordered gate list over an n-qubit register with a flat parameter
/// layout (gates own consecutive slices in push order).
#[derive(Debug, Clone)]
pub struct Circuit {
    n: usize,
    gates: Vec<PlacedGate>,
    param_count: usize,
}

impl Circuit {
    pub fn new(n: usize) -> Self {
        Circuit {
            n,
            gates: Vec::new(),
            param_count: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gates(&self) -> &[PlacedGate] {
        &self.gates
    }

    pub fn param_count(&self) -> usize {
        self.param_count
    }

    pub fn push(&mut self, kind: GateKind, targets: Vec<usize>) -> Result<()> {
        if targets.len() != kind.arity() {
            return Err(SpinNetError::Dimension(format!(
                "gate of arity {} given {} targets",
                kind.arity(),
                targets.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for &t in &targets {
            if t >= self.n || !seen.insert(t) {
                return Err(SpinNetError::Domain(format!(
                    "invalid targets {targets:?} on {} qubits",
                    self.n
                )));
            }
        }
        let param_offset = self.param_count;
        self.param_count += kind.param_count();
        self.gates.push(PlacedGate {
            kind,
            targets,
            param_offset,
        });
        Ok(())
    }

    pub fn apply(&self, state: &mut StateVector, params: &[f64]) -> Result<()> {
        self.check_params(params)?;
        for gate in &self.gates {
            let m = gate.matrix(params)?;
            apply_gate(state, &m, &gate.targets)?;
        }
        Ok(())
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count {
            return Err(SpinNetError::Dimension(format!(
                "circuit has {} parameters, got {}",
                self.param_count,
                params.len()
            )));
        }
        Ok(())
    }

    /// <psi0| C(params)^dagger H C(params) |psi0>
    pub fn expectation(
        &self,
        psi0: &StateVector,
        params: &[f64],
        h: &PauliHamiltonian,
    ) -> Result<f64> {
        let mut state = psi0.clone();
        self.apply(&mut state, params)?;
        state.expectation(h)
    }

    /// Energy and its exact gradient via one forward pass, one backward pass,
    /// and one generator application per parameter.
    pub fn energy_and_gradient(
        &self,
        psi0: &StateVector,
        params: &[f64],
        h: &PauliHamiltonian,
    ) -> Result<(f64, Vec<f64>)> {
        self.check_params(params)?;
        let mut phi = psi0.clone();
        self.apply(&mut phi, params)?;
        let hphi = h.apply_complex(phi.amps());
        let mut lam = StateVector::from_amplitudes(self.n, hphi)?;
        let energy: C64 = phi
            .amps
            .iter()
            .zip(lam.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();

        let mut grad = vec![0.0; self.param_count];
        for gate in self.gates.iter().rev() {
            let (g, derivs) = gate.matrix_with_derivs(params)?;
            let gd = dagger(&g);
            apply_gate(&mut phi, &gd, &gate.targets)?;
            if !derivs.is_empty() {
                let terms = gate_gradient_terms(&phi, &lam, &derivs, &gate.targets);
                for (k, t) in terms.into_iter().enumerate() {
                    grad[gate.param_offset + k] += t;
                }
            }
            apply_gate(&mut lam, &gd, &gate.targets)?;
        }
        Ok((energy.re, grad))
    }
}

/// Gradient of <H> with respect to all circuit parameters.
pub fn gradient(
    circuit: &Circuit,
    psi0: &StateVector,
    params: &[f64],
    h: &PauliHamiltonian,
) -> Result<Vec<f64>> {
    circuit.energy_and_gradient(psi0, params, h).map(|(_, g)| g)
}

/// Normalized product of singlets (|01> - |10>)/sqrt(2) over the given pairs,
/// which must form a perfect matching of the register. The first pair member
/// carries the |0> of the |01> component.
pub fn singlet_state(pairs: &[(usize, usize)], n: usize) -> Result<StateVector> {
    if n % 2 != 0 || pairs.len() != n / 2 {
        return Err(SpinNetError::Domain(format!(
            "need n/2 = {} disjoint pairs for {} qubits, got {}",
            n / 2,
            n,
            pairs.len()
        )));
    }
    let mut covered = vec![false; n];
    for &(a, b) in pairs {
        if a >= n || b >= n || a == b || covered[a] || covered[b] {
            return Err(SpinNetError::Domain(format!(
                "pairs must form a perfect matching; offending pair ({a},{b})"
            )));
        }
        covered[a] = true;
        covered[b] = true;
    }
    let dim = 1usize << n;
    let scale = 1.0 / 2f64.powi(pairs.len() as i32 / 2) / if pairs.len() % 2 == 1 { 2f64.sqrt() } else { 1.0 };
    let mut amps = vec![ZERO; dim];
    'basis: for (b, amp) in amps.iter_mut().enumerate() {
        let mut sign = 1.0;
        for &(x, y) in pairs {
            let bx = (b >> (n - 1 - x)) & 1;
            let by = (b >> (n - 1 - y)) & 1;
            match (bx, by) {
                (0, 1) => {}
                (1, 0) => sign = -sign,
                _ => continue 'basis,
            }
        }
        *amp = C64::new(sign * scale, 0.0);
    }
    Ok(StateVector { n, amps })
}
