//! SU(2) representation theory: spins, Clebsch-Gordan coefficients, spin-J
//! representation matrices, and the Schur-Weyl decomposition of n qubits.
//!
//! Half-integer spins are stored as `2J` in an integer so that all spin
//! bookkeeping is exact. Clebsch-Gordan coefficients are evaluated from the
//! Racah closed form with big-rational intermediates and converted to floating
//! point only at the end, under the Condon-Shortley phase convention.

use ndarray::Array2;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Result, SpinNetError};
use crate::linalg::{expm, CMat, C64, I};

/// An SU(2) spin label J, stored as 2J.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin {
    twice_j: u32,
}

impl Spin {
    pub const ZERO: Spin = Spin { twice_j: 0 };
    pub const HALF: Spin = Spin { twice_j: 1 };
    pub const ONE: Spin = Spin { twice_j: 2 };

    pub fn from_twice(twice_j: u32) -> Self {
        Spin { twice_j }
    }

    pub fn twice(&self) -> u32 {
        self.twice_j
    }

    /// Dimension of the spin-J irrep, 2J + 1.
    pub fn dimension(&self) -> usize {
        self.twice_j as usize + 1
    }

    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// Iterator over 2Jz values from +2J down to -2J in steps of 2.
    pub fn twice_m_values(&self) -> impl Iterator<Item = i32> {
        let tj = self.twice_j as i32;
        (0..=self.twice_j).map(move |k| tj - 2 * k as i32)
    }
}

impl std::fmt::Display for Spin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.twice_j % 2 == 0 {
            write!(f, "{}", self.twice_j / 2)
        } else {
            write!(f, "{}/2", self.twice_j)
        }
    }
}

/// A basis state |J, Jz> with 2Jz stored for exactness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinState {
    pub j: Spin,
    pub twice_m: i32,
}

impl SpinState {
    pub fn new(j: Spin, twice_m: i32) -> Result<Self> {
        let tj = j.twice() as i32;
        if twice_m.abs() > tj {
            return Err(SpinNetError::Domain(format!(
                "|Jz| = {}/2 exceeds J = {}/2",
                twice_m.abs(),
                tj
            )));
        }
        if (tj - twice_m) % 2 != 0 {
            return Err(SpinNetError::Domain(format!(
                "2Jz = {twice_m} has wrong parity for 2J = {tj}"
            )));
        }
        Ok(SpinState { j, twice_m })
    }
}

/// One irrep block in the decomposition of (C^2)^(x)n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrrepBlock {
    pub spin: Spin,
    pub multiplicity: u64,
}

impl IrrepBlock {
    pub fn dim(&self) -> usize {
        self.spin.dimension()
    }
}

/// The Schur-Weyl decomposition of n qubits: an ordered list of
/// (spin, multiplicity) blocks, highest spin first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrrepDecomposition {
    pub n: usize,
    pub blocks: Vec<IrrepBlock>,
}

impl IrrepDecomposition {
    /// Sum of multiplicity * dimension over all blocks; equals 2^n.
    pub fn total_dim(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| b.multiplicity as u128 * b.dim() as u128)
            .sum()
    }

    /// Sum of squared multiplicities; equals the n-th Catalan number and is
    /// the parameter count of a generic equivariant unitary on n qubits.
    pub fn param_count(&self) -> u128 {
        self.blocks
            .iter()
            .map(|b| (b.multiplicity as u128).pow(2))
            .sum()
    }

    pub fn multiplicity_of(&self, spin: Spin) -> Option<u64> {
        self.blocks
            .iter()
            .find(|b| b.spin == spin)
            .map(|b| b.multiplicity)
    }
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn catalan(n: u64) -> u128 {
    binomial(2 * n, n) / (n as u128 + 1)
}

/// Schur-Weyl decomposition of (C^2)^(x)n. Multiplicities come from the
/// hook-length formula for two-row Young diagrams:
/// m_i = C(n,i) - C(n,i-1) at spin s_i = n/2 - i.
pub fn decompose_qubits(n: usize) -> Result<IrrepDecomposition> {
    if n == 0 {
        return Err(SpinNetError::Domain("qubit count must be positive".into()));
    }
    if n > 30 {
        return Err(SpinNetError::Domain(format!(
            "qubit count {n} exceeds the supported range (n <= 30)"
        )));
    }
    let mut blocks = Vec::new();
    for i in 0..=(n / 2) as u64 {
        let m = if i == 0 {
            1
        } else {
            (binomial(n as u64, i) - binomial(n as u64, i - 1)) as u64
        };
        let twice_spin = n as u32 - 2 * i as u32;
        blocks.push(IrrepBlock {
            spin: Spin::from_twice(twice_spin),
            multiplicity: m,
        });
    }
    let dec = IrrepDecomposition { n, blocks };
    debug_assert_eq!(dec.total_dim(), 1u128 << n);
    debug_assert_eq!(dec.param_count(), catalan(n as u64));
    Ok(dec)
}

fn factorial_big(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> in the Condon-Shortley
/// convention, with all m arguments passed as 2m. Evaluated exactly via the
/// Racah sum over big rationals; the square root is the only inexact step.
///
/// Returns 0 when M != m1 + m2 or the triangle conditions fail; rejects
/// out-of-range or wrong-parity Jz values as domain errors.
pub fn cg_coefficient(
    j1: Spin,
    twice_m1: i32,
    j2: Spin,
    twice_m2: i32,
    j: Spin,
    twice_m: i32,
) -> Result<f64> {
    SpinState::new(j1, twice_m1)?;
    SpinState::new(j2, twice_m2)?;
    SpinState::new(j, twice_m)?;

    if twice_m1 + twice_m2 != twice_m {
        return Ok(0.0);
    }
    let (tj1, tj2, tj) = (j1.twice() as i64, j2.twice() as i64, j.twice() as i64);
    // Triangle conditions: |j1 - j2| <= J <= j1 + j2, with integer perimeter.
    if tj < (tj1 - tj2).abs() || tj > tj1 + tj2 || (tj1 + tj2 + tj) % 2 != 0 {
        return Ok(0.0);
    }
    let (tm1, tm2, tm) = (twice_m1 as i64, twice_m2 as i64, twice_m as i64);

    // Halve a twice-integer quantity; parity is guaranteed by the spin and
    // triangle checks above.
    let half = |x: i64| -> i64 {
        debug_assert!(x % 2 == 0, "non-integer factorial argument");
        x / 2
    };
    let a1 = half(tj1 + tj2 - tj);
    let a2 = half(tj1 - tj2 + tj);
    let a3 = half(-tj1 + tj2 + tj);
    let a4 = half(tj1 + tj2 + tj) + 1;

    let prefactor = BigRational::new(
        BigInt::from(tj + 1) * factorial_big(a1) * factorial_big(a2) * factorial_big(a3),
        factorial_big(a4),
    ) * BigRational::from(
        factorial_big(half(tj + tm))
            * factorial_big(half(tj - tm))
            * factorial_big(half(tj1 + tm1))
            * factorial_big(half(tj1 - tm1))
            * factorial_big(half(tj2 + tm2))
            * factorial_big(half(tj2 - tm2)),
    );

    let k_min = 0i64
        .max(-half(tj - tj2 + tm1))
        .max(-half(tj - tj1 - tm2));
    let k_max = half(tj1 + tj2 - tj)
        .min(half(tj1 - tm1))
        .min(half(tj2 + tm2));

    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let denom = factorial_big(k)
            * factorial_big(half(tj1 + tj2 - tj) - k)
            * factorial_big(half(tj1 - tm1) - k)
            * factorial_big(half(tj2 + tm2) - k)
            * factorial_big(half(tj - tj2 + tm1) + k)
            * factorial_big(half(tj - tj1 - tm2) + k);
        let term = BigRational::new(BigInt::one(), denom);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(0.0);
    }

    // cg = sign(sum) * sqrt(prefactor * sum^2)
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let exact = prefactor * (&sum * &sum);
    let value = exact
        .to_f64()
        .ok_or_else(|| SpinNetError::Numerical("CG rational overflowed f64".into()))?;
    Ok(sign * value.sqrt())
}

/// Angular-momentum matrices (Jx, Jy, Jz) for spin J, basis ordered
/// m = +J down to -J. They satisfy [Ja, Jb] = i eps_abc Jc.
pub fn spin_matrices(j: Spin) -> (CMat, CMat, CMat) {
    let d = j.dimension();
    let tj = j.twice() as i64;
    let mut jp: CMat = Array2::zeros((d, d));
    let mut jz: CMat = Array2::zeros((d, d));
    for (r, tm) in j.twice_m_values().enumerate() {
        let tm = tm as i64;
        jz[(r, r)] = C64::new(tm as f64 / 2.0, 0.0);
        if r > 0 {
            // J+ |j, m> = sqrt(j(j+1) - m(m+1)) |j, m+1>; row r-1 holds m+1.
            let val = ((tj * (tj + 2) - tm * (tm + 2)) as f64 / 4.0).sqrt();
            jp[(r - 1, r)] = C64::new(val, 0.0);
        }
    }
    let jm = crate::linalg::dagger(&jp);
    let jx = (&jp + &jm).mapv(|z| z * 0.5);
    let jy = (&jp - &jm).mapv(|z| z * C64::new(0.0, -0.5));
    (jx, jy, jz)
}

/// An SU(2) group element g = exp(-i phi n.sigma / 2), stored as rotation
/// axis and angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2Element {
    axis: [f64; 3],
    angle: f64,
}

impl Su2Element {
    pub fn new(axis: [f64; 3], angle: f64) -> Result<Self> {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(SpinNetError::Domain(format!(
                "rotation axis must be unit length, got |n| = {norm}"
            )));
        }
        Ok(Su2Element { axis, angle })
    }

    pub fn identity() -> Self {
        Su2Element {
            axis: [0.0, 0.0, 1.0],
            angle: 0.0,
        }
    }

    pub fn axis(&self) -> [f64; 3] {
        self.axis
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    /// Unit quaternion (q0, q) with U = q0 1 - i q.sigma.
    pub fn quaternion(&self) -> [f64; 4] {
        let h = self.angle / 2.0;
        let s = h.sin();
        [h.cos(), s * self.axis[0], s * self.axis[1], s * self.axis[2]]
    }

    pub fn from_quaternion(q: [f64; 4]) -> Self {
        let vnorm = (q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if vnorm < 1e-15 {
            return Su2Element::identity();
        }
        let angle = 2.0 * vnorm.atan2(q[0]);
        Su2Element {
            axis: [q[1] / vnorm, q[2] / vnorm, q[3] / vnorm],
            angle,
        }
    }

    /// Group composition self . other (self applied after other).
    pub fn compose(&self, other: &Su2Element) -> Su2Element {
        let a = self.quaternion();
        let b = other.quaternion();
        Su2Element::from_quaternion([
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ])
    }

    /// The defining 2x2 matrix U = cos(phi/2) 1 - i sin(phi/2) n.sigma.
    pub fn matrix2(&self) -> CMat {
        let q = self.quaternion();
        ndarray::array![
            [C64::new(q[0], -q[3]), C64::new(-q[2], -q[1])],
            [C64::new(q[2], -q[1]), C64::new(q[0], q[3])]
        ]
    }
}

/// Spin-J representation matrix exp(-i phi n.J), a (2J+1)-dimensional unitary.
pub fn spin_rep_matrix(j: Spin, g: &Su2Element) -> CMat {
    if j.twice() == 1 {
        return g.matrix2();
    }
    if j.twice() == 0 {
        return crate::linalg::identity(1);
    }
    let (jx, jy, jz) = spin_matrices(j);
    let n = g.axis();
    let h = jx.mapv(|z| z * n[0]) + jy.mapv(|z| z * n[1]) + jz.mapv(|z| z * n[2]);
    expm(&h.mapv(|z| z * (-I) * g.angle()))
}

/// Haar-distributed SU(2) element from four standard normals normalized to a
/// unit quaternion. Exact Haar measure, no rejection step.
pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Su2Element {
    loop {
        let q: [f64; 4] = [
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        ];
        let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        return Su2Element::from_quaternion([q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm]);
    }
}

/// U(g)^(x)n on the computational basis, qubit 1 owning the most significant
/// bit.
pub fn tensor_power_rep(g: &Su2Element, n: usize) -> CMat {
    crate::linalg::kron_pow(&g.matrix2(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, max_abs_diff, pauli_x, pauli_y, pauli_z, unitarity_defect, ZERO};
    use crate::testutil::rng;
    use ndarray::Array2;

    /// Independent CG oracle: build |J,M> states by applying the total
    /// lowering operator to the stretched state and Gram-Schmidt for lower J,
    /// fixing the Condon-Shortley sign on the leading component.
    fn cg_oracle_table(j1: Spin, j2: Spin) -> std::collections::HashMap<(u32, i32, i32, i32), f64> {
        let d1 = j1.dimension();
        let d2 = j2.dimension();
        let dim = d1 * d2;
        let idx = |r1: usize, r2: usize| r1 * d2 + r2;
        // Lowering operator on the product space.
        let lower_single = |j: Spin| {
            let (jx, jy, _) = spin_matrices(j);
            &jx.mapv(|z| z) - &jy.mapv(|z| z * C64::new(0.0, 1.0))
        };
        let l1 = lower_single(j1);
        let l2 = lower_single(j2);
        let mut lower = Array2::<C64>::zeros((dim, dim));
        for r1 in 0..d1 {
            for r2 in 0..d2 {
                for s1 in 0..d1 {
                    lower[(idx(s1, r2), idx(r1, r2))] += l1[(s1, r1)];
                }
                for s2 in 0..d2 {
                    lower[(idx(r1, s2), idx(r1, r2))] += l2[(s2, r2)];
                }
            }
        }

        let mut table = std::collections::HashMap::new();
        // states[(tj, tm)] -> coupled vector in product basis
        let mut coupled: Vec<(u32, i32, Vec<C64>)> = Vec::new();
        let tmax = j1.twice() + j2.twice();
        let tmin = (j1.twice() as i32 - j2.twice() as i32).unsigned_abs();
        let mut tj = tmax;
        loop {
            // Top state |J, M=J>: for J = j1 + j2 it is the stretched product
            // state; otherwise orthogonalize within the M = J subspace.
            let tm_top = tj as i32;
            let mut top = vec![C64::new(0.0, 0.0); dim];
            if tj == tmax {
                top[idx(0, 0)] = C64::new(1.0, 0.0);
            } else {
                // Basis vectors of the M = J subspace.
                let mut candidates = Vec::new();
                for (r1, tm1) in j1.twice_m_values().enumerate() {
                    for (r2, tm2) in j2.twice_m_values().enumerate() {
                        if tm1 + tm2 == tm_top {
                            candidates.push((r1, r2));
                        }
                    }
                }
                // Start from the candidate with the highest m1 and remove the
                // projections of every higher-J state at this M.
                let mut v = vec![C64::new(0.0, 0.0); dim];
                v[idx(candidates[0].0, candidates[0].1)] = C64::new(1.0, 0.0);
                for (_, ctm, cv) in coupled.iter().filter(|(_, ctm, _)| *ctm == tm_top) {
                    let _ = ctm;
                    let ov: C64 = cv
                        .iter()
                        .zip(v.iter())
                        .map(|(a, b)| a.conj() * b)
                        .sum();
                    for (vi, ci) in v.iter_mut().zip(cv.iter()) {
                        *vi -= ov * ci;
                    }
                }
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in v.iter_mut() {
                    *z /= norm;
                }
                // Condon-Shortley: leading coefficient (highest m1) positive.
                let lead = v[idx(candidates[0].0, candidates[0].1)];
                if lead.re < 0.0 {
                    for z in v.iter_mut() {
                        *z = -*z;
                    }
                }
                top = v;
            }
            coupled.push((tj, tm_top, top.clone()));
            // Lower all the way down.
            let mut cur = top;
            let mut tm = tm_top;
            while tm > -(tj as i32) {
                let mut nxt = vec![C64::new(0.0, 0.0); dim];
                for c in 0..dim {
                    if cur[c].norm() < 1e-300 {
                        continue;
                    }
                    for r in 0..dim {
                        nxt[r] += lower[(r, c)] * cur[c];
                    }
                }
                let norm: f64 = nxt.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in nxt.iter_mut() {
                    *z /= norm;
                }
                tm -= 2;
                coupled.push((tj, tm, nxt.clone()));
                cur = nxt;
            }
            if tj < tmin + 2 {
                break;
            }
            tj -= 2;
        }
        for (tjv, tmv, vec) in coupled {
            for (r1, tm1) in j1.twice_m_values().enumerate() {
                for (r2, tm2) in j2.twice_m_values().enumerate() {
                    let c = vec[idx(r1, r2)];
                    assert!(c.im.abs() < 1e-12);
                    table.insert((tjv, tmv, tm1, tm2), c.re);
                }
            }
        }
        table
    }

    #[test]
    fn cg_golden_values() {
        let h = Spin::HALF;
        assert!((cg_coefficient(h, 1, h, 1, Spin::ONE, 2).unwrap() - 1.0).abs() < 1e-15);
        let half_sqrt2 = 1.0 / 2f64.sqrt();
        assert!(
            (cg_coefficient(h, 1, h, -1, Spin::ZERO, 0).unwrap() - half_sqrt2).abs() < 1e-15
        );
        assert!(
            (cg_coefficient(h, -1, h, 1, Spin::ZERO, 0).unwrap() + half_sqrt2).abs() < 1e-15
        );
        // M != m1 + m2
        assert_eq!(cg_coefficient(h, 1, h, 1, Spin::ZERO, 0).unwrap(), 0.0);
        // <1 0; 1/2 1/2 | 3/2 1/2> = sqrt(2/3)
        let v = cg_coefficient(Spin::ONE, 0, h, 1, Spin::from_twice(3), 1).unwrap();
        assert!((v - (2f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn cg_rejects_out_of_range_m() {
        let h = Spin::HALF;
        assert!(cg_coefficient(h, 3, h, -1, Spin::ONE, 2).is_err());
        assert!(cg_coefficient(h, 0, h, 1, Spin::ONE, 1).is_err());
    }

    #[test]
    fn cg_matches_ladder_oracle() {
        for (tj1, tj2) in [(1u32, 1u32), (2, 1), (2, 2), (3, 1), (3, 2), (4, 3)] {
            let j1 = Spin::from_twice(tj1);
            let j2 = Spin::from_twice(tj2);
            let table = cg_oracle_table(j1, j2);
            for ((tj, tm, tm1, tm2), expected) in table {
                let got =
                    cg_coefficient(j1, tm1, j2, tm2, Spin::from_twice(tj), tm).unwrap();
                assert!(
                    (got - expected).abs() < 1e-12,
                    "cg mismatch at j1={tj1}/2 j2={tj2}/2 J={tj}/2 M={tm}/2 m1={tm1}/2 m2={tm2}/2: {got} vs oracle {expected}"
                );
            }
        }
    }

    #[test]
    fn cg_column_orthonormality() {
        // For fixed (m1, m2), sum over (J, M) of cg^2 equals 1.
        for (tj1, tj2) in [(1u32, 1u32), (2, 1), (3, 2)] {
            let j1 = Spin::from_twice(tj1);
            let j2 = Spin::from_twice(tj2);
            for tm1 in j1.twice_m_values() {
                for tm2 in j2.twice_m_values() {
                    let mut total = 0.0;
                    let mut tj = tj1 + tj2;
                    loop {
                        let j = Spin::from_twice(tj);
                        for tm in j.twice_m_values() {
                            total +=
                                cg_coefficient(j1, tm1, j2, tm2, j, tm).unwrap().powi(2);
                        }
                        if tj < 2 || tj - 2 < (tj1 as i32 - tj2 as i32).unsigned_abs() {
                            break;
                        }
                        tj -= 2;
                    }
                    assert!((total - 1.0).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn spin_half_matrices_are_half_paulis() {
        let (jx, jy, jz) = spin_matrices(Spin::HALF);
        assert!(max_abs_diff(&jx, &pauli_x().mapv(|z| z * 0.5)) < 1e-15);
        assert!(max_abs_diff(&jy, &pauli_y().mapv(|z| z * 0.5)) < 1e-15);
        assert!(max_abs_diff(&jz, &pauli_z().mapv(|z| z * 0.5)) < 1e-15);
    }

    #[test]
    fn spin_one_jz_diagonal() {
        let (_, _, jz) = spin_matrices(Spin::ONE);
        for (r, expect) in [1.0, 0.0, -1.0].iter().enumerate() {
            assert!((jz[(r, r)] - C64::new(*expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn spin_matrices_satisfy_commutators() {
        for tj in 1..=4u32 {
            let (jx, jy, jz) = spin_matrices(Spin::from_twice(tj));
            let comm = jx.dot(&jy) - jy.dot(&jx);
            let expect = jz.mapv(|z| z * C64::new(0.0, 1.0));
            assert!(max_abs_diff(&comm, &expect) < 1e-12, "tj={tj}");
        }
    }

    #[test]
    fn spin_rep_identity_and_z_pi() {
        let id = spin_rep_matrix(Spin::HALF, &Su2Element::identity());
        assert!(max_abs_diff(&id, &crate::linalg::identity(2)) < 1e-14);
        let g = Su2Element::new([0.0, 0.0, 1.0], std::f64::consts::PI).unwrap();
        let u = spin_rep_matrix(Spin::HALF, &g);
        let expect = ndarray::array![
            [C64::new(0.0, -1.0), ZERO],
            [ZERO, C64::new(0.0, 1.0)]
        ];
        assert!(max_abs_diff(&u, &expect) < 1e-14);
    }

    #[test]
    fn spin_rep_is_homomorphism() {
        let mut r = rng(7);
        for tj in [2u32, 3] {
            let j = Spin::from_twice(tj);
            for _ in 0..10 {
                let g1 = haar_sample(&mut r);
                let g2 = haar_sample(&mut r);
                let lhs = spin_rep_matrix(j, &g1).dot(&spin_rep_matrix(j, &g2));
                let rhs = spin_rep_matrix(j, &g1.compose(&g2));
                assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
                assert!(unitarity_defect(&spin_rep_matrix(j, &g1)) < 1e-12);
            }
        }
    }

    #[test]
    fn decompose_small_sizes() {
        let d2 = decompose_qubits(2).unwrap();
        assert_eq!(
            d2.blocks,
            vec![
                IrrepBlock { spin: Spin::ONE, multiplicity: 1 },
                IrrepBlock { spin: Spin::ZERO, multiplicity: 1 },
            ]
        );
        let d3 = decompose_qubits(3).unwrap();
        assert_eq!(
            d3.blocks,
            vec![
                IrrepBlock { spin: Spin::from_twice(3), multiplicity: 1 },
                IrrepBlock { spin: Spin::HALF, multiplicity: 2 },
            ]
        );
        let d4 = decompose_qubits(4).unwrap();
        assert_eq!(
            d4.blocks,
            vec![
                IrrepBlock { spin: Spin::from_twice(4), multiplicity: 1 },
                IrrepBlock { spin: Spin::ONE, multiplicity: 3 },
                IrrepBlock { spin: Spin::ZERO, multiplicity: 2 },
            ]
        );
    }

    #[test]
    fn decompose_counting_invariants() {
        for n in 1..=12 {
            let dec = decompose_qubits(n).unwrap();
            assert_eq!(dec.total_dim(), 1u128 << n, "n={n}");
            assert_eq!(dec.param_count(), catalan(n as u64), "n={n}");
        }
        assert!(decompose_qubits(0).is_err());
        assert!(decompose_qubits(31).is_err());
        // Large-n binomials stay exact.
        assert_eq!(decompose_qubits(30).unwrap().total_dim(), 1u128 << 30);
    }

    #[test]
    fn haar_sample_deterministic_for_fixed_seed() {
        let a = haar_sample(&mut rng(9));
        let b = haar_sample(&mut rng(9));
        assert_eq!(a.quaternion(), b.quaternion());
    }

    #[test]
    fn haar_mean_of_fundamental_vanishes() {
        let mut r = rng(17);
        let n = 100_000usize;
        let mut acc: CMat = Array2::zeros((2, 2));
        for _ in 0..n {
            acc = acc + haar_sample(&mut r).matrix2();
        }
        acc = acc.mapv(|z| z / n as f64);
        assert!(max_abs(&acc) < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn haar_mean_u_tensor_ustar_is_rank_one_projector() {
        // int dU U (x) U* = |phi><phi| with phi = (|00> + |11>)/sqrt(2).
        let mut r = rng(23);
        let n = 100_000usize;
        let mut acc: CMat = Array2::zeros((4, 4));
        for _ in 0..n {
            let u = haar_sample(&mut r).matrix2();
            let ustar = u.mapv(|z| z.conj());
            acc = acc + crate::linalg::kron(&u, &ustar);
        }
        acc = acc.mapv(|z| z / n as f64);
        let mut expect: CMat = Array2::zeros((4, 4));
        for (a, b) in [(0usize, 0usize), (0, 3), (3, 0), (3, 3)] {
            expect[(a, b)] = C64::new(0.5, 0.0);
        }
        assert!(max_abs_diff(&acc, &expect) < 0.01);
        assert!((crate::linalg::trace(&acc).re - 1.0).abs() < 0.01);
    }
}
