//! Haar twirling over SU(2) and the equivalence between twirled generators
//! and the block commutant form.
//!
//! Three routes are provided and cross-checked: Monte-Carlo averaging over
//! Haar samples, a deterministic product quadrature that is exact for the
//! polynomial integrands arising from U^(x)n H U^dagger^(x)n, and the exact
//! algebraic projection through the Schur basis.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Result, SpinNetError};
use crate::linalg::{dagger, frobenius_norm, hermiticity_defect, kron, CMat, C64, ZERO};
use crate::rng::{derive_seed, seeded_rng};
use crate::su2::{haar_sample, tensor_power_rep, Su2Element};
use crate::vertex::schur_cached;

/// How a twirl was estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlMethod {
    /// Average over `samples` Haar-random group elements; error ~ 1/sqrt(samples).
    MonteCarlo { samples: usize, seed: u64 },
    /// Product quadrature with `order` nodes per angle; exact (to rounding)
    /// once order exceeds the polynomial degree of the integrand.
    Quadrature { order: usize },
}

/// Result of a twirl: input, output, and an a-priori error estimate.
#[derive(Debug, Clone)]
pub struct TwirlResult {
    pub input: CMat,
    pub output: CMat,
    pub method: TwirlMethod,
    pub estimated_error: f64,
}

fn check_hermitian(h: &CMat) -> Result<()> {
    let defect = hermiticity_defect(h);
    if defect > 1e-10 * (1.0 + crate::linalg::max_abs(h)) {
        return Err(SpinNetError::NotHermitian(defect));
    }
    Ok(())
}

fn qubit_count_of(h: &CMat) -> Result<usize> {
    let d = h.nrows();
    if d != h.ncols() || !d.is_power_of_two() {
        return Err(SpinNetError::Dimension(format!(
            "operator must be square with power-of-two dimension, got {}x{}",
            d,
            h.ncols()
        )));
    }
    Ok(d.trailing_zeros() as usize)
}

/// T[H] = int dU U^(x)n H (U^dagger)^(x)n over the SU(2) Haar measure.
pub fn twirl(h: &CMat, method: TwirlMethod) -> Result<TwirlResult> {
    check_hermitian(h)?;
    let n = qubit_count_of(h)?;
    if n > 8 {
        return Err(SpinNetError::Domain(format!(
            "dense twirl supports n <= 8 qubits, got {n}"
        )));
    }
    let (output, estimated_error) = match method {
        TwirlMethod::MonteCarlo { samples, seed } => {
            let acc = (0..samples)
                .into_par_iter()
                .fold(
                    || Array2::<C64>::zeros(h.dim()),
                    |acc, i| {
                        let mut rng = seeded_rng(derive_seed(seed, i as u64));
                        let g = haar_sample(&mut rng);
                        let u = tensor_power_rep(&g, n);
                        acc + u.dot(h).dot(&dagger(&u))
                    },
                )
                .reduce(|| Array2::<C64>::zeros(h.dim()), |a, b| a + b);
            let mean = acc.mapv(|z| z / samples as f64);
            let err = frobenius_norm(h) / (samples as f64).sqrt();
            (hermitize(&mean), err)
        }
        TwirlMethod::Quadrature { order } => {
            let out = twirl_quadrature(h, n, order);
            (hermitize(&out), 1e-12)
        }
    };
    Ok(TwirlResult {
        input: h.clone(),
        output,
        method,
        estimated_error,
    })
}

fn hermitize(a: &CMat) -> CMat {
    let ad = dagger(a);
    (a + &ad).mapv(|z| z * 0.5)
}

/// Deterministic Haar quadrature. Writing U = cos(a) 1 - i sin(a) n.sigma,
/// the Haar measure is (2/pi) sin^2(a) da x uniform(n). The integrand is a
/// pi-periodic trigonometric polynomial in a (degree <= 2n+2) and a
/// polynomial in n of degree <= 2n, so a uniform grid in a, Gauss-Legendre in
/// cos(theta), and a uniform grid in phi integrate it exactly for order > 2n+3.
fn twirl_quadrature(h: &CMat, n: usize, order: usize) -> CMat {
    let order = order.max(2 * n + 4);
    let mut acc: CMat = Array2::zeros(h.dim());
    let (nodes, weights) = gauss_legendre(order);
    let m_phi = order;
    let m_alpha = order;
    let mut total_weight = 0.0;
    for ia in 0..m_alpha {
        let alpha = std::f64::consts::PI * (ia as f64 + 0.5) / m_alpha as f64;
        let w_alpha = alpha.sin().powi(2);
        for (ct, wt) in nodes.iter().zip(weights.iter()) {
            let st = (1.0 - ct * ct).sqrt();
            for ip in 0..m_phi {
                let phi = 2.0 * std::f64::consts::PI * ip as f64 / m_phi as f64;
                let axis = [st * phi.cos(), st * phi.sin(), *ct];
                let g = Su2Element::new(axis, 2.0 * alpha).expect("unit axis");
                let u = tensor_power_rep(&g, n);
                let w = w_alpha * wt;
                total_weight += w;
                acc = acc + u.dot(h).dot(&dagger(&u)).mapv(|z| z * w);
            }
        }
    }
    acc.mapv(|z| z / total_weight)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // Legendre P_n(x) and P'_n(x) by recurrence.
            let (mut p0, mut p1) = (1.0f64, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0f64, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// True iff A commutes with U(g)^(x)n for `trials` Haar-random g within
/// Frobenius norm `tol`; also returns the worst commutator norm seen.
pub fn is_equivariant(
    a: &CMat,
    n: usize,
    trials: usize,
    tol: f64,
    rng: &mut impl rand::Rng,
) -> (bool, f64) {
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let g = haar_sample(rng);
        let u = tensor_power_rep(&g, n);
        let comm = a.dot(&u) - u.dot(a);
        worst = worst.max(frobenius_norm(&comm));
    }
    (worst < tol, worst)
}

/// Exact twirl: conjugate into the Schur basis, zero the entries between
/// different irrep copies of unequal spin, and average the within-spin copy
/// blocks over their Jz repetitions, producing the (+)_i (M_i (x) 1_{d_i})
/// commutant form; then conjugate back.
pub fn project_to_commutant(h: &CMat) -> Result<CMat> {
    check_hermitian(h)?;
    let n = qubit_count_of(h)?;
    if n > 8 {
        return Err(SpinNetError::Domain(format!(
            "commutant projection supports n <= 8 qubits, got {n}"
        )));
    }
    let s = schur_cached(n)?;
    let hs = s.matrix().dot(h).dot(&dagger(s.matrix()));
    let spans = s.block_spans();

    let mut out: CMat = Array2::zeros(h.dim());
    for block in &s.decomposition().blocks {
        let copies: Vec<_> = spans.iter().filter(|sp| sp.spin == block.spin).collect();
        let m = copies.len();
        let d = block.spin.dimension();
        debug_assert_eq!(m as u64, block.multiplicity);
        // M_i[c, c'] = (1/d) sum_z <copy c, z| H |copy c', z>
        let mut mblock: CMat = Array2::zeros((m, m));
        for (ci, sc) in copies.iter().enumerate() {
            for (cj, scj) in copies.iter().enumerate() {
                let mut acc = ZERO;
                for z in 0..d {
                    acc += hs[(sc.row_start + z, scj.row_start + z)];
                }
                mblock[(ci, cj)] = acc / d as f64;
            }
        }
        let expanded = kron(&mblock, &crate::linalg::identity(d));
        // Scatter back into the copy rows (copies are contiguous by
        // construction: same-spin paths are adjacent in row order).
        let base = copies[0].row_start;
        for i in 0..m * d {
            for j in 0..m * d {
                out[(base + i, base + j)] = expanded[(i, j)];
            }
        }
    }
    Ok(hermitize(&dagger(s.matrix()).dot(&out).dot(s.matrix())))
}
