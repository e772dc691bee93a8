//! Dense complex linear algebra shared by the gate and operator modules.
//!
//! Matrices are `ndarray::Array2<Complex64>` in row-major layout. The few
//! operations that need a real eigensolver (Hermitian diagonalization, the
//! Lanczos tridiagonal step) call LAPACK routines from the system OpenBLAS.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::SpinNetError;

pub type C64 = Complex64;
pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// 2x2 Pauli matrices in the computational basis.
pub fn pauli_x() -> CMat {
    ndarray::array![[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> CMat {
    ndarray::array![[ZERO, -I], [I, ZERO]]
}

pub fn pauli_z() -> CMat {
    ndarray::array![[ONE, ZERO], [ZERO, -ONE]]
}

pub fn identity(dim: usize) -> CMat {
    Array2::eye(dim).mapv(|x: f64| C64::new(x, 0.0))
}

/// Conjugate transpose.
pub fn dagger(a: &CMat) -> CMat {
    a.t().mapv(|z| z.conj())
}

/// Kronecker product, row-major convention: the first factor owns the most
/// significant index bits.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ra, ca) = a.dim();
    let (rb, cb) = b.dim();
    let mut out = Array2::zeros((ra * rb, ca * cb));
    for ia in 0..ra {
        for ja in 0..ca {
            let f = a[(ia, ja)];
            if f == ZERO {
                continue;
            }
            for ib in 0..rb {
                for jb in 0..cb {
                    out[(ia * rb + ib, ja * cb + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// n-fold Kronecker power.
pub fn kron_pow(a: &CMat, n: usize) -> CMat {
    assert!(n >= 1);
    let mut out = a.clone();
    for _ in 1..n {
        out = kron(&out, a);
    }
    out
}

pub fn frobenius_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(a: &CMat) -> C64 {
    a.diag().sum()
}

/// Deviation from unitarity as max |(A A^\dagger - 1)_{ij}|.
pub fn unitarity_defect(a: &CMat) -> f64 {
    let d = a.nrows();
    max_abs_diff(&a.dot(&dagger(a)), &identity(d))
}

/// Deviation from Hermiticity as max |(A - A^\dagger)_{ij}|.
pub fn hermiticity_defect(a: &CMat) -> f64 {
    max_abs_diff(a, &dagger(a))
}

/// Global-phase-insensitive distance between two unitaries of equal dimension:
/// 1 - |tr(A^\dagger B)| / d. Zero iff A = e^{i phi} B.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let d = a.nrows() as f64;
    1.0 - trace(&dagger(a).dot(b)).norm() / d
}

fn one_norm(a: &CMat) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Matrix exponential by scaling-and-squaring with the degree-13 Pade
/// approximant. The gates in this crate are at most 64x64, where this is both
/// fast and accurate to near machine precision.
pub fn expm(a: &CMat) -> CMat {
    const PADE13: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;

    let d = a.nrows();
    assert_eq!(d, a.ncols(), "expm requires a square matrix");
    let norm = one_norm(a);
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let a = a.mapv(|z| z * scale);

    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let id = identity(d);

    let b = |k: usize| C64::new(PADE13[k], 0.0);
    let u_inner = a6.mapv(|z| z * b(13))
        + a4.mapv(|z| z * b(11))
        + a2.mapv(|z| z * b(9));
    let u_rest = a6.mapv(|z| z * b(7))
        + a4.mapv(|z| z * b(5))
        + a2.mapv(|z| z * b(3))
        + id.mapv(|z| z * b(1));
    let u = a.dot(&(a6.dot(&u_inner) + u_rest));

    let v_inner = a6.mapv(|z| z * b(12))
        + a4.mapv(|z| z * b(10))
        + a2.mapv(|z| z * b(8));
    let v = a6.dot(&v_inner)
        + a6.mapv(|z| z * b(6))
        + a4.mapv(|z| z * b(4))
        + a2.mapv(|z| z * b(2))
        + id.mapv(|z| z * b(0));

    // expm = (V - U)^{-1} (V + U), solved by Gaussian elimination.
    let mut lhs = &v - &u;
    let mut rhs = &v + &u;
    solve_in_place(&mut lhs, &mut rhs);
    let mut out = rhs;
    for _ in 0..s {
        out = out.dot(&out);
    }
    out
}

/// Frechet derivative of the matrix exponential: returns
/// (expm(A), d/dt expm(A + tE) at t = 0) via the block identity
/// expm([[A, E], [0, A]]) = [[expm(A), L(A,E)], [0, expm(A)]].
pub fn expm_frechet(a: &CMat, e: &CMat) -> (CMat, CMat) {
    let d = a.nrows();
    let mut block = Array2::zeros((2 * d, 2 * d));
    for i in 0..d {
        for j in 0..d {
            block[(i, j)] = a[(i, j)];
            block[(i, j + d)] = e[(i, j)];
            block[(i + d, j + d)] = a[(i, j)];
        }
    }
    let big = expm(&block);
    let mut ea = Array2::zeros((d, d));
    let mut l = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            ea[(i, j)] = big[(i, j)];
            l[(i, j)] = big[(i, j + d)];
        }
    }
    (ea, l)
}

/// Solve A X = B in place with partial pivoting; B is overwritten by X.
fn solve_in_place(a: &mut CMat, b: &mut CMat) {
    let n = a.nrows();
    let m = b.ncols();
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].norm();
        for r in col + 1..n {
            let v = a[(r, col)].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        assert!(best > 1e-300, "singular matrix in expm solve");
        if pivot != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(pivot, j)];
                a[(pivot, j)] = t;
            }
            for j in 0..m {
                let t = b[(col, j)];
                b[(col, j)] = b[(pivot, j)];
                b[(pivot, j)] = t;
            }
        }
        let inv = ONE / a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] * inv;
            if f == ZERO {
                continue;
            }
            for j in col..n {
                let v = a[(col, j)];
                a[(r, j)] -= f * v;
            }
            for j in 0..m {
                let v = b[(col, j)];
                b[(r, j)] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        let inv = ONE / a[(col, col)];
        for j in 0..m {
            b[(col, j)] *= inv;
        }
        for r in 0..col {
            let f = a[(r, col)];
            if f == ZERO {
                continue;
            }
            for j in 0..m {
                let v = b[(col, j)];
                b[(r, j)] -= f * v;
            }
        }
    }
}

extern "C" {
    fn zheev_(
        jobz: *const u8,
        uplo: *const u8,
        n: *const i32,
        a: *mut C64,
        lda: *const i32,
        w: *mut f64,
        work: *mut C64,
        lwork: *const i32,
        rwork: *mut f64,
        info: *mut i32,
    );

    fn dstev_(
        jobz: *const u8,
        n: *const i32,
        d: *mut f64,
        e: *mut f64,
        z: *mut f64,
        ldz: *const i32,
        work: *mut f64,
        info: *mut i32,
    );
}

/// Eigenvalues (ascending) and eigenvectors of a Hermitian matrix.
/// Column j of the returned matrix is the eigenvector of eigenvalue j.
pub fn eigh(a: &CMat) -> Result<(Vec<f64>, CMat), SpinNetError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(SpinNetError::Dimension(format!(
            "eigh requires a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if hermiticity_defect(a) > 1e-10 * (1.0 + max_abs(a)) {
        return Err(SpinNetError::NotHermitian(hermiticity_defect(a)));
    }
    // Row-major buffer of conj(A) reinterpreted in column-major order is
    // conj(A)^T = A^\dagger = A for Hermitian input.
    let mut buf: Vec<C64> = a.iter().map(|z| z.conj()).collect();
    let mut w = vec![0.0f64; n];
    let nn = n as i32;
    let mut info: i32 = 0;
    let lwork = (4 * n.max(1)) as i32;
    let mut work = vec![ZERO; lwork as usize];
    let mut rwork = vec![0.0f64; 3 * n.max(1)];
    unsafe {
        zheev_(
            b"V".as_ptr(),
            b"L".as_ptr(),
            &nn,
            buf.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(SpinNetError::Numerical(format!("zheev failed, info={info}")));
    }
    // Column-major eigenvector buffer -> row-major matrix with eigenvectors
    // in the columns.
    let mut vecs = Array2::zeros((n, n));
    for j in 0..n {
        for i in 0..n {
            vecs[(i, j)] = buf[j * n + i];
        }
    }
    Ok((w, vecs))
}

/// Eigenvalues (ascending) of a Hermitian matrix; skips the eigenvector
/// accumulation, which matters at dimensions in the thousands.
pub fn eigvalsh(a: &CMat) -> Result<Vec<f64>, SpinNetError> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(SpinNetError::Dimension(format!(
            "eigvalsh requires a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if hermiticity_defect(a) > 1e-10 * (1.0 + max_abs(a)) {
        return Err(SpinNetError::NotHermitian(hermiticity_defect(a)));
    }
    let mut buf: Vec<C64> = a.iter().map(|z| z.conj()).collect();
    let mut w = vec![0.0f64; n];
    let nn = n as i32;
    let mut info: i32 = 0;
    let lwork = (4 * n.max(1)) as i32;
    let mut work = vec![ZERO; lwork as usize];
    let mut rwork = vec![0.0f64; 3 * n.max(1)];
    unsafe {
        zheev_(
            b"N".as_ptr(),
            b"L".as_ptr(),
            &nn,
            buf.as_mut_ptr(),
            &nn,
            w.as_mut_ptr(),
            work.as_mut_ptr(),
            &lwork,
            rwork.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(SpinNetError::Numerical(format!("zheev failed, info={info}")));
    }
    Ok(w)
}

/// Eigen-decomposition of a real symmetric tridiagonal matrix.
/// Returns eigenvalues ascending and the eigenvector matrix column-wise.
pub fn eigh_tridiagonal(
    diag: &[f64],
    offdiag: &[f64],
) -> Result<(Vec<f64>, Vec<Vec<f64>>), SpinNetError> {
    let n = diag.len();
    assert_eq!(offdiag.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);
    let mut z = vec![0.0f64; n * n];
    let nn = n as i32;
    let mut work = vec![0.0f64; (2 * n).max(1)];
    let mut info: i32 = 0;
    unsafe {
        dstev_(
            b"V".as_ptr(),
            &nn,
            d.as_mut_ptr(),
            e.as_mut_ptr(),
            z.as_mut_ptr(),
            &nn,
            work.as_mut_ptr(),
            &mut info,
        );
    }
    if info != 0 {
        return Err(SpinNetError::Numerical(format!("dstev failed, info={info}")));
    }
    let vecs: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|i| z[j * n + i]).collect())
        .collect();
    Ok((d, vecs))
}

/// Random Hermitian matrix with independent N(0,1) entries (GUE-like), used
/// by the twirling tests.
pub fn random_hermitian(dim: usize, rng: &mut impl rand::Rng) -> CMat {
    use rand_distr::{Distribution, StandardNormal};
    let mut a: CMat = Array2::zeros((dim, dim));
    for i in 0..dim {
        for j in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            a[(i, j)] = C64::new(re, im);
        }
    }
    let ad = dagger(&a);
    (a + ad).mapv(|z| z * 0.5)
}
