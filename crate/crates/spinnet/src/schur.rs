//! The n-qubit Schur transform built from sequential (left-to-right)
//! spin-coupling paths.
//!
//! Row convention: rows are grouped by coupling path, paths sorted with higher
//! total spin first and ties broken path-lexicographically (larger
//! intermediate spin first); within one path, rows run Jz = +J down to -J.
//! Each row carries an extra sign flip for every interior coupling step that
//! passes through total spin 0. This phase convention makes the constructed
//! S2 and S3 match the worked three-qubit permutation identities (the second
//! spin-1/2 copy of S3 carries the negated singlet phase).

use ndarray::Array2;

use crate::error::{Result, SpinNetError};
use crate::linalg::{dagger, frobenius_norm, identity, CMat, C64};
use crate::su2::{cg_coefficient, decompose_qubits, IrrepDecomposition, Spin, Su2Element};

/// A sequential coupling path: spins[k] is the total spin after coupling the
/// first k+1 qubits, so spins[0] = 1/2 and successive entries differ by 1/2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingPath {
    spins: Vec<Spin>,
}

impl CouplingPath {
    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn final_spin(&self) -> Spin {
        *self.spins.last().expect("path is nonempty")
    }

    /// Number of interior steps (excluding the final spin) that sit at total
    /// spin zero; an odd count flips the row sign.
    fn interior_zero_count(&self) -> usize {
        if self.spins.len() < 2 {
            return 0;
        }
        self.spins[1..self.spins.len() - 1]
            .iter()
            .filter(|s| s.twice() == 0)
            .count()
    }
}

impl std::fmt::Display for CouplingPath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.spins.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join("->"))
    }
}

/// Label of one Schur-basis row: a coupling path plus the final Jz.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchurRow {
    pub path_index: usize,
    pub twice_m: i32,
}

/// Span of one irrep copy inside the Schur row ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockSpan {
    pub spin: Spin,
    pub path_index: usize,
    pub row_start: usize,
}

impl BlockSpan {
    pub fn dim(&self) -> usize {
        self.spin.dimension()
    }

    pub fn rows(&self) -> std::ops::Range<usize> {
        self.row_start..self.row_start + self.dim()
    }
}

/// The dense n-qubit Schur transform with its row bookkeeping.
#[derive(Debug, Clone)]
pub struct SchurTransform {
    n: usize,
    matrix: CMat,
    paths: Vec<CouplingPath>,
    rows: Vec<SchurRow>,
    decomposition: IrrepDecomposition,
}

/// All coupling-path prefixes for n qubits, ordered with higher final spin
/// first, then path-lexicographically (larger intermediate spins first).
pub fn coupling_paths(n: usize) -> Result<Vec<CouplingPath>> {
    if n == 0 {
        return Err(SpinNetError::Domain("qubit count must be positive".into()));
    }
    let mut paths: Vec<Vec<Spin>> = vec![vec![Spin::HALF]];
    for _ in 1..n {
        let mut next = Vec::with_capacity(paths.len() * 2);
        for p in paths {
            let last = *p.last().unwrap();
            let mut up = p.clone();
            up.push(Spin::from_twice(last.twice() + 1));
            next.push(up);
            if last.twice() >= 1 {
                let mut down = p;
                down.push(Spin::from_twice(last.twice() - 1));
                next.push(down);
            }
        }
        paths = next;
    }
    paths.sort_by(|a, b| {
        b.last()
            .unwrap()
            .cmp(a.last().unwrap())
            .then_with(|| b.cmp(a))
    });
    Ok(paths.into_iter().map(|spins| CouplingPath { spins }).collect())
}

/// Build the dense 2^n x 2^n Schur transform by multiplying the
/// Clebsch-Gordan coefficients along every coupling path.
pub fn build_schur(n: usize) -> Result<SchurTransform> {
    if n == 0 || n > 12 {
        return Err(SpinNetError::Domain(format!(
            "dense Schur transform supports 1 <= n <= 12, got {n}"
        )));
    }
    let dim = 1usize << n;

    // Grow (path prefix, rows) pairs one qubit at a time. rows[r] is the row
    // vector of |path, M> with M = J - r, over bitstrings of the qubits seen
    // so far (later qubits occupy less significant bits).
    struct Partial {
        spins: Vec<Spin>,
        rows: Vec<Vec<C64>>,
    }
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut partials = vec![Partial {
        spins: vec![Spin::HALF],
        rows: vec![vec![one, zero], vec![zero, one]],
    }];
    for step in 1..n {
        let width = 1usize << step;
        let mut next = Vec::with_capacity(partials.len() * 2);
        for part in &partials {
            let j_old = *part.spins.last().unwrap();
            let tj_old = j_old.twice() as i32;
            for tj_new in [tj_old + 1, tj_old - 1] {
                if tj_new < 0 {
                    continue;
                }
                let j_new = Spin::from_twice(tj_new as u32);
                let mut rows = Vec::with_capacity(j_new.dimension());
                for tm_new in j_new.twice_m_values() {
                    let mut row = vec![zero; width * 2];
                    // mu = +1/2 (bit 0) and mu = -1/2 (bit 1) of the new qubit.
                    for (tmu, bit) in [(1i32, 0usize), (-1, 1)] {
                        let tm_old = tm_new - tmu;
                        if tm_old.abs() > tj_old {
                            continue;
                        }
                        let c = cg_coefficient(j_old, tm_old, Spin::HALF, tmu, j_new, tm_new)?;
                        if c == 0.0 {
                            continue;
                        }
                        let r_old = ((tj_old - tm_old) / 2) as usize;
                        for (col, amp) in part.rows[r_old].iter().enumerate() {
                            row[2 * col + bit] += amp * c;
                        }
                    }
                    rows.push(row);
                }
                let mut spins = part.spins.clone();
                spins.push(j_new);
                next.push(Partial { spins, rows });
            }
        }
        partials = next;
    }

    // Interior spin-0 sign convention.
    for part in &mut partials {
        let path = CouplingPath {
            spins: part.spins.clone(),
        };
        if path.interior_zero_count() % 2 == 1 {
            for row in &mut part.rows {
                for amp in row.iter_mut() {
                    *amp = -*amp;
                }
            }
        }
    }

    // Order: higher final spin first, then path-lexicographic.
    partials.sort_by(|a, b| {
        b.spins
            .last()
            .unwrap()
            .cmp(a.spins.last().unwrap())
            .then_with(|| b.spins.cmp(&a.spins))
    });

    let mut matrix: CMat = Array2::zeros((dim, dim));
    let mut rows = Vec::with_capacity(dim);
    let mut paths = Vec::with_capacity(partials.len());
    let mut r = 0usize;
    for (pi, part) in partials.iter().enumerate() {
        let j = *part.spins.last().unwrap();
        for (row_vec, tm) in part.rows.iter().zip(j.twice_m_values()) {
            for (c, amp) in row_vec.iter().enumerate() {
                matrix[(r, c)] = *amp;
            }
            rows.push(SchurRow {
                path_index: pi,
                twice_m: tm,
            });
            r += 1;
        }
        paths.push(CouplingPath {
            spins: part.spins.clone(),
        });
    }
    debug_assert_eq!(r, dim);

    let decomposition = decompose_qubits(n)?;
    // Path counts must reproduce the Schur-Weyl multiplicities.
    for block in &decomposition.blocks {
        let count = paths
            .iter()
            .filter(|p| p.final_spin() == block.spin)
            .count() as u64;
        debug_assert_eq!(count, block.multiplicity);
    }

    Ok(SchurTransform {
        n,
        matrix,
        paths,
        rows,
        decomposition,
    })
}

impl SchurTransform {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn paths(&self) -> &[CouplingPath] {
        &self.paths
    }

    pub fn rows(&self) -> &[SchurRow] {
        &self.rows
    }

    pub fn decomposition(&self) -> &IrrepDecomposition {
        &self.decomposition
    }

    /// Row spans of the irrep copies, in row order (spin descending, copies in
    /// path order).
    pub fn block_spans(&self) -> Vec<BlockSpan> {
        let mut spans = Vec::with_capacity(self.paths.len());
        let mut start = 0usize;
        for (pi, path) in self.paths.iter().enumerate() {
            let spin = path.final_spin();
            spans.push(BlockSpan {
                spin,
                path_index: pi,
                row_start: start,
            });
            start += spin.dimension();
        }
        spans
    }

    /// Conjugate U(g)^(x)n into the Schur basis and split it into per-copy
    /// diagonal blocks. Returns the blocks (in row order) and the Frobenius
    /// norm of everything left outside them.
    pub fn block_diagonalize(&self, g: &Su2Element) -> (Vec<CMat>, f64) {
        let u = crate::su2::tensor_power_rep(g, self.n);
        let t = self.matrix.dot(&u).dot(&dagger(&self.matrix));
        self.split_blocks(&t)
    }

    /// Split an operator already expressed in the Schur row basis into its
    /// per-copy diagonal blocks plus the off-block residual norm.
    pub fn split_blocks(&self, t: &CMat) -> (Vec<CMat>, f64) {
        let mut rest = t.clone();
        let mut blocks = Vec::new();
        for span in self.block_spans() {
            let d = span.dim();
            let mut block: CMat = Array2::zeros((d, d));
            for (bi, i) in span.rows().enumerate() {
                for (bj, j) in span.rows().enumerate() {
                    block[(bi, bj)] = t[(i, j)];
                    rest[(i, j)] = C64::new(0.0, 0.0);
                }
            }
            blocks.push(block);
        }
        (blocks, frobenius_norm(&rest))
    }

    /// Worst-case deviation of S S^dagger from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        crate::linalg::max_abs_diff(
            &self.matrix.dot(&dagger(&self.matrix)),
            &identity(self.matrix.nrows()),
        )
    }

    /// Plain-text CSV export; entries are real by construction. One data line
    /// per row, preceded by comment lines recording the row labels.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# schur transform, n={}, dim={}\n",
            self.n,
            1usize << self.n
        ));
        for (ri, row) in self.rows.iter().enumerate() {
            out.push_str(&format!(
                "# row {}: path {}, Jz {}\n",
                ri,
                self.paths[row.path_index],
                format_half(row.twice_m),
            ));
        }
        for ri in 0..self.matrix.nrows() {
            let line: Vec<String> = (0..self.matrix.ncols())
                .map(|ci| format!("{:.17e}", self.matrix[(ri, ci)].re))
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

fn format_half(twice: i32) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{}/2", twice)
    }
}

/// Verify that U(g)^(x)n conjugated by S is block diagonal with the right
/// spin-J representation in every block; returns the worst deviation seen.
pub fn equivariance_defect(s: &SchurTransform, g: &Su2Element) -> f64 {
    let (blocks, off) = s.block_diagonalize(g);
    let mut worst = off;
    for (span, block) in s.block_spans().iter().zip(blocks.iter()) {
        let expect = crate::su2::spin_rep_matrix(span.spin, g);
        worst = worst.max(crate::linalg::max_abs_diff(block, &expect));
    }
    worst
}

/// The paper's printed two-qubit Schur gate.
pub fn s2_golden() -> CMat {
    let h = 1.0 / 2f64.sqrt();
    real_matrix(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, h, h, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, h, -h, 0.0],
    ])
}

/// The paper's printed three-qubit Schur gate. The entry at (row 6, col 2)
/// carries the sign forced by unitarity; with it, the two spin-1/2 copies are
/// exactly the states the worked three-qubit permutation identities act on.
pub fn s3_golden() -> CMat {
    let r3 = 1.0 / 3f64.sqrt();
    let r23 = (2f64 / 3.0).sqrt();
    let r6 = 1.0 / 6f64.sqrt();
    let r2 = 1.0 / 2f64.sqrt();
    real_matrix(&[
        vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        vec![0.0, r3, r3, 0.0, r3, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, r3, 0.0, r3, r3, 0.0],
        vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        vec![0.0, r23, -r6, 0.0, -r6, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, r6, 0.0, r6, -r23, 0.0],
        vec![0.0, 0.0, -r2, 0.0, r2, 0.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, -r2, 0.0, r2, 0.0, 0.0],
    ])
}

fn real_matrix(rows: &[Vec<f64>]) -> CMat {
    let r = rows.len();
    let c = rows[0].len();
    let mut m: CMat = Array2::zeros((r, c));
    for (i, row) in rows.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            m[(i, j)] = C64::new(*v, 0.0);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;
    use crate::su2::haar_sample;
    use crate::testutil::rng;
    use rand::Rng;

    #[test]
    fn schur_one_qubit_is_identity() {
        let s = build_schur(1).unwrap();
        assert!(max_abs_diff(s.matrix(), &identity(2)) < 1e-15);
    }

    #[test]
    fn schur_two_matches_printed_matrix() {
        let s = build_schur(2).unwrap();
        assert!(max_abs_diff(s.matrix(), &s2_golden()) < 1e-15);
    }

    #[test]
    fn schur_three_matches_printed_matrix() {
        let s = build_schur(3).unwrap();
        assert!(
            max_abs_diff(s.matrix(), &s3_golden()) < 1e-15,
            "constructed S3 deviates from the printed matrix:\n{:?}",
            s.matrix()
        );
    }

    #[test]
    fn coupling_paths_small_cases() {
        let p2 = coupling_paths(2).unwrap();
        assert_eq!(p2.len(), 2);
        assert_eq!(p2[0].spins(), &[Spin::HALF, Spin::ONE]);
        assert_eq!(p2[1].spins(), &[Spin::HALF, Spin::ZERO]);

        let p3 = coupling_paths(3).unwrap();
        let shown: Vec<String> = p3.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["1/2->1->3/2", "1/2->1->1/2", "1/2->0->1/2"]);
    }

    #[test]
    fn coupling_path_counts_match_multiplicities() {
        for n in 1..=8 {
            let paths = coupling_paths(n).unwrap();
            let dec = decompose_qubits(n).unwrap();
            for block in &dec.blocks {
                let count = paths
                    .iter()
                    .filter(|p| p.final_spin() == block.spin)
                    .count() as u64;
                assert_eq!(count, block.multiplicity, "n={n} spin={}", block.spin);
            }
        }
        // n=4: 1 path to spin 2, 3 paths to spin 1, 2 to spin 0.
        let p4 = coupling_paths(4).unwrap();
        let count = |tj: u32| p4.iter().filter(|p| p.final_spin().twice() == tj).count();
        assert_eq!((count(4), count(2), count(0)), (1, 3, 2));
    }

    #[test]
    fn schur_is_unitary() {
        for n in 1..=8 {
            let s = build_schur(n).unwrap();
            assert!(s.unitarity_defect() < 1e-12, "n={n}");
        }
    }

    #[test]
    fn schur_unitary_sampled_large_n() {
        // Full Gram matrices get slow beyond n=8; sample row pairs instead.
        let mut r = rng(5);
        for n in [9usize, 10] {
            let s = build_schur(n).unwrap();
            let dim = 1usize << n;
            for _ in 0..2000 {
                let i = r.gen_range(0..dim);
                let j = r.gen_range(0..dim);
                let dot: C64 = (0..dim)
                    .map(|c| s.matrix()[(i, c)].conj() * s.matrix()[(j, c)])
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot.re - expect).abs() < 1e-12 && dot.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn block_diagonalize_identity_gives_identities() {
        let s = build_schur(3).unwrap();
        let (blocks, off) = s.block_diagonalize(&Su2Element::identity());
        assert!(off < 1e-12);
        for b in blocks {
            assert!(max_abs_diff(&b, &identity(b.nrows())) < 1e-12);
        }
    }

    #[test]
    fn block_diagonalize_matches_spin_reps() {
        let mut r = rng(31);
        for n in 2..=5 {
            let s = build_schur(n).unwrap();
            for _ in 0..5 {
                let g = haar_sample(&mut r);
                assert!(
                    equivariance_defect(&s, &g) < 1e-10,
                    "equivariance defect too large at n={n}"
                );
            }
        }
    }

    #[test]
    fn repeated_copies_carry_identical_blocks() {
        let mut r = rng(37);
        let s = build_schur(3).unwrap();
        let g = haar_sample(&mut r);
        let (blocks, _) = s.block_diagonalize(&g);
        // Blocks 1 and 2 are the two spin-1/2 copies.
        assert!(max_abs_diff(&blocks[1], &blocks[2]) < 1e-10);
    }

    #[test]
    fn schur_rejects_out_of_range() {
        assert!(build_schur(0).is_err());
        assert!(build_schur(13).is_err());
    }

    #[test]
    fn csv_export_round_trips_entries() {
        let s = build_schur(2).unwrap();
        let csv = s.to_csv_string();
        let data_lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data_lines.len(), 4);
        let first: Vec<f64> = data_lines[0]
            .split(',')
            .map(|t| t.parse().unwrap())
            .collect();
        assert_eq!(first, vec![1.0, 0.0, 0.0, 0.0]);
    }
}
