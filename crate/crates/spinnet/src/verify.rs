//! Property suites behind the `verify` subcommand. Every suite runs a fixed
//! set of numerical checks with pinned seeds (no hidden entropy) and reports
//! one pass/fail line per check.

pub use crate::lattice::Check;

use crate::linalg::{
    dagger, identity, max_abs, max_abs_diff, phase_distance, random_hermitian, C64, ZERO,
};
use crate::perm::three_qubit_generators;
use crate::rng::seeded_rng;
use crate::schur::{build_schur, equivariance_defect, s2_golden, s3_golden};
use crate::sim::{singlet_state, Circuit, GateKind};
use crate::su2::haar_sample;
use crate::twirl::{is_equivariant, project_to_commutant, twirl, TwirlMethod};
use crate::vertex::{p3, scalar_gate, scalar_to_vertex3_params, schur_cached, vertex3};
use rand::Rng;

/// Suite names accepted by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Schur,
    Generators,
    Twirl,
    Gradients,
    All,
}

impl Suite {
    pub fn parse(name: &str) -> Option<Suite> {
        match name {
            "schur" => Some(Suite::Schur),
            "generators" => Some(Suite::Generators),
            "twirl" => Some(Suite::Twirl),
            "gradients" => Some(Suite::Gradients),
            "all" => Some(Suite::All),
            _ => None,
        }
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.to_string(),
        passed,
        detail,
    }
}

fn bound_check(name: &str, value: f64, bound: f64) -> Check {
    check(
        name,
        value < bound,
        format!("{value:.3e} (bound {bound:.1e})"),
    )
}

pub fn run_suite(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Schur => schur_suite(),
        Suite::Generators => generators_suite(),
        Suite::Twirl => twirl_suite(),
        Suite::Gradients => gradients_suite(),
        Suite::All => {
            let mut all = schur_suite();
            all.extend(generators_suite());
            all.extend(twirl_suite());
            all.extend(gradients_suite());
            all
        }
    }
}

fn schur_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let s2 = build_schur(2).expect("n=2 in range");
    out.push(bound_check(
        "schur: S2 matches the printed matrix",
        max_abs_diff(s2.matrix(), &s2_golden()),
        1e-12,
    ));
    let s3 = build_schur(3).expect("n=3 in range");
    out.push(bound_check(
        "schur: S3 matches the printed matrix",
        max_abs_diff(s3.matrix(), &s3_golden()),
        1e-12,
    ));
    let mut worst_unitarity = 0.0f64;
    for n in 1..=8 {
        worst_unitarity = worst_unitarity.max(build_schur(n).unwrap().unitarity_defect());
    }
    out.push(bound_check(
        "schur: unitarity for n <= 8",
        worst_unitarity,
        1e-12,
    ));
    let mut rng = seeded_rng(0x5c42);
    let mut worst_equiv = 0.0f64;
    for n in 2..=5 {
        let s = build_schur(n).unwrap();
        for _ in 0..5 {
            worst_equiv = worst_equiv.max(equivariance_defect(&s, &haar_sample(&mut rng)));
        }
    }
    out.push(bound_check(
        "schur: block diagonalization matches spin representations (n <= 5)",
        worst_equiv,
        1e-10,
    ));
    let g = haar_sample(&mut rng);
    let (blocks, _) = s3.block_diagonalize(&g);
    out.push(bound_check(
        "schur: repeated spin-1/2 copies carry identical blocks",
        max_abs_diff(&blocks[1], &blocks[2]),
        1e-10,
    ));
    out
}

fn generators_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let g = three_qubit_generators();
    let s = schur_cached(3).expect("n=3 in range");
    let sd = dagger(s.matrix());

    let mut worst = 0.0f64;
    for gen in [&g.g_i, &g.g_x, &g.g_y, &g.g_z] {
        let m = gen.to_matrix().unwrap();
        for r in 0..8 {
            worst = worst.max(m[(r, 0)].norm());
        }
    }
    out.push(bound_check(
        "generators: every generator annihilates |000>",
        worst,
        1e-12,
    ));

    let gx = g.g_x.to_matrix().unwrap();
    let mut worst = 0.0f64;
    for r in 0..8 {
        let mut acc = ZERO;
        for c in 0..8 {
            acc += gx[(r, c)] * sd[(c, 5)];
        }
        worst = worst.max((acc - sd[(r, 7)]).norm());
    }
    out.push(bound_check(
        "generators: G_X maps S3'|5> to S3'|7>",
        worst,
        1e-12,
    ));

    let gz = s.matrix().dot(&g.g_z.to_matrix().unwrap()).dot(&sd);
    let expect = crate::linalg::kron(&crate::linalg::pauli_z(), &identity(2));
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((gz[(4 + i, 4 + j)] - expect[(i, j)]).norm());
        }
    }
    out.push(bound_check(
        "generators: G_Z acts as Z between the multiplicity copies",
        worst,
        1e-12,
    ));

    let mut rng = seeded_rng(0x9e4);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let theta: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-2.0..2.0));
        let exponent = g
            .g_i
            .scale(C64::new(theta[0], 0.0))
            .add(&g.g_x.scale(C64::new(theta[1], 0.0)))
            .add(&g.g_y.scale(C64::new(theta[2], 0.0)))
            .add(&g.g_z.scale(C64::new(theta[3], 0.0)))
            .scale(C64::new(0.0, 1.0));
        let from_perms = crate::perm::generalized_perm_exp(&exponent).unwrap();
        let from_schur = sd.dot(&p3(&theta)).dot(s.matrix());
        worst = worst.max(phase_distance(&from_perms, &from_schur));
    }
    out.push(bound_check(
        "generators: exp(i sum theta G) equals the vertex gate (50 draws)",
        worst,
        1e-9,
    ));

    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t12 = rng.gen_range(-1.5..1.5);
        let t23 = rng.gen_range(-1.5..1.5);
        let t13 = rng.gen_range(-1.5..1.5);
        let phi = rng.gen_range(-1.5..1.5);
        let w = scalar_gate(t12, t23, t13, phi);
        let (theta, _) = scalar_to_vertex3_params(t12, t23, t13, phi);
        worst = worst.max(phase_distance(&w, &vertex3(&theta)));
    }
    out.push(bound_check(
        "generators: scalar-product gate equals vertex gate up to phase (50 draws)",
        worst,
        1e-9,
    ));
    out
}

fn twirl_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = seeded_rng(0x7717);

    let z = crate::linalg::pauli_z();
    out.push(bound_check(
        "twirl: single-qubit Z twirls to zero",
        max_abs(&project_to_commutant(&z).unwrap()),
        1e-12,
    ));

    let swap = crate::perm::Permutation::transposition(2, 0, 1)
        .unwrap()
        .to_matrix();
    out.push(bound_check(
        "twirl: equivariant operators are fixed points",
        max_abs_diff(&project_to_commutant(&swap).unwrap(), &swap),
        1e-12,
    ));

    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let h = random_hermitian(1 << n, &mut rng);
        let exact = project_to_commutant(&h).unwrap();
        let quad = twirl(&h, TwirlMethod::Quadrature { order: 2 * n + 6 })
            .unwrap()
            .output;
        worst = worst.max(max_abs_diff(&exact, &quad));
    }
    out.push(bound_check(
        "twirl: exact quadrature agrees with block projection",
        worst,
        1e-10,
    ));

    let h = random_hermitian(4, &mut rng);
    let exact = project_to_commutant(&h).unwrap();
    let mc = twirl(
        &h,
        TwirlMethod::MonteCarlo {
            samples: 100_000,
            seed: 5,
        },
    )
    .unwrap();
    out.push(bound_check(
        "twirl: Monte-Carlo estimate converges to the projection (1e5 samples)",
        max_abs_diff(&exact, &mc.output),
        2e-2,
    ));

    let mut worst = 0.0f64;
    for n in [2usize, 3] {
        let h = random_hermitian(1 << n, &mut rng);
        let t = project_to_commutant(&h).unwrap();
        let (_, comm) = is_equivariant(&t, n, 10, 1e-9, &mut rng);
        worst = worst.max(comm);
        worst = worst.max(max_abs_diff(&project_to_commutant(&t).unwrap(), &t));
    }
    out.push(bound_check(
        "twirl: projected operators are equivariant fixed points",
        worst,
        1e-9,
    ));
    out
}

fn gradients_suite() -> Vec<Check> {
    let mut out = Vec::new();
    let mut rng = seeded_rng(0x6ead);

    let mut worst_rel = 0.0f64;
    let mut worst_norm = 0.0f64;
    let mut worst_spin = 0.0f64;
    for _ in 0..10 {
        let n = 2 * rng.gen_range(2..=4);
        let pairs: Vec<(usize, usize)> = (0..n / 2).map(|i| (2 * i, 2 * i + 1)).collect();
        let psi0 = singlet_state(&pairs, n).unwrap();
        let mut circuit = Circuit::new(n);
        for q in 0..n {
            if rng.gen_bool(0.5) {
                circuit
                    .push(GateKind::Vertex3, vec![q, (q + 1) % n, (q + 2) % n])
                    .unwrap();
            } else {
                circuit.push(GateKind::Vertex2, vec![q, (q + 1) % n]).unwrap();
            }
        }
        let h = crate::ham::triangular_1d(n, 1.0, 0.44).unwrap();
        let params: Vec<f64> = (0..circuit.param_count())
            .map(|_| rng.gen_range(-0.7..0.7))
            .collect();
        let (_, grad) = circuit.energy_and_gradient(&psi0, &params, &h).unwrap();
        let step = 1e-5;
        for pi in 0..params.len() {
            let mut up = params.clone();
            up[pi] += step;
            let mut dn = params.clone();
            dn[pi] -= step;
            let fd = (circuit.expectation(&psi0, &up, &h).unwrap()
                - circuit.expectation(&psi0, &dn, &h).unwrap())
                / (2.0 * step);
            worst_rel = worst_rel.max((grad[pi] - fd).abs() / 1.0f64.max(fd.abs()));
        }
        let mut state = psi0.clone();
        circuit.apply(&mut state, &params).unwrap();
        worst_norm = worst_norm.max((state.norm() - 1.0).abs());
        worst_spin = worst_spin.max(state.total_spin_expectation().abs());
    }
    out.push(bound_check(
        "gradients: adjoint matches central finite differences (10 circuits)",
        worst_rel,
        1e-6,
    ));
    out.push(bound_check(
        "gradients: gate application preserves the norm",
        worst_norm,
        1e-10,
    ));
    out.push(bound_check(
        "gradients: circuits keep singlet inputs in the spin-0 sector",
        worst_spin,
        1e-8,
    ));
    out
}

/// Render checks as a human-readable report; returns overall success.
pub fn report(checks: &[Check], out: &mut impl std::io::Write) -> std::io::Result<bool> {
    let mut ok = true;
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(out, "[{tag}] {} - {}", c.name, c.detail)?;
        ok &= c.passed;
    }
    let total = checks.len();
    let passed = checks.iter().filter(|c| c.passed).count();
    writeln!(out, "{passed}/{total} checks passed")?;
    Ok(ok)
}

/// Machine-readable JSON report.
pub fn report_json(checks: &[Check]) -> String {
    let items: Vec<String> = checks
        .iter()
        .map(|c| {
            format!(
                "{{\"name\":{},\"passed\":{},\"detail\":{}}}",
                serde_json::to_string(&c.name).unwrap(),
                c.passed,
                serde_json::to_string(&c.detail).unwrap()
            )
        })
        .collect();
    format!("[{}]", items.join(","))
}
