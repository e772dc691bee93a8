//! Command-line entry point: property verification suites, experiment sweeps,
//! lattice validation, and Schur-matrix export.
//!
//! Exit codes: 0 success, 1 verification/validation failure, 2 usage error,
//! 3 budget truncation (partial results written).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use spinnet::lattice::LatticeSpec;
use spinnet::schur::build_schur;
use spinnet::verify::{report, report_json, run_suite, Suite};
use spinnet::vqe::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "spinnet",
    about = "SU(2)-equivariant spin-network circuits and a Heisenberg-model VQE",
    long_about = None,
    after_help = "Config schema (TOML):\n\
        [problem]  kind = \"triangular\"|\"kagome\"; n, j1, j2 (triangular); lattice = <file> (kagome)\n\
        [ansatz]   kinds = [\"two-vertex-triangular\"|\"three-vertex-triangular\"|\"three-vertex-kagome\"]; p = [..]\n\
        [run]      seeds, master_seed, output (falls back to $SPINNET_OUT_DIR)\n\
        [optimizer] learning_rate=0.01 beta1=0.9 beta2=0.999 epsilon=1e-8 max_iters=2000\n\
        \x20          stall_window=200 stall_tol=1e-9 init_alpha=1.0 (all optional)\n\
        [budget]   max_seconds, max_memory_mb (optional)\n\
        Exit codes: 0 ok, 1 verification/validation failure, 2 usage error, 3 budget truncation."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite: schur, generators, twirl, gradients, or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
        /// Also write a machine-readable JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Execute the experiment sweep described by a TOML config file.
    Run {
        config: PathBuf,
        /// Parallel optimization cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Lattice-spec utilities.
    Lattice {
        #[command(subcommand)]
        command: LatticeCommand,
    },
    /// Export the n-qubit Schur transform as CSV (stdout unless --output).
    ExportSchur {
        n: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Check every lattice invariant of a spec file.
    Validate { file: PathBuf },
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_TRUNCATED: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, json } => cmd_verify(&suite, json.as_deref()),
        Command::Run { config, jobs } => cmd_run(&config, jobs),
        Command::Lattice {
            command: LatticeCommand::Validate { file },
        } => cmd_lattice_validate(&file),
        Command::ExportSchur { n, output } => cmd_export_schur(n, output.as_deref()),
    }
}

fn cmd_verify(suite_name: &str, json_path: Option<&std::path::Path>) -> ExitCode {
    let Some(suite) = Suite::parse(suite_name) else {
        eprintln!(
            "unknown suite {suite_name:?}; expected one of: schur, generators, twirl, gradients, all"
        );
        return ExitCode::from(EXIT_USAGE);
    };
    let checks = run_suite(suite);
    let ok = report(&checks, &mut std::io::stdout()).expect("stdout");
    if let Some(path) = json_path {
        if let Err(e) = std::fs::write(path, report_json(&checks)) {
            eprintln!("failed to write JSON report: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn cmd_run(config_path: &std::path::Path, jobs: usize) -> ExitCode {
    let config = match ExperimentConfig::from_file(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let plan = match config.to_plan(jobs) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let grid_desc: Vec<String> = plan
        .grid
        .iter()
        .map(|(k, ps)| format!("{} p={:?}", k.name(), ps))
        .collect();
    println!(
        "problem {} | {} | {} seeds | output {:?}",
        plan.problem.label(),
        grid_desc.join(" + "),
        plan.seeds,
        plan.out_dir
    );
    match spinnet::vqe::experiment_sweep(&plan) {
        Ok(outcome) => {
            println!(
                "E_GS = {:.12} | {} records ({} resumed)",
                outcome.e_gs,
                outcome.records.len(),
                outcome.resumed
            );
            for r in &outcome.records {
                println!(
                    "  {} p={} seed={}: E = {:.9}, E~ = {:.3e}, {} iters, {:.1}s",
                    r.ansatz, r.p, r.seed, r.final_energy, r.final_e_tilde, r.iters, r.seconds
                );
            }
            if outcome.truncated {
                eprintln!("wall-clock budget exceeded; partial results written");
                ExitCode::from(EXIT_TRUNCATED)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}

fn cmd_lattice_validate(path: &std::path::Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {path:?}: {e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let spec = match LatticeSpec::parse(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    println!(
        "{} sites, {} edges, {} triangles, {} singlets",
        spec.n,
        spec.edges.len(),
        spec.triangles.len(),
        spec.singlet_matching.len()
    );
    let checks = spec.validate();
    let ok = report(&checks, &mut std::io::stdout()).expect("stdout");
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILURE)
    }
}

fn cmd_export_schur(n: usize, output: Option<&std::path::Path>) -> ExitCode {
    match build_schur(n) {
        Ok(s) => {
            let csv = s.to_csv_string();
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, csv) {
                        eprintln!("failed to write {path:?}: {e}");
                        return ExitCode::from(EXIT_FAILURE);
                    }
                    println!("wrote S_{n} ({} x {}) to {path:?}", 1 << n, 1 << n);
                }
                None => print!("{csv}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
