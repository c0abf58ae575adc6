//! Command-line front end: seeded instance generation, per-suite
//! verification with machine-readable reports, and batch summaries.
//!
//! Exit codes: 0 all checks passed, 1 a check failed, 2 input or parse error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use gammadisc::asymptotics::{
    compute_q, fundamental_operators, is_pure, limit_rank, verify_decay, verify_fundamental,
};
use gammadisc::defaults;
use gammadisc::dilation::{canonical_extension, extension_identity_report, verify_equivalence};
use gammadisc::gamma::{random_gamma_tuple, GammaTuple, TupleKind};
use gammadisc::instance::InstanceFile;
use gammadisc::lifting::verify_lifting;
use gammadisc::matrixkit::{default_null_tol, op_norm};
use gammadisc::report::{CheckStatus, VerificationReport};
use gammadisc::toeplitz::{
    commutant, toeplitz_space, toeplitz_space_p_only, verify_projection,
    verify_symbol_correspondence,
};
use gammadisc::GammaError;

const SCHEMA: &str = "gammadisc/1";

#[derive(Parser)]
#[command(
    name = "gammadisc",
    version,
    about = "Operator tuples over the symmetrized polydisc: generation, extension, Toeplitz spaces, lifting, verification"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonOpts {
    /// Scale-free residual tolerance for checks and gates.
    #[arg(long, default_value_t = defaults::GATE_TOL)]
    tol: f64,
    /// Emit a JSON report on stdout instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance file and print its digest.
    Gen {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// normal-boundary | normal-interior | mixed-purity | ando2
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run verification suites against an instance file.
    Verify {
        path: PathBuf,
        /// Comma-separated subset of: thm1,thm2,lift,decay,fo,choi (default all).
        #[arg(long, value_delimiter = ',')]
        which: Vec<String>,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Asymptotic limit of the instance: rank, extremal eigenvalue, residual.
    Q {
        path: PathBuf,
        #[arg(long, default_value_t = defaults::MAX_DOUBLINGS)]
        max_doublings: usize,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Fundamental operators on the defect space of P.
    Fo {
        path: PathBuf,
        #[arg(long, default_value_t = defaults::DEFECT_RANK_TOL)]
        rank_tol: f64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Canonical extension summary with identity residuals.
    Extend {
        path: PathBuf,
        #[arg(long)]
        rank_tol: Option<f64>,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Dimensions of the Toeplitz spaces and commutants.
    Toeplitz {
        path: PathBuf,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Lift seeded random commutant elements and report norms.
    Lift {
        path: PathBuf,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 17)]
        seed: u64,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// One-line summary per instance file in a directory.
    Report {
        dir: PathBuf,
        #[arg(long, default_value_t = defaults::GATE_TOL)]
        tol: f64,
    },
}

#[derive(Serialize)]
struct FullReport<'a> {
    schema: &'static str,
    digest: String,
    global: &'static str,
    tolerance: f64,
    timings_ms: BTreeMap<String, f64>,
    checks: &'a [gammadisc::report::CheckRecord],
}

fn load(path: &Path, tol: f64) -> Result<(InstanceFile, GammaTuple), String> {
    let file = InstanceFile::load(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let tuple = file
        .to_tuple(tol)
        .map_err(|e| format!("{}: invariant rejected: {e}", path.display()))?;
    Ok((file, tuple))
}

fn print_report(
    file: &InstanceFile,
    report: &VerificationReport,
    tol: f64,
    timings_ms: BTreeMap<String, f64>,
    json: bool,
) {
    if json {
        let full = FullReport {
            schema: SCHEMA,
            digest: file.digest(),
            global: if report.passed() { "pass" } else { "fail" },
            tolerance: tol,
            timings_ms,
            checks: &report.checks,
        };
        println!("{}", serde_json::to_string_pretty(&full).expect("serializable"));
    } else {
        for c in &report.checks {
            let tag = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skip",
            };
            let detail = if c.details.is_empty() {
                String::new()
            } else {
                format!("  [{}]", c.details)
            };
            println!("{tag}  {:<55} residual {:.3e}{detail}", c.name, c.residual);
        }
        println!(
            "overall: {} ({} checks, {} failed)",
            if report.passed() { "pass" } else { "fail" },
            report.checks.len(),
            report.failures()
        );
    }
}

fn run_suites(
    tuple: &GammaTuple,
    which: &[String],
    tol: f64,
    seed: u64,
) -> Result<(VerificationReport, BTreeMap<String, f64>), String> {
    let all = ["thm1", "thm2", "lift", "decay", "fo", "choi"];
    let selected: Vec<String> = if which.is_empty() {
        all.iter().map(|s| s.to_string()).collect()
    } else {
        which.to_vec()
    };
    let mut report = VerificationReport::new();
    let mut timings = BTreeMap::new();
    for suite in &selected {
        let start = Instant::now();
        let part = match suite.as_str() {
            "thm1" => verify_equivalence(tuple, tol),
            "thm2" => verify_symbol_correspondence(tuple, tol.max(1e-7)),
            "lift" => verify_lifting(tuple, 5, seed, tol),
            "decay" => verify_decay(tuple, 200, tol),
            "fo" => verify_fundamental(tuple, defaults::DEFECT_RANK_TOL, tol),
            "choi" => verify_projection(tuple.p(), 50, seed, tol),
            other => return Err(format!("unknown suite '{other}' (expected one of {all:?})")),
        };
        timings.insert(suite.clone(), start.elapsed().as_secs_f64() * 1e3);
        report.merge(part.prefixed(suite));
    }
    Ok((report, timings))
}

fn cmd_gen(d: usize, n: usize, kind: &str, seed: u64, out: &Path) -> Result<(), (u8, String)> {
    let kind: TupleKind = kind.parse().map_err(|e| (2u8, format!("{e}")))?;
    let tuple = random_gamma_tuple(d, n, kind, seed).map_err(|e| (2u8, format!("{e}")))?;
    let file = InstanceFile::from_tuple_with_seed(&tuple, seed);
    file.save(out).map_err(|e| (2u8, format!("{e}")))?;
    println!("{}  {}", file.digest(), out.display());
    Ok(())
}

fn cmd_report(dir: &Path, tol: f64) -> Result<u8, (u8, String)> {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| (2u8, format!("{}: {e}", dir.display())))?
        .filter_map(|r| r.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
        .collect();
    entries.sort();
    println!(
        "{:<28} {:>2} {:>3} {:>6} {:>8} {:>9}  status",
        "file", "d", "n", "rankQ", "dimToep", "dimComm"
    );
    let mut parse_errors = 0usize;
    let mut check_failures = 0usize;
    let mut passes = 0usize;
    for path in &entries {
        let name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match load(path, tol) {
            Ok((_, tuple)) => {
                let n = tuple.n();
                let dim_toep = toeplitz_space(&tuple, default_null_tol(n)).dim();
                let row = match canonical_extension(&tuple, defaults::q_rank_tol(n)) {
                    Ok(ext) => {
                        let dim_comm = commutant(&ext.members(), default_null_tol(ext.rank))
                            .map(|cb| cb.dim())
                            .unwrap_or(0);
                        let ok = dim_comm == dim_toep;
                        (ext.rank.to_string(), dim_comm.to_string(), ok)
                    }
                    Err(GammaError::PureTuple) => ("0".into(), "-".into(), dim_toep == 0),
                    Err(e) => {
                        check_failures += 1;
                        println!(
                            "{name:<28} {:>2} {n:>3} {:>6} {dim_toep:>8} {:>9}  error: {e}",
                            tuple.d(),
                            "?",
                            "?"
                        );
                        continue;
                    }
                };
                let status = if row.2 { "ok" } else { "mismatch" };
                if row.2 {
                    passes += 1;
                } else {
                    check_failures += 1;
                }
                println!(
                    "{name:<28} {:>2} {n:>3} {:>6} {dim_toep:>8} {:>9}  {status}",
                    tuple.d(),
                    row.0,
                    row.1
                );
            }
            Err(msg) => {
                parse_errors += 1;
                println!("{name:<28}  -   -      -        -         -  parse-error: {msg}");
            }
        }
    }
    println!(
        "{} instances: {} ok, {} failed, {} unparsable",
        entries.len(),
        passes,
        check_failures,
        parse_errors
    );
    if parse_errors > 0 {
        Ok(2)
    } else if check_failures > 0 {
        Ok(1)
    } else {
        Ok(0)
    }
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Gen { d, n, kind, seed, out } => {
            cmd_gen(d, n, &kind, seed, &out)?;
            Ok(0)
        }
        Cmd::Verify { path, which, seed, common } => {
            let (file, tuple) = load(&path, common.tol).map_err(|m| (2u8, m))?;
            let (report, timings) =
                run_suites(&tuple, &which, common.tol, seed).map_err(|m| (2u8, m))?;
            print_report(&file, &report, common.tol, timings, common.json);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Cmd::Q { path, max_doublings, common } => {
            let (file, tuple) = load(&path, common.tol).map_err(|m| (2u8, m))?;
            let al = compute_q(&tuple, defaults::CONV_TOL, max_doublings)
                .map_err(|e| (1u8, format!("{e}")))?;
            let rank = limit_rank(&al.q, defaults::q_rank_tol(tuple.n()), defaults::PURE_TOL)
                .map_err(|e| (1u8, format!("{e}")))?;
            let pure = is_pure(&tuple, common.tol).map_err(|e| (1u8, format!("{e}")))?;
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": SCHEMA,
                        "digest": file.digest(),
                        "rank": rank,
                        "lambda_max": op_norm(&al.q),
                        "iterations": al.iterations,
                        "residual": al.residual,
                        "pure": pure,
                    })
                );
            } else {
                println!(
                    "rank {} of {}, lambda_max {:.6e}, {} doublings, residual {:.3e}, pure: {}",
                    rank,
                    tuple.n(),
                    op_norm(&al.q),
                    al.iterations,
                    al.residual,
                    pure
                );
            }
            Ok(0)
        }
        Cmd::Fo { path, rank_tol, common } => {
            let (file, tuple) = load(&path, common.tol).map_err(|m| (2u8, m))?;
            let fo = fundamental_operators(&tuple, rank_tol).map_err(|e| (1u8, format!("{e}")))?;
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": SCHEMA,
                        "digest": file.digest(),
                        "defect_rank": fo.defect_rank(),
                        "residuals": fo.residuals,
                    })
                );
            } else {
                println!("defect rank {}", fo.defect_rank());
                for (i, r) in fo.residuals.iter().enumerate() {
                    println!("residual of the index-{} defect identity: {r:.3e}", i + 1);
                }
            }
            Ok(0)
        }
        Cmd::Extend { path, rank_tol, common } => {
            let (file, tuple) = load(&path, common.tol).map_err(|m| (2u8, m))?;
            let rank_tol = rank_tol.unwrap_or_else(|| defaults::q_rank_tol(tuple.n()));
            let ext = canonical_extension(&tuple, rank_tol).map_err(|e| (1u8, format!("{e}")))?;
            let report = extension_identity_report(&ext, common.tol);
            if !common.json {
                println!("extension rank {} over source dimension {}", ext.rank, tuple.n());
            }
            print_report(&file, &report, common.tol, BTreeMap::new(), common.json);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Cmd::Toeplitz { path, common } => {
            let (file, tuple) = load(&path, common.tol).map_err(|m| (2u8, m))?;
            let n = tuple.n();
            let dim_toep = toeplitz_space(&tuple, default_null_tol(n)).dim();
            let dim_p = toeplitz_space_p_only(tuple.p(), default_null_tol(n)).dim();
            let (rank_q, dim_comm) = match canonical_extension(&tuple, defaults::q_rank_tol(n)) {
                Ok(ext) => (
                    ext.rank,
                    Some(
                        commutant(&ext.members(), default_null_tol(ext.rank))
                            .map_err(|e| (1u8, format!("{e}")))?
                            .dim(),
                    ),
                ),
                Err(GammaError::PureTuple) => (0, None),
                Err(e) => return Err((1u8, format!("{e}"))),
            };
            if common.json {
                println!(
                    "{}",
                    serde_json::json!({
                        "schema": SCHEMA,
                        "digest": file.digest(),
                        "dim_toeplitz": dim_toep,
                        "dim_toeplitz_p": dim_p,
                        "rank_q": rank_q,
                        "dim_extension_commutant": dim_comm,
                    })
                );
            } else {
                println!(
                    "dim of the relation space {dim_toep}, fixed points of the P-conjugation {dim_p}, rank Q {rank_q}, extension commutant {}",
                    dim_comm.map_or("-".into(), |d| d.to_string())
                );
            }
            Ok(0)
        }
        Cmd::Lift { path, samples, seed, common } => {
            let (file, tuple) = load(&path, common.tol).map_err(|m| (2u8, m))?;
            let report = verify_lifting(&tuple, samples, seed, common.tol);
            print_report(&file, &report, common.tol, BTreeMap::new(), common.json);
            Ok(if report.passed() { 0 } else { 1 })
        }
        Cmd::Report { dir, tol } => cmd_report(&dir, tol),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
