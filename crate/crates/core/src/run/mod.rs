//! Run orchestration: configuration, artifacts and the solve, sweep and
//! certify pipeline behind the command line.

pub mod config;
pub mod io;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::incremental::EstimateConstants;
use crate::ledger::Ledger;
use crate::viscosity::{certify, sweep, SweepResult};

pub use config::{parse, InlineProblem, Problem, ProblemSource, RunConfig, Tolerances};
pub use report::{CertificateSummary, LevelSummary, Report, SweepSummary};

pub const EXIT_OK: i32 = 0;
/// A gating inequality or certificate failed.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_CONFIG: i32 = 2;
pub const EXIT_SOLVER_STALL: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_IO: i32 = 5;
/// Invalid model data or a numerical breakdown outside the inner solver.
pub const EXIT_NUMERICAL: i32 = 6;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config { .. } | Error::UnknownScenario(_) => EXIT_BAD_CONFIG,
        Error::InnerSolverStalled { .. }
        | Error::LineSearchFailure { .. }
        | Error::ProjectionNotConverged { .. } => EXIT_SOLVER_STALL,
        Error::SweepNotConverged(_) => EXIT_NOT_CONVERGED,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_NUMERICAL,
    }
}

/// Structured record of a failed run, written to `error.json`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

impl ErrorRecord {
    pub fn new(e: &Error) -> Self {
        let kind = format!("{e:?}");
        let kind = kind
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string();
        Self {
            kind,
            message: e.to_string(),
            exit_code: exit_code(e),
            line: match e {
                Error::Config { line, .. } => Some(*line),
                _ => None,
            },
        }
    }
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// `None` for certify-only runs.
    pub sweep: Option<SweepResult>,
    pub out: PathBuf,
    pub error: Option<ErrorRecord>,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        self.report.exit_code
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

/// Writes `error.json` into the output directory when possible.
pub fn record_error(out: &Path, e: &Error) -> ErrorRecord {
    let rec = ErrorRecord::new(e);
    if prepare_out(out).is_ok() {
        let _ = io::write_json(&out.join("error.json"), &rec);
    }
    rec
}

/// Full pipeline: per-viscosity solves, ledgers, reparameterization, sweep and
/// certificates, with all artifacts written to `config.out`.
///
/// Configuration and solver failures come back as `Err`; a completed sweep
/// that fails a check or does not converge returns its report with the
/// corresponding exit code.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let problem = config.problem()?;
    let opts = config.sweep_options(&problem)?;
    let out = config.out.clone();
    prepare_out(&out)?;
    let result = sweep(&problem.system, &problem.z0, &opts)?;

    let system = &problem.system;
    for l in &result.levels {
        let tag = io::eps_tag(l.eps);
        io::write_trajectory_csv(
            &out.join(format!("trajectory_{tag}.csv")),
            system,
            &l.trajectory,
        )?;
        io::write_curve_csv(&out.join(format!("curve_{tag}.csv")), &l.curve, &l.fields)?;
    }
    let limit = result.limit();
    io::write_curve_csv(&out.join("limit_curve.csv"), &limit.curve, &limit.fields)?;

    let ledgers: Vec<LevelLedger> = result
        .levels
        .iter()
        .map(|l| LevelLedger {
            eps: l.eps,
            constants: l.constants,
            ledger: l.ledger.clone(),
        })
        .collect();
    io::write_json(&out.join("ledger.json"), &ledgers)?;
    let certs: Vec<CertificateSummary> = result
        .levels
        .iter()
        .map(|l| CertificateSummary::new(&l.certificates))
        .collect();
    io::write_json(&out.join("certificates.json"), &certs)?;

    let (entries, level_pass) = report::sweep_entries(system, &result, &config.tolerances);
    let pass = entries.iter().all(|e| e.pass || !e.gating);
    let mut error = None;
    let exit_code = if !result.converged {
        let e = Error::SweepNotConverged(format!(
            "Cauchy differences do not decrease at the finest level ({:?})",
            result.cauchy.iter().map(|c| c.z_sup).collect::<Vec<_>>()
        ));
        error = Some(record_error(&out, &e));
        EXIT_NOT_CONVERGED
    } else if pass {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    };
    let report = Report {
        problem: problem.name.clone(),
        dim: system.dim(),
        seed: config.seed,
        pass,
        exit_code,
        levels: result
            .levels
            .iter()
            .zip(&level_pass)
            .map(|(l, p)| report::level_summary(system, l, *p))
            .collect(),
        sweep: Some(SweepSummary {
            cauchy: result.cauchy.clone(),
            convergent_from: result.convergent_from,
            converged: result.converged,
            resample_points: result.resample_points,
            lengths: result.lengths.clone(),
            lengths_monotone: result.lengths_monotone,
            extrapolated_final_state: result.extrapolated_final_state.clone(),
        }),
        entries,
    };
    io::write_json(&out.join("report.json"), &report)?;
    Ok(RunOutcome {
        report,
        sweep: Some(result),
        out,
        error,
    })
}

#[derive(Serialize)]
struct LevelLedger {
    eps: f64,
    constants: EstimateConstants,
    ledger: Ledger,
}

/// Recomputes the certificates of a stored curve for the configured problem.
pub fn certify_only(config: &RunConfig, curve_path: &Path) -> Result<RunOutcome> {
    let problem = config.problem()?;
    let opts = config.sweep_options(&problem)?;
    let curve = io::read_curve_csv(curve_path)?;
    let (certs, fields) = certify(&problem.system, &curve, &opts.certify)?;
    let entries = report::certificate_entries(
        &problem.system,
        &curve,
        &fields,
        &certs,
        &config.tolerances,
        true,
    );
    let pass = entries.iter().all(|e| e.pass || !e.gating);
    let out = config.out.clone();
    prepare_out(&out)?;
    io::write_json(
        &out.join("certificates.json"),
        &[CertificateSummary::new(&certs)],
    )?;
    let report = Report {
        problem: problem.name,
        dim: problem.system.dim(),
        seed: config.seed,
        pass,
        exit_code: if pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        levels: Vec::new(),
        sweep: None,
        entries,
    };
    io::write_json(&out.join("report.json"), &report)?;
    Ok(RunOutcome {
        report,
        sweep: None,
        out,
        error: None,
    })
}
