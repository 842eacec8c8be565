//! Solver backends: the built-in DPLL and external DIMACS solvers.

use std::io::Write as _;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;

use super::dimacs::emit_dimacs;
use super::dpll::{self, DpllOutcome};
use super::CnfInstance;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverBackend {
    /// The in-process DPLL; adequate for small instances and the test
    /// suite.
    Builtin,
    /// An external solver invoked as `<command...> <dimacs-path>`, reporting
    /// through the standard competition output (`s` and `v` lines).
    External { command: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Sat,
    Unsat,
    /// Timeout or an inconclusive solver answer.
    Unknown,
}

impl SolverStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Sat => "sat",
            SolverStatus::Unsat => "unsat",
            SolverStatus::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolverStats {
    pub wall: Duration,
    pub variables: u32,
    pub clauses: usize,
}

/// Outcome of one solver call. `model` is present exactly when the status
/// is [`SolverStatus::Sat`]; it covers every variable, atlas prefix first.
#[derive(Debug, Clone)]
pub struct SolverVerdict {
    pub status: SolverStatus,
    pub model: Option<Vec<bool>>,
    pub stats: SolverStats,
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("failed to run solver \"{command}\": {source}")]
    Spawn {
        command: String,
        #[source]
        source: std::io::Error,
    },
    #[error("could not write DIMACS input: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver produced no \"s\" status line")]
    MissingStatus,
    #[error("unparseable solver output: {0}")]
    GarbledOutput(String),
    #[error("solver claimed sat but its model violates clause {clause:?}")]
    ModelValidation { clause: Vec<i32> },
}

/// Runs a backend on an instance. A satisfiable verdict is only returned
/// after the model has been checked against every clause in-process.
pub fn solve(
    cnf: &CnfInstance,
    backend: &SolverBackend,
    timeout: Option<Duration>,
) -> Result<SolverVerdict, SolverError> {
    let start = Instant::now();
    let (status, model) = match backend {
        SolverBackend::Builtin => match dpll::solve(cnf, timeout) {
            DpllOutcome::Sat(model) => (SolverStatus::Sat, Some(model)),
            DpllOutcome::Unsat => (SolverStatus::Unsat, None),
            DpllOutcome::Unknown => (SolverStatus::Unknown, None),
        },
        SolverBackend::External { command } => run_external(cnf, command, timeout)?,
    };
    if let Some(model) = &model {
        if let Some(clause) = violated_clause(cnf, model) {
            return Err(SolverError::ModelValidation { clause: clause.clone() });
        }
    }
    let stats =
        SolverStats { wall: start.elapsed(), variables: cnf.var_count, clauses: cnf.clauses.len() };
    Ok(SolverVerdict { status, model, stats })
}

fn violated_clause<'a>(cnf: &'a CnfInstance, model: &[bool]) -> Option<&'a Vec<i32>> {
    cnf.clauses.iter().find(|clause| {
        !clause.iter().any(|&lit| {
            let value = model[(lit.unsigned_abs() as usize) - 1];
            (lit > 0) == value
        })
    })
}

fn run_external(
    cnf: &CnfInstance,
    command: &str,
    timeout: Option<Duration>,
) -> Result<(SolverStatus, Option<Vec<bool>>), SolverError> {
    let mut file = tempfile::Builder::new()
        .prefix("ctlsynth-")
        .suffix(".cnf")
        .tempfile()?;
    file.write_all(emit_dimacs(cnf).as_bytes())?;
    file.flush()?;

    let mut parts = command.split_whitespace();
    let program = parts.next().ok_or_else(|| SolverError::Spawn {
        command: command.to_string(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty solver command"),
    })?;
    let mut child = Command::new(program)
        .args(parts)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| SolverError::Spawn { command: command.to_string(), source })?;

    let deadline = timeout.map(|t| Instant::now() + t);
    let mut stdout = child.stdout.take().expect("stdout was piped");
    // Read concurrently so a chatty solver cannot fill the pipe and stall.
    let reader = std::thread::spawn(move || {
        use std::io::Read as _;
        let mut buf = Vec::new();
        let _ = stdout.read_to_end(&mut buf);
        buf
    });
    loop {
        if let Some(status) = child.try_wait()? {
            let _ = status; // exit status is deliberately ignored
            break;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            let _ = reader.join();
            return Ok((SolverStatus::Unknown, None));
        }
        std::thread::sleep(Duration::from_millis(2));
    }
    let output = reader.join().unwrap_or_default();
    let text = String::from_utf8(output)
        .map_err(|_| SolverError::GarbledOutput("non-UTF-8 solver output".into()))?;
    parse_solver_output(&text, cnf.var_count)
}

/// Parses competition-style output: one `s` line for the status and, for
/// satisfiable instances, `v` lines listing a model terminated by 0.
pub fn parse_solver_output(
    text: &str,
    var_count: u32,
) -> Result<(SolverStatus, Option<Vec<bool>>), SolverError> {
    let mut status = None;
    let mut literals: Vec<i32> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => SolverStatus::Sat,
                "UNSATISFIABLE" => SolverStatus::Unsat,
                "UNKNOWN" => SolverStatus::Unknown,
                other => {
                    return Err(SolverError::GarbledOutput(format!("status line \"s {other}\"")))
                }
            });
        } else if let Some(rest) = line.strip_prefix('v') {
            for tok in rest.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| {
                    SolverError::GarbledOutput(format!("bad literal \"{tok}\" in v line"))
                })?;
                if lit != 0 {
                    literals.push(lit);
                }
            }
        }
    }
    match status {
        None => Err(SolverError::MissingStatus),
        Some(SolverStatus::Sat) => {
            let mut model = vec![false; var_count as usize];
            for lit in literals {
                let var = lit.unsigned_abs();
                if var == 0 || var > var_count {
                    return Err(SolverError::GarbledOutput(format!(
                        "model literal {lit} out of range"
                    )));
                }
                model[var as usize - 1] = lit > 0;
            }
            Ok((SolverStatus::Sat, Some(model)))
        }
        Some(other) => Ok((other, None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(var_count: u32, clauses: Vec<Vec<i32>>) -> CnfInstance {
        CnfInstance { var_count, atlas_vars: var_count, clauses }
    }

    #[test]
    fn builtin_sat_with_validated_model() {
        let verdict = solve(&cnf(1, vec![vec![1]]), &SolverBackend::Builtin, None).unwrap();
        assert_eq!(verdict.status, SolverStatus::Sat);
        assert_eq!(verdict.model, Some(vec![true]));
    }

    #[test]
    fn builtin_unsat_has_no_model() {
        let verdict =
            solve(&cnf(1, vec![vec![1], vec![-1]]), &SolverBackend::Builtin, None).unwrap();
        assert_eq!(verdict.status, SolverStatus::Unsat);
        assert!(verdict.model.is_none());
    }

    #[test]
    fn output_parser_reads_status_and_model() {
        let (status, model) =
            parse_solver_output("c comment\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(status, SolverStatus::Sat);
        assert_eq!(model, Some(vec![true, false, true]));
        let (status, model) = parse_solver_output("s UNSATISFIABLE\n", 3).unwrap();
        assert_eq!(status, SolverStatus::Unsat);
        assert!(model.is_none());
    }

    #[test]
    fn garbled_output_is_an_error_not_unsat() {
        assert!(matches!(
            parse_solver_output("segmentation fault\n", 1),
            Err(SolverError::MissingStatus)
        ));
        assert!(matches!(
            parse_solver_output("s MAYBE\n", 1),
            Err(SolverError::GarbledOutput(_))
        ));
    }
}
