//! Bridge to an external MILP solver run as a subprocess.
//!
//! The default [`TextBridge`] protocol: the solver is invoked as
//! `solver <model.lp> --time-limit=<seconds>` and must write `<model.sol>`
//! next to the model. The solution file is line-oriented:
//!
//! ```text
//! status optimal        (optimal | feasible | timeout | infeasible)
//! objective 17
//! bound 17              (optional)
//! x_1_1 1               (one `<name> <value>` line per variable)
//! ```
//!
//! Other solvers plug in through [`SolverBridge`].

use std::collections::BTreeMap;
use std::io::ErrorKind;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::model::{export_lp, MilpModel};
use crate::error::{Error, Result};

/// Extra wall time granted to the solver beyond its own limit before it is killed.
const KILL_GRACE: Duration = Duration::from_secs(30);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Stopped with an incumbent that is not proven optimal.
    Feasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExternalSolution {
    pub status: SolveStatus,
    pub objective: f64,
    /// Best proven lower bound, when the solver reports one.
    pub bound: Option<f64>,
    pub values: BTreeMap<String, f64>,
}

pub trait SolverBridge {
    fn command(&self, solver: &str, lp_path: &Path, solution_path: &Path, time_limit: Duration) -> Command;

    /// `Ok(None)` means the solver ran out of time without a solution.
    fn parse_solution(&self, text: &str) -> Result<Option<ExternalSolution>>;
}

/// The line-oriented protocol described in the module documentation.
#[derive(Debug, Clone, Copy, Default)]
pub struct TextBridge;

impl SolverBridge for TextBridge {
    fn command(&self, solver: &str, lp_path: &Path, _solution_path: &Path, time_limit: Duration) -> Command {
        let mut cmd = Command::new(solver);
        cmd.arg(lp_path)
            .arg(format!("--time-limit={}", time_limit.as_secs_f64()));
        cmd
    }

    fn parse_solution(&self, text: &str) -> Result<Option<ExternalSolution>> {
        let protocol = |message: String| Error::Protocol {
            message,
            raw: text.to_string(),
        };
        let mut status = None;
        let mut objective = None;
        let mut bound = None;
        let mut values = BTreeMap::new();
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (Some(key), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(protocol(format!("line {}: expected `<name> <value>`", number + 1)));
            };
            if key == "status" {
                status = Some(value.to_ascii_lowercase());
                continue;
            }
            let number_value: f64 = value
                .parse()
                .map_err(|_| protocol(format!("line {}: {value:?} is not a number", number + 1)))?;
            match key {
                "objective" => objective = Some(number_value),
                "bound" => bound = Some(number_value),
                _ => {
                    values.insert(key.to_string(), number_value);
                }
            }
        }
        let status = match status.as_deref() {
            Some("optimal") => SolveStatus::Optimal,
            Some("feasible") => SolveStatus::Feasible,
            Some("timeout") if objective.is_none() => return Ok(None),
            Some("timeout") => SolveStatus::Feasible,
            Some("infeasible") => return Err(protocol("solver reports the model infeasible".into())),
            Some(other) => return Err(protocol(format!("unknown status {other:?}"))),
            None => return Err(protocol("missing status line".into())),
        };
        let objective = objective.ok_or_else(|| protocol("missing objective line".into()))?;
        Ok(Some(ExternalSolution {
            status,
            objective,
            bound,
            values,
        }))
    }
}

/// Solves `model` with an external solver using the [`TextBridge`] protocol.
pub fn solve_external(model: &MilpModel, solver: &str, time_limit: Duration) -> Result<Option<ExternalSolution>> {
    solve_external_with(model, solver, time_limit, &TextBridge)
}

pub fn solve_external_with(
    model: &MilpModel,
    solver: &str,
    time_limit: Duration,
    bridge: &dyn SolverBridge,
) -> Result<Option<ExternalSolution>> {
    let dir = tempfile::tempdir().map_err(|e| Error::Environment(format!("cannot create temp dir: {e}")))?;
    let lp_path = dir.path().join("model.lp");
    let solution_path = dir.path().join("model.sol");
    std::fs::write(&lp_path, export_lp(model)).map_err(|e| Error::io(&lp_path, e))?;

    let mut child = bridge
        .command(solver, &lp_path, &solution_path, time_limit)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| match e.kind() {
            ErrorKind::NotFound => Error::Environment(format!("solver {solver:?} not found")),
            _ => Error::Environment(format!("cannot start solver {solver:?}: {e}")),
        })?;

    let deadline = Instant::now() + time_limit + KILL_GRACE;
    while child
        .try_wait()
        .map_err(|e| Error::Environment(format!("waiting for solver: {e}")))?
        .is_none()
    {
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(None);
        }
        thread::sleep(Duration::from_millis(20));
    }
    let output = child
        .wait_with_output()
        .map_err(|e| Error::Environment(format!("collecting solver output: {e}")))?;
    let console = format!(
        "{}{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    if !output.status.success() {
        return Err(Error::Protocol {
            message: format!("solver exited with {}", output.status),
            raw: console,
        });
    }
    let text = std::fs::read_to_string(&solution_path).map_err(|e| Error::Protocol {
        message: format!("no solution file at {}: {e}", solution_path.display()),
        raw: console,
    })?;
    bridge.parse_solution(&text)
}
