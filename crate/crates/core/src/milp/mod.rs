//! Mixed-integer models of the problem: a completion-time formulation (with
//! optional valid inequalities), a time-indexed formulation, LP export,
//! feasibility checks of schedules against the models, and an external
//! solver bridge.

mod cf;
mod external;
mod model;
mod tif;

pub use cf::{build_cf, cf_size, check_cf, check_cf_plus};
pub use external::{solve_external, solve_external_with, ExternalSolution, SolveStatus, SolverBridge, TextBridge};
pub use model::{export_lp, Constraint, DummyJobView, MilpModel, RowViolation, Sense, VarKind, Variable};
pub use tif::{build_tif, check_tif, default_horizon, tif_binaries};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};

/// The model variants that can be exported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formulation {
    Cf,
    /// Completion-time model with workload and symmetry-breaking rows.
    CfPlus,
    /// Time-indexed model with the serial-schedule horizon.
    Tif,
    /// Time-indexed model with a caller-supplied horizon.
    TifPlus,
}

impl Formulation {
    pub fn name(self) -> &'static str {
        match self {
            Formulation::Cf => "cf",
            Formulation::CfPlus => "cf+",
            Formulation::Tif => "tif",
            Formulation::TifPlus => "tif+",
        }
    }

    /// Builds the model. `horizon` is required for [`Formulation::TifPlus`]
    /// and ignored by the completion-time variants.
    pub fn build(self, instance: &Instance, horizon: Option<Time>) -> Result<MilpModel> {
        match self {
            Formulation::Cf => Ok(build_cf(instance, false)),
            Formulation::CfPlus => Ok(build_cf(instance, true)),
            Formulation::Tif => build_tif(instance, None),
            Formulation::TifPlus => {
                let h = horizon.ok_or_else(|| Error::invalid("tif+ needs a horizon"))?;
                build_tif(instance, Some(h))
            }
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cf" => Ok(Formulation::Cf),
            "cf+" | "cfplus" | "cf_plus" => Ok(Formulation::CfPlus),
            "tif" => Ok(Formulation::Tif),
            "tif+" | "tifplus" | "tif_plus" => Ok(Formulation::TifPlus),
            _ => Err(Error::invalid(format!(
                "unknown formulation {s:?} (expected cf, cf+, tif or tif+)"
            ))),
        }
    }
}
