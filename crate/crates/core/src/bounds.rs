//! Lower bounds, machine idle times and polynomially solvable special cases.

use std::fmt;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::schedule::{validate, Schedule, MACHINES};

/// An exact multiple of one half, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfTime(i64);

impl HalfTime {
    pub fn from_twice(twice: i64) -> Self {
        HalfTime(twice)
    }

    pub fn from_time(t: Time) -> Self {
        HalfTime(2 * t)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    /// Smallest integer not below this value.
    pub fn ceil(self) -> Time {
        self.0.div_euclid(2) + self.0.rem_euclid(2)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            let sign = if self.0 < 0 { "-" } else { "" };
            write!(f, "{sign}{}.5", self.0.abs() / 2)
        }
    }
}

/// `(min s + Σ A + min t) / 2`: both machines are busy for at least the total
/// job length, one of them cannot start before the first loading ends and one
/// of them idles during the last unloading.
pub fn lb1(instance: &Instance) -> HalfTime {
    let jobs = instance.jobs();
    let min_s = jobs.iter().map(|j| j.loading).min().unwrap_or(0);
    let min_t = jobs.iter().map(|j| j.unloading).min().unwrap_or(0);
    HalfTime::from_twice(min_s + instance.total_length() + min_t)
}

/// `Σ (s + t)`: the server performs every loading and unloading sequentially.
pub fn lb2(instance: &Instance) -> Time {
    instance.jobs().iter().map(|j| j.server_time()).sum()
}

/// `max(lb1, lb2)`.
pub fn lb_t(instance: &Instance) -> HalfTime {
    lb1(instance).max(HalfTime::from_time(lb2(instance)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdleTimes {
    pub per_machine: [Time; MACHINES],
    pub total: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundReport {
    pub lb1: HalfTime,
    pub lb2: Time,
    pub lb_t: HalfTime,
    pub idle: Option<IdleTimes>,
}

impl BoundReport {
    pub fn new(instance: &Instance) -> Self {
        let lb1 = lb1(instance);
        let lb2 = lb2(instance);
        BoundReport {
            lb1,
            lb2,
            lb_t: lb1.max(HalfTime::from_time(lb2)),
            idle: None,
        }
    }

    pub fn with_schedule(instance: &Instance, schedule: &Schedule) -> Result<Self> {
        let mut report = BoundReport::new(instance);
        report.idle = Some(idle_times(instance, schedule)?);
        Ok(report)
    }
}

/// Per-machine idle `C_max − Σ_{j on k} A_j` and their total, which always
/// equals `2·C_max − Σ A_j`.
pub fn idle_times(instance: &Instance, schedule: &Schedule) -> Result<IdleTimes> {
    let violations = validate(instance, schedule);
    if let Some(first) = violations.first() {
        return Err(Error::invalid(format!(
            "schedule is infeasible ({} violations, first: {first})",
            violations.len()
        )));
    }
    let mut loaded = [0; MACHINES];
    for job in instance.jobs() {
        loaded[schedule.machine[job.id]] += job.length();
    }
    let per_machine = loaded.map(|l| schedule.makespan - l);
    Ok(IdleTimes {
        per_machine,
        total: per_machine.iter().sum(),
    })
}

/// Special structures where every permutation decodes to an optimal schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolynomialCase {
    /// `s_i = p_j` and `p_i = t_j` for all `i, j`: every phase of every job
    /// has the same length and jobs alternate between the machines.
    UniformPhases,
    /// `p_j < s_i` for all `i, j`: no loading fits inside another job's
    /// processing, so jobs run back to back.
    ShortProcessing,
    /// `s_i ≤ p_j` and `p_i < t_j` for all `i, j`: a second job could load
    /// during processing but could never finish or unload around the first
    /// one's unloading, so jobs run back to back.
    LongUnloading,
}

impl PolynomialCase {
    pub fn name(self) -> &'static str {
        match self {
            PolynomialCase::UniformPhases => "uniform-phases",
            PolynomialCase::ShortProcessing => "short-processing",
            PolynomialCase::LongUnloading => "long-unloading",
        }
    }
}

impl fmt::Display for PolynomialCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Recognized {
    pub case: PolynomialCase,
    pub optimal_makespan: Time,
}

/// Checks the special cases in the fixed order uniform → short processing →
/// long unloading and returns the first match with its optimal makespan.
///
/// For uniform phases of length `c` the server is saturated when `n` is even,
/// giving `Σ (s + t) = 2nc`. With odd `n` the jobs cannot pair up: the last job
/// loads only after the previous unloading and the optimum is `(2n + 1)c`.
pub fn recognize_polynomial_case(instance: &Instance) -> Option<Recognized> {
    let jobs = instance.jobs();
    let (min_s, max_s) = min_max(jobs.iter().map(|j| j.loading));
    let (min_p, max_p) = min_max(jobs.iter().map(|j| j.processing));
    let (min_t, max_t) = min_max(jobs.iter().map(|j| j.unloading));

    // ∀i,j s_i = p_j and p_i = t_j collapses to one shared constant.
    if min_s == max_s && min_p == max_p && min_t == max_t && max_s == min_p && max_p == min_t {
        let c = min_s;
        let extra = if instance.n() % 2 == 1 { c } else { 0 };
        return Some(Recognized {
            case: PolynomialCase::UniformPhases,
            optimal_makespan: lb2(instance) + extra,
        });
    }
    if max_p < min_s {
        return Some(Recognized {
            case: PolynomialCase::ShortProcessing,
            optimal_makespan: instance.total_length(),
        });
    }
    if max_s <= min_p && max_p < min_t {
        return Some(Recognized {
            case: PolynomialCase::LongUnloading,
            optimal_makespan: instance.total_length(),
        });
    }
    None
}

fn min_max(values: impl Iterator<Item = Time>) -> (Time, Time) {
    values.fold((Time::MAX, Time::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}
