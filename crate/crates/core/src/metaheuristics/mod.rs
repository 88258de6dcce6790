//! Time-budgeted metaheuristics: general variable neighborhood search (two
//! starting strategies) and GRASP.
//!
//! The budget is checked between descent calls, never inside one, so a run
//! may overshoot `time_limit` by at most one shake + descent (or one
//! construction + descent). Runs with the same seed and configuration replay
//! exactly under [`ClockMode::Virtual`]; under [`ClockMode::Wall`] the number
//! of iterations depends on machine speed.

mod grasp;
mod gvns;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

pub use grasp::{grasp, grc};
pub use gvns::{gvns, shake};

use crate::bounds::lb_t;
use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::permutation::Permutation;
use crate::schedule::Evaluator;

/// Diversification depth used when none is configured.
pub const DEFAULT_K_MAX: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaMode {
    Fixed(f64),
    /// Draw `α ~ U[0, 1)` for every construction.
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InitialSolution {
    /// Iterative improvement applied to the identity permutation.
    IterativeImprovement,
    /// A uniformly random permutation.
    Random,
}

/// How elapsed time is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClockMode {
    /// Monotonic wall-clock time.
    Wall,
    /// Deterministic time: decoded permutations divided by a fixed rate.
    Virtual { evaluations_per_second: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub time_limit: Duration,
    pub k_max: usize,
    pub alpha: AlphaMode,
    pub seed: u64,
    pub initial: InitialSolution,
    pub clock: ClockMode,
    /// Stop as soon as the incumbent reaches this makespan.
    pub target: Option<Time>,
    /// Stop when the incumbent meets the rounded-up lower bound, i.e. is provably optimal.
    pub stop_at_lower_bound: bool,
    pub record_trace: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            time_limit: Duration::from_secs(10),
            k_max: DEFAULT_K_MAX,
            alpha: AlphaMode::Uniform,
            seed: 0,
            initial: InitialSolution::IterativeImprovement,
            clock: ClockMode::Wall,
            target: None,
            stop_at_lower_bound: true,
            record_trace: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.time_limit.is_zero() {
            return Err(Error::invalid("time limit must be positive"));
        }
        if self.k_max == 0 {
            return Err(Error::invalid("k_max must be at least 1"));
        }
        if let AlphaMode::Fixed(a) = self.alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::invalid(format!("alpha must lie in [0, 1], got {a}")));
            }
        }
        if let ClockMode::Virtual {
            evaluations_per_second: 0,
        } = self.clock
        {
            return Err(Error::invalid("virtual clock rate must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub elapsed: f64,
    pub makespan: Time,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best: Permutation,
    pub makespan: Time,
    /// Seconds from the start of the run until `best` was first reached.
    pub time_to_best: f64,
    /// Number of descent calls.
    pub iterations: u64,
    pub evaluations: u64,
    /// Improvements of the incumbent, strictly decreasing in makespan.
    pub trace: Vec<TracePoint>,
}

impl SearchResult {
    /// `elapsed_seconds,makespan` rows with a header line.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("elapsed_seconds,makespan\n");
        for p in &self.trace {
            out.push_str(&format!("{:.6},{}\n", p.elapsed, p.makespan));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    GvnsI,
    GvnsII,
    Grasp,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::GvnsI, Method::GvnsII, Method::Grasp];

    pub fn name(self) -> &'static str {
        match self {
            Method::GvnsI => "gvns1",
            Method::GvnsII => "gvns2",
            Method::Grasp => "grasp",
        }
    }

    pub fn run(self, instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
        match self {
            Method::GvnsI => gvns(
                instance,
                &SearchConfig {
                    initial: InitialSolution::IterativeImprovement,
                    ..config.clone()
                },
            ),
            Method::GvnsII => gvns(
                instance,
                &SearchConfig {
                    initial: InitialSolution::Random,
                    ..config.clone()
                },
            ),
            Method::Grasp => grasp(instance, config),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "gvns1" | "gvnsi" => Ok(Method::GvnsI),
            "gvns2" | "gvnsii" => Ok(Method::GvnsII),
            "grasp" => Ok(Method::Grasp),
            _ => Err(Error::invalid(format!(
                "unknown method {s:?} (expected gvns1, gvns2 or grasp)"
            ))),
        }
    }
}

/// Budget and incumbent bookkeeping shared by the searches.
struct Run {
    started: Instant,
    clock: ClockMode,
    limit: f64,
    stop_value: Option<Time>,
    record_trace: bool,
    best: Option<(Permutation, Time)>,
    time_to_best: f64,
    trace: Vec<TracePoint>,
    iterations: u64,
}

impl Run {
    fn new(instance: &Instance, config: &SearchConfig) -> Self {
        let lb = config.stop_at_lower_bound.then(|| lb_t(instance).ceil());
        let stop_value = match (lb, config.target) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        Run {
            started: Instant::now(),
            clock: config.clock,
            limit: config.time_limit.as_secs_f64(),
            stop_value,
            record_trace: config.record_trace,
            best: None,
            time_to_best: 0.0,
            trace: Vec::new(),
            iterations: 0,
        }
    }

    fn elapsed(&self, eval: &Evaluator<'_>) -> f64 {
        match self.clock {
            ClockMode::Wall => self.started.elapsed().as_secs_f64(),
            ClockMode::Virtual { evaluations_per_second } => eval.evaluations() as f64 / evaluations_per_second as f64,
        }
    }

    fn best_makespan(&self) -> Option<Time> {
        self.best.as_ref().map(|(_, ms)| *ms)
    }

    /// Records `candidate` if it strictly improves the incumbent.
    fn offer(&mut self, eval: &Evaluator<'_>, candidate: Permutation, makespan: Time) -> bool {
        if self.best_makespan().is_some_and(|b| makespan >= b) {
            return false;
        }
        let now = self.elapsed(eval);
        self.time_to_best = now;
        if self.record_trace {
            self.trace.push(TracePoint { elapsed: now, makespan });
        }
        self.best = Some((candidate, makespan));
        true
    }

    fn finished(&self, eval: &Evaluator<'_>) -> bool {
        let reached = matches!(
            (self.best_makespan(), self.stop_value),
            (Some(b), Some(s)) if b <= s
        );
        reached || self.elapsed(eval) >= self.limit
    }

    fn into_result(self, eval: &Evaluator<'_>) -> SearchResult {
        let (best, makespan) = self.best.expect("a search records at least one solution");
        SearchResult {
            best,
            makespan,
            time_to_best: self.time_to_best,
            iterations: self.iterations,
            evaluations: eval.evaluations(),
            trace: self.trace,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_parse() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("GVNS-I".parse::<Method>().unwrap(), Method::GvnsI);
        assert_eq!("gvns_ii".parse::<Method>().unwrap(), Method::GvnsII);
        assert!(matches!("tabu".parse::<Method>(), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::default().validate().is_ok());
        let bad = [
            SearchConfig {
                time_limit: Duration::ZERO,
                ..Default::default()
            },
            SearchConfig {
                k_max: 0,
                ..Default::default()
            },
            SearchConfig {
                alpha: AlphaMode::Fixed(1.5),
                ..Default::default()
            },
            SearchConfig {
                clock: ClockMode::Virtual {
                    evaluations_per_second: 0,
                },
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
