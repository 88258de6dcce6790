//! Scheduling toolkit for two identical parallel machines that share a single
//! server for loading and unloading, minimizing the makespan.
//!
//! Every job occupies its machine for loading, processing and unloading in
//! one uninterrupted block, and the server is held during loading and
//! unloading. Solutions are job permutations turned into schedules by a
//! greedy list-scheduling decoder ([`decode`]).

pub mod bench;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod exact;
pub mod instance;
pub mod metaheuristics;
pub mod milp;
pub mod neighborhoods;
pub mod permutation;
pub mod rng;
pub mod schedule;

pub use error::{Error, Result};
pub use instance::{Instance, InstanceMeta, Job, Time};
pub use permutation::Permutation;
pub use schedule::{decode, earliest_feasible_start, validate, Evaluator, Schedule, Violation};
