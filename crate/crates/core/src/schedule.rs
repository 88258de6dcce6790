//! Schedules and the permutation decoder.
//!
//! A permutation is turned into a schedule by list scheduling: jobs are
//! committed in order, each at the earliest start where its machine is free
//! and the single server is free during both its loading and its unloading
//! window. Earlier commitments are never moved. All intervals are half-open.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::permutation::Permutation;

/// Number of machines.
pub const MACHINES: usize = 2;

/// Half-open time interval `[begin, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub begin: Time,
    pub end: Time,
}

impl Interval {
    #[inline]
    pub fn new(begin: Time, end: Time) -> Self {
        Interval { begin, end }
    }

    #[inline]
    pub fn len(&self) -> Time {
        self.end - self.begin
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.end <= self.begin
    }

    #[inline]
    pub fn overlaps(&self, other: &Interval) -> bool {
        self.begin < other.end && other.begin < self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ServerOp {
    Load,
    Unload,
}

/// One server operation of a scheduled job.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ServerInterval {
    pub interval: Interval,
    pub job: usize,
    pub op: ServerOp,
}

/// Start time and machine chosen for a single job.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub machine: usize,
    pub start: Time,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub start: Vec<Time>,
    pub machine: Vec<usize>,
    pub completion: Vec<Time>,
    /// Server operations sorted by begin time.
    pub server_intervals: Vec<ServerInterval>,
    pub makespan: Time,
}

impl Schedule {
    /// Derives completions, server operations and makespan from starts and machines.
    pub fn from_assignment(instance: &Instance, start: Vec<Time>, machine: Vec<usize>) -> Result<Self> {
        let n = instance.n();
        if start.len() != n || machine.len() != n {
            return Err(Error::invalid(format!(
                "schedule covers {} starts and {} machines, instance has {n} jobs",
                start.len(),
                machine.len()
            )));
        }
        let completion: Vec<Time> = instance
            .jobs()
            .iter()
            .zip(&start)
            .map(|(j, &s)| s + j.length())
            .collect();
        let server_intervals = server_ops(instance, &start);
        let makespan = completion.iter().copied().max().unwrap_or(0);
        Ok(Schedule {
            start,
            machine,
            completion,
            server_intervals,
            makespan,
        })
    }

    pub fn n(&self) -> usize {
        self.start.len()
    }

    /// Text form: `n`, then one `start machine` line per job in id order.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (s, m) in self.start.iter().zip(&self.machine) {
            out.push_str(&format!("{s} {m}\n"));
        }
        out
    }

    pub fn parse(instance: &Instance, text: &str) -> Result<Self> {
        let mut rows = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = rows.next().ok_or(Error::Parse {
            line: 1,
            message: "empty schedule".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line,
            message: format!("expected job count, found {header:?}"),
        })?;
        let mut start = Vec::with_capacity(n);
        let mut machine = Vec::with_capacity(n);
        for (line, row) in rows {
            let mut fields = row.split_whitespace();
            let (Some(s), Some(m), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line,
                    message: "expected `start machine`".into(),
                });
            };
            let bad = |e: &dyn fmt::Display| Error::Parse {
                line,
                message: e.to_string(),
            };
            start.push(s.parse::<Time>().map_err(|e| bad(&e))?);
            machine.push(m.parse::<usize>().map_err(|e| bad(&e))?);
        }
        if start.len() != n {
            return Err(Error::Parse {
                line,
                message: format!("declared {n} jobs, found {}", start.len()),
            });
        }
        Schedule::from_assignment(instance, start, machine)
    }

    pub fn read(instance: &Instance, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Schedule::parse(instance, &text)
    }
}

fn server_ops(instance: &Instance, start: &[Time]) -> Vec<ServerInterval> {
    let mut ops: Vec<ServerInterval> = instance
        .jobs()
        .iter()
        .zip(start)
        .flat_map(|(j, &s)| {
            [
                ServerInterval {
                    interval: Interval::new(s, s + j.loading),
                    job: j.id,
                    op: ServerOp::Load,
                },
                ServerInterval {
                    interval: Interval::new(s + j.unload_offset(), s + j.length()),
                    job: j.id,
                    op: ServerOp::Unload,
                },
            ]
        })
        .collect();
    ops.sort_by_key(|o| (o.interval.begin, o.interval.end, o.job));
    ops
}

/// First busy interval that overlaps `[a, b)`, if any; returns its end.
#[inline]
fn conflict_end(busy: &[Interval], a: Time, b: Time) -> Option<Time> {
    let i = busy.partition_point(|iv| iv.end <= a);
    busy.get(i).filter(|iv| iv.begin < b).map(|iv| iv.end)
}

/// Smallest `σ ≥ machine_free` such that the server is free on `[σ, σ+s)` and
/// on `[σ+s+p, σ+s+p+t)`.
///
/// `busy` must be sorted and pairwise disjoint. The search only ever jumps to
/// members of the candidate set `{machine_free} ∪ {e} ∪ {e − s − p}` over busy
/// interval ends `e`, skipping start times that are provably infeasible.
pub fn earliest_feasible_start(machine_free: Time, s: Time, p: Time, t: Time, busy: &[Interval]) -> Time {
    let mut sigma = machine_free;
    loop {
        if let Some(end) = conflict_end(busy, sigma, sigma + s) {
            sigma = end;
            continue;
        }
        let unload = sigma + s + p;
        if let Some(end) = conflict_end(busy, unload, unload + t) {
            sigma = end - s - p;
            continue;
        }
        return sigma;
    }
}

/// Inserts `iv` into a sorted disjoint list, coalescing touching neighbours.
fn insert_busy(busy: &mut Vec<Interval>, iv: Interval) {
    let lo = busy.partition_point(|x| x.end < iv.begin);
    let mut hi = lo;
    let mut merged = iv;
    while hi < busy.len() && busy[hi].begin <= merged.end {
        merged.begin = merged.begin.min(busy[hi].begin);
        merged.end = merged.end.max(busy[hi].end);
        hi += 1;
    }
    busy.splice(lo..hi, std::iter::once(merged));
}

/// Incremental list scheduler. Jobs can be probed without committing, which is
/// what the greedy randomized construction needs.
#[derive(Debug, Clone)]
pub struct PartialSchedule<'a> {
    instance: &'a Instance,
    machine_free: [Time; MACHINES],
    busy: Vec<Interval>,
    makespan: Time,
}

impl<'a> PartialSchedule<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        PartialSchedule {
            instance,
            machine_free: [0; MACHINES],
            busy: Vec::with_capacity(2 * instance.n()),
            makespan: 0,
        }
    }

    pub fn reset(&mut self) {
        self.machine_free = [0; MACHINES];
        self.busy.clear();
        self.makespan = 0;
    }

    #[inline]
    pub fn makespan(&self) -> Time {
        self.makespan
    }

    /// Merged server busy periods committed so far.
    pub fn server_busy(&self) -> &[Interval] {
        &self.busy
    }

    /// Where `job` would go if it were appended now. Ties go to the lower machine.
    pub fn probe(&self, job: usize) -> Placement {
        let j = self.instance.job(job);
        let mut best = Placement {
            machine: 0,
            start: Time::MAX,
        };
        for (machine, &free) in self.machine_free.iter().enumerate() {
            if free >= best.start {
                continue;
            }
            let start = earliest_feasible_start(free, j.loading, j.processing, j.unloading, &self.busy);
            if start < best.start {
                best = Placement { machine, start };
            }
        }
        best
    }

    pub fn commit(&mut self, job: usize) -> Placement {
        let placement = self.probe(job);
        let j = self.instance.job(job);
        let sigma = placement.start;
        insert_busy(&mut self.busy, Interval::new(sigma, sigma + j.loading));
        insert_busy(
            &mut self.busy,
            Interval::new(sigma + j.unload_offset(), sigma + j.length()),
        );
        let completion = sigma + j.length();
        self.machine_free[placement.machine] = completion;
        self.makespan = self.makespan.max(completion);
        placement
    }
}

/// Decodes a permutation into a full schedule.
pub fn decode(instance: &Instance, perm: &Permutation) -> Result<Schedule> {
    let n = instance.n();
    if perm.len() != n {
        return Err(Error::invalid(format!(
            "permutation has {} entries, instance has {n} jobs",
            perm.len()
        )));
    }
    let mut partial = PartialSchedule::new(instance);
    let mut start = vec![0; n];
    let mut machine = vec![0; n];
    for &job in perm.as_slice() {
        let placement = partial.commit(job);
        start[job] = placement.start;
        machine[job] = placement.machine;
    }
    Schedule::from_assignment(instance, start, machine)
}

/// Makespan-only decoder with reusable buffers and an evaluation counter.
#[derive(Debug, Clone)]
pub struct Evaluator<'a> {
    partial: PartialSchedule<'a>,
    evaluations: u64,
}

impl<'a> Evaluator<'a> {
    pub fn new(instance: &'a Instance) -> Self {
        Evaluator {
            partial: PartialSchedule::new(instance),
            evaluations: 0,
        }
    }

    pub fn instance(&self) -> &'a Instance {
        self.partial.instance
    }

    /// Number of decodes performed so far, including early-aborted ones.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    /// Adds work done outside the evaluator, measured in full decodes.
    pub fn charge(&mut self, decodes: u64) {
        self.evaluations += decodes;
    }

    pub fn makespan(&mut self, order: &[usize]) -> Time {
        self.evaluations += 1;
        self.partial.reset();
        for &job in order {
            self.partial.commit(job);
        }
        self.partial.makespan()
    }

    /// Makespan of `order` if it is at most `cap`, otherwise `None`.
    ///
    /// Decoding stops as soon as the partial makespan exceeds `cap`; partial
    /// makespans never decrease as jobs are appended.
    pub fn makespan_capped(&mut self, order: &[usize], cap: Time) -> Option<Time> {
        self.evaluations += 1;
        self.partial.reset();
        for &job in order {
            self.partial.commit(job);
            if self.partial.makespan() > cap {
                return None;
            }
        }
        Some(self.partial.makespan())
    }
}

/// A broken schedule invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Shape(String),
    MachineIndex { job: usize, machine: usize },
    NegativeStart { job: usize },
    Completion { job: usize },
    MachineOverlap { machine: usize, a: usize, b: usize },
    ServerOverlap { a: usize, b: usize },
    ServerIntervals(String),
    Makespan { recorded: Time, actual: Time },
    IdleIdentity { idle_sum: Time, expected: Time },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Shape(m) => write!(f, "shape: {m}"),
            Violation::MachineIndex { job, machine } => {
                write!(f, "machine index: job {job} assigned to machine {machine}")
            }
            Violation::NegativeStart { job } => write!(f, "negative start: job {job}"),
            Violation::Completion { job } => {
                write!(f, "completion: job {job} does not finish at start + length")
            }
            Violation::MachineOverlap { machine, a, b } => {
                write!(f, "machine overlap: jobs {a} and {b} on machine {machine}")
            }
            Violation::ServerOverlap { a, b } => {
                write!(f, "server overlap: jobs {a} and {b}")
            }
            Violation::ServerIntervals(m) => write!(f, "server intervals: {m}"),
            Violation::Makespan { recorded, actual } => {
                write!(f, "makespan: recorded {recorded}, latest completion {actual}")
            }
            Violation::IdleIdentity { idle_sum, expected } => write!(
                f,
                "idle identity: measured idle {idle_sum}, expected 2*Cmax - sum(A) = {expected}"
            ),
        }
    }
}

/// Pairs of overlapping intervals, each pair of owners reported once.
fn overlapping_pairs(mut items: Vec<(Interval, usize)>) -> Vec<(usize, usize)> {
    items.sort();
    let mut pairs = Vec::new();
    for i in 0..items.len() {
        let (iv, a) = items[i];
        for &(other, b) in &items[i + 1..] {
            if other.begin >= iv.end {
                break;
            }
            if a != b && iv.overlaps(&other) {
                let key = (a.min(b), a.max(b));
                if !pairs.contains(&key) {
                    pairs.push(key);
                }
            }
        }
    }
    pairs
}

/// Checks every schedule invariant. An empty result means the schedule is feasible.
pub fn validate(instance: &Instance, schedule: &Schedule) -> Vec<Violation> {
    let n = instance.n();
    let mut out = Vec::new();
    if schedule.start.len() != n || schedule.machine.len() != n || schedule.completion.len() != n {
        out.push(Violation::Shape(format!(
            "expected {n} entries, got {} starts, {} machines, {} completions",
            schedule.start.len(),
            schedule.machine.len(),
            schedule.completion.len()
        )));
        return out;
    }

    for job in instance.jobs() {
        let id = job.id;
        if schedule.machine[id] >= MACHINES {
            out.push(Violation::MachineIndex {
                job: id,
                machine: schedule.machine[id],
            });
        }
        if schedule.start[id] < 0 {
            out.push(Violation::NegativeStart { job: id });
        }
        let c = schedule.completion[id];
        if c != schedule.start[id] + job.length() || c < job.length() {
            out.push(Violation::Completion { job: id });
        }
    }

    let occupancy = |id: usize| Interval::new(schedule.start[id], schedule.start[id] + instance.job(id).length());
    for machine in 0..MACHINES {
        let items = (0..n)
            .filter(|&j| schedule.machine[j] == machine)
            .map(|j| (occupancy(j), j))
            .collect();
        for (a, b) in overlapping_pairs(items) {
            out.push(Violation::MachineOverlap { machine, a, b });
        }
    }

    let expected_ops = server_ops(instance, &schedule.start);
    let ops: Vec<(Interval, usize)> = expected_ops.iter().map(|o| (o.interval, o.job)).collect();
    for (a, b) in overlapping_pairs(ops) {
        out.push(Violation::ServerOverlap { a, b });
    }
    if schedule.server_intervals != expected_ops {
        out.push(Violation::ServerIntervals(
            "recorded server operations do not match the job starts".into(),
        ));
    } else if schedule
        .server_intervals
        .windows(2)
        .any(|w| w[0].interval.begin > w[1].interval.begin)
    {
        out.push(Violation::ServerIntervals("not sorted by begin time".into()));
    }

    let actual = (0..n).map(|j| occupancy(j).end).max().unwrap_or(0);
    if schedule.makespan != actual {
        out.push(Violation::Makespan {
            recorded: schedule.makespan,
            actual,
        });
    }

    // Idle measured as makespan minus the covered length of each machine.
    let idle_sum: Time = (0..MACHINES)
        .map(|machine| {
            let mut ivs: Vec<Interval> = (0..n)
                .filter(|&j| schedule.machine[j] == machine)
                .map(occupancy)
                .collect();
            ivs.sort();
            let mut covered = 0;
            let mut reach = Time::MIN;
            for iv in ivs {
                let from = iv.begin.max(reach);
                if iv.end > from {
                    covered += iv.end - from;
                }
                reach = reach.max(iv.end);
            }
            schedule.makespan - covered
        })
        .sum();
    let expected = MACHINES as Time * schedule.makespan - instance.total_length();
    if idle_sum != expected {
        out.push(Violation::IdleIdentity { idle_sum, expected });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(b: Time, e: Time) -> Interval {
        Interval::new(b, e)
    }

    /// Linear scan over every start in `[machine_free, machine_free + horizon]`.
    fn brute_force_start(machine_free: Time, s: Time, p: Time, t: Time, busy: &[Interval], horizon: Time) -> Time {
        (machine_free..=machine_free + horizon)
            .find(|&sigma| {
                let load = iv(sigma, sigma + s);
                let unload = iv(sigma + s + p, sigma + s + p + t);
                busy.iter().all(|b| !b.overlaps(&load) && !b.overlaps(&unload))
            })
            .expect("a feasible start exists past the last busy interval")
    }

    #[test]
    fn earliest_start_examples() {
        assert_eq!(earliest_feasible_start(0, 1, 1, 1, &[]), 0);
        // Load at 1 is free but its unload [3,4) collides; 2 is the first fit.
        let busy = [iv(0, 1), iv(3, 4)];
        assert_eq!(brute_force_start(0, 1, 1, 1, &busy, 10), 2);
        assert_eq!(earliest_feasible_start(0, 1, 1, 1, &busy), 2);
        let busy = [iv(2, 7)];
        assert_eq!(brute_force_start(0, 1, 1, 1, &busy, 10), 7);
        assert_eq!(earliest_feasible_start(0, 1, 1, 1, &busy), 7);
    }

    #[test]
    fn earliest_start_respects_machine_free() {
        assert_eq!(earliest_feasible_start(5, 1, 1, 1, &[iv(0, 1)]), 5);
        assert_eq!(earliest_feasible_start(5, 2, 3, 1, &[iv(5, 6)]), 6);
    }

    #[test]
    fn insert_busy_coalesces() {
        let mut busy = vec![];
        insert_busy(&mut busy, iv(2, 3));
        insert_busy(&mut busy, iv(5, 6));
        insert_busy(&mut busy, iv(0, 1));
        assert_eq!(busy, vec![iv(0, 1), iv(2, 3), iv(5, 6)]);
        insert_busy(&mut busy, iv(3, 5));
        assert_eq!(busy, vec![iv(0, 1), iv(2, 6)]);
        insert_busy(&mut busy, iv(1, 2));
        assert_eq!(busy, vec![iv(0, 6)]);
    }

    #[test]
    fn decode_two_unit_jobs() {
        let inst = Instance::new(&[(1, 1, 1), (1, 1, 1)]).unwrap();
        let sched = decode(&inst, &Permutation::identity(2)).unwrap();
        assert_eq!(sched.start, vec![0, 1]);
        assert_eq!(sched.machine, vec![0, 1]);
        assert_eq!(sched.makespan, 4);
    }

    #[test]
    fn decode_single_job() {
        let inst = Instance::new(&[(2, 3, 4)]).unwrap();
        let sched = decode(&inst, &Permutation::identity(1)).unwrap();
        assert_eq!(sched.start, vec![0]);
        assert_eq!(sched.makespan, 9);
    }

    #[test]
    fn decode_skips_colliding_unload() {
        // Job 0 keeps the server busy on [0,1) and [2,7). Starts 1 and 5 for
        // job 1 collide with the long unload, so it starts at 7. Machine 0 is
        // also free by then and wins the tie.
        let inst = Instance::new(&[(1, 1, 5), (1, 1, 1)]).unwrap();
        let sched = decode(&inst, &Permutation::identity(2)).unwrap();
        assert_eq!(sched.start[1], 7);
        assert_eq!(sched.machine[1], 0);
        assert_eq!(sched.makespan, 10);
        assert!(validate(&inst, &sched).is_empty());
    }

    #[test]
    fn decode_rejects_wrong_length() {
        let inst = Instance::new(&[(1, 1, 1), (1, 1, 1)]).unwrap();
        assert!(matches!(
            decode(&inst, &Permutation::identity(3)),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn validate_flags_simultaneous_loads() {
        let inst = Instance::new(&[(1, 1, 1), (1, 1, 1)]).unwrap();
        let sched = Schedule::from_assignment(&inst, vec![0, 0], vec![0, 1]).unwrap();
        let v = validate(&inst, &sched);
        assert_eq!(v, vec![Violation::ServerOverlap { a: 0, b: 1 }]);
    }

    #[test]
    fn validate_flags_short_completion() {
        let inst = Instance::new(&[(2, 3, 4)]).unwrap();
        let mut sched = decode(&inst, &Permutation::identity(1)).unwrap();
        sched.completion[0] = 5;
        let v = validate(&inst, &sched);
        assert_eq!(v, vec![Violation::Completion { job: 0 }]);
    }

    #[test]
    fn validate_flags_machine_overlap() {
        let inst = Instance::new(&[(1, 5, 1), (1, 5, 1)]).unwrap();
        let sched = Schedule::from_assignment(&inst, vec![0, 2], vec![0, 0]).unwrap();
        let v = validate(&inst, &sched);
        assert!(v.contains(&Violation::MachineOverlap { machine: 0, a: 0, b: 1 }));
        assert!(v.iter().any(|x| matches!(x, Violation::IdleIdentity { .. })));
    }

    #[test]
    fn schedule_text_round_trip() {
        let inst = Instance::new(&[(1, 1, 5), (1, 1, 1), (2, 2, 2)]).unwrap();
        let sched = decode(&inst, &Permutation::identity(3)).unwrap();
        let back = Schedule::parse(&inst, &sched.to_text()).unwrap();
        assert_eq!(back, sched);
    }

    fn small_case() -> impl Strategy<Value = (Vec<(Time, Time, Time)>, Vec<usize>)> {
        prop::collection::vec((1i64..8, 1i64..8, 1i64..8), 1..9).prop_flat_map(|jobs| {
            let n = jobs.len();
            (Just(jobs), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
        })
    }

    proptest! {
        #[test]
        fn earliest_start_matches_linear_scan(
            machine_free in 0i64..15,
            s in 1i64..6, p in 1i64..6, t in 1i64..6,
            raw in prop::collection::vec((0i64..30, 1i64..6), 0..8),
        ) {
            let mut busy = Vec::new();
            for (b, len) in raw {
                let cand = iv(b, b + len);
                if busy.iter().all(|x: &Interval| !x.overlaps(&cand)) {
                    busy.push(cand);
                }
            }
            busy.sort();
            let horizon: Time = 60;
            let expected = brute_force_start(machine_free, s, p, t, &busy, horizon);
            prop_assert_eq!(earliest_feasible_start(machine_free, s, p, t, &busy), expected);
        }

        #[test]
        fn decoded_schedules_are_valid((jobs, order) in small_case()) {
            let inst = Instance::new(&jobs).unwrap();
            let perm = Permutation::new(order, inst.n()).unwrap();
            let sched = decode(&inst, &perm).unwrap();
            prop_assert!(validate(&inst, &sched).is_empty());
            prop_assert!(sched.makespan <= inst.total_length());
            prop_assert_eq!(decode(&inst, &perm).unwrap(), sched.clone());
            let mut eval = Evaluator::new(&inst);
            prop_assert_eq!(eval.makespan(perm.as_slice()), sched.makespan);
            prop_assert_eq!(eval.makespan_capped(perm.as_slice(), sched.makespan), Some(sched.makespan));
            prop_assert_eq!(eval.makespan_capped(perm.as_slice(), sched.makespan - 1), None);
        }
    }
}
