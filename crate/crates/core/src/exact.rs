//! Exhaustive search over job permutations, the ground truth for small instances.
//!
//! The optimum is taken over list-scheduling decodes, so it is the best
//! permutation schedule rather than a proven optimum over all schedules.

use std::sync::atomic::{AtomicI64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::permutation::Permutation;
use crate::schedule::PartialSchedule;

/// Largest instance the oracle accepts by default (10! permutations).
pub const DEFAULT_LIMIT_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub makespan: Time,
    /// Lexicographically smallest optimal permutation.
    pub permutation: Permutation,
    /// Number of permutations whose decode reaches the optimum.
    pub optimal_count: u64,
    /// Permutations accounted for, including those cut off early. Always `n!`.
    pub examined: u64,
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// Best permutation by exhaustive enumeration, refusing `n > limit_n`.
///
/// Prefixes whose partial makespan already exceeds the best known value are
/// cut, which is exact because appending jobs never lowers the makespan. The
/// first position is split across the rayon pool; the merge is deterministic.
pub fn brute_force(instance: &Instance, limit_n: usize) -> Result<OracleResult> {
    let n = instance.n();
    if n > limit_n {
        return Err(Error::TooLarge { n, limit: limit_n });
    }
    let bound = AtomicI64::new(Time::MAX);
    let branches: Vec<Branch> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut search = Search::new(instance, &bound);
            search.push(first);
            search.descend(1);
            search.branch
        })
        .collect();

    let makespan = branches.iter().map(|b| b.best).min().expect("n >= 1");
    let mut winners = branches.into_iter().filter(|b| b.best == makespan);
    let first = winners.next().expect("some branch attains the minimum");
    let optimal_count = first.count + winners.map(|b| b.count).sum::<u64>();
    Ok(OracleResult {
        makespan,
        permutation: Permutation::from_vec_unchecked(first.order),
        optimal_count,
        examined: factorial(n),
    })
}

struct Branch {
    best: Time,
    order: Vec<usize>,
    count: u64,
}

struct Search<'a> {
    n: usize,
    /// `states[d]` holds the schedule after `d` jobs.
    states: Vec<PartialSchedule<'a>>,
    prefix: Vec<usize>,
    used: Vec<bool>,
    shared: &'a AtomicI64,
    branch: Branch,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, shared: &'a AtomicI64) -> Self {
        let n = instance.n();
        Search {
            n,
            states: vec![PartialSchedule::new(instance); n + 1],
            prefix: Vec::with_capacity(n),
            used: vec![false; n],
            shared,
            branch: Branch {
                best: Time::MAX,
                order: Vec::new(),
                count: 0,
            },
        }
    }

    fn push(&mut self, job: usize) {
        let depth = self.prefix.len();
        let (done, rest) = self.states.split_at_mut(depth + 1);
        rest[0].clone_from(&done[depth]);
        rest[0].commit(job);
        self.prefix.push(job);
        self.used[job] = true;
    }

    fn pop(&mut self) {
        let job = self.prefix.pop().expect("non-empty prefix");
        self.used[job] = false;
    }

    fn descend(&mut self, depth: usize) {
        let partial = self.states[depth].makespan();
        // Strict comparison: ties must still be counted.
        if partial > self.branch.best || partial > self.shared.load(Ordering::Relaxed) {
            return;
        }
        if depth == self.n {
            if partial < self.branch.best {
                self.branch.best = partial;
                self.branch.order.clone_from(&self.prefix);
                self.branch.count = 0;
                self.shared.fetch_min(partial, Ordering::Relaxed);
            }
            self.branch.count += 1;
            return;
        }
        for job in 0..self.n {
            if !self.used[job] {
                self.push(job);
                self.descend(depth + 1);
                self.pop();
            }
        }
    }
}
