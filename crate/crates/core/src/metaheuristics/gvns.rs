use rand::{Rng, RngExt};

use super::{InitialSolution, Run, SearchConfig, SearchResult};
use crate::error::Result;
use crate::instance::Instance;
use crate::neighborhoods::{iterative_improvement_with, vnd_with, Move, MoveKind};
use crate::permutation::Permutation;
use crate::rng::search_rng;
use crate::schedule::Evaluator;

/// Applies `k` uniformly random block reversals one after another.
pub fn shake<R: Rng + ?Sized>(perm: &Permutation, k: usize, rng: &mut R) -> Permutation {
    let n = perm.len();
    let mut out = perm.clone();
    if n < 2 {
        return out;
    }
    for _ in 0..k {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        Move::new(MoveKind::Reverse, a, b).apply_slice(out.as_mut_slice());
    }
    out
}

/// General variable neighborhood search.
///
/// Shakes the incumbent with depth `k`, descends, and either adopts the
/// result (strict improvement, `k` back to 1) or deepens the shake, cycling
/// `k = 1..=k_max` until the budget runs out.
pub fn gvns(instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let n = instance.n();
    let mut rng = search_rng(config.seed);
    let mut eval = Evaluator::new(instance);
    let mut run = Run::new(instance, config);

    let (initial, makespan) = match config.initial {
        InitialSolution::IterativeImprovement => {
            iterative_improvement_with(&mut eval, Permutation::identity(n), &mut rng)
        }
        InitialSolution::Random => {
            let p = Permutation::random(n, &mut rng);
            let ms = eval.makespan(p.as_slice());
            (p, ms)
        }
    };
    run.offer(&eval, initial.clone(), makespan);
    let mut current = initial;
    let mut current_ms = makespan;

    'search: while !run.finished(&eval) {
        let mut k = 1;
        while k <= config.k_max {
            let shaken = shake(&current, k, &mut rng);
            let (candidate, ms) = vnd_with(&mut eval, shaken);
            run.iterations += 1;
            if ms < current_ms {
                run.offer(&eval, candidate.clone(), ms);
                current = candidate;
                current_ms = ms;
                k = 1;
            } else {
                k += 1;
            }
            if run.finished(&eval) {
                break 'search;
            }
        }
    }
    Ok(run.into_result(&eval))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metaheuristics::{ClockMode, Method};
    use std::time::Duration;

    #[test]
    fn shake_single_job_is_identity() {
        let mut rng = search_rng(1);
        let p = Permutation::identity(1);
        assert_eq!(shake(&p, 15, &mut rng), p);
    }

    #[test]
    fn shake_depth_one_is_one_reversal() {
        let mut rng = search_rng(9);
        let p = Permutation::identity(4);
        let q = shake(&p, 1, &mut rng);
        let diff: Vec<usize> = (0..4).filter(|&i| q.as_slice()[i] != i).collect();
        assert!(!diff.is_empty());
        let (lo, hi) = (diff[0], *diff.last().unwrap());
        let mut expect = p.clone().into_vec();
        expect[lo..=hi].reverse();
        assert_eq!(q.as_slice(), &expect[..]);
    }

    #[test]
    fn shake_preserves_jobs() {
        let mut rng = search_rng(5);
        for &n in &[2usize, 7, 60, 500] {
            for k in [1usize, 15, 100] {
                let q = shake(&Permutation::identity(n), k, &mut rng);
                let mut v = q.into_vec();
                v.sort();
                assert_eq!(v, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn gvns_single_job() {
        let inst = Instance::new(&[(2, 3, 4)]).unwrap();
        let r = gvns(&inst, &SearchConfig::default()).unwrap();
        assert_eq!(r.makespan, 9);
    }

    #[test]
    fn gvns_serial_instance_stops_immediately() {
        let inst = Instance::new(&[(3, 2, 3), (4, 1, 4), (5, 2, 6), (7, 1, 3)]).unwrap();
        let cfg = SearchConfig {
            stop_at_lower_bound: false,
            target: Some(inst.total_length()),
            ..Default::default()
        };
        let r = Method::GvnsII.run(&inst, &cfg).unwrap();
        assert_eq!(r.makespan, inst.total_length());
        assert!(r.time_to_best < 0.5);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn gvns_replays_with_virtual_clock() {
        let jobs: Vec<_> = (0..12)
            .map(|i| (1 + i % 4, 10 + (7 * i) % 23, 2 + (3 * i) % 5))
            .collect();
        let inst = Instance::new(&jobs).unwrap();
        let cfg = SearchConfig {
            time_limit: Duration::from_millis(50),
            clock: ClockMode::Virtual {
                evaluations_per_second: 100_000,
            },
            stop_at_lower_bound: false,
            record_trace: true,
            seed: 11,
            ..Default::default()
        };
        let a = gvns(&inst, &cfg).unwrap();
        let b = gvns(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.trace.windows(2).all(|w| w[1].makespan < w[0].makespan));
        assert_eq!(a.trace.last().unwrap().makespan, a.makespan);
    }
}
