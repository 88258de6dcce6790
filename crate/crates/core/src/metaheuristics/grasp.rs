use rand::{Rng, RngExt};

use super::{AlphaMode, Run, SearchConfig, SearchResult};
use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::neighborhoods::vnd_with;
use crate::permutation::Permutation;
use crate::rng::search_rng;
use crate::schedule::{Evaluator, PartialSchedule};

/// Greedy randomized construction.
///
/// At every step each unscheduled job is scored by the completion time it
/// would get if appended next. The restricted candidate list keeps the jobs
/// scoring at most `min + alpha * (max - min)` and one of them is picked
/// uniformly. `alpha = 0` is pure greedy (ties broken at random), `alpha = 1`
/// is a uniformly random order.
pub fn grc<R: Rng + ?Sized>(instance: &Instance, alpha: f64, rng: &mut R) -> Result<Permutation> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    let n = instance.n();
    let mut partial = PartialSchedule::new(instance);
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut scores: Vec<Time> = Vec::with_capacity(n);
    let mut rcl: Vec<usize> = Vec::with_capacity(n);
    let mut order = Vec::with_capacity(n);

    while !remaining.is_empty() {
        scores.clear();
        scores.extend(
            remaining
                .iter()
                .map(|&j| partial.probe(j).start + instance.job(j).length()),
        );
        let lo = *scores.iter().min().expect("remaining is non-empty");
        let hi = *scores.iter().max().expect("remaining is non-empty");
        let threshold = alpha * (hi - lo) as f64;
        rcl.clear();
        rcl.extend((0..remaining.len()).filter(|&i| ((scores[i] - lo) as f64) <= threshold));
        let pick = rcl[rng.random_range(0..rcl.len())];
        let job = remaining.swap_remove(pick);
        partial.commit(job);
        order.push(job);
    }
    Ok(Permutation::from_vec_unchecked(order))
}

/// GRASP: repeated randomized construction followed by variable neighborhood descent.
pub fn grasp(instance: &Instance, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let n = instance.n() as u64;
    let mut rng = search_rng(config.seed);
    let mut eval = Evaluator::new(instance);
    let mut run = Run::new(instance, config);

    loop {
        let alpha = match config.alpha {
            AlphaMode::Fixed(a) => a,
            AlphaMode::Uniform => rng.random::<f64>(),
        };
        let constructed = grc(instance, alpha, &mut rng)?;
        // A construction probes every remaining job at each step, about n/2 decodes.
        eval.charge(n.div_ceil(2));
        let (candidate, ms) = vnd_with(&mut eval, constructed);
        run.iterations += 1;
        run.offer(&eval, candidate, ms);
        if run.finished(&eval) {
            break;
        }
    }
    Ok(run.into_result(&eval))
}
