//! Time-indexed formulation.
//!
//! One binary `xt_i_t` per index `i` of the `3n` space and integer start
//! time `t` in `[0, T - rho_i]`, plus `Cmax`. Job indices in names are
//! 1-based, time points are literal.

use super::model::{DummyJobView, MilpModel, Sense, VarKind};
use crate::bounds::lb_t;
use crate::error::{Error, Result};
use crate::instance::{Instance, Time};
use crate::schedule::Schedule;

struct TifVars {
    /// `x[i][t]` for `t` in `0..=T - rho_i`.
    x: Vec<Vec<usize>>,
    cmax: usize,
}

impl TifVars {
    fn get(&self, i: usize, t: Time) -> Option<usize> {
        usize::try_from(t).ok().and_then(|t| self.x[i].get(t).copied())
    }
}

/// Horizon used when none is given: the length of the fully serial schedule.
pub fn default_horizon(instance: &Instance) -> Time {
    instance.total_length()
}

fn build(instance: &Instance, horizon: Option<Time>) -> Result<(MilpModel, TifVars, Time)> {
    let view = DummyJobView::new(instance);
    let n = view.n();
    let horizon_t = horizon.unwrap_or_else(|| default_horizon(instance));
    let longest = instance.max_length();
    if horizon_t < longest {
        return Err(Error::invalid(format!(
            "horizon {horizon_t} is shorter than the longest job ({longest})"
        )));
    }
    let bound = lb_t(instance).ceil();
    if horizon_t < bound {
        return Err(Error::invalid(format!(
            "horizon {horizon_t} is below the lower bound {bound}, so the model is infeasible"
        )));
    }
    let name = if horizon.is_some() { "TIF_plus" } else { "TIF" };
    let mut m = MilpModel::new(name);

    let x: Vec<Vec<usize>> = (0..view.len())
        .map(|i| {
            (0..=horizon_t - view.rho(i))
                .map(|t| m.add_var(format!("xt_{}_{}", i + 1, t), VarKind::Binary))
                .collect()
        })
        .collect();
    let cmax = m.add_var("Cmax".to_string(), VarKind::Continuous);
    m.set_objective(cmax);
    let vars = TifVars { x, cmax };

    // Completion of job i is sum_t (t + rho_i) x_i_t.
    for i in 0..n {
        let mut terms: Vec<(usize, i64)> = vars.x[i]
            .iter()
            .enumerate()
            .map(|(t, &v)| (v, t as i64 + view.rho(i)))
            .collect();
        terms.push((cmax, -1));
        m.add_row("makespan", format!("makespan_{}", i + 1), terms, Sense::Le, 0);
    }
    // Operations running during [t, t+1): started in [t - rho + 1, t].
    let (vars_ref, view_ref) = (&vars, &view);
    let running = |indices: std::ops::Range<usize>, t: Time| -> Vec<(usize, i64)> {
        indices
            .flat_map(|i| {
                let from = (t - view_ref.rho(i) + 1).max(0);
                (from..=t).filter_map(move |s| vars_ref.get(i, s)).map(|v| (v, 1))
            })
            .collect()
    };
    for t in 0..=horizon_t {
        let terms = running(0..n, t);
        if !terms.is_empty() {
            m.add_row("machine_cap", format!("machine_cap_{t}"), terms, Sense::Le, 2);
        }
    }
    for t in 0..=horizon_t {
        let terms = running(view.server_ops(), t);
        if !terms.is_empty() {
            m.add_row("server_cap", format!("server_cap_{t}"), terms, Sense::Le, 1);
        }
    }
    for i in 0..view.len() {
        let terms = vars.x[i].iter().map(|&v| (v, 1)).collect();
        m.add_row("start_once", format!("start_once_{}", i + 1), terms, Sense::Eq, 1);
    }
    // Loading starts with the job; a missing job variable counts as zero.
    for i in 0..n {
        let l = view.load(i);
        for t in 0..vars.x[l].len() as Time {
            let mut terms = Vec::with_capacity(2);
            if let Some(v) = vars.get(i, t) {
                terms.push((v, 1));
            }
            terms.push((vars.get(l, t).expect("t within load range"), -1));
            m.add_row("load_sync", format!("load_sync_{}_{}", i + 1, t), terms, Sense::Eq, 0);
        }
    }
    // Unloading starts right after processing.
    for i in 0..n {
        let u = view.unload(i);
        let job = instance.job(i);
        for t in 0..vars.x[i].len() as Time {
            let shifted = t + job.unload_offset();
            m.add_row(
                "unload_sync",
                format!("unload_sync_{}_{}", i + 1, t),
                vec![
                    (vars.get(i, t).expect("t within job range"), 1),
                    (vars.get(u, shifted).expect("unload fits in horizon"), -1),
                ],
                Sense::Eq,
                0,
            );
        }
    }
    Ok((m, vars, horizon_t))
}

/// Builds the time-indexed model. Without a horizon the serial schedule
/// length is used; a tighter horizon (for example a heuristic makespan)
/// shrinks the model.
pub fn build_tif(instance: &Instance, horizon: Option<Time>) -> Result<MilpModel> {
    build(instance, horizon).map(|(m, _, _)| m)
}

/// Number of binaries of the time-indexed model with horizon `horizon`.
pub fn tif_binaries(instance: &Instance, horizon: Time) -> usize {
    DummyJobView::new(instance)
        .rhos()
        .iter()
        .map(|&r| (horizon - r + 1) as usize)
        .sum()
}

/// Tags of the time-indexed rows a schedule violates, one entry per violated
/// row. Fails when the schedule does not fit in the horizon.
pub fn check_tif(instance: &Instance, schedule: &Schedule, horizon: Option<Time>) -> Result<Vec<&'static str>> {
    let (model, vars, horizon_t) = build(instance, horizon)?;
    if schedule.makespan > horizon_t {
        return Err(Error::invalid(format!(
            "schedule makespan {} exceeds horizon {horizon_t}",
            schedule.makespan
        )));
    }
    let view = DummyJobView::new(instance);
    let mut values = vec![0i64; vars.cmax + 1];
    for i in 0..instance.n() {
        let sigma = schedule.start[i];
        let job = instance.job(i);
        for (index, start) in [
            (i, sigma),
            (view.load(i), sigma),
            (view.unload(i), sigma + job.unload_offset()),
        ] {
            let v = vars
                .get(index, start)
                .ok_or_else(|| Error::invalid(format!("start {start} of index {index} is outside the horizon")))?;
            values[v] = 1;
        }
    }
    values[vars.cmax] = schedule.makespan;
    Ok(model.violations(&values).into_iter().map(|v| v.tag).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::Permutation;
    use crate::schedule::decode;

    #[test]
    fn single_unit_job() {
        let inst = Instance::new(&[(1, 1, 1)]).unwrap();
        let m = build_tif(&inst, None).unwrap();
        // Job: t in {0}; load: t in 0..=2; unload: t in 0..=2.
        assert_eq!(m.count_vars(VarKind::Binary), 7);
        assert_eq!(m.count_vars(VarKind::Continuous), 1);
        assert!(m.var("xt_1_0").is_some());
        assert!(m.var("xt_1_1").is_none());
        let sched = decode(&inst, &Permutation::identity(1)).unwrap();
        assert!(check_tif(&inst, &sched, None).unwrap().is_empty());
    }

    #[test]
    fn variable_count_formula() {
        let inst = Instance::new(&[(1, 1, 1), (1, 1, 1)]).unwrap();
        let m = build_tif(&inst, Some(6)).unwrap();
        assert_eq!(m.count_vars(VarKind::Binary), tif_binaries(&inst, 6));
        assert_eq!(tif_binaries(&inst, 6), 4 + 4 + 6 * 4);
    }

    #[test]
    fn tighter_horizon_shrinks_model() {
        let inst = Instance::new(&[(1, 2, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let full = build_tif(&inst, None).unwrap();
        let tight = build_tif(&inst, Some(10)).unwrap();
        assert!(tight.count_vars(VarKind::Binary) < full.count_vars(VarKind::Binary));
        assert_eq!(tight.name, "TIF_plus");
    }

    #[test]
    fn rejects_short_horizons() {
        let inst = Instance::new(&[(2, 3, 4), (1, 1, 1)]).unwrap();
        assert!(matches!(build_tif(&inst, Some(8)), Err(Error::InvalidInput(_))));
        // Longest job fits but the lower bound does not.
        let pair = Instance::new(&[(1, 2, 1), (1, 2, 1)]).unwrap();
        assert!(build_tif(&pair, Some(4)).is_err());
        assert!(build_tif(&pair, Some(5)).is_ok());
    }

    #[test]
    fn decoded_schedules_satisfy_tif() {
        let inst = Instance::new(&[(2, 5, 1), (1, 3, 4), (3, 1, 2), (1, 6, 1)]).unwrap();
        for order in [[0, 1, 2, 3], [3, 2, 1, 0], [1, 3, 0, 2]] {
            let sched = decode(&inst, &Permutation::new(order.to_vec(), 4).unwrap()).unwrap();
            assert_eq!(check_tif(&inst, &sched, None).unwrap(), Vec::<&str>::new());
            assert!(check_tif(&inst, &sched, Some(sched.makespan)).unwrap().is_empty());
        }
    }

    #[test]
    fn overlapping_server_use_is_caught() {
        let inst = Instance::new(&[(1, 1, 1), (1, 1, 1)]).unwrap();
        let sched = Schedule::from_assignment(&inst, vec![0, 0], vec![0, 1]).unwrap();
        let tags = check_tif(&inst, &sched, None).unwrap();
        assert!(tags.contains(&"server_cap"));
    }
}
