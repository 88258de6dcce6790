//! Completion-time formulation.
//!
//! Variables: `x_i_k` (job `i` on machine `k`), `z_i_j` (job `i` before job
//! `j` on a shared machine), `y_i_j` (server operation `i` before server
//! operation `j`), completion times `C_i` over the `3n` index space, and
//! `Cmax`. Names use 1-based indices; machines are `1` and `2`.

// Rows index several variable tables by the same job indices.
#![allow(clippy::needless_range_loop)]

use super::model::{DummyJobView, MilpModel, Sense, VarKind};
use crate::instance::Instance;
use crate::schedule::{Schedule, MACHINES};

/// Variable layout of a built completion-time model.
#[derive(Debug, Clone)]
pub(crate) struct CfVars {
    n: usize,
    x: Vec<[usize; MACHINES]>,
    /// `z[i][j]` for `i != j`; the diagonal is unused.
    z: Vec<Vec<usize>>,
    /// `y[a][b]` over server operations, offset by `n`.
    y: Vec<Vec<usize>>,
    c: Vec<usize>,
    cmax: usize,
}

fn build(instance: &Instance, with_valid_inequalities: bool) -> (MilpModel, CfVars) {
    let view = DummyJobView::new(instance);
    let n = view.n();
    let big_b = instance.total_length();
    let name = if with_valid_inequalities { "CF_plus" } else { "CF" };
    let mut m = MilpModel::new(name);

    let x: Vec<[usize; MACHINES]> = (0..n)
        .map(|i| std::array::from_fn(|k| m.add_var(format!("x_{}_{}", i + 1, k + 1), VarKind::Binary)))
        .collect();
    let mut z = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                z[i][j] = m.add_var(format!("z_{}_{}", i + 1, j + 1), VarKind::Binary);
            }
        }
    }
    let ops = view.server_ops();
    let mut y = vec![vec![usize::MAX; 2 * n]; 2 * n];
    for a in ops.clone() {
        for b in ops.clone() {
            if a != b {
                y[a - n][b - n] = m.add_var(format!("y_{}_{}", a + 1, b + 1), VarKind::Binary);
            }
        }
    }
    let c: Vec<usize> = (0..view.len())
        .map(|i| m.add_var(format!("C_{}", i + 1), VarKind::Continuous))
        .collect();
    let cmax = m.add_var("Cmax".to_string(), VarKind::Continuous);
    m.set_objective(cmax);

    for i in 0..n {
        m.add_row(
            "makespan",
            format!("makespan_{}", i + 1),
            vec![(cmax, 1), (c[i], -1)],
            Sense::Ge,
            0,
        );
    }
    for i in 0..n {
        let terms = x[i].iter().map(|&v| (v, 1)).collect();
        m.add_row("assign", format!("assign_{}", i + 1), terms, Sense::Eq, 1);
    }
    for i in 0..view.len() {
        m.add_row(
            "release",
            format!("release_{}", i + 1),
            vec![(c[i], 1)],
            Sense::Ge,
            view.rho(i),
        );
    }
    // C_i + rho_j <= C_j + B(3 - x_ik - x_jk - z_ij)
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..MACHINES {
                m.add_row(
                    "machine_disj",
                    format!("machine_disj_{}_{}_{}", i + 1, j + 1, k + 1),
                    vec![
                        (c[i], 1),
                        (c[j], -1),
                        (x[i][k], big_b),
                        (x[j][k], big_b),
                        (z[i][j], big_b),
                    ],
                    Sense::Le,
                    3 * big_b - view.rho(j),
                );
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            m.add_row(
                "machine_order",
                format!("machine_order_{}_{}", i + 1, j + 1),
                vec![(z[i][j], 1), (z[j][i], 1)],
                Sense::Eq,
                1,
            );
        }
    }
    // C_a + rho_b <= C_b + B(1 - y_ab)
    for a in ops.clone() {
        for b in ops.clone() {
            if a == b {
                continue;
            }
            m.add_row(
                "server_disj",
                format!("server_disj_{}_{}", a + 1, b + 1),
                vec![(c[a], 1), (c[b], -1), (y[a - n][b - n], big_b)],
                Sense::Le,
                big_b - view.rho(b),
            );
        }
    }
    for a in ops.clone() {
        for b in a + 1..ops.end {
            m.add_row(
                "server_order",
                format!("server_order_{}_{}", a + 1, b + 1),
                vec![(y[a - n][b - n], 1), (y[b - n][a - n], 1)],
                Sense::Eq,
                1,
            );
        }
    }
    // C_i - C_{load(i)} = rho_i - rho_{load(i)}
    for i in 0..n {
        let l = view.load(i);
        m.add_row(
            "load_link",
            format!("load_link_{}", i + 1),
            vec![(c[i], 1), (c[l], -1)],
            Sense::Eq,
            view.rho(i) - view.rho(l),
        );
    }
    for i in 0..n {
        m.add_row(
            "unload_link",
            format!("unload_link_{}", i + 1),
            vec![(c[i], 1), (c[view.unload(i)], -1)],
            Sense::Eq,
            0,
        );
    }

    if with_valid_inequalities {
        for k in 0..MACHINES {
            let mut terms = vec![(cmax, 1)];
            terms.extend((0..n).map(|j| (x[j][k], -instance.job(j).length())));
            m.add_row("workload", format!("workload_{}", k + 1), terms, Sense::Ge, 0);
        }
        // Machine 2 may only host job i if some lower-indexed job is on machine 1.
        for i in 0..n {
            let mut terms: Vec<(usize, i64)> = (0..i).map(|j| (x[j][0], 1)).collect();
            terms.push((x[i][1], -1));
            m.add_row("symmetry", format!("symmetry_{}", i + 1), terms, Sense::Ge, 0);
        }
    }

    let vars = CfVars { n, x, z, y, c, cmax };
    (m, vars)
}

/// Builds the completion-time model, optionally strengthened with the
/// per-machine workload inequalities and machine symmetry breaking.
pub fn build_cf(instance: &Instance, with_valid_inequalities: bool) -> MilpModel {
    build(instance, with_valid_inequalities).0
}

/// Closed-form size of the completion-time model as
/// `(binaries, continuous, rows)`.
pub fn cf_size(n: usize, with_valid_inequalities: bool) -> (usize, usize, usize) {
    let binaries = 2 * n + n * (n - 1) + 2 * n * (2 * n - 1);
    let continuous = 3 * n + 1;
    let mut rows = n // makespan
        + n // assign
        + 3 * n // release
        + 2 * n * (n - 1) // machine disjunctions
        + n * (n - 1) / 2 // machine order
        + 2 * n * (2 * n - 1) // server disjunctions
        + n * (2 * n - 1) // server order
        + 2 * n; // links
    if with_valid_inequalities {
        rows += 2 + n;
    }
    (binaries, continuous, rows)
}

/// Assignment of the completion-time variables that a schedule induces.
///
/// Orders on a machine and on the server follow completion times, ties
/// broken by index. With `relabel`, machines are swapped when needed so that
/// job 0 sits on machine 1, which the symmetry-breaking rows require.
fn assignment(instance: &Instance, schedule: &Schedule, vars: &CfVars, relabel: bool) -> Vec<i64> {
    let view = DummyJobView::new(instance);
    let n = vars.n;
    let total = vars.cmax + 1;
    let mut values = vec![0i64; total];
    let flip = relabel && schedule.machine[0] != 0;
    let mut completion = vec![0i64; 3 * n];
    for i in 0..n {
        let sigma = schedule.start[i];
        let job = instance.job(i);
        completion[i] = sigma + job.length();
        completion[view.load(i)] = sigma + job.loading;
        completion[view.unload(i)] = sigma + job.length();
        let k = if flip {
            1 - schedule.machine[i]
        } else {
            schedule.machine[i]
        };
        values[vars.x[i][k]] = 1;
    }
    let before = |a: usize, b: usize| (completion[a], a) < (completion[b], b);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[vars.z[i][j]] = before(i, j) as i64;
            }
        }
    }
    for a in view.server_ops() {
        for b in view.server_ops() {
            if a != b {
                values[vars.y[a - n][b - n]] = before(a, b) as i64;
            }
        }
    }
    for (i, &v) in vars.c.iter().enumerate() {
        values[v] = completion[i];
    }
    values[vars.cmax] = schedule.makespan;
    values
}

/// Tags of the completion-time rows a schedule violates, one entry per
/// violated row. Decoded schedules give an empty list.
pub fn check_cf(instance: &Instance, schedule: &Schedule) -> Vec<&'static str> {
    check(instance, schedule, false)
}

/// Like [`check_cf`] against the strengthened model, after relabeling the
/// machines so that job 0 runs on machine 1.
pub fn check_cf_plus(instance: &Instance, schedule: &Schedule) -> Vec<&'static str> {
    check(instance, schedule, true)
}

fn check(instance: &Instance, schedule: &Schedule, plus: bool) -> Vec<&'static str> {
    let (model, vars) = build(instance, plus);
    let values = assignment(instance, schedule, &vars, plus);
    model.violations(&values).into_iter().map(|v| v.tag).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::Permutation;
    use crate::schedule::decode;

    #[test]
    fn sizes_match_closed_form() {
        for n in 1..=6 {
            let jobs: Vec<_> = (0..n as i64).map(|i| (1 + i, 2, 3)).collect();
            let inst = Instance::new(&jobs).unwrap();
            for plus in [false, true] {
                let m = build_cf(&inst, plus);
                let (b, c, r) = cf_size(n, plus);
                assert_eq!(m.count_vars(VarKind::Binary), b);
                assert_eq!(m.count_vars(VarKind::Continuous), c);
                assert_eq!(m.constraints().len(), r);
                assert!(m.is_well_formed());
            }
        }
        assert_eq!(cf_size(2, false).0, 18);
    }

    #[test]
    fn plus_only_adds_rows() {
        let inst = Instance::new(&[(1, 2, 1), (2, 2, 2), (1, 5, 1)]).unwrap();
        let (cf, cfp) = (build_cf(&inst, false), build_cf(&inst, true));
        assert_eq!(cf.variables(), cfp.variables());
        assert_eq!(&cfp.constraints()[..cf.constraints().len()], cf.constraints());
        assert_eq!(cfp.count_rows("workload"), 2);
        assert_eq!(cfp.count_rows("symmetry"), 3);
    }

    #[test]
    fn single_job_model() {
        let inst = Instance::new(&[(2, 3, 4)]).unwrap();
        let m = build_cf(&inst, false);
        assert_eq!(m.count_rows("machine_disj"), 0);
        assert_eq!(m.count_rows("server_disj"), 2);
        let sched = decode(&inst, &Permutation::identity(1)).unwrap();
        assert!(check_cf(&inst, &sched).is_empty());
    }

    #[test]
    fn decoded_schedules_satisfy_both_models() {
        let inst = Instance::new(&[(2, 5, 1), (1, 3, 4), (3, 1, 2), (1, 6, 1), (2, 2, 2)]).unwrap();
        for order in [[0, 1, 2, 3, 4], [4, 3, 2, 1, 0], [2, 0, 4, 1, 3]] {
            let sched = decode(&inst, &Permutation::new(order.to_vec(), 5).unwrap()).unwrap();
            assert_eq!(check_cf(&inst, &sched), Vec::<&str>::new());
            assert_eq!(check_cf_plus(&inst, &sched), Vec::<&str>::new());
        }
    }

    #[test]
    fn overlapping_loads_break_server_rows() {
        let inst = Instance::new(&[(1, 1, 1), (1, 1, 1)]).unwrap();
        let sched = Schedule::from_assignment(&inst, vec![0, 0], vec![0, 1]).unwrap();
        let tags = check_cf(&inst, &sched);
        assert!(!tags.is_empty());
        assert!(tags.iter().all(|&t| t == "server_disj"));
    }
}
