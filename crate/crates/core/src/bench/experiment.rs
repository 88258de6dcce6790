use std::time::Duration;

use rayon::prelude::*;

use super::generator::{generate, GeneratorSpec};
use crate::bounds::{lb_t, HalfTime};
use crate::error::{Error, Result};
use crate::exact::{brute_force, DEFAULT_LIMIT_N};
use crate::instance::{Instance, Time};
use crate::metaheuristics::{AlphaMode, ClockMode, Method, SearchConfig, DEFAULT_K_MAX};
use crate::rng::derive_seed;

/// Version tag written as the first line of every CSV report.
pub const CSV_VERSION: &str = "# p2s1-bench v1";

pub const CSV_HEADER: [&str; 10] = [
    "instance",
    "n",
    "alpha",
    "method",
    "rep_best",
    "rep_avg",
    "lb_t",
    "gap_lbt_pct",
    "gap_dev_pct",
    "time_to_best_s",
];

/// Per-run time budget by instance size: 10 s up to 25 jobs, 100 s up to
/// 100 jobs, 300 s beyond.
pub fn default_time_limit(n: usize) -> Duration {
    match n {
        0..=25 => Duration::from_secs(10),
        26..=100 => Duration::from_secs(100),
        _ => Duration::from_secs(300),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Independent runs per (instance, method).
    pub replications: usize,
    /// `None` picks [`default_time_limit`] per instance.
    pub time_limit: Option<Duration>,
    pub k_max: usize,
    pub alpha: AlphaMode,
    pub master_seed: u64,
    pub clock: ClockMode,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    pub stop_at_lower_bound: bool,
    /// Solve instances with at most this many jobs exactly, use the optimum
    /// as a stopping target and report it. `None` disables the oracle.
    pub oracle_limit: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            replications: 10,
            time_limit: None,
            k_max: DEFAULT_K_MAX,
            alpha: AlphaMode::Uniform,
            master_seed: 0,
            clock: ClockMode::Wall,
            threads: 0,
            stop_at_lower_bound: true,
            oracle_limit: None,
        }
    }
}

/// Aggregated result of one method on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GapRow {
    pub instance: String,
    pub n: usize,
    pub alpha: String,
    pub method: Method,
    /// Best makespan over the replications.
    pub best: Time,
    /// Mean makespan over the replications.
    pub avg: f64,
    pub lb_t: HalfTime,
    /// `100 * (best - LB_T) / LB_T`.
    pub gap_lbt_pct: f64,
    /// `100 * (best - best_known) / best_known`, where `best_known` is the
    /// smallest `best` over all methods on the instance.
    pub gap_dev_pct: f64,
    /// Mean over replications of the time at which each run found its result.
    pub time_to_best: f64,
    /// Exact optimum over permutations, when the oracle ran.
    pub oracle: Option<Time>,
}

struct Run {
    makespan: Time,
    time_to_best: f64,
}

fn label(instance: &Instance, index: usize) -> (String, String, u64) {
    match instance.meta() {
        Some(m) => (m.label(), m.alpha_class.clone(), m.seed),
        None => (format!("instance{index:03}"), "-".to_string(), index as u64),
    }
}

/// Generates every cell and runs `methods` on the resulting instances.
pub fn run_experiment(cells: &[GeneratorSpec], methods: &[Method], config: &ExperimentConfig) -> Result<Vec<GapRow>> {
    let mut instances = Vec::new();
    for cell in cells {
        instances.extend(generate(cell)?);
    }
    run_on_instances(&instances, methods, config)
}

/// Runs every method `replications` times on every instance.
///
/// Each (instance, method, replication) is an independent task seeded from
/// the master seed, the instance seed, the method and the replication index,
/// so the rows do not depend on the thread count. With the wall clock the
/// number of iterations, and thus the results, can still vary between runs.
pub fn run_on_instances(instances: &[Instance], methods: &[Method], config: &ExperimentConfig) -> Result<Vec<GapRow>> {
    if methods.is_empty() {
        return Err(Error::invalid("no methods selected"));
    }
    if config.replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::Environment(format!("cannot start worker pool: {e}")))?;

    pool.install(|| {
        let oracles: Vec<Option<Time>> = instances
            .par_iter()
            .map(|inst| match config.oracle_limit {
                Some(limit) if inst.n() <= limit.min(DEFAULT_LIMIT_N) => {
                    brute_force(inst, limit).map(|r| Some(r.makespan))
                }
                _ => Ok(None),
            })
            .collect::<Result<_>>()?;

        let tasks: Vec<(usize, Method, usize)> = (0..instances.len())
            .flat_map(|i| {
                methods
                    .iter()
                    .flat_map(move |&m| (0..config.replications).map(move |r| (i, m, r)))
            })
            .collect();
        let runs: Vec<Run> = tasks
            .par_iter()
            .map(|&(i, method, rep)| {
                let inst = &instances[i];
                let (_, _, instance_seed) = label(inst, i);
                let search = SearchConfig {
                    time_limit: config.time_limit.unwrap_or_else(|| default_time_limit(inst.n())),
                    k_max: config.k_max,
                    alpha: config.alpha,
                    seed: derive_seed(config.master_seed, &[instance_seed, method as u64, rep as u64]),
                    clock: config.clock,
                    target: oracles[i],
                    stop_at_lower_bound: config.stop_at_lower_bound,
                    ..SearchConfig::default()
                };
                method.run(inst, &search).map(|r| Run {
                    makespan: r.makespan,
                    time_to_best: r.time_to_best,
                })
            })
            .collect::<Result<_>>()?;
        Ok(aggregate(instances, methods, config.replications, &runs, &oracles))
    })
}

fn aggregate(
    instances: &[Instance],
    methods: &[Method],
    replications: usize,
    runs: &[Run],
    oracles: &[Option<Time>],
) -> Vec<GapRow> {
    let mut rows = Vec::with_capacity(instances.len() * methods.len());
    let per_instance = methods.len() * replications;
    for (i, inst) in instances.iter().enumerate() {
        let (name, alpha, _) = label(inst, i);
        let lb = lb_t(inst);
        let block = &runs[i * per_instance..(i + 1) * per_instance];
        let bests: Vec<Time> = block
            .chunks(replications)
            .map(|c| c.iter().map(|r| r.makespan).min().expect("replications >= 1"))
            .collect();
        let best_known = *bests.iter().min().expect("methods non-empty");
        for ((&method, chunk), &best) in methods.iter().zip(block.chunks(replications)).zip(&bests) {
            let reps = chunk.len() as f64;
            let avg = chunk.iter().map(|r| r.makespan as f64).sum::<f64>() / reps;
            let time_to_best = chunk.iter().map(|r| r.time_to_best).sum::<f64>() / reps;
            rows.push(GapRow {
                instance: name.clone(),
                n: inst.n(),
                alpha: alpha.clone(),
                method,
                best,
                avg,
                lb_t: lb,
                gap_lbt_pct: 100.0 * (best as f64 - lb.to_f64()) / lb.to_f64(),
                gap_dev_pct: 100.0 * (best - best_known) as f64 / best_known as f64,
                time_to_best,
                oracle: oracles[i],
            });
        }
    }
    rows
}

/// Renders rows as CSV, preceded by the version line.
pub fn to_csv(rows: &[GapRow]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let wrap = |e: csv::Error| Error::Environment(format!("csv output: {e}"));
    writer.write_record(CSV_HEADER).map_err(wrap)?;
    for r in rows {
        writer
            .write_record([
                r.instance.clone(),
                r.n.to_string(),
                r.alpha.clone(),
                r.method.name().to_string(),
                r.best.to_string(),
                format!("{:.4}", r.avg),
                r.lb_t.to_string(),
                format!("{:.4}", r.gap_lbt_pct),
                format!("{:.4}", r.gap_dev_pct),
                format!("{:.6}", r.time_to_best),
            ])
            .map_err(wrap)?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::Environment(format!("csv output: {e}")))?;
    Ok(format!(
        "{CSV_VERSION}\n{}",
        String::from_utf8(body).expect("csv output is utf-8")
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::AlphaClass;

    fn quick(replications: usize) -> ExperimentConfig {
        ExperimentConfig {
            replications,
            time_limit: Some(Duration::from_millis(20)),
            clock: ClockMode::Virtual {
                evaluations_per_second: 50_000,
            },
            master_seed: 3,
            ..Default::default()
        }
    }

    #[test]
    fn default_limits_by_size() {
        assert_eq!(default_time_limit(8), Duration::from_secs(10));
        assert_eq!(default_time_limit(25), Duration::from_secs(10));
        assert_eq!(default_time_limit(50), Duration::from_secs(100));
        assert_eq!(default_time_limit(100), Duration::from_secs(100));
        assert_eq!(default_time_limit(250), Duration::from_secs(300));
    }

    #[test]
    fn serial_instances_give_zero_dev_gap() {
        let inst = Instance::new(&[(3, 2, 3), (4, 1, 4), (5, 2, 6), (7, 1, 3)]).unwrap();
        let rows = run_on_instances(std::slice::from_ref(&inst), &Method::ALL, &quick(2)).unwrap();
        assert_eq!(rows.len(), 3);
        for r in &rows {
            assert_eq!(r.best, inst.total_length());
            assert_eq!(r.gap_dev_pct, 0.0);
        }
    }

    #[test]
    fn single_replication_best_equals_avg() {
        let cell = GeneratorSpec::new(6, AlphaClass::A2, 1).with_replications(2);
        let rows = run_experiment(&[cell], &[Method::GvnsI], &quick(1)).unwrap();
        for r in rows {
            assert_eq!(r.best as f64, r.avg);
        }
    }

    #[test]
    fn rows_respect_gap_invariants() {
        let cells = [
            GeneratorSpec::new(7, AlphaClass::A3, 5).with_replications(3),
            GeneratorSpec::new(7, AlphaClass::A1, 5).with_replications(3),
        ];
        let config = ExperimentConfig {
            oracle_limit: Some(7),
            ..quick(2)
        };
        let rows = run_experiment(&cells, &Method::ALL, &config).unwrap();
        assert_eq!(rows.len(), 6 * 3);
        for chunk in rows.chunks(3) {
            assert!(chunk.iter().any(|r| r.gap_dev_pct == 0.0));
            for r in chunk {
                assert!(r.gap_lbt_pct >= 0.0 && r.gap_dev_pct >= 0.0);
                assert!(r.avg >= r.best as f64);
                assert!(r.oracle.unwrap() <= r.best);
            }
        }
    }

    #[test]
    fn csv_is_independent_of_thread_count() {
        let cell = GeneratorSpec::new(9, AlphaClass::A3, 11).with_replications(3);
        let one = ExperimentConfig { threads: 1, ..quick(2) };
        let four = ExperimentConfig { threads: 4, ..quick(2) };
        let a = to_csv(&run_experiment(std::slice::from_ref(&cell), &Method::ALL, &one).unwrap()).unwrap();
        let b = to_csv(&run_experiment(&[cell], &Method::ALL, &four).unwrap()).unwrap();
        assert_eq!(a, b);
        let mut lines = a.lines();
        assert_eq!(lines.next(), Some(CSV_VERSION));
        assert_eq!(lines.next(), Some(CSV_HEADER.join(",").as_str()));
        assert_eq!(a.lines().count(), 2 + 9);
    }

    #[test]
    fn empty_method_list_is_rejected() {
        let inst = Instance::new(&[(1, 1, 1)]).unwrap();
        assert!(matches!(
            run_on_instances(&[inst], &[], &quick(1)),
            Err(Error::InvalidInput(_))
        ));
    }
}
