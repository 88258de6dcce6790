use std::fmt;
use std::str::FromStr;

use rand::RngExt;

use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceMeta, Time};
use crate::rng::{derive_seed, search_rng};

/// Ratio class bounding loading and unloading times relative to processing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlphaClass {
    /// Ratios in `[0.01, 0.1]`.
    A1,
    /// Ratios in `[0.1, 0.2]`.
    A2,
    /// Ratios in `[0.1, 0.5]`.
    A3,
}

impl AlphaClass {
    pub const ALL: [AlphaClass; 3] = [AlphaClass::A1, AlphaClass::A2, AlphaClass::A3];

    pub fn range(self) -> (f64, f64) {
        match self {
            AlphaClass::A1 => (0.01, 0.1),
            AlphaClass::A2 => (0.1, 0.2),
            AlphaClass::A3 => (0.1, 0.5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlphaClass::A1 => "a1",
            AlphaClass::A2 => "a2",
            AlphaClass::A3 => "a3",
        }
    }

    fn code(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for AlphaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlphaClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" | "alpha1" | "1" => Ok(AlphaClass::A1),
            "a2" | "alpha2" | "2" => Ok(AlphaClass::A2),
            "a3" | "alpha3" | "3" => Ok(AlphaClass::A3),
            _ => Err(Error::invalid(format!(
                "unknown alpha class {s:?} (expected a1, a2 or a3)"
            ))),
        }
    }
}

/// Processing times are drawn uniformly from this inclusive range.
pub const PROCESSING_RANGE: (Time, Time) = (10, 100);

/// Replications per cell when none are requested.
pub const DEFAULT_REPLICATIONS: usize = 10;

/// One cell of generated instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub n: usize,
    pub alpha_class: AlphaClass,
    /// Number of instances in the cell.
    pub replications: usize,
    pub master_seed: u64,
    /// Use one ratio draw for both loading and unloading of a job instead of two.
    pub shared_alpha: bool,
}

impl GeneratorSpec {
    pub fn new(n: usize, alpha_class: AlphaClass, master_seed: u64) -> Self {
        GeneratorSpec {
            n,
            alpha_class,
            replications: DEFAULT_REPLICATIONS,
            master_seed,
            shared_alpha: false,
        }
    }

    pub fn with_replications(mut self, replications: usize) -> Self {
        self.replications = replications;
        self
    }

    /// Seed of instance `index` in this cell. Depends only on the master
    /// seed, `n`, the class and the index.
    pub fn instance_seed(&self, index: usize) -> u64 {
        derive_seed(
            self.master_seed,
            &[self.n as u64, self.alpha_class.code(), index as u64],
        )
    }
}

fn scaled(alpha: f64, p: Time) -> Time {
    ((alpha * p as f64).round() as Time).max(1)
}

/// Generates the instances of one cell.
///
/// Each job gets `p ~ U{10..100}`, then `s = max(1, round(a * p))` and
/// `t = max(1, round(a' * p))` with `a, a'` uniform in the class range
/// (drawn independently unless `shared_alpha` is set).
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<Instance>> {
    if spec.n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if spec.replications == 0 {
        return Err(Error::invalid("replications must be at least 1"));
    }
    let (lo, hi) = spec.alpha_class.range();
    (0..spec.replications)
        .map(|index| {
            let seed = spec.instance_seed(index);
            let mut rng = search_rng(seed);
            let jobs: Vec<(Time, Time, Time)> = (0..spec.n)
                .map(|_| {
                    let p = rng.random_range(PROCESSING_RANGE.0..=PROCESSING_RANGE.1);
                    let a_load = rng.random_range(lo..=hi);
                    let a_unload = if spec.shared_alpha {
                        a_load
                    } else {
                        rng.random_range(lo..=hi)
                    };
                    (scaled(a_load, p), p, scaled(a_unload, p))
                })
                .collect();
            Ok(Instance::new(&jobs)?.with_meta(InstanceMeta {
                seed,
                n: spec.n,
                alpha_class: spec.alpha_class.name().to_string(),
                index,
            }))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::recognize_polynomial_case;

    #[test]
    fn generation_is_deterministic() {
        let spec = GeneratorSpec::new(8, AlphaClass::A1, 42);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(
            a.iter().map(Instance::to_text).collect::<Vec<_>>(),
            b.iter().map(Instance::to_text).collect::<Vec<_>>()
        );
        assert_eq!(a[3].meta().unwrap().label(), "n8_a1_03");
    }

    #[test]
    fn cells_do_not_share_streams() {
        let a = generate(&GeneratorSpec::new(8, AlphaClass::A1, 42)).unwrap();
        let b = generate(&GeneratorSpec::new(8, AlphaClass::A2, 42)).unwrap();
        assert_ne!(a[0].to_text(), b[0].to_text());
        assert_ne!(a[0].to_text(), a[1].to_text());
    }

    #[test]
    fn durations_respect_class_ranges() {
        for class in AlphaClass::ALL {
            let (lo, hi) = class.range();
            let spec = GeneratorSpec::new(40, class, 9).with_replications(5);
            for inst in generate(&spec).unwrap() {
                for j in inst.jobs() {
                    assert!((10..=100).contains(&j.processing));
                    for x in [j.loading, j.unloading] {
                        assert!((1..=50).contains(&x));
                        assert!(x >= scaled(lo, j.processing) && x <= scaled(hi, j.processing));
                    }
                }
            }
        }
    }

    #[test]
    fn shared_alpha_ties_loading_to_unloading() {
        let spec = GeneratorSpec {
            shared_alpha: true,
            ..GeneratorSpec::new(30, AlphaClass::A3, 5)
        };
        for inst in generate(&spec).unwrap() {
            assert!(inst.jobs().iter().all(|j| j.loading == j.unloading));
        }
    }

    #[test]
    fn recognizer_runs_on_generated_instances() {
        let spec = GeneratorSpec::new(12, AlphaClass::A1, 1).with_replications(100);
        for inst in generate(&spec).unwrap() {
            let _ = recognize_polynomial_case(&inst);
        }
    }

    #[test]
    fn rejects_empty_cells() {
        assert!(generate(&GeneratorSpec::new(0, AlphaClass::A1, 1)).is_err());
        assert!(generate(&GeneratorSpec::new(3, AlphaClass::A1, 1).with_replications(0)).is_err());
    }

    #[test]
    fn alpha_names_parse() {
        for c in AlphaClass::ALL {
            assert_eq!(c.name().parse::<AlphaClass>().unwrap(), c);
        }
        assert!("a4".parse::<AlphaClass>().is_err());
    }
}
