//! Jobs, instances and the plain-text instance format.
//!
//! The text format is one instance per file: the first line holds the job
//! count `n`, followed by `n` lines of `s p t` (loading, processing and
//! unloading durations). [`Instance::to_text`] emits exactly this layout and
//! [`Instance::parse`] reads it back.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Integer time unit shared by every schedule quantity.
pub type Time = i64;

/// A job: loaded by the server, processed on a machine, unloaded by the server,
/// with no delay between the three phases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Job {
    pub id: usize,
    pub loading: Time,
    pub processing: Time,
    pub unloading: Time,
}

impl Job {
    /// Total machine occupancy `s + p + t`.
    #[inline]
    pub fn length(&self) -> Time {
        self.loading + self.processing + self.unloading
    }

    /// Server occupancy `s + t`.
    #[inline]
    pub fn server_time(&self) -> Time {
        self.loading + self.unloading
    }

    /// Offset from the job start to the beginning of its unloading phase.
    #[inline]
    pub fn unload_offset(&self) -> Time {
        self.loading + self.processing
    }
}

/// Provenance of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMeta {
    pub seed: u64,
    pub n: usize,
    pub alpha_class: String,
    pub index: usize,
}

impl InstanceMeta {
    /// Stable label such as `n8_a1_03`.
    pub fn label(&self) -> String {
        format!("n{}_{}_{:02}", self.n, self.alpha_class, self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    jobs: Vec<Job>,
    meta: Option<InstanceMeta>,
}

impl Instance {
    /// Builds an instance from `(s, p, t)` triples; job ids follow the input order.
    pub fn new(durations: &[(Time, Time, Time)]) -> Result<Self> {
        if durations.is_empty() {
            return Err(Error::invalid("an instance needs at least one job"));
        }
        let jobs = durations
            .iter()
            .enumerate()
            .map(|(id, &(s, p, t))| {
                if s < 1 || p < 1 || t < 1 {
                    return Err(Error::invalid(format!(
                        "job {id}: durations must be positive, got ({s}, {p}, {t})"
                    )));
                }
                Ok(Job {
                    id,
                    loading: s,
                    processing: p,
                    unloading: t,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Instance { jobs, meta: None })
    }

    pub fn with_meta(mut self, meta: InstanceMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    #[inline]
    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    #[inline]
    pub fn job(&self, id: usize) -> &Job {
        &self.jobs[id]
    }

    pub fn meta(&self) -> Option<&InstanceMeta> {
        self.meta.as_ref()
    }

    /// `Σ A_j`: the serial schedule length, used as default horizon and big-M.
    pub fn total_length(&self) -> Time {
        self.jobs.iter().map(Job::length).sum()
    }

    pub fn max_length(&self) -> Time {
        self.jobs.iter().map(Job::length).max().unwrap_or(0)
    }

    pub fn durations(&self) -> Vec<(Time, Time, Time)> {
        self.jobs
            .iter()
            .map(|j| (j.loading, j.processing, j.unloading))
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(12 * (self.n() + 1));
        let _ = writeln!(out, "{}", self.n());
        for j in &self.jobs {
            let _ = writeln!(out, "{} {} {}", j.loading, j.processing, j.unloading);
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());

        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            message: "empty input".into(),
        })?;
        let n: usize = header.parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("expected job count, found {header:?}"),
        })?;

        let mut durations = Vec::with_capacity(n);
        for (line_no, line) in lines.by_ref() {
            let fields = line
                .split_whitespace()
                .map(|f| f.parse::<Time>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: line_no,
                    message: e.to_string(),
                })?;
            let [s, p, t] = fields[..] else {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("expected 3 integers, found {}", fields.len()),
                });
            };
            durations.push((s, p, t));
            if durations.len() > n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("more than the declared {n} jobs"),
                });
            }
        }
        if durations.len() != n {
            return Err(Error::Parse {
                line: line_no,
                message: format!("declared {n} jobs, found {}", durations.len()),
            });
        }
        Instance::new(&durations)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Instance::parse(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn job_length_is_sum_of_phases() {
        let inst = Instance::new(&[(2, 3, 4)]).unwrap();
        assert_eq!(inst.job(0).length(), 9);
        assert_eq!(inst.total_length(), 9);
    }

    #[test]
    fn rejects_non_positive_durations() {
        assert!(Instance::new(&[(0, 1, 1)]).is_err());
        assert!(Instance::new(&[(1, 0, 1)]).is_err());
        assert!(Instance::new(&[(1, 1, -3)]).is_err());
        assert!(Instance::new(&[]).is_err());
    }

    #[test]
    fn text_layout() {
        let inst = Instance::new(&[(1, 2, 1), (3, 4, 5)]).unwrap();
        assert_eq!(inst.to_text(), "2\n1 2 1\n3 4 5\n");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match Instance::parse("2\n1 2 3\n4 5\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Instance::parse("").is_err());
        assert!(Instance::parse("3\n1 1 1\n").is_err());
        assert!(Instance::parse("1\n1 1 1\n2 2 2\n").is_err());
        assert!(Instance::parse("x\n").is_err());
    }

    #[test]
    fn large_totals_do_not_overflow() {
        let inst = Instance::new(&vec![(100, 100, 100); 500]).unwrap();
        assert_eq!(inst.total_length(), 150_000);
    }

    proptest! {
        #[test]
        fn text_round_trip(jobs in prop::collection::vec((1i64..300, 1i64..300, 1i64..300), 1..40)) {
            let inst = Instance::new(&jobs).unwrap();
            let text = inst.to_text();
            let back = Instance::parse(&text).unwrap();
            prop_assert_eq!(&back, &inst);
            prop_assert_eq!(back.to_text(), text);
        }
    }
}
