use std::collections::HashMap;
use std::fmt::{self, Write as _};

use crate::instance::{Instance, Time};

/// Jobs and their server operations as one index space of size `3n`.
///
/// Index `i < n` is the whole job `i`, `n + i` is its loading operation and
/// `2n + i` its unloading operation, with durations `A_i`, `s_i` and `t_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DummyJobView {
    n: usize,
    rho: Vec<Time>,
}

impl DummyJobView {
    pub fn new(instance: &Instance) -> Self {
        let jobs = instance.jobs();
        let rho = jobs
            .iter()
            .map(|j| j.length())
            .chain(jobs.iter().map(|j| j.loading))
            .chain(jobs.iter().map(|j| j.unloading))
            .collect();
        DummyJobView { n: instance.n(), rho }
    }

    /// Number of real jobs.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of the index space, always `3n`.
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self, index: usize) -> Time {
        self.rho[index]
    }

    pub fn rhos(&self) -> &[Time] {
        &self.rho
    }

    pub fn load(&self, job: usize) -> usize {
        self.n + job
    }

    pub fn unload(&self, job: usize) -> usize {
        2 * self.n + job
    }

    /// Indices of all server operations (loading then unloading).
    pub fn server_ops(&self) -> std::ops::Range<usize> {
        self.n..3 * self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    /// Continuous and non-negative.
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }

    fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            Sense::Le => lhs <= rhs,
            Sense::Ge => lhs >= rhs,
            Sense::Eq => lhs == rhs,
        }
    }
}

/// A linear row `Σ coef·var (sense) rhs`. Coefficients are integral because
/// every duration is.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    /// Constraint family, shared by all rows built from the same template.
    pub tag: &'static str,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

/// A row that an assignment fails, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowViolation {
    pub tag: &'static str,
    pub name: String,
    pub lhs: i64,
    pub rhs: i64,
}

impl fmt::Display for RowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: lhs {} vs rhs {}", self.name, self.tag, self.lhs, self.rhs)
    }
}

/// A minimization model over binary and non-negative continuous variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MilpModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: usize,
    index: HashMap<String, usize>,
}

impl MilpModel {
    pub(crate) fn new(name: impl Into<String>) -> Self {
        MilpModel {
            name: name.into(),
            variables: Vec::new(),
            constraints: Vec::new(),
            objective: 0,
            index: HashMap::new(),
        }
    }

    pub(crate) fn add_var(&mut self, name: String, kind: VarKind) -> usize {
        let id = self.variables.len();
        let previous = self.index.insert(name.clone(), id);
        debug_assert!(previous.is_none(), "duplicate variable {name}");
        self.variables.push(Variable { name, kind });
        id
    }

    pub(crate) fn add_row(
        &mut self,
        tag: &'static str,
        name: String,
        terms: Vec<(usize, i64)>,
        sense: Sense,
        rhs: i64,
    ) {
        debug_assert!(terms.iter().all(|&(v, _)| v < self.variables.len()));
        self.constraints.push(Constraint {
            name,
            tag,
            terms,
            sense,
            rhs,
        });
    }

    pub(crate) fn set_objective(&mut self, var: usize) {
        self.objective = var;
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// The variable minimized by the objective.
    pub fn objective(&self) -> usize {
        self.objective
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn count_vars(&self, kind: VarKind) -> usize {
        self.variables.iter().filter(|v| v.kind == kind).count()
    }

    pub fn count_rows(&self, tag: &str) -> usize {
        self.constraints.iter().filter(|c| c.tag == tag).count()
    }

    /// True when every row refers only to declared variables.
    pub fn is_well_formed(&self) -> bool {
        self.objective < self.variables.len()
            && self
                .constraints
                .iter()
                .all(|c| c.terms.iter().all(|&(v, _)| v < self.variables.len()))
    }

    /// Rows violated by `values` (indexed like [`MilpModel::variables`]),
    /// plus a pseudo-row for any binary outside {0, 1} or negative continuous value.
    pub fn violations(&self, values: &[i64]) -> Vec<RowViolation> {
        assert_eq!(values.len(), self.variables.len(), "one value per variable");
        let mut out: Vec<RowViolation> = self
            .variables
            .iter()
            .zip(values)
            .filter(|(v, &x)| match v.kind {
                VarKind::Binary => !(0..=1).contains(&x),
                VarKind::Continuous => x < 0,
            })
            .map(|(v, &x)| RowViolation {
                tag: "domain",
                name: v.name.clone(),
                lhs: x,
                rhs: 0,
            })
            .collect();
        for c in &self.constraints {
            let lhs: i64 = c.terms.iter().map(|&(v, a)| a * values[v]).sum();
            if !c.sense.holds(lhs, c.rhs) {
                out.push(RowViolation {
                    tag: c.tag,
                    name: c.name.clone(),
                    lhs,
                    rhs: c.rhs,
                });
            }
        }
        out
    }
}

const LINE_WIDTH: usize = 78;

/// Appends `piece` to `out`, starting a continuation line when the current
/// one would grow past the width limit.
fn push_wrapped(out: &mut String, line_len: &mut usize, piece: &str) {
    if *line_len + 1 + piece.len() > LINE_WIDTH && *line_len > 3 {
        out.push_str("\n  ");
        *line_len = 2;
    }
    out.push(' ');
    out.push_str(piece);
    *line_len += 1 + piece.len();
}

fn term_text(first: bool, coef: i64, name: &str) -> String {
    let sign = match (first, coef < 0) {
        (true, false) => "",
        (true, true) => "-",
        (false, false) => "+ ",
        (false, true) => "- ",
    };
    match coef.abs() {
        1 => format!("{sign}{name}"),
        a => format!("{sign}{a} {name}"),
    }
}

/// Renders the model in CPLEX LP format.
///
/// Rows keep the order in which they were built, long rows are wrapped onto
/// indented continuation lines, and the `Binaries` section is left out when
/// the model has no binary variables.
pub fn export_lp(model: &MilpModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ Model {}", model.name);
    let _ = writeln!(
        out,
        "\\ {} variables, {} constraints",
        model.variables.len(),
        model.constraints.len()
    );
    out.push_str("Minimize\n");
    let _ = writeln!(out, " obj: {}", model.variables[model.objective].name);
    out.push_str("Subject To\n");
    for c in &model.constraints {
        let head = format!(" {}:", c.name);
        let mut line_len = head.len();
        out.push_str(&head);
        for (k, &(v, a)) in c.terms.iter().enumerate() {
            push_wrapped(&mut out, &mut line_len, &term_text(k == 0, a, &model.variables[v].name));
        }
        push_wrapped(&mut out, &mut line_len, &format!("{} {}", c.sense.symbol(), c.rhs));
        out.push('\n');
    }
    out.push_str("Bounds\n");
    for v in model.variables.iter().filter(|v| v.kind == VarKind::Continuous) {
        let _ = writeln!(out, " {} >= 0", v.name);
    }
    let binaries: Vec<&str> = model
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Binary)
        .map(|v| v.name.as_str())
        .collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        let mut line_len = 0;
        for name in binaries {
            push_wrapped(&mut out, &mut line_len, name);
        }
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dummy_view_layout() {
        let inst = Instance::new(&[(1, 2, 3), (4, 5, 6)]).unwrap();
        let v = DummyJobView::new(&inst);
        assert_eq!(v.rhos(), &[6, 15, 1, 4, 3, 6]);
        assert_eq!(v.load(1), 3);
        assert_eq!(v.unload(0), 4);
        assert_eq!(v.server_ops(), 2..6);
    }

    #[test]
    fn continuous_only_model_has_no_binaries_section() {
        let mut m = MilpModel::new("tiny");
        let x = m.add_var("x".into(), VarKind::Continuous);
        m.add_row("floor", "floor_1".into(), vec![(x, 1)], Sense::Ge, 3);
        m.set_objective(x);
        let lp = export_lp(&m);
        assert!(!lp.contains("Binaries"));
        assert_eq!(
            lp,
            "\\ Model tiny\n\\ 1 variables, 1 constraints\nMinimize\n obj: x\nSubject To\n floor_1: x >= 3\nBounds\n x >= 0\nEnd\n"
        );
    }

    #[test]
    fn term_signs() {
        assert_eq!(term_text(true, 1, "a"), "a");
        assert_eq!(term_text(true, -1, "a"), "-a");
        assert_eq!(term_text(false, 3, "a"), "+ 3 a");
        assert_eq!(term_text(false, -7, "a"), "- 7 a");
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = MilpModel::new("wide");
        let vars: Vec<usize> = (0..40).map(|i| m.add_var(format!("x_{i}"), VarKind::Binary)).collect();
        m.add_row(
            "cap",
            "cap_0".into(),
            vars.iter().map(|&v| (v, 1)).collect(),
            Sense::Le,
            1,
        );
        let lp = export_lp(&m);
        assert!(lp.lines().all(|l| l.len() <= LINE_WIDTH));
        assert!(lp.lines().filter(|l| l.starts_with("  ")).count() >= 2);
    }

    #[test]
    fn violations_report_rows_and_domains() {
        let mut m = MilpModel::new("v");
        let a = m.add_var("a".into(), VarKind::Binary);
        let b = m.add_var("b".into(), VarKind::Continuous);
        m.add_row("sum", "sum_1".into(), vec![(a, 1), (b, 1)], Sense::Eq, 2);
        assert!(m.violations(&[1, 1]).is_empty());
        let v = m.violations(&[3, -1]);
        assert_eq!(v.iter().filter(|r| r.tag == "domain").count(), 2);
        assert!(v.iter().all(|r| r.tag != "sum"));
        assert_eq!(m.violations(&[0, 1])[0].tag, "sum");
    }
}
