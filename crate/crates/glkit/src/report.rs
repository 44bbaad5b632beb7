//! Versioned verification reports: per-check records, aggregate verdicts and
//! JSON / CSV / text rendering.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "glkit-report/1";

/// Exact identities are `Hard`; fitted-constant empirical bounds are `Soft`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Severity {
    Hard,
    Soft,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Fail,
    Warn,
    BudgetExceeded,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Warn => "warn",
            Status::BudgetExceeded => "budget-exceeded",
        }
    }
}

/// How `measured` is compared with `bound`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Exact,
    AtMost,
    Above,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub anchor: String,
    pub severity: Severity,
    pub status: Status,
    pub relation: Relation,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    pub detail: String,
    pub runtime_ms: Option<f64>,
}

impl Check {
    /// A hard check of an exact identity.
    pub fn exact(name: &str, anchor: &str, holds: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            severity: Severity::Hard,
            status: if holds { Status::Pass } else { Status::Fail },
            relation: Relation::Exact,
            measured: None,
            bound: None,
            ratio: None,
            detail: detail.into(),
            runtime_ms: None,
        }
    }

    /// `measured ≤ bound`; a soft violation is a warning.
    pub fn bounded(name: &str, anchor: &str, severity: Severity, measured: f64, bound: f64) -> Self {
        let mut c = Check {
            name: name.into(),
            anchor: anchor.into(),
            severity,
            status: Status::Pass,
            relation: Relation::AtMost,
            measured: Some(measured),
            bound: Some(bound),
            ratio: None,
            detail: String::new(),
            runtime_ms: None,
        };
        c.reassess();
        c
    }

    /// `measured > bound`, reported with `bound / measured` as the ratio.
    pub fn exceeds(name: &str, anchor: &str, severity: Severity, measured: f64, bound: f64) -> Self {
        let mut c = Check {
            name: name.into(),
            anchor: anchor.into(),
            severity,
            status: Status::Pass,
            relation: Relation::Above,
            measured: Some(measured),
            bound: Some(bound),
            ratio: None,
            detail: String::new(),
            runtime_ms: None,
        };
        c.reassess();
        c
    }

    /// A measured quantity with no pass criterion of its own.
    pub fn info(name: &str, anchor: &str, measured: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            anchor: anchor.into(),
            severity: Severity::Soft,
            status: Status::Pass,
            relation: Relation::Info,
            measured: Some(measured),
            bound: None,
            ratio: None,
            detail: detail.into(),
            runtime_ms: None,
        }
    }

    /// Marker for a suite stopped at its time budget.
    pub fn budget_exceeded(name: &str, budget_secs: f64) -> Self {
        Check {
            name: name.into(),
            anchor: "budget-exceeded".into(),
            severity: Severity::Hard,
            status: Status::BudgetExceeded,
            relation: Relation::Info,
            measured: None,
            bound: Some(budget_secs),
            ratio: None,
            detail: format!("suite did not finish within {budget_secs} s"),
            runtime_ms: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn with_runtime(mut self, ms: f64) -> Self {
        self.runtime_ms = Some(ms);
        self
    }

    fn reassess(&mut self) {
        if let (Some(m), Some(b)) = (self.measured, self.bound) {
            match self.relation {
                Relation::Above => {
                    self.status = verdict(self.severity, m > b);
                    self.ratio = (m != 0.0).then(|| b / m);
                }
                Relation::AtMost => {
                    self.status = verdict(self.severity, m <= b);
                    self.ratio = (b != 0.0).then(|| m / b);
                }
                Relation::Exact | Relation::Info => {}
            }
        }
    }
}

fn verdict(severity: Severity, holds: bool) -> Status {
    match (holds, severity) {
        (true, _) => Status::Pass,
        (false, Severity::Hard) => Status::Fail,
        (false, Severity::Soft) => Status::Warn,
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push<S: ToString>(&mut self, row: impl IntoIterator<Item = S>) {
        self.rows.push(row.into_iter().map(|x| x.to_string()).collect());
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub checks: usize,
    pub passed: usize,
    pub failed: usize,
    pub warnings: usize,
    pub budget_exceeded: usize,
    pub verdict: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub seed: Option<u64>,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub table: Option<Table>,
    pub summary: Summary,
    pub runtime_ms: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(format!("unknown format {other:?}; expected json, csv or text")),
        }
    }
}

impl Report {
    pub fn new(suite: &str, seed: Option<u64>) -> Self {
        Report {
            schema: SCHEMA_VERSION.into(),
            suite: suite.into(),
            seed,
            params: BTreeMap::new(),
            checks: Vec::new(),
            table: None,
            summary: Summary::default(),
            runtime_ms: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, check: Check) -> &mut Self {
        self.checks.push(check);
        self
    }

    /// Replace the bound of every soft check named in `overrides` and re-grade it.
    pub fn apply_tolerances(&mut self, overrides: &BTreeMap<String, f64>) {
        for c in &mut self.checks {
            if let (Severity::Soft, Some(&b), Some(_)) = (c.severity, overrides.get(&c.name), c.bound) {
                c.bound = Some(b);
                c.reassess();
            }
        }
    }

    /// Treat soft checks as hard, turning warnings into failures.
    pub fn harden(&mut self) {
        for c in &mut self.checks {
            if c.severity == Severity::Soft {
                c.severity = Severity::Hard;
                if c.status == Status::Warn {
                    c.status = Status::Fail;
                }
            }
        }
    }

    /// Recompute the aggregate summary from the checks.
    pub fn finish(&mut self) -> &mut Self {
        let count = |s: Status| self.checks.iter().filter(|c| c.status == s).count();
        let (passed, failed, warnings, budget) =
            (count(Status::Pass), count(Status::Fail), count(Status::Warn), count(Status::BudgetExceeded));
        let verdict = if budget > 0 {
            "budget-exceeded"
        } else if failed > 0 {
            "fail"
        } else if warnings > 0 {
            "pass-with-warnings"
        } else {
            "pass"
        };
        self.summary = Summary { checks: self.checks.len(), passed, failed, warnings, budget_exceeded: budget, verdict: verdict.into() };
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| matches!(c.status, Status::Pass | Status::Warn))
    }

    /// 0 when every hard check passes and soft checks at most warn, else 1.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Drop every timing field so reports compare byte for byte.
    pub fn strip_timing(&mut self) {
        self.runtime_ms = None;
        for c in &mut self.checks {
            c.runtime_ms = None;
        }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => self.emit_csv(),
            Format::Text => self.emit_text(),
        }
    }

    fn emit_csv(&self) -> String {
        let mut out = String::new();
        let row = |out: &mut String, cells: &[String]| {
            let line: Vec<String> = cells.iter().map(|c| csv_escape(c)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        };
        match &self.table {
            Some(t) => {
                row(&mut out, &t.columns);
                for r in &t.rows {
                    row(&mut out, r);
                }
            }
            None => {
                let header = ["suite", "name", "severity", "status", "measured", "bound", "ratio", "anchor", "detail"];
                row(&mut out, &header.map(String::from));
                for c in &self.checks {
                    row(
                        &mut out,
                        &[
                            self.suite.clone(),
                            c.name.clone(),
                            format!("{:?}", c.severity).to_lowercase(),
                            c.status.as_str().into(),
                            opt(c.measured),
                            opt(c.bound),
                            opt(c.ratio),
                            c.anchor.clone(),
                            c.detail.clone(),
                        ],
                    );
                }
            }
        }
        out
    }

    fn emit_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} [{}] seed={}", self.suite, self.schema, self.seed.map_or("none".into(), |s| s.to_string()));
        for (k, v) in &self.params {
            let _ = writeln!(out, "  {k} = {v}");
        }
        for c in &self.checks {
            let _ = write!(out, "  {:<15} {:<4} {}", c.status.as_str(), if c.severity == Severity::Hard { "hard" } else { "soft" }, c.name);
            if let Some(m) = c.measured {
                let _ = write!(out, "  measured={m:.6e}");
            }
            if let Some(b) = c.bound {
                let _ = write!(out, " bound={b:.6e}");
            }
            if !c.detail.is_empty() {
                let _ = write!(out, "  ({})", c.detail);
            }
            let _ = writeln!(out, "\n      anchor: {}", c.anchor);
        }
        let s = &self.summary;
        let _ = writeln!(out, "  => {} ({} checks: {} pass, {} fail, {} warn, {} budget-exceeded)", s.verdict, s.checks, s.passed, s.failed, s.warnings, s.budget_exceeded);
        out
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Several suite reports combined, ordered by suite name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergedReport {
    pub schema: String,
    pub reports: Vec<Report>,
    pub summary: Summary,
}

pub fn merge(mut reports: Vec<Report>) -> Result<MergedReport, String> {
    if let Some(r) = reports.iter().find(|r| r.schema != SCHEMA_VERSION) {
        return Err(format!("suite {} has schema {}, expected {SCHEMA_VERSION}", r.suite, r.schema));
    }
    reports.sort_by(|a, b| a.suite.cmp(&b.suite).then(a.params.cmp(&b.params)));
    let mut all = Report::new("merged", None);
    all.checks = reports.iter().flat_map(|r| r.checks.clone()).collect();
    all.finish();
    Ok(MergedReport { schema: SCHEMA_VERSION.into(), reports, summary: all.summary })
}

impl MergedReport {
    pub fn exit_code(&self) -> i32 {
        if self.summary.failed + self.summary.budget_exceeded == 0 {
            0
        } else {
            1
        }
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = String::new();
                for (i, r) in self.reports.iter().enumerate() {
                    let mut flat = r.clone();
                    flat.table = None;
                    let body = flat.emit_csv();
                    out.push_str(if i == 0 { &body } else { body.split_once('\n').map_or("", |x| x.1) });
                }
                out
            }
            Format::Text => {
                let mut out: String = self.reports.iter().map(|r| r.emit_text()).collect();
                let s = &self.summary;
                let _ = writeln!(out, "merged => {} ({} checks: {} pass, {} fail, {} warn)", s.verdict, s.checks, s.passed, s.failed, s.warnings);
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(suite: &str) -> Report {
        let mut r = Report::new(suite, Some(7));
        r.param("n", 2);
        r.push(Check::exact("identity", "det(X + e)", true, ""));
        r.push(Check::bounded("fitted", "t†", Severity::Soft, 3.0, 2.0).with_runtime(12.25));
        r.finish();
        r
    }

    #[test]
    fn soft_failure_warns_until_hardened() {
        let mut r = sample("a");
        assert_eq!(r.checks[1].status, Status::Warn);
        assert_eq!(r.summary.verdict, "pass-with-warnings");
        assert_eq!(r.exit_code(), 0);
        r.harden();
        r.finish();
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn tolerance_override_regrades() {
        let mut r = sample("a");
        r.apply_tolerances(&BTreeMap::from([("fitted".to_string(), 4.0)]));
        r.finish();
        assert_eq!(r.summary.verdict, "pass");
        assert_eq!(r.checks[1].ratio, Some(0.75));
    }

    #[test]
    fn json_round_trip_and_timing_strip() {
        let mut r = sample("a");
        let back: Report = serde_json::from_str(&r.emit(Format::Json)).unwrap();
        assert_eq!(back, r);
        r.strip_timing();
        assert!(!r.emit(Format::Json).contains("12.25"));
    }

    #[test]
    fn merge_orders_by_suite() {
        let m = merge(vec![sample("z"), sample("b")]).unwrap();
        assert_eq!(m.reports[0].suite, "b");
        assert_eq!(m.summary.checks, 4);
        let csv = m.emit(Format::Csv);
        assert_eq!(csv.lines().count(), 5);
        let mut bad = sample("c");
        bad.schema = "other/0".into();
        assert!(merge(vec![bad]).is_err());
    }

    #[test]
    fn csv_escapes_and_table() {
        let mut r = sample("a");
        let mut t = Table::new(["n", "delta"]);
        t.push(["2", "1/60"]);
        r.table = Some(t);
        assert_eq!(r.emit(Format::Csv), "n,delta\n2,1/60\n");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
    }
}
