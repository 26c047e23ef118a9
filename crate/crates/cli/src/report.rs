//! Typed result tables and verification reports with pretty, CSV, and JSON
//! renderers. Everything outside the footer is a pure function of the inputs;
//! wall-clock time is confined to the footer (a trailing `# `-prefixed line
//! for pretty/CSV, a `wall_ms` field for JSON) so that report bodies can be
//! compared byte for byte across runs.

use num_rational::BigRational;
use serde_json::{json, Value};
use std::fmt;
use std::time::Duration;

/// Output format selector shared by every command.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Format {
    #[default]
    Pretty,
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "pretty" => Ok(Format::Pretty),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!(
                "unknown format {other:?} (expected pretty, csv, or json)"
            )),
        }
    }
}

/// A single table cell. Numeric cells stay exact; polynomials and labels are
/// carried as their canonical display strings.
#[derive(Clone, PartialEq, Debug)]
pub enum Cell {
    Int(i128),
    Rat(BigRational),
    Text(String),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    fn kind(&self) -> &'static str {
        match self {
            Cell::Int(_) => "int",
            Cell::Rat(_) => "rational",
            Cell::Text(_) => "text",
        }
    }

    fn is_numeric(&self) -> bool {
        !matches!(self, Cell::Text(_))
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(n) => i64::try_from(*n)
                .map(Value::from)
                .unwrap_or_else(|_| Value::from(n.to_string())),
            Cell::Rat(r) => Value::from(r.to_string()),
            Cell::Text(s) => Value::from(s.clone()),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Rat(r) => write!(f, "{r}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

/// Quote a CSV field when it contains a delimiter, quote, or newline.
fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// A rectangular table of typed cells: fixed column names, every row the same
/// arity, and every column homogeneous in cell kind.
#[derive(Clone, Debug, Default)]
pub struct ResultTable {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl ResultTable {
    pub fn new(columns: &[&str]) -> ResultTable {
        ResultTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Append a row. Arity and per-column kind mismatches are programming
    /// errors in the caller, so they panic rather than bubble up.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity {} does not match {} columns",
            row.len(),
            self.columns.len()
        );
        if let Some(first) = self.rows.first() {
            for (i, (a, b)) in first.iter().zip(&row).enumerate() {
                assert_eq!(
                    a.kind(),
                    b.kind(),
                    "column {:?} holds {} cells, got {}",
                    self.columns[i],
                    a.kind(),
                    b.kind()
                );
            }
        }
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn to_json(&self) -> Value {
        json!({
            "columns": self.columns,
            "rows": self.rows.iter()
                .map(|r| Value::from(r.iter().map(Cell::to_json).collect::<Vec<_>>()))
                .collect::<Vec<_>>(),
        })
    }

    fn render_pretty(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        let rendered: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(Cell::to_string).collect())
            .collect();
        for row in &rendered {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let mut out = String::new();
        for (i, (name, w)) in self.columns.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{name:<w$}"));
        }
        out = out.trim_end().to_string();
        out.push('\n');
        for (i, w) in widths.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&"-".repeat(*w));
        }
        out.push('\n');
        for (row, cells) in self.rows.iter().zip(&rendered) {
            let mut line = String::new();
            for (i, ((cell, raw), w)) in row.iter().zip(cells).zip(&widths).enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                if cell.is_numeric() {
                    line.push_str(&format!("{raw:>w$}"));
                } else {
                    line.push_str(&format!("{raw:<w$}"));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }

    fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            &self
                .columns
                .iter()
                .map(|c| csv_field(c))
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push('\n');
        for row in &self.rows {
            out.push_str(
                &row.iter()
                    .map(|c| csv_field(&c.to_string()))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Pretty => self.render_pretty(),
            Format::Csv => self.render_csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json())
                    .expect("table serialization cannot fail");
                s.push('\n');
                s
            }
        }
    }
}

/// Outcome of one verification check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Status {
    Pass,
    Fail,
    Skip(String),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip(_) => "SKIP",
        }
    }
}

/// One named check inside a suite: the inputs it ran on, the expected and
/// observed values as canonical strings, and its status. A failing check
/// carries enough in `inputs` to reproduce it.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: String,
    pub inputs: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

impl CheckResult {
    /// Pass/fail by exact string comparison of expected and observed values.
    pub fn compare(
        name: impl Into<String>,
        inputs: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
    ) -> CheckResult {
        let expected = expected.into();
        let actual = actual.into();
        let status = if expected == actual {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckResult {
            name: name.into(),
            inputs: inputs.into(),
            expected,
            actual,
            status,
        }
    }

    pub fn skip(
        name: impl Into<String>,
        inputs: impl Into<String>,
        reason: impl Into<String>,
    ) -> CheckResult {
        CheckResult {
            name: name.into(),
            inputs: inputs.into(),
            expected: String::new(),
            actual: String::new(),
            status: Status::Skip(reason.into()),
        }
    }
}

/// Result of one verification suite: per-check outcomes, the realized
/// expansion sign when the suite measures one, and the wall time.
#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub epsilon_sign: Option<i64>,
    pub wall: Duration,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> VerificationReport {
        VerificationReport {
            suite: suite.into(),
            checks: Vec::new(),
            epsilon_sign: None,
            wall: Duration::ZERO,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    /// (passed, failed, skipped) counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for check in &self.checks {
            match check.status {
                Status::Pass => c.0 += 1,
                Status::Fail => c.1 += 1,
                Status::Skip(_) => c.2 += 1,
            }
        }
        c
    }

    /// True when no check failed (skips do not count against the suite).
    pub fn passed(&self) -> bool {
        self.counts().1 == 0
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new(&["check", "inputs", "expected", "actual", "status"]);
        for c in &self.checks {
            let status = match &c.status {
                Status::Skip(reason) => format!("SKIP ({reason})"),
                other => other.label().to_string(),
            };
            t.push(vec![
                Cell::text(&c.name),
                Cell::text(&c.inputs),
                Cell::text(&c.expected),
                Cell::text(&c.actual),
                Cell::text(status),
            ]);
        }
        t
    }

    fn to_json(&self, include_wall: bool) -> Value {
        let (pass, fail, skip) = self.counts();
        let mut obj = json!({
            "suite": self.suite,
            "summary": { "pass": pass, "fail": fail, "skip": skip },
            "epsilon_sign": self.epsilon_sign,
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name,
                "inputs": c.inputs,
                "expected": c.expected,
                "actual": c.actual,
                "status": c.status.label(),
                "skip_reason": match &c.status {
                    Status::Skip(r) => Value::from(r.clone()),
                    _ => Value::Null,
                },
            })).collect::<Vec<_>>(),
        });
        if include_wall {
            obj.as_object_mut()
                .expect("report json is an object")
                .insert("wall_ms".into(), Value::from(self.wall.as_millis() as u64));
        }
        obj
    }

    /// Deterministic report body: everything except the wall-time footer.
    pub fn render_body(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(false))
                    .expect("report serialization cannot fail");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = format!("# suite {}\n", self.suite);
                out.push_str(&self.table().render(Format::Csv));
                let (pass, fail, skip) = self.counts();
                out.push_str(&format!(
                    "# summary: {pass} passed, {fail} failed, {skip} skipped\n"
                ));
                if let Some(sign) = self.epsilon_sign {
                    out.push_str(&format!("# realized expansion sign: {sign:+}\n"));
                }
                out
            }
            Format::Pretty => {
                let (pass, fail, skip) = self.counts();
                let verdict = if fail == 0 { "PASS" } else { "FAIL" };
                let mut out = format!(
                    "suite {}: {verdict} ({pass} passed, {fail} failed, {skip} skipped)\n",
                    self.suite
                );
                if let Some(sign) = self.epsilon_sign {
                    out.push_str(&format!("realized expansion sign: {sign:+}\n"));
                }
                out.push_str(&self.table().render(Format::Pretty));
                out
            }
        }
    }

    /// Body plus the wall-time footer.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json(true))
                    .expect("report serialization cannot fail");
                s.push('\n');
                s
            }
            _ => {
                let mut out = self.render_body(format);
                out.push_str(&format!("# wall time: {} ms\n", self.wall.as_millis()));
                out
            }
        }
    }
}

/// Render several suite reports as one document. For JSON this is a single
/// array so the output stays parseable.
pub fn render_reports(reports: &[VerificationReport], format: Format) -> String {
    match format {
        Format::Json => {
            let arr: Vec<Value> = reports.iter().map(|r| r.to_json(true)).collect();
            let mut s = serde_json::to_string_pretty(&Value::from(arr))
                .expect("report serialization cannot fail");
            s.push('\n');
            s
        }
        _ => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&r.render(format));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn pretty_table_aligns_and_separates() {
        let mut t = ResultTable::new(&["root", "class", "(d,d)"]);
        t.push(vec![Cell::text("1,0"), Cell::text("real"), Cell::Int(2)]);
        t.push(vec![
            Cell::text("0,1"),
            Cell::text("isotropic"),
            Cell::Int(0),
        ]);
        let s = t.render(Format::Pretty);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "root  class      (d,d)");
        assert_eq!(lines[1], "----  ---------  -----");
        assert_eq!(lines[2], "1,0   real           2");
        assert_eq!(lines[3], "0,1   isotropic      0");
    }

    #[test]
    fn csv_quotes_fields_with_delimiters() {
        let mut t = ResultTable::new(&["dim", "poly"]);
        t.push(vec![Cell::text("1,1"), Cell::text("q + 1")]);
        let s = t.render(Format::Csv);
        assert_eq!(s, "dim,poly\n\"1,1\",q + 1\n");
    }

    #[test]
    fn json_preserves_exact_numbers() {
        let mut t = ResultTable::new(&["n", "r"]);
        t.push(vec![
            Cell::Int(i128::from(u64::MAX) * 4),
            Cell::Rat(BigRational::new(BigInt::from(1), BigInt::from(3))),
        ]);
        let v = t.to_json();
        assert_eq!(v["rows"][0][0], Value::from("73786976294838206460"));
        assert_eq!(v["rows"][0][1], Value::from("1/3"));
    }

    #[test]
    #[should_panic(expected = "row arity")]
    fn arity_mismatch_panics() {
        let mut t = ResultTable::new(&["a", "b"]);
        t.push(vec![Cell::Int(1)]);
    }

    #[test]
    #[should_panic(expected = "holds int cells")]
    fn column_kind_mismatch_panics() {
        let mut t = ResultTable::new(&["a"]);
        t.push(vec![Cell::Int(1)]);
        t.push(vec![Cell::text("x")]);
    }

    #[test]
    fn report_body_has_no_wall_time_and_footer_does() {
        let mut r = VerificationReport::new("demo");
        r.push(CheckResult::compare("c1", "n=1", "q", "q"));
        r.push(CheckResult::skip("c2", "n=2", "too large"));
        r.wall = Duration::from_millis(1234);
        for format in [Format::Pretty, Format::Csv] {
            let body = r.render_body(format);
            assert!(!body.contains("wall time"), "{body}");
            let full = r.render(format);
            assert!(full.starts_with(&body));
            assert!(full.trim_end().ends_with("# wall time: 1234 ms"));
        }
        let body = r.render_body(Format::Json);
        assert!(!body.contains("wall_ms"));
        let full = r.render(Format::Json);
        assert!(full.contains("\"wall_ms\": 1234"));
        assert!(r.passed());
        assert_eq!(r.counts(), (1, 0, 1));
    }

    #[test]
    fn failing_check_fails_the_report() {
        let mut r = VerificationReport::new("demo");
        r.push(CheckResult::compare("c", "", "1", "2"));
        assert!(!r.passed());
        let body = r.render_body(Format::Pretty);
        assert!(body.starts_with("suite demo: FAIL"));
    }
}
