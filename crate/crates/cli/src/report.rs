//! Reports: echoed configuration, summary values, tables and pass/fail checks,
//! rendered as JSON or CSV.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliResult;

pub const SCHEMA: &str = "ffdioph-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Table {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column, in row order.
    pub fn values(&self, name: &str) -> Vec<&Value> {
        match self.column(name) {
            Some(i) => self.rows.iter().map(|r| &r[i]).collect(),
            None => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub experiment: String,
    pub config: Value,
    pub summary: Map<String, Value>,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(experiment: &str, config: Value) -> Report {
        Report {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            experiment: experiment.into(),
            config,
            summary: Map::new(),
            tables: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.summary.get(key)
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, format: Format) -> CliResult<String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.to_csv(),
        }
    }

    /// Sections introduced by `#name` rows: `#summary` (key,value), one per
    /// table (header row then data), `#checks` and `#notes`.
    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(["#report", self.schema, self.version, &self.experiment])?;
        w.write_record(["#config", &self.config.to_string()])?;
        w.write_record(["#summary"])?;
        w.write_record(["key", "value"])?;
        for (k, v) in &self.summary {
            w.write_record([k.as_str(), &cell(v)])?;
        }
        for t in &self.tables {
            w.write_record([format!("#{}", t.name)])?;
            w.write_record(&t.columns)?;
            for row in &t.rows {
                w.write_record(row.iter().map(cell))?;
            }
        }
        w.write_record(["#checks"])?;
        w.write_record(["name", "passed", "detail"])?;
        for c in &self.checks {
            w.write_record([c.name.as_str(), if c.passed { "true" } else { "false" }, &c.detail])?;
        }
        w.write_record(["#notes"])?;
        for n in &self.notes {
            w.write_record([n])?;
        }
        let bytes = w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        let mut r = Report::new("demo", json!({"q": 2}));
        r.set("total", 3);
        let mut t = Table::new("rows", &["n", "measure"]);
        t.push(vec![json!(1), json!("1/2^2")]);
        t.push(vec![json!(2), json!("a,b")]);
        r.tables.push(t);
        r.check("ok", true, "fine");
        r
    }

    #[test]
    fn json_shape() {
        let v: Value = serde_json::from_str(&sample().render(Format::Json).unwrap()).unwrap();
        assert_eq!(v["schema"], SCHEMA);
        assert_eq!(v["tables"][0]["rows"][0][1], "1/2^2");
        assert_eq!(v["checks"][0]["passed"], true);
    }

    #[test]
    fn csv_sections() {
        let csv = sample().render(Format::Csv).unwrap();
        assert!(csv.contains("#rows\nn,measure\n1,1/2^2\n2,\"a,b\"\n"));
        assert!(csv.contains("#checks\nname,passed,detail\nok,true,fine\n"));
    }

    #[test]
    fn column_access() {
        let r = sample();
        assert_eq!(r.table("rows").unwrap().values("n"), [&json!(1), &json!(2)]);
        assert!(r.passed());
    }
}
