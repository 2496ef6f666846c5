use crate::suites::{SuiteReport, Verdict};
use serde::Serialize;
use serde_json::{Map, Value};
use std::fs;
use std::io::{self, Write};
use std::path::Path;

/// Rows for the CSV rendering; in JSON they appear as objects keyed by column.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn objects(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                Value::Object(m)
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.iter().map(|c| csv_field(&Value::String(c.clone()))).collect::<Vec<_>>().join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.iter().map(csv_field).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub results: Vec<Value>,
    pub verdicts: Vec<Verdict>,
    pub paper_refs: Vec<String>,
    #[serde(skip)]
    pub table: Table,
}

impl Report {
    pub fn new(command: &str, params: Value, seed: u64, anchor: &str) -> Self {
        Self {
            command: command.into(),
            params,
            seed,
            results: Vec::new(),
            verdicts: Vec::new(),
            paper_refs: vec![anchor.into()],
            table: Table::default(),
        }
    }

    /// Results taken from the table rows.
    pub fn with_table(mut self, table: Table) -> Self {
        self.results = table.objects();
        self.table = table;
        self
    }

    pub fn from_suite(command: &str, params: Value, seed: u64, s: SuiteReport) -> Self {
        let table = Table {
            columns: s.columns,
            rows: s.rows,
        };
        let mut r = Self::new(command, params, seed, &s.anchor).with_table(table);
        r.verdicts = s.verdicts;
        r
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn render(&self, format: super::Format) -> String {
        match format {
            super::Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
            super::Format::Csv => self.table.to_csv(),
        }
    }
}

/// Writes through a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_quotes_when_needed() {
        let mut t = Table::new(&["name", "value"]);
        t.rows.push(vec![json!("a,b"), json!(1.5)]);
        t.rows.push(vec![json!("say \"hi\""), json!(true)]);
        assert_eq!(t.to_csv(), "name,value\n\"a,b\",1.5\n\"say \"\"hi\"\"\",true\n");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.json");
        write_atomic(&p, "first").unwrap();
        write_atomic(&p, "second").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
