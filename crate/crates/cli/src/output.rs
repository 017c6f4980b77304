use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::record::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

/// A table with a header row.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub title: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: &str, columns: &[&str]) -> Table {
        Table { title: title.to_string(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_text(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.chars().count()).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, &w)| format!("{c:<w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        let mut out = String::new();
        if !self.title.is_empty() {
            out.push_str(&self.title);
            out.push('\n');
        }
        out.push_str(&line(&self.columns));
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&line(&rule));
        for row in &self.rows {
            out.push_str(&line(row));
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).map_err(|e| CliError::Io(e.to_string()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Renders the outcome of a command. `table` is the command's report, if any.
pub fn render(format: Format, record: &RunRecord, table: Option<&Table>) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut v = serde_json::to_value(record).map_err(|e| CliError::Io(e.to_string()))?;
            if let Some(t) = table {
                v["report"] = serde_json::to_value(t).map_err(|e| CliError::Io(e.to_string()))?;
            }
            Ok(serde_json::to_string_pretty(&v).map_err(|e| CliError::Io(e.to_string()))? + "\n")
        }
        Format::Csv => match table {
            Some(t) => t.to_csv(),
            None => {
                let mut t = Table::new("", &["key", "value"]);
                for (k, v) in &record.scores {
                    t.push(vec![k.clone(), plain(v)]);
                }
                t.to_csv()
            }
        },
        Format::Text => {
            let mut out = String::new();
            if let Some(t) = table {
                out.push_str(&t.to_text());
            } else {
                let width = record.scores.keys().map(|k| k.len()).max().unwrap_or(0);
                for (k, v) in &record.scores {
                    out.push_str(&format!("{k:<width$}  {}\n", plain(v)));
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_table_aligns() {
        let mut t = Table::new("demo", &["a", "long"]);
        t.push(vec!["xyz".into(), "1".into()]);
        assert_eq!(t.to_text(), "demo\na    long\n---  ----\nxyz  1\n");
        assert_eq!(t.to_csv().unwrap(), "a,long\nxyz,1\n");
    }
}
