//! Uniform tabular output. Every subcommand produces one `Table`; the
//! format flag chooses between aligned text, a stable JSON object
//! `{"command", "meta", "columns", "rows"}` with all cells as strings, and
//! CSV with metadata in leading `#` comment lines. Exact rationals are
//! always rendered `num/den`.

use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Table {
    command: String,
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Table {
            command: command.to_string(),
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl Into<String>) {
        self.meta.push((key.to_string(), value.into()));
    }

    pub fn row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width mismatch");
        self.rows.push(cells);
    }

    pub fn emit(&self, format: OutputFormat, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            OutputFormat::Table => self.emit_text(out),
            OutputFormat::Json => self.emit_json(out),
            OutputFormat::Csv => self.emit_csv(out),
        }
    }

    fn emit_text(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (key, value) in &self.meta {
            writeln!(out, "# {} = {}", key, value)?;
        }
        let mut widths: Vec<usize> = self.columns.iter().map(String::len).collect();
        for row in &self.rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.len());
            }
        }
        let render = |cells: &[String], out: &mut dyn Write| -> std::io::Result<()> {
            let line: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{:<width$}", c, width = w))
                .collect();
            writeln!(out, "{}", line.join("  ").trim_end())
        };
        render(&self.columns, out)?;
        for row in &self.rows {
            render(row, out)?;
        }
        Ok(())
    }

    fn emit_json(&self, out: &mut impl Write) -> std::io::Result<()> {
        let meta: serde_json::Map<String, serde_json::Value> = self
            .meta
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        let value = serde_json::json!({
            "command": self.command,
            "meta": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        writeln!(out, "{}", serde_json::to_string_pretty(&value)?)
    }

    fn emit_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        for (key, value) in &self.meta {
            writeln!(out, "# {} = {}", key, value)?;
        }
        let mut writer = csv::Writer::from_writer(vec![]);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        let data = writer.into_inner().map_err(std::io::Error::other)?;
        out.write_all(&data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo", &["name", "value"]);
        t.meta("kind", "test");
        t.row(vec!["alpha".to_string(), "1/2".to_string()]);
        t.row(vec!["beta, long".to_string(), "2".to_string()]);
        t
    }

    fn emit(format: OutputFormat) -> String {
        let mut buffer = Vec::new();
        sample().emit(format, &mut buffer).unwrap();
        String::from_utf8(buffer).unwrap()
    }

    #[test]
    fn text_is_aligned_with_meta_comments() {
        let text = emit(OutputFormat::Table);
        assert!(text.starts_with("# kind = test\n"), "{}", text);
        assert!(text.contains("name        value"), "{}", text);
        assert!(text.contains("alpha       1/2"), "{}", text);
    }

    #[test]
    fn json_has_the_stable_shape() {
        let parsed: serde_json::Value = serde_json::from_str(&emit(OutputFormat::Json)).unwrap();
        assert_eq!(parsed["command"], "demo");
        assert_eq!(parsed["meta"]["kind"], "test");
        assert_eq!(parsed["columns"][1], "value");
        assert_eq!(parsed["rows"][0][1], "1/2");
    }

    #[test]
    fn csv_quotes_cells_with_commas() {
        let text = emit(OutputFormat::Csv);
        assert!(text.contains("\"beta, long\",2"), "{}", text);
        assert!(text.starts_with("# kind = test\n"), "{}", text);
    }
}
