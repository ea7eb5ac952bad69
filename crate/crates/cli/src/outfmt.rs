//! Output rendering. Artifact files always use fixed formats (CSV with '.'
//! decimals and 12 significant digits, pretty JSON); the `--format` flag
//! only selects how results are printed to stdout.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Table,
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "table" => Some(OutputFormat::Table),
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

/// Shortest decimal form of `v` after rounding to 12 significant digits.
/// Round-tripping through scientific notation keeps "0.1" as "0.1" instead
/// of growing a 17-digit tail, and the result is locale-free by
/// construction.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.11e}").parse().expect("scientific form parses");
    format!("{rounded}")
}

/// Key/value result block.
pub struct Summary {
    title: String,
    rows: Vec<(String, String)>,
}

impl Summary {
    pub fn new(title: &str) -> Self {
        Summary {
            title: title.to_string(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl Into<String>) {
        self.rows.push((key.to_string(), value.into()));
    }

    pub fn push_f64(&mut self, key: &str, value: f64) {
        self.push(key, sig12(value));
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Table => {
                let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                let mut out = format!("{}\n", self.title);
                for (key, value) in &self.rows {
                    out.push_str(&format!("  {key:<width$}  {value}\n"));
                }
                out
            }
            OutputFormat::Csv => {
                let mut out = String::from("key,value\n");
                for (key, value) in &self.rows {
                    out.push_str(&format!("{key},{value}\n"));
                }
                out
            }
            OutputFormat::Json => {
                let mut map = serde_json::Map::new();
                for (key, value) in &self.rows {
                    map.insert(key.clone(), serde_json::Value::String(value.clone()));
                }
                let mut text = serde_json::to_string_pretty(&serde_json::Value::Object(map))
                    .expect("string map serializes");
                text.push('\n');
                text
            }
        }
    }
}

/// Column-oriented result rows; the CSV form is also what lands in
/// artifact files.
pub struct RowTable {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl RowTable {
    pub fn new(columns: &[&str]) -> Self {
        RowTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Table => {
                let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
                for row in &self.rows {
                    for (w, cell) in widths.iter_mut().zip(row) {
                        *w = (*w).max(cell.len());
                    }
                }
                let mut out = String::new();
                let header: Vec<String> = self
                    .columns
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect();
                out.push_str(header.join("  ").trim_end());
                out.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:<w$}"))
                        .collect();
                    out.push_str(line.join("  ").trim_end());
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut map = serde_json::Map::new();
                        for (column, cell) in self.columns.iter().zip(row) {
                            map.insert(column.clone(), serde_json::Value::String(cell.clone()));
                        }
                        serde_json::Value::Object(map)
                    })
                    .collect();
                let mut text = serde_json::to_string_pretty(&serde_json::Value::Array(rows))
                    .expect("string rows serialize");
                text.push('\n');
                text
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig12_is_shortest_and_locale_free() {
        assert_eq!(sig12(0.5), "0.5");
        assert_eq!(sig12(0.09999999999999998), "0.1");
        assert_eq!(sig12(-0.25), "-0.25");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(123456789012345.0), "123456789012000");
    }

    #[test]
    fn csv_rows_join_plainly() {
        let mut t = RowTable::new(&["a", "b"]);
        t.push_row(vec!["1".into(), "0.5".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n");
    }
}
