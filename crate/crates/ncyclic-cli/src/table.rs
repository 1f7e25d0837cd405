use serde::Serialize;

/// Command output: tab-separated with one header line, or the same data as
/// JSON.
#[derive(Debug, Serialize)]
pub struct Table {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<String>,
    pub passed: bool,
}

impl Table {
    pub fn new(command: &str, columns: &[&str]) -> Table {
        Table {
            command: command.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            summary: None,
            passed: true,
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }

    /// Adds a `check, result` row and folds it into the verdict.
    pub fn check(&mut self, name: &str, ok: bool) {
        self.passed &= ok;
        self.row(vec![name.to_string(), verdict(ok)]);
    }

    pub fn render_tsv(&self) -> String {
        let mut out = self.columns.join("\t");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join("\t"));
            out.push('\n');
        }
        if let Some(s) = &self.summary {
            out.push_str(s);
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serializes");
        s.push('\n');
        s
    }
}

pub fn verdict(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_layout() {
        let mut t = Table::new("hc", &["degree", "dim"]);
        t.row(vec!["0".into(), "1".into()]);
        t.summary = Some("done".into());
        assert_eq!(t.render_tsv(), "degree\tdim\n0\t1\ndone\n");
    }

    #[test]
    fn checks_fold_into_verdict() {
        let mut t = Table::new("validate", &["check", "result"]);
        t.check("a", true);
        assert!(t.passed);
        t.check("b", false);
        assert!(!t.passed);
        assert_eq!(t.rows[1], vec!["b", "fail"]);
    }

    #[test]
    fn json_mirrors_rows() {
        let mut t = Table::new("hh", &["degree", "dim"]);
        t.row(vec!["0".into(), "1".into()]);
        let v: serde_json::Value = serde_json::from_str(&t.render_json()).unwrap();
        assert_eq!(v["rows"][0][1], "1");
        assert_eq!(v["passed"], true);
    }
}
