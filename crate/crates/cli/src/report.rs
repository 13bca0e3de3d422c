use fsing_core::Ideal;
use serde_json::{json, Map, Value};

use crate::spec::SpecFile;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Sorted generator strings; `["0"]` and `["1"]` for the trivial ideals.
pub fn ideal_json(ideal: &Ideal, relations: Option<&Ideal>) -> Value {
    json!(ideal.display_generators(relations))
}

/// Left-aligned columns separated by two spaces.
#[derive(Clone, Debug)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let mut s = String::new();
            for (i, c) in cells.iter().enumerate() {
                if i + 1 == cells.len() {
                    s.push_str(c);
                } else {
                    s.push_str(&format!("{c:<w$}  ", w = widths[i]));
                }
            }
            s.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }
}

#[derive(Clone, Debug)]
enum Block {
    Line(String, String),
    Table(Table),
}

/// Result of one command, renderable as text or JSON. Timing is only
/// present when requested so that reports are byte-stable by default.
#[derive(Clone, Debug)]
pub struct Report {
    command: String,
    spec: SpecFile,
    options: Map<String, Value>,
    result: Map<String, Value>,
    text: Vec<Block>,
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(command: &str, spec: &SpecFile) -> Self {
        Report {
            command: command.into(),
            spec: spec.clone(),
            options: Map::new(),
            result: Map::new(),
            text: Vec::new(),
            timing_ms: None,
        }
    }

    pub fn option(&mut self, key: &str, value: Value) {
        self.options.insert(key.into(), value);
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.result.insert(key.into(), value);
    }

    pub fn result(&self) -> &Map<String, Value> {
        &self.result
    }

    pub fn line(&mut self, key: &str, value: String) {
        self.text.push(Block::Line(key.into(), value));
    }

    pub fn table(&mut self, t: Table) {
        self.text.push(Block::Table(t));
    }

    pub fn to_json(&self) -> Value {
        let mut root = Map::new();
        root.insert("tool".into(), json!("fsing"));
        root.insert("version".into(), json!(VERSION));
        root.insert("command".into(), json!(self.command));
        root.insert("options".into(), Value::Object(self.options.clone()));
        root.insert("spec".into(), serde_json::to_value(&self.spec).expect("spec serializes"));
        root.insert("result".into(), Value::Object(self.result.clone()));
        if let Some(ms) = self.timing_ms {
            root.insert("timing_ms".into(), json!(ms));
        }
        Value::Object(root)
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report serializes") + "\n"
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("fsing {VERSION}  {}\n", self.command);
        let opts: Vec<String> = self.options.iter().map(|(k, v)| format!("{k}={v}")).collect();
        if !opts.is_empty() {
            out.push_str(&opts.join("  "));
            out.push('\n');
        }
        let key_width = self
            .text
            .iter()
            .filter_map(|b| match b {
                Block::Line(k, _) => Some(k.chars().count()),
                Block::Table(_) => None,
            })
            .max()
            .unwrap_or(0);
        let mut after_table = true;
        for b in &self.text {
            match b {
                Block::Line(k, v) => {
                    if after_table {
                        out.push('\n');
                    }
                    out.push_str(&format!("{k:<key_width$}  {v}\n"));
                    after_table = false;
                }
                Block::Table(t) => {
                    out.push('\n');
                    out.push_str(&t.render());
                    after_table = true;
                }
            }
        }
        if let Some(ms) = self.timing_ms {
            out.push_str(&format!("\ntime  {ms:.1} ms\n"));
        }
        out
    }
}
