use serde_json::{Map, Value};

use crate::args::Format;

/// Result of one request, renderable as text or JSON.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub input: Map<String, Value>,
    pub code: i32,
    pub body: Result<Fields, String>,
}

/// Ordered key/value output plus an optional text table.
#[derive(Debug, Clone, Default)]
pub struct Fields {
    pub json: Map<String, Value>,
    text: Vec<String>,
}

impl Fields {
    pub fn put(&mut self, key: &str, value: impl Into<Value>) {
        let value = value.into();
        self.text.push(format!("{key}: {}", plain(&value)));
        self.json.insert(key.to_string(), value);
    }

    /// JSON-only entry, with a hand-made text rendering.
    pub fn put_with_text(&mut self, key: &str, value: Value, text: Vec<String>) {
        self.json.insert(key.to_string(), value);
        self.text.extend(text);
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rendered streams of one or more reports.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    pub fn error(command: &'static str, input: Map<String, Value>, message: String) -> Report {
        Report {
            command,
            input,
            code: 1,
            body: Err(message),
        }
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.into());
        m.insert("input".into(), Value::Object(self.input.clone()));
        match &self.body {
            Ok(f) => m.extend(f.json.clone()),
            Err(e) => {
                m.insert("error".into(), e.clone().into());
            }
        }
        Value::Object(m)
    }

    pub fn to_text(&self) -> String {
        let Ok(f) = &self.body else {
            return String::new();
        };
        let mut out = format!("command: {}\n", self.command);
        let input: Vec<String> = self
            .input
            .iter()
            .map(|(k, v)| format!("{k}={}", plain(v)))
            .collect();
        out.push_str(&format!("input: {}\n", input.join(" ")));
        for line in &f.text {
            out.push_str(line);
            out.push('\n');
        }
        out
    }

    fn stderr(&self) -> String {
        match &self.body {
            Err(e) => format!("error: {e}\n"),
            Ok(_) => String::new(),
        }
    }

    pub fn render(&self, format: Format, pretty: bool) -> Output {
        let stdout = match format {
            Format::Text => self.to_text(),
            Format::Json if pretty => {
                serde_json::to_string_pretty(&self.to_json()).expect("json value") + "\n"
            }
            Format::Json => serde_json::to_string(&self.to_json()).expect("json value") + "\n",
        };
        Output {
            code: self.code,
            stdout,
            stderr: self.stderr(),
        }
    }
}

/// Aligns rows into columns separated by two spaces.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> Vec<String> {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = vec![line(header.to_vec())];
    out.extend(
        rows.iter()
            .map(|r| line(r.iter().map(String::as_str).collect())),
    );
    out
}
