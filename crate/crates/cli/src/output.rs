use serde_json::{json, Map, Value};

use bilist_core::lists::ProperColouring;

use crate::Format;

/// One result rendered in the selected format. `record` is a flat JSON
/// object; CSV renders it as a one-row table with nested values as JSON.
pub struct Report {
    pub human: String,
    pub record: Map<String, Value>,
}

impl Report {
    pub fn new(human: impl Into<String>) -> Self {
        Self {
            human: human.into(),
            record: Map::new(),
        }
    }

    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.record.insert(key.to_string(), value.into());
        self
    }

    pub fn print(&self, format: Format) {
        match format {
            Format::Human => print!("{}", ensure_newline(&self.human)),
            Format::Structured => println!("{}", Value::Object(self.record.clone())),
            Format::Csv => print!("{}", record_csv(&self.record)),
        }
    }
}

fn ensure_newline(s: &str) -> String {
    if s.ends_with('\n') {
        s.to_string()
    } else {
        format!("{s}\n")
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn record_csv(record: &Map<String, Value>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(record.keys()).expect("in-memory write");
    w.write_record(record.values().map(cell)).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub fn colouring_json(c: &ProperColouring) -> Value {
    json!({"a": c.colours_a, "b": c.colours_b})
}

pub fn colouring_text(c: &ProperColouring) -> String {
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
    format!("A: {}\nB: {}\n", join(&c.colours_a), join(&c.colours_b))
}
