//! Reports are built once as JSON values; the text form is a line-by-line
//! rendering of the same tree.

use serde_json::Value;

pub const EXIT_ANSWER: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: Value,
    pub exit: i32,
}

impl Report {
    pub fn new(body: Value, exit: i32) -> Self {
        Report { body, exit }
    }

    pub fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("values always serialize");
        s.push('\n');
        s
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        match &self.body {
            Value::Object(map) => {
                for (k, v) in map {
                    field(&mut out, 0, k, v);
                }
            }
            other => {
                out.push_str(&scalar(other));
                out.push('\n');
            }
        }
        out
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|x| !x.is_array() && !x.is_object()),
        Value::Object(_) => false,
        _ => true,
    }
}

fn pad(out: &mut String, depth: usize) {
    out.extend(std::iter::repeat("  ").take(depth));
}

fn field(out: &mut String, depth: usize, key: &str, v: &Value) {
    pad(out, depth);
    match v {
        Value::Array(items) if is_flat(v) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{key}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            out.push_str(&format!("{key}:\n"));
            for item in items {
                entry(out, depth + 1, item);
            }
        }
        Value::Object(map) if map.is_empty() => out.push_str(&format!("{key}: {{}}\n")),
        Value::Object(map) => {
            out.push_str(&format!("{key}:\n"));
            for (k, x) in map {
                field(out, depth + 1, k, x);
            }
        }
        other => out.push_str(&format!("{key}: {}\n", scalar(other))),
    }
}

fn entry(out: &mut String, depth: usize, item: &Value) {
    match item {
        Value::Object(map) => {
            // scalar fields share the bullet line
            let flat: Vec<String> = map
                .iter()
                .filter(|(_, x)| is_flat(x) && !x.is_array())
                .map(|(k, x)| format!("{k}={}", scalar(x)))
                .collect();
            pad(out, depth);
            out.push_str(&format!("- {}\n", flat.join(" ")));
            for (k, x) in map.iter().filter(|(_, x)| !is_flat(x) || x.is_array()) {
                field(out, depth + 1, k, x);
            }
        }
        other => {
            pad(out, depth);
            out.push_str(&format!("- {}\n", if is_flat(other) { scalar(other) } else { other.to_string() }));
        }
    }
}
