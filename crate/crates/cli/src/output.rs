use serde_json::Value;

use crate::Format;

pub fn emit(body: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(body).expect("JSON value")),
        Format::Table => print!("{}", table(body)),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One `key  value` line per top-level field; arrays of objects become one
/// line per element.
pub fn table(body: &Value) -> String {
    let mut out = String::new();
    match body {
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            for (k, v) in map {
                match v {
                    Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                        out.push_str(&format!("{k}\n"));
                        for item in items {
                            out.push_str(&format!("  {}\n", scalar(item)));
                        }
                    }
                    _ => out.push_str(&format!("{k:width$}  {}\n", scalar(v))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                out.push_str(&table(item));
                out.push('\n');
            }
        }
        other => out.push_str(&format!("{}\n", scalar(other))),
    }
    out
}
