//! Plain-text rendering derived from the JSON report value. The table view
//! is a projection of the JSON, never computed from the analysis directly.

use serde_json::Value;

pub fn render_table(value: &Value) -> String {
    let mut out = String::new();
    render_into(value, 0, &mut out);
    out
}

fn render_into(value: &Value, indent: usize, out: &mut String) {
    match value {
        Value::Object(map) => {
            for (key, val) in map {
                match val {
                    Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
                        push_line(indent, &format!("{key}:"), out);
                        out.push_str(&columns(items, indent + 2));
                    }
                    Value::Array(items) => {
                        let joined: Vec<String> = items.iter().map(scalar).collect();
                        push_line(indent, &format!("{key}: [{}]", joined.join(", ")), out);
                    }
                    Value::Object(_) => {
                        push_line(indent, &format!("{key}:"), out);
                        render_into(val, indent + 2, out);
                    }
                    _ => push_line(indent, &format!("{key}: {}", scalar(val)), out),
                }
            }
        }
        other => push_line(indent, &scalar(other), out),
    }
}

/// Arrays of objects become aligned columns over the union of their keys.
fn columns(items: &[Value], indent: usize) -> String {
    let mut keys: Vec<&String> = Vec::new();
    for item in items {
        if let Value::Object(map) = item {
            for key in map.keys() {
                if !keys.contains(&key) {
                    keys.push(key);
                }
            }
        }
    }
    let mut rows: Vec<Vec<String>> = vec![keys.iter().map(|k| k.to_string()).collect()];
    for item in items {
        let Value::Object(map) = item else { continue };
        rows.push(keys.iter().map(|k| map.get(*k).map(cell).unwrap_or_default()).collect());
    }
    let widths: Vec<usize> = (0..keys.len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> =
            row.iter().zip(&widths).map(|(cell, w)| format!("{cell:<w$}")).collect();
        push_line(indent, line.join("  ").trim_end(), &mut out);
    }
    out
}

fn cell(value: &Value) -> String {
    match value {
        Value::Array(items) => {
            let joined: Vec<String> = items.iter().map(scalar).collect();
            joined.join(" | ")
        }
        Value::Object(_) => "{..}".to_string(),
        other => scalar(other),
    }
}

fn scalar(value: &Value) -> String {
    match value {
        Value::String(s) => s.clone(),
        Value::Null => "n.a.".to_string(),
        other => other.to_string(),
    }
}

fn push_line(indent: usize, text: &str, out: &mut String) {
    for _ in 0..indent {
        out.push(' ');
    }
    out.push_str(text);
    out.push('\n');
}
