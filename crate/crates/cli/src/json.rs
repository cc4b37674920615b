//! Pretty JSON that keeps short numeric arrays on one line.

use std::fmt::Write as _;

use serde_json::Value;

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Scalars, arrays of scalars and arrays of scalar arrays print inline.
fn is_inline(v: &Value) -> bool {
    match v {
        Value::Array(items) => items.iter().all(|i| {
            is_scalar(i) || matches!(i, Value::Array(inner) if inner.iter().all(is_scalar))
        }),
        Value::Object(map) => map.is_empty(),
        _ => true,
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    if is_inline(v) {
        out.push_str(&serde_json::to_string(v).expect("JSON values serialize"));
        return;
    }
    let pad = "  ".repeat(depth + 1);
    let close = "  ".repeat(depth);
    match v {
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{close}]");
        }
        Value::Object(map) => {
            out.push_str("{\n");
            for (i, (k, item)) in map.iter().enumerate() {
                let key = serde_json::to_string(k).expect("keys serialize");
                let _ = write!(out, "{pad}{key}: ");
                write_value(out, item, depth + 1);
                out.push_str(if i + 1 < map.len() { ",\n" } else { "\n" });
            }
            let _ = write!(out, "{close}}}");
        }
        _ => unreachable!("scalars are inline"),
    }
}

/// Serializes `value` with a trailing newline.
pub fn to_pretty<T: serde::Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("value serializes");
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    out
}
