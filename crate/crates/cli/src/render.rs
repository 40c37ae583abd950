//! Plain-text rendering of command output.

use serde_json::Value;

pub fn human(v: &Value) -> String {
    let mut out = String::new();
    block(v, 0, &mut out);
    out
}

fn inline(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(xs) => {
            let parts: Option<Vec<String>> = xs.iter().map(inline).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        // Scalar descriptors print as their single value.
        Value::Object(m) if m.len() == 1 => {
            let (k, x) = m.iter().next()?;
            match k.as_str() {
                "rat" | "float" => inline(x),
                "complex" => inline(x).map(|s| format!("complex {s}")),
                "surd" => x.as_array().map(|terms| {
                    terms
                        .iter()
                        .filter_map(|t| Some(format!("{}*sqrt({})", t.get(1)?.as_str()?, t.get(0)?)))
                        .collect::<Vec<_>>()
                        .join(" + ")
                }),
                "cyclotomic" => Some(format!(
                    "zeta_{}: {}",
                    x.get("order")?,
                    inline(x.get("coeffs")?)?
                )),
                _ => None,
            }
        }
        Value::Object(_) => None,
    }
}

fn block(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        block(x, depth + 1, out);
                    }
                }
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                match inline(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        block(x, depth + 1, out);
                    }
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", inline(v).unwrap_or_default())),
    }
}
