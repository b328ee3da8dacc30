//! Deterministic JSON output: keys sorted, floats rounded to six significant
//! digits, non-finite floats as `null`.

use serde_json::{Map, Value};

pub(crate) const SIG_DIGITS: usize = 6;

pub(crate) fn float(v: f64) -> Value {
    if !v.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, v)
        .parse()
        .expect("formatted float parses");
    // -0.0 would print as "-0.0"
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub(crate) fn floats(vs: impl IntoIterator<Item = f64>) -> Value {
    Value::Array(vs.into_iter().map(float).collect())
}

pub(crate) fn object<const N: usize>(entries: [(&str, Value); N]) -> Value {
    // serde_json::Map is a BTreeMap without the preserve_order feature.
    let mut map = Map::new();
    for (k, v) in entries {
        map.insert(k.to_owned(), v);
    }
    Value::Object(map)
}

pub(crate) fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}
