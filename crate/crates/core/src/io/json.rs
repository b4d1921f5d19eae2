use serde::Serialize;
use serde_json::Value;

/// Rounds to nine significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn round_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|f| serde_json::Number::from_f64(round_sig(f)))
            .map_or(Value::Null, Value::Number),
        Value::Array(items) => Value::Array(items.into_iter().map(round_floats).collect()),
        Value::Object(map) => Value::Object(
            map.into_iter()
                .map(|(k, v)| (k, round_floats(v)))
                .collect(),
        ),
        other => other,
    }
}

/// Single-line JSON with lexicographically sorted keys and floats at nine
/// significant digits.
pub fn to_canonical_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    // serde_json's default map is ordered, so objects come out sorted.
    let v = round_floats(serde_json::to_value(value)?);
    serde_json::to_string(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sorted_single_line() {
        let s = to_canonical_json(&json!({"b": 1, "a": {"z": [1.0, 2], "c": true}})).unwrap();
        assert_eq!(s, r#"{"a":{"c":true,"z":[1.0,2]},"b":1}"#);
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(round_sig(0.123456789123), 0.123456789);
        assert_eq!(round_sig(98765.4321987), 98765.4322);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333);
        let s = to_canonical_json(&json!({"x": std::f64::consts::PI})).unwrap();
        assert_eq!(s, r#"{"x":3.14159265}"#);
    }
}
