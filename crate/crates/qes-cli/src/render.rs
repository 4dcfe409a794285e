//! Deterministic number rendering shared by every report.
//!
//! All floating-point output goes through a fixed-significant-digit
//! formatter so identical configurations produce byte-identical files.

use num_complex::Complex64;
use serde_json::Value;

/// Fixed-precision decimal rendering with `digits` significant digits;
/// trailing mantissa zeros are trimmed so the text stays stable under
/// re-parsing.
#[must_use]
pub fn fmt_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let d = digits.max(1) - 1;
    let s = format!("{v:.d$e}");
    if let Some(epos) = s.find('e') {
        let (mant, exp) = s.split_at(epos);
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}{exp}")
    } else {
        s
    }
}

/// Complex rendering `re+imi` / `re-imi` used in CSV headers.
#[must_use]
pub fn fmt_complex_sig(z: Complex64, digits: usize) -> String {
    if z.im == 0.0 {
        fmt_sig(z.re, digits)
    } else if z.im >= 0.0 {
        format!("{}+{}i", fmt_sig(z.re, digits), fmt_sig(z.im, digits))
    } else {
        format!("{}-{}i", fmt_sig(z.re, digits), fmt_sig(-z.im, digits))
    }
}

/// Round a float to `digits` significant digits.
#[must_use]
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let d = digits.max(1) - 1;
    format!("{v:.d$e}").parse().unwrap_or(v)
}

/// A complex number as the `[re, im]` JSON pair.
#[must_use]
pub fn complex_json(z: Complex64) -> Value {
    Value::Array(vec![Value::from(z.re), Value::from(z.im)])
}

/// Round every floating-point number in a JSON tree to `digits` significant
/// digits; integers are left untouched.
pub fn round_json(value: &mut Value, digits: usize) {
    match value {
        Value::Number(n) => {
            if n.is_f64() {
                if let Some(f) = n.as_f64() {
                    *value = Value::from(round_sig(f, digits));
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                round_json(item, digits);
            }
        }
        Value::Object(map) => {
            for (_k, item) in map.iter_mut() {
                round_json(item, digits);
            }
        }
        _ => {}
    }
}

/// Pretty-print a JSON report with every float rounded to `digits`
/// significant digits, ending in a newline.
#[must_use]
pub fn json_report(mut value: Value, digits: usize) -> String {
    round_json(&mut value, digits);
    let mut text = serde_json::to_string_pretty(&value).expect("report serializes");
    text.push('\n');
    text
}
