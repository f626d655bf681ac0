//! CSV rendering with 12 significant digits.

use lrbounds::distributions::Point;
use serde_json::Value;

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `%.12g`-style rendering: fixed notation for exponents in `[-5, 12)`,
/// scientific otherwise, trailing zeros dropped.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{:.*}", (11 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mant))
    }
}

/// Numbers through [`fmt_num`], arrays as `[a;b;...]`, anything else as
/// compact JSON.
pub fn fmt_value(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(fmt_num).unwrap_or_else(|| n.to_string()),
        Value::Array(items) => format!("[{}]", items.iter().map(fmt_value).collect::<Vec<_>>().join(";")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn fmt_point(z: &Point) -> String {
    let join = |v: &mut dyn Iterator<Item = f64>| v.map(fmt_num).collect::<Vec<_>>().join(";");
    match z {
        Point::Scalar(x) => fmt_num(*x),
        Point::Vector(v) => format!("[{}]", join(&mut v.iter().copied())),
        Point::Matrix(m) => {
            let rows: Vec<String> = m.row_iter().map(|r| format!("[{}]", join(&mut r.iter().copied()))).collect();
            format!("[{}]", rows.join(";"))
        }
    }
}
