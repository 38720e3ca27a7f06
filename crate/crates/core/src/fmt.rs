//! Numeric output formatting shared by record files, reports and the CLI.
//!
//! Every floating-point value is printed with 17 significant digits
//! (`{:.16e}`), which round-trips f64 exactly and keeps golden files
//! bit-stable.

/// 17-significant-digit scientific form, round-trip safe.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A serde_json Number carrying exactly the 17-digit literal (requires
/// serde_json's arbitrary_precision feature, which preserves the text).
pub fn jnum(x: f64) -> serde_json::Number {
    serde_json::from_str(&fmt_f64(x)).expect("{:.16e} output is a valid JSON number")
}

/// Same, wrapped as a Value.
pub fn jval(x: f64) -> serde_json::Value {
    serde_json::Value::Number(jnum(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digit_round_trip() {
        for &x in &[0.5, -1.0 / 3.0, 6.02e23, 1e-300, 0.1 + 0.2] {
            let s = fmt_f64(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn json_numbers_keep_the_literal() {
        let v = serde_json::to_string(&jval(0.5)).unwrap();
        assert_eq!(v, "5.0000000000000000e-1");
    }
}
