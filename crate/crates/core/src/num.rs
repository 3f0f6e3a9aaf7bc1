//! Deterministic number formatting for emitted SVG and CSS.

/// Up to 6 significant digits, trailing zeros trimmed, no exponent.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return "0".to_string();
    }
    let rounded: f64 = format!("{v:.5e}").parse().unwrap_or(0.0);
    if rounded == 0.0 {
        "0".to_string()
    } else {
        format!("{rounded}")
    }
}

/// Fixed 12 decimal places, trailing zeros trimmed. Used for composed
/// transform matrices, where geometry must survive a text round trip
/// well below 1e-9.
pub fn fmt_precise(v: f64) -> String {
    if !v.is_finite() {
        return "0".to_string();
    }
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" || s.is_empty() {
        "0".to_string()
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(-4.0), "-4");
        assert_eq!(fmt_num(3.125), "3.125");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333");
        assert_eq!(fmt_num(123456789.0), "123457000");
        assert_eq!(fmt_num(0.000012345678), "0.0000123457");
        assert_eq!(fmt_num(2.5e-7), "0.00000025");
    }

    #[test]
    fn precise_trims() {
        assert_eq!(fmt_precise(1.0), "1");
        assert_eq!(fmt_precise(6.123e-17), "0");
        assert_eq!(fmt_precise(-1e-13), "0");
        assert_eq!(fmt_precise(std::f64::consts::FRAC_1_SQRT_2), "0.707106781187");
        assert_eq!(fmt_precise(-12.5), "-12.5");
    }
}
