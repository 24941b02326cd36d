//! Number formatting shared by every CSV writer.

/// Decimal with 12 significant digits; scientific outside `[1e-4, 1e12)`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&mag) {
        return format!("{:.11e}", x);
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{:.*}", decimals, x);
    // rounding can carry into a new leading digit
    if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 12 {
        format!("{:.*}", decimals.saturating_sub(1), x)
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(1.1), "1.10000000000");
        assert_eq!(fmt_sig(0.05), "0.0500000000000");
        assert_eq!(fmt_sig(-2.5), "-2.50000000000");
        assert_eq!(fmt_sig(1234.5), "1234.50000000");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(9.9999999999999), "10.0000000000");
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(3e-7), "3.00000000000e-7");
    }
}
