//! Locale-independent number formatting for CSV output.

/// Up to 12 significant digits with trailing zeros removed; scientific
/// notation for magnitudes below `1e-5`.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-5 {
        let s = format!("{x:.11e}");
        let (mantissa, exp) = s.split_once('e').expect("exponent present");
        return format!("{}e{exp}", trim(mantissa));
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    trim(&format!("{x:.decimals$}")).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to three decimals, always with three digits.
pub fn three(x: f64) -> String {
    format!("{x:.3}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(num(0.2), "0.2");
        assert_eq!(num(1.0), "1");
        assert_eq!(num(0.0), "0");
        assert_eq!(num(1.0 / 3.0), "0.333333333333");
        assert_eq!(num(0.36787944117144233), "0.367879441171");
        assert_eq!(num(123.456), "123.456");
        assert_eq!(num(-0.25), "-0.25");
        assert_eq!(num(1.5e-7), "1.5e-7");
        assert_eq!(num(0.99999999999995), "1");
        assert_eq!(three(0.38500328), "0.385");
    }
}
