//! Fixed-width numeric formatting for CSV outputs.

/// Six significant digits: fixed notation, switching to scientific below 1e-4.
pub fn sig6(v: f64) -> String {
    if v == 0.0 {
        return "0.00000".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    if v.abs() < 1e-4 {
        return format!("{v:.5e}");
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new digit (9.999995 -> 10.00000)
    let digits = s.chars().filter(char::is_ascii_digit).count();
    let leading_zeros = s
        .trim_start_matches('-')
        .chars()
        .take_while(|c| *c == '0' || *c == '.')
        .filter(|c| *c == '0')
        .count();
    if digits - leading_zeros > 6 && decimals > 0 {
        let decimals = decimals - 1;
        format!("{v:.decimals$}")
    } else {
        s
    }
}

/// Window coordinate with one decimal, e.g. `87.5`.
pub fn y_coord(y: f64) -> String {
    format!("{y:.1}")
}
