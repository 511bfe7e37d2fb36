//! Number formatting shared by every CSV and report writer.

/// Formats `x` with 12 significant digits. Values in [1e-4, 1e12) are
/// written in fixed notation, everything else in scientific notation.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    // Adding zero turns −0 into +0.
    let x = x + 0.0;
    let sci = format!("{x:.11e}");
    // The exponent is read after rounding, so 9.99…95 carries correctly.
    let exp: i32 = sci
        .rsplit('e')
        .next()
        .and_then(|e| e.parse().ok())
        .unwrap_or(0);
    if x != 0.0 && !(-4..12).contains(&exp) {
        return sci;
    }
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Fidelities are printed with 12 decimals.
pub fn fid12(x: f64) -> String {
    format!("{x:.12}")
}
