//! Fixed-width float formatting for CSV output.

/// `x` with 17 significant digits in scientific notation.
pub fn g17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}
