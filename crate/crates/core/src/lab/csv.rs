/// 17 significant digits, `.` as decimal separator.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Undefined values are written as empty fields.
pub fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_float).unwrap_or_default()
}
