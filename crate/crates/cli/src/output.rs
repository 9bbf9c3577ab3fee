//! CSV assembly shared by every study.
//!
//! An artifact is a digest comment line, a header row, then data rows in
//! fixed axis-then-trial order. Axis values are written with the shortest
//! round-trip representation; measured reals use exponent notation so
//! magnitudes spanning many decades stay readable.

/// Renders a complete CSV artifact.
pub fn render_csv(digest: &str, header: &str, rows: &[String]) -> String {
    let mut out = String::with_capacity(64 + header.len() + rows.iter().map(|r| r.len() + 1).sum::<usize>());
    out.push_str("# config_sha256=");
    out.push_str(digest);
    out.push('\n');
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    out
}

/// Mean and standard error of a sample; the standard error is NaN for
/// fewer than two observations.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let variance = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (variance / n as f64).sqrt())
}
