//! Human-readable rendering: %g-style significant digits for complex
//! values and aligned check tables. JSON output keeps full precision; these
//! tables are for eyes only.

use pgfermi::{Scalar, VerificationReport};

/// Format with a fixed number of significant digits, %g style.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if exponent < -4 || exponent >= sig as i32 {
        format!("{:.*e}", sig.saturating_sub(1), x)
    } else {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    }
}

/// Render a complex number as `a+bi` with 6 significant digits.
pub fn fmt_complex(z: Scalar) -> String {
    let re = fmt_sig(z.re, 6);
    let im = fmt_sig(z.im.abs(), 6);
    if z.im < 0.0 {
        format!("{re}-{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

/// Aligned table for a verification report, one row per check.
pub fn report_table(report: &VerificationReport) -> String {
    let mut out = String::new();
    let name_width = report
        .checks
        .iter()
        .map(|c| c.name.len())
        .max()
        .unwrap_or(4)
        .max(5);
    out.push_str(&format!(
        "{:<name_width$}  {:>12}  {:>12}  {:<4}  relation\n",
        "check", "residual", "threshold", "pass"
    ));
    for check in &report.checks {
        out.push_str(&format!(
            "{:<name_width$}  {:>12}  {:>12}  {:<4}  {}\n",
            check.name,
            fmt_sig(check.residual, 4),
            fmt_sig(check.threshold, 4),
            if check.pass { "ok" } else { "FAIL" },
            check.relation
        ));
    }
    out.push_str(&format!(
        "overall: {}\n",
        if report.overall { "pass" } else { "FAIL" }
    ));
    out
}
