//! Text rendering of amplitude tables and test statistics.

use std::fmt::Write;

use crate::engine::AmplitudeSnapshot;
use crate::harness::TestResult;
use crate::state::ComplexAmp;

/// Three significant digits; `e`-notation below 1e-3.
pub fn format_real(x: f64) -> String {
    if x == 0.0 {
        return "0.00".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    if x.abs() < 1e-3 {
        return format!("{x:.2e}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (2 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `a+bi`, or just `a` when the imaginary part is exactly zero.
pub fn format_complex(a: ComplexAmp) -> String {
    if a.im == 0.0 {
        return format_real(a.re);
    }
    let sign = if a.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_real(a.re), sign, format_real(a.im.abs()))
}

pub fn format_amplitude_table(snapshot: &AmplitudeSnapshot) -> String {
    let mut out = String::from("Register  Amplitude  Probability\n");
    for row in &snapshot.rows {
        let _ = writeln!(
            out,
            "{}  {}  {}",
            row.label,
            format_complex(row.amplitude),
            format_real(row.probability)
        );
    }
    out
}

/// Full-precision statistic: plain decimal in `[1e-3, 1e6)`, `e`-notation
/// otherwise.
pub fn format_statistic(x: f64) -> String {
    if x == 0.0 || !x.is_finite() || (1e-3..1e6).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

pub fn format_test_result(r: &TestResult) -> String {
    format!(
        "MISSES: {}\nMAX-ERROR: {}\nAVG-ERROR: {}\nMAX-EXPECTED-ORACLES: {}\nAVG-EXPECTED-ORACLES: {}\n",
        r.misses,
        format_statistic(r.max_error),
        format_statistic(r.avg_error),
        format_statistic(r.max_exp_oracles),
        format_statistic(r.avg_exp_oracles),
    )
}
