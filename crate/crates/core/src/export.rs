//! Plain-text output: numbers with 12 significant digits, `.` decimal
//! separator, `\n` line endings.

use num_complex::Complex64;

use crate::spectral::CriticalCurve;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Formats like C's `%.12g`: fixed notation for decimal exponents in
/// `[-4, 12)`, scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let m = trim_zeros(mantissa.to_string());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub const CURVE_CSV_HEADER: &str = "y,re,im";
pub const EIG_CSV_HEADER: &str = "K,re_lambda,im_lambda";

pub fn curve_csv(curve: &CriticalCurve) -> String {
    let mut out = format!("{CURVE_CSV_HEADER}\n");
    for (y, v) in curve.y.iter().zip(&curve.values) {
        out.push_str(&format!("{},{},{}\n", format_sig(*y), format_sig(v.re), format_sig(v.im)));
    }
    out
}

pub fn eig_csv(rows: &[(f64, Complex64)]) -> String {
    let mut out = format!("{EIG_CSV_HEADER}\n");
    for (k, l) in rows {
        out.push_str(&format!("{},{},{}\n", format_sig(*k), format_sig(l.re), format_sig(l.im)));
    }
    out
}

/// `t,abs_r,arg_r` rows of an order-parameter trace.
pub fn trace_csv(trace: &[(f64, Complex64)]) -> String {
    let mut out = String::from("t,abs_r,arg_r\n");
    for (t, z) in trace {
        out.push_str(&format!("{},{},{}\n", format_sig(*t), format_sig(z.norm()), format_sig(z.arg())));
    }
    out
}
