//! Byte-stable text output.
//!
//! CSV numbers carry 12 significant digits, rounded half to even on the
//! exact binary value. Plain notation is used for decimal exponents in
//! `[-5, 12)`, scientific notation otherwise; trailing zeros are dropped.

use std::fmt::Write as _;

const SIG_DIGITS: usize = 12;

pub fn fmt12(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // `{:e}` with a precision rounds the exact value, ties to even.
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0');
    let digits = if digits.is_empty() { "0" } else { digits };

    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if (-5..12).contains(&exp) {
        if exp < 0 {
            out.push_str("0.");
            out.push_str(&"0".repeat((-exp - 1) as usize));
            out.push_str(digits);
        } else {
            let int_len = exp as usize + 1;
            if digits.len() <= int_len {
                out.push_str(digits);
                out.push_str(&"0".repeat(int_len - digits.len()));
            } else {
                out.push_str(&digits[..int_len]);
                out.push('.');
                out.push_str(&digits[int_len..]);
            }
        }
    } else {
        out.push_str(&digits[..1]);
        if digits.len() > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        let _ = write!(out, "e{exp}");
    }
    out
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_exact(x: f64) -> String {
    format!("{x:?}")
}

/// Accumulates CSV text with `\n` line endings.
#[derive(Debug, Default)]
pub struct CsvText {
    text: String,
}

impl CsvText {
    pub fn with_header(columns: &[&str]) -> Self {
        let mut t = CsvText::default();
        t.row(columns.iter().map(|c| c.to_string()));
        t
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, cells: I) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.text.push(',');
            }
            first = false;
            self.text.push_str(&cell);
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}
