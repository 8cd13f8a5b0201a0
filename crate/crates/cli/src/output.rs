use std::fmt::Write as _;

use qms_thermo::CMatrix;
use serde::Serialize;

/// `x` with 6 significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    // round first so 0.9999999 is laid out as 1.00000
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    let magnitude = rounded.abs().log10().floor() as i32;
    if (-4..6).contains(&magnitude) {
        format!("{:.*}", (5 - magnitude) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

pub fn vector(xs: &[f64]) -> String {
    let parts: Vec<String> = xs.iter().map(|&x| num(x)).collect();
    format!("[{}]", parts.join(", "))
}

fn complex(re: f64, im: f64) -> String {
    if im == 0.0 {
        num(re)
    } else if im < 0.0 {
        format!("{}-{}i", num(re), num(-im))
    } else {
        format!("{}+{}i", num(re), num(im))
    }
}

pub fn matrix(m: &CMatrix) -> String {
    let n = m.dim();
    let cells: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| complex(m.get(i, j).re, m.get(i, j).im)).collect())
        .collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "  {}", line.join("  "));
    }
    out
}

pub fn real_matrix(rows: &[Vec<f64>]) -> String {
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&x| num(x)).collect()).collect();
    let width = cells.iter().flatten().map(String::len).max().unwrap_or(0);
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row.iter().map(|c| format!("{c:>width$}")).collect();
        let _ = writeln!(out, "  {}", line.join("  "));
    }
    out
}

/// Key/value table, one entry per line.
#[derive(Default)]
pub struct Table {
    text: String,
}

impl Table {
    pub fn row(&mut self, key: &str, value: impl AsRef<str>) -> &mut Self {
        let _ = writeln!(self.text, "{key:<28} {}", value.as_ref());
        self
    }

    pub fn block(&mut self, key: &str, body: &str) -> &mut Self {
        let _ = writeln!(self.text, "{key}:");
        self.text.push_str(body);
        self
    }

    pub fn finish(&mut self) -> String {
        std::mem::take(&mut self.text)
    }
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = qms_thermo::json::to_string(value).expect("report types serialize");
    s.push('\n');
    s
}
