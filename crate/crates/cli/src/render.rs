//! Human-readable tables and the JSON error object.

use littlewood::homography::approx_log2;
use littlewood::verifier::{parse_rational_string, Certificate};
use littlewood::Rational;
use serde_json::json;

pub fn error_json(kind: &str, message: &str) -> String {
    json!({ "error": kind, "message": message }).to_string()
}

/// `d.dddde±X` for a positive rational of any size; `0` for zero.
pub fn sci(x: &Rational) -> String {
    if x == &Rational::default() {
        return "0".into();
    }
    let neg = x < &Rational::default();
    let l = approx_log2(&if neg { -x.clone() } else { x.clone() }) * std::f64::consts::LOG10_2;
    let mut exp = l.floor();
    let mut mant = 10f64.powf(l - exp);
    if mant >= 9.9995 {
        mant /= 10.0;
        exp += 1.0;
    }
    format!("{}{mant:.4}e{exp}", if neg { "-" } else { "" })
}

pub fn sci_str(s: &str) -> String {
    parse_rational_string(s).map(|x| sci(&x)).unwrap_or_else(|_| s.to_string())
}

/// Decimal string shortened to `head...(N digits)` past 24 digits.
pub fn big(s: &str) -> String {
    if s.len() <= 24 {
        s.to_string()
    } else {
        format!("{}...({} digits)", &s[..12], s.len())
    }
}

/// Bound text with a long base integer shortened.
fn short_bound(s: &str) -> String {
    match s.split_once('^') {
        Some((base, exp)) => format!("{}^{exp}", big(base)),
        None if s.len() > 40 => format!("{}...", &s[..37]),
        None => s.to_string(),
    }
}

pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out += &line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn certificate_table(certs: &[Certificate]) -> String {
    let rows: Vec<Vec<String>> = certs
        .iter()
        .map(|c| {
            let links: Vec<String> = c.links.iter().map(|l| format!("{}={}", l.name, l.verdict)).collect();
            vec![
                c.provenance.key(),
                big(&c.q),
                sci_str(&c.product_hi),
                short_bound(&c.bound),
                c.verdict.to_string(),
                if c.advisory { "yes".into() } else { "no".into() },
                links.join(" "),
            ]
        })
        .collect();
    table(&["provenance", "q", "product_hi", "bound", "verdict", "advisory", "links"], &rows)
}
