//! Report envelope, JSON output and plain-text formatting helpers.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Context;
use quadstab::field::{FiniteField, FqField};
use quadstab::funcfield::{FqPoly, FqRat};
use serde::Serialize;

/// Every JSON report is wrapped in this so the seed travels with it.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub report: &'a T,
}

pub fn envelope_json<T: Serialize>(command: &str, seed: u64, report: &T) -> String {
    let env = Envelope {
        tool: "quadstab",
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed,
        report,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
    s.push('\n');
    s
}

pub fn write_json(path: &Path, json: &str) -> anyhow::Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, json).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("writing {}", path.display()))
}

fn superscript(e: usize) -> String {
    if e == 1 {
        return String::new();
    }
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    e.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// An F_q element: its F_p value when k = 1, else a polynomial in the
/// generator `a`.
pub fn format_elem(field: &FqField, c: &[u64]) -> String {
    if field.k() == 1 {
        return c[0].to_string();
    }
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, &v)| v != 0)
        .map(|(i, &v)| match (i, v) {
            (0, v) => v.to_string(),
            (i, 1) => format!("a{}", superscript(i)),
            (i, v) => format!("{v}a{}", superscript(i)),
        })
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        format!("({})", terms.join(" + "))
    }
}

fn monomial(coeff: &str, var: &str, e: usize) -> String {
    match (coeff, e) {
        (c, 0) => c.to_string(),
        ("1", e) => format!("{var}{}", superscript(e)),
        (c, e) => format!("{c}{var}{}", superscript(e)),
    }
}

pub fn format_fqpoly(a: &FqPoly, var: &str) -> String {
    let field = a.field();
    let terms: Vec<String> = a
        .coeffs()
        .iter()
        .enumerate()
        .rev()
        .filter(|(_, c)| !field.is_zero(c))
        .map(|(e, c)| monomial(&format_elem(field, c), var, e))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn format_fqrat(x: &FqRat) -> String {
    let num = format_fqpoly(x.num(), "t");
    if x.is_polynomial() && x.den().is_one() {
        num
    } else {
        format!("({num})/({})", format_fqpoly(x.den(), "t"))
    }
}

/// `x² + (b)x + c` with coefficients in F_q(t).
pub fn format_quadratic(coeffs: &[FqRat; 3]) -> String {
    let mut s = String::from("x²");
    let wrap = |x: &FqRat| {
        let t = format_fqrat(x);
        if t.contains(' ') {
            format!("({t})")
        } else {
            t
        }
    };
    if !coeffs[1].is_zero() {
        let b = wrap(&coeffs[1]);
        if b == "1" {
            s.push_str(" + x");
        } else {
            let _ = write!(s, " + {b}x");
        }
    }
    if !coeffs[0].is_zero() {
        let _ = write!(s, " + {}", format_fqrat(&coeffs[0]));
    }
    s
}

/// Two-column table.
pub fn table(rows: &[(&str, String)]) -> String {
    let w = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    let mut s = String::new();
    for (k, v) in rows {
        let pad = w - k.chars().count();
        let _ = writeln!(s, "{k}{}  {v}", " ".repeat(pad));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use quadstab::funcfield::fqpoly;

    #[test]
    fn formats_polynomials() {
        let f = FqField::prime(3).unwrap();
        assert_eq!(format_fqpoly(&fqpoly(&f, &[0, 2, 2, 1]), "t"), "t³ + 2t² + 2t");
        assert_eq!(format_fqpoly(&fqpoly(&f, &[1]), "t"), "1");
        let f9 = FqField::new(3, 2).unwrap();
        assert_eq!(format_elem(&f9, &[1, 2]), "(2a + 1)");
    }
}
