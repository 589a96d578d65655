//! Text, CSV and JSON rendering of results.

use std::fmt::Write as _;

use serde::Serialize;

use crate::products::ConstantsRow;

pub const CSV_HEADER: &str = "m,n,alpha0,sigma_inv,y_inf,y_sphere";

/// Formats `x` with 7 significant digits in plain decimal notation.
pub fn sig7(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (6 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.9999996 -> 10.000000)
    let carried = s.parse::<f64>().map(|v| v.abs() >= 10f64.powi(mag + 1)).unwrap_or(false);
    if carried && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn round7(x: f64) -> f64 {
    sig7(x).parse().unwrap_or(x)
}

#[derive(Serialize)]
struct JsonRow {
    m: usize,
    n: usize,
    alpha0: f64,
    sigma_inv: f64,
    y_inf: f64,
    y_sphere: f64,
}

impl From<&ConstantsRow> for JsonRow {
    fn from(r: &ConstantsRow) -> Self {
        Self {
            m: r.m,
            n: r.n,
            alpha0: round7(r.alpha0),
            sigma_inv: round7(r.sigma_inv),
            y_inf: round7(r.y_inf),
            y_sphere: round7(r.y_sphere),
        }
    }
}

pub fn csv_line(r: &ConstantsRow) -> String {
    format!("{},{},{},{},{},{}", r.m, r.n, sig7(r.alpha0), sig7(r.sigma_inv), sig7(r.y_inf), sig7(r.y_sphere))
}

/// CSV with header, one line per row.
pub fn table_csv(rows: &[ConstantsRow]) -> String {
    let mut out = String::new();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(out, "{}", csv_line(r)).unwrap();
    }
    out
}

/// JSON array of records with the CSV keys.
pub fn table_json(rows: &[ConstantsRow]) -> String {
    let rows: Vec<JsonRow> = rows.iter().map(JsonRow::from).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Aligned columns for terminals.
pub fn table_text(rows: &[ConstantsRow]) -> String {
    let mut out = String::new();
    writeln!(
        out,
        "{:>2} {:>2} {:>10} {:>10} {:>10} {:>10}  Y_inf < Y_k",
        "m", "n", "alpha0", "sigma_inv", "Y_inf", "Y_k"
    )
    .unwrap();
    for r in rows {
        writeln!(
            out,
            "{:>2} {:>2} {:>10} {:>10} {:>10} {:>10}  {}",
            r.m,
            r.n,
            sig7(r.alpha0),
            sig7(r.sigma_inv),
            sig7(r.y_inf),
            sig7(r.y_sphere),
            if r.below_sphere() { "yes" } else { "NO" }
        )
        .unwrap();
    }
    out
}
