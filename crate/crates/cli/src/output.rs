//! CSV emission for estimate rows.
//!
//! Floats are written in Rust's shortest round-trip form, the same digits
//! `serde_json` produces, so CSV and JSON of one run parse to identical values.

use std::io::{self, Write};

use outlierfreq_core::EstimateRow;

use crate::svg::LineChart;

pub const CSV_HEADER: &str = "family,alpha,beta,n,k,M,p_hat,stderr,seed,centered,convention";

pub fn write_csv<W: Write>(mut w: W, rows: &[EstimateRow]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let alpha = r.alpha().map(|a| a.to_string()).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.family(),
            alpha,
            r.spec.family.skewness(),
            r.n,
            r.k,
            r.replications,
            r.p_hat,
            r.stderr,
            r.base_seed,
            r.centered,
            r.convention
        )?;
    }
    Ok(())
}

pub fn csv_string(rows: &[EstimateRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

/// One curve per distinct law, `p_hat` against `n`.
pub fn sweep_chart(rows: &[EstimateRow]) -> LineChart {
    let k = rows.first().map_or(3.0, |r| r.k);
    let centered = rows.first().is_some_and(|r| r.centered);
    let event = if centered { "|X - mean|" } else { "|X|" };
    let mut chart = LineChart::new(
        format!("P({event} > {k} s) against sample size"),
        "sample size n",
        "estimated probability",
    );
    let mut laws: Vec<_> = Vec::new();
    for r in rows {
        if !laws.contains(&r.spec) {
            laws.push(r.spec);
        }
    }
    for law in laws {
        let pts = rows
            .iter()
            .filter(|r| r.spec == law)
            .map(|r| (r.n as f64, r.p_hat))
            .collect();
        chart.add_series(law.to_string(), pts);
    }
    chart
}
