//! CSV and markdown tables for study results.

use std::fmt::Write;

use crate::errors::ErrorRecord;
use crate::study::StabilityRow;

/// Six significant digits with a signed two-digit exponent, e.g.
/// `1.451833e-02` is written `1.45183e-02`.
pub fn sci(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    let s = format!("{v:.5e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Two decimals; empty when the rate is undefined.
pub fn rate_cell(r: Option<f64>) -> String {
    r.map(|r| format!("{r:.2}")).unwrap_or_default()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Markdown,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            _ => Err(format!("unknown format `{s}` (csv or markdown)")),
        }
    }
}

/// Header plus string cells; both formats render from this.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.header.join(","));
                out.push('\n');
                for r in &self.rows {
                    out.push_str(&r.join(","));
                    out.push('\n');
                }
            }
            Format::Markdown => {
                let _ = writeln!(out, "| {} |", self.header.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(self.header.len()));
                for r in &self.rows {
                    let cells: Vec<&str> = r.iter().map(|c| if c.is_empty() { "-" } else { c.as_str() }).collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
            }
        }
        out
    }
}

pub const CONVERGE_H_HEADER: [&str; 7] = ["h", "l2_domain", "rate_l2_domain", "l2_gamma1", "rate_l2_gamma1", "energy", "rate_energy"];
pub const CONVERGE_DT_HEADER: [&str; 5] = ["dt", "l2_domain", "rate_l2_domain", "l2_gamma1", "rate_l2_gamma1"];
pub const STABILITY_HEADER: [&str; 3] = ["k", "t", "l2_lambda_norm"];

pub fn converge_h_table(rows: &[ErrorRecord]) -> Table {
    let rows = rows
        .iter()
        .map(|r| {
            vec![
                sci(r.h),
                sci(r.l2_domain),
                rate_cell(r.rate_l2_domain),
                sci(r.l2_gamma1),
                rate_cell(r.rate_l2_gamma1),
                sci(r.energy_accumulated),
                rate_cell(r.rate_energy),
            ]
        })
        .collect();
    Table { header: CONVERGE_H_HEADER.to_vec(), rows }
}

pub fn converge_dt_table(rows: &[ErrorRecord]) -> Table {
    let rows = rows
        .iter()
        .map(|r| vec![sci(r.dt), sci(r.l2_domain), rate_cell(r.rate_l2_domain), sci(r.l2_gamma1), rate_cell(r.rate_l2_gamma1)])
        .collect();
    Table { header: CONVERGE_DT_HEADER.to_vec(), rows }
}

pub fn stability_table(rows: &[StabilityRow]) -> Table {
    let rows = rows.iter().map(|r| vec![r.k.to_string(), sci(r.t), sci(r.l2_lambda)]).collect();
    Table { header: STABILITY_HEADER.to_vec(), rows }
}
