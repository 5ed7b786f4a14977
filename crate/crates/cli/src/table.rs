//! CSV and markdown rendering of result tables.

use std::fmt::Write;

use crate::config::OutputFormat;
use crate::experiment::{DofTable, RowResult};

pub const CSV_HEADER: &str =
    "M,H,l,s_or_r,k,dofs_coarse,dofs_fine,h1_error,scaled_error,cpu_seconds";

/// `printf("%.6e")` formatting: six fraction digits, signed exponent of at
/// least two digits.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.6e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn render_rows(rows: &[RowResult], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => rows_csv(rows),
        OutputFormat::Markdown => rows_markdown(rows),
    }
}

fn row_fields(row: &RowResult) -> [String; 10] {
    match &row.outcome {
        Ok(r) => [
            r.m.to_string(),
            sci(r.h),
            r.l.to_string(),
            r.s_or_r.to_string(),
            r.k.to_string(),
            r.dofs_coarse.to_string(),
            r.dofs_fine.to_string(),
            sci(r.h1_error),
            sci(r.scaled_error),
            r.cpu_seconds.map(sci).unwrap_or_default(),
        ],
        Err(_) => {
            let mut f: [String; 10] = Default::default();
            f[0] = row.m.to_string();
            f[1] = sci(1.0 / row.m as f64);
            f[7] = "failed".into();
            f
        }
    }
}

fn rows_csv(rows: &[RowResult]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row_fields(row).join(","));
        out.push('\n');
    }
    out
}

fn rows_markdown(rows: &[RowResult]) -> String {
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    let mut out = format!("| {} |\n", header.join(" | "));
    let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
    for row in rows {
        let _ = writeln!(out, "| {} |", row_fields(row).join(" | "));
    }
    out
}

pub fn render_dof_table(table: &DofTable, format: OutputFormat) -> String {
    let first = table.degrees[0];
    let mut header = vec![
        "M".to_string(),
        format!("dof(V_H^{first})"),
        format!("dof(V_h^{first})"),
    ];
    header.extend(table.degrees[1..].iter().map(|d| format!("dof(V_H^{d})")));
    let lines: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            let mut line = vec![r.m.to_string(), r.coarse[0].to_string(), r.fine.to_string()];
            line.extend(r.coarse[1..].iter().map(ToString::to_string));
            line
        })
        .collect();
    match format {
        OutputFormat::Csv => {
            let mut out = header.join(",") + "\n";
            for line in lines {
                out.push_str(&line.join(","));
                out.push('\n');
            }
            out
        }
        OutputFormat::Markdown => {
            let mut out = format!(
                "| {} |\n|{}\n",
                header.join(" | "),
                "---|".repeat(header.len())
            );
            for line in lines {
                let _ = writeln!(out, "| {} |", line.join(" | "));
            }
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use twolevel_core::ExperimentRow;

    #[test]
    fn scientific_notation_matches_printf() {
        assert_eq!(sci(5.775e-8), "5.775000e-08");
        assert_eq!(sci(1.0 / 9.0), "1.111111e-01");
        assert_eq!(sci(0.0), "0.000000e+00");
        assert_eq!(sci(187489.0), "1.874890e+05");
        assert_eq!(sci(-2.5e-120), "-2.500000e-120");
    }

    #[test]
    fn failed_rows_are_marked() {
        let rows = vec![
            RowResult {
                m: 9,
                outcome: Ok(ExperimentRow::new(9, 3, 6, 3, 784, 3025, 5.775e-8, 6, None)),
            },
            RowResult {
                m: 10,
                outcome: Err("boom".into()),
            },
        ];
        let csv = render_rows(&rows, OutputFormat::Csv);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(
            lines[1],
            "9,1.111111e-01,3,6,3,784,3025,5.775000e-08,3.069072e-02,"
        );
        assert_eq!(lines[2], "10,1.000000e-01,,,,,,failed,,");
        let md = render_rows(&rows, OutputFormat::Markdown);
        assert_eq!(md.lines().count(), 4);
    }
}
