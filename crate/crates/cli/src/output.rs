//! Rendering as JSON, CSV or an aligned table.
//!
//! CSV columns are the table columns. Verification reports always use
//! `check,params,status,witness,millis`, with the witness as compact JSON.

use std::io::Write;

use clap::ValueEnum;
use serde_json::Value;

use staircase_core::report::VerificationReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<const N: usize>(columns: [&str; N]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<const N: usize>(&mut self, row: [String; N]) {
        self.rows.push(row.to_vec());
    }

    pub fn render(&self) -> String {
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for r in &self.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| {
            let s: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect();
            s.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.columns) + "\n";
        for r in &self.rows {
            out += &line(r);
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

pub fn render(format: Format, json: &Value, table: &Table) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(json)? + "\n",
        Format::Csv => table.to_csv()?,
        Format::Table => table.render(),
    })
}

pub fn emit(format: Format, json: &Value, table: &Table) -> anyhow::Result<()> {
    let s = render(format, json, table)?;
    std::io::stdout().lock().write_all(s.as_bytes())?;
    Ok(())
}

pub fn report_table(reports: &[VerificationReport]) -> Table {
    let mut t = Table::new(["check", "params", "status", "witness", "millis"]);
    for r in reports {
        t.push([
            r.check.clone(),
            r.params.clone(),
            r.status.to_string(),
            r.witness.as_ref().map(|w| w.to_string()).unwrap_or_default(),
            r.millis.to_string(),
        ]);
    }
    t
}

pub fn render_reports(format: Format, reports: &[VerificationReport]) -> anyhow::Result<String> {
    render(format, &serde_json::to_value(reports)?, &report_table(reports))
}

pub fn emit_reports(format: Format, reports: &[VerificationReport]) -> anyhow::Result<()> {
    let s = render_reports(format, reports)?;
    std::io::stdout().lock().write_all(s.as_bytes())?;
    Ok(())
}
