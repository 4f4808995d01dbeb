use std::io::Write;

use clap::ValueEnum;
use locon_core::cyclo::ScaledCyclotomic;

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Md,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "md" => Ok(Format::Md),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}'")),
        }
    }
}

/// A titled table rendered as a Markdown pipe table or as CSV.
pub struct Table {
    title: String,
    headers: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(title: impl Into<String>, headers: &[&str]) -> Self {
        Table { title: title.into(), headers: headers.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn write(&self, out: &mut dyn Write, format: Format) -> Result<(), CliError> {
        match format {
            Format::Md => {
                writeln!(out, "## {}", self.title)?;
                writeln!(out)?;
                writeln!(out, "| {} |", self.headers.join(" | "))?;
                writeln!(out, "|{}|", vec!["---"; self.headers.len()].join("|"))?;
                for r in &self.rows {
                    let cells: Vec<String> = r.iter().map(|c| c.replace('|', "\\|")).collect();
                    writeln!(out, "| {} |", cells.join(" | "))?;
                }
                writeln!(out)?;
            }
            Format::Csv => {
                writeln!(out, "# {}", self.title)?;
                let mut w = csv::Writer::from_writer(&mut *out);
                w.write_record(&self.headers)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }
}

pub fn pass(ok: bool) -> String {
    if ok { "PASS" } else { "FAIL" }.to_string()
}

/// Serialized and human-readable renderings of a value.
pub fn value_cells(v: &ScaledCyclotomic) -> [String; 2] {
    [v.to_string(), v.human()]
}
