//! CSV ingestion into raw tables and plain numeric CSV output.
//!
//! A column is read as numeric when every non-empty cell parses as a float;
//! otherwise (or when it is named in `text_columns`) it is kept as text.
//! Empty cells become missing values. Floats are written with Rust's
//! shortest round-trip formatting, so re-reading a file reproduces every
//! value bit for bit.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use bppr_core::{RawColumn, RawTable, RawValues};

use crate::error::{CliError, Result};

pub fn read_table(path: &Path, text_columns: &[String]) -> Result<RawTable> {
    let file = File::open(path).map_err(|e| CliError::input(format!("cannot open {}: {e}", path.display())))?;
    read_table_from(file, text_columns).map_err(|e| CliError { message: format!("{}: {}", path.display(), e.message), ..e })
}

pub fn read_table_from<R: Read>(reader: R, text_columns: &[String]) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if names.is_empty() || names.iter().all(String::is_empty) {
        return Err(CliError::input("missing header row"));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(CliError::input(format!("empty column name at position {}", i + 1)));
        }
        if names[..i].contains(name) {
            return Err(CliError::input(format!("duplicate column name {name}")));
        }
    }
    let mut cells: Vec<Vec<String>> = vec![Vec::new(); names.len()];
    for record in rdr.records() {
        let record = record?;
        for (col, cell) in cells.iter_mut().zip(record.iter()) {
            col.push(cell.to_string());
        }
    }
    let columns = names
        .into_iter()
        .zip(cells)
        .map(|(name, cells)| {
            let values = if text_columns.contains(&name) { None } else { parse_numeric(&cells) };
            let values = values.unwrap_or_else(|| {
                RawValues::Text(cells.into_iter().map(|c| if c.is_empty() { None } else { Some(c) }).collect())
            });
            RawColumn { name, values }
        })
        .collect();
    Ok(RawTable::new(columns))
}

fn parse_numeric(cells: &[String]) -> Option<RawValues> {
    let mut out = Vec::with_capacity(cells.len());
    for c in cells {
        if c.is_empty() {
            out.push(None);
        } else {
            out.push(Some(c.parse::<f64>().ok()?));
        }
    }
    Some(RawValues::Numeric(out))
}

/// A numeric column of an output file.
pub enum OutColumn<'a> {
    Index(&'a [usize]),
    Float(&'a [f64]),
}

impl OutColumn<'_> {
    fn len(&self) -> usize {
        match self {
            OutColumn::Index(v) => v.len(),
            OutColumn::Float(v) => v.len(),
        }
    }

    fn cell(&self, i: usize) -> String {
        match self {
            OutColumn::Index(v) => v[i].to_string(),
            OutColumn::Float(v) => v[i].to_string(),
        }
    }
}

pub fn write_columns_to<W: Write>(writer: W, names: &[&str], columns: &[OutColumn<'_>]) -> Result<()> {
    assert_eq!(names.len(), columns.len());
    let n = columns.first().map_or(0, OutColumn::len);
    assert!(columns.iter().all(|c| c.len() == n), "output columns differ in length");
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(names)?;
    for i in 0..n {
        w.write_record(columns.iter().map(|c| c.cell(i)))?;
    }
    w.flush().map_err(|e| CliError::input(format!("write failed: {e}")))?;
    Ok(())
}

pub fn write_columns(path: &Path, names: &[&str], columns: &[OutColumn<'_>]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::input(format!("cannot create {}: {e}", path.display())))?;
    write_columns_to(file, names, columns)
}

/// Numeric column `name` of a table, with a readable error when it is absent
/// or not fully numeric.
pub fn numeric_column(table: &RawTable, name: &str) -> Result<Vec<f64>> {
    let col = table.column(name).ok_or_else(|| CliError::input(format!("column {name} not found")))?;
    match &col.values {
        RawValues::Numeric(v) => v
            .iter()
            .enumerate()
            .map(|(row, x)| x.ok_or_else(|| CliError::input(format!("missing value in column {name} at row {row}"))))
            .collect(),
        RawValues::Text(_) => Err(CliError::input(format!("column {name} is not numeric"))),
    }
}
