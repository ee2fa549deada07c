//! CSV persistence for grid results and winner tables.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{GridResult, WinnerReport};
use crate::error::{Error, Result};

/// One keyed accuracy cell: the canonical on-disk grid record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub dataset: String,
    pub config: String,
    pub br: f64,
    pub repeat: usize,
    pub fold: u8,
    pub accuracy: f64,
}

const GRID_HEADER: [&str; 6] = ["dataset", "config", "br", "repeat", "fold", "accuracy"];

/// Writes rows with a header when `header` is true. Floats use Rust's
/// shortest round-trip formatting, so output bytes depend only on values.
pub fn write_grid_rows<W: Write>(rows: impl IntoIterator<Item = GridRow>, writer: W, header: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if header {
        w.write_record(GRID_HEADER)?;
    }
    for r in rows {
        w.write_record([
            r.dataset,
            r.config,
            format!("{:?}", r.br),
            r.repeat.to_string(),
            r.fold.to_string(),
            format!("{:?}", r.accuracy),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_grid_csv<W: Write>(gr: &GridResult, writer: W) -> Result<()> {
    write_grid_rows(gr.rows(), writer, true)
}

pub fn read_grid_rows<R: Read>(reader: R) -> Result<Vec<GridRow>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().ne(GRID_HEADER) {
        return Err(Error::data(format!(
            "grid csv header must be `{}`",
            GRID_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.deserialize() {
        let row: GridRow = rec?;
        if !(0.0..=1.0).contains(&row.accuracy) {
            return Err(Error::data(format!("accuracy {} outside [0, 1]", row.accuracy)));
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a grid CSV, returning one result per dataset in first-seen order.
pub fn read_grid_csv<R: Read>(reader: R) -> Result<Vec<GridResult>> {
    let rows = read_grid_rows(reader)?;
    let mut names: Vec<&str> = Vec::new();
    for r in &rows {
        if !names.contains(&r.dataset.as_str()) {
            names.push(&r.dataset);
        }
    }
    names
        .iter()
        .map(|name| {
            let subset: Vec<GridRow> = rows.iter().filter(|r| r.dataset == *name).cloned().collect();
            GridResult::from_rows(&subset)
        })
        .collect()
}

const WINNER_HEADER: [&str; 5] = ["dataset", "best_config", "accuracy_pct", "best_br", "max_p_value"];

pub fn write_winners_csv<W: Write>(reports: &[WinnerReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(WINNER_HEADER)?;
    for r in reports {
        w.write_record([
            r.dataset.clone(),
            r.best_config.clone(),
            format!("{:?}", 100.0 * r.mean_accuracy),
            format!("{:?}", r.best_br),
            r.max_p_value.map(|p| format!("{p:?}")).unwrap_or_default(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Reads a winners table. The p-value column may be empty, a number, or an
/// upper bound such as `<1e-6`, which is read as the bound itself.
pub fn read_winners_csv<R: Read>(reader: R) -> Result<Vec<WinnerReport>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::data(format!("winners csv lacks a `{name}` column")))
    };
    let [ds, cfg, acc, br, p] = [
        col("dataset")?,
        col("best_config")?,
        col("accuracy_pct")?,
        col("best_br")?,
        col("max_p_value")?,
    ];
    let num = |s: &str, what: &str, line: usize| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::data(format!("line {line}: bad {what} `{s}`")))
    };
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let p_text = rec[p].trim();
        let max_p_value = if p_text.is_empty() {
            None
        } else {
            Some(num(p_text.trim_start_matches('<'), "p-value", line)?)
        };
        out.push(WinnerReport {
            dataset: rec[ds].to_owned(),
            best_config: rec[cfg].to_owned(),
            best_br: num(&rec[br], "best_br", line)?,
            mean_accuracy: num(&rec[acc], "accuracy", line)? / 100.0,
            max_p_value,
            tie: false,
        });
    }
    Ok(out)
}
