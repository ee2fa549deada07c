//! Dataset persistence: a JSON manifest next to a numeric CSV.
//!
//! The CSV has one column per encoded feature (header = feature name) plus a
//! final `label` column holding the class id.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub name: String,
    pub n_rows: usize,
    pub n_features: usize,
    pub n_classes: usize,
    pub n_continuous: usize,
    pub n_binary: usize,
    pub feature_kinds: Vec<FeatureKind>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
    /// CSV file name, relative to the manifest's directory.
    pub data_file: String,
}

impl DatasetManifest {
    pub fn describe(ds: &Dataset, data_file: impl Into<String>) -> Self {
        Self {
            name: ds.name().to_owned(),
            n_rows: ds.n_rows(),
            n_features: ds.n_features(),
            n_classes: ds.n_classes(),
            n_continuous: ds.n_kind(FeatureKind::Continuous),
            n_binary: ds.n_kind(FeatureKind::Binary),
            feature_kinds: ds.feature_kinds().to_vec(),
            feature_names: ds.feature_names().to_vec(),
            class_names: ds.class_names().to_vec(),
            data_file: data_file.into(),
        }
    }

    /// One-line summary: name, continuous count, binary count, rows, classes.
    pub fn summary_line(&self) -> String {
        format!(
            "{} {} {} {} {}",
            self.name, self.n_continuous, self.n_binary, self.n_rows, self.n_classes
        )
    }
}

/// Writes `<stem>.json` and `<stem>.csv` into `dir`; returns the manifest path.
pub fn write_dataset(ds: &Dataset, dir: impl AsRef<Path>, stem: &str) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_name = format!("{stem}.csv");
    let csv_path = dir.join(&csv_name);
    let file = File::create(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    let mut header: Vec<&str> = ds.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    w.write_record(&header)?;
    let mut record: Vec<String> = Vec::with_capacity(ds.n_features() + 1);
    for i in 0..ds.n_rows() {
        record.clear();
        record.extend(ds.row(i).iter().map(|v| format!("{v:?}")));
        record.push(ds.labels()[i].to_string());
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;

    let manifest = DatasetManifest::describe(ds, csv_name);
    let json_path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(&manifest)?;
    fs::write(&json_path, text + "\n").map_err(|e| Error::io(&json_path, e))?;
    Ok(json_path)
}

pub fn read_dataset(manifest_path: impl AsRef<Path>) -> Result<(DatasetManifest, Dataset)> {
    let manifest_path = manifest_path.as_ref();
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: DatasetManifest = serde_json::from_str(&text)?;
    let csv_path = manifest_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(&manifest.data_file);
    let file = File::open(&csv_path).map_err(|e| Error::io(&csv_path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let d = manifest.n_features;
    let mut features = Vec::with_capacity(manifest.n_rows * d);
    let mut labels = Vec::with_capacity(manifest.n_rows);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != d + 1 {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: d + 1,
                found: rec.len(),
            });
        }
        for cell in rec.iter().take(d) {
            features.push(
                cell.parse::<f64>()
                    .map_err(|_| Error::data(format!("row {}: `{cell}` is not a number", i + 1)))?,
            );
        }
        labels.push(
            rec[d]
                .parse::<usize>()
                .map_err(|_| Error::data(format!("row {}: bad label `{}`", i + 1, &rec[d])))?,
        );
    }
    if labels.len() != manifest.n_rows {
        return Err(Error::data(format!(
            "manifest says {} rows, csv has {}",
            manifest.n_rows,
            labels.len()
        )));
    }
    let ds = Dataset::new(
        manifest.name.clone(),
        features,
        d,
        manifest.feature_kinds.clone(),
        labels,
        manifest.class_names.clone(),
    )?
    .with_feature_names(manifest.feature_names.clone())?;
    Ok((manifest, ds))
}
