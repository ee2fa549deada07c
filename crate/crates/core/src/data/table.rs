use std::collections::HashSet;
use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues {
    Numerical(Vec<Option<f64>>),
    Categorical(Vec<Option<String>>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Numerical(v) => v.len(),
            ColumnValues::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_missing(&self, i: usize) -> bool {
        match self {
            ColumnValues::Numerical(v) => v[i].is_none(),
            ColumnValues::Categorical(v) => v[i].is_none(),
        }
    }

    pub fn n_missing(&self) -> usize {
        (0..self.len()).filter(|&i| self.is_missing(i)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawColumn {
    pub name: String,
    pub values: ColumnValues,
}

/// Typed but unencoded table: feature columns plus the target labels as text.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub columns: Vec<RawColumn>,
    pub target: String,
    pub labels: Vec<String>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: u8,
    /// Columns forced to categorical even when every cell parses as a number.
    pub categorical: HashSet<String>,
    /// Columns ignored entirely (e.g. row identifiers).
    pub drop: HashSet<String>,
    /// Cell values treated as missing, compared case-insensitively after trimming.
    pub missing_markers: Vec<String>,
    /// The file has no header row; columns are named `c0`, `c1`, ...
    pub no_header: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            categorical: HashSet::new(),
            drop: HashSet::new(),
            missing_markers: vec![String::new(), "?".into(), "NA".into()],
            no_header: false,
        }
    }
}

impl LoadOptions {
    fn is_missing(&self, cell: &str) -> bool {
        self.missing_markers
            .iter()
            .any(|m| m.eq_ignore_ascii_case(cell))
    }
}

pub fn load_csv(path: impl AsRef<Path>, target: &str, options: &LoadOptions) -> Result<RawTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_csv(file, target, options)
}

/// Parses CSV text into a [`RawTable`].
///
/// A column is numerical when every non-missing cell parses as `f64` and the
/// column is not listed in `options.categorical`. Rows whose target cell is
/// missing are dropped.
pub fn parse_csv<R: Read>(reader: R, target: &str, options: &LoadOptions) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();

    let mut rows: Vec<Vec<String>> = Vec::new();
    let header: Vec<String> = if options.no_header {
        Vec::new()
    } else {
        match records.next() {
            Some(rec) => rec?.iter().map(str::to_owned).collect(),
            None => return Err(Error::data("empty file: no header row")),
        }
    };
    let mut width = if options.no_header { None } else { Some(header.len()) };
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        // blank lines
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        let expected = *width.get_or_insert(rec.len());
        if rec.len() != expected {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected,
                found: rec.len(),
            });
        }
        rows.push(rec.iter().map(str::to_owned).collect());
    }
    if rows.is_empty() {
        return Err(Error::data("no data rows"));
    }
    let width = width.unwrap_or(0);
    let header = if options.no_header {
        (0..width).map(|j| format!("c{j}")).collect()
    } else {
        header
    };

    let target_idx = header
        .iter()
        .position(|h| h == target)
        .ok_or_else(|| Error::MissingTarget(target.to_owned()))?;

    rows.retain(|r| !options.is_missing(&r[target_idx]));
    if rows.is_empty() {
        return Err(Error::data("every row has a missing target"));
    }
    let labels = rows.iter().map(|r| r[target_idx].clone()).collect();

    let mut columns = Vec::new();
    for (j, name) in header.iter().enumerate() {
        if j == target_idx || options.drop.contains(name) {
            continue;
        }
        let cells: Vec<Option<&str>> = rows
            .iter()
            .map(|r| Some(r[j].as_str()).filter(|c| !options.is_missing(c)))
            .collect();
        let parsed: Option<Vec<Option<f64>>> = if options.categorical.contains(name) {
            None
        } else {
            cells
                .iter()
                .map(|c| match c {
                    None => Some(None),
                    Some(s) => s.parse::<f64>().ok().filter(|v| v.is_finite()).map(Some),
                })
                .collect()
        };
        let values = match parsed {
            Some(nums) => ColumnValues::Numerical(nums),
            None => ColumnValues::Categorical(
                cells.into_iter().map(|c| c.map(str::to_owned)).collect(),
            ),
        };
        columns.push(RawColumn {
            name: name.clone(),
            values,
        });
    }

    Ok(RawTable {
        columns,
        target: target.to_owned(),
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, target: &str) -> Result<RawTable> {
        parse_csv(text.as_bytes(), target, &LoadOptions::default())
    }

    #[test]
    fn three_columns_five_rows() {
        let t = parse("a,b,class\n1,x,p\n2,y,q\n3,x,p\n4,y,q\n5,x,p\n", "class").unwrap();
        assert_eq!(t.n_rows(), 5);
        assert_eq!(t.columns.len(), 2);
        assert!(matches!(t.columns[0].values, ColumnValues::Numerical(_)));
        assert!(matches!(t.columns[1].values, ColumnValues::Categorical(_)));
        assert_eq!(t.labels, vec!["p", "q", "p", "q", "p"]);
    }

    #[test]
    fn question_mark_is_missing_numeric() {
        let t = parse("v,class\n1.5,a\n?,b\n2.0,a\n", "class").unwrap();
        assert_eq!(
            t.columns[0].values,
            ColumnValues::Numerical(vec![Some(1.5), None, Some(2.0)])
        );
    }

    #[test]
    fn markers_are_case_insensitive() {
        let t = parse("v,class\nna,a\nNA,b\n,a\n3,b\n", "class").unwrap();
        assert_eq!(t.columns[0].values.n_missing(), 3);
    }

    #[test]
    fn ragged_row_reports_position() {
        let err = parse("a,b,class\n1,2,x\n1,2,x\n1,2,y\n1,y\n", "class").unwrap_err();
        assert!(matches!(err, Error::RaggedRow { row: 4, .. }));
        assert!(err.to_string().starts_with("ragged row 4"));
    }

    #[test]
    fn absent_target_is_an_error() {
        assert!(matches!(parse("a,b\n1,2\n", "class"), Err(Error::MissingTarget(_))));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(parse("", "class").is_err());
        assert!(parse("a,class\n", "class").is_err());
    }

    #[test]
    fn rows_with_missing_target_are_dropped() {
        let t = parse("a,class\n1,x\n2,?\n3,y\n", "class").unwrap();
        assert_eq!(t.n_rows(), 2);
    }

    #[test]
    fn hints_force_categorical() {
        let mut opts = LoadOptions::default();
        opts.categorical.insert("code".into());
        let t = parse_csv("code,class\n1,a\n2,b\n".as_bytes(), "class", &opts).unwrap();
        assert!(matches!(t.columns[0].values, ColumnValues::Categorical(_)));
    }

    #[test]
    fn headerless_files_use_positional_names() {
        let opts = LoadOptions {
            no_header: true,
            ..LoadOptions::default()
        };
        let t = parse_csv("1,2,M\n3,4,R\n".as_bytes(), "c2", &opts).unwrap();
        assert_eq!(t.columns[1].name, "c1");
        assert_eq!(t.labels, vec!["M", "R"]);
    }
}
