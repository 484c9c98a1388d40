//! Delimited-text ingestion, KNN imputation and table writers.

use std::fs::File;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, Frame};
use crate::error::{NvsdError, Result};

/// Cell tokens read as missing.
pub const NA_TOKENS: [&str; 6] = ["", "NA", "na", "NaN", "nan", "?"];

fn is_na(token: &str) -> bool {
    NA_TOKENS.contains(&token)
}

/// Response column by header name or zero-based position.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResponseColumn {
    Name(String),
    Index(usize),
}

impl ResponseColumn {
    /// Numeric strings are positions, anything else a name.
    pub fn parse(s: &str) -> Self {
        s.parse().map_or_else(|_| Self::Name(s.to_string()), Self::Index)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSpec {
    pub path: PathBuf,
    pub delimiter: u8,
    pub response: ResponseColumn,
    /// Columns with a larger missing fraction are dropped.
    pub column_na_threshold: f64,
    pub knn_k: usize,
    /// Columns ignored entirely (identifiers, fold labels, other outcomes).
    pub exclude: Vec<String>,
}

impl IngestSpec {
    pub fn new(path: impl Into<PathBuf>, response: ResponseColumn) -> Self {
        Self {
            path: path.into(),
            delimiter: b',',
            response,
            column_na_threshold: 0.10,
            knn_k: 10,
            exclude: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.column_na_threshold) {
            return Err(NvsdError::Config(format!(
                "column NA threshold must be in [0, 1), got {}",
                self.column_na_threshold
            )));
        }
        if self.knn_k == 0 {
            return Err(NvsdError::Config("knn k must be at least 1".into()));
        }
        Ok(())
    }
}

/// Header plus column-major cells, `None` for missing.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub names: Vec<String>,
    pub columns: Vec<Vec<Option<f64>>>,
}

impl RawTable {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    fn resolve(&self, col: &ResponseColumn) -> Result<usize> {
        match col {
            ResponseColumn::Name(name) => self
                .names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| NvsdError::Schema(format!("response column {name:?} not found"))),
            ResponseColumn::Index(j) if *j < self.names.len() => Ok(*j),
            ResponseColumn::Index(j) => Err(NvsdError::Schema(format!(
                "response index {j} out of range for {} columns",
                self.names.len()
            ))),
        }
    }
}

/// Parses delimited text with a header row. Columns named in `skip` are not
/// parsed, so they may hold text.
pub fn read_table<R: Read>(reader: R, delimiter: u8, skip: &[String]) -> Result<RawTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| NvsdError::Parse(format!("header: {e}")))?
        .clone();
    let keep: Vec<usize> = (0..header.len())
        .filter(|&j| !skip.iter().any(|s| s == &header[j]))
        .collect();
    let names: Vec<String> = keep.iter().map(|&j| header[j].to_string()).collect();
    let mut columns = vec![Vec::new(); keep.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| NvsdError::Parse(format!("row {}: {e}", row + 1)))?;
        if record.len() != header.len() {
            return Err(NvsdError::Parse(format!(
                "row {} has {} fields, header has {}",
                row + 1,
                record.len(),
                header.len()
            )));
        }
        for (c, &j) in keep.iter().enumerate() {
            let token = &record[j];
            let cell = if is_na(token) {
                None
            } else {
                let v: f64 = token.parse().map_err(|_| {
                    NvsdError::Parse(format!(
                        "row {}, column {:?}: {token:?} is not a number",
                        row + 1,
                        names[c]
                    ))
                })?;
                v.is_finite().then_some(v)
            };
            columns[c].push(cell);
        }
    }
    Ok(RawTable { names, columns })
}

pub fn read_table_path(path: &Path, delimiter: u8, skip: &[String]) -> Result<RawTable> {
    let file = File::open(path)
        .map_err(|e| NvsdError::Ingest(format!("cannot open {}: {e}", path.display())))?;
    read_table(file, delimiter, skip)
}

/// What `ingest` removed or filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub columns_dropped: Vec<String>,
    pub cells_imputed: usize,
}

/// Reads the file, drops rows with a missing response, drops predictor
/// columns whose missing fraction exceeds the threshold, and imputes the rest
/// with `knn_impute`.
pub fn ingest(spec: &IngestSpec) -> Result<(Dataset, IngestReport)> {
    spec.validate()?;
    let raw = read_table_path(&spec.path, spec.delimiter, &spec.exclude)?;
    ingest_table(raw, spec)
}

pub fn ingest_table(raw: RawTable, spec: &IngestSpec) -> Result<(Dataset, IngestReport)> {
    spec.validate()?;
    let r = raw.resolve(&spec.response)?;
    let rows_read = raw.n_rows();
    let rows: Vec<usize> = (0..rows_read).filter(|&i| raw.columns[r][i].is_some()).collect();
    if rows.len() < 3 {
        return Err(NvsdError::Ingest(format!(
            "only {} rows have an observed response",
            rows.len()
        )));
    }
    let response: Vec<f64> = rows.iter().map(|&i| raw.columns[r][i].unwrap()).collect();
    let mut names = Vec::new();
    let mut cells = Vec::new();
    let mut columns_dropped = Vec::new();
    for (j, (name, col)) in raw.names.iter().zip(&raw.columns).enumerate() {
        if j == r {
            continue;
        }
        let col: Vec<Option<f64>> = rows.iter().map(|&i| col[i]).collect();
        let missing = col.iter().filter(|v| v.is_none()).count();
        if missing as f64 / rows.len() as f64 > spec.column_na_threshold {
            columns_dropped.push(name.clone());
        } else {
            names.push(name.clone());
            cells.push(col);
        }
    }
    if names.is_empty() {
        return Err(NvsdError::Ingest("no predictor columns left after the NA filter".into()));
    }
    let cells_imputed = cells.iter().flatten().filter(|v| v.is_none()).count();
    let columns = knn_impute(&cells, spec.knn_k)?;
    let dataset = Dataset::new(Frame::new(names, columns)?, response, raw.names[r].clone())?;
    Ok((
        dataset,
        IngestReport {
            rows_read,
            rows_dropped: rows_read - rows.len(),
            columns_dropped,
            cells_imputed,
        },
    ))
}

/// Fills each missing cell with the mean of its column over the `k` nearest
/// rows that observe that column. Distance is the root mean squared
/// difference over coordinates both rows observe, after standardizing every
/// column by its observed mean and sd. Distance ties go to the lower row
/// index; rows sharing no observed coordinate are never neighbours. A column
/// with no usable donor falls back to its observed mean.
pub fn knn_impute(columns: &[Vec<Option<f64>>], k: usize) -> Result<Vec<Vec<f64>>> {
    if k == 0 {
        return Err(NvsdError::Config("knn k must be at least 1".into()));
    }
    let p = columns.len();
    let n = columns.first().map_or(0, Vec::len);
    let mut scaled = vec![vec![None; p]; n];
    let mut col_mean = vec![0.0; p];
    for (j, col) in columns.iter().enumerate() {
        let obs: Vec<f64> = col.iter().flatten().copied().collect();
        if obs.is_empty() {
            return Err(NvsdError::Ingest(format!("column {j} has no observed values")));
        }
        let m = crate::stats::mean(&obs);
        let sd = if obs.len() > 1 { crate::stats::sample_sd(&obs) } else { 0.0 };
        let sd = if sd > 0.0 { sd } else { 1.0 };
        col_mean[j] = m;
        for (i, v) in col.iter().enumerate() {
            scaled[i][j] = v.map(|v| (v - m) / sd);
        }
    }
    if let Some(i) = scaled.iter().position(|row| row.iter().all(Option::is_none)) {
        return Err(NvsdError::Ingest(format!("row {} has no observed values", i + 1)));
    }
    let mut out: Vec<Vec<f64>> = columns
        .iter()
        .map(|c| c.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
        .collect();
    for i in 0..n {
        let targets: Vec<usize> = (0..p).filter(|&j| columns[j][i].is_none()).collect();
        if targets.is_empty() {
            continue;
        }
        let mut dist: Vec<(f64, usize)> = (0..n)
            .filter(|&r| r != i)
            .filter_map(|r| {
                let (mut ss, mut shared) = (0.0, 0usize);
                for j in 0..p {
                    if let (Some(a), Some(b)) = (scaled[i][j], scaled[r][j]) {
                        ss += (a - b) * (a - b);
                        shared += 1;
                    }
                }
                (shared > 0).then(|| ((ss / shared as f64).sqrt(), r))
            })
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for j in targets {
            let donors: Vec<f64> = dist
                .iter()
                .filter_map(|&(_, r)| columns[j][r])
                .take(k)
                .collect();
            out[j][i] = if donors.is_empty() {
                col_mean[j]
            } else {
                crate::stats::mean(&donors)
            };
        }
    }
    Ok(out)
}

/// Writes a header and columns as delimited text. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_columns<W: Write>(
    writer: W,
    delimiter: u8,
    names: &[String],
    columns: &[Vec<f64>],
) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(delimiter).from_writer(writer);
    let csv_err = |e: csv::Error| NvsdError::Io(std::io::Error::other(e));
    w.write_record(names).map_err(csv_err)?;
    let n = columns.first().map_or(0, Vec::len);
    for i in 0..n {
        w.write_record(columns.iter().map(|c| format!("{:?}", c[i])))
            .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Predictors followed by the response.
pub fn write_dataset<W: Write>(writer: W, delimiter: u8, d: &Dataset) -> Result<()> {
    let mut names = d.names().to_vec();
    names.push(d.response_name().to_string());
    let mut columns = d.predictors().columns().to_vec();
    columns.push(d.response().to_vec());
    write_columns(writer, delimiter, &names, &columns)
}

/// Headerless numeric matrix, one row per line.
pub fn read_numeric_matrix(path: &Path, delimiter: u8) -> Result<Vec<Vec<f64>>> {
    let file = File::open(path)
        .map_err(|e| NvsdError::Ingest(format!("cannot open {}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(file);
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec.map_err(|e| NvsdError::Parse(format!("row {}: {e}", i + 1)))?;
            rec.iter()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| NvsdError::Parse(format!("row {}: {t:?} is not a number", i + 1)))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(text: &str) -> RawTable {
        read_table(text.as_bytes(), b',', &[]).unwrap()
    }

    #[test]
    fn na_tokens_and_numbers() {
        let t = table("a,b\n1,NA\n,2.5\n?,3\n");
        assert_eq!(t.columns[0], vec![Some(1.0), None, None]);
        assert_eq!(t.columns[1], vec![None, Some(2.5), Some(3.0)]);
        assert!(read_table("a\nfoo\n".as_bytes(), b',', &[]).is_err());
        let skipped = read_table("id,a\nfoo,1\n".as_bytes(), b',', &["id".into()]).unwrap();
        assert_eq!(skipped.names, vec!["a".to_string()]);
    }

    #[test]
    fn complete_matrix_unchanged() {
        let cols = vec![vec![Some(1.0), Some(2.0), Some(3.0)], vec![Some(0.5), Some(0.1), Some(9.0)]];
        let out = knn_impute(&cols, 2).unwrap();
        assert_eq!(out, vec![vec![1.0, 2.0, 3.0], vec![0.5, 0.1, 9.0]]);
    }

    #[test]
    fn k1_takes_nearest_row() {
        let cols = vec![
            vec![Some(0.0), Some(0.1), Some(5.0), Some(5.2)],
            vec![Some(10.0), None, Some(-3.0), Some(-4.0)],
        ];
        let out = knn_impute(&cols, 1).unwrap();
        assert_eq!(out[1][1], 10.0);
        let out = knn_impute(&cols, 2).unwrap();
        // row 2 at 5.0 is nearer to 0.1 than row 3 at 5.2
        assert_eq!(out[1][1], 3.5);
    }

    #[test]
    fn empty_row_is_an_error() {
        let cols = vec![vec![Some(1.0), None, Some(2.0)], vec![Some(1.0), None, Some(3.0)]];
        assert!(matches!(knn_impute(&cols, 1), Err(NvsdError::Ingest(_))));
    }

    #[test]
    fn ingest_drops_sparse_columns_and_missing_responses() {
        let mut text = String::from("a,b,y\n");
        for i in 0..20 {
            let b = if i < 3 { "NA".to_string() } else { i.to_string() };
            let y = if i == 19 { "NA".to_string() } else { (2 * i).to_string() };
            text.push_str(&format!("{i},{b},{y}\n"));
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, text).unwrap();
        let spec = IngestSpec::new(&path, ResponseColumn::Name("y".into()));
        let (d, report) = ingest(&spec).unwrap();
        // b is 3/19 missing after the response filter
        assert_eq!(d.names(), &["a".to_string()]);
        assert_eq!(report.columns_dropped, vec!["b".to_string()]);
        assert_eq!(report.rows_dropped, 1);
        assert_eq!(d.n(), 19);
        let loose = IngestSpec {
            column_na_threshold: 0.2,
            ..spec
        };
        let (d, report) = ingest(&loose).unwrap();
        assert_eq!(d.p(), 2);
        assert_eq!(report.cells_imputed, 3);
    }

    #[test]
    fn write_then_read_is_lossless() {
        let names = vec!["u".to_string(), "v".to_string()];
        let cols = vec![vec![0.1 + 0.2, 1e-300, -7.0], vec![std::f64::consts::PI, 2.0 / 3.0, 1e17]];
        let mut buf = Vec::new();
        write_columns(&mut buf, b'\t', &names, &cols).unwrap();
        let back = read_table(buf.as_slice(), b'\t', &[]).unwrap();
        assert_eq!(back.names, names);
        for (a, b) in back.columns.iter().zip(&cols) {
            assert_eq!(a.iter().map(|v| v.unwrap()).collect::<Vec<_>>(), *b);
        }
    }

    #[test]
    fn response_by_index() {
        assert_eq!(ResponseColumn::parse("3"), ResponseColumn::Index(3));
        assert_eq!(ResponseColumn::parse("medv"), ResponseColumn::Name("medv".into()));
    }
}
