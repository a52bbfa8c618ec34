use std::fs::File;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linsolve::DenseMatrix;
use crate::represent::{ClassId, Dataset};
use crate::scalar::Scalar;

/// Loads one sample per row: an integer label followed by the features.
/// Errors name the 1-based line of the offending row.
pub fn load_csv<T: Scalar + FromStr>(path: &Path, has_header: bool) -> Result<Dataset<T>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);

    let mut width: Option<usize> = None;
    let mut labels = Vec::new();
    let mut data: Vec<T> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            Error::format(path, format!("line {line}: {e}"))
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.len() == 1 && record.get(0) == Some("") {
            continue;
        }
        match width {
            None => {
                if record.len() < 2 {
                    return Err(Error::format(
                        path,
                        format!("line {line}: need a label and at least one feature"),
                    ));
                }
                width = Some(record.len());
            }
            Some(w) if w != record.len() => {
                return Err(Error::format(
                    path,
                    format!("line {line}: expected {w} fields, found {}", record.len()),
                ));
            }
            Some(_) => {}
        }
        let label = record[0].parse::<u32>().map_err(|_| {
            Error::format(
                path,
                format!(
                    "line {line}: label {:?} is not a nonnegative integer",
                    &record[0]
                ),
            )
        })?;
        labels.push(ClassId(label));
        for (k, field) in record.iter().enumerate().skip(1) {
            let v = field
                .parse::<T>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::format(
                        path,
                        format!(
                            "line {line}, field {}: {field:?} is not a finite number",
                            k + 1
                        ),
                    )
                })?;
            data.push(v);
        }
    }
    let Some(width) = width else {
        return Err(Error::format(path, "no data rows"));
    };
    let features = DenseMatrix::from_col_major(width - 1, labels.len(), data)?;
    Dataset::new(features, labels)
}

/// Writes `data` in the format [`load_csv`] reads, using shortest
/// round-trip float formatting.
pub fn write_csv<T: Scalar>(data: &Dataset<T>, path: &Path, header: bool) -> Result<()> {
    let io_err = |e: csv::Error| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    if header {
        let mut names = vec!["label".to_string()];
        names.extend((1..=data.dim()).map(|i| format!("f{i}")));
        w.write_record(&names).map_err(io_err)?;
    }
    for j in 0..data.len() {
        let mut row = vec![data.labels()[j].to_string()];
        row.extend(data.sample(j).iter().map(|v| v.to_string()));
        w.write_record(&row).map_err(io_err)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn load(text: &str, header: bool) -> Result<Dataset<f64>> {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("d.csv");
        fs::write(&p, text).unwrap();
        load_csv(&p, header)
    }

    #[test]
    fn two_rows() {
        let d = load("0,1.0,0.0\n1,0.0,1.0\n", false).unwrap();
        assert_eq!((d.dim(), d.len(), d.num_classes()), (2, 2, 2));
        assert_eq!(d.sample(1), &[0.0, 1.0]);
    }

    #[test]
    fn header_and_exponents() {
        let d = load("label,f1,f2\n3,1e-3,-2.5E2\n", true).unwrap();
        assert_eq!(d.sample(0), &[1e-3, -250.0]);
        assert_eq!(d.labels(), &[ClassId(3)]);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let err = load("0,1,2,3\n1,1,2\n", false).unwrap_err();
        match err {
            Error::Format { message, .. } => assert!(message.contains("line 2"), "{message}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_fields_and_empty_files() {
        assert!(matches!(load("0,abc\n", false), Err(Error::Format { .. })));
        assert!(matches!(load("x,1.0\n", false), Err(Error::Format { .. })));
        assert!(matches!(load("-1,1.0\n", false), Err(Error::Format { .. })));
        assert!(matches!(load("0,nan\n", false), Err(Error::Format { .. })));
        assert!(matches!(load("", false), Err(Error::Format { .. })));
        assert!(matches!(
            load("label,f1\n", true),
            Err(Error::Format { .. })
        ));
        assert!(matches!(load("0\n", false), Err(Error::Format { .. })));
    }
}
