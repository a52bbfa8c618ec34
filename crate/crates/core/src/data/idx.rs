use std::fs;
use std::io::Read;
use std::path::Path;

use flate2::read::GzDecoder;

use crate::error::{Error, Result};
use crate::linsolve::DenseMatrix;
use crate::represent::{ClassId, Dataset};
use crate::scalar::Scalar;

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

/// Reads a file, transparently inflating it when it carries the gzip magic.
fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let raw = fs::read(path).map_err(io_err)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::format(path, format!("corrupt gzip stream: {e}")))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn be_u32(bytes: &[u8], offset: usize, path: &Path, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::format(path, format!("truncated header: missing {what}")))
}

fn parse_images<'a>(bytes: &'a [u8], path: &Path) -> Result<(usize, usize, &'a [u8])> {
    let magic = be_u32(bytes, 0, path, "magic number")?;
    if magic != IMAGE_MAGIC {
        return Err(Error::format(
            path,
            format!("bad image magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}"),
        ));
    }
    let n = be_u32(bytes, 4, path, "image count")? as usize;
    let rows = be_u32(bytes, 8, path, "row count")? as usize;
    let cols = be_u32(bytes, 12, path, "column count")? as usize;
    let pixels = &bytes[16..];
    let expected = n
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or_else(|| Error::format(path, "image dimensions overflow"))?;
    if pixels.len() != expected {
        return Err(Error::format(
            path,
            format!(
                "expected {expected} pixel bytes for {n} images of {rows}x{cols}, found {}",
                pixels.len()
            ),
        ));
    }
    Ok((n, rows * cols, pixels))
}

fn parse_labels<'a>(bytes: &'a [u8], path: &Path) -> Result<&'a [u8]> {
    let magic = be_u32(bytes, 0, path, "magic number")?;
    if magic != LABEL_MAGIC {
        return Err(Error::format(
            path,
            format!("bad label magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}"),
        ));
    }
    let n = be_u32(bytes, 4, path, "label count")? as usize;
    let labels = &bytes[8..];
    if labels.len() != n {
        return Err(Error::format(
            path,
            format!("expected {n} label bytes, found {}", labels.len()),
        ));
    }
    Ok(labels)
}

/// Loads an IDX image/label file pair (optionally gzipped). Each image
/// becomes one column, row-major pixels scaled to `[0, 1]`.
pub fn load_idx<T: Scalar>(images_path: &Path, labels_path: &Path) -> Result<Dataset<T>> {
    let image_bytes = read_maybe_gz(images_path)?;
    let label_bytes = read_maybe_gz(labels_path)?;
    let (n, dim, pixels) = parse_images(&image_bytes, images_path)?;
    let labels = parse_labels(&label_bytes, labels_path)?;
    if labels.len() != n {
        return Err(Error::format(
            labels_path,
            format!(
                "{} labels for {n} images in {}",
                labels.len(),
                images_path.display()
            ),
        ));
    }
    if n == 0 || dim == 0 {
        return Err(Error::format(images_path, "file contains no pixel data"));
    }
    let scale = T::lit(255.0);
    let data = pixels
        .iter()
        .map(|&p| T::from_u8(p).expect("byte fits in scalar") / scale)
        .collect();
    let features = DenseMatrix::from_col_major(dim, n, data)?;
    let labels = labels.iter().map(|&l| ClassId(u32::from(l))).collect();
    Dataset::new(features, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn image_file(magic: u32, n: u32, rows: u32, cols: u32, pixels: &[u8]) -> Vec<u8> {
        let mut v = Vec::new();
        for x in [magic, n, rows, cols] {
            v.extend_from_slice(&x.to_be_bytes());
        }
        v.extend_from_slice(pixels);
        v
    }

    fn label_file(magic: u32, labels: &[u8]) -> Vec<u8> {
        let mut v = Vec::new();
        v.extend_from_slice(&magic.to_be_bytes());
        v.extend_from_slice(&(labels.len() as u32).to_be_bytes());
        v.extend_from_slice(labels);
        v
    }

    fn write(dir: &Path, name: &str, bytes: &[u8]) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, bytes).unwrap();
        p
    }

    #[test]
    fn parses_pixels_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let img = write(
            dir.path(),
            "img",
            &image_file(IMAGE_MAGIC, 2, 2, 2, &[0, 255, 51, 0, 255, 255, 0, 0]),
        );
        let lab = write(dir.path(), "lab", &label_file(LABEL_MAGIC, &[7, 3]));
        let d: Dataset<f64> = load_idx(&img, &lab).unwrap();
        assert_eq!((d.dim(), d.len()), (4, 2));
        assert_eq!(d.sample(0), &[0.0, 1.0, 0.2, 0.0]);
        assert_eq!(d.labels(), &[ClassId(7), ClassId(3)]);
    }

    #[test]
    fn reads_gzipped_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut gz = flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::fast());
        gz.write_all(&image_file(IMAGE_MAGIC, 1, 1, 2, &[255, 0]))
            .unwrap();
        let img = write(dir.path(), "img.gz", &gz.finish().unwrap());
        let lab = write(dir.path(), "lab", &label_file(LABEL_MAGIC, &[1]));
        let d: Dataset<f32> = load_idx(&img, &lab).unwrap();
        assert_eq!(d.sample(0), &[1.0, 0.0]);
    }

    #[test]
    fn format_errors() {
        let dir = tempfile::tempdir().unwrap();
        let good_img = write(dir.path(), "i", &image_file(IMAGE_MAGIC, 2, 1, 1, &[1, 2]));
        let good_lab = write(dir.path(), "l", &label_file(LABEL_MAGIC, &[0, 1]));

        let bad_magic = write(dir.path(), "bm", &image_file(0x0000_0804, 2, 1, 1, &[1, 2]));
        let short_labels = write(dir.path(), "sl", &label_file(LABEL_MAGIC, &[0]));
        let truncated = write(dir.path(), "tr", &image_file(IMAGE_MAGIC, 2, 1, 1, &[1]));
        let tiny = write(dir.path(), "ti", &[0, 0, 8]);
        let label_magic = write(dir.path(), "lm", &label_file(IMAGE_MAGIC, &[0, 1]));

        for (img, lab) in [
            (&bad_magic, &good_lab),
            (&good_img, &short_labels),
            (&truncated, &good_lab),
            (&tiny, &good_lab),
            (&good_img, &label_magic),
        ] {
            let r: Result<Dataset<f64>> = load_idx(img, lab);
            assert!(
                matches!(r, Err(Error::Format { .. })),
                "{img:?} {lab:?}: {r:?}"
            );
        }
        let missing: Result<Dataset<f64>> = load_idx(&dir.path().join("nope"), &good_lab);
        assert!(matches!(missing, Err(Error::Io { .. })));
    }
}
