//! File formats: headerless CSV point clouds, JSON bodies, hull summaries and
//! the sidecar written next to a sampled cloud.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::ConvexBody;
use crate::hull::{HullSummary, PointCloud};

/// Parses one point per row. `dim_hint` supplies the dimension of an empty
/// file and, when given, is enforced on every row.
pub fn read_cloud_from<R: Read>(reader: R, dim_hint: Option<usize>) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut cloud: Option<PointCloud> = dim_hint.map(PointCloud::new).transpose()?;
    let mut row = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        row.clear();
        for field in record.iter() {
            let x: f64 = field
                .parse()
                .map_err(|_| Error::Parse { line, message: format!("not a number: {field:?}") })?;
            if !x.is_finite() {
                return Err(Error::Parse { line, message: format!("non-finite coordinate {field:?}") });
            }
            row.push(x);
        }
        let cloud = match &mut cloud {
            Some(c) => c,
            None => cloud.insert(PointCloud::new(row.len())?),
        };
        if row.len() != cloud.dim() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} coordinates, found {}", cloud.dim(), row.len()),
            });
        }
        cloud.push(&row)?;
    }
    cloud.ok_or_else(|| Error::InvalidParameter("cloud file is empty and no dimension was given".into()))
}

pub fn read_cloud(path: &Path, dim_hint: Option<usize>) -> Result<PointCloud> {
    read_cloud_from(BufReader::new(File::open(path)?), dim_hint)
}

/// Writes coordinates with shortest round-trip formatting.
pub fn write_cloud_to<W: Write>(writer: W, cloud: &PointCloud) -> Result<()> {
    write_rows_to(writer, cloud.iter())
}

pub fn write_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    write_cloud_to(BufWriter::new(File::create(path)?), cloud)
}

/// Writes arbitrary rows in the cloud format.
pub fn write_rows_to<'a, W: Write>(writer: W, rows: impl IntoIterator<Item = &'a [f64]>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    for row in rows {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_body(path: &Path) -> Result<ConvexBody> {
    ConvexBody::from_json(&std::fs::read_to_string(path)?)
}

pub fn write_hull_json(path: &Path, hull: &HullSummary) -> Result<()> {
    std::fs::write(path, hull.to_json()?)?;
    Ok(())
}

/// Provenance of a sampled cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleSidecar {
    pub body: ConvexBody,
    pub intensity: f64,
    pub seed: u64,
    pub n: usize,
    pub version: String,
}

impl SampleSidecar {
    pub fn new(body: ConvexBody, intensity: f64, seed: u64, n: usize) -> Self {
        SampleSidecar { body, intensity, seed, n, version: env!("CARGO_PKG_VERSION").to_string() }
    }

    /// `points.csv` gets `points.json`.
    pub fn path_for(cloud_path: &Path) -> PathBuf {
        cloud_path.with_extension("json")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let cloud = PointCloud::from_rows(3, [[0.1, -2.5e-300, 1.0 / 3.0], [1e17, 0.0, -7.25]]).unwrap();
        let mut buf = Vec::new();
        write_cloud_to(&mut buf, &cloud).unwrap();
        let back = read_cloud_from(buf.as_slice(), None).unwrap();
        assert_eq!(back, cloud);
    }

    #[test]
    fn tolerates_whitespace_and_blank_lines() {
        let text = "0, 0\n\n 1 ,0\n# comment\n0,1\n";
        let cloud = read_cloud_from(text.as_bytes(), None).unwrap();
        assert_eq!(cloud.len(), 3);
        assert_eq!(cloud.point(1), &[1.0, 0.0]);
    }

    #[test]
    fn malformed_rows_report_line() {
        let err = read_cloud_from("0,0\n1,x\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = read_cloud_from("0,0\n1,2,3\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(read_cloud_from("0,0\n1,inf\n".as_bytes(), None).is_err());
        assert!(read_cloud_from("0,0,0\n".as_bytes(), Some(2)).is_err());
    }

    #[test]
    fn empty_file_needs_dimension() {
        assert!(read_cloud_from("".as_bytes(), None).is_err());
        let cloud = read_cloud_from("\n".as_bytes(), Some(4)).unwrap();
        assert!(cloud.is_empty());
        assert_eq!(cloud.dim(), 4);
    }

    #[test]
    fn sidecar_path() {
        assert_eq!(SampleSidecar::path_for(Path::new("out/points.csv")), Path::new("out/points.json"));
    }
}
