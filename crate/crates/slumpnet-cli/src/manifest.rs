//! Dataset manifest CSV with columns `path,slump_cm,split,seed`.
//!
//! Paths are stored relative to the manifest file so the whole run
//! directory can be moved or copied freely.

use std::path::{Path, PathBuf};

use slumpnet_core::synth::Split;

use crate::{at_path, CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    /// Clip location as written in the file.
    pub path: String,
    pub slump_cm: f64,
    pub split: Split,
    pub seed: u64,
}

impl ManifestRow {
    /// Clip location resolved against the manifest's directory.
    pub fn resolve(&self, manifest_path: &Path) -> PathBuf {
        let raw = Path::new(&self.path);
        if raw.is_absolute() {
            raw.to_path_buf()
        } else {
            manifest_path.parent().unwrap_or(Path::new(".")).join(raw)
        }
    }
}

pub fn write_manifest(path: &Path, rows: &[ManifestRow]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(at_path(path))?;
    w.write_record(["path", "slump_cm", "split", "seed"]).map_err(at_path(path))?;
    for row in rows {
        w.write_record([
            row.path.as_str(),
            &row.slump_cm.to_string(),
            row.split.as_str(),
            &row.seed.to_string(),
        ])
        .map_err(at_path(path))?;
    }
    w.flush().map_err(|e| at_path(path)(CliError::input(e.to_string())))?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> CliResult<Vec<ManifestRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(at_path(path))?;

    let headers = r.headers().map_err(at_path(path))?.clone();
    let want = ["path", "slump_cm", "split", "seed"];
    if headers.iter().collect::<Vec<_>>() != want {
        return Err(CliError::input(format!(
            "{}: manifest header must be `path,slump_cm,split,seed`, found `{}`",
            path.display(),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(at_path(path))?;
        let line = i + 2;
        let field = |idx: usize| record.get(idx).unwrap_or("");
        let slump_cm: f64 = field(1).parse().map_err(|_| {
            CliError::input(format!(
                "{} line {line}: slump_cm `{}` is not a number",
                path.display(),
                field(1)
            ))
        })?;
        if !slump_cm.is_finite() {
            return Err(CliError::input(format!(
                "{} line {line}: slump_cm must be finite",
                path.display()
            )));
        }
        let split = Split::parse(field(2)).map_err(|_| {
            CliError::input(format!(
                "{} line {line}: split `{}` is not train/val/test",
                path.display(),
                field(2)
            ))
        })?;
        let seed: u64 = field(3).parse().map_err(|_| {
            CliError::input(format!(
                "{} line {line}: seed `{}` is not an unsigned integer",
                path.display(),
                field(3)
            ))
        })?;
        rows.push(ManifestRow { path: field(0).to_string(), slump_cm, split, seed });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ManifestRow> {
        vec![
            ManifestRow {
                path: "clips/clip-000.cwv".into(),
                slump_cm: 87.25,
                split: Split::Train,
                seed: 11,
            },
            ManifestRow {
                path: "clips/clip-001.cwv".into(),
                slump_cm: 142.0,
                split: Split::Val,
                seed: 12,
            },
            ManifestRow {
                path: "clips/clip-002.cwv".into(),
                slump_cm: 40.5,
                split: Split::Test,
                seed: 13,
            },
        ]
    }

    #[test]
    fn round_trips_rows_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        let rows = sample_rows();
        write_manifest(&path, &rows).unwrap();
        assert_eq!(read_manifest(&path).unwrap(), rows);
    }

    #[test]
    fn written_file_has_expected_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");
        write_manifest(&path, &sample_rows()).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("path,slump_cm,split,seed\n"), "{text}");
        assert!(text.contains("clips/clip-000.cwv,87.25,train,11"), "{text}");
    }

    #[test]
    fn relative_paths_resolve_against_manifest_directory() {
        let row = &sample_rows()[0];
        let resolved = row.resolve(Path::new("/data/run/manifest.csv"));
        assert_eq!(resolved, PathBuf::from("/data/run/clips/clip-000.cwv"));
    }

    #[test]
    fn rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.csv");

        std::fs::write(&path, "path,slump_cm,split,seed\nclip.cwv,abc,train,1\n").unwrap();
        let err = read_manifest(&path).unwrap_err();
        assert_eq!(err.code, crate::exit::INPUT);
        assert!(err.message.contains("line 2"), "{}", err.message);

        std::fs::write(&path, "path,slump_cm,split,seed\nclip.cwv,50,nowhere,1\n").unwrap();
        assert!(read_manifest(&path).unwrap_err().message.contains("split"));

        std::fs::write(&path, "wrong,header\n").unwrap();
        assert!(read_manifest(&path).unwrap_err().message.contains("header"));
    }
}
