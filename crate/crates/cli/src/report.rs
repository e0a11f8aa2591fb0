use anyhow::{Context, Result};
use serde::Serialize;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    std::fs::rename(&tmp, path).with_context(|| format!("renaming onto {}", path.display()))?;
    Ok(())
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().context("flushing csv")
}

#[derive(Serialize)]
struct Envelope<'a, C, R, S> {
    config: &'a C,
    #[serde(skip_serializing_if = "Option::is_none")]
    rows: Option<&'a [R]>,
    summary: &'a S,
}

/// `<out>.summary.json` next to a CSV table.
pub fn summary_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".summary.json");
    PathBuf::from(s)
}

/// Emits rows as CSV or one JSON object with `config`, `rows` and `summary`.
///
/// A CSV file gets its config and summary in [`summary_path`]; on stdout they
/// go to stderr.
pub fn emit<C: Serialize, R: Serialize, S: Serialize>(
    out: Option<&Path>,
    format: Format,
    config: &C,
    rows: &[R],
    summary: &S,
) -> Result<()> {
    let side = Envelope::<C, R, S> {
        config,
        rows: None,
        summary,
    };
    match (format, out) {
        (Format::Json, _) => {
            let full = Envelope {
                config,
                rows: Some(rows),
                summary,
            };
            let mut bytes = serde_json::to_vec_pretty(&full)?;
            bytes.push(b'\n');
            match out {
                Some(p) => write_atomic(p, &bytes),
                None => Ok(std::io::stdout().write_all(&bytes)?),
            }
        }
        (Format::Csv, Some(p)) => {
            write_atomic(p, &csv_bytes(rows)?)?;
            let mut bytes = serde_json::to_vec_pretty(&side)?;
            bytes.push(b'\n');
            write_atomic(&summary_path(p), &bytes)
        }
        (Format::Csv, None) => {
            std::io::stdout().write_all(&csv_bytes(rows)?)?;
            eprintln!("{}", serde_json::to_string_pretty(&side)?);
            Ok(())
        }
    }
}
