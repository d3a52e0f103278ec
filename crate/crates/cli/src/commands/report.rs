//! Aggregates run manifests and re-verifies their output checksums.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{parse_json, read_text};
use crate::error::{CliError, CliResult};
use crate::format::CsvText;
use crate::manifest::{sha256_hex, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FileStatus {
    Ok,
    Modified,
    Missing,
}

impl FileStatus {
    fn name(self) -> &'static str {
        match self {
            FileStatus::Ok => "ok",
            FileStatus::Modified => "modified",
            FileStatus::Missing => "missing",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FileCheck {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
    pub status: FileStatus,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestCheck {
    pub manifest: String,
    pub command: String,
    pub seed: u64,
    pub config_hash: String,
    pub config_hash_ok: bool,
    pub files: Vec<FileCheck>,
}

/// Manifest files named directly or found (non-recursively) in directories, sorted.
fn collect(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut found = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = std::fs::read_dir(p).map_err(|e| CliError::io(p, e))?;
            for entry in entries {
                let path = entry.map_err(|e| CliError::io(p, e))?.path();
                if path
                    .file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(".manifest.json"))
                {
                    found.push(path);
                }
            }
        } else {
            found.push(p.clone());
        }
    }
    found.sort();
    if found.is_empty() {
        return Err(CliError::Usage("no manifests found".into()));
    }
    Ok(found)
}

pub fn check_manifest(path: &Path) -> CliResult<ManifestCheck> {
    let manifest: RunManifest = parse_json(&read_text(path)?).map_err(|e| CliError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let dir = path.parent().unwrap_or(Path::new("."));
    let files = manifest
        .outputs
        .iter()
        .map(|o| {
            let status = match std::fs::read(dir.join(&o.path)) {
                Ok(bytes) if sha256_hex(&bytes) == o.sha256 && bytes.len() as u64 == o.bytes => {
                    FileStatus::Ok
                }
                Ok(_) => FileStatus::Modified,
                Err(_) => FileStatus::Missing,
            };
            FileCheck {
                path: o.path.clone(),
                bytes: o.bytes,
                sha256: o.sha256.clone(),
                status,
            }
        })
        .collect();
    Ok(ManifestCheck {
        manifest: path.display().to_string(),
        command: manifest.command.clone(),
        seed: manifest.seed,
        config_hash: manifest.config_hash.clone(),
        config_hash_ok: manifest.verify_config_hash().is_ok(),
        files,
    })
}

/// Writes `report.csv` and `report.json` to `out`; fails if any file does not verify.
pub fn run(paths: &[PathBuf], out: &Path) -> CliResult<String> {
    let checks = collect(paths)?
        .iter()
        .map(|p| check_manifest(p))
        .collect::<CliResult<Vec<_>>>()?;

    let mut c = CsvText::with_header(&[
        "manifest",
        "command",
        "seed",
        "config_hash",
        "output",
        "bytes",
        "sha256",
        "status",
    ]);
    for m in &checks {
        for f in &m.files {
            c.row([
                m.manifest.clone(),
                m.command.clone(),
                m.seed.to_string(),
                m.config_hash.clone(),
                f.path.clone(),
                f.bytes.to_string(),
                f.sha256.clone(),
                f.status.name().to_string(),
            ]);
        }
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    let csv_path = out.join("report.csv");
    std::fs::write(&csv_path, c.into_string()).map_err(|e| CliError::io(&csv_path, e))?;
    let json_path = out.join("report.json");
    let mut json = serde_json::to_string_pretty(&checks).expect("report serializes");
    json.push('\n');
    std::fs::write(&json_path, json).map_err(|e| CliError::io(&json_path, e))?;

    let total: usize = checks.iter().map(|m| m.files.len()).sum();
    let bad: Vec<String> = checks
        .iter()
        .flat_map(|m| {
            let hash = (!m.config_hash_ok).then(|| format!("{}: config hash mismatch", m.manifest));
            hash.into_iter().chain(
                m.files
                    .iter()
                    .filter(|f| f.status != FileStatus::Ok)
                    .map(move |f| format!("{}: {} {}", m.manifest, f.path, f.status.name())),
            )
        })
        .collect();
    if !bad.is_empty() {
        return Err(CliError::Input {
            path: out.to_path_buf(),
            message: format!(
                "{} of {total} checks failed:\n  {}",
                bad.len(),
                bad.join("\n  ")
            ),
        });
    }
    Ok(format!(
        "{} manifests, {total} files verified\nreport: {}\n",
        checks.len(),
        csv_path.display()
    ))
}
