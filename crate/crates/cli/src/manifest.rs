//! Run manifests: the effective config of a run plus checksums of its outputs.
//!
//! A manifest is itself a valid `--config` input; rerunning it with the same
//! subcommand reproduces the listed CSV files byte for byte.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{parse_json, ScenarioConfig};
use crate::error::{CliError, CliResult};

pub const MANIFEST_VERSION: u32 = 1;
pub const TOOL: &str = "osa";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputEntry {
    /// File name relative to the manifest's directory.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the pretty-printed `config`.
    pub config_hash: String,
    pub config: ScenarioConfig,
    pub outputs: Vec<OutputEntry>,
}

impl RunManifest {
    pub fn file_name(command: &str) -> String {
        format!("{command}.manifest.json")
    }

    /// Checks that `config_hash` matches the embedded config.
    pub fn verify_config_hash(&self) -> CliResult<()> {
        let actual = sha256_hex(self.config.to_json().as_bytes());
        if actual != self.config_hash {
            return Err(CliError::config(
                "config_hash",
                format!(
                    "embedded config hashes to {actual}, manifest says {}",
                    self.config_hash
                ),
            ));
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// A config file or a manifest, as given to `--config`.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    /// Subcommand recorded in the manifest, when the input was one.
    pub manifest_command: Option<String>,
}

impl LoadedConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let probe: serde_json::Value =
            serde_json::from_str(text).map_err(|e| CliError::config("<root>", e.to_string()))?;
        if probe.get("manifest_version").is_some() {
            let manifest: RunManifest = parse_json(text)?;
            if manifest.manifest_version != MANIFEST_VERSION {
                return Err(CliError::config(
                    "manifest_version",
                    format!("unsupported version {}", manifest.manifest_version),
                ));
            }
            manifest.verify_config_hash()?;
            manifest.config.validate()?;
            Ok(LoadedConfig {
                config: manifest.config,
                manifest_command: Some(manifest.command),
            })
        } else {
            Ok(LoadedConfig {
                config: ScenarioConfig::from_json(text)?,
                manifest_command: None,
            })
        }
    }

    pub fn from_path(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Output directory that records a checksum for every file written.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    entries: Vec<OutputEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> CliResult<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.entries.push(OutputEntry {
            path: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    /// Writes `<command>.manifest.json` listing every file written so far.
    pub fn finish(self, command: &str, config: &ScenarioConfig) -> CliResult<PathBuf> {
        let manifest = RunManifest {
            manifest_version: MANIFEST_VERSION,
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            seed: config.seed,
            config_hash: sha256_hex(config.to_json().as_bytes()),
            config: config.clone(),
            outputs: self.entries,
        };
        let path = self.dir.join(RunManifest::file_name(command));
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}
