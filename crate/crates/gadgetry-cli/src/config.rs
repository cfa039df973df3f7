//! Effective run configuration and its digest. Every report embeds the
//! digest so downstream consumers can tell whether two runs are comparable;
//! catalogs are identified by content, never by path.

use std::path::{Path, PathBuf};

use gadgetry::detect::{EntryCatalog, SinkCatalog};
use gadgetry::hierarchy::PlatformCatalog;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

/// The catalogs a run analyzes with, plus content-derived identifiers.
pub struct Analysis {
    pub platform: PlatformCatalog,
    pub entries: EntryCatalog,
    pub sinks: SinkCatalog,
    pub platform_id: String,
    pub entries_id: String,
    pub sinks_id: String,
}

fn load_source<T>(
    path: &Option<PathBuf>,
    builtin: &T,
    parse: impl Fn(&str) -> CliResult<T>,
) -> CliResult<(T, String)>
where
    T: Clone,
{
    match path {
        None => Ok((builtin.clone(), "builtin".to_string())),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
            Ok((parse(&text)?, format!("sha256:{}", sha256_hex(text.as_bytes()))))
        }
    }
}

impl Analysis {
    pub fn load(
        catalog: &Option<PathBuf>,
        entries: &Option<PathBuf>,
        sinks: &Option<PathBuf>,
    ) -> CliResult<Analysis> {
        let (platform, platform_id) = load_source(catalog, PlatformCatalog::builtin(), |t| {
            PlatformCatalog::parse(t).map_err(CliError::from)
        })?;
        let (entries, entries_id) = load_source(entries, EntryCatalog::builtin(), |t| {
            EntryCatalog::parse(t).map_err(CliError::from)
        })?;
        let (sinks, sinks_id) = load_source(sinks, SinkCatalog::builtin(), |t| {
            SinkCatalog::parse(t).map_err(CliError::from)
        })?;
        Ok(Analysis { platform, entries, sinks, platform_id, entries_id, sinks_id })
    }
}

/// The fields that decide a run's analytical output. Serialized canonically
/// and hashed; reports carry the hex digest.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub schema: &'static str,
    pub catalog: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sinks: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub all_sinks: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caller_name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub now_year: Option<i32>,
}

impl RunConfig {
    pub fn bare(schema: &'static str, catalog_id: &str) -> RunConfig {
        RunConfig {
            schema,
            catalog: catalog_id.to_string(),
            entries: None,
            sinks: None,
            max_depth: None,
            all_sinks: None,
            pattern: None,
            caller_name: None,
            seed: None,
            samples: None,
            now_year: None,
        }
    }

    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("config serializes");
        sha256_hex(&canonical)
    }
}

/// The chain-producing configuration shared by `detect` and `delta`. Delta
/// reports carry this digest, and pre-computed detect reports must match it.
pub fn detect_config(analysis: &Analysis, max_depth: usize, all_sinks: bool) -> RunConfig {
    let mut config = RunConfig::bare("gadgetry/detect@1", &analysis.platform_id);
    config.entries = Some(analysis.entries_id.clone());
    config.sinks = Some(analysis.sinks_id.clone());
    config.max_depth = Some(max_depth);
    config.all_sinks = Some(all_sinks);
    config
}

pub fn file_label(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| {
        path.to_string_lossy().into_owned()
    })
}
