//! Artifact download-URL construction and repository probing.
//!
//! Offline-first: the HTTP layer is an injected [`Transport`], and the only
//! transport shipped by default replays recorded fixture responses, so every
//! probing behavior is testable without a network. Real networking is an
//! integration concern wired by the caller.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::archive::ArtifactFormat;

/// Repository base URLs probed in order; the first entry is Maven Central.
pub const DEFAULT_ENDPOINTS: &[&str] = &[
    "https://repo1.maven.org/maven2",
    "https://repo.clojars.org",
    "https://repo.akka.io/maven",
    "https://maven.google.com",
    "https://maven.artifacts.atlassian.com",
    "https://maven.wso2.org/nexus/content/repositories/releases",
    "https://nexus.bedatadriven.com/content/groups/public",
    "https://repository.mulesoft.org/nexus/content/repositories/public",
    "https://repo.jenkins-ci.org/releases",
    "https://nexus.senbox.net/nexus/content/repositories/releases",
    "https://open.artefacts.tax.service.gov.uk/maven2",
];

/// Environment variable overriding the artifact cache directory.
pub const CACHE_DIR_ENV: &str = "GADGETRY_CACHE_DIR";

#[derive(Debug, Error)]
pub enum RepoError {
    #[error("bad coordinates: {reason}")]
    BadCoordinates { reason: String },
    #[error("{group}:{artifact}:{version} is not hosted on any configured repository")]
    NotHosted { group: String, artifact: String, version: String },
    #[error("transport failure for {url}: {reason}")]
    TransportError { url: String, reason: String },
    #[error("bad fixture: {reason}")]
    BadFixture { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepoEndpoint {
    pub base_url: String,
    /// Rank in the probe order; 0 is Maven Central.
    pub priority: usize,
}

pub fn default_endpoints() -> Vec<RepoEndpoint> {
    DEFAULT_ENDPOINTS
        .iter()
        .enumerate()
        .map(|(priority, base)| RepoEndpoint { base_url: (*base).to_string(), priority })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepoCoordinates {
    pub group: String,
    pub artifact: String,
    pub version: String,
}

impl RepoCoordinates {
    pub fn new(group: &str, artifact: &str, version: &str) -> RepoCoordinates {
        RepoCoordinates {
            group: group.to_string(),
            artifact: artifact.to_string(),
            version: version.to_string(),
        }
    }
}

/// `<base>/<group-as-path>/<artifact>/<version>/<artifact>-<version>.<ext>`
pub fn build_download_url(
    endpoint: &RepoEndpoint,
    group: &str,
    artifact: &str,
    version: &str,
    format: ArtifactFormat,
) -> Result<String, RepoError> {
    for (what, value) in [("group", group), ("artifact", artifact), ("version", version)] {
        if value.trim().is_empty() {
            return Err(RepoError::BadCoordinates { reason: format!("empty {what}") });
        }
    }
    let base = endpoint.base_url.trim_end_matches('/');
    let group_path = group.replace('.', "/");
    Ok(format!(
        "{base}/{group_path}/{artifact}/{version}/{artifact}-{version}.{ext}",
        ext = format.extension()
    ))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchCandidate {
    pub url: String,
    pub endpoint_base: String,
    pub format: ArtifactFormat,
}

/// The ordered candidate URLs for one artifact: endpoints by priority, and
/// per endpoint the jar before the aar.
#[derive(Debug, Clone)]
pub struct FetchPlan {
    pub coordinates: RepoCoordinates,
    pub candidates: Vec<FetchCandidate>,
}

pub fn build_fetch_plan(
    endpoints: &[RepoEndpoint],
    coordinates: &RepoCoordinates,
) -> Result<FetchPlan, RepoError> {
    let mut candidates = Vec::with_capacity(endpoints.len() * 2);
    for endpoint in endpoints {
        for format in [ArtifactFormat::Jar, ArtifactFormat::Aar] {
            candidates.push(FetchCandidate {
                url: build_download_url(
                    endpoint,
                    &coordinates.group,
                    &coordinates.artifact,
                    &coordinates.version,
                    format,
                )?,
                endpoint_base: endpoint.base_url.clone(),
                format,
            });
        }
    }
    Ok(FetchPlan { coordinates: coordinates.clone(), candidates })
}

/// Pluggable HTTP layer. `probe` models a HEAD request (does the URL exist?),
/// `fetch` a GET (`None` means a 404).
pub trait Transport {
    fn probe(&self, url: &str) -> Result<bool, RepoError>;
    fn fetch(&self, url: &str) -> Result<Option<Vec<u8>>, RepoError>;
}

/// Throttling and retry defaults for a real network transport. The default
/// build wires no such transport; these are the documented knobs a caller
/// must honor when it does.
#[derive(Debug, Clone, PartialEq)]
pub struct RetryPolicy {
    pub max_retries: u32,
    pub requests_per_second: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 3, requests_per_second: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FetchResult {
    pub url: String,
    pub format: ArtifactFormat,
    pub bytes: Vec<u8>,
}

/// Tries each candidate strictly in plan order; the first URL whose existence
/// probe succeeds is downloaded.
pub fn probe_and_fetch(plan: &FetchPlan, transport: &dyn Transport) -> Result<FetchResult, RepoError> {
    for candidate in &plan.candidates {
        if !transport.probe(&candidate.url)? {
            continue;
        }
        match transport.fetch(&candidate.url)? {
            Some(bytes) => {
                return Ok(FetchResult {
                    url: candidate.url.clone(),
                    format: candidate.format,
                    bytes,
                })
            }
            None => {
                return Err(RepoError::TransportError {
                    url: candidate.url.clone(),
                    reason: "probe succeeded but fetch returned no body".to_string(),
                })
            }
        }
    }
    Err(RepoError::NotHosted {
        group: plan.coordinates.group.clone(),
        artifact: plan.coordinates.artifact.clone(),
        version: plan.coordinates.version.clone(),
    })
}

/// One recorded response. A `body` path is relative to the fixture directory
/// and only meaningful for status 200.
#[derive(Debug, Deserialize)]
struct FixtureRecord {
    url: String,
    status: u16,
    #[serde(default)]
    body: Option<String>,
}

#[derive(Debug, Deserialize)]
struct FixtureIndex {
    records: Vec<FixtureRecord>,
}

/// Replays recorded responses: status 200 exists, 404 (or an unlisted URL)
/// does not, and any other status is a transport failure. Probed URLs are
/// logged for order assertions.
#[derive(Debug, Default)]
pub struct FixtureTransport {
    responses: BTreeMap<String, (u16, Vec<u8>)>,
    probes: Mutex<Vec<String>>,
}

impl FixtureTransport {
    pub fn new(responses: BTreeMap<String, (u16, Vec<u8>)>) -> FixtureTransport {
        FixtureTransport { responses, probes: Mutex::new(Vec::new()) }
    }

    /// Loads `index.json` (a {"records": [{url, status, body?}]} document)
    /// from a fixture directory; `body` names a file next to it.
    pub fn from_dir(dir: &Path) -> Result<FixtureTransport, RepoError> {
        let index_path = dir.join("index.json");
        let raw = fs::read(&index_path).map_err(|e| RepoError::BadFixture {
            reason: format!("read {}: {e}", index_path.display()),
        })?;
        let index: FixtureIndex = serde_json::from_slice(&raw)
            .map_err(|e| RepoError::BadFixture { reason: format!("parse index.json: {e}") })?;
        let mut responses = BTreeMap::new();
        for record in index.records {
            let body = match record.body {
                Some(rel) => fs::read(dir.join(&rel)).map_err(|e| RepoError::BadFixture {
                    reason: format!("read body {rel}: {e}"),
                })?,
                None => Vec::new(),
            };
            responses.insert(record.url, (record.status, body));
        }
        Ok(FixtureTransport { responses, probes: Mutex::new(Vec::new()) })
    }

    /// URLs probed so far, in order.
    pub fn probed(&self) -> Vec<String> {
        self.probes.lock().expect("probe log lock").clone()
    }

    fn status_of(&self, url: &str) -> Result<u16, RepoError> {
        let status = self.responses.get(url).map(|(s, _)| *s).unwrap_or(404);
        match status {
            200 | 404 => Ok(status),
            other => Err(RepoError::TransportError {
                url: url.to_string(),
                reason: format!("status {other}"),
            }),
        }
    }
}

impl Transport for FixtureTransport {
    fn probe(&self, url: &str) -> Result<bool, RepoError> {
        self.probes.lock().expect("probe log lock").push(url.to_string());
        Ok(self.status_of(url)? == 200)
    }

    fn fetch(&self, url: &str) -> Result<Option<Vec<u8>>, RepoError> {
        if self.status_of(url)? != 200 {
            return Ok(None);
        }
        Ok(self.responses.get(url).map(|(_, body)| body.clone()))
    }
}

/// Cache directory: the environment override, or `.gadgetry-cache` under the
/// current directory.
pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".gadgetry-cache"))
}

/// Where a downloaded artifact lands: keyed by coordinates plus a content
/// digest prefix so re-releases under the same version never collide.
pub fn cache_path(
    root: &Path,
    coordinates: &RepoCoordinates,
    format: ArtifactFormat,
    bytes: &[u8],
) -> PathBuf {
    let digest = Sha256::digest(bytes);
    let prefix: String = digest[..4].iter().map(|b| format!("{b:02x}")).collect();
    root.join(&coordinates.group).join(format!(
        "{}-{}-{}.{}",
        coordinates.artifact,
        coordinates.version,
        prefix,
        format.extension()
    ))
}

pub fn store_in_cache(
    root: &Path,
    coordinates: &RepoCoordinates,
    format: ArtifactFormat,
    bytes: &[u8],
) -> io::Result<PathBuf> {
    let path = cache_path(root, coordinates, format, bytes);
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&path, bytes)?;
    Ok(path)
}
