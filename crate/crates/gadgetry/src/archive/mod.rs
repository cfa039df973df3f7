//! JAR/AAR container reading, writing, and repackaging.
//!
//! An [`Artifact`] is an immutable ordered map of entry path to payload
//! bytes. Class payloads are only ever swapped wholesale via [`repackage`];
//! every other entry is carried through byte-identically, so a rewritten
//! archive diffs cleanly against its input down to the member level.
//!
//! AAR containers are flattened on read: entries of the embedded class
//! container appear under a `classes.jar!/` path prefix and are folded back
//! into a nested container on write. Written archives are deterministic
//! (fixed timestamp, fixed compression), so equal artifacts serialize to
//! equal bytes.

use crate::classfile::{emit_class, ClassFile};
use std::collections::{BTreeMap, HashMap};
use std::io::{Cursor, Read, Write};
use thiserror::Error;

/// Path prefix for entries that live inside an AAR's embedded class container.
pub const AAR_CLASSES_PREFIX: &str = "classes.jar!/";
const AAR_CLASSES_ENTRY: &str = "classes.jar";

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error("not a ZIP-based archive")]
    NotAnArchive,
    #[error("corrupt container: {reason}")]
    CorruptContainer { reason: String },
    #[error("no such entry: {path}")]
    PathNotFound { path: String },
    #[error("entry already exists: {path}")]
    NameCollision { path: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ArtifactFormat {
    Jar,
    Aar,
}

impl ArtifactFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ArtifactFormat::Jar => "jar",
            ArtifactFormat::Aar => "aar",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Artifact {
    format: ArtifactFormat,
    /// Entry order is the container's own order for read artifacts; entries
    /// appended by [`repackage`] follow in lexicographic order.
    entries: Vec<(String, Vec<u8>)>,
    index: HashMap<String, usize>,
    /// Oddities observed while reading (duplicate paths, missing embedded
    /// class container); carried through repackaging.
    warnings: Vec<String>,
}

impl Artifact {
    pub fn format(&self) -> ArtifactFormat {
        self.format
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn contains(&self, path: &str) -> bool {
        self.index.contains_key(path)
    }

    pub fn entry(&self, path: &str) -> Option<&[u8]> {
        self.index.get(path).map(|&i| self.entries[i].1.as_slice())
    }

    /// All entries in deterministic order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, &[u8])> {
        self.entries.iter().map(|(p, d)| (p.as_str(), d.as_slice()))
    }

    /// Entries holding class files, in deterministic order.
    pub fn class_entries(&self) -> impl Iterator<Item = (&str, &[u8])> {
        self.entries().filter(|(p, _)| p.ends_with(".class"))
    }

    /// Paths of cryptographic signing metadata. Rewriting any class entry
    /// invalidates these; they are preserved as-is and callers surface a
    /// warning instead.
    pub fn signature_entries(&self) -> Vec<&str> {
        self.entries()
            .map(|(p, _)| p)
            .filter(|p| {
                let Some(rest) = p.strip_prefix("META-INF/") else { return false };
                !rest.contains('/')
                    && (rest.ends_with(".SF")
                        || rest.ends_with(".RSA")
                        || rest.ends_with(".DSA")
                        || rest.ends_with(".EC")
                        || rest.starts_with("SIG-"))
            })
            .collect()
    }

    /// The archive entry path a class with this internal name occupies.
    pub fn class_path_for(&self, internal_name: &str) -> String {
        match self.format {
            ArtifactFormat::Jar => format!("{internal_name}.class"),
            ArtifactFormat::Aar => format!("{AAR_CLASSES_PREFIX}{internal_name}.class"),
        }
    }

    /// Serializes to container bytes. Deterministic: fixed timestamps and
    /// compression, entry order as held.
    pub fn write(&self) -> Result<Vec<u8>, ArchiveError> {
        match self.format {
            ArtifactFormat::Jar => {
                write_zip(self.entries.iter().map(|(p, d)| (p.as_str(), d.as_slice())))
            }
            ArtifactFormat::Aar => {
                // Fold classes.jar!/ entries back into a nested container at
                // the position of the first such entry.
                let mut inner: Vec<(&str, &[u8])> = Vec::new();
                for (p, d) in &self.entries {
                    if let Some(rest) = p.strip_prefix(AAR_CLASSES_PREFIX) {
                        inner.push((rest, d.as_slice()));
                    }
                }
                let inner_bytes = write_zip(inner.iter().copied())?;
                let mut outer: Vec<(&str, &[u8])> = Vec::new();
                let mut inner_emitted = false;
                for (p, d) in &self.entries {
                    if p.starts_with(AAR_CLASSES_PREFIX) {
                        if !inner_emitted {
                            outer.push((AAR_CLASSES_ENTRY, inner_bytes.as_slice()));
                            inner_emitted = true;
                        }
                    } else {
                        outer.push((p.as_str(), d.as_slice()));
                    }
                }
                if !inner_emitted && !inner.is_empty() {
                    outer.push((AAR_CLASSES_ENTRY, inner_bytes.as_slice()));
                }
                write_zip(outer.into_iter())
            }
        }
    }

    /// Builds a synthetic artifact from (path, payload) pairs, sorted
    /// lexicographically. Intended for fixtures and tests.
    pub fn from_entries(
        format: ArtifactFormat,
        mut entries: Vec<(String, Vec<u8>)>,
    ) -> Result<Artifact, ArchiveError> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let mut index = HashMap::with_capacity(entries.len());
        for (i, (p, _)) in entries.iter().enumerate() {
            if index.insert(p.clone(), i).is_some() {
                return Err(ArchiveError::NameCollision { path: p.clone() });
            }
        }
        Ok(Artifact { format, entries, index, warnings: Vec::new() })
    }
}

fn zip_reason(e: zip::result::ZipError) -> ArchiveError {
    ArchiveError::CorruptContainer { reason: e.to_string() }
}

fn read_zip_entries(bytes: &[u8]) -> Result<Vec<(String, Vec<u8>)>, ArchiveError> {
    let mut archive = zip::ZipArchive::new(Cursor::new(bytes)).map_err(zip_reason)?;
    let mut out = Vec::with_capacity(archive.len());
    for i in 0..archive.len() {
        let mut file = archive.by_index(i).map_err(zip_reason)?;
        if file.is_dir() {
            continue;
        }
        let name = file.name().to_string();
        let mut data = Vec::with_capacity(file.size() as usize);
        file.read_to_end(&mut data).map_err(|e| ArchiveError::CorruptContainer {
            reason: format!("entry {name}: {e}"),
        })?;
        out.push((name, data));
    }
    Ok(out)
}

fn write_zip<'a>(entries: impl Iterator<Item = (&'a str, &'a [u8])>) -> Result<Vec<u8>, ArchiveError> {
    let mut w = zip::ZipWriter::new(Cursor::new(Vec::new()));
    let opts = zip::write::SimpleFileOptions::default()
        .compression_method(zip::CompressionMethod::Deflated)
        .last_modified_time(zip::DateTime::default());
    for (path, data) in entries {
        w.start_file(path, opts).map_err(zip_reason)?;
        w.write_all(data).map_err(|e| ArchiveError::CorruptContainer {
            reason: format!("entry {path}: {e}"),
        })?;
    }
    let cursor = w.finish().map_err(zip_reason)?;
    Ok(cursor.into_inner())
}

/// True when the bytes begin with a ZIP local-file or end-of-central-directory
/// signature (the latter covers empty archives).
fn looks_like_zip(bytes: &[u8]) -> bool {
    matches!(bytes.get(..4), Some([0x50, 0x4b, 0x03, 0x04] | [0x50, 0x4b, 0x05, 0x06]))
}

/// Reads a JAR or AAR from container bytes.
///
/// For AAR, the embedded class container's entries are flattened in under the
/// `classes.jar!/` prefix; an AAR with no embedded container simply has no
/// class entries (a warning records the absence).
pub fn read_artifact(bytes: &[u8], format: ArtifactFormat) -> Result<Artifact, ArchiveError> {
    if !looks_like_zip(bytes) {
        return Err(ArchiveError::NotAnArchive);
    }
    let raw = read_zip_entries(bytes)?;
    let mut warnings = Vec::new();
    let mut entries: Vec<(String, Vec<u8>)> = Vec::with_capacity(raw.len());

    match format {
        ArtifactFormat::Jar => entries = raw,
        ArtifactFormat::Aar => {
            let mut saw_classes = false;
            for (path, data) in raw {
                if path == AAR_CLASSES_ENTRY {
                    saw_classes = true;
                    if !looks_like_zip(&data) {
                        return Err(ArchiveError::CorruptContainer {
                            reason: "embedded class container is not a ZIP".into(),
                        });
                    }
                    for (inner_path, inner_data) in read_zip_entries(&data)? {
                        entries.push((format!("{AAR_CLASSES_PREFIX}{inner_path}"), inner_data));
                    }
                } else {
                    entries.push((path, data));
                }
            }
            if !saw_classes {
                warnings.push("AAR has no embedded class container".into());
            }
        }
    }

    let mut index = HashMap::with_capacity(entries.len());
    let mut kept: Vec<(String, Vec<u8>)> = Vec::with_capacity(entries.len());
    for (path, data) in entries {
        if index.contains_key(&path) {
            // Later duplicates lose: the JVM resolves the first matching
            // entry on the class path, so analysis sees what it would load.
            warnings.push(format!("duplicate entry {path}; kept first"));
            continue;
        }
        index.insert(path.clone(), kept.len());
        kept.push((path, data));
    }

    Ok(Artifact { format, entries: kept, index, warnings })
}

/// Reads an artifact from disk, inferring format from the file extension
/// (`.aar` is AAR; anything else is treated as a JAR-shaped container).
pub fn read_artifact_file(path: &std::path::Path) -> Result<Artifact, ArchiveError> {
    let bytes = std::fs::read(path).map_err(|e| ArchiveError::CorruptContainer {
        reason: format!("{}: {e}", path.display()),
    })?;
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("aar") => ArtifactFormat::Aar,
        _ => ArtifactFormat::Jar,
    };
    read_artifact(&bytes, format)
}

/// Produces a new artifact with `replaced` entry payloads swapped for the
/// emitted bytes of their new class files and `added` classes appended at
/// paths derived from their internal names (lexicographic among themselves).
/// Every other entry is carried over byte-identically.
pub fn repackage(
    a: &Artifact,
    replaced: &BTreeMap<String, ClassFile>,
    added: &[ClassFile],
) -> Result<Artifact, ArchiveError> {
    for path in replaced.keys() {
        if !a.contains(path) {
            return Err(ArchiveError::PathNotFound { path: path.clone() });
        }
    }

    let mut additions: Vec<(String, Vec<u8>)> = Vec::with_capacity(added.len());
    for class in added {
        let name = class
            .class_name()
            .map_err(|e| ArchiveError::CorruptContainer { reason: e.to_string() })?;
        let path = a.class_path_for(&name);
        if a.contains(&path) || additions.iter().any(|(p, _)| *p == path) {
            return Err(ArchiveError::NameCollision { path });
        }
        additions.push((path, emit_class(class)));
    }
    additions.sort_by(|x, y| x.0.cmp(&y.0));

    let mut entries: Vec<(String, Vec<u8>)> = Vec::with_capacity(a.entries.len() + additions.len());
    for (path, data) in &a.entries {
        match replaced.get(path) {
            Some(class) => entries.push((path.clone(), emit_class(class))),
            None => entries.push((path.clone(), data.clone())),
        }
    }
    entries.extend(additions);

    let mut index = HashMap::with_capacity(entries.len());
    for (i, (p, _)) in entries.iter().enumerate() {
        index.insert(p.clone(), i);
    }
    Ok(Artifact { format: a.format, entries, index, warnings: a.warnings.clone() })
}
