//! Platform type signatures for names an artifact references but does not
//! define.
//!
//! The builtin catalog ships a verified working set: the serialization marker
//! interfaces plus the platform interfaces known to activate dormant chains.
//! A larger catalog can be parsed from the same structured text format or
//! extracted from a platform class container.

use crate::archive::Artifact;
use crate::classfile::{flags, parse_class};
use std::collections::BTreeMap;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog line {line}: {reason}")]
    BadLine { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlatformType {
    pub internal_name: String,
    pub is_interface: bool,
    pub super_name: Option<String>,
    pub interface_names: Vec<String>,
    /// Abstract methods only: (name, descriptor).
    pub methods: Vec<(String, String)>,
}

#[derive(Debug, Clone, Default)]
pub struct PlatformCatalog {
    types: BTreeMap<String, PlatformType>,
}

impl PlatformCatalog {
    /// The compiled-in working set.
    pub fn builtin() -> &'static PlatformCatalog {
        static BUILTIN: OnceLock<PlatformCatalog> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            PlatformCatalog::parse(include_str!("platform.catalog"))
                .expect("builtin catalog is well-formed")
        })
    }

    pub fn get(&self, internal_name: &str) -> Option<&PlatformType> {
        self.types.get(internal_name)
    }

    pub fn contains(&self, internal_name: &str) -> bool {
        self.types.contains_key(internal_name)
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PlatformType> {
        self.types.values()
    }

    /// Parses the structured text format (see `platform.catalog` for the
    /// column layout). Later lines override earlier ones with the same name,
    /// which lets a user catalog start from the builtin text and patch it.
    pub fn parse(text: &str) -> Result<PlatformCatalog, CatalogError> {
        let mut types = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let cols: Vec<&str> = content.split_whitespace().collect();
            if cols.len() != 5 {
                return Err(CatalogError::BadLine {
                    line,
                    reason: format!("expected 5 columns, found {}", cols.len()),
                });
            }
            let is_interface = match cols[0] {
                "class" => false,
                "interface" => true,
                other => {
                    return Err(CatalogError::BadLine {
                        line,
                        reason: format!("unknown kind {other:?}"),
                    })
                }
            };
            let internal_name = cols[1].to_string();
            let super_name = match cols[2] {
                "-" => None,
                s => Some(s.to_string()),
            };
            let interface_names = match cols[3] {
                "-" => Vec::new(),
                s => s.split(',').map(str::to_string).collect(),
            };
            let methods = match cols[4] {
                "-" => Vec::new(),
                s => s
                    .split('|')
                    .map(|m| {
                        m.split_once(':')
                            .map(|(n, d)| (n.to_string(), d.to_string()))
                            .ok_or(CatalogError::BadLine {
                                line,
                                reason: format!("method {m:?} lacks name:descriptor form"),
                            })
                    })
                    .collect::<Result<_, _>>()?,
            };
            types.insert(
                internal_name.clone(),
                PlatformType { internal_name, is_interface, super_name, interface_names, methods },
            );
        }
        Ok(PlatformCatalog { types })
    }

    /// Extracts signatures from a platform class container. Abstract methods
    /// only; malformed entries are skipped.
    pub fn from_artifact(artifact: &Artifact) -> PlatformCatalog {
        let mut types = BTreeMap::new();
        for (_, data) in artifact.class_entries() {
            let Ok(class) = parse_class(data) else { continue };
            let Ok(name) = class.class_name() else { continue };
            let super_name = class.super_name().ok().flatten();
            let interface_names = class.interface_names().unwrap_or_default();
            let mut methods = Vec::new();
            for m in &class.methods {
                if m.access_flags & flags::ACC_ABSTRACT != 0 {
                    if let (Ok(n), Ok(d)) = (m.name(&class.pool), m.descriptor(&class.pool)) {
                        methods.push((n, d));
                    }
                }
            }
            types.insert(
                name.clone(),
                PlatformType {
                    internal_name: name,
                    is_interface: class.is_interface(),
                    super_name,
                    interface_names,
                    methods,
                },
            );
        }
        PlatformCatalog { types }
    }

    /// Entries of `other` override entries of `self` with the same name.
    pub fn overlaid_with(mut self, other: PlatformCatalog) -> PlatformCatalog {
        self.types.extend(other.types);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalog_parses_and_covers_working_set() {
        let c = PlatformCatalog::builtin();
        for name in [
            "java/lang/Runnable",
            "java/util/concurrent/Callable",
            "java/awt/event/ActionListener",
            "java/beans/PropertyChangeListener",
            "java/lang/reflect/InvocationHandler",
            "javax/sql/DataSource",
            "javax/sql/XADataSource",
            "java/lang/AutoCloseable",
            "javax/sql/RowSet",
            "javax/xml/transform/Templates",
            "java/sql/Connection",
            "java/util/Iterator",
            "java/lang/Iterable",
            "java/util/Map",
            "java/io/Flushable",
            "java/io/Serializable",
            "java/io/Externalizable",
        ] {
            assert!(c.contains(name), "missing {name}");
        }
        // Every referenced super/interface resolves inside the catalog.
        for t in c.iter() {
            for r in t.super_name.iter().chain(t.interface_names.iter()) {
                assert!(c.contains(r), "{} references absent {r}", t.internal_name);
            }
        }
        let run = c.get("java/lang/Runnable").unwrap();
        assert!(run.is_interface);
        assert_eq!(run.methods, vec![("run".to_string(), "()V".to_string())]);
        // The marker chain: Externalizable extends Serializable.
        let ext = c.get("java/io/Externalizable").unwrap();
        assert_eq!(ext.interface_names, vec!["java/io/Serializable"]);
    }

    #[test]
    fn text_rows_override_by_name() {
        let c = PlatformCatalog::parse(
            "interface a/B - - m:()V\ninterface a/B - - n:()I\n",
        )
        .unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.get("a/B").unwrap().methods[0].0, "n");
    }

    #[test]
    fn malformed_lines_are_rejected_with_position() {
        let err = PlatformCatalog::parse("interface a/B - -\n").unwrap_err();
        let CatalogError::BadLine { line, .. } = err;
        assert_eq!(line, 1);
    }
}
