//! Type graph, serializability, and cross-version change classification.
//!
//! A [`TypeGraph`] holds one node per class defined in an artifact plus the
//! platform-catalog nodes the artifact references. Supertype edges may dangle
//! (target in neither artifact nor catalog); dangling targets are recorded as
//! unresolved and assumed non-serializable, never fabricated.

pub mod catalog;

pub use catalog::{CatalogError, PlatformCatalog, PlatformType};

use crate::archive::Artifact;
use crate::classfile::{flags, parse_class};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, VecDeque};

/// The serialization marker interface.
pub const SERIALIZABLE: &str = "java/io/Serializable";
const EXTERNALIZABLE: &str = "java/io/Externalizable";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodSig {
    pub name: String,
    pub descriptor: String,
    pub access_flags: u16,
}

impl MethodSig {
    pub fn is_abstract(&self) -> bool {
        self.access_flags & flags::ACC_ABSTRACT != 0
    }

    pub fn is_static(&self) -> bool {
        self.access_flags & flags::ACC_STATIC != 0
    }
}

#[derive(Debug, Clone)]
pub struct TypeNode {
    pub internal_name: String,
    pub is_interface: bool,
    pub is_abstract: bool,
    pub super_name: Option<String>,
    pub interface_names: Vec<String>,
    pub methods: Vec<MethodSig>,
    pub defined_in_artifact: bool,
}

#[derive(Debug, Clone, Default)]
pub struct TypeGraph {
    nodes: BTreeMap<String, TypeNode>,
    unresolved: BTreeSet<String>,
    /// (entry path, reason) for class entries that could not be loaded.
    skipped: Vec<(String, String)>,
}

impl TypeGraph {
    pub fn node(&self, name: &str) -> Option<&TypeNode> {
        self.nodes.get(name)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &TypeNode> {
        self.nodes.values()
    }

    pub fn artifact_nodes(&self) -> impl Iterator<Item = &TypeNode> {
        self.nodes().filter(|n| n.defined_in_artifact)
    }

    pub fn unresolved(&self) -> &BTreeSet<String> {
        &self.unresolved
    }

    pub fn skipped(&self) -> &[(String, String)] {
        &self.skipped
    }

    /// Direct supertypes (superclass then interfaces) that resolve to nodes.
    pub fn parents<'a>(&'a self, node: &'a TypeNode) -> impl Iterator<Item = &'a TypeNode> {
        node.super_name
            .iter()
            .chain(node.interface_names.iter())
            .filter_map(|n| self.nodes.get(n.as_str()))
    }

    /// All transitive supertypes in breadth-first order, excluding the start.
    pub fn ancestors(&self, name: &str) -> Vec<&TypeNode> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        let mut out = Vec::new();
        if let Some(start) = self.nodes.get(name) {
            queue.push_back(start);
        }
        while let Some(node) = queue.pop_front() {
            for parent in self.parents(node) {
                if seen.insert(parent.internal_name.as_str()) {
                    out.push(parent);
                    queue.push_back(parent);
                }
            }
        }
        out
    }

    /// Artifact-defined nodes whose direct supertype set includes `name`.
    pub fn direct_subtypes(&self, name: &str) -> Vec<&TypeNode> {
        self.nodes()
            .filter(|n| {
                n.defined_in_artifact
                    && (n.super_name.as_deref() == Some(name)
                        || n.interface_names.iter().any(|i| i == name))
            })
            .collect()
    }
}

/// Builds the type graph for an artifact: one node per parseable class entry,
/// plus catalog nodes transitively referenced from them. Malformed entries
/// are skipped and reported, never fatal.
pub fn build_graph(artifact: &Artifact, catalog: &PlatformCatalog) -> TypeGraph {
    let mut graph = TypeGraph::default();

    for (path, data) in artifact.class_entries() {
        let class = match parse_class(data) {
            Ok(c) => c,
            Err(e) => {
                graph.skipped.push((path.to_string(), e.to_string()));
                continue;
            }
        };
        let name = match class.class_name() {
            Ok(n) => n,
            Err(e) => {
                graph.skipped.push((path.to_string(), e.to_string()));
                continue;
            }
        };
        if graph.nodes.contains_key(&name) {
            // Later duplicates lose, mirroring first-wins class-path lookup
            // (multi-release variants land here).
            graph.skipped.push((path.to_string(), format!("duplicate definition of {name}")));
            continue;
        }
        let mut methods = Vec::with_capacity(class.methods.len());
        for m in &class.methods {
            if let (Ok(n), Ok(d)) = (m.name(&class.pool), m.descriptor(&class.pool)) {
                methods.push(MethodSig { name: n, descriptor: d, access_flags: m.access_flags });
            }
        }
        graph.nodes.insert(
            name.clone(),
            TypeNode {
                internal_name: name,
                is_interface: class.is_interface(),
                is_abstract: class.is_abstract(),
                super_name: class.super_name().ok().flatten(),
                interface_names: class.interface_names().unwrap_or_default(),
                methods,
                defined_in_artifact: true,
            },
        );
    }

    // Pull in referenced catalog nodes, transitively.
    let mut pending: VecDeque<String> = graph
        .nodes
        .values()
        .flat_map(|n| n.super_name.iter().chain(n.interface_names.iter()))
        .cloned()
        .collect();
    while let Some(name) = pending.pop_front() {
        if graph.nodes.contains_key(&name) || graph.unresolved.contains(&name) {
            continue;
        }
        match catalog.get(&name) {
            Some(t) => {
                pending.extend(t.super_name.iter().cloned());
                pending.extend(t.interface_names.iter().cloned());
                graph.nodes.insert(
                    name.clone(),
                    TypeNode {
                        internal_name: t.internal_name.clone(),
                        is_interface: t.is_interface,
                        is_abstract: true,
                        super_name: t.super_name.clone(),
                        interface_names: t.interface_names.clone(),
                        methods: t
                            .methods
                            .iter()
                            .map(|(n, d)| MethodSig {
                                name: n.clone(),
                                descriptor: d.clone(),
                                access_flags: flags::ACC_PUBLIC | flags::ACC_ABSTRACT,
                            })
                            .collect(),
                        defined_in_artifact: false,
                    },
                );
            }
            None => {
                graph.unresolved.insert(name);
            }
        }
    }

    graph
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SerialStatus {
    Not,
    /// The type itself lists the marker interface.
    Direct,
    /// Serializable only via a transitive supertype or superinterface.
    Transitive,
}

#[derive(Debug, Clone)]
pub struct SerializabilityView {
    status: BTreeMap<String, SerialStatus>,
    artifact_names: BTreeSet<String>,
    interface_names: BTreeSet<String>,
}

impl SerializabilityView {
    pub fn status(&self, name: &str) -> SerialStatus {
        self.status.get(name).copied().unwrap_or(SerialStatus::Not)
    }

    pub fn is_serializable(&self, name: &str) -> bool {
        self.status(name) != SerialStatus::Not
    }

    /// Artifact-defined types with status other than NOT.
    pub fn serializable_count(&self) -> usize {
        self.serializable_names().count()
    }

    /// Same count restricted to non-interface nodes.
    pub fn serializable_count_excluding_interfaces(&self) -> usize {
        self.serializable_names().filter(|n| !self.interface_names.contains(*n)).count()
    }

    pub fn serializable_names(&self) -> impl Iterator<Item = &str> {
        self.artifact_names
            .iter()
            .filter(|n| self.status(n) != SerialStatus::Not)
            .map(String::as_str)
    }
}

/// Computes per-type serializability over the graph. Interfaces extending the
/// marker propagate it exactly like classes; unresolved supertypes contribute
/// nothing. The marker interfaces themselves are reported DIRECT.
pub fn serializability(graph: &TypeGraph) -> SerializabilityView {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        InProgress,
        Done(SerialStatus),
    }

    fn eval(graph: &TypeGraph, name: &str, memo: &mut BTreeMap<String, Mark>) -> SerialStatus {
        if name == SERIALIZABLE {
            return SerialStatus::Direct;
        }
        match memo.get(name) {
            Some(Mark::Done(s)) => return *s,
            // Inheritance cycles are malformed input; a back-edge yields
            // nothing rather than diverging.
            Some(Mark::InProgress) => return SerialStatus::Not,
            None => {}
        }
        let Some(node) = graph.node(name) else { return SerialStatus::Not };
        memo.insert(name.to_string(), Mark::InProgress);
        let status = if node.interface_names.iter().any(|i| i == SERIALIZABLE) {
            SerialStatus::Direct
        } else {
            let inherited = node
                .super_name
                .iter()
                .chain(node.interface_names.iter())
                .any(|p| eval(graph, p, memo) != SerialStatus::Not);
            if inherited {
                SerialStatus::Transitive
            } else {
                SerialStatus::Not
            }
        };
        memo.insert(name.to_string(), Mark::Done(status));
        status
    }

    let mut memo = BTreeMap::new();
    let mut status = BTreeMap::new();
    let mut artifact_names = BTreeSet::new();
    let mut interface_names = BTreeSet::new();
    for node in graph.nodes() {
        let s = eval(graph, &node.internal_name, &mut memo);
        status.insert(node.internal_name.clone(), s);
        if node.defined_in_artifact {
            artifact_names.insert(node.internal_name.clone());
        }
        if node.is_interface {
            interface_names.insert(node.internal_name.clone());
        }
    }
    SerializabilityView { status, artifact_names, interface_names }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ChangeKind {
    ClassAdded,
    ClassRemoved,
    DirectAdd,
    DirectRemove,
    IndirectAdd,
    IndirectRemove,
}

impl ChangeKind {
    pub fn is_add(self) -> bool {
        matches!(self, ChangeKind::ClassAdded | ChangeKind::DirectAdd | ChangeKind::IndirectAdd)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChangeEvent {
    pub kind: ChangeKind,
    pub class_name: String,
    /// For INDIRECT_* events: the supertype whose change induced this one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cause_class: Option<String>,
}

/// Nearest ancestor that explains a newly-serializable class: one that newly
/// lists the marker itself, or is newly present and serializable. Falls back
/// to the nearest serializable ancestor (covers supertype-edge rewiring).
fn indirect_cause(
    graph_now: &TypeGraph,
    view_now: &SerializabilityView,
    graph_before: &TypeGraph,
    view_before: &SerializabilityView,
    class_name: &str,
) -> Option<String> {
    let ancestors = graph_now.ancestors(class_name);
    for a in &ancestors {
        let name = a.internal_name.as_str();
        let newly_direct = view_now.status(name) == SerialStatus::Direct
            && view_before.status(name) != SerialStatus::Direct;
        let newly_present = graph_before.node(name).is_none() && view_now.is_serializable(name);
        if newly_direct || newly_present {
            return Some(name.to_string());
        }
    }
    ancestors
        .iter()
        .find(|a| view_now.is_serializable(&a.internal_name))
        .map(|a| a.internal_name.clone())
}

/// Classifies serializability membership changes between two versions of the
/// same dependency. Classes are matched by internal name; only
/// artifact-defined nodes generate events. A DIRECT/TRANSITIVE flip without a
/// membership change is not an event.
pub fn diff_serializability(g_old: &TypeGraph, g_new: &TypeGraph) -> Vec<ChangeEvent> {
    let view_old = serializability(g_old);
    let view_new = serializability(g_new);
    let mut events = Vec::new();

    let names: BTreeSet<&str> = g_old
        .artifact_nodes()
        .chain(g_new.artifact_nodes())
        .map(|n| n.internal_name.as_str())
        .collect();

    for name in names {
        let in_old = g_old.node(name).is_some_and(|n| n.defined_in_artifact);
        let in_new = g_new.node(name).is_some_and(|n| n.defined_in_artifact);
        let old_member = in_old && view_old.is_serializable(name);
        let new_member = in_new && view_new.is_serializable(name);

        let event = match (in_old, in_new) {
            (false, true) if new_member => {
                Some(ChangeEvent { kind: ChangeKind::ClassAdded, class_name: name.into(), cause_class: None })
            }
            (true, false) if old_member => Some(ChangeEvent {
                kind: ChangeKind::ClassRemoved,
                class_name: name.into(),
                cause_class: None,
            }),
            (true, true) if !old_member && new_member => {
                if view_new.status(name) == SerialStatus::Direct {
                    Some(ChangeEvent { kind: ChangeKind::DirectAdd, class_name: name.into(), cause_class: None })
                } else {
                    Some(ChangeEvent {
                        kind: ChangeKind::IndirectAdd,
                        class_name: name.into(),
                        cause_class: indirect_cause(g_new, &view_new, g_old, &view_old, name),
                    })
                }
            }
            (true, true) if old_member && !new_member => {
                if view_old.status(name) == SerialStatus::Direct {
                    Some(ChangeEvent {
                        kind: ChangeKind::DirectRemove,
                        class_name: name.into(),
                        cause_class: None,
                    })
                } else {
                    Some(ChangeEvent {
                        kind: ChangeKind::IndirectRemove,
                        class_name: name.into(),
                        cause_class: indirect_cause(g_old, &view_old, g_new, &view_new, name),
                    })
                }
            }
            _ => None,
        };
        events.extend(event);
    }

    events
}

/// Platform interfaces (`java/*` or `javax/*`) implemented, directly or via
/// any supertype, by at least one serializable artifact-defined class.
/// Inherited implementations count: a serializable subclass carries its
/// non-serializable superclass's interfaces. The marker interfaces themselves
/// are excluded; resulting names are catalog- or artifact-known only if they
/// resolved during graph construction, dangling names count too (the
/// reference itself is the signal).
pub fn jcl_interfaces_of_serializable(
    graph: &TypeGraph,
    view: &SerializabilityView,
) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for node in graph.artifact_nodes() {
        if node.is_interface || !view.is_serializable(&node.internal_name) {
            continue;
        }
        // The full supertype closure: super chain and all superinterfaces.
        let mut names: Vec<&str> = Vec::new();
        names.extend(node.interface_names.iter().map(String::as_str));
        for a in graph.ancestors(&node.internal_name) {
            names.extend(a.interface_names.iter().map(String::as_str));
            names.push(a.internal_name.as_str());
        }
        for name in names {
            if (name.starts_with("java/") || name.starts_with("javax/"))
                && name != SERIALIZABLE
                && name != EXTERNALIZABLE
            {
                if let Some(n) = graph.node(name) {
                    if !n.is_interface {
                        continue;
                    }
                }
                out.insert(name.to_string());
            }
        }
    }
    out
}
