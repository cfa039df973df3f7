//! Deserialization-aware call graphs and gadget-chain search.
//!
//! The graph dispatches virtual and interface call sites only to receiver
//! classes an attacker can materialize through deserialization: concrete
//! artifact classes that are serializable in the analyzed state. Sites whose
//! declared owner lives outside the artifact also keep an edge to the
//! declared target, marking the platform boundary; that is how sinks such as
//! `java/lang/reflect/Method.invoke` appear as chain frames. Static and
//! special calls are exact and always kept.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::archive::Artifact;
use crate::classfile::insn::op;
use crate::classfile::{parse_class, Insn};
use crate::hierarchy::{build_graph, PlatformCatalog, SerializabilityView, TypeGraph, TypeNode};

/// Default bound on chain length, counted in frames (entry + links + sink).
pub const DEFAULT_MAX_DEPTH: usize = 12;

#[derive(Debug, Error)]
pub enum DetectError {
    #[error("catalog line {line}: {reason}")]
    BadCatalogLine { line: usize, reason: String },
    #[error("{what} catalog is empty")]
    EmptyCatalog { what: &'static str },
}

/// One method node: owner internal name, method name, descriptor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MethodRef {
    pub owner: String,
    pub name: String,
    pub descriptor: String,
}

impl MethodRef {
    pub fn new(owner: &str, name: &str, descriptor: &str) -> MethodRef {
        MethodRef {
            owner: owner.to_string(),
            name: name.to_string(),
            descriptor: descriptor.to_string(),
        }
    }
}

impl fmt::Display for MethodRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.owner, self.name)
    }
}

/// How a call edge was derived from its call site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EdgeKind {
    Static,
    Special,
    VirtualResolved,
    InterfaceResolved,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Edge {
    pub caller: MethodRef,
    pub callee: MethodRef,
    pub kind: EdgeKind,
}

/// Call graph over one artifact state.
#[derive(Debug, Clone)]
pub struct CallGraph {
    nodes: BTreeSet<MethodRef>,
    edges: Vec<Edge>,
    /// Access flags of methods declared by artifact classes.
    declared: BTreeMap<MethodRef, u16>,
    view: SerializabilityView,
    /// Call sites that could not be decoded, with the caller and reason.
    unresolved_sites: Vec<(MethodRef, String)>,
}

impl CallGraph {
    pub fn nodes(&self) -> &BTreeSet<MethodRef> {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn view(&self) -> &SerializabilityView {
        &self.view
    }

    pub fn unresolved_sites(&self) -> &[(MethodRef, String)] {
        &self.unresolved_sites
    }

    /// Deduplicated callees of `from`, in deterministic order.
    pub fn successors(&self, from: &MethodRef) -> Vec<&MethodRef> {
        let mut out: Vec<&MethodRef> = self
            .edges
            .iter()
            .filter(|e| &e.caller == from)
            .map(|e| &e.callee)
            .collect();
        out.dedup();
        out
    }

    /// Entry method nodes: methods declared by serializable artifact classes
    /// that match the entry catalog (instance methods only).
    pub fn entry_nodes(&self, entries: &EntryCatalog) -> BTreeSet<MethodRef> {
        use crate::classfile::flags;
        self.declared
            .iter()
            .filter(|(m, access)| {
                *access & (flags::ACC_STATIC | flags::ACC_ABSTRACT) == 0
                    && self.view.is_serializable(&m.owner)
                    && entries.matches(&m.name, &m.descriptor)
            })
            .map(|(m, _)| m.clone())
            .collect()
    }
}

/// Builds the deserialization-aware call graph for one artifact state.
///
/// `view` must describe the same artifact bytes (compute it via
/// [`crate::inject::view_of`] or [`crate::hierarchy::serializability`]).
pub fn build_callgraph(
    artifact: &Artifact,
    view: &SerializabilityView,
    catalog: &PlatformCatalog,
) -> CallGraph {
    let graph = build_graph(artifact, catalog);

    let mut nodes = BTreeSet::new();
    let mut declared = BTreeMap::new();
    let mut edge_set: BTreeSet<Edge> = BTreeSet::new();
    let mut unresolved_sites = Vec::new();
    let mut seen_owners = BTreeSet::new();

    // Receiver sets and implementation lookups repeat across call sites.
    let mut receiver_cache: HashMap<String, Vec<String>> = HashMap::new();
    let mut impl_cache: HashMap<(String, String, String), Option<String>> = HashMap::new();

    for (_, data) in artifact.class_entries() {
        let class = match parse_class(data) {
            Ok(c) => c,
            Err(_) => continue, // already reported by the type graph's skip list
        };
        let owner = match class.class_name() {
            Ok(n) => n,
            Err(_) => continue,
        };
        // Later duplicates lose, mirroring the type graph's first-wins rule.
        if !graph.node(&owner).map(|n| n.defined_in_artifact).unwrap_or(false)
            || !seen_owners.insert(owner.clone())
        {
            continue;
        }

        for method in &class.methods {
            let (name, descriptor) = match (method.name(&class.pool), method.descriptor(&class.pool)) {
                (Ok(n), Ok(d)) => (n, d),
                _ => continue,
            };
            let caller = MethodRef::new(&owner, &name, &descriptor);
            nodes.insert(caller.clone());
            declared.insert(caller.clone(), method.access_flags);

            let Some(body) = method.code() else { continue };
            for (_, insn) in &body.code {
                let (op_code, index) = match insn {
                    Insn::Cp { op: o, index }
                        if matches!(*o, op::INVOKEVIRTUAL | op::INVOKESPECIAL | op::INVOKESTATIC) =>
                    {
                        (*o, *index)
                    }
                    Insn::InvokeInterface { index, .. } => (op::INVOKEINTERFACE, *index),
                    Insn::InvokeDynamic { .. } => {
                        unresolved_sites
                            .push((caller.clone(), "invokedynamic site not modeled".to_string()));
                        continue;
                    }
                    _ => continue,
                };
                let (t_owner, t_name, t_desc) = match class.pool.member_ref(index) {
                    Ok(t) => t,
                    Err(e) => {
                        unresolved_sites.push((caller.clone(), e.to_string()));
                        continue;
                    }
                };

                match op_code {
                    op::INVOKESTATIC => {
                        push_edge(
                            &mut edge_set,
                            &mut nodes,
                            &caller,
                            MethodRef::new(&t_owner, &t_name, &t_desc),
                            EdgeKind::Static,
                        );
                    }
                    op::INVOKESPECIAL => {
                        push_edge(
                            &mut edge_set,
                            &mut nodes,
                            &caller,
                            MethodRef::new(&t_owner, &t_name, &t_desc),
                            EdgeKind::Special,
                        );
                    }
                    _ => {
                        let kind = if op_code == op::INVOKEINTERFACE {
                            EdgeKind::InterfaceResolved
                        } else {
                            EdgeKind::VirtualResolved
                        };
                        let owner_in_artifact = graph
                            .node(&t_owner)
                            .map(|n| n.defined_in_artifact)
                            .unwrap_or(false);
                        if !owner_in_artifact {
                            // Platform boundary: keep the declared target.
                            push_edge(
                                &mut edge_set,
                                &mut nodes,
                                &caller,
                                MethodRef::new(&t_owner, &t_name, &t_desc),
                                kind,
                            );
                        }
                        let receivers = receiver_cache
                            .entry(t_owner.clone())
                            .or_insert_with(|| serializable_receivers(&graph, view, &t_owner))
                            .clone();
                        for receiver in receivers {
                            let key = (receiver.clone(), t_name.clone(), t_desc.clone());
                            let resolved = impl_cache
                                .entry(key)
                                .or_insert_with(|| resolve_impl(&graph, &receiver, &t_name, &t_desc))
                                .clone();
                            if let Some(impl_owner) = resolved {
                                push_edge(
                                    &mut edge_set,
                                    &mut nodes,
                                    &caller,
                                    MethodRef::new(&impl_owner, &t_name, &t_desc),
                                    kind,
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    CallGraph {
        nodes,
        edges: edge_set.into_iter().collect(),
        declared,
        view: view.clone(),
        unresolved_sites,
    }
}

fn push_edge(
    edges: &mut BTreeSet<Edge>,
    nodes: &mut BTreeSet<MethodRef>,
    caller: &MethodRef,
    callee: MethodRef,
    kind: EdgeKind,
) {
    nodes.insert(callee.clone());
    edges.insert(Edge { caller: caller.clone(), callee, kind });
}

/// Concrete serializable artifact classes whose type closure contains
/// `declared_owner`, i.e. the receivers deserialization can produce for a
/// call site on that owner.
fn serializable_receivers(
    graph: &TypeGraph,
    view: &SerializabilityView,
    declared_owner: &str,
) -> Vec<String> {
    graph
        .artifact_nodes()
        .filter(|n| !n.is_interface && !n.is_abstract && view.is_serializable(&n.internal_name))
        .filter(|n| {
            n.internal_name == declared_owner || supertype_names(graph, n).contains(declared_owner)
        })
        .map(|n| n.internal_name.clone())
        .collect()
}

/// All supertype names reachable from `node`, including names that do not
/// resolve to a graph node (the walk cannot continue past those).
fn supertype_names(graph: &TypeGraph, node: &TypeNode) -> BTreeSet<String> {
    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<&str> = node
        .super_name
        .iter()
        .chain(node.interface_names.iter())
        .map(String::as_str)
        .collect();
    while let Some(name) = queue.pop_front() {
        if !seen.insert(name.to_string()) {
            continue;
        }
        if let Some(n) = graph.node(name) {
            queue.extend(n.super_name.iter().map(String::as_str));
            queue.extend(n.interface_names.iter().map(String::as_str));
        }
    }
    seen
}

/// The class whose declaration of (`name`, `descriptor`) a receiver of type
/// `receiver` would execute: first the superclass chain, then interfaces in
/// breadth-first order for default methods. Abstract declarations never win,
/// so platform types (whose catalog methods are all abstract) are never
/// reported as implementation owners.
fn resolve_impl(graph: &TypeGraph, receiver: &str, name: &str, descriptor: &str) -> Option<String> {
    let concrete = |n: &TypeNode| {
        n.methods
            .iter()
            .any(|m| m.name == name && m.descriptor == descriptor && !m.is_abstract() && !m.is_static())
    };

    let mut cur = graph.node(receiver);
    while let Some(node) = cur {
        if concrete(node) {
            return Some(node.internal_name.clone());
        }
        cur = node.super_name.as_deref().and_then(|s| graph.node(s));
    }

    let mut seen = BTreeSet::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    let mut cur = graph.node(receiver);
    while let Some(node) = cur {
        queue.extend(node.interface_names.iter().map(String::as_str));
        cur = node.super_name.as_deref().and_then(|s| graph.node(s));
    }
    while let Some(iface) = queue.pop_front() {
        if !seen.insert(iface) {
            continue;
        }
        if let Some(node) = graph.node(iface) {
            if concrete(node) {
                return Some(node.internal_name.clone());
            }
            queue.extend(node.interface_names.iter().map(String::as_str));
        }
    }
    None
}

/// One entry signature: method name plus an optional exact descriptor
/// (absent matches any overload).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntrySig {
    pub name: String,
    pub descriptor: Option<String>,
}

/// Methods that deserialization lets an attacker trigger on serializable
/// classes, either directly (stream hooks) or via collection trampolines.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryCatalog {
    pub signatures: Vec<EntrySig>,
}

impl EntryCatalog {
    pub fn builtin() -> &'static EntryCatalog {
        static BUILTIN: OnceLock<EntryCatalog> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            EntryCatalog::parse(include_str!("entries.catalog")).expect("embedded entry catalog parses")
        })
    }

    /// Parses `name descriptor` lines; a `*` descriptor matches any overload.
    /// `#` starts a comment, blank lines are skipped.
    pub fn parse(text: &str) -> Result<EntryCatalog, DetectError> {
        let mut signatures = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let [name, descriptor] = cols[..] else {
                return Err(DetectError::BadCatalogLine {
                    line: i + 1,
                    reason: format!("expected `name descriptor`, got {} columns", cols.len()),
                });
            };
            signatures.push(EntrySig {
                name: name.to_string(),
                descriptor: (descriptor != "*").then(|| descriptor.to_string()),
            });
        }
        if signatures.is_empty() {
            return Err(DetectError::EmptyCatalog { what: "entry" });
        }
        Ok(EntryCatalog { signatures })
    }

    pub fn matches(&self, name: &str, descriptor: &str) -> bool {
        self.signatures
            .iter()
            .any(|s| s.name == name && s.descriptor.as_deref().map(|d| d == descriptor).unwrap_or(true))
    }
}

/// One sink pattern: owner and name, plus an optional exact descriptor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkPattern {
    pub owner: String,
    pub name: String,
    pub descriptor: Option<String>,
}

impl SinkPattern {
    fn matches(&self, m: &MethodRef) -> bool {
        self.owner == m.owner
            && self.name == m.name
            && self.descriptor.as_deref().map(|d| d == m.descriptor).unwrap_or(true)
    }
}

/// Security-sensitive sink methods, split into the kept working set and the
/// recognized-but-filtered remainder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SinkCatalog {
    pub kept: Vec<SinkPattern>,
    pub filtered: Vec<SinkPattern>,
}

impl SinkCatalog {
    pub fn builtin() -> &'static SinkCatalog {
        static BUILTIN: OnceLock<SinkCatalog> = OnceLock::new();
        BUILTIN.get_or_init(|| {
            SinkCatalog::parse(include_str!("sinks.catalog")).expect("embedded sink catalog parses")
        })
    }

    /// Parses `owner name [descriptor]` lines under `[kept]` / `[filtered]`
    /// section headers. Dots in owners normalize to slashes.
    pub fn parse(text: &str) -> Result<SinkCatalog, DetectError> {
        let mut kept = Vec::new();
        let mut filtered = Vec::new();
        let mut in_filtered: Option<bool> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match line {
                "[kept]" => {
                    in_filtered = Some(false);
                    continue;
                }
                "[filtered]" => {
                    in_filtered = Some(true);
                    continue;
                }
                _ => {}
            }
            let cols: Vec<&str> = line.split_whitespace().collect();
            let (owner, name, descriptor) = match cols[..] {
                [owner, name] => (owner, name, None),
                [owner, name, descriptor] => (owner, name, Some(descriptor.to_string())),
                _ => {
                    return Err(DetectError::BadCatalogLine {
                        line: i + 1,
                        reason: format!("expected `owner name [descriptor]`, got {} columns", cols.len()),
                    })
                }
            };
            let Some(filtered_section) = in_filtered else {
                return Err(DetectError::BadCatalogLine {
                    line: i + 1,
                    reason: "sink row before a [kept] or [filtered] header".to_string(),
                });
            };
            let pattern = SinkPattern {
                owner: owner.replace('.', "/"),
                name: name.to_string(),
                descriptor,
            };
            if filtered_section {
                filtered.push(pattern);
            } else {
                kept.push(pattern);
            }
        }
        if kept.is_empty() && filtered.is_empty() {
            return Err(DetectError::EmptyCatalog { what: "sink" });
        }
        Ok(SinkCatalog { kept, filtered })
    }

    pub fn matches_kept(&self, m: &MethodRef) -> bool {
        self.kept.iter().any(|p| p.matches(m))
    }

    pub fn matches_any(&self, m: &MethodRef) -> bool {
        self.matches_kept(m) || self.filtered.iter().any(|p| p.matches(m))
    }
}

/// Which sink tier chain reports include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SinkFilter {
    KeptOnly,
    All,
}

/// One entry-to-sink call path.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GadgetChain {
    pub entry: MethodRef,
    pub links: Vec<MethodRef>,
    pub sink: MethodRef,
}

impl GadgetChain {
    /// All frames in order: entry, links, sink.
    pub fn frames(&self) -> Vec<&MethodRef> {
        let mut out = Vec::with_capacity(self.links.len() + 2);
        out.push(&self.entry);
        out.extend(self.links.iter());
        out.push(&self.sink);
        out
    }

    pub fn frame_count(&self) -> usize {
        self.links.len() + 2
    }
}

impl fmt::Display for GadgetChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rendered: Vec<String> = self.frames().iter().map(|m| m.to_string()).collect();
        write!(f, "{}", rendered.join(" -> "))
    }
}

/// All simple paths from any entry to any catalog sink (kept or filtered)
/// with at most `max_depth` frames, deduplicated and ordered lexicographically
/// by frame sequence. Apply [`filter_by_sinks`] to restrict the sink tier.
pub fn find_chains(
    cg: &CallGraph,
    entries: &EntryCatalog,
    sinks: &SinkCatalog,
    max_depth: usize,
) -> Vec<GadgetChain> {
    let entry_nodes = cg.entry_nodes(entries);
    let mut adjacency: BTreeMap<&MethodRef, Vec<&MethodRef>> = BTreeMap::new();
    for edge in cg.edges() {
        let next = adjacency.entry(&edge.caller).or_default();
        // Edges are sorted; consecutive duplicates differ only in kind.
        if next.last() != Some(&&edge.callee) {
            next.push(&edge.callee);
        }
    }

    let mut sequences: BTreeSet<Vec<MethodRef>> = BTreeSet::new();
    for entry in &entry_nodes {
        let mut path: Vec<&MethodRef> = vec![entry];
        let mut on_path: BTreeSet<&MethodRef> = BTreeSet::new();
        on_path.insert(entry);
        walk(entry, &adjacency, sinks, max_depth, &mut path, &mut on_path, &mut sequences);
    }

    sequences
        .into_iter()
        .map(|mut frames| {
            let sink = frames.pop().expect("chain has a sink frame");
            let entry = frames.remove(0);
            GadgetChain { entry, links: frames, sink }
        })
        .collect()
}

fn walk<'a>(
    node: &'a MethodRef,
    adjacency: &BTreeMap<&'a MethodRef, Vec<&'a MethodRef>>,
    sinks: &SinkCatalog,
    max_depth: usize,
    path: &mut Vec<&'a MethodRef>,
    on_path: &mut BTreeSet<&'a MethodRef>,
    sequences: &mut BTreeSet<Vec<MethodRef>>,
) {
    if path.len() >= max_depth {
        return;
    }
    let Some(next) = adjacency.get(node) else { return };
    for &callee in next {
        if on_path.contains(callee) {
            continue;
        }
        path.push(callee);
        if sinks.matches_any(callee) {
            sequences.insert(path.iter().map(|m| (*m).clone()).collect());
        }
        on_path.insert(callee);
        walk(callee, adjacency, sinks, max_depth, path, on_path, sequences);
        on_path.remove(callee);
        path.pop();
    }
}

/// Restricts chains to the requested sink tier.
pub fn filter_by_sinks(chains: &[GadgetChain], sinks: &SinkCatalog, mode: SinkFilter) -> Vec<GadgetChain> {
    chains
        .iter()
        .filter(|c| match mode {
            SinkFilter::KeptOnly => sinks.matches_kept(&c.sink),
            SinkFilter::All => sinks.matches_any(&c.sink),
        })
        .cloned()
        .collect()
}

/// Chains present in `modified` but not in `original`, compared by frame
/// sequence with frames owned by the synthetic caller class removed, so the
/// delta attributes chains to dependency gadgets rather than to the injected
/// class. Reported chains keep their full frames.
pub fn diff_chains(original: &[GadgetChain], modified: &[GadgetChain]) -> Vec<GadgetChain> {
    diff_chains_with_caller(original, modified, crate::inject::DEFAULT_CALLER_NAME)
}

/// [`diff_chains`] with a custom synthetic caller class name (internal form).
pub fn diff_chains_with_caller(
    original: &[GadgetChain],
    modified: &[GadgetChain],
    caller_name: &str,
) -> Vec<GadgetChain> {
    let key = |c: &GadgetChain| -> Vec<MethodRef> {
        c.frames().into_iter().filter(|m| m.owner != caller_name).cloned().collect()
    };
    let known: BTreeSet<Vec<MethodRef>> = original.iter().map(key).collect();
    let mut seen = BTreeSet::new();
    modified
        .iter()
        .filter(|c| !known.contains(&key(c)))
        .filter(|c| seen.insert((*c).clone()))
        .cloned()
        .collect()
}
