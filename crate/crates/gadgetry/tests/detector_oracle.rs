//! Equivalence of the chain finder against an independent exhaustive
//! path enumerator, over randomized small artifacts.

use std::collections::{BTreeMap, BTreeSet};

use gadgetry::detect::{
    build_callgraph, find_chains, CallGraph, EntryCatalog, MethodRef, SinkCatalog,
};
use gadgetry::hierarchy::PlatformCatalog;
use gadgetry::inject::view_of;
use gadgetry_fixtures::random_artifact;

/// Plain recursive enumeration of simple paths from the entry set to any
/// catalog sink, at most `max_depth` frames, at least two frames. Written
/// directly against the edge list, independent of the finder's traversal.
fn oracle_paths(
    cg: &CallGraph,
    entries: &EntryCatalog,
    sinks: &SinkCatalog,
    max_depth: usize,
) -> BTreeSet<Vec<MethodRef>> {
    let mut adjacency: BTreeMap<&MethodRef, BTreeSet<&MethodRef>> = BTreeMap::new();
    for edge in cg.edges() {
        adjacency.entry(&edge.caller).or_default().insert(&edge.callee);
    }

    fn walk<'a>(
        node: &'a MethodRef,
        adjacency: &BTreeMap<&'a MethodRef, BTreeSet<&'a MethodRef>>,
        sinks: &SinkCatalog,
        max_depth: usize,
        path: &mut Vec<&'a MethodRef>,
        found: &mut BTreeSet<Vec<MethodRef>>,
    ) {
        path.push(node);
        if path.len() >= 2 && sinks.matches_any(node) {
            found.insert(path.iter().map(|m| (*m).clone()).collect());
        }
        if path.len() < max_depth {
            if let Some(next) = adjacency.get(node) {
                for callee in next {
                    if !path.contains(callee) {
                        walk(callee, adjacency, sinks, max_depth, path, found);
                    }
                }
            }
        }
        path.pop();
    }

    let mut found = BTreeSet::new();
    for entry in cg.entry_nodes(entries) {
        let Some((node, _)) = adjacency.get_key_value(&entry) else {
            // Entry with no outgoing edges: it can never reach a sink.
            continue;
        };
        let mut path = Vec::new();
        walk(node, &adjacency, sinks, max_depth, &mut path, &mut found);
    }
    found
}

#[test]
fn finder_agrees_with_the_exhaustive_oracle_on_200_random_artifacts() {
    let started = std::time::Instant::now();
    let catalog = PlatformCatalog::builtin();
    let entries = EntryCatalog::builtin();
    let sinks = SinkCatalog::builtin();

    let mut artifacts_with_chains = 0;
    for seed in 0..200u64 {
        let artifact = random_artifact(seed);
        let view = view_of(&artifact, catalog);
        let cg = build_callgraph(&artifact, &view, catalog);

        let expected = oracle_paths(&cg, entries, sinks, 6);
        let got = find_chains(&cg, entries, sinks, 6);

        let got_set: BTreeSet<Vec<MethodRef>> = got
            .iter()
            .map(|c| c.frames().into_iter().cloned().collect())
            .collect();
        assert_eq!(got_set, expected, "seed {seed} disagrees");
        assert_eq!(got_set.len(), got.len(), "seed {seed} returned duplicates");
        if !got.is_empty() {
            artifacts_with_chains += 1;
        }
    }

    // The generator must actually exercise the finder, not hand it empties.
    assert!(artifacts_with_chains >= 20, "only {artifacts_with_chains} seeds produced chains");
    assert!(started.elapsed().as_secs() < 60, "took {:?}", started.elapsed());
}
