//! Acceptance checklist for the toolkit. Each test verifies one observable
//! guarantee end to end and prints a single pass/fail line; run with
//! `cargo test --test acceptance -- --nocapture` to see the checklist.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use gadgetry::archive::{Artifact, ArtifactFormat};
use gadgetry::classfile::{emit_class, parse_class, Insn};
use gadgetry::detect::{
    build_callgraph, filter_by_sinks, find_chains, CallGraph, EntryCatalog, GadgetChain,
    MethodRef, SinkCatalog, SinkFilter,
};
use gadgetry::evolution::{
    build_series, clean_version, filter_date_versions, overall_correlation, pearson,
    classify_dataset, Dataset, Date, RemovalReason,
};
use gadgetry::hierarchy::{
    build_graph, diff_serializability, serializability, ChangeKind, PlatformCatalog,
};
use gadgetry::inject::{
    apply_all, pattern_final_properties, pattern_interface_reachability,
    pattern_transitive_serializable, view_of, DEFAULT_CALLER_NAME,
};
use gadgetry::repoclient::{build_download_url, default_endpoints};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

fn criterion(name: &str, body: impl FnOnce() + std::panic::UnwindSafe) {
    match std::panic::catch_unwind(body) {
        Ok(()) => println!("criterion {name}: PASS"),
        Err(cause) => {
            println!("criterion {name}: FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gadgetry")
}

fn run_cli<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn cli_json<I, S>(args: I) -> Value
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let output = run_cli(args);
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn write_jar(dir: &Path, name: &str, artifact: &Artifact) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, artifact.write().expect("artifact writes")).expect("jar written");
    path
}

fn kept_chains(artifact: &Artifact, max_depth: usize) -> Vec<GadgetChain> {
    let catalog = PlatformCatalog::builtin();
    let view = view_of(artifact, catalog);
    let graph = build_callgraph(artifact, &view, catalog);
    let chains = find_chains(&graph, EntryCatalog::builtin(), SinkCatalog::builtin(), max_depth);
    filter_by_sinks(&chains, SinkCatalog::builtin(), SinkFilter::KeptOnly)
}

fn frame_names(chain: &GadgetChain) -> Vec<(String, String)> {
    chain
        .frames()
        .into_iter()
        .map(|f| (f.owner.clone(), f.name.clone()))
        .collect()
}

#[test]
fn criterion_01_class_files_reemit_byte_identically() {
    criterion("01 class-file roundtrip fidelity", || {
        let corpus = gadgetry_fixtures::roundtrip_corpus();
        assert!(corpus.len() >= 50, "corpus holds {} classes", corpus.len());
        let start = Instant::now();
        for (name, bytes) in &corpus {
            let parsed = parse_class(bytes).unwrap_or_else(|e| panic!("{name}: {e}"));
            let emitted = emit_class(&parsed);
            assert_eq!(&emitted, bytes, "{name} did not roundtrip byte-identically");
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 5.0, "roundtrip took {elapsed:?}");
    });
}

#[test]
fn criterion_02_version_cleaning_matches_the_published_rules() {
    criterion("02 version-identifier cleaning goldens", || {
        let cleaned = |raw: &str| clean_version(raw).cleaned.expect("retained");
        assert_eq!(cleaned("5.2.25.FINAL"), "5.2.25");
        assert_eq!(cleaned("1.5R4"), "1.5.4");
        assert_eq!(cleaned("2686.v7c37e0578401"), "2686");
        assert_eq!(cleaned("1.0.0"), "1.0.0");
        let dropped = clean_version("1.6.0-dev01");
        assert_eq!(dropped.cleaned, None);
        assert_eq!(dropped.removed_reason, Some(RemovalReason::AlphaTag));

        // One date identifier among five retained versions sits exactly at
        // the 20% boundary and is dropped as a minority.
        let series: Vec<_> = ["3.2.2", "3.2.1", "3.2.0", "3.1.0", "20040616"]
            .map(clean_version)
            .to_vec();
        let filtered = filter_date_versions(&series);
        assert_eq!(filtered[0].cleaned.as_deref(), Some("3.2.2"));
        assert_eq!(filtered[1].cleaned.as_deref(), Some("3.2.1"));
        assert_eq!(filtered[4].removed_reason, Some(RemovalReason::DateMinority));
        // An all-date series keeps every entry.
        let dates: Vec<_> = ["20040616", "20050401"].map(clean_version).to_vec();
        assert!(filter_date_versions(&dates).iter().all(|v| v.removed_reason.is_none()));
    });
}

#[test]
fn criterion_03_download_urls_follow_repository_layout() {
    criterion("03 repository URL construction golden", || {
        let endpoints = default_endpoints();
        let url = build_download_url(
            &endpoints[0],
            "org.slf4j",
            "slf4j-api",
            "1.1.0",
            ArtifactFormat::Jar,
        )
        .expect("coordinates are valid");
        assert_eq!(
            url,
            "https://repo1.maven.org/maven2/org/slf4j/slf4j-api/1.1.0/slf4j-api-1.1.0.jar"
        );
    });
}

#[test]
fn criterion_04_membership_changes_name_their_cause() {
    criterion("04 change-cause taxonomy and count invariant", || {
        let catalog = PlatformCatalog::builtin();
        let events_for = |old: &Artifact, new: &Artifact| {
            diff_serializability(&build_graph(old, catalog), &build_graph(new, catalog))
        };
        let [(a0, a1), (b0, b1), (c0, c1)] = gadgetry_fixtures::membership_change_pairs();

        let ev = events_for(&a0, &a1);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, ChangeKind::ClassAdded);
        assert_eq!(ev[0].class_name, "ex/Payload");

        let ev = events_for(&b0, &b1);
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, ChangeKind::DirectAdd);
        assert_eq!(ev[0].class_name, "ex/Model");

        let ev = events_for(&c0, &c1);
        assert_eq!(ev.len(), 2, "marker on a parent also flips the subclass");
        assert_eq!(ev[0].kind, ChangeKind::IndirectAdd);
        assert_eq!(ev[0].class_name, "ex/Leaf");
        assert_eq!(ev[0].cause_class.as_deref(), Some("ex/Parent"));
        assert_eq!(ev[1].kind, ChangeKind::DirectAdd);
        assert_eq!(ev[1].class_name, "ex/Parent");

        // Adds minus removes must equal the membership count delta, for any
        // random mutation of a random hierarchy.
        let serializable_count = |artifact: &Artifact| {
            let graph = build_graph(artifact, catalog);
            let view = serializability(&graph);
            graph
                .artifact_nodes()
                .filter(|n| view.is_serializable(&n.internal_name))
                .count() as i64
        };
        let start = Instant::now();
        for seed in 0..1000u64 {
            let (before, after) = gadgetry_fixtures::random_hierarchy_pair(seed);
            let events = events_for(&before, &after);
            let signed: i64 = events.iter().map(|e| if e.kind.is_add() { 1 } else { -1 }).sum();
            let delta = serializable_count(&after) - serializable_count(&before);
            assert_eq!(signed, delta, "seed {seed}");
        }
        let elapsed = start.elapsed();
        assert!(elapsed.as_secs_f64() < 10.0, "1000 diffs took {elapsed:?}");
    });
}

#[test]
fn criterion_05_marker_spread_covers_every_abstract_type() {
    criterion("05 marker-spread postcondition on every fixture", || {
        let catalog = PlatformCatalog::builtin();
        for (label, artifact) in gadgetry_fixtures::all_fixture_artifacts() {
            let (modified, _) = pattern_transitive_serializable(&artifact, catalog)
                .unwrap_or_else(|e| panic!("{label}: {e}"));

            let graph = build_graph(&modified, catalog);
            let view = serializability(&graph);
            for node in graph.artifact_nodes() {
                if node.is_interface || node.is_abstract {
                    assert!(
                        view.is_serializable(&node.internal_name),
                        "{label}: {} still lacks the marker",
                        node.internal_name
                    );
                }
            }

            // Re-application must change nothing.
            let (again, report) = pattern_transitive_serializable(&modified, catalog).unwrap();
            assert_eq!(report.classes_modified.0.len(), 0, "{label}: not idempotent");
            for (path, data) in modified.entries() {
                assert_eq!(again.entry(path), Some(data), "{label}: {path} changed");
            }

            // Resource entries ride along untouched.
            for (path, data) in artifact.entries() {
                if !path.ends_with(".class") {
                    assert_eq!(modified.entry(path), Some(data), "{label}: {path} changed");
                }
            }
        }
    });
}

#[test]
fn criterion_06_constant_extraction_preserves_method_structure() {
    criterion("06 constant extraction and branch fixups", || {
        let catalog = PlatformCatalog::builtin();
        let class_of = |artifact: &Artifact, name: &str| {
            let path = artifact.class_path_for(name);
            parse_class(artifact.entry(&path).expect("class present")).expect("parses")
        };
        let ldc_sites = |class: &gadgetry::classfile::ClassFile, method: &str| {
            let info = class
                .methods
                .iter()
                .find(|m| m.name(&class.pool).unwrap() == method)
                .expect("method present");
            let code = info.code().expect("has code");
            code.code
                .iter()
                .filter(|(_, insn)| {
                    let index = match insn {
                        Insn::Ldc(i) => *i as u16,
                        Insn::LdcW(i) => *i,
                        _ => return false,
                    };
                    matches!(
                        class.pool.get(index),
                        Ok(gadgetry::classfile::pool::Constant::String { .. }
                            | gadgetry::classfile::pool::Constant::Class { .. })
                    )
                })
                .count()
        };
        let max_stack = |class: &gadgetry::classfile::ClassFile, method: &str| {
            let info = class
                .methods
                .iter()
                .find(|m| m.name(&class.pool).unwrap() == method)
                .expect("method present");
            info.code().expect("has code").max_stack
        };

        let original = gadgetry_fixtures::reflective_constants();
        let before = class_of(&original, "com/example/NotVuln");
        let target_method = "method";
        assert_eq!(ldc_sites(&before, target_method), 2, "one class, one string");
        let before_fields = before.fields.len();
        let before_stack = max_stack(&before, target_method);

        let (modified, report) = pattern_final_properties(&original, catalog).unwrap();
        let after = class_of(&modified, "com/example/NotVuln");
        assert_eq!(after.fields.len(), before_fields + 2, "two new fields");
        assert_eq!(report.constants_extracted.0.len(), 2);
        for field in &after.fields {
            let name = after.pool.utf8_str(field.name_index).unwrap();
            if name.starts_with("val$") {
                let private_final = gadgetry::classfile::flags::ACC_PRIVATE
                    | gadgetry::classfile::flags::ACC_FINAL;
                assert_eq!(field.access_flags & private_final, private_final, "{name}");
            }
        }
        assert_eq!(ldc_sites(&after, &target_method), 0, "all sites replaced");
        assert_eq!(max_stack(&after, &target_method), before_stack, "stack unchanged");

        // The constructor now assigns both extracted fields.
        let ctor = after
            .methods
            .iter()
            .find(|m| m.name(&after.pool).unwrap() == "<init>")
            .expect("constructor present");
        let assigned: BTreeSet<String> = ctor
            .code()
            .unwrap()
            .code
            .iter()
            .filter_map(|(_, insn)| match insn {
                Insn::Cp { op: 0xb5, index } => {
                    let (_, name, _) = after.pool.member_ref(*index).ok()?;
                    name.starts_with("val$").then(|| name.to_string())
                }
                _ => None,
            })
            .collect();
        assert_eq!(assigned.len(), 2, "constructor initializes both fields");

        // Forward branches that span a replaced site stretch by two bytes
        // per site: the one-byte ldc becomes aload + three-byte getfield.
        let branchy = gadgetry_fixtures::branching_constants();
        let branch_delta = |class: &gadgetry::classfile::ClassFile, method: &str| {
            let info = class
                .methods
                .iter()
                .find(|m| m.name(&class.pool).unwrap() == method)
                .expect("method present");
            info.code()
                .unwrap()
                .code
                .iter()
                .find_map(|(_, insn)| match insn {
                    Insn::Branch { op: 0x99, delta } => Some(*delta),
                    _ => None,
                })
                .expect("fixture branches forward")
        };
        let before = class_of(&branchy, "com/example/Branchy");
        let (after_art, _) = pattern_final_properties(&branchy, catalog).unwrap();
        let after = class_of(&after_art, "com/example/Branchy");
        assert_eq!(branch_delta(&before, "pick") + 2, branch_delta(&after, "pick"));
        assert_eq!(branch_delta(&before, "tag") + 4, branch_delta(&after, "tag"));
    });
}

#[test]
fn criterion_07_the_synthetic_class_exercises_housed_interfaces() {
    criterion("07 synthetic housing-class shape", || {
        let catalog = PlatformCatalog::builtin();

        let worker = gadgetry_fixtures::runnable_iterator_worker();
        let (modified, report) =
            pattern_interface_reachability(&worker, catalog, DEFAULT_CALLER_NAME).unwrap();
        let housed = report.caller_interfaces.0.clone();
        assert_eq!(housed, vec!["java/lang/Runnable", "java/util/Iterator"]);

        let caller_bytes = modified
            .entry(&modified.class_path_for(DEFAULT_CALLER_NAME))
            .expect("synthetic class present");
        let caller = parse_class(caller_bytes).expect("synthetic class parses");

        // One public field per housed interface plus the object slot.
        let fields: BTreeMap<String, String> = caller
            .fields
            .iter()
            .map(|f| {
                assert_ne!(f.access_flags & gadgetry::classfile::flags::ACC_PUBLIC, 0);
                (
                    caller.pool.utf8_str(f.name_index).unwrap().to_string(),
                    caller.pool.utf8_str(f.descriptor_index).unwrap().to_string(),
                )
            })
            .collect();
        assert_eq!(fields.len(), housed.len() + 1);
        for iface in &housed {
            let desc = format!("L{iface};");
            assert!(
                fields.values().any(|d| d == &desc),
                "no field of type {desc} in {fields:?}"
            );
        }
        assert_eq!(fields.get("object").map(String::as_str), Some("Ljava/lang/Object;"));

        // The all-fields constructor takes every housed interface then the
        // object parameter.
        let ctor = caller
            .methods
            .iter()
            .find(|m| m.name(&caller.pool).unwrap() == "<init>")
            .expect("constructor present");
        assert_eq!(
            ctor.descriptor(&caller.pool).unwrap(),
            "(Ljava/lang/Runnable;Ljava/util/Iterator;Ljava/lang/Object;)V"
        );

        // hashCode invokes every abstract method of every housed interface.
        let hash = caller
            .methods
            .iter()
            .find(|m| m.name(&caller.pool).unwrap() == "hashCode")
            .expect("hashCode present");
        let invoked: BTreeSet<(String, String, String)> = hash
            .code()
            .unwrap()
            .code
            .iter()
            .filter_map(|(_, insn)| match insn {
                Insn::InvokeInterface { index, .. } | Insn::Cp { op: 0xb6..=0xb8, index } => {
                    let (owner, name, desc) = caller.pool.member_ref(*index).ok()?;
                    Some((owner.to_string(), name.to_string(), desc.to_string()))
                }
                _ => None,
            })
            .collect();
        for iface in &housed {
            let methods = &catalog.get(iface).expect("housed interface is cataloged").methods;
            assert!(!methods.is_empty());
            for (name, desc) in methods {
                assert!(
                    invoked.contains(&(iface.clone(), name.clone(), desc.clone())),
                    "hashCode never calls {iface}.{name}{desc}"
                );
            }
        }

        // An interface inherited through a superclass is housed too.
        let inherited = gadgetry_fixtures::inherited_runnable();
        let (_, report) =
            pattern_interface_reachability(&inherited, catalog, DEFAULT_CALLER_NAME).unwrap();
        assert_eq!(report.caller_interfaces.0, vec!["java/lang/Runnable"]);

        // No serializable classes, nothing to house.
        let free = gadgetry_fixtures::serialization_free();
        let (_, report) =
            pattern_interface_reachability(&free, catalog, DEFAULT_CALLER_NAME).unwrap();
        assert!(report.caller_interfaces.0.is_empty());
    });
}

#[test]
fn criterion_08_staged_application_houses_strictly_more() {
    criterion("08 staged patterns widen the housed set", || {
        let catalog = PlatformCatalog::builtin();
        let artifact = gadgetry_fixtures::openjpa();

        let (_, alone) =
            pattern_interface_reachability(&artifact, catalog, DEFAULT_CALLER_NAME).unwrap();
        let (_, combined) = apply_all(&artifact, catalog, DEFAULT_CALLER_NAME).unwrap();

        let alone: BTreeSet<_> = alone.caller_interfaces.0.iter().cloned().collect();
        let combined: BTreeSet<_> = combined.caller_interfaces.0.iter().cloned().collect();
        assert!(alone.is_subset(&combined));
        assert!(
            combined.len() > alone.len(),
            "marker spread must add housed interfaces: {alone:?} vs {combined:?}"
        );
    });
}

#[test]
fn criterion_09_the_hidden_chain_surfaces_only_after_modification() {
    criterion("09 end-to-end delta on the motivating shape", || {
        let dir = TempDir::new().unwrap();
        let jar = write_jar(dir.path(), "beans.jar", &gadgetry_fixtures::spring_beans());
        let modified = dir.path().join("beans.p3.jar");

        let start = Instant::now();
        let before = cli_json(["detect", jar.to_str().unwrap()]);
        assert_eq!(before["total_chains"], 0, "pristine artifact is chain-free");

        cli_json(["inject", jar.to_str().unwrap(), "--pattern", "3"]);
        let delta = cli_json([
            "delta",
            jar.to_str().unwrap(),
            modified.to_str().unwrap(),
        ]);
        let elapsed = start.elapsed();

        assert_eq!(delta["total_new_chains"], 1);
        assert_eq!(
            delta["pairs"][0]["new_chains"][0]["display"],
            "support/Caller.hashCode -> \
             org/springframework/beans/factory/support/DisposableBeanAdapter.run -> \
             org/springframework/beans/factory/support/DisposableBeanAdapter.destroy -> \
             org/springframework/beans/factory/support/DisposableBeanAdapter.invokeCustomDestroyMethod -> \
             java/lang/reflect/Method.invoke"
        );
        assert!(elapsed.as_secs_f64() < 2.0, "pipeline took {elapsed:?}");
    });
}

#[test]
fn criterion_10_the_deep_chain_needs_every_pattern_together() {
    criterion("10 staged-only chain at full depth", || {
        let catalog = PlatformCatalog::builtin();
        let artifact = gadgetry_fixtures::openjpa();

        assert!(kept_chains(&artifact, 12).is_empty(), "original");
        let (p1, _) = pattern_transitive_serializable(&artifact, catalog).unwrap();
        assert!(kept_chains(&p1, 12).is_empty(), "marker spread alone");
        let (p2, _) = pattern_final_properties(&artifact, catalog).unwrap();
        assert!(kept_chains(&p2, 12).is_empty(), "constant extraction alone");
        let (p3, _) =
            pattern_interface_reachability(&artifact, catalog, DEFAULT_CALLER_NAME).unwrap();
        assert!(kept_chains(&p3, 12).is_empty(), "interface housing alone");

        let (all, _) = apply_all(&artifact, catalog, DEFAULT_CALLER_NAME).unwrap();
        let chains = kept_chains(&all, 12);
        assert_eq!(chains.len(), 1, "exactly one chain after staging");

        let mut expected = vec![("support/Caller".to_string(), "hashCode".to_string())];
        expected.extend(
            gadgetry_fixtures::openjpa_chain_owners()
                .iter()
                .map(|(o, n)| (o.to_string(), n.to_string())),
        );
        expected.push(("java/lang/reflect/Method".to_string(), "invoke".to_string()));
        assert_eq!(frame_names(&chains[0]), expected);
        assert_eq!(chains[0].frame_count(), 7);

        // The depth limit is a real cutoff: the seven-frame chain needs it.
        let dir = TempDir::new().unwrap();
        let jar = write_jar(dir.path(), "jpa.jar", &artifact);
        let all_jar = dir.path().join("jpa.all.jar");
        cli_json(["inject", jar.to_str().unwrap(), "--pattern", "all"]);
        let at7 = cli_json(["detect", all_jar.to_str().unwrap(), "--max-depth", "7"]);
        let at6 = cli_json(["detect", all_jar.to_str().unwrap(), "--max-depth", "6"]);
        assert_eq!(at7["total_chains"], 1);
        assert_eq!(at6["total_chains"], 0);
    });
}

#[test]
fn criterion_11_the_finder_matches_an_exhaustive_oracle() {
    criterion("11 chain finder agrees with exhaustive search", || {
        fn oracle_paths(
            graph: &CallGraph,
            entries: &EntryCatalog,
            sinks: &SinkCatalog,
            max_depth: usize,
        ) -> BTreeSet<Vec<MethodRef>> {
            let mut adjacency: BTreeMap<&MethodRef, BTreeSet<&MethodRef>> = BTreeMap::new();
            for edge in graph.edges() {
                adjacency.entry(&edge.caller).or_default().insert(&edge.callee);
            }
            fn walk(
                node: &MethodRef,
                adjacency: &BTreeMap<&MethodRef, BTreeSet<&MethodRef>>,
                sinks: &SinkCatalog,
                max_depth: usize,
                path: &mut Vec<MethodRef>,
                found: &mut BTreeSet<Vec<MethodRef>>,
            ) {
                path.push(node.clone());
                if path.len() >= 2 && sinks.matches_any(node) {
                    found.insert(path.clone());
                }
                if path.len() < max_depth {
                    if let Some(nexts) = adjacency.get(node) {
                        for next in nexts {
                            if !path.contains(next) {
                                walk(next, adjacency, sinks, max_depth, path, found);
                            }
                        }
                    }
                }
                path.pop();
            }
            let mut found = BTreeSet::new();
            for entry in graph.entry_nodes(entries) {
                if let Some((node, _)) = adjacency.get_key_value(&entry) {
                    let mut path = Vec::new();
                    walk(node, &adjacency, sinks, max_depth, &mut path, &mut found);
                }
            }
            found
        }

        let catalog = PlatformCatalog::builtin();
        let entries = EntryCatalog::builtin();
        let sinks = SinkCatalog::builtin();
        let start = Instant::now();
        let mut seeds_with_chains = 0usize;
        for seed in 0..200u64 {
            let artifact = gadgetry_fixtures::random_artifact(seed);
            let view = view_of(&artifact, catalog);
            let graph = build_callgraph(&artifact, &view, catalog);
            let found = find_chains(&graph, entries, sinks, 6);
            let expected = oracle_paths(&graph, entries, sinks, 6);

            let as_paths: BTreeSet<Vec<MethodRef>> =
                found.iter().map(|c| c.frames().into_iter().cloned().collect()).collect();
            assert_eq!(as_paths.len(), found.len(), "seed {seed}: duplicate chains");
            assert_eq!(as_paths, expected, "seed {seed}");
            if !found.is_empty() {
                seeds_with_chains += 1;
            }
        }
        let elapsed = start.elapsed();
        assert!(seeds_with_chains >= 20, "only {seeds_with_chains} seeds had chains");
        assert!(elapsed.as_secs_f64() < 60.0, "200 comparisons took {elapsed:?}");
    });
}

#[test]
fn criterion_12_the_sink_catalog_keeps_exactly_its_default_set() {
    criterion("12 sink catalog tiers", || {
        let sinks = SinkCatalog::builtin();
        assert_eq!(sinks.kept.len(), 23, "default kept tier");
        assert!(!sinks.filtered.is_empty());

        // Filtered-tier sinks stay out of default reports and appear with
        // --all-sinks.
        let catalog = PlatformCatalog::builtin();
        let (all, _) =
            apply_all(&gadgetry_fixtures::openjpa(), catalog, DEFAULT_CALLER_NAME).unwrap();
        let view = view_of(&all, catalog);
        let graph = build_callgraph(&all, &view, catalog);
        let chains = find_chains(&graph, EntryCatalog::builtin(), sinks, 12);
        let kept = filter_by_sinks(&chains, sinks, SinkFilter::KeptOnly);
        let wide = filter_by_sinks(&chains, sinks, SinkFilter::All);
        assert!(kept.iter().all(|c| sinks.matches_kept(&c.sink)));
        assert!(wide.len() > kept.len());
        assert!(
            wide.iter().any(|c| !sinks.matches_kept(&c.sink)),
            "the wide view surfaces filtered-tier sinks"
        );
    });
}

#[test]
fn criterion_13_statistics_match_textbook_definitions() {
    criterion("13 correlation statistics oracles", || {
        fn textbook(xs: &[f64], ys: &[f64]) -> Option<f64> {
            let n = xs.len() as f64;
            let mx = xs.iter().sum::<f64>() / n;
            let my = ys.iter().sum::<f64>() / n;
            let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
            let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
            let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
            if sxx == 0.0 || syy == 0.0 {
                None
            } else {
                Some(sxy / (sxx * syy).sqrt())
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for case in 0..100 {
            let n = rng.gen_range(2..=40);
            let constant_x = case % 10 == 7;
            let xs: Vec<f64> = (0..n)
                .map(|_| if constant_x { 4.25 } else { rng.gen_range(-50.0..50.0) })
                .collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(-50.0..50.0)).collect();
            let ours = pearson(&xs, &ys).expect("lengths match");
            match (ours, textbook(&xs, &ys)) {
                (Some(a), Some(b)) => {
                    assert!((a - b).abs() < 1e-12, "case {case}: {a} vs {b}")
                }
                (None, None) => assert!(constant_x || n == 1),
                (a, b) => panic!("case {case}: divergent degeneracy {a:?} vs {b:?}"),
            }
        }

        // Bucket nesting on random histories: D within C within B within A.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in 0..1000 {
            let n = rng.gen_range(1..=8);
            let points: Vec<(String, Date, u64)> = (0..n)
                .map(|i| {
                    (
                        format!("1.{i}.0"),
                        Date::new(rng.gen_range(2018..=2026), rng.gen_range(1..=12), rng.gen_range(1..=28)),
                        rng.gen_range(0..=4),
                    )
                })
                .collect();
            let series = build_series("dep", points);
            let events: Vec<Vec<gadgetry::hierarchy::ChangeEvent>> = (0..n)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        vec![gadgetry::hierarchy::ChangeEvent {
                            kind: if rng.gen_bool(0.5) {
                                ChangeKind::DirectAdd
                            } else {
                                ChangeKind::ClassAdded
                            },
                            class_name: "x/Y".to_string(),
                            cause_class: None,
                        }]
                    } else {
                        Vec::new()
                    }
                })
                .collect();
            let label = classify_dataset(&series, &events, 2026);
            let has = |d| label.contains(d);
            assert!(!has(Dataset::D) || has(Dataset::C), "case {case}");
            assert!(!has(Dataset::C) || has(Dataset::B), "case {case}");
            assert!(!has(Dataset::B) || has(Dataset::A), "case {case}");
        }

        // The sampled corpus correlation is bit-reproducible under a seed.
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let corpus: Vec<_> = (0..6)
            .map(|d| {
                let points: Vec<(String, Date, u64)> = (0..12)
                    .map(|i| {
                        (
                            format!("{d}.{i}"),
                            Date::new(2019 + (i % 6), rng.gen_range(1..=12), 1 + (i as u32 % 28)),
                            (i as u64) * 2 + rng.gen_range(0..=3),
                        )
                    })
                    .collect();
                build_series(&format!("dep{d}"), points)
            })
            .collect();
        let first = overall_correlation(&corpus, 2019..=2024, 64, 4242)
            .expect("series span the range")
            .expect("non-degenerate");
        let second = overall_correlation(&corpus, 2019..=2024, 64, 4242)
            .expect("series span the range")
            .expect("non-degenerate");
        assert_eq!(first.to_bits(), second.to_bits(), "same seed, same bits");
        let other = overall_correlation(&corpus, 2019..=2024, 64, 4243)
            .expect("series span the range")
            .expect("non-degenerate");
        assert!((other - first).abs() < 0.5, "different seed stays in range");
    });
}

#[test]
fn criterion_14_every_command_reruns_byte_identically() {
    criterion("14 deterministic reports across reruns", || {
        let dir = TempDir::new().unwrap();
        let beans = write_jar(dir.path(), "beans.jar", &gadgetry_fixtures::spring_beans());
        let jpa = write_jar(dir.path(), "jpa.jar", &gadgetry_fixtures::openjpa());
        let jpa_all = dir.path().join("jpa.all.jar");
        let [(old_art, new_art), _, _] = gadgetry_fixtures::membership_change_pairs();
        let old = write_jar(dir.path(), "old.jar", &old_art);
        let new = write_jar(dir.path(), "new.jar", &new_art);
        let csv = dir.path().join("history.csv");
        std::fs::write(
            &csv,
            "dependency,version,release_date,serializable_count\n\
             alpha,1.0.0,2023-01-15,10\n\
             alpha,1.1.0,2024-11-02,12\n\
             alpha,2.0.0,2025-06-30,17\n",
        )
        .unwrap();
        cli_json(["inject", jpa.to_str().unwrap(), "--pattern", "all"]);

        let p = |path: &Path| path.to_str().unwrap().to_string();
        let commands: Vec<Vec<String>> = vec![
            vec!["scan".into(), p(&beans)],
            vec!["diff".into(), p(&old), p(&new)],
            vec!["inject".into(), p(&beans), "--pattern".into(), "3".into()],
            vec!["detect".into(), p(&jpa_all)],
            vec![
                "delta".into(),
                p(&jpa),
                p(&jpa_all),
                "--workers".into(),
                "3".into(),
            ],
            vec![
                "evolve".into(),
                p(&csv),
                "--seed".into(),
                "9".into(),
                "--samples".into(),
                "50".into(),
            ],
        ];
        for args in commands {
            let first = run_cli(&args);
            assert!(
                first.status.success(),
                "{args:?}: {}",
                String::from_utf8_lossy(&first.stderr)
            );
            let second = run_cli(&args);
            assert_eq!(first.stdout, second.stdout, "rerun differs for {args:?}");
            assert!(!first.stdout.is_empty());
        }

        // The modified archive itself is reproduced byte-identically too.
        let first = std::fs::read(dir.path().join("beans.p3.jar")).unwrap();
        cli_json(["inject", beans.to_str().unwrap(), "--pattern", "3"]);
        let second = std::fs::read(dir.path().join("beans.p3.jar")).unwrap();
        assert_eq!(first, second);
    });
}
