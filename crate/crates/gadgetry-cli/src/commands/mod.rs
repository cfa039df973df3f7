//! One module per subcommand, plus the shared artifact-set helpers used by
//! the corpus-capable commands.

pub mod delta;
pub mod detect;
pub mod diff;
pub mod evolve;
pub mod inject;
pub mod scan;

use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use gadgetry::archive::{read_artifact_file, Artifact};
use gadgetry::detect::{
    build_callgraph, filter_by_sinks, find_chains, GadgetChain, SinkFilter,
};
use gadgetry::inject::view_of;
use serde_json::{json, Value};

use crate::config::{file_label, Analysis};
use crate::error::{CliError, CliResult};

/// A single artifact file, or every jar/aar directly inside a directory.
pub fn artifact_paths(path: &Path) -> CliResult<Vec<PathBuf>> {
    let meta = std::fs::metadata(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if meta.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let mut found = Vec::new();
    for entry in std::fs::read_dir(path)? {
        let entry = entry?;
        let p = entry.path();
        let is_artifact = p.is_file()
            && p.extension()
                .and_then(|e| e.to_str())
                .map(|e| e.eq_ignore_ascii_case("jar") || e.eq_ignore_ascii_case("aar"))
                .unwrap_or(false);
        if is_artifact {
            found.push(p);
        }
    }
    found.sort();
    if found.is_empty() {
        return Err(CliError::Input(format!("{}: no jar or aar files", path.display())));
    }
    Ok(found)
}

pub struct DetectOutcome {
    pub name: String,
    pub chains: Vec<GadgetChain>,
}

fn detect_one(
    artifact: &Artifact,
    analysis: &Analysis,
    max_depth: usize,
    all_sinks: bool,
) -> Vec<GadgetChain> {
    let view = view_of(artifact, &analysis.platform);
    let cg = build_callgraph(artifact, &view, &analysis.platform);
    let all = find_chains(&cg, &analysis.entries, &analysis.sinks, max_depth);
    let mode = if all_sinks { SinkFilter::All } else { SinkFilter::KeptOnly };
    filter_by_sinks(&all, &analysis.sinks, mode)
}

/// Runs detection over a path set with a bounded worker pool. Results come
/// back sorted by artifact label, so worker scheduling never shows in output.
pub fn detect_over(
    paths: &[PathBuf],
    analysis: &Analysis,
    max_depth: usize,
    all_sinks: bool,
    workers: usize,
) -> CliResult<Vec<DetectOutcome>> {
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(String, CliResult<Vec<GadgetChain>>)>> = Mutex::new(Vec::new());
    let worker_count = workers.clamp(1, paths.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..worker_count {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = paths.get(i) else { break };
                let outcome = read_artifact_file(path)
                    .map_err(CliError::from)
                    .map(|a| detect_one(&a, analysis, max_depth, all_sinks));
                results.lock().unwrap().push((file_label(path), outcome));
            });
        }
    });

    let mut rows = results.into_inner().unwrap();
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    rows.into_iter()
        .map(|(name, outcome)| outcome.map(|chains| DetectOutcome { name, chains }))
        .collect()
}

/// Chains as JSON, each with a rendered `display` line alongside its frames.
pub fn chains_value(chains: &[GadgetChain]) -> Value {
    let rows: Vec<Value> = chains
        .iter()
        .map(|c| {
            let mut v = serde_json::to_value(c).expect("chain serializes");
            v.as_object_mut()
                .expect("chain is an object")
                .insert("display".to_string(), json!(c.to_string()));
            v
        })
        .collect();
    Value::Array(rows)
}
