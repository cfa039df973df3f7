//! `diff`: serializability change events between two versions of the same
//! dependency, bucketed into the six change kinds.

use std::path::Path;

use gadgetry::archive::read_artifact_file;
use gadgetry::hierarchy::{build_graph, diff_serializability, ChangeKind};
use serde_json::{json, Value};

use crate::config::{file_label, Analysis, RunConfig};
use crate::error::{CliError, CliResult};

const ALL_KINDS: [ChangeKind; 6] = [
    ChangeKind::ClassAdded,
    ChangeKind::ClassRemoved,
    ChangeKind::DirectAdd,
    ChangeKind::DirectRemove,
    ChangeKind::IndirectAdd,
    ChangeKind::IndirectRemove,
];

pub fn run(old_path: &Path, new_path: &Path, analysis: &Analysis) -> CliResult<Value> {
    let old = read_artifact_file(old_path)
        .map_err(|e| CliError::Input(format!("old: {}: {e}", old_path.display())))?;
    let new = read_artifact_file(new_path)
        .map_err(|e| CliError::Input(format!("new: {}: {e}", new_path.display())))?;

    let g_old = build_graph(&old, &analysis.platform);
    let g_new = build_graph(&new, &analysis.platform);
    let events = diff_serializability(&g_old, &g_new);

    let mut counts = serde_json::Map::new();
    for kind in ALL_KINDS {
        let key = serde_json::to_value(kind).expect("kind serializes");
        let n = events.iter().filter(|e| e.kind == kind).count();
        counts.insert(key.as_str().expect("kind is a string").to_string(), json!(n));
    }

    let config = RunConfig::bare("gadgetry/diff@1", &analysis.platform_id);
    Ok(json!({
        "schema": config.schema,
        "config_digest": config.digest(),
        "old": file_label(old_path),
        "new": file_label(new_path),
        "event_count": events.len(),
        "counts_by_kind": Value::Object(counts),
        "events": serde_json::to_value(&events).expect("events serialize"),
    }))
}
