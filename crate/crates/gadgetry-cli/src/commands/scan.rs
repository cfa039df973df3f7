//! `scan`: per-class serializability statuses and the platform-interface
//! surface of one artifact.

use std::path::Path;

use gadgetry::archive::read_artifact_file;
use gadgetry::classfile::parse_class;
use gadgetry::hierarchy::{
    build_graph, jcl_interfaces_of_serializable, serializability, SerialStatus,
};
use serde_json::{json, Value};

use crate::config::{file_label, Analysis, RunConfig};
use crate::error::{CliError, CliResult};

pub fn run(artifact_path: &Path, analysis: &Analysis) -> CliResult<Value> {
    let artifact = read_artifact_file(artifact_path)?;

    // Malformed class bytes are an input failure; an archive with no classes
    // at all is a legitimate all-zero result.
    for (path, bytes) in artifact.class_entries() {
        parse_class(bytes).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    }

    let graph = build_graph(&artifact, &analysis.platform);
    let view = serializability(&graph);

    let mut not = 0u64;
    let mut direct = 0u64;
    let mut transitive = 0u64;
    let mut classes: Vec<Value> = Vec::new();
    for node in graph.artifact_nodes() {
        let status = view.status(&node.internal_name);
        match status {
            SerialStatus::Not => not += 1,
            SerialStatus::Direct => direct += 1,
            SerialStatus::Transitive => transitive += 1,
        }
        classes.push(json!({
            "name": node.internal_name,
            "status": serde_json::to_value(status).expect("status serializes"),
        }));
    }
    classes.sort_by_key(|c| c["name"].as_str().map(str::to_string));

    let jcl: Vec<String> = jcl_interfaces_of_serializable(&graph, &view).into_iter().collect();
    let config = RunConfig::bare("gadgetry/scan@1", &analysis.platform_id);

    Ok(json!({
        "schema": config.schema,
        "config_digest": config.digest(),
        "artifact": file_label(artifact_path),
        "class_count": not + direct + transitive,
        "status_counts": { "NOT": not, "DIRECT": direct, "TRANSITIVE": transitive },
        "serializable_count": direct + transitive,
        "jcl_interfaces": jcl,
        "classes": classes,
    }))
}
