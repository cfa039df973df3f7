//! `detect`: gadget-chain search over one artifact or a directory corpus.

use std::path::Path;

use serde_json::{json, Value};

use crate::commands::{artifact_paths, chains_value, detect_over};
use crate::config::{detect_config, Analysis};
use crate::error::CliResult;

pub fn run(
    path: &Path,
    analysis: &Analysis,
    max_depth: usize,
    all_sinks: bool,
    workers: usize,
) -> CliResult<Value> {
    let paths = artifact_paths(path)?;
    let outcomes = detect_over(&paths, analysis, max_depth, all_sinks, workers)?;

    let total: usize = outcomes.iter().map(|o| o.chains.len()).sum();
    let artifacts: Vec<Value> = outcomes
        .iter()
        .map(|o| {
            json!({
                "name": o.name,
                "chain_count": o.chains.len(),
                "chains": chains_value(&o.chains),
            })
        })
        .collect();

    let config = detect_config(analysis, max_depth, all_sinks);
    Ok(json!({
        "schema": config.schema,
        "config_digest": config.digest(),
        "max_depth": max_depth,
        "sink_mode": if all_sinks { "all" } else { "kept" },
        "artifacts": artifacts,
        "total_chains": total,
    }))
}
