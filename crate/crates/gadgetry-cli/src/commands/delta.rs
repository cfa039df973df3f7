//! `delta`: newly appearing chains between an original and a modified state.
//! Each side is an artifact, a directory corpus, or a prior `detect` report;
//! report sides must have been produced under the same configuration.

use std::path::Path;

use gadgetry::detect::{diff_chains_with_caller, GadgetChain};
use serde_json::{json, Value};

use crate::commands::{artifact_paths, chains_value, detect_over, DetectOutcome};
use crate::config::{detect_config, file_label, Analysis};
use crate::error::{CliError, CliResult};

fn is_report_path(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .map(|e| e.eq_ignore_ascii_case("json"))
            .unwrap_or(false)
}

fn load_report(path: &Path, expected_digest: &str) -> CliResult<Vec<DetectOutcome>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;

    let schema = value["schema"].as_str().unwrap_or_default();
    if schema != "gadgetry/detect@1" {
        return Err(CliError::Input(format!(
            "{}: expected a gadgetry/detect@1 report, found schema {schema:?}",
            path.display()
        )));
    }
    let digest = value["config_digest"].as_str().unwrap_or_default();
    if digest != expected_digest {
        return Err(CliError::Input(format!(
            "configuration mismatch: report {} was produced under digest {digest} \
             but this run uses {expected_digest}",
            path.display()
        )));
    }

    let artifacts = value["artifacts"].as_array().ok_or_else(|| {
        CliError::Input(format!("{}: report lacks an artifacts array", path.display()))
    })?;
    let mut outcomes = Vec::with_capacity(artifacts.len());
    for row in artifacts {
        let name = row["name"].as_str().unwrap_or_default().to_string();
        let chain_rows = row["chains"].as_array().cloned().unwrap_or_default();
        let mut chains = Vec::with_capacity(chain_rows.len());
        for c in chain_rows {
            let chain: GadgetChain = serde_json::from_value(c)
                .map_err(|e| CliError::Input(format!("{}: bad chain: {e}", path.display())))?;
            chains.push(chain);
        }
        outcomes.push(DetectOutcome { name, chains });
    }
    Ok(outcomes)
}

fn load_side(
    path: &Path,
    analysis: &Analysis,
    max_depth: usize,
    all_sinks: bool,
    workers: usize,
    expected_digest: &str,
) -> CliResult<Vec<DetectOutcome>> {
    if is_report_path(path) {
        load_report(path, expected_digest)
    } else {
        detect_over(&artifact_paths(path)?, analysis, max_depth, all_sinks, workers)
    }
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    original: &Path,
    modified: &Path,
    analysis: &Analysis,
    max_depth: usize,
    all_sinks: bool,
    caller_name: &str,
    workers: usize,
) -> CliResult<Value> {
    let config = detect_config(analysis, max_depth, all_sinks);
    let digest = config.digest();

    let old = load_side(original, analysis, max_depth, all_sinks, workers, &digest)?;
    let new = load_side(modified, analysis, max_depth, all_sinks, workers, &digest)?;
    let caller_internal = caller_name.replace('.', "/");

    // Two single outcomes pair positionally; corpora pair by artifact label.
    let mut pairs: Vec<(String, &DetectOutcome, &DetectOutcome)> = Vec::new();
    let mut unpaired_original: Vec<String> = Vec::new();
    let mut unpaired_modified: Vec<String> = Vec::new();
    if old.len() == 1 && new.len() == 1 {
        pairs.push((new[0].name.clone(), &old[0], &new[0]));
    } else {
        for o in &old {
            match new.iter().find(|n| n.name == o.name) {
                Some(n) => pairs.push((o.name.clone(), o, n)),
                None => unpaired_original.push(o.name.clone()),
            }
        }
        for n in &new {
            if !old.iter().any(|o| o.name == n.name) {
                unpaired_modified.push(n.name.clone());
            }
        }
    }

    let mut rows: Vec<Value> = Vec::new();
    let mut total_new = 0usize;
    for (name, o, n) in &pairs {
        let fresh = diff_chains_with_caller(&o.chains, &n.chains, &caller_internal);
        total_new += fresh.len();
        rows.push(json!({
            "name": name,
            "original_chain_count": o.chains.len(),
            "modified_chain_count": n.chains.len(),
            "new_chain_count": fresh.len(),
            "new_chains": chains_value(&fresh),
        }));
    }

    Ok(json!({
        "schema": "gadgetry/delta@1",
        "config_digest": digest,
        "caller_name": caller_internal,
        "original": file_label(original),
        "modified": file_label(modified),
        "pairs": rows,
        "total_new_chains": total_new,
        "unpaired_original": unpaired_original,
        "unpaired_modified": unpaired_modified,
    }))
}
