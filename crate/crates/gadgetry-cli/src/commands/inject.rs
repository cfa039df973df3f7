//! `inject`: apply one modification pattern (or the staged `all` pipeline)
//! and write the modified archive next to a JSON report.

use std::path::{Path, PathBuf};

use gadgetry::archive::read_artifact_file;
use gadgetry::inject::{
    apply_all, pattern_final_properties, pattern_interface_reachability,
    pattern_transitive_serializable,
};
use serde_json::{json, Value};

use crate::config::{file_label, Analysis, RunConfig};
use crate::error::CliResult;
use crate::PatternArg;

pub fn default_output(input: &Path, pattern: PatternArg) -> PathBuf {
    let stem = input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = input
        .extension()
        .map(|e| e.to_string_lossy().into_owned())
        .unwrap_or_else(|| "jar".to_string());
    input.with_file_name(format!("{stem}.{}.{ext}", pattern.suffix()))
}

pub fn run(
    artifact_path: &Path,
    pattern: PatternArg,
    caller_name: &str,
    out_artifact: &Option<PathBuf>,
    analysis: &Analysis,
) -> CliResult<Value> {
    let artifact = read_artifact_file(artifact_path)?;
    let (modified, report) = match pattern {
        PatternArg::One => pattern_transitive_serializable(&artifact, &analysis.platform)?,
        PatternArg::Two => pattern_final_properties(&artifact, &analysis.platform)?,
        PatternArg::Three => {
            pattern_interface_reachability(&artifact, &analysis.platform, caller_name)?
        }
        PatternArg::All => apply_all(&artifact, &analysis.platform, caller_name)?,
    };

    let out_path =
        out_artifact.clone().unwrap_or_else(|| default_output(artifact_path, pattern));
    std::fs::write(&out_path, modified.write()?)?;

    let mut config = RunConfig::bare("gadgetry/inject@1", &analysis.platform_id);
    config.pattern = Some(pattern.suffix().to_string());
    config.caller_name = matches!(pattern, PatternArg::Three | PatternArg::All)
        .then(|| caller_name.to_string());

    Ok(json!({
        "schema": config.schema,
        "config_digest": config.digest(),
        "artifact": file_label(artifact_path),
        "output_artifact": file_label(&out_path),
        "pattern": pattern.suffix(),
        "report": serde_json::to_value(&report).expect("report serializes"),
    }))
}
