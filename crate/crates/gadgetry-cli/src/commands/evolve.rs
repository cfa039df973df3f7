//! `evolve`: correlation and dataset labelling over a release-history table.
//! Input rows carry (dependency, version, release date, serializable count)
//! plus an optional count of marker-membership changes observed at that release.

use std::collections::BTreeMap;
use std::path::Path;

use gadgetry::evolution::{
    build_series, correlation_report, overall_correlation, summarize, classify_dataset, Date,
    DatasetLabel, EvolutionError, VersionSeries,
};
use gadgetry::hierarchy::{ChangeEvent, ChangeKind};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{file_label, Analysis, RunConfig};
use crate::error::{CliError, CliResult};

#[derive(Debug, Deserialize)]
struct Row {
    dependency: String,
    version: String,
    release_date: String,
    serializable_count: u64,
    #[serde(default)]
    marker_changes: u64,
}

fn read_rows(path: &Path) -> CliResult<Vec<Row>> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default();
    match ext.as_str() {
        "csv" => {
            let mut reader = csv::Reader::from_path(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            let mut rows = Vec::new();
            for record in reader.deserialize::<Row>() {
                rows.push(record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?);
            }
            Ok(rows)
        }
        "json" => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        other => Err(CliError::Input(format!(
            "{}: unsupported table format {other:?}, expected .csv or .json",
            path.display()
        ))),
    }
}

fn labels_of(label: &DatasetLabel) -> Vec<Value> {
    label
        .labels
        .iter()
        .map(|d| serde_json::to_value(d).expect("dataset label serializes"))
        .collect()
}

fn parse_years(spec: &str) -> CliResult<(i32, i32)> {
    let bad = || CliError::Usage(format!("bad year range {spec:?}, expected FROM-TO"));
    let (a, b) = spec.split_once('-').ok_or_else(bad)?;
    let from: i32 = a.trim().parse().map_err(|_| bad())?;
    let to: i32 = b.trim().parse().map_err(|_| bad())?;
    if from > to {
        return Err(bad());
    }
    Ok((from, to))
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    input: &Path,
    analysis: &Analysis,
    now_year: Option<i32>,
    samples: usize,
    seed: u64,
    years: &Option<String>,
) -> CliResult<Value> {
    let rows = read_rows(input)?;
    if rows.is_empty() {
        return Err(CliError::Input(format!(
            "{}: the table holds no rows",
            input.display()
        )));
    }

    let mut grouped: BTreeMap<String, Vec<Row>> = BTreeMap::new();
    for row in rows {
        grouped.entry(row.dependency.clone()).or_default().push(row);
    }

    let mut max_year = i32::MIN;
    let mut min_year = i32::MAX;
    let mut series_list: Vec<VersionSeries> = Vec::new();
    let mut events_list: Vec<Vec<Vec<ChangeEvent>>> = Vec::new();
    for rows in grouped.values() {
        let mut points = Vec::with_capacity(rows.len());
        let mut events: Vec<Vec<ChangeEvent>> = Vec::with_capacity(rows.len());
        for row in rows {
            let date = Date::parse(&row.release_date)
                .map_err(|e| CliError::Input(format!("{}: {e}", row.dependency)))?;
            max_year = max_year.max(date.year);
            min_year = min_year.min(date.year);
            points.push((row.version.clone(), date, row.serializable_count));
            events.push(
                (0..row.marker_changes)
                    .map(|_| ChangeEvent {
                        kind: ChangeKind::DirectAdd,
                        class_name: row.version.clone(),
                        cause_class: None,
                    })
                    .collect(),
            );
        }
        series_list.push(build_series(&rows[0].dependency, points));
        events_list.push(events);
    }

    let now_year = now_year.unwrap_or(max_year);
    let (from_year, to_year) = match years {
        Some(spec) => parse_years(spec)?,
        None => (min_year, max_year),
    };

    let mut dependency_rows: Vec<Value> = Vec::new();
    let mut labels: Vec<DatasetLabel> = Vec::new();
    for (series, events) in series_list.iter().zip(&events_list) {
        let report = correlation_report(series);
        let label = classify_dataset(series, events, now_year);
        dependency_rows.push(json!({
            "dependency": series.dependency,
            "point_count": series.points.len(),
            "correlation": report,
            "labels": labels_of(&label),
            "warnings": series.warnings,
        }));
        labels.push(label);
    }

    let summary = summarize(&labels);
    let (overall, overall_note) =
        match overall_correlation(&series_list, from_year..=to_year, samples, seed) {
            Ok(Some(rho)) => (json!(rho), Value::Null),
            Ok(None) => (Value::Null, json!("every sampled pair was degenerate")),
            Err(EvolutionError::EmptyAfterFilter) => {
                (Value::Null, json!("no dependency spans every year of the range"))
            }
            Err(e) => return Err(CliError::from(e)),
        };

    let mut config = RunConfig::bare("gadgetry/evolve@1", &analysis.platform_id);
    config.seed = Some(seed);
    config.samples = Some(samples);
    config.now_year = Some(now_year);

    Ok(json!({
        "schema": "gadgetry/evolve@1",
        "config_digest": config.digest(),
        "input": file_label(input),
        "now_year": now_year,
        "years": format!("{from_year}-{to_year}"),
        "dependencies": dependency_rows,
        "summary": summary,
        "overall_correlation": overall,
        "overall_note": overall_note,
    }))
}
