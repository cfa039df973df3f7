//! End-to-end behavior of the `gadgetry` binary: exit codes, report shapes,
//! artifact outputs, and determinism across reruns.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gadgetry::archive::{Artifact, ArtifactFormat};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_gadgetry")
}

fn run<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn json_of(output: &Output) -> Value {
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

fn empty_jar(dir: &Path) -> PathBuf {
    let artifact = Artifact::from_entries(
        ArtifactFormat::Jar,
        vec![(
            "META-INF/MANIFEST.MF".to_string(),
            b"Manifest-Version: 1.0\r\n\r\n".to_vec(),
        )],
    )
    .expect("empty artifact builds");
    write_jar(dir, "empty.jar", &artifact)
}

#[test]
fn scan_reports_statuses_and_implemented_platform_interfaces() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "spring.jar", &gadgetry_fixtures::spring_beans());

    let report = json_of(&run(["scan", jar.to_str().unwrap()]));
    assert_eq!(report["schema"], "gadgetry/scan@1");
    assert_eq!(report["class_count"], 2);
    assert_eq!(report["status_counts"]["DIRECT"], 1);
    assert_eq!(report["status_counts"]["NOT"], 1);
    assert_eq!(report["status_counts"]["TRANSITIVE"], 0);
    assert_eq!(report["serializable_count"], 1);
    let jcl: Vec<&str> = report["jcl_interfaces"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(jcl.contains(&"java/lang/Runnable"), "jcl set: {jcl:?}");
    let classes = report["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 2);
    assert!(!report["config_digest"].as_str().unwrap().is_empty());
}

#[test]
fn scan_of_an_empty_archive_succeeds_with_zero_counts() {
    let dir = TempDir::new().unwrap();
    let jar = empty_jar(dir.path());

    let output = run(["scan", jar.to_str().unwrap()]);
    assert!(output.status.success());
    let report: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["class_count"], 0);
    assert_eq!(report["serializable_count"], 0);
    assert_eq!(report["status_counts"]["NOT"], 0);
}

#[test]
fn scan_of_a_non_archive_exits_with_the_input_error_code() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("junk.jar");
    std::fs::write(&path, b"plainly not a zip archive").unwrap();

    let output = run(["scan", path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("input:"), "stderr: {stderr}");
}

#[test]
fn scan_of_a_missing_file_exits_with_the_input_error_code() {
    let output = run(["scan", "/nonexistent/never.jar"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let output = run(["scan"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(["no-such-command"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(["--help"]);
    assert_eq!(output.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&output.stdout).contains("detect"));
}

#[test]
fn diff_groups_membership_changes_by_kind() {
    let dir = TempDir::new().unwrap();
    let [(before, after), _, _] = gadgetry_fixtures::membership_change_pairs();
    let old = write_jar(dir.path(), "old.jar", &before);
    let new = write_jar(dir.path(), "new.jar", &after);

    let report = json_of(&run(["diff", old.to_str().unwrap(), new.to_str().unwrap()]));
    assert_eq!(report["schema"], "gadgetry/diff@1");
    let counts = report["counts_by_kind"].as_object().unwrap();
    assert_eq!(counts.len(), 6, "all six kinds listed even when zero");
    assert_eq!(counts["CLASS_ADDED"], 1);
    assert_eq!(counts["DIRECT_ADD"], 0);
    let events = report["events"].as_array().unwrap();
    assert_eq!(events.len(), 1);
    assert_eq!(events[0]["kind"], "CLASS_ADDED");
    assert_eq!(events[0]["class_name"], "ex/Payload");
}

#[test]
fn inject_writes_the_modified_archive_beside_the_input() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "spring.jar", &gadgetry_fixtures::spring_beans());

    let report = json_of(&run(["inject", jar.to_str().unwrap(), "--pattern", "3"]));
    assert_eq!(report["schema"], "gadgetry/inject@1");
    assert_eq!(report["pattern"], "p3");
    let out_path = dir.path().join("spring.p3.jar");
    assert_eq!(report["output_artifact"], "spring.p3.jar");
    assert!(out_path.is_file(), "default sibling output exists");
    assert_eq!(report["report"]["caller_interfaces"]["count"], 1);
    assert_eq!(
        report["report"]["caller_interfaces"]["list"][0],
        "java/lang/Runnable"
    );

    let modified = gadgetry::archive::read_artifact_file(&out_path).expect("output parses");
    assert!(modified.contains("support/Caller.class"));
}

#[test]
fn detect_then_delta_reveal_only_the_unlocked_chain() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "spring.jar", &gadgetry_fixtures::spring_beans());
    let modified = dir.path().join("spring.p3.jar");

    let report = json_of(&run(["detect", jar.to_str().unwrap()]));
    assert_eq!(report["schema"], "gadgetry/detect@1");
    assert_eq!(report["total_chains"], 0, "pristine artifact has no kept chains");
    assert_eq!(report["sink_mode"], "kept");
    assert_eq!(report["max_depth"], 12);

    json_of(&run(["inject", jar.to_str().unwrap(), "--pattern", "3"]));
    let after = json_of(&run(["detect", modified.to_str().unwrap()]));
    assert_eq!(after["total_chains"], 1);

    let delta = json_of(&run([
        "delta",
        jar.to_str().unwrap(),
        modified.to_str().unwrap(),
    ]));
    assert_eq!(delta["schema"], "gadgetry/delta@1");
    assert_eq!(delta["total_new_chains"], 1);
    let pairs = delta["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    let chain = &pairs[0]["new_chains"][0];
    let display = chain["display"].as_str().unwrap();
    assert_eq!(
        display,
        "support/Caller.hashCode -> \
         org/springframework/beans/factory/support/DisposableBeanAdapter.run -> \
         org/springframework/beans/factory/support/DisposableBeanAdapter.destroy -> \
         org/springframework/beans/factory/support/DisposableBeanAdapter.invokeCustomDestroyMethod -> \
         java/lang/reflect/Method.invoke"
    );
}

#[test]
fn delta_accepts_prior_detect_reports_and_rejects_mismatched_configs() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "spring.jar", &gadgetry_fixtures::spring_beans());
    let modified = dir.path().join("spring.p3.jar");
    json_of(&run(["inject", jar.to_str().unwrap(), "--pattern", "3"]));

    let before_report = dir.path().join("before.json");
    let after_report = dir.path().join("after.json");
    let output = run([
        "detect",
        jar.to_str().unwrap(),
        "--out",
        before_report.to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let output = run([
        "detect",
        modified.to_str().unwrap(),
        "--out",
        after_report.to_str().unwrap(),
    ]);
    assert!(output.status.success());

    let delta = json_of(&run([
        "delta",
        before_report.to_str().unwrap(),
        after_report.to_str().unwrap(),
    ]));
    assert_eq!(delta["total_new_chains"], 1);

    // The stored reports were produced at depth 12; asking for depth 5 now
    // would compare runs under different configurations.
    let output = run([
        "delta",
        before_report.to_str().unwrap(),
        after_report.to_str().unwrap(),
        "--max-depth",
        "5",
    ]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("configuration mismatch"), "stderr: {stderr}");
}

#[test]
fn delta_pairs_directory_corpora_by_artifact_name() {
    let dir = TempDir::new().unwrap();
    let orig = dir.path().join("orig");
    let modc = dir.path().join("mod");
    std::fs::create_dir_all(&orig).unwrap();
    std::fs::create_dir_all(&modc).unwrap();

    write_jar(&orig, "a.jar", &gadgetry_fixtures::spring_beans());
    write_jar(&orig, "b.jar", &gadgetry_fixtures::serialization_free());
    write_jar(&modc, "b.jar", &gadgetry_fixtures::serialization_free());
    write_jar(&modc, "only-new.jar", &gadgetry_fixtures::serialization_free());
    let src = write_jar(dir.path(), "src.jar", &gadgetry_fixtures::spring_beans());
    let injected = modc.join("a.jar");
    json_of(&run([
        "inject",
        src.to_str().unwrap(),
        "--pattern",
        "3",
        "--out-artifact",
        injected.to_str().unwrap(),
    ]));

    let delta = json_of(&run([
        "delta",
        orig.to_str().unwrap(),
        modc.to_str().unwrap(),
        "--workers",
        "2",
    ]));
    let pairs = delta["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 2);
    assert_eq!(pairs[0]["name"], "a.jar");
    assert_eq!(pairs[0]["new_chain_count"], 1);
    assert_eq!(pairs[1]["name"], "b.jar");
    assert_eq!(pairs[1]["new_chain_count"], 0);
    assert_eq!(delta["total_new_chains"], 1);
    assert_eq!(delta["unpaired_modified"][0], "only-new.jar");
    assert!(delta["unpaired_original"].as_array().unwrap().is_empty());
}

#[test]
fn detect_widens_to_filtered_sinks_on_request() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "openjpa.jar", &gadgetry_fixtures::openjpa());
    let all_jar = dir.path().join("openjpa.all.jar");
    json_of(&run(["inject", jar.to_str().unwrap(), "--pattern", "all"]));

    let kept = json_of(&run(["detect", all_jar.to_str().unwrap()]));
    let wide = json_of(&run(["detect", all_jar.to_str().unwrap(), "--all-sinks"]));
    assert_eq!(kept["sink_mode"], "kept");
    assert_eq!(wide["sink_mode"], "all");
    let kept_n = kept["total_chains"].as_u64().unwrap();
    let wide_n = wide["total_chains"].as_u64().unwrap();
    assert!(kept_n >= 1);
    assert!(wide_n > kept_n, "filtered tier adds chains: {kept_n} vs {wide_n}");
}

#[test]
fn evolve_labels_release_histories_and_reports_correlations() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("history.csv");
    std::fs::write(
        &csv,
        "dependency,version,release_date,serializable_count,marker_changes\n\
         alpha,1.0.0,2023-01-15,10,0\n\
         alpha,1.1.0,2023-11-02,12,0\n\
         alpha,2.0.0,2024-06-30,14,0\n\
         alpha,2.1.0,2025-03-10,16,1\n\
         beta,0.1,2015-03-01,5,0\n\
         beta,0.2,2015-09-01,5,0\n\
         beta,0.3,2016-02-01,5,0\n",
    )
    .unwrap();

    let report = json_of(&run(["evolve", csv.to_str().unwrap()]));
    assert_eq!(report["schema"], "gadgetry/evolve@1");
    assert_eq!(report["now_year"], 2025);

    let deps = report["dependencies"].as_array().unwrap();
    assert_eq!(deps.len(), 2);
    assert_eq!(deps[0]["dependency"], "alpha");
    let alpha_labels: Vec<&str> = deps[0]["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(alpha_labels, ["A", "B", "C", "D"]);
    assert!(deps[0]["correlation"]["rho_date"].as_f64().unwrap() > 0.9);

    assert_eq!(deps[1]["dependency"], "beta");
    let beta_labels: Vec<&str> = deps[1]["labels"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(beta_labels, ["A"]);
    assert!(deps[1]["correlation"]["rho_date"].is_null(), "constant counts");

    assert_eq!(report["summary"]["total"], 2);
    assert_eq!(report["summary"]["counts"]["A"], 2);
    assert_eq!(report["summary"]["counts"]["D"], 1);

    // No dependency releases in every year between 2015 and 2025.
    assert!(report["overall_correlation"].is_null());
    assert_eq!(
        report["overall_note"],
        "no dependency spans every year of the range"
    );

    // Restricting the window to years alpha fully covers yields a number.
    let windowed = json_of(&run([
        "evolve",
        csv.to_str().unwrap(),
        "--years",
        "2023-2025",
        "--seed",
        "7",
    ]));
    assert!(windowed["overall_correlation"].as_f64().unwrap() > 0.0);
}

#[test]
fn reports_are_byte_identical_across_reruns() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "openjpa.jar", &gadgetry_fixtures::openjpa());
    let all_jar = dir.path().join("openjpa.all.jar");
    json_of(&run(["inject", jar.to_str().unwrap(), "--pattern", "all"]));

    let csv = dir.path().join("history.csv");
    std::fs::write(
        &csv,
        "dependency,version,release_date,serializable_count\n\
         alpha,1.0.0,2023-01-15,10\n\
         alpha,1.1.0,2024-11-02,12\n\
         alpha,2.0.0,2025-06-30,17\n",
    )
    .unwrap();

    let reruns: Vec<Vec<String>> = vec![
        vec!["scan".into(), jar.to_str().unwrap().into()],
        vec!["detect".into(), all_jar.to_str().unwrap().into()],
        vec![
            "evolve".into(),
            csv.to_str().unwrap().into(),
            "--seed".into(),
            "42".into(),
        ],
    ];
    for args in reruns {
        let first = run(&args);
        let second = run(&args);
        assert!(first.status.success());
        assert_eq!(first.stdout, second.stdout, "rerun differs for {args:?}");
    }
}

#[test]
fn table_format_renders_the_same_report_as_text() {
    let dir = TempDir::new().unwrap();
    let jar = write_jar(dir.path(), "spring.jar", &gadgetry_fixtures::spring_beans());

    let output = run(["scan", jar.to_str().unwrap(), "--format", "table"]);
    assert!(output.status.success());
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("schema: gadgetry/scan@1"), "table text: {text}");
    assert!(text.contains("class_count: 2"));
    assert!(!text.trim_start().starts_with('{'), "table mode is not raw JSON");
}
