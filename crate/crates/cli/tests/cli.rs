//! End-to-end checks of the `qha` binary: exit codes, output shapes, cache
//! behavior, and environment-variable handling. Every invocation runs with a
//! scrubbed environment and a per-test scratch directory, so tests are
//! independent and repeatable.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qha-cli-{}-{test}", std::process::id()));
    fs::create_dir_all(&dir).expect("scratch dir");
    dir
}

fn write(dir: &PathBuf, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).expect("write fixture");
    path
}

const POINT: &str = r#"{"vertices": 1, "arrows": []}"#;
const JORDAN: &str = r#"{"vertices": 1, "arrows": [[0, 0]]}"#;
const JORDAN_WEIGHTED: &str =
    r#"{"vertices": 1, "arrows": [[0, 0]], "weights": {"rank": 1, "per_arrow": [[1]]}}"#;
const LOOPS2: &str = r#"{"vertices": 1, "arrows": [[0, 0], [0, 0]]}"#;
const A2: &str = r#"{"vertices": 2, "arrows": [[0, 1]]}"#;
const KRONECKER2: &str = r#"{"vertices": 2, "arrows": [[0, 1], [0, 1]]}"#;
const KRONECKER3: &str = r#"{"vertices": 2, "arrows": [[0, 1], [0, 1], [0, 1]]}"#;

/// Run `qha` with the given arguments, isolated from the caller's cache and
/// thread settings; `HOME` points into the scratch directory so the default
/// cache location stays inside it.
fn qha(dir: &PathBuf, args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qha"));
    cmd.args(args)
        .env_remove("QHA_CACHE")
        .env_remove("QHA_THREADS")
        .env("HOME", dir);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Report text with the timing footer removed, for byte-comparisons.
fn strip_wall(text: &str) -> String {
    text.lines()
        .filter(|l| !l.contains("wall time"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn roots_of_the_loop_quiver_are_isotropic() {
    let dir = scratch("roots-jordan");
    let q = write(&dir, "jordan.json", JORDAN);
    let out = qha(&dir, &["roots", "--quiver", q.to_str().unwrap(), "--bound", "4"], &[]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("isotropic").count(), 4, "output:\n{text}");
    assert_eq!(text.matches("real").count(), 0);
}

#[test]
fn roots_of_the_two_vertex_path_are_the_two_units() {
    let dir = scratch("roots-a2");
    let q = write(&dir, "a2.json", A2);
    let out = qha(
        &dir,
        &["roots", "--quiver", q.to_str().unwrap(), "--bound", "2,2"],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.matches("real").count(), 2, "output:\n{text}");
    assert!(text.contains("1,0"), "output:\n{text}");
    assert!(text.contains("0,1"), "output:\n{text}");
}

#[test]
fn empty_quiver_file_is_a_usage_error() {
    let dir = scratch("roots-empty");
    let q = write(&dir, "empty.json", "");
    let out = qha(&dir, &["roots", "--quiver", q.to_str().unwrap(), "--bound", "2"], &[]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn malformed_bound_is_a_usage_error() {
    let dir = scratch("roots-badbound");
    let q = write(&dir, "jordan.json", JORDAN);
    let out = qha(&dir, &["roots", "--quiver", q.to_str().unwrap(), "--bound", "x"], &[]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

#[test]
fn count_polynomials_match_the_closed_forms() {
    let dir = scratch("kac-oracles");
    let cache = dir.join("counts.jsonl");
    let cache = cache.to_str().unwrap();
    for (file, json, dim, primes, expect) in [
        ("jordan.json", JORDAN, "1", Some("2,3,5"), "q"),
        ("k2.json", KRONECKER2, "1,1", None, "q + 1"),
        ("k3.json", KRONECKER3, "1,1", None, "q^2 + q + 1"),
    ] {
        let q = write(&dir, file, json);
        let mut args = vec!["kac", "--quiver", q.to_str().unwrap(), "--dim", dim, "--cache", cache];
        if let Some(p) = primes {
            args.extend(["--primes", p]);
        }
        let out = qha(&dir, &args, &[]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        assert_eq!(stdout(&out).trim(), expect);
    }
}

#[test]
fn unaffordable_count_exits_with_the_resource_code() {
    let dir = scratch("kac-limit");
    let q = write(&dir, "loops2.json", LOOPS2);
    let out = qha(&dir, &["kac", "--quiver", q.to_str().unwrap(), "--dim", "3"], &[]);
    assert_eq!(code(&out), 3, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("error:"));
}

#[test]
fn product_of_unit_constants_on_the_point_quiver_vanishes() {
    let dir = scratch("shuffle-mul-point");
    let q = write(&dir, "point.json", POINT);
    let out = qha(
        &dir,
        &[
            "shuffle", "mul", "1", "1",
            "--quiver", q.to_str().unwrap(),
            "--dim", "1", "--dim", "1",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0");
}

#[test]
fn weighted_loop_product_needs_the_asymmetric_override() {
    let dir = scratch("shuffle-mul-gate");
    let q = write(&dir, "jordan_w.json", JORDAN_WEIGHTED);
    let base = [
        "shuffle", "mul", "1", "1",
        "--quiver", q.to_str().unwrap(),
        "--dim", "1", "--dim", "1",
    ];
    let gated = qha(&dir, &base, &[]);
    assert_eq!(code(&gated), 1, "stderr: {}", stderr(&gated));

    let mut args = base.to_vec();
    args.push("--allow-asymmetric");
    let overridden = qha(&dir, &args, &[]);
    assert_eq!(code(&overridden), 0, "stderr: {}", stderr(&overridden));
    assert_eq!(stdout(&overridden).trim(), "2");
}

#[test]
fn coproduct_splits_the_power_sum() {
    let dir = scratch("shuffle-comul");
    let q = write(&dir, "point.json", POINT);
    let out = qha(
        &dir,
        &[
            "shuffle", "comul", "x[1,1] + x[1,2]",
            "--quiver", q.to_str().unwrap(),
            "--dim", "2", "--split", "1", "--split", "1",
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "x[2,1,1]^2 - x[1,1,1]^2");
}

#[test]
fn residue_needs_a_positive_truncation_order() {
    let dir = scratch("shuffle-residue");
    let q = write(&dir, "point.json", POINT);
    let base = [
        "shuffle", "residue",
        "--quiver", q.to_str().unwrap(),
        "--num", "1",
        "--den", "x[2,1,1] - x[1,1,1]",
        "--dim", "1", "--dim", "1",
        "--var", "x[2,1,1]",
    ];

    let ok = qha(&dir, &base, &[]);
    assert_eq!(code(&ok), 0, "stderr: {}", stderr(&ok));
    assert_eq!(stdout(&ok).trim(), "1");

    let mut args = base.to_vec();
    args.extend(["--order", "0"]);
    let insufficient = qha(&dir, &args, &[]);
    assert_eq!(code(&insufficient), 2, "stderr: {}", stderr(&insufficient));
    assert!(stderr(&insufficient).contains("order"), "stderr: {}", stderr(&insufficient));
}

#[test]
fn bracket_layer_table_matches_the_rank_two_simple_algebra() {
    let dir = scratch("gkm-liedims");
    let q = write(&dir, "a2.json", A2);
    let out = qha(
        &dir,
        &["gkm", "lie-dims", "--quiver", q.to_str().unwrap(), "--cutoff", "2,2"],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let data_rows: Vec<&str> = text
        .lines()
        .skip(2)
        .filter(|l| !l.trim().is_empty())
        .collect();
    assert_eq!(data_rows.len(), 3, "output:\n{text}");
    for degree in ["1,0", "0,1", "1,1"] {
        let row = data_rows
            .iter()
            .find(|l| l.starts_with(degree))
            .unwrap_or_else(|| panic!("no row for {degree} in:\n{text}"));
        assert!(row.trim_end().ends_with('1'), "row: {row}");
    }
}

#[test]
fn root_multiplicity_of_the_kronecker_imaginary_root_is_one() {
    let dir = scratch("gkm-rootmult");
    let q = write(&dir, "k2.json", KRONECKER2);
    let out = qha(
        &dir,
        &["gkm", "root-mult", "--quiver", q.to_str().unwrap(), "--dim", "1,1"],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "1");
}

#[test]
fn count_character_of_the_loop_quiver_lands_in_negative_half_degree() {
    let dir = scratch("gkm-bpschar");
    let q = write(&dir, "jordan.json", JORDAN);
    let cache = dir.join("counts.jsonl");
    let out = qha(
        &dir,
        &[
            "gkm", "bps-char", "--quiver", q.to_str().unwrap(),
            "--dim", "1", "--cache", cache.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "q^(-1)");
}

#[test]
fn verification_suite_passes_deterministically_with_a_warm_cache() {
    let dir = scratch("verify-kac");
    let cache = dir.join("counts.jsonl");
    let args = ["verify", "kac", "--cache", cache.to_str().unwrap()];

    let cold = qha(&dir, &args, &[]);
    assert_eq!(code(&cold), 0, "stderr: {}", stderr(&cold));
    assert!(stdout(&cold).contains("suite kac: PASS"));
    assert!(cache.exists(), "cache file written on the cold run");

    let warm = qha(&dir, &args, &[]);
    assert_eq!(code(&warm), 0, "stderr: {}", stderr(&warm));
    assert_eq!(
        strip_wall(&stdout(&cold)),
        strip_wall(&stdout(&warm)),
        "cache hits changed the report body"
    );
}

#[test]
fn roundtrip_suite_passes() {
    let dir = scratch("verify-multprop");
    let out = qha(&dir, &["verify", "multprop"], &[]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("suite multprop: PASS"));
}

#[test]
fn unknown_suite_name_is_a_usage_error() {
    let dir = scratch("verify-unknown");
    let out = qha(&dir, &["verify", "no-such-suite"], &[]);
    assert_eq!(code(&out), 2, "stderr: {}", stderr(&out));
}

#[test]
fn json_report_is_a_parsable_array_with_the_wall_field() {
    let dir = scratch("format-json");
    let out = qha(&dir, &["--format", "json", "verify", "multprop"], &[]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    let arr = v.as_array().expect("array of suite reports");
    assert_eq!(arr.len(), 1);
    assert_eq!(arr[0]["suite"], "multprop");
    assert!(arr[0]["wall_ms"].is_number());
    assert!(arr[0]["checks"].is_array());
}

#[test]
fn csv_output_has_a_header_and_data_row() {
    let dir = scratch("format-csv");
    let q = write(&dir, "k2.json", KRONECKER2);
    let cache = dir.join("counts.jsonl");
    let out = qha(
        &dir,
        &[
            "--format", "csv",
            "kac", "--quiver", q.to_str().unwrap(),
            "--dim", "1,1", "--cache", cache.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("dim,count-polynomial"));
    assert_eq!(lines.next(), Some("\"1,1\",q + 1"));
}

#[test]
fn unparsable_thread_environment_is_a_usage_error() {
    let dir = scratch("threads-env");
    let good = qha(&dir, &["verify", "multprop"], &[("QHA_THREADS", "2")]);
    assert_eq!(code(&good), 0, "stderr: {}", stderr(&good));

    let bad = qha(&dir, &["verify", "multprop"], &[("QHA_THREADS", "abc")]);
    assert_eq!(code(&bad), 2, "stderr: {}", stderr(&bad));
}

#[test]
fn cache_flag_takes_precedence_over_the_environment() {
    let dir = scratch("cache-precedence");
    let q = write(&dir, "jordan.json", JORDAN);
    let flag_cache = dir.join("flag.jsonl");
    let env_cache = dir.join("env.jsonl");

    let out = qha(
        &dir,
        &[
            "kac", "--quiver", q.to_str().unwrap(), "--dim", "1",
            "--cache", flag_cache.to_str().unwrap(),
        ],
        &[("QHA_CACHE", env_cache.to_str().unwrap())],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(flag_cache.exists(), "--cache path used");
    assert!(!env_cache.exists(), "environment path ignored when the flag is set");

    let out = qha(
        &dir,
        &["kac", "--quiver", q.to_str().unwrap(), "--dim", "1"],
        &[("QHA_CACHE", env_cache.to_str().unwrap())],
    );
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(env_cache.exists(), "environment path used without the flag");
}

#[test]
fn default_cache_lands_in_the_home_dot_directory() {
    let dir = scratch("cache-default");
    let q = write(&dir, "jordan.json", JORDAN);
    let out = qha(&dir, &["kac", "--quiver", q.to_str().unwrap(), "--dim", "1"], &[]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(
        dir.join(".qha").join("counts.jsonl").exists(),
        "default cache under $HOME/.qha"
    );
}
