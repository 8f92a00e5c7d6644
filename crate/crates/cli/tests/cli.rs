//! End-to-end checks of the command layer: JSON shapes, CSV schema and
//! reproducibility, exit-code classification, and agreement with the library
//! oracles.

use std::process::Command;

use catassoc::caterpillar::Caterpillar;
use catassoc::oracle;
use catassoc_cli::{
    cmd_bounds, cmd_experiment, cmd_oracle_diameter, cmd_transform, cmd_worst_case, CliError,
    EXPERIMENT_CSV_HEADER,
};

fn is_usage(e: &CliError) -> bool {
    matches!(e, CliError::Usage(_))
}

#[test]
fn bounds_reports_entropy_and_envelope() {
    let out = cmd_bounds(r#"{"legs":[0,0,0]}"#).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], 3);
    assert_eq!(v["m"], 0);
    assert_eq!(v["entropy"], 0.0);
    assert_eq!(v["entropy_plus_one"], 1.0);
    assert_eq!(v["envelope"]["lower"], 2);
    assert_eq!(v["envelope"]["upper"], 3);
    assert_eq!(v["wilber_lower_bound"], 0);

    let out = cmd_bounds(r#"{"legs":[1,1,1,1]}"#).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["entropy"], 2.0);
    // quarter-entropy composition: ceil(1/4 * 2 * 4) = 2
    assert!(v["wilber_lower_bound"].as_u64().unwrap() >= 2);
    assert!(v["constructive_upper_bound"].as_u64().unwrap() > 0);

    assert!(is_usage(&cmd_bounds(r#"{"legs":[]}"#).unwrap_err()));
    assert!(is_usage(&cmd_bounds("not json").unwrap_err()));
}

fn stg_json(root: &str, parents: &[(&str, &str)]) -> serde_json::Value {
    let mut map = serde_json::Map::new();
    for (c, p) in parents {
        map.insert(c.to_string(), serde_json::Value::String(p.to_string()));
    }
    serde_json::json!({
        "caterpillar": {"legs": [2, 0, 1, 1, 2]},
        "root": root,
        "parent": map,
    })
}

fn figure_pair() -> (serde_json::Value, serde_json::Value) {
    let stacked = stg_json(
        "l5.1",
        &[
            ("l4.1", "l5.1"),
            ("l1.1", "l4.1"),
            ("l5.2", "l1.1"),
            ("l1.2", "l5.2"),
            ("l3.1", "l1.2"),
            ("s2", "l3.1"),
            ("s1", "s2"),
            ("s4", "s2"),
            ("s3", "s4"),
            ("s5", "s4"),
        ],
    );
    let bound = stg_json(
        "s2",
        &[
            ("s1", "s2"),
            ("s4", "s2"),
            ("s3", "s4"),
            ("s5", "s4"),
            ("l1.1", "s1"),
            ("l1.2", "s1"),
            ("l3.1", "s3"),
            ("l4.1", "s4"),
            ("l5.1", "s5"),
            ("l5.2", "s5"),
        ],
    );
    (stacked, bound)
}

#[test]
fn transform_emits_verified_traces() {
    let (stacked, bound) = figure_pair();
    let pair = serde_json::json!({"t1": stacked, "t2": bound}).to_string();
    let out = cmd_transform(&pair).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let total = v["total"].as_u64().unwrap();
    let phases = &v["phase_lengths"];
    let phase_sum: u64 = ["reduce1", "settle1", "core", "settle2_inv", "reduce2_inv"]
        .iter()
        .map(|k| phases[k].as_u64().unwrap())
        .sum();
    assert_eq!(total, phase_sum);
    assert_eq!(v["rotations"].as_array().unwrap().len() as u64, total);

    // identical endpoints still produce a valid (round-trip) trace
    let pair = serde_json::json!({"t1": bound, "t2": bound}).to_string();
    assert!(cmd_transform(&pair).is_ok());

    // trees that fail the search-tree condition are rejected up front
    let invalid = serde_json::json!({
        "caterpillar": {"legs": [0, 0, 0]},
        "root": "s2",
        "parent": {"s1": "s2", "s3": "s1"},
    });
    let pair = serde_json::json!({"t1": invalid, "t2": invalid}).to_string();
    assert!(is_usage(&cmd_transform(&pair).unwrap_err()));

    // mismatched caterpillars are a usage error
    let other = serde_json::json!({
        "caterpillar": {"legs": [1]},
        "root": "l1.1",
        "parent": {"s1": "l1.1"},
    });
    let pair = serde_json::json!({"t1": stg_json("s2", &[
        ("s1", "s2"), ("s4", "s2"), ("s3", "s4"), ("s5", "s4"),
        ("l1.1", "s1"), ("l1.2", "s1"), ("l3.1", "s3"), ("l4.1", "s4"),
        ("l5.1", "s5"), ("l5.2", "s5"),
    ]), "t2": other})
    .to_string();
    assert!(is_usage(&cmd_transform(&pair).unwrap_err()));
}

#[test]
fn worst_case_reports_ratio() {
    let out = cmd_worst_case("[1,1,1,1]").unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["ratio"].as_f64().unwrap() >= 0.25);
    assert_eq!(v["sigma"].as_array().unwrap().len(), 4);

    let out = cmd_worst_case("[5]").unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["lambda_prime"], 5);
    assert!(v["ratio"].is_null());

    assert!(is_usage(&cmd_worst_case("[]").unwrap_err()));
    assert!(is_usage(&cmd_worst_case("[0,0]").unwrap_err()));
}

#[test]
fn oracle_diameter_matches_library() {
    let out = cmd_oracle_diameter(r#"{"legs":[0,0,0]}"#, 1000).unwrap();
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["diameter"], 2);
    assert_eq!(v["nodes"], 5);
    assert_eq!(v["edges"], 5);

    assert!(is_usage(
        &cmd_oracle_diameter(r#"{"legs":[0,0,0,0,0,0,0,0]}"#, 10).unwrap_err()
    ));
}

#[test]
fn experiment_path_column_matches_oracle() {
    let (csv, warnings) = cmd_experiment(&["path".into()], 3, 8, 42, 1, 1_000_000).unwrap();
    assert!(warnings.is_empty());
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), EXPERIMENT_CSV_HEADER);
    for (line, n) in lines.zip(3..=8usize) {
        let cols: Vec<&str> = split_csv(line);
        assert_eq!(cols[0], "path");
        assert_eq!(cols[2], n.to_string());
        let expected = oracle::diameter(&Caterpillar::path(n).unwrap(), 1_000_000)
            .unwrap()
            .diameter;
        assert_eq!(cols[8], expected.to_string(), "oracle column off at n={n}");
    }
}

#[test]
fn experiment_uniform_lower_bound_scales() {
    // budget 10_000 exercises both filled and blank oracle columns: uniform
    // caterpillars have 14, 176, 3232, 78384, 2366248 trees for n = 2..6
    let (csv, warnings) = cmd_experiment(&["uniform".into()], 2, 6, 42, 2, 10_000).unwrap();
    assert_eq!(warnings.len(), 2);
    let rows: Vec<Vec<String>> = csv
        .lines()
        .skip(1)
        .map(|l| split_csv(l).into_iter().map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    // least-squares fit of wilber_lb against n log2 n must be positive
    let mut num = 0.0;
    let mut den = 0.0;
    for row in &rows {
        let n: f64 = row[2].parse().unwrap();
        let lb: f64 = row[7].parse().unwrap();
        let x = n * n.log2();
        num += x * lb;
        den += x * x;
    }
    assert!(num / den > 0.0, "lower bound does not scale");
    // sandwich holds whenever the oracle column is present
    for row in &rows {
        if !row[8].is_empty() {
            let lb: usize = row[7].parse().unwrap();
            let diam: usize = row[8].parse().unwrap();
            let upper: usize = row[6].parse().unwrap();
            assert!(lb <= diam && diam <= upper, "sandwich broken: {row:?}");
        }
    }
    assert_eq!(rows.iter().filter(|r| !r[8].is_empty()).count(), 3);
}

#[test]
fn experiment_is_reproducible_and_parallel_safe() {
    let args: (&[String], usize, usize, u64, u64) =
        (&["path".into(), "heavy".into()], 2, 5, 42, 3000);
    let (a, _) = cmd_experiment(args.0, args.1, args.2, args.3, 1, args.4).unwrap();
    let (b, _) = cmd_experiment(args.0, args.1, args.2, args.3, 1, args.4).unwrap();
    let (c, _) = cmd_experiment(args.0, args.1, args.2, args.3, 4, args.4).unwrap();
    assert_eq!(a, b, "same inputs must give byte-identical CSV");
    assert_eq!(a, c, "worker count must not affect the output");

    assert!(is_usage(
        &cmd_experiment(&["spiral".into()], 2, 4, 42, 1, 100).unwrap_err()
    ));
    assert!(is_usage(
        &cmd_experiment(&["path".into()], 4, 2, 42, 1, 100).unwrap_err()
    ));
}

fn split_csv(line: &str) -> Vec<&str> {
    // fields containing commas are quoted; none of ours embed quotes
    let mut out = Vec::new();
    let mut rest = line;
    while !rest.is_empty() {
        if let Some(stripped) = rest.strip_prefix('"') {
            let end = stripped.find('"').expect("closing quote");
            out.push(&stripped[..end]);
            rest = stripped[end + 1..]
                .strip_prefix(',')
                .unwrap_or(&stripped[end + 1..]);
        } else {
            match rest.find(',') {
                Some(i) => {
                    out.push(&rest[..i]);
                    rest = &rest[i + 1..];
                    if rest.is_empty() {
                        out.push("");
                    }
                }
                None => {
                    out.push(rest);
                    rest = "";
                }
            }
        }
    }
    out
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_catassoc");

    let ok = Command::new(bin)
        .args(["bounds", "--caterpillar", r#"{"legs":[1,1]}"#])
        .output()
        .unwrap();
    assert!(ok.status.success());
    let v: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(v["m"], 2);

    let usage = Command::new(bin)
        .args(["bounds", "--caterpillar", "nope"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));

    let missing = Command::new(bin).args(["bounds"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    let out_file = std::env::temp_dir().join("catassoc-cli-test.csv");
    let _ = std::fs::remove_file(&out_file);
    let sweep = Command::new(bin)
        .args([
            "experiment",
            "--family",
            "path",
            "--n-min",
            "2",
            "--n-max",
            "4",
            "--budget",
            "100",
            "--out",
            out_file.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(sweep.status.success());
    let written = std::fs::read_to_string(&out_file).unwrap();
    assert!(written.starts_with(EXPERIMENT_CSV_HEADER));
    std::fs::remove_file(&out_file).unwrap();
}
