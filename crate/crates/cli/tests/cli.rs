//! End-to-end tests of the `matesim` binary: exit codes, output files, and
//! message content.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use matesim_core::analytics::{
    generate_synthetic, write_matings_csv, write_profiles_csv, DeltaSpec, PropertySpec,
    SyntheticSpec,
};
use matesim_core::analytics::Property;
use matesim_core::model::sim_rng;

fn matesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matesim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn simulate_zero_meetings_exits_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = matesim(&[
        "simulate",
        "--m",
        "0",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    assert!(stdout(&result).contains("extinct at generation 0"));
    let trace = fs::read_to_string(out.join("trace_1.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "generation,rho,variety,n_females,n_males,matings");
    assert_eq!(lines.len(), 2, "one generation lived: {trace}");
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[0], "0");
    assert_eq!(fields[1], "0.000000");
    assert_eq!(&fields[3..], ["100", "100", "0"]);
    assert!(out.join("ensemble_summary.json").exists());
}

#[test]
fn simulate_rejects_zero_value_range() {
    let result = matesim(&["simulate", "--r", "0", "--seeds", "1"]);
    assert!(!result.status.success());
    assert!(stderr(&result).contains("r"), "{}", stderr(&result));
}

#[test]
fn simulate_requires_a_seed_source() {
    let result = matesim(&["simulate"]);
    assert!(!result.status.success());
    assert!(stderr(&result).contains("--seeds"), "{}", stderr(&result));
}

#[test]
fn simulate_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let result = matesim(&[
            "simulate",
            "--n",
            "20",
            "--m",
            "400",
            "--max-generations",
            "30",
            "--seeds",
            "1..4",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
    }
    for seed in 1..=4 {
        let name = format!("trace_{seed}.csv");
        assert_eq!(
            fs::read(out_a.join(&name)).unwrap(),
            fs::read(out_b.join(&name)).unwrap(),
            "{name} differs between reruns"
        );
    }
    assert_eq!(
        fs::read(out_a.join("ensemble_summary.json")).unwrap(),
        fs::read(out_b.join("ensemble_summary.json")).unwrap()
    );
}

fn write_synthetic_files(dir: &Path, n_users: usize) -> (String, String) {
    let spec = SyntheticSpec {
        properties: vec![PropertySpec {
            property: Property::Age,
            female: DeltaSpec::Constant(5.0),
            male: DeltaSpec::Constant(-5.0),
            base_mean: 30.0,
            base_std: 6.0,
        }],
    };
    let mut rng = sim_rng(99);
    let data = generate_synthetic(&spec, n_users, &mut rng).unwrap();
    let profiles_path = dir.join("profiles.csv");
    let matings_path = dir.join("matings.csv");
    let mut buf = Vec::new();
    write_profiles_csv(&data.profiles, &mut buf).unwrap();
    fs::write(&profiles_path, buf).unwrap();
    let mut buf = Vec::new();
    write_matings_csv(&data.edges, &mut buf).unwrap();
    fs::write(&matings_path, buf).unwrap();
    (
        profiles_path.to_str().unwrap().to_string(),
        matings_path.to_str().unwrap().to_string(),
    )
}

#[test]
fn analyze_recovers_constant_construction() {
    let dir = tempfile::tempdir().unwrap();
    let (profiles, matings) = write_synthetic_files(dir.path(), 30);
    let out = dir.path().join("out");
    let result = matesim(&[
        "analyze",
        "--profiles",
        &profiles,
        "--matings",
        &matings,
        "--properties",
        "age",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let mut lines = report.lines();
    assert_eq!(
        lines.next().unwrap(),
        "property,mu_m,mu_f,sigma_m,sigma_f,rho,n_m,n_f"
    );
    assert_eq!(lines.next().unwrap(), "age,-5.000000,5.000000,0.000000,0.000000,1.000000,15,15");
    for gender in ["female", "male"] {
        assert!(out.join(format!("hist_age_{gender}.csv")).exists());
        assert!(out.join(format!("hist_age_{gender}.json")).exists());
    }
    // The two sidecars feed straight back into compat.
    let f = out.join("hist_age_female.json");
    let m = out.join("hist_age_male.json");
    let result = matesim(&["compat", f.to_str().unwrap(), m.to_str().unwrap()]);
    assert!(result.status.success());
    assert_eq!(stdout(&result).trim(), "1.000000");
}

#[test]
fn analyze_single_property_gives_single_row() {
    let dir = tempfile::tempdir().unwrap();
    let (profiles, matings) = write_synthetic_files(dir.path(), 10);
    let out = dir.path().join("out");
    let result = matesim(&[
        "analyze",
        "--profiles",
        &profiles,
        "--matings",
        &matings,
        "--properties",
        "height",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(lines.len(), 2, "header plus exactly one data row");
    assert!(lines[1].starts_with("height,"));
}

#[test]
fn analyze_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (profiles, matings) = write_synthetic_files(dir.path(), 20);
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        let result = matesim(&[
            "analyze",
            "--profiles",
            &profiles,
            "--matings",
            &matings,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
    }
    for name in ["report.csv", "hist_age_female.json", "hist_age_male.csv"] {
        assert_eq!(
            fs::read(out_a.join(name)).unwrap(),
            fs::read(out_b.join(name)).unwrap(),
            "{name} differs between reruns"
        );
    }
}

#[test]
fn unwritable_output_directory_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("blocker");
    fs::write(&blocker, "a plain file").unwrap();
    let out = blocker.join("nested");
    let result = matesim(&[
        "simulate",
        "--m",
        "0",
        "--seeds",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    assert!(
        stderr(&result).contains("output directory"),
        "{}",
        stderr(&result)
    );
}

#[test]
fn analyze_rejects_same_gender_edge() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = dir.path().join("profiles.csv");
    let matings = dir.path().join("matings.csv");
    fs::write(
        &profiles,
        "user_id,gender,age,height,education,income\nf1,F,20,,,\nf2,F,22,,,\n",
    )
    .unwrap();
    fs::write(&matings, "user_a,user_b\nf1,f2\n").unwrap();
    let result = matesim(&[
        "analyze",
        "--profiles",
        profiles.to_str().unwrap(),
        "--matings",
        matings.to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    let err = stderr(&result);
    assert!(err.contains("f1") && err.contains("f2"), "{err}");
    assert!(err.contains("same gender"), "{err}");
}

#[test]
fn analyze_reports_ingestion_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let profiles = dir.path().join("profiles.csv");
    fs::write(
        &profiles,
        "user_id,gender,age,height,education,income\nf1,F,20,,,\nm1,Q,30,,,\n",
    )
    .unwrap();
    fs::write(dir.path().join("matings.csv"), "user_a,user_b\n").unwrap();
    let result = matesim(&[
        "analyze",
        "--profiles",
        profiles.to_str().unwrap(),
        "--matings",
        dir.path().join("matings.csv").to_str().unwrap(),
    ]);
    assert!(!result.status.success());
    let err = stderr(&result);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains('Q'), "{err}");
}

#[test]
fn compat_on_mirrored_file_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let m = dir.path().join("m.json");
    fs::write(
        &f,
        r#"{"bin_width":1.0,"bins":{"-2":0.25,"0":0.5,"1":0.25},"total_count":8}"#,
    )
    .unwrap();
    fs::write(
        &m,
        r#"{"bin_width":1.0,"bins":{"-1":0.25,"0":0.5,"2":0.25},"total_count":8}"#,
    )
    .unwrap();
    let result = matesim(&["compat", f.to_str().unwrap(), m.to_str().unwrap()]);
    assert!(result.status.success(), "{}", stderr(&result));
    assert_eq!(stdout(&result).trim(), "1.000000");
}

#[test]
fn compat_rejects_mismatched_widths() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    let m = dir.path().join("m.json");
    fs::write(&f, r#"{"bin_width":1.0,"bins":{"0":1.0},"total_count":1}"#).unwrap();
    fs::write(&m, r#"{"bin_width":2.0,"bins":{"0":1.0},"total_count":1}"#).unwrap();
    let result = matesim(&["compat", f.to_str().unwrap(), m.to_str().unwrap()]);
    assert!(!result.status.success());
    assert!(stderr(&result).contains("bin width mismatch"), "{}", stderr(&result));
}

#[test]
fn compat_rejects_unparseable_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, "not json").unwrap();
    let result = matesim(&["compat", f.to_str().unwrap(), f.to_str().unwrap()]);
    assert!(!result.status.success());
    assert!(stderr(&result).contains("f.json"), "{}", stderr(&result));
}

#[test]
fn demo_walks_through_the_three_bins() {
    let result = matesim(&["demo"]);
    assert!(result.status.success());
    let text = stdout(&result);
    assert!(text.contains("0.50 matched"), "{text}");
    assert!(text.contains("0.10 matched"), "{text}");
    assert!(text.contains("0.30 matched"), "{text}");
    assert!(text.contains("rho = 0.90"), "{text}");
}

#[test]
fn timestamp_header_is_optional_and_marked() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let result = matesim(&[
        "simulate",
        "--m",
        "0",
        "--seeds",
        "1",
        "--timestamp",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let trace = fs::read_to_string(out.join("trace_1.csv")).unwrap();
    assert!(trace.starts_with("# generated_at="), "{trace}");
    assert!(trace.contains("generation,rho"), "{trace}");
}
