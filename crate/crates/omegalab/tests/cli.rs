use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use omegalab::{
    parse_json_report, run_experiment, Experiment, ExperimentConfig, Format, MachineSource, PROVENANCE_COLUMN,
};

fn omegalab(args: &[&str], cache: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_omegalab"));
    cmd.args(args).env_remove("OMEGALAB_CACHE_DIR");
    if let Some(dir) = cache {
        cmd.env("OMEGALAB_CACHE_DIR", dir);
    }
    cmd.output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = omegalab(args, None);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn omega_of_m1() {
    assert_eq!(
        stdout(&["omega", "--machine", "M1", "--budget", "1000"]),
        "3/4 (exact)\n"
    );
    assert_eq!(stdout(&["omega", "--machine", "OMEGA_DEMO"]), "7/8 (exact)\n");
    assert_eq!(stdout(&["omega", "--machine", "M1", "--pad", "3"]), "3/32 (exact)\n");
    assert!(stdout(&["omega", "--machine", "GEOM", "--budget", "100"]).ends_with("(lower bound)\n"));
}

#[test]
fn kraft_codewords() {
    assert_eq!(stdout(&["kraft", "--lengths", "1,2,3,3"]), "0\n10\n110\n111\n");
    let out = omegalab(&["kraft", "--lengths", "2,2,1,3"], None);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("index 3"));
}

#[test]
fn uncertainty_csv_for_m1() {
    let csv = stdout(&["uncertainty", "--machine", "M1", "--s-max", "2"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "s,omega_prefix,provenance,delta_s,H,delta_C,product,sigma_x_sq,sigma_y_sq,epsilon_line"
    );
    assert_eq!(lines[1], "1,1,exact,1/2,2,4,2/1,degenerate,degenerate,2/1");
    assert_eq!(lines[2], "2,11,exact,1/4,inf,inf,inf,empty-level,empty-level,2/1");
    assert_eq!(lines.len(), 3);
}

#[test]
fn unknown_inputs_fail_cleanly() {
    let out = omegalab(&["omega", "--machine", "NOPE"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOPE"));
    let out = omegalab(&["omega", "--format", "xml"], None);
    assert_eq!(out.status.code(), Some(2));
    let out = omegalab(
        &["uncertainty", "--machine", "M1", "--s-max", "4", "--budget", "3"],
        None,
    );
    assert!(!out.status.success());
}

#[test]
fn machine_files_and_saved_configs() {
    let dir = tempfile::tempdir().unwrap();
    let machine = dir.path().join("two.machine");
    fs::write(
        &machine,
        "start r\nr * => read a b\na * => emit 0 h\nb * => emit 1 h\nh * => halt\n",
    )
    .unwrap();
    let config = dir.path().join("config.json");
    let first = stdout(&[
        "observables",
        "--machine-file",
        machine.to_str().unwrap(),
        "--s-max",
        "1",
        "--save-config",
        config.to_str().unwrap(),
    ]);
    assert!(first.contains("\n1,0,1/2,"), "{first}");
    let again = stdout(&["report", "--config", config.to_str().unwrap()]);
    assert_eq!(first, again);
}

#[test]
fn every_report_carries_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"f": "identity", "bits": "0110", "k_max": 4}"#).unwrap();
    let experiments = [
        Experiment::Enumerate,
        Experiment::Omega,
        Experiment::Complexity { strings: vec![] },
        Experiment::Kraft { lengths: vec![1, 2] },
        Experiment::Uncertainty {
            growth_threshold: Some(1),
        },
        Experiment::Observables { strings: vec![] },
        Experiment::Scattered {
            spec: spec.clone(),
            epsilon: "1".into(),
            horizon: None,
        },
    ];
    for experiment in experiments {
        let mut config = ExperimentConfig::new(experiment, MachineSource::Builtin("GEOM".into()), 400);
        config.s_max = 3;
        config.format = Some(Format::Json);
        for doc in run_experiment(&config).unwrap() {
            if !doc.name.ends_with(".json") {
                continue;
            }
            let report = parse_json_report(&doc.content).unwrap();
            let column = report.column(PROVENANCE_COLUMN).expect("provenance column");
            assert!(report.rows.iter().all(|r| !r[column].is_empty()), "{}", doc.name);
        }
    }
}

#[test]
fn scattered_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"f": "double", "bits": "10", "k_max": 2}"#).unwrap();
    let out = dir.path().join("out");
    stdout(&[
        "scattered",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let names: Vec<String> = {
        let mut v: Vec<_> = fs::read_dir(&out)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        v.sort();
        v
    };
    assert_eq!(
        names,
        [
            "SCATTER_double_k2.machine",
            "contradiction.csv",
            "summary.csv",
            "verify.csv"
        ]
    );
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("3/4,3/4,"), "{summary}");
    let description = fs::read_to_string(out.join("SCATTER_double_k2.machine")).unwrap();
    assert!(omegalab_core::parse_machine(&description).is_ok());
}

#[test]
fn uncertainty_from_a_computable_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(&spec, r#"{"f": "double", "bits": "111", "k_max": 3, "fill": "000"}"#).unwrap();
    let csv = stdout(&["uncertainty", "--spec", spec.to_str().unwrap(), "--s-max", "6"]);
    // x = 010101; only the prefixes of length F(k) are outputs
    let products: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(6).unwrap()).collect();
    assert_eq!(products, ["inf", "1/1", "inf", "1/1", "inf", "1/1"]);
    assert!(csv.lines().skip(1).all(|l| l.split(',').nth(2) == Some("computable")));
}

#[test]
fn cache_directory_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["enumerate", "--machine", "GEOM", "--budget", "300", "--threads", "3"];
    let first = omegalab(&args, Some(dir.path()));
    assert!(first.status.success());
    let files: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(files.len(), 1);
    let second = omegalab(&args, Some(dir.path()));
    assert_eq!(first.stdout, second.stdout);
    let sequential = stdout(&["enumerate", "--machine", "GEOM", "--budget", "300"]);
    assert_eq!(String::from_utf8(first.stdout).unwrap(), sequential);
}
