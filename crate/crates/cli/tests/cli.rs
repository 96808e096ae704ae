use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
}

fn spillsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spillsim"))
        .args(args)
        .output()
        .expect("spawn spillsim")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn note(summary: &str, key: &str) -> f64 {
    let doc: toml::Table = summary.parse().unwrap();
    doc["notes"][key].as_str().unwrap().parse().unwrap()
}

#[test]
fn jet_run_empties_the_demo_tank() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("jet");
    let o = spillsim(&[
        "run",
        "--model",
        "jet",
        s(&scenario("torricelli.toml")),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.toml")).unwrap();
    let t_empty = note(&summary, "empty_time_s");
    assert!((t_empty - 14_804.0).abs() / 14_804.0 < 1e-3, "{t_empty}");

    let csv = fs::read_to_string(out.join("series.csv")).unwrap();
    let doc: toml::Table = summary.parse().unwrap();
    let samples = doc["totals"]["samples"].as_integer().unwrap() as usize;
    assert_eq!(csv.lines().count(), samples + 1);

    let a = spillsim(&["audit", s(&out)]);
    assert!(a.status.success(), "{}", stderr(&a));
}

#[test]
fn two_stage_above_the_waterline_is_a_pairing_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = spillsim(&[
        "two-stage",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("above the waterline"), "{}", stderr(&o));
}

#[test]
fn estimate_reports_a_single_number() {
    let dir = tempfile::tempdir().unwrap();
    let o = spillsim(&[
        "estimate",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--films",
        s(&scenario("films.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("spilled mass:    6.300000 kg"),
        "{}",
        stdout(&o)
    );

    let o = spillsim(&[
        "estimate",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn inventory_estimate_rejects_inconsistent_records() {
    let dir = tempfile::tempdir().unwrap();
    let o = spillsim(&[
        "estimate",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--inventory",
        "100,80,40",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repeated_runs_write_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("submerged_sealed.toml");
    for (args, file) in [
        (vec!["jet", "--dt", "0.5"], "series.csv"),
        (vec!["two-stage", "--dt", "0.05"], "series.csv"),
        (
            vec!["cfd", "--grid", "16x16", "--t-end", "0.2"],
            "series.csv",
        ),
    ] {
        let mut texts = Vec::new();
        for k in 0..2 {
            let out = dir.path().join(format!("{}-{k}", args[0]));
            let mut full = args.clone();
            full.extend(["--scenario", s(&sc), "--out", s(&out)]);
            let o = spillsim(&full);
            assert!(o.status.success(), "{}", stderr(&o));
            texts.push(fs::read(out.join(file)).unwrap());
        }
        assert_eq!(texts[0], texts[1], "{} output differs", args[0]);
    }
}

/// The comparison table without its measured runtime column.
fn without_runtime(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| {
            let mut cells: Vec<&str> = l.split(',').collect();
            cells.remove(8);
            cells.join(",")
        })
        .collect()
}

#[test]
fn compare_is_reproducible_and_bounded() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("submerged.toml");
    let mut tables = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("cmp-{k}"));
        let o = spillsim(&[
            "compare",
            "--models",
            "jet,two_stage",
            "--scenario",
            s(&sc),
            "--dt",
            "1",
            "--out",
            s(&out),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(out.join("jet/series.csv").is_file());
        assert!(out.join("two_stage/summary.toml").is_file());
        tables.push(fs::read_to_string(out.join("comparison.csv")).unwrap());
    }
    assert_eq!(without_runtime(&tables[0]), without_runtime(&tables[1]));

    // 8 m of oil over 100 m^2 at 900 kg/m^3.
    let bound = 8.0 * 100.0 * 900.0;
    let rows: Vec<&str> = tables[0].lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        let total: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(total > 0.0 && total <= bound, "{row}");
    }
}

#[test]
fn duplicate_models_give_identical_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dup");
    let o = spillsim(&[
        "compare",
        "-m",
        "jet,jet",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--dt",
        "5",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("comparison.csv")).unwrap();
    let rows = without_runtime(&table);
    assert_eq!(rows[1], rows[2]);
    assert!(out.join("jet").is_dir() && out.join("jet-2").is_dir());
}

#[test]
fn compare_marks_failed_members() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("partial");
    let o = spillsim(&[
        "compare",
        "--models",
        "jet,two-stage",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--dt",
        "5",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("FAILED"));
    let table = fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("jet,ok,"));
    assert!(table
        .lines()
        .nth(2)
        .unwrap()
        .starts_with("two_stage,failed,"));
}

#[test]
fn cfd_writes_snapshots_at_the_interval() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cfd");
    let o = spillsim(&[
        "cfd",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--grid",
        "16x16",
        "--t-end",
        "100",
        "--max-steps",
        "1000",
        "--snapshot-every",
        "100",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let snaps = fs::read_dir(out.join("snapshots")).unwrap().count();
    assert_eq!(snaps, 10);
    assert!(spillsim(&["audit", s(&out)]).status.success());
}

#[test]
fn numerical_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = spillsim(&[
        "cfd",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--grid",
        "8",
        "--tolerance",
        "1e-300",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("did not converge"));
}

#[test]
fn bad_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let sc = scenario("torricelli.toml");
    for args in [
        vec!["cfd", "--grid", "2x2"],
        vec!["cfd", "--grid", "axb"],
        vec!["run", "--model", "plume"],
        vec!["jet", "--dt", "-1"],
    ] {
        let mut full = args.clone();
        full.extend(["--scenario", s(&sc), "--out", s(dir.path())]);
        let o = spillsim(&full);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
    let o = spillsim(&["jet", "--out", s(dir.path())]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn audit_catches_an_edited_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("jet");
    let o = spillsim(&[
        "jet",
        "--scenario",
        s(&scenario("torricelli.toml")),
        "--dt",
        "10",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success());
    let path = out.join("summary.toml");
    let text = fs::read_to_string(&path).unwrap();
    let edited = text.replacen("peak_rate_kgps = ", "peak_rate_kgps = 1", 1);
    fs::write(&path, edited).unwrap();
    let a = spillsim(&["audit", s(&out)]);
    assert_eq!(a.status.code(), Some(2));
    assert!(stderr(&a).contains("peak_rate_kgps"));
}
