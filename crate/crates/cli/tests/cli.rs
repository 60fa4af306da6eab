use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kglab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kglab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn strauss_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = kglab(dir.path(), &["strauss", "--out", "s"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("s/strauss.csv")).unwrap();
    let rows: Vec<(u32, f64)> =
        rdr.records().map(|r| r.unwrap()).map(|r| (r[0].parse().unwrap(), r[1].parse().unwrap())).collect();
    assert_eq!(rows.len(), 6);
    for ((n, g), listed) in rows.iter().zip([3.56, 2.41, 2.0, 1.78]) {
        assert!((g - listed).abs() < 6e-3, "n = {n}: {g}");
    }
    let manifest = json(&dir.path().join("s/manifest.json"));
    let files: Vec<&str> = manifest["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    assert_eq!(files, ["strauss.csv", "summary.json"]);
}

#[test]
fn shell_records_are_byte_identical_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("shell.toml"), "command = \"verify-shell\"\n[sweep]\nsamples = 100000\ntubes = [8.0]\n").unwrap();
    for out in ["a", "b"] {
        let o = kglab(dir.path(), &["verify-shell", "--config", "shell.toml", "--seed", "5", "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["records.jsonl", "shells.csv", "summary.json"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    let o = kglab(dir.path(), &["verify-shell", "--config", "shell.toml", "--seed", "6", "--out", "c"]);
    assert!(o.status.success());
    assert_ne!(fs::read(dir.path().join("a/records.jsonl")).unwrap(), fs::read(dir.path().join("c/records.jsonl")).unwrap());
}

#[test]
fn free_simulation_matches_linear_flow_and_feeds_variation() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sim.toml"),
        "coefficient = 0.0\npoints = 32\nt_final = 2.0\ndt = 0.05\nstore_trajectory = true\n",
    )
    .unwrap();
    let o = kglab(dir.path(), &["simulate", "--config", "sim.toml", "--out", "sim"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = json(&dir.path().join("sim/summary.json"));
    let m = &summary["linear_match"];
    assert!(m["max_abs_diff"].as_f64().unwrap() <= 1e-12 * m["max_abs_coefficient"].as_f64().unwrap());
    let series = fs::read_to_string(dir.path().join("sim/series.csv")).unwrap();
    assert_eq!(series.lines().next(), Some("time,component,hs_norm,energy,scattering_increment"));
    assert_eq!(series.lines().count(), 1 + 5);

    fs::write(dir.path().join("var.toml"), "trajectory = \"sim/trajectory.json\"\n").unwrap();
    let o = kglab(dir.path(), &["variation", "--config", "var.toml", "--out", "var"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // A free wave has constant profiles, so its V² norm is the norm of u±(0).
    let norms = json(&dir.path().join("var/summary.json"))["norms"].clone();
    assert_eq!(norms.as_array().unwrap().len(), 2);
    for n in norms.as_array().unwrap() {
        let v = n["v2"].as_f64().unwrap();
        assert!(v > 0.0 && (n["p_variation"].as_f64().unwrap() - v).abs() <= 1e-15 * v);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();

    fs::write(p.join("bad.toml"), "dimm = 3\n").unwrap();
    assert_eq!(kglab(p, &["strauss", "--config", "bad.toml", "--out", "x"]).status.code(), Some(2));
    assert!(!p.join("x/manifest.json").exists());

    fs::write(p.join("missing.toml"), "system = \"nowhere.toml\"\n").unwrap();
    assert_eq!(kglab(p, &["simulate", "--config", "missing.toml", "--out", "x"]).status.code(), Some(2));

    fs::write(p.join("other.toml"), "command = \"picard\"\n").unwrap();
    assert_eq!(kglab(p, &["simulate", "--config", "other.toml", "--out", "x"]).status.code(), Some(2));

    assert_eq!(kglab(p, &["verify-shell", "--out", "x"]).status.code(), Some(2), "seed is mandatory");

    fs::write(p.join("abort.toml"), "points = 32\nt_final = 1.0\nblowup_factor = 0.5\n").unwrap();
    assert_eq!(kglab(p, &["simulate", "--config", "abort.toml", "--out", "ab"]).status.code(), Some(3));
    assert!(!p.join("ab/manifest.json").exists());

    // A floor above the true minimum makes the sweep fail; the run itself completes.
    fs::write(p.join("floor.toml"), "[sweep]\nrandom_samples = 100\nfloor = 0.9\n").unwrap();
    assert_eq!(kglab(p, &["verify-modulation", "--config", "floor.toml", "--seed", "1", "--out", "f"]).status.code(), Some(1));
    let manifest = json(&p.join("f/manifest.json"));
    assert_eq!(manifest["summary"]["passed"], Value::Bool(false));
}

#[test]
fn strichartz_table_flags_admissible_pairs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("st.toml"),
        "[sweep]\ndims = [2, 3]\nexponents = [[\"4\", \"4\"], [\"inf\", \"2\"], [\"8/3\", \"4\"]]\n",
    )
    .unwrap();
    let o = kglab(dir.path(), &["strichartz", "--config", "st.toml", "--out", "st"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("st/strichartz.csv")).unwrap();
    let flags: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(flags, ["true", "true", "false", "false", "true", "true"]);
}
