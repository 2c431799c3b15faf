use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qflow"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(cmd: &str, cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg(cmd).arg("--config").arg(cfg).arg("--out").arg(out).args(extra).output().expect("spawn qflow")
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut rows = Vec::new();
    for line in text.lines().skip(1) {
        let mut fields = Vec::new();
        let mut cur = String::new();
        let mut quoted = false;
        let mut chars = line.chars().peekable();
        while let Some(ch) = chars.next() {
            match ch {
                '"' if quoted && chars.peek() == Some(&'"') => {
                    cur.push('"');
                    chars.next();
                }
                '"' => quoted = !quoted,
                ',' if !quoted => fields.push(std::mem::take(&mut cur)),
                _ => cur.push(ch),
            }
        }
        fields.push(cur);
        rows.push(fields);
    }
    rows
}

#[test]
fn validate_torus_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("validate", &config("torus.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let ids: Vec<&str> = report["summary"].as_array().unwrap().iter().map(|s| s["identity"].as_str().unwrap()).collect();
    for id in ["phi-one", "star", "ito", "tau", "pi-mult", "delta-deriv", "hoprod"] {
        assert!(ids.contains(&id), "missing {id}");
    }
    assert!(fs::read_to_string(dir.path().join("summary.txt")).unwrap().contains("PASS"));
}

#[test]
fn validate_corrupted_tau_fails_on_tau() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("validate", &config("torus_corrupt.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let tau = report["summary"].as_array().unwrap().iter().find(|s| s["identity"] == "tau").unwrap();
    assert!(tau["failures"].as_u64().unwrap() > 0);
}

#[test]
fn missing_or_malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("validate", &dir.path().join("nope.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"schema": 1, "generator": {"family": "klein"}}"#).unwrap();
    assert_eq!(run("growth", &bad, dir.path(), &[]).status.code(), Some(2));
    fs::write(&bad, r#"{"schema": 7, "generator": {}}"#).unwrap();
    assert_eq!(run("validate", &bad, dir.path(), &[]).status.code(), Some(2));
    assert_eq!(bin().arg("validate").output().unwrap().status.code(), Some(2));
}

#[test]
fn growth_flags_shifted_torus() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("growth", &config("torus_shifted.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("growth.csv"));
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r[4] == "super-geometric"));
    let lower8: f64 = rows[8][3].parse().unwrap();
    assert!(lower8 >= 40320.0);
}

#[test]
fn growth_torus_is_geometric_in_both_modes() {
    for mode in ["exact", "float"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run("growth", &config("torus.json"), dir.path(), &["--mode", mode]);
        assert_eq!(out.status.code(), Some(0));
        let rows = csv_rows(&dir.path().join("growth.csv"));
        assert!(rows.iter().all(|r| r[4] == "geometric"), "{mode}");
    }
}

#[test]
fn compare_walk_exclusion_torus_pass() {
    for name in ["walk.json", "exclusion2.json", "torus.json"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run("compare", &config(name), dir.path(), &[]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let rows = csv_rows(&dir.path().join("compare.csv"));
        assert!(!rows.is_empty());
        for r in rows {
            let (d, b): (f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap());
            assert!(d <= b && r[4] == "true", "{name}: {r:?}");
        }
    }
}

#[test]
fn compare_without_oracle_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run("compare", &config("rotation.json"), dir.path(), &[]).status.code(), Some(2));
}

#[test]
fn semigroup_exclusion_error_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("semigroup", &config("exclusion2.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("semigroup.csv"));
    assert!(!rows.is_empty());
    for r in &rows {
        let t: f64 = r[0].parse().unwrap();
        let err: f64 = r[5].parse().unwrap();
        if t == 0.0 {
            assert_eq!(err, 0.0);
        } else {
            assert!(err > 0.0 && err <= 1e-10);
        }
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("semigroup.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 12);
}

#[test]
fn semigroup_reports_uncertified_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("semigroup", &config("torus_shifted.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("semigroup.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][5], "not certified");
}

#[test]
fn semigroup_cocycle_walk() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("semigroup", &config("walk.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&dir.path().join("semigroup.csv"));
    assert!(rows.iter().any(|r| r[2] == "0"));
}

#[test]
fn iterate_dumps_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = run("iterate", &config("torus.json"), dir.path(), &[]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("iterate_0.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // φ_3(U) = U ⊗ m_U^{⊗3}; m_U has 3 nonzero entries
    assert_eq!(lines.len(), 27);
    assert_eq!(lines[0]["r"].as_array().unwrap().len(), 3);
}

#[test]
fn reports_are_byte_identical() {
    for cmd in ["validate", "growth", "semigroup", "compare"] {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let cfg = if cmd == "validate" { config("torus.json") } else { config("exclusion2.json") };
        run(cmd, &cfg, a.path(), &["--seed", "7"]);
        run(cmd, &cfg, b.path(), &["--seed", "7"]);
        let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        names.sort();
        assert!(!names.is_empty());
        for n in names {
            assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{cmd}: {n:?}");
        }
    }
}
