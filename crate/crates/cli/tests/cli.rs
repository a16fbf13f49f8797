use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_treemap-eval"));
    c.env("RUST_LOG", "warn");
    c
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("treemap-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn full_pipeline() {
    let dir = scratch("pipeline");
    let data = dir.join("data");
    let classes = "1L-LWV-LWC-LID,2/3L-HWV-RWC-RID";
    run(&["generate", "--out", s(&data), "--classes", classes, "--count", "2", "--leaves", "15", "--timesteps", "4", "--seed", "5"]);
    let files: Vec<_> = fs::read_dir(&data).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(files.len(), 5);

    let res = dir.join("res");
    let algs = "SND,SQR,LM0,GIT";
    run(&["evaluate", "--input", s(&data), "--out", s(&res), "--algorithms", algs, "--rect", "400x300", "--jobs", "2"]);
    let csv = fs::read_to_string(res.join("results.csv")).unwrap();
    assert!(csv.starts_with("dataset,algorithm,timestep,mean_rho,mean_ct,mean_ct_baseline,mean_sigma"));
    assert_eq!(csv.lines().filter(|l| l.contains(",ALL,")).count(), 16);
    assert_eq!(csv.lines().count(), 1 + 16 * 5);

    let again = dir.join("again");
    run(&["evaluate", "--input", s(&data), "--out", s(&again), "--algorithms", algs, "--rect", "400x300", "--jobs", "1"]);
    assert_eq!(csv, fs::read_to_string(again.join("results.csv")).unwrap());

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(res.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "evaluate");
    assert_eq!(manifest["config"]["rect"]["w"], 400.0);
    assert_eq!(manifest["pairs"].as_array().unwrap().len(), 16);
    assert!(manifest["pairs"].as_array().unwrap().iter().all(|p| p["ok"] == true));
    assert!(manifest["versions"]["treemap-core"].is_string());

    let classified = dir.join("cls");
    run(&["classify", "--input", s(&data), "--out", s(&classified)]);
    let table = fs::read_to_string(classified.join("classification.csv")).unwrap();
    assert_eq!(table.lines().next().unwrap(), "dataset,levels,variance,change,insdel,label");
    assert_eq!(table.matches("2/3L-HWV-RWC-RID").count(), 2);

    let rep = dir.join("rep");
    run(&["report", "--input", s(&res), "--out", s(&rep)]);
    for f in [
        "ranking_all.csv",
        "matrix_visual_quality_1L-LWV-LWC-LID.svg",
        "matrix_stability_23L-HWV-RWC-RID.svg",
        "features_weight_change.svg",
        "consistency.csv",
    ] {
        assert!(rep.join(f).exists(), "{f}");
    }
    let ranking = fs::read_to_string(rep.join("ranking_all.csv")).unwrap();
    assert_eq!(ranking.lines().count(), 5);

    let one = data.join(
        files
            .iter()
            .find(|f| f.to_string_lossy().starts_with("synthetic-23L"))
            .unwrap(),
    );
    let lay = dir.join("lay");
    run(&["layout", "--input", s(&one), "--out", s(&lay), "--algorithms", "STR"]);
    let pair_dir = fs::read_dir(&lay).unwrap().map(|e| e.unwrap().path()).find(|p| p.is_dir()).unwrap();
    assert!(pair_dir.join("STR/layouts.json").exists());
    assert!(pair_dir.join("STR/t003.svg").exists());

    let base = dir.join("base");
    run(&["baseline", "--input", s(&one), "--out", s(&base), "--algorithms", "LM4"]);
    let pair_dir = fs::read_dir(&base).unwrap().map(|e| e.unwrap().path()).find(|p| p.is_dir()).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(pair_dir.join("LM4/baselines.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 3);
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn unknown_algorithm_fails_before_work() {
    let dir = scratch("unknown");
    let data = dir.join("data");
    run(&["generate", "--out", s(&data), "--classes", "1L-LWV-LWC-LID", "--leaves", "5", "--timesteps", "3"]);
    let res = dir.join("res");
    let out = bin()
        .args(["evaluate", "--input", s(&data), "--out", s(&res), "--algorithms", "SQR,NOPE"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("NOPE"));
    assert!(!res.exists());
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn rejects_bad_rect() {
    let out = bin()
        .args(["evaluate", "--input", "x", "--out", "y", "--rect", "0x5"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
