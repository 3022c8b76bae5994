//! The `dta` binary end to end on a short sweep.

use std::process::Command;

fn dta() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dta"))
}

#[test]
fn experiment_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("short.json"), r#"{"match_len": 60.0, "packet_loss": 0.15, "delay_ticks": 2}"#).unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"base_config": "short.json", "modes": ["FixedRate", "EventVoronoi"], "seeds": [1, 0], "output_dir": "out"}"#,
    )
    .unwrap();

    let run = dta().args(["experiment", "--plan"]).arg(&plan).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let csv = std::fs::read_to_string(dir.path().join("out/runs.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "seed,mode,role,overlap_s,packets_sent");
    assert_eq!(lines.len(), 1 + 2 * 2 * 7);
    assert!(lines[1].starts_with("0,FixedRate,Goalkeeper,"));

    let again = dta().args(["experiment", "--plan"]).arg(&plan).output().unwrap();
    assert!(again.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("out/runs.csv")).unwrap(), csv);

    let cmp = dta().args(["compare", "--report"]).arg(dir.path().join("out/report.json")).output().unwrap();
    assert!(cmp.status.success());
    let text = String::from_utf8(cmp.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().any(|l| l.starts_with("Striker") && l.contains("EventVoronoi=")));
}

#[test]
fn single_run_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.json");
    std::fs::write(&config, r#"{"match_len": 20.0}"#).unwrap();
    let out = dta()
        .args(["run", "--mode", "EventBased", "--seed", "3", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().nth(1).unwrap().starts_with("3,EventBased,"));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"packet_loss": 2.0}"#).unwrap();
    let out = dta().args(["run", "--mode", "FixedRate", "--seed", "0", "--config"]).arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("packet_loss"));

    let missing = dta().args(["experiment", "--plan", "/nonexistent/plan.json"]).output().unwrap();
    assert!(!missing.status.success());

    let unknown = dta().args(["run", "--mode", "Telepathy", "--seed", "0", "--config"]).arg(&config).output().unwrap();
    assert!(!unknown.status.success());
}
