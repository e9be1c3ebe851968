use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ars-mobopt"))
}

#[test]
fn run_compare_and_hv_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        r#"
budget = 13
n_priors = 10
seeds = [0, 1]

[problem]
id = "zdt1"
dim = 3

[solver]
id = "ars"

[solver.ars]
n_directions = 6
max_train_steps = 2
hidden = 8

[solver.gp]
restarts = 1
iterations = 30
"#,
    )
    .unwrap();

    for solver in ["ars", "random"] {
        let out = dir.path().join(solver);
        let status = bin()
            .args(["run", "--config"])
            .arg(&config)
            .args(["--solver", solver, "--budget", "12", "--out"])
            .arg(&out)
            .env("ARS_MOBOPT_THREADS", "1")
            .status()
            .unwrap();
        assert!(status.success());
        for f in ["archive.jsonl", "trace.csv", "summary.json"] {
            assert!(out.join("seed-0").join(f).is_file(), "{solver}: {f}");
        }
        assert_eq!(fs::read_to_string(out.join("seed-1/archive.jsonl")).unwrap().lines().count(), 12);
    }

    let single = bin()
        .args(["run", "--config"])
        .arg(&config)
        .args(["--seed", "9", "--solver", "random", "--out"])
        .arg(dir.path().join("single"))
        .status()
        .unwrap();
    assert!(single.success());
    assert!(dir.path().join("single/seed-9/archive.jsonl").is_file());
    assert!(!dir.path().join("single/seed-0").exists());

    let cmp = dir.path().join("cmp");
    let output = bin()
        .args(["compare", "--runs"])
        .arg(dir.path().join("ars"))
        .arg(dir.path().join("random"))
        .arg("--out")
        .arg(&cmp)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("ars\truns=2"), "{stdout}");
    assert!(stdout.contains("random\truns=2"), "{stdout}");
    assert!(cmp.join("hv_vs_sample.csv").is_file());

    let archive = dir.path().join("random/seed-0/archive.jsonl");
    let hv = bin().args(["hv", "--archive"]).arg(&archive).args(["--ref", "1.1,11"]).output().unwrap();
    assert!(hv.status.success());
    let value: f64 = String::from_utf8(hv.stdout).unwrap().trim().parse().unwrap();
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("random/seed-0/summary.json")).unwrap()).unwrap();
    assert_eq!(value, summary["final_hypervolume"].as_f64().unwrap());

    let bad = bin().args(["hv", "--archive"]).arg(&archive).args(["--ref", "1,1,1"]).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn missing_config_is_reported() {
    let out = bin().args(["run", "--config", "/nonexistent/run.toml"]).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));
}
