use std::process::Command;

fn nf(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_nf")).args(args).output().unwrap()
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn error_record(o: &std::process::Output) -> serde_json::Value {
    assert!(!o.status.success());
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    serde_json::from_str(err.lines().last().unwrap()).unwrap()
}

const CONFIG: &str = r#"
schema_version = 1
name = "cli"

[grid]
dim = 1
points_per_dim = 64
box_length = 32.0

[initial]
kind = "gaussian"
sigma = 1.0
norm = 1.0
boost = 2.0

[run]
systems = ["kgw", "sw"]
reference = "kgw"
epsilons = [0.04, 0.02]
dt = 1e-3
t_end = 0.1
diagnostics_every = 10
"#;

#[test]
fn normal_form_json_has_exact_rationals() {
    let o = nf(&["normal-form", "--order", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["order"], 2);
    assert_eq!(v["residuals_zero"], true);
    let checks = v["reference_checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "match"));
    let coeffs: Vec<String> = v["generators"][0]["terms"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|t| [t["re"].as_str().unwrap().to_string(), t["im"].as_str().unwrap().to_string()])
        .collect();
    assert!(coeffs.iter().any(|c| c == "1/8" || c == "-1/8"), "{coeffs:?}");
}

#[test]
fn normal_form_order_three_flags_missing_reference() {
    let o = nf(&["normal-form", "--order", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("residuals: all zero"));
    assert!(text.contains("check Z3: no reference"));
    let latex = stdout(&nf(&["normal-form", "--order", "1", "--format", "latex"]));
    assert!(latex.contains("\\int"));
}

#[test]
fn sweep_and_error_records() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, CONFIG).unwrap();
    let out = dir.path().join("out");
    let o = nf(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", "2", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().nth(1) == Some("epsilon,system,error_final,error_sup"));
    assert!(out.join("manifest.json").exists());

    let o = nf(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    let m: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(m["runs"].as_array().unwrap().len(), 4);

    std::fs::write(&cfg, CONFIG.replace("[run]", "[run]\nbogus = 1")).unwrap();
    let e = error_record(&nf(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert_eq!(e["error"]["kind"], "config_error");

    std::fs::write(&cfg, CONFIG.replace("[0.04, 0.02]", "[0.04]")).unwrap();
    let e = error_record(&nf(&["sweep", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]));
    assert!(e["error"]["message"].as_str().unwrap().contains("two epsilons"));

    let e = error_record(&nf(&["compare", "--config", "/definitely/missing.toml"]));
    assert_eq!(e["error"]["kind"], "io_error");
}

#[test]
fn stationary_exports_profile_and_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("st");
    let o = nf(&["stationary", "--nodes", "1", "--tol", "1e-8", "--out", out.to_str().unwrap(), "--scale", "40", "--points", "16", "--box-length", "8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["nodes"], 1);
    assert!(v["omega"].as_f64().unwrap() < 0.0);
    assert!((v["mass"].as_f64().unwrap() - 40.0).abs() < 1e-9);
    let csv = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    assert_eq!(csv.lines().nth(1), Some("r,chi,phi"));
    let snap = std::fs::read(out.join("profile.nfld")).unwrap();
    assert!(snap.starts_with(b"NFLD1\n"));
}

#[test]
fn convert_units_reports_mu_squared() {
    let o = nf(&["convert-units", "--particle-mass", "1e-57", "--total-mass-solar", "1e12"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mu2 = v["mu2"].as_f64().unwrap();
    assert!((1e4..1e5).contains(&mu2), "{mu2}");
    let e = error_record(&nf(&["convert-units", "--particle-mass=-1", "--total-mass", "1"]));
    assert_eq!(e["error"]["kind"], "domain_error");
    let o = nf(&["convert-units", "--particle-mass", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error_record(&o)["error"]["kind"], "usage_error");
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.toml");
    std::fs::write(&k, "[constants]\nsolar_mass = 2e33\n").unwrap();
    let o = nf(&["convert-units", "--particle-mass", "1e-57", "--total-mass-solar", "1", "--config", k.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["total_mass"].as_f64().unwrap(), 2e33);
}
