use std::path::PathBuf;
use std::process::{Command, Output};

fn direktor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_direktor"))
        .args(args)
        .env("DIREKTOR_THREADS", "2")
        .output()
        .expect("run direktor")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/configs")
        .join(name)
        .display()
        .to_string()
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sweep_preset_reports_reference_and_flags() {
    let o = direktor(&["sweep", "--preset", "isolator", "--select", "d2:d1", "--select", "d1:d2", "--points", "11"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.starts_with("# direktor "));
    assert!(text.contains("# matching_conditions: [\"J[d1,d2] = 0+0.5i\"]"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 11);
    for r in &rows {
        let fwd: f64 = r[1].parse().unwrap();
        let reference: f64 = r[5].parse().unwrap();
        assert!((fwd - reference).abs() < 1e-12);
        assert_eq!(r[3].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r.last().unwrap(), "ok");
    }
}

#[test]
fn sweep_output_is_deterministic_across_thread_counts() {
    let args = ["sweep", "--preset", "ndpa", "--select", "d2+:d1", "--points", "301", "--format", "json"];
    let a = stdout(&direktor(&args));
    let b = Command::new(env!("CARGO_BIN_EXE_direktor"))
        .args(args)
        .env("DIREKTOR_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(a, String::from_utf8(b.stdout).unwrap());
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 301);
    let g0 = v["records"][150]["abs2[d2+<-d1]"].as_f64().unwrap();
    assert!((g0 - 360.0).abs() < 1e-8);
}

#[test]
fn empty_selection_is_header_only() {
    let o = direktor(&["sweep", "--preset", "dpa"]);
    assert!(o.status.success());
    assert!(data_rows(&stdout(&o)).is_empty());
}

#[test]
fn config_files_load_and_sweep() {
    for (file, sel) in [("isolator.toml", "d2:d1"), ("ndpa.toml", "d2+:d1"), ("dpa.toml", "d2.P:d1.P")] {
        let basis = if sel.contains('.') { "quadrature" } else { "doubled" };
        let o = direktor(&["sweep", "--config", &config(file), "--select", sel, "--basis", basis, "--points", "5"]);
        assert!(o.status.success(), "{file}: {}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(data_rows(&stdout(&o)).len(), 5);
    }
}

#[test]
fn invalid_input_fails_without_partial_output() {
    let dir = std::env::temp_dir().join(format!("direktor-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "modes = [\"a\", \"b\"]\n\n[[ports]]\nmode = \"c\"\nkappa = 1.0\n").unwrap();
    let out = dir.join("out.csv");
    let o = direktor(&[
        "sweep",
        "--config",
        bad.to_str().unwrap(),
        "--select",
        "a:b",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3, column 1") && err.contains("unknown mode `c`"), "{err}");
    assert!(o.stdout.is_empty() && !out.exists());

    for args in [
        &["sweep", "--preset", "isolator", "--select", "d9:d1"][..],
        &["sweep", "--preset", "isolator", "--wmin", "2", "--wmax", "1"],
        &["sweep", "--preset", "nope"],
        &["noise", "--preset", "ndpa", "--param", "C=1.5"],
    ] {
        let o = direktor(args);
        assert!(!o.status.success() && o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn match_recovers_matching_conditions() {
    let o = direktor(&[
        "match",
        "--preset",
        "dpa-aux",
        "--param",
        "kappa_aux=1e4",
        "--free",
        "PX[d1,d2]",
        "--free",
        "PX[d2,d1]",
        "--objective",
        "d1.X:d2.X@0",
        "--objective",
        "d1.P:d2.P@0",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["converged"], serde_json::json!(true));
    for rec in v["records"].as_array().unwrap() {
        let (re, analytic) = (rec["re"].as_f64().unwrap(), rec["analytic_re"].as_f64().unwrap());
        assert!((re - analytic).abs() < 1e-6, "{rec}");
    }
}

#[test]
fn noise_stability_oracle_and_export() {
    let o = direktor(&["noise", "--preset", "dpa-aux", "--param", "kappa_aux=1e6", "--points", "3"]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    let n_add: f64 = rows[1][2].parse().unwrap();
    assert!(n_add.abs() < 1e-9);

    let o = direktor(&["stability", "--preset", "ndpa", "--param", "C=1.5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("# stable: false"));

    let o = direktor(&["oracle", "--preset", "isolator", "--cutoff", "6", "--points", "3", "--t-end", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let dev: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# max_deviation: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(dev < 1e-5);

    let o = direktor(&["export", "--preset", "isolator"]);
    assert!(o.status.success());
    let net = direktor::cli::load_network(&stdout(&o)).unwrap();
    assert_eq!(net, direktor::devices::make_device(&direktor::devices::DeviceParams::IsolatorReduced { gamma: None, kappa: 1.0 }, true).unwrap());
}

#[test]
fn presets_are_listed() {
    let o = direktor(&["presets"]);
    let text = stdout(&o);
    for name in ["isolator", "isolator-3mode", "ndpa", "ndpa-3mode", "dpa", "dpa-aux", "waveguide"] {
        assert!(text.contains(&format!("\n{name},")), "{name}");
    }
}
