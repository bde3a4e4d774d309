use std::fs;
use std::process::{Command, Output};

fn jc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jc-susy"))
        .args(args)
        .env_remove("JC_SUSY_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn spectrum_default_parameters() {
    let o = jc(&["spectrum", "--delta", "3", "--lambda", "1.25"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("kind,n,branch,physicality,energy\n"));
    assert!(text.contains("jc,0,single,physical,-3\n"));
    assert!(text.contains("jc,1,+,physical,4.25\n"));
    assert_eq!(rows(&o).iter().filter(|r| r[3] == "nonphysical").count(), 11);
    // physical rows come first, ascending n then -,+
    let r = rows(&o);
    assert_eq!((r[1][1].as_str(), r[1][2].as_str()), ("1", "-"));
    assert_eq!(r[81][3], "nonphysical");
}

#[test]
fn spectrum_decoupled() {
    let o = jc(&["spectrum", "--delta", "0", "--lambda", "0", "--nmax", "3"]);
    assert!(o.status.success());
    let e: Vec<String> = rows(&o)
        .into_iter()
        .filter(|r| r[3] == "physical")
        .map(|r| r[4].clone())
        .collect();
    assert_eq!(e, ["0", "1", "1", "2", "2", "3", "3"]);
}

#[test]
fn spectrum_is_byte_stable() {
    let a = jc(&["spectrum", "--numeric"]);
    let b = jc(&["spectrum", "--numeric"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(
        stdout(&a).lines().next().unwrap(),
        "kind,n,branch,physicality,energy,numeric,delta_abs"
    );
}

#[test]
fn partners_values_and_reality_condition() {
    let o = jc(&["partners", "--kind", "L1", "--delta", "3", "--lambda", "1.25"]);
    assert!(o.status.success());
    let t = stdout(&o);
    assert!(t.contains("k_constant,-0.218257577073\n"), "{t}");
    assert!(t.contains("target_delta,2.72717802866\n"));
    assert!(t.contains("shift,-1\n"));
    let o = jc(&["partners", "--kind", "L3"]);
    let t = stdout(&o);
    assert!(
        t.contains("k_constant,-0.2\n") && t.contains("target_delta,3.25\n") && t.contains("shift,1\n"),
        "{t}"
    );
    let o = jc(&["partners", "--kind", "L1", "--delta", "1", "--lambda", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("possible if the parameters satisfy"));
}

#[test]
fn hierarchy_stops_at_boundary() {
    let o = jc(&["hierarchy", "--delta", "3", "--lambda", "1.25", "--up", "10"]);
    assert!(o.status.success());
    let nodes: Vec<_> = rows(&o).into_iter().filter(|r| r[0] == "node").collect();
    assert_eq!(nodes.len(), 6);
    assert_eq!(nodes[5][1], "5");
    assert!(String::from_utf8_lossy(&o.stderr).contains("sequence stops at n = 5"));
}

#[test]
fn resonant_chain_json() {
    let o = jc(&["resonant", "--k", "9", "--lambda", "1", "-f", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["status"], "pass");
    assert_eq!(v["results"].as_array().unwrap().len(), 10);
    for (k, r) in v["residuals"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-12, "{k}");
    }
    assert_eq!(v["params"]["lambda"], 1.0);
}

#[test]
fn darboux_exit_codes() {
    assert!(jc(&["darboux", "--kind", "L0"]).status.success());
    // finite differences cannot reach the default grid tolerance at h = 0.006
    assert_eq!(jc(&["darboux", "--kind", "L1", "--rule", "fd"]).status.code(), Some(3));
    assert!(jc(&["darboux", "--kind", "L1", "--rule", "fd", "--tol-grid", "1e-3"])
        .status
        .success());
    assert_eq!(jc(&["darboux", "--seeds", "psi0,psi0"]).status.code(), Some(2));
    assert_eq!(jc(&["darboux", "--seeds", "psi0"]).status.code(), Some(2));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "delta = 1\nlambda = 2\n").unwrap();
    let c = cfg.to_str().unwrap();
    // the file makes L1 impossible; a flag restores it
    assert_eq!(jc(&["-c", c, "partners", "--kind", "L1"]).status.code(), Some(2));
    assert!(jc(&["-c", c, "partners", "--kind", "L1", "--delta", "3"])
        .status
        .success());
    fs::write(&cfg, "unknown = 1\n").unwrap();
    assert_eq!(jc(&["-c", c, "spectrum"]).status.code(), Some(2));
    let missing = dir.path().join("none.cfg");
    assert_eq!(
        jc(&["-c", missing.to_str().unwrap(), "spectrum"]).status.code(),
        Some(4)
    );
}

#[test]
fn env_tolerance() {
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_jc-susy"))
            .args(["partners", "--kind", "L3"])
            .env("JC_SUSY_TOL", tol)
            .output()
            .unwrap()
    };
    // residuals are ~1e-14, so an absurd tolerance fails and a loose one passes
    assert_eq!(run("1e-20").status.code(), Some(3));
    assert!(run("1e-8").status.success());
    assert_eq!(run("nope").status.code(), Some(2));
}

#[test]
fn output_file_and_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = jc(&["spectrum", "-f", "json", "-o", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    for key in ["params", "results", "residuals", "status"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let bad = dir.path().join("no/such/dir/x.csv");
    assert_eq!(jc(&["spectrum", "-o", bad.to_str().unwrap()]).status.code(), Some(4));
}

#[test]
fn figure_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = jc(&["figures", "-o", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for id in [1, 2, 3, 8] {
        assert!(dir.path().join(format!("fig{id}.csv")).exists());
    }
    let fig8 = fs::read_to_string(dir.path().join("fig8.csv")).unwrap();
    // the resonant figure ends in a single double root at -9
    assert!(fig8.contains("fig8,jc,-9,double,nonphysical,-9\n"), "{fig8}");
    let fig3 = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    for panel in ["jc(-1)", "jc(0)", "jc(1)", "ajc(-1)", "ajc(0)", "ajc(1)"] {
        assert!(fig3.contains(&format!("fig3,{panel},")), "{panel}");
    }
}

#[test]
fn verify_passes() {
    let o = jc(&["verify", "--delta", "3", "--lambda", "1.25"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&o).iter().filter(|r| r[2] == "true").count(), 9);
}
