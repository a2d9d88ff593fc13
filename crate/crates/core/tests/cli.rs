use std::path::Path;
use std::process::Command;

use chernweil::cli;
use chernweil::io::{load_tensor, tensor_to_json};
use serde_json::Value;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["chernweil"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn report(o: &Outcome) -> Value {
    let v: Value = serde_json::from_str(&o.stdout).unwrap_or_else(|e| panic!("bad report {e}: {}", o.stdout));
    let schema: Value = serde_json::from_str(chernweil::report::SCHEMA).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
    v
}

fn gen_to(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).display().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let o = run(&full);
    assert_eq!(o.code, 0, "{}", o.stderr);
    path
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let a = run(&["gen", "2", "3", "11", "--he", "0.5"]);
    let b = run(&["gen", "2", "3", "11", "--he", "0.5"]);
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, run(&["gen", "2", "3", "12", "--he", "0.5"]).stdout);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let t = load_tensor(&path, false).unwrap();
    assert_eq!(tensor_to_json(&t), a.stdout);
}

#[test]
fn check_passes_and_fails_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let he = gen_to(dir.path(), "he.json", &["2", "2", "1", "--he", "-1.25"]);
    let raw = gen_to(dir.path(), "raw.json", &["2", "2", "1"]);

    let o = run(&["check", "he", "--in", &he]);
    assert_eq!(o.code, 0);
    let v = report(&o);
    assert_eq!(v["command"], "check he");
    assert!((v["data"]["lambda"].as_f64().unwrap() + 1.25).abs() < 1e-12);

    let o = run(&["check", "he", "--in", &raw]);
    assert_eq!(o.code, 1);
    assert_eq!(report(&o)["results"][0]["pass"], false);

    let o = run(&["check", "kl", "--in", &raw]);
    assert_eq!(o.code, 2);
    assert_eq!(report(&o)["error"]["kind"], "not_hermite_einstein");

    let o = run(&["check", "kl", "--in", &he]);
    assert_eq!(o.code, 0);
    assert!(report(&o)["data"]["q"].as_f64().unwrap() < 0.0);
}

#[test]
fn strong_flat_is_an_equality_case() {
    let dir = tempfile::tempdir().unwrap();
    let strong = gen_to(dir.path(), "s.json", &["3", "2", "5", "--strong-flat", "--he", "2"]);
    let o = run(&["check", "thm12", "--in", &strong]);
    assert_eq!(o.code, 0);
    let v = report(&o);
    assert!(v["data"]["margin"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(v["data"]["equality"], true);

    let flat = gen_to(dir.path(), "f.json", &["2", "3", "5", "--flat"]);
    let v = report(&run(&["check", "kl", "--in", &flat]));
    assert_eq!(v["data"]["equality"], true);
    let o = run(&["check", "remark41", "--in", &flat]);
    assert_eq!(o.code, 0, "{}", o.stdout);
}

#[test]
fn lhe_profile_on_he_input() {
    let dir = tempfile::tempdir().unwrap();
    let he = gen_to(dir.path(), "he.json", &["2", "2", "3", "--he", "0.75"]);
    let o = run(&["check", "lhe", "--in", &he, "--samples", "50"]);
    assert_eq!(o.code, 0);
    let v = report(&o);
    assert!(v["results"][0]["value"].as_f64().unwrap() < 1e-10);
}

#[test]
fn surface_comparison_requires_he() {
    let dir = tempfile::tempdir().unwrap();
    let he = gen_to(dir.path(), "he.json", &["2", "3", "4", "--he", "1"]);
    let raw = gen_to(dir.path(), "raw.json", &["2", "3", "4"]);
    let o = run(&["check", "surface", "--in", &he]);
    assert_eq!(o.code, 0);
    let v = report(&o);
    assert!(v["data"]["caveat"].is_string());
    assert_eq!(run(&["check", "surface", "--in", &raw]).code, 2);
}

#[test]
fn verify_commands() {
    let dir = tempfile::tempdir().unwrap();
    let raw = gen_to(dir.path(), "raw.json", &["2", "3", "8"]);
    let he = gen_to(dir.path(), "he.json", &["2", "3", "8", "--he", "0.3"]);

    let o = run(&["verify", "pushforward", "--in", &raw, "--samples", "20000"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    assert_eq!(report(&o)["results"].as_array().unwrap().len(), 6);

    assert_eq!(run(&["verify", "identity8", "--in", &he]).code, 0);
    assert_eq!(report(&run(&["verify", "identity8", "--in", &raw]))["error"]["kind"], "not_hermite_einstein");
    assert_eq!(run(&["verify", "identity8", "--in", &raw, "--general"]).code, 0);
    assert_eq!(run(&["verify", "identity9", "--in", &raw, "--k", "2"]).code, 0);

    let o = run(&["verify", "moments", "--r", "3", "--kmax", "2", "--samples", "1e5"]);
    assert_eq!(o.code, 0, "{}", o.stdout);
    report(&o);
}

#[test]
fn moments_command() {
    let o = run(&["moments", "--r", "3", "--lambdas", "1,1,2", "--mus", "2,1,1", "--samples", "2e5"]);
    assert_eq!(o.code, 0);
    let v = report(&o);
    assert_eq!(v["data"]["exact"], "1/30");
    let o = run(&["moments", "--r", "2", "--lambdas", "1", "--mus", "3"]);
    assert_eq!(o.code, 2);
}

#[test]
fn malformed_input_is_located() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"n\": 1,\n  \"r\": 1,\n  \"coeffs\": [ oops ]\n}\n").unwrap();
    let v = report(&run(&["check", "he", "--in", bad.to_str().unwrap()]));
    assert_eq!(v["error"]["kind"], "parse");
    assert!(v["error"]["message"].as_str().unwrap().contains("line 4"));

    let asym = dir.path().join("asym.json");
    std::fs::write(
        &asym,
        r#"{"n": 1, "r": 1, "coeffs": [{"j": 1, "k": 1, "lambda": 1, "mu": 1, "re": 1.0, "im": 0.5}]}"#,
    )
    .unwrap();
    let asym = asym.to_str().unwrap();
    let v = report(&run(&["check", "he", "--in", asym]));
    assert_eq!(v["error"]["kind"], "invalid_tensor");
    assert!(v["error"]["message"].as_str().unwrap().contains("c[1,1,1,1]"));
    assert_eq!(run(&["check", "he", "--in", asym, "--symmetrize"]).code, 0);

    let missing = dir.path().join("missing.json");
    let v = report(&run(&["check", "he", "--in", missing.to_str().unwrap()]));
    assert_eq!(v["error"]["kind"], "io");
}

#[test]
fn usage_errors() {
    let o = run(&["gen", "2", "2", "1", "--flat", "--strong-flat"]);
    assert_eq!(o.code, 2);
    assert!(!o.stderr.is_empty());
    assert_eq!(run(&["check", "nonsense", "--in", "x"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["gen", "0", "2", "1"]).code, 2);
}

#[test]
fn binary_honours_tolerance_override() {
    let dir = tempfile::tempdir().unwrap();
    let raw = gen_to(dir.path(), "raw.json", &["2", "2", "9"]);
    let bin = env!("CARGO_BIN_EXE_chernweil");
    let ok = Command::new(bin).args(["verify", "identity9", "--in", &raw]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let strict = Command::new(bin)
        .args(["verify", "identity9", "--in", &raw])
        .env("CHERNWEIL_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&strict.stdout).unwrap();
    assert_eq!(v["results"][0]["tolerance"].as_f64().unwrap(), 1e-300);
}
