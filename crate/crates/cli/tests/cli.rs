use std::path::Path;
use std::process::Command as Proc;

use boettcher_cli::{parse_config, run_command, Command, ConfigError, Overrides, Report, Status, SCHEMA};
use boettcher_core::numeric::{int, rat};
use serde_json::Value;

const WORKED: &str = "f = [\"1\",\"1\",\"0\",\"1\"]\ng = [\"1\",\"0\",\"1\"]\n";

fn run_bin(dir: &Path, args: &[&str]) -> (i32, Value, Option<String>) {
    let out = dir.join("report.json");
    let _ = std::fs::remove_file(out.with_extension("csv"));
    let status = Proc::new(env!("CARGO_BIN_EXE_boettcher"))
        .args(args)
        .arg("--out")
        .arg(&out)
        .status()
        .expect("binary runs");
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let csv = std::fs::read_to_string(out.with_extension("csv")).ok();
    (status.code().unwrap(), report, csv)
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn parse_worked_example() {
    let c = parse_config(WORKED).unwrap();
    assert_eq!((c.d, c.e), (Some(3), Some(2)));
    assert!(c.correspondence().unwrap().is_polarized());
    assert_eq!(c.prime, 5);
    assert_eq!(c.weight, "12/1");
    assert_eq!(c.alpha0, "1/5");
}

#[test]
fn parse_errors() {
    let e = parse_config("f = [\"1\",\"1\"]\ng = [\"0\",\"0\",\"1\"]\n").unwrap_err();
    assert!(matches!(&e, ConfigError::Validation(m) if m.contains("not polarized")), "{e}");
    let e = parse_config("f = [\"1/0\",\"0\",\"1\"]\ng = [\"0\",\"1\"]\n").unwrap_err();
    assert!(matches!(&e, ConfigError::Parse { field: Some(f), .. } if f == "f[0]"), "{e}");
    let e = parse_config("f = [\"0\",\"0\",\"2\"]\ng = [\"0\",\"1\"]\n").unwrap_err();
    assert!(matches!(&e, ConfigError::Validation(m) if m.contains("monic")), "{e}");
    let e = parse_config(&format!("{WORKED}prime = 9\n")).unwrap_err();
    assert!(matches!(&e, ConfigError::Validation(m) if m.contains("bad prime")), "{e}");
    let e = parse_config(&format!("{WORKED}\n[orbits]\nlevel = 3\n")).unwrap_err();
    assert!(matches!(&e, ConfigError::Parse { line: Some(5), .. }), "{e}");
    let e = parse_config("weight = = 3\n").unwrap_err();
    assert_eq!(e.code(), "parse_error");
    let e = parse_config(&format!("{WORKED}[eval]\nalpha0 = \"x\"\n")).unwrap_err();
    assert!(matches!(&e, ConfigError::Parse { field: Some(f), .. } if f == "eval.alpha0"), "{e}");
    assert!(parse_config("f = [\"0\",\"1\"]\n").is_err());
}

#[test]
fn resolution_order() {
    let text = format!("{WORKED}weight = 8\nprime = 7\n\n[orbits]\nprime = 11\nlevels = 3\n");
    let c = parse_config(&text).unwrap();
    let orbits = c.resolve(Command::Orbits, &Overrides::default()).unwrap();
    assert_eq!((orbits.prime, orbits.levels, orbits.weight.as_str()), (11, 3, "8/1"));
    assert_eq!(orbits.alpha0, "1/11");
    let xi = c.resolve(Command::Xi, &Overrides::default()).unwrap();
    assert_eq!((xi.prime, xi.levels), (7, 6));
    let flags = Overrides { levels: Some(9), alpha0: Some(rat(1, 121)), weight: Some(int(4)), ..Default::default() };
    let r = c.resolve(Command::Orbits, &flags).unwrap();
    assert_eq!((r.prime, r.levels, r.weight.as_str(), r.alpha0.as_str()), (11, 9, "4/1", "1/121"));
    assert!(c.resolve(Command::Xi, &Overrides { prime: Some(4), ..Default::default() }).is_err());
}

#[test]
fn exit_codes() {
    assert_eq!(
        [Status::Ok, Status::VerificationFailed, Status::HypothesisViolated, Status::Error].map(Status::exit_code),
        [0, 1, 2, 3]
    );
    let b = parse_config("f = [\"0\",\"0\",\"0\",\"1\"]\ng = [\"0\",\"0\",\"1\"]\n").unwrap();
    let o = run_command(Command::VerifyFormal, &b.resolve(Command::VerifyFormal, &Overrides::default()).unwrap());
    assert_eq!(o.status, Status::Ok);
    assert_eq!(o.result["main"]["conjugacy"]["residual_terms"], Value::Array(vec![]));
    assert_eq!(o.result["main"]["conjugacy"]["verified_weight"], "exact");
    let empty = parse_config("").unwrap().resolve(Command::Xi, &Overrides::default()).unwrap();
    assert_eq!(run_command(Command::Xi, &empty).status, Status::Error);
}

#[test]
fn binary_verify_formal_power_maps() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f = [\"0\",\"0\",\"0\",\"1\"]\ng = [\"0\",\"0\",\"1\"]\n");
    let (code, report, _) = run_bin(dir.path(), &["verify-formal", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(report["schema"], SCHEMA);
    assert_eq!(report["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(report["config"]["f"][3], "1/1");
    assert_eq!(report["result"]["main"]["inverse"]["residual_terms"], Value::Array(vec![]));
}

#[test]
fn binary_orbits_not_coprime() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "f = [\"0\",\"0\",\"0\",\"0\",\"1\"]\ng = [\"0\",\"0\",\"1\"]\n");
    let (code, report, _) = run_bin(dir.path(), &["orbits", "--config", &cfg, "--levels", "3"]);
    assert_eq!(code, 2);
    assert_eq!(report["status"], "hypothesis_violated");
    assert_eq!(report["result"]["hypothesis"], "coprime degrees");
    assert_eq!(report["result"]["lower_bound"], 8);
}

#[test]
fn binary_orbits_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), WORKED);
    let (code, report, csv) = run_bin(dir.path(), &["orbits", "--config", &cfg, "--alpha0", "1/1953125", "--levels", "4"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["ends_orbits"], 9);
    assert_eq!(csv.unwrap(), "level,orbits,model_dependent\n0,1,true\n1,3,true\n2,9,true\n3,9,true\n4,9,true\n");
    let (code, report, _) = run_bin(dir.path(), &["orbits", "--config", &cfg, "--alpha0", "3"]);
    assert_eq!(code, 2);
    assert_eq!(report["result"]["hypothesis"], "non-integral alpha");
    let (code, _, _) = run_bin(dir.path(), &["orbits", "--config", &cfg, "--prime", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_iso_ede() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report, csv) = run_bin(dir.path(), &["iso-ede", "--e", "2", "--d", "3", "--levels", "15"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["passed"], true);
    assert_eq!(report["result"]["bijections"].as_array().unwrap().len(), 14);
    let csv = csv.unwrap();
    assert!(csv.starts_with("table,i,j,value\n"));
    assert_eq!(csv.lines().filter(|l| l.starts_with("a,")).count(), 16 * 17 / 2);
    let (code, _, _) = run_bin(dir.path(), &["iso-ede", "--e", "2", "--d", "4"]);
    assert_eq!(code, 2);
}

#[test]
fn binary_padic_commands() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{WORKED}weight = 8\n\n[verify-numeric]\nalpha0 = \"1/625\"\n"));
    let (code, report, csv) = run_bin(dir.path(), &["verify-numeric", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["conjugacy"]["valuation_base"], "4/1");
    assert!(csv.unwrap().starts_with("index,valuation,tower_level,unit_digits\n0,-4/1,0,"));
    let (code, report, _) = run_bin(dir.path(), &["eval", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["norm_identity"]["passed"], true);
    assert_eq!(report["result"]["value"]["valuation"], "1/1");
    let (code, report, _) = run_bin(dir.path(), &["radius", "--config", &cfg]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["radius"], "0/1");
    let (code, report, _) = run_bin(dir.path(), &["eval", "--config", &cfg, "--alpha0", "25"]);
    assert_eq!(code, 2);
    assert_eq!(report["error"]["code"], "outside_region");
}

#[test]
fn binary_errors() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.toml");
    let (code, report, _) = run_bin(dir.path(), &["xi", "--config", missing.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert_eq!(report["error"]["code"], "io_error");
    let cfg = write_config(dir.path(), "f = [\"1/0\",\"1\"]\ng = [\"1\"]\n");
    let (code, report, _) = run_bin(dir.path(), &["xi", "--config", &cfg]);
    assert_eq!(code, 3);
    assert_eq!(report["error"]["code"], "parse_error");
    assert_eq!(report["schema"], SCHEMA);
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{WORKED}weight = 6\n"));
    let read = |jobs: &str| {
        let (code, _, csv) = run_bin(dir.path(), &["verify-formal", "--config", &cfg, "--batch", "6", "--seed", "3", "--jobs", jobs]);
        assert_eq!(code, 0);
        (std::fs::read(dir.path().join("report.json")).unwrap(), csv)
    };
    let a = read("1");
    assert_eq!(a, read("1"));
    assert_eq!(a, read("4"));
    let c = parse_config(&format!("{WORKED}weight = 6\n")).unwrap();
    let cfg = c.resolve(Command::Xi, &Overrides::default()).unwrap();
    let one = Report::new(Some(Command::Xi), Some(cfg.clone()), &run_command(Command::Xi, &cfg)).to_json_string();
    let two = Report::new(Some(Command::Xi), Some(cfg.clone()), &run_command(Command::Xi, &cfg)).to_json_string();
    assert_eq!(one, two);
}
