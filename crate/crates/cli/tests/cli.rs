use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn quadstab(args: &[&str]) -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_quadstab"));
    c.args(args);
    for (k, _) in std::env::vars() {
        if k.starts_with("QUADSTAB_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    quadstab(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn schema(name: &str) -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&v).unwrap()
}

/// Run with `--json`, check the exit code and the schema, return the raw text.
fn json_run(dir: &Path, file: &str, args: &[&str], expect: i32, schema_name: &str) -> String {
    let path: PathBuf = dir.join(file);
    let mut full = args.to_vec();
    full.extend(["--json", path.to_str().unwrap()]);
    let out = run(&full);
    assert_eq!(code(&out), expect, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let s = schema(schema_name);
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{args:?} does not match {schema_name}: {msgs:?}");
    }
    text
}

#[test]
fn reports_match_their_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    json_run(d, "q.json", &["construct", "q", "--n", "3", "--m", "1", "--auto-s"], 0, "construct-q.schema.json");
    json_run(
        d,
        "fq.json",
        &["construct", "fq", "--p", "5", "--n", "3", "--m", "0,1", "--sweep-j", "2"],
        0,
        "construct-fq.schema.json",
    );
    json_run(
        d,
        "fq2.json",
        &["construct", "fq", "--p", "3", "--n", "2", "--m", "0,1", "--r", "1"],
        0,
        "construct-fq.schema.json",
    );
    json_run(d, "p.json", &["primitive", "--n", "3", "--density-bound", "2000"], 0, "primitive.schema.json");
    json_run(d, "c.json", &["census", "--gamma", "0", "--m", "1", "--bound", "100000"], 0, "census.schema.json");
    json_run(d, "h.json", &["heuristic", "--bound", "1000", "--digits", "30"], 0, "heuristic.schema.json");
    json_run(d, "v.json", &["verify", "--gamma", "0", "--m", "-2", "--n", "3"], 0, "verify.schema.json");
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // x² − 1: −f(0) = 1 is a square, so neither criterion applies
    let text = json_run(dir.path(), "v.json", &["verify", "--gamma", "0", "--m", "-1", "--n", "2"], 1, "verify.schema.json");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["report"]["irreducible_certified"], false);
    // (x − 3)² is settled: reducible at every level
    let text = json_run(dir.path(), "d.json", &["verify", "--gamma", "3", "--m", "-3", "--n", "3"], 0, "verify.schema.json");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["report"]["reducible_over_q"], true);
    // x² + 1 is stable over Q
    assert_eq!(code(&run(&["verify", "--gamma", "0", "--m", "1", "--n", "4"])), 0);
}

#[test]
fn bad_input_exits_two() {
    // n = 2, m = 1 needs s even
    assert_eq!(code(&run(&["construct", "q", "--n", "2", "--m", "1", "--s", "9"])), 2);
    assert_eq!(code(&run(&["construct", "q", "--n", "2", "--m", "1", "--s", "5"])), 2);
    assert_eq!(code(&run(&["construct", "fq", "--p", "2", "--n", "3", "--m", "0,1"])), 2);
    // even-degree numerator violates the function-field hypotheses
    assert_eq!(code(&run(&["construct", "fq", "--p", "3", "--n", "3", "--m", "0,0,1"])), 2);
    assert_eq!(code(&run(&["construct", "q", "--n", "40", "--m", "1", "--auto-s"])), 2);
    assert_eq!(code(&run(&["primitive", "--n", "1"])), 2);
    assert_eq!(code(&run(&["census", "--gamma", "0", "--m", "1"])), 2);
    let out = quadstab(&["heuristic", "--bound", "10"])
        .env("QUADSTAB_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("QUADSTAB_WORKERS"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = ["census", "--gamma", "0", "--m", "-2", "--bound", "200000"];
    let a = json_run(d, "a.json", &args, 0, "census.schema.json");
    let b = json_run(d, "b.json", &args, 0, "census.schema.json");
    let mut parallel = args.to_vec();
    parallel.extend(["--workers", "3"]);
    let c = json_run(d, "c.json", &parallel, 0, "census.schema.json");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let q = ["primitive", "--n", "4"];
    assert_eq!(
        json_run(d, "p1.json", &q, 0, "primitive.schema.json"),
        json_run(d, "p2.json", &q, 0, "primitive.schema.json")
    );
}

#[test]
fn config_file_then_env_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let cfg = d.join("quadstab.toml");
    std::fs::write(&cfg, "seed = 11\n[census]\nprefix_depth = 12\n").unwrap();
    let out = d.join("o.json");
    let args = ["census", "--gamma", "0", "--m", "1", "--bound", "10000", "--json", out.to_str().unwrap()];
    let read = || -> Value { serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap() };

    let st = quadstab(&args).env("QUADSTAB_CONFIG", &cfg).output().unwrap().status;
    assert!(st.success());
    assert_eq!((read()["seed"].as_u64(), read()["report"]["prefix_depth"].as_u64()), (Some(11), Some(12)));

    let st = quadstab(&args)
        .env("QUADSTAB_CONFIG", &cfg)
        .env("QUADSTAB_SEED", "12")
        .env("QUADSTAB_PREFIX_DEPTH", "15")
        .output()
        .unwrap()
        .status;
    assert!(st.success());
    assert_eq!((read()["seed"].as_u64(), read()["report"]["prefix_depth"].as_u64()), (Some(12), Some(15)));

    let mut with_flags = args.to_vec();
    with_flags.extend(["--seed", "13", "--depth", "18"]);
    let st = quadstab(&with_flags).env("QUADSTAB_SEED", "12").env("QUADSTAB_CONFIG", &cfg).output().unwrap().status;
    assert!(st.success());
    assert_eq!((read()["seed"].as_u64(), read()["report"]["prefix_depth"].as_u64()), (Some(13), Some(18)));

    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    let st = quadstab(&args).env("QUADSTAB_CONFIG", &cfg).output().unwrap().status;
    assert_eq!(st.code(), Some(2));
}

#[test]
fn census_resumes_from_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ck = d.join("ck");
    std::fs::write(d.join("small.toml"), "[census]\nsegment_size = 65536\n").unwrap();
    let args = ["census", "--gamma", "0", "--m", "1", "--bound", "1000000", "--resume", ck.to_str().unwrap()];
    let cfg = d.join("small.toml");
    let json = |name: &str| {
        let out = d.join(name);
        let mut a = args.to_vec();
        a.extend(["--json", out.to_str().unwrap()]);
        let o = quadstab(&a).env("QUADSTAB_CONFIG", &cfg).output().unwrap();
        assert_eq!(code(&o), 0);
        (std::fs::read_to_string(out).unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
    };
    let (first, _) = json("1.json");
    let n = std::fs::read_dir(&ck).unwrap().count();
    assert_eq!(n, 16);
    let (second, table) = json("2.json");
    assert_eq!(first, second);
    assert!(table.contains("16 segments from checkpoints"), "{table}");
}

#[test]
fn table_output_goes_to_stdout() {
    let out = run(&["construct", "q", "--n", "2", "--m", "0", "--s", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("CERTIFIED"));
    assert!(text.contains("gamma"));
}
