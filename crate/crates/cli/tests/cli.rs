use std::process::{Command, Output};

fn divsq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divsq"))
        .args(args)
        .env_remove("DIVSQ_MEMORY_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> serde_json::Value {
    let err = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(err.lines().count(), 1, "stderr: {err}");
    serde_json::from_str(err.trim()).expect("machine-parseable error line")
}

#[test]
fn sum_mean_square_json() {
    let o = divsq(&[
        "sum", "--fn", "d2", "--x", "10", "--method", "fast", "--format", "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["x"], 10);
    assert_eq!(v["function"], "d2");
    assert_eq!(v["method"], "mobius_weighted");
    assert_eq!(v["value"], "83");
    assert!(v["elapsed_ms"].is_number());
}

#[test]
fn sum_methods_and_functions() {
    for (f, method, want_method, value) in [
        ("d", "fast", "hyperbola", "27"),
        ("d", "sieve", "sieve", "27"),
        ("dk:3", "fast", "recursion", "13"),
        ("dk:4", "fast", "dirichlet_square", "39"),
        ("d2", "sieve", "sieve", "83"),
    ] {
        let x = match f {
            "dk:3" => "4",
            "dk:4" => "6",
            _ => "10",
        };
        let o = divsq(&[
            "sum",
            "--fn",
            f,
            "--x",
            x,
            "--method",
            method,
            "--deterministic",
        ]);
        assert!(o.status.success(), "{f} {method}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["method"], want_method);
        assert_eq!(v["value"], value);
        assert!(v.get("elapsed_ms").is_none());
    }
}

#[test]
fn sum_large_value_is_a_string() {
    let o = divsq(&["sum", "--fn", "d", "--x", "10000000000", "--deterministic"]);
    assert_eq!(
        stdout(&o).trim(),
        r#"{"x":10000000000,"function":"d","method":"hyperbola","value":"231802823220"}"#
    );
}

#[test]
fn sum_zero_is_usage_error() {
    let o = divsq(&["sum", "--fn", "d2", "--x", "0", "--format", "json"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
    assert!(o.stdout.is_empty());
}

#[test]
fn unknown_command_and_flag_are_usage_errors() {
    for args in [
        &["transmogrify"][..],
        &["sum", "--fn", "d", "--x", "3", "--nope"],
        &[],
    ] {
        let o = divsq(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr_json(&o)["error"], "usage");
    }
}

#[test]
fn memory_cap_is_computation_error() {
    let o = divsq(&[
        "sieve",
        "--limit",
        "100000",
        "--fn",
        "d",
        "--memory-cap",
        "1000",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let e = stderr_json(&o);
    assert_eq!(e["error"], "computation");
    assert!(e["message"].as_str().unwrap().contains("1000 bytes"));

    let o = Command::new(env!("CARGO_BIN_EXE_divsq"))
        .args(["sieve", "--limit", "100000", "--fn", "d"])
        .env("DIVSQ_MEMORY_CAP", "1000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn overflow_is_computation_error() {
    let o = divsq(&["sieve", "--limit", "4096", "--fn", "dk:1000000"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr_json(&o)["message"]
        .as_str()
        .unwrap()
        .contains("overflow"));
}

#[test]
fn verify_convolution() {
    let o = divsq(&["verify", "--identity", "convolution", "--limit", "1000"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["summary"], "1000/1000 ok");
    assert_eq!(v["checked"], 1000);

    let o = divsq(&[
        "verify",
        "--identity",
        "mobius-sum",
        "--limit",
        "500",
        "--format",
        "csv",
    ]);
    assert_eq!(
        stdout(&o),
        "identity,limit,checked,passed,status\nmobius-sum,500,500,500,ok\n"
    );
}

#[test]
fn sieve_csv_and_json() {
    let o = divsq(&["sieve", "--limit", "10", "--fn", "d", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "n,value\n1,1\n2,2\n3,2\n4,3\n5,2\n6,4\n7,2\n8,4\n9,3\n10,4\n"
    );
    let o = divsq(&["sieve", "--limit", "6", "--fn", "mu"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(
        v["values"],
        serde_json::json!(["1", "-1", "-1", "0", "-1", "1"])
    );
}

#[test]
fn envelope_and_fit_reports() {
    let o = divsq(&[
        "envelope", "--claim", "s", "--xmin", "10", "--xmax", "10000", "--points", "4",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["claim"], "s");
    assert_eq!(v["samples"][0]["exact"], "83");
    assert_eq!(v["samples"].as_array().unwrap().len(), 4);

    let o = divsq(&[
        "envelope", "--claim", "eq4", "--xmin", "10", "--xmax", "1000", "--points", "3",
        "--format", "csv",
    ]);
    let text = stdout(&o);
    assert!(
        text.starts_with("x,exact,main,normalizer,ratio\n10,27,"),
        "{text}"
    );

    let o = divsq(&[
        "fit", "--xmin", "100", "--xmax", "1000000", "--points", "12",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["count"], 12);
    let a3 = v["model"]["a3"].as_f64().unwrap();
    assert!((a3 - 0.1013).abs() < 0.01, "{a3}");

    let o = divsq(&["fit", "--xmin", "100", "--xmax", "1000", "--points", "12"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn deterministic_output_is_byte_identical() {
    for args in [
        &["sum", "--fn", "d2", "--x", "123456", "--deterministic"][..],
        &[
            "envelope", "--claim", "d4", "--xmin", "100", "--xmax", "100000", "--points", "7",
        ],
        &[
            "fit", "--xmin", "100", "--xmax", "1000000", "--points", "10", "--format", "csv",
        ],
        &["bench", "--suite", "hyperbola", "--deterministic"],
    ] {
        assert_eq!(divsq(args).stdout, divsq(args).stdout, "{args:?}");
    }
}

#[test]
fn out_path_receives_report() {
    let dir = std::env::temp_dir().join(format!("divsq-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("s.json");
    let o = divsq(&[
        "sum",
        "--fn",
        "d2",
        "--x",
        "10",
        "--deterministic",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains(r#""value":"83""#));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bench_against_baseline() {
    let o = divsq(&["bench", "--suite", "hyperbola"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["results"][2]["value"], "231802823220");

    let dir = std::env::temp_dir().join(format!("divsq-bench-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // A baseline claiming 1 µs is clamped to the 1 ms noise floor.
    let fast = serde_json::json!({"results": [{"x": 10000000000u64, "elapsed_ms": 0.001}]});
    let path = dir.join("baseline.json");
    std::fs::write(&path, fast.to_string()).unwrap();
    let o = divsq(&[
        "bench",
        "--suite",
        "hyperbola",
        "--baseline",
        path.to_str().unwrap(),
    ]);
    // D2(1e10) takes well under 2 ms, so this baseline still passes.
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let slow_floor = serde_json::json!({"results": [{"x": 1000000000u64, "elapsed_ms": -1.0}]});
    std::fs::write(&path, slow_floor.to_string()).unwrap();
    let o = divsq(&[
        "bench",
        "--suite",
        "s",
        "--baseline",
        path.to_str().unwrap(),
    ]);
    // clamped to the noise floor; S(1e9) takes far more than 2 ms
    assert_eq!(
        o.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    assert_eq!(stderr_json(&o)["error"], "computation");
    std::fs::remove_dir_all(&dir).unwrap();
}
