use std::process::{Command, Output};

use serde_json::Value;

fn lgcy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgcy"))
        .args(args)
        .output()
        .expect("run lgcy")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn statespace_reports_match() {
    let out = lgcy(&["statespace", "--case", "cubic33", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["match"], Value::Bool(true));
    assert_eq!(v["dim_h3"], 148);
    assert_eq!(v["exact"], Value::Bool(true));
}

#[test]
fn pf_check_hybrid_quadric() {
    let out = lgcy(&[
        "pf-check",
        "--case",
        "quadric2222",
        "--side",
        "hybrid",
        "--order",
        "40",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["zero"], Value::Bool(true));
    assert_eq!(v["verified_through"], "39/1");
    assert_eq!(v["residual"]["terms"].as_array().unwrap().len(), 0);
}

#[test]
fn iseries_order_zero_is_z() {
    let out = lgcy(&[
        "iseries", "--case", "cubic33", "--side", "hybrid", "--order", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert_eq!(terms[0]["f"], "1/1");
    assert_eq!(terms[0]["z"][0]["exp"], 1);
    assert_eq!(terms[0]["z"][0]["H"][0], "1/1");
    assert_eq!(terms[0]["z"][0]["H"][1], "0/1");
}

#[test]
fn csv_coefficient_table() {
    let out = lgcy(&[
        "iseries",
        "--case",
        "quadric2222",
        "--side",
        "hybrid",
        "--order",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("f,sector,z_exp,H_power,value"));
    assert_eq!(lines.next(), Some("1/1,1,1,0,1/1"));
    // csv is refused where there is no coefficient table
    let out = lgcy(&["statespace", "--case", "cubic33", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        lgcy(&["statespace", "--case", "cubic33", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lgcy(&["nosuchcommand"]).status.code(), Some(2));
    assert_eq!(
        lgcy(&["statespace", "--case", "cubic7"]).status.code(),
        Some(2)
    );
    assert_eq!(lgcy(&["statespace"]).status.code(), Some(2));
    assert_eq!(
        lgcy(&["connect", "--case", "cubic33", "--digits", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        lgcy(&["moduli", "ntheta", "--case", "cubic33", "--mult", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(lgcy(&["--help"]).status.code(), Some(0));
}

#[test]
fn computation_errors_are_structured() {
    let out = lgcy(&["iseries", "--case", "quintic", "--side", "hybrid"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "unsupported_case");

    let out = lgcy(&["moduli", "ntheta", "--case", "cubic33", "--mult", "1,1"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "invariant_violation");

    let out = lgcy(&[
        "connect",
        "--case",
        "cubic33",
        "--digits",
        "30",
        "--path",
        "1e-4;1.3717e-3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "invalid_input");

    let out = lgcy(&[
        "monodromy",
        "--case",
        "cubic33",
        "--digits",
        "30",
        "--path",
        "1e-4;1.3717e-3+1e-5j;1e-4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"]["kind"], "path_too_close");
}

#[test]
fn moduli_queries() {
    let v = json(&lgcy(&[
        "moduli",
        "selection",
        "--case",
        "cubic33",
        "--mult",
        "1,2,1",
    ]));
    assert_eq!(v["result"], Value::Bool(true));
    let v = json(&lgcy(&[
        "moduli", "degree", "--case", "cubic33", "--mult", "1",
    ]));
    assert_eq!(v["result"]["value"], "-2/3");
    assert_eq!(v["result"]["integral"], Value::Bool(false));
    let v = json(&lgcy(&[
        "moduli", "ntheta", "--case", "cubic33", "--mult", "1,2",
    ]));
    assert_eq!(v["result"], 0);
    let v = json(&lgcy(&[
        "moduli",
        "vdim",
        "--case",
        "quadric2222",
        "--mult",
        "1,1,1",
    ]));
    assert_eq!(v["result"]["direct"], "3/1");
    assert_eq!(v["result"]["riemann_roch"], "3/1");
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "case = \"quadric2222\"\nside = \"hybrid\"\norder = 4\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();

    let v = json(&lgcy(&["--config", c, "iseries"]));
    assert_eq!(v["case"], "quadric2222");
    assert_eq!(v["f_max"], "5/1");

    let v = json(&lgcy(&[
        "--config", c, "iseries", "--case", "cubic33", "--order", "1",
    ]));
    assert_eq!(v["case"], "cubic33");
    assert_eq!(v["side"], "hybrid");
    assert_eq!(v["f_max"], "2/1");

    std::fs::write(&cfg, "case = \"cubic33\"\ncolour = \"red\"\n").unwrap();
    assert_eq!(lgcy(&["--config", c, "statespace"]).status.code(), Some(2));
}

#[test]
fn output_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("yuk.json");
    let out = lgcy(&[
        "yukawa",
        "--case",
        "cubic33",
        "--order",
        "4",
        "--output",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["instanton_numbers"][0], "1053/1");

    let args = [
        "mirror-map",
        "--case",
        "cubic33",
        "--side",
        "hybrid",
        "--order",
        "6",
    ];
    assert_eq!(lgcy(&args).stdout, lgcy(&args).stdout);
    let args = ["connect", "--case", "quadric2222", "--digits", "30"];
    let a = lgcy(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, lgcy(&args).stdout);
    let v = json(&a);
    assert_eq!(v["digits"], 30);
    assert_eq!(v["exact"], Value::Bool(false));
    assert_eq!(v["matrix"].as_array().unwrap().len(), 4);
}

#[test]
fn monodromy_zero_loop_json() {
    let out = lgcy(&[
        "monodromy",
        "--case",
        "cubic33",
        "--around",
        "zero",
        "--digits",
        "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let m = v["matrix"].as_array().unwrap();
    // (0,1) entry is 2πi
    let e = m[0][1].as_str().unwrap();
    assert!(e.contains("+6.2831853071795864769252867665"), "{e}");
}

#[test]
fn mirror_map_numeric_check() {
    let out = lgcy(&[
        "mirror-map",
        "--case",
        "cubic33",
        "--side",
        "hybrid",
        "--order",
        "9",
        "--numeric-check",
        "--digits",
        "50",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["numeric_check"]["pass"], Value::Bool(true));
    assert_eq!(v["digits"], 50);
    assert_eq!(v["normal_form"], Value::Bool(true));
}
