use std::process::{Command, Output};

fn redei(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_redei"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn structure_text() {
    let o = redei(&["structure", "--q", "49", "--chi", "-1", "--m", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"1\":2,\"4\":2,\"20\":2}\n");

    let o = redei(&["structure", "--q", "49", "--chi", "-1", "--m", "1"]);
    assert_eq!(stdout(&o), "{\"1\":50}\n");
}

#[test]
fn structure_with_oracle() {
    let o = redei(&[
        "structure",
        "--q",
        "49",
        "--chi",
        "-1",
        "--m",
        "7",
        "--verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{\"1\":2,\"4\":12}\noracle: agree\n");

    let o = redei(&[
        "structure",
        "--p",
        "7",
        "--k",
        "1",
        "--chi",
        "-1",
        "--m",
        "3",
        "--verify",
        "--a",
        "3",
    ]);
    assert_eq!(stdout(&o), "{\"1\":2,\"2\":3}\noracle: agree\n");

    // 2 is a square mod 7
    let o = redei(&[
        "structure",
        "--q",
        "7",
        "--chi",
        "-1",
        "--m",
        "3",
        "--verify",
        "--a",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn structure_formats() {
    let o = redei(&[
        "structure",
        "--q",
        "49",
        "--chi",
        "1",
        "--m",
        "5",
        "--format",
        "csv",
    ]);
    assert_eq!(stdout(&o), "length,count\n1,6\n2,10\n4,6\n");
    let o = redei(&[
        "structure",
        "--q",
        "49",
        "--chi",
        "1",
        "--m",
        "5",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["structure"]["4"], 6);
    assert_eq!(v["chi"], 1);
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["structure", "--q", "49", "--chi", "-1", "--m", "2"][..],
        &["classes", "--q", "45", "--chi", "1"],
        &["classes", "--q", "49", "--chi", "0"],
        &["pairs", "--q", "16", "--chi", "1"],
    ] {
        assert_eq!(redei(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn pairs_csv() {
    let o = redei(&["pairs", "--q", "49", "--chi", "1", "--format", "csv"]);
    assert_eq!(
        stdout(&o),
        "m,n,line_offset\n5,29,24\n7,31,24\n11,35,24\n13,37,24\n19,43,24\n23,47,24\n"
    );
    let o = redei(&["pairs", "--q", "49", "--chi", "-1", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 42);
}

#[test]
fn isolated_and_classes() {
    let o = redei(&["isolated", "--q", "49", "--chi", "1"]);
    assert_eq!(stdout(&o), "isolated: 1 17 25 41\nformula: 4\n");
    let o = redei(&["classes", "--q", "3", "--chi", "1", "--format", "json"]);
    assert_eq!(
        stdout(&o),
        "{\"q\":3,\"chi\":1,\"classes\":[{\"members\":[1],\"structure\":{\"1\":4}}]}\n"
    );
    let o = redei(&["classes", "--q", "49", "--chi", "-1"]);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 6);
    assert!(out.contains("{7,43}: 2×{•} ⊕ 12×Cyc(4)"));
}

#[test]
fn output_is_stable() {
    let args = ["classes", "--q", "121", "--chi", "1", "--format", "json"];
    assert_eq!(stdout(&redei(&args)), stdout(&redei(&args)));
}

#[test]
fn families() {
    let o = redei(&["family", "p-qmp1", "--p", "3", "--twok", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in [
        "N_8 = 10",
        "N_24 = 22140",
        "N_40 = 87169608",
        "N_120 = 353259652293468362590059312",
    ] {
        assert!(out.contains(line), "{line}");
    }

    let o = redei(&[
        "family", "quarter", "--q", "49", "--chi", "1", "--verify", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pair"], serde_json::json!(["13", "37"]));
    assert_eq!(v["structure"], serde_json::json!({"1": 14, "2": 6, "4": 6}));
    assert_eq!(v["verify"], "agree");

    let o = redei(&["family", "pm2", "--q", "7", "--chi", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("degenerate"));

    let o = redei(&[
        "family",
        "frobenius",
        "--p",
        "3",
        "--k",
        "3",
        "--l1",
        "1",
        "--l2",
        "2",
        "--chi",
        "1",
        "--verify",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify: agree"));
}

#[test]
fn family_preconditions_exit_4() {
    assert_eq!(
        redei(&["family", "quarter", "--q", "11", "--chi", "1"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        redei(&["family", "pm2", "--q", "9", "--chi", "1"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        redei(&["family", "p-qmp1", "--p", "3", "--k", "3", "--chi", "1"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        redei(&[
            "family",
            "frobenius",
            "--p",
            "3",
            "--k",
            "3",
            "--l1",
            "1",
            "--l2",
            "2",
            "--chi",
            "-1"
        ])
        .status
        .code(),
        Some(4)
    );
}

#[test]
fn verify_sweeps() {
    let o = redei(&["verify", "--qmax", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let o = redei(&["verify", "--qmax", "49"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("q = 49 classes: pass (16 checked)"));
    let o = Command::new(env!("CARGO_BIN_EXE_redei"))
        .args(["verify", "--qmax", "30", "--format", "csv"])
        .env("REDEI_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("property,checked,passed\n"));
}
