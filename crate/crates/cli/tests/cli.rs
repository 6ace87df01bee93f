use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use serde_json::{json, Value};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

struct Run {
    code: i32,
    stdout: String,
    report: Value,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_onesided")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let report = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}"));
    Run {
        code: out.status.code().unwrap(),
        stdout,
        report,
    }
}

fn on(cmd: &str, file: &str) -> Run {
    run(&[cmd, fixture(file).to_str().unwrap()])
}

fn coeffs(v: &Value) -> Vec<&str> {
    v["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect()
}

#[test]
fn decide_anti_diagonal_fails() {
    let r = on("decide", "anti_diagonal.json");
    assert_eq!(r.code, 3);
    assert_eq!(r.report["verdict"], "FailsB");
    assert_eq!(r.report["route_ii"]["holds"], false);
    assert_eq!(r.report["route_iii"]["dense"], false);
    let cert = &r.report["certificate"];
    assert_eq!(coeffs(&cert["delta"]), ["1"]);
    assert_eq!(coeffs(&cert["epsilon0"]), ["1/2"]);
    assert_eq!(cert["epsilon0"]["decimal"], "0.500000000000000000000000000000");
}

#[test]
fn decide_dense_pair_holds() {
    let r = on("decide", "sqrt2_pair.json");
    assert_eq!(r.code, 0);
    assert_eq!(r.report["verdict"], "HoldsB");
    assert!(r.report["certificate"].is_null());
}

#[test]
fn gordan_single_row() {
    let r = on("gordan", "gordan.json");
    assert_eq!(r.code, 0);
    assert_eq!(r.report["alternative"], "ii");
    assert_eq!(r.report["x"], json!(["1"]));
    assert_eq!(r.report["verified"], true);
}

#[test]
fn farkas_is_verified() {
    let r = on("farkas", "farkas.json");
    assert_eq!(r.code, 0);
    assert_eq!(r.report["verified"], true);
}

#[test]
fn reducible_polynomial_is_an_input_error() {
    let r = on("decide", "reducible_field.json");
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], "NotIrreducible");
    assert_eq!(r.report["error"]["path"], "/field/min_poly");
}

#[test]
fn malformed_inputs_report_pointers() {
    let cases = [
        (r#"{"ambient_n": 2, "generators_H": [[1, -1], [2, "x"]]}"#, "/generators_H/1/1"),
        (r#"{"ambient_n": 2, "generators_H": [[1, -1, 0]]}"#, "/generators_H/0"),
        (r#"{"generators_H": [[1]]}"#, "/ambient_n"),
        (r#"{"ambient_n": 1, "unit": ["-1"], "generators_H": [[1]]}"#, "/unit/0"),
        (r#"{"field": {"min_poly": [-2, 0, 1], "interval": [-2, 2]}, "ambient_n": 1, "generators_H": [[1]]}"#, "/field/interval"),
        (r#"{"ambient_n": 1, "#, ""),
    ];
    for (i, (doc, path)) in cases.iter().enumerate() {
        let file = scratch(&format!("malformed_{i}.json"), doc);
        let r = run(&["decide", file.to_str().unwrap()]);
        assert_eq!(r.code, 2, "{doc}");
        assert_eq!(r.report["error"]["path"], *path, "{doc}");
    }
}

#[test]
fn certificates_round_trip_through_verify_cert() {
    for (file, doc) in [
        ("anti_diagonal.json", None),
        ("weighted.json", Some(r#"{"ambient_n": 2, "unit": [1, 2], "generators_H": [[2, -1]]}"#)),
        ("segment.json", Some(r#"{"ambient_n": 3, "generators_H": [[1, -1, 0], [0, 3, -3]]}"#)),
    ] {
        let problem = match doc {
            Some(d) => scratch(file, d),
            None => fixture(file),
        };
        let p = problem.to_str().unwrap();
        let decided = run(&["decide", p]);
        assert_eq!(decided.code, 3, "{file}");
        let report = scratch(&format!("report_{file}"), &decided.stdout);
        let r = run(&["verify-cert", p, "--certificate", report.to_str().unwrap(), "--radius", "4"]);
        assert_eq!(r.code, 0, "{}", r.stdout);
        assert_eq!(r.report["valid"], true);

        let mut tampered = decided.report.clone();
        tampered["certificate"]["epsilon0"] = json!("1");
        let bad = scratch(&format!("tampered_{file}"), &tampered.to_string());
        let r = run(&["verify-cert", p, "--certificate", bad.to_str().unwrap()]);
        assert_eq!(r.code, 3);
        assert_eq!(r.report["valid"], false);
    }
}

#[test]
fn embedded_certificate_is_checked() {
    let decided = on("decide", "anti_diagonal.json");
    let doc = json!({
        "ambient_n": 2,
        "generators_H": [[1, -1]],
        "certificate": decided.report["certificate"],
    });
    let file = scratch("embedded.json", &doc.to_string());
    let r = run(&["verify-cert", file.to_str().unwrap(), "--moduli", "2,7"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["moduli"], json!(["2", "7"]));
}

#[test]
fn reports_are_byte_identical() {
    for (cmd, file) in [
        ("decide", "sqrt2_pair.json"),
        ("witness", "sqrt2_pair.json"),
        ("unperforated", "holey.json"),
        ("face", "anti_diagonal.json"),
    ] {
        let a = on(cmd, file);
        let b = on(cmd, file);
        assert_eq!(a.stdout, b.stdout, "{cmd} {file}");
    }
    let p = fixture("sqrt2_pair.json");
    let threaded = run(&["--threads", "4", "decide", p.to_str().unwrap()]);
    assert_eq!(threaded.report, on("decide", "sqrt2_pair.json").report);
}

#[test]
fn witness_exit_codes() {
    let r = on("witness", "sqrt2_pair.json");
    assert_eq!(r.code, 0);
    assert_eq!(r.report["status"], "Found");
    assert_eq!(r.report["parameters"]["epsilon"], "1/100");

    let p = fixture("sqrt2_pair.json");
    let p = p.to_str().unwrap();
    let r = run(&["witness", p, "--no-structured", "--budget", "2", "--m", "7", "--epsilon", "1/1000"]);
    assert_eq!(r.code, 4);
    assert_eq!(r.report["status"], "BudgetExhausted");

    let r = run(&["witness", p, "--h=-3,2", "--m", "3", "--epsilon", "1/10"]);
    assert_eq!(r.code, 0);
    assert_eq!(r.report["witness"]["h_coeffs"], json!(["-3", "2"]));

    let a = fixture("anti_diagonal.json");
    let r = run(&["witness", a.to_str().unwrap(), "--h", "1"]);
    assert_eq!(r.code, 3);
    assert_eq!(r.report["status"], "NoWitnessExists");

    let r = run(&["witness", a.to_str().unwrap(), "--h", "1", "--m", "1"]);
    assert_eq!(r.code, 2);
}

#[test]
fn ordered_layer_commands() {
    let r = on("unperforated", "holey.json");
    assert_eq!(r.code, 3);
    assert_eq!(r.report["purity"]["status"], "TorsionFree");
    assert_eq!(r.report["convexity"], "ConvexByTrivialIntersection");
    assert_eq!(r.report["unperforation"]["status"], "Perforated");
    assert_eq!(r.report["instance_verified"], true);

    let r = on("refinable", "holey.json");
    assert_eq!(r.code, 3);
    assert_eq!(r.report["status"], "NotRefinable");
    assert_eq!(r.report["kernel_coeffs"], json!(["0", "1", "0"]));
    let r = on("refinable", "refinable.json");
    assert_eq!(r.code, 0);
    assert_eq!(r.report["status"], "Refinable");

    let z2 = scratch(
        "z2_strict.json",
        r#"{"ambient_n": 2, "generators_G": [[1, 0], [0, 1]], "trace": [1, 0]}"#,
    );
    let r = run(&["refinable", z2.to_str().unwrap()]);
    assert_eq!(r.code, 2);
    assert_eq!(r.report["error"]["kind"], "NotDense");
}

#[test]
fn density_face_and_property_a() {
    let r = on("density", "holey.json");
    assert_eq!(r.report["classification"]["class"], "Discrete");
    let doc = r#"{"field": {"min_poly": [-2, 0, 1], "interval": [1, 2]}, "ambient_n": 1,
                  "generators_H": [[1], [[0, 1]]], "trace": [1]}"#;
    let file = scratch("dense_line.json", doc);
    let r = run(&["density", file.to_str().unwrap()]);
    assert_eq!(r.report["classification"]["class"], "Dense");
    let r = run(&["property-a", file.to_str().unwrap()]);
    assert_eq!((r.code, &r.report["holds"]), (0, &json!(true)));

    let r = on("property-a", "anti_diagonal.json");
    assert_eq!((r.code, &r.report["m"]), (3, &json!(["1"])));
    let r = on("face", "anti_diagonal.json");
    assert_eq!(r.report["face"]["support"], json!([0, 1]));
    assert_eq!(r.report["z_set"]["empty"], false);

    let z2 = scratch("z2.json", r#"{"ambient_n": 2, "generators_H": [[1, 0], [0, 1]]}"#);
    let r = run(&["face", z2.to_str().unwrap()]);
    assert_eq!(r.report["z_set"]["empty"], true);
    assert_eq!(r.report["face"]["support"], json!([]));
}

#[test]
fn stdin_and_timing() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_onesided"))
        .args(["--timing", "decide", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"ambient_n": 3, "generators_H": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["verdict"], "HoldsB");
    assert!(report["timing"]["elapsed_ms"].is_number());
    assert!(on("decide", "anti_diagonal.json").report.get("timing").is_none());
}
