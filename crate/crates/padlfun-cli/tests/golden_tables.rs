//! End-to-end golden tests: run the actual binary and diff its stdout
//! against the published tables.

use std::process::Command;

fn run(args: &[&str]) -> (String, String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_padlfun"))
        .args(args)
        .env(
            "PADL_CACHE_DIR",
            std::env::temp_dir().join("padlfun-test-cache"),
        )
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

#[test]
fn zetap_table_paper_mode_is_byte_exact() {
    let (stdout, stderr, code) = run(&["zetap-table", "--paper"]);
    assert_eq!(code, 0, "stderr: {stderr}");
    let expected = "\
2\t25 + 24*37 + 24*37^2 + 24*37^3 + 24*37^4 + O(37^5)
4\t9 + 3*37 + 9*37^3 + 3*37^4 + O(37^5)
6\t7 + 30*37 + 36*37^2 + 36*37^3 + 36*37^4 + O(37^5)
8\t18 + 6*37 + O(37^5)
10\t16 + 33*37 + 36*37^2 + 36*37^3 + 36*37^4 + O(37^5)
12\t8 + 25*37 + 28*37^2 + 23*37^3 + O(37^5)
14\t25 + 36*37 + 36*37^2 + 36*37^3 + 36*37^4 + O(37^5)
16\t6 + 16*37 + 31*37^2 + 29*37^3 + 20*37^4 + O(37^5)
18\t3 + 4*37 + 10*37^2 + 32*37^3 + 25*37^4 + O(37^5)
20\t11 + 13*37 + 19*37^2 + 36*37^3 + 12*37^4 + O(37^5)
22\t1 + 26*37 + 15*37^2 + 35*37^3 + 9*37^4 + O(37^5)
24\t16 + 28*37 + 24*37^2 + 27*37^3 + 31*37^4 + O(37^5)
26\t4 + 17*37 + 25*37^2 + 25*37^3 + 19*37^4 + O(37^5)
28\t22 + 36*37 + 8*37^2 + 4*37^3 + 33*37^4 + O(37^5)
30\t22 + 5*37 + 35*37^2 + 9*37^3 + 5*37^4 + O(37^5)
32\t36*37^-1 + 28 + 3*37 + 19*37^2 + 18*37^3 + O(37^4)
34\t20 + 37 + 30*37^2 + 15*37^3 + 22*37^4 + O(37^5)
36\t36*37 + 29*37^2 + 35*37^3 + 5*37^4 + 37^5 + O(37^6)
";
    assert_eq!(stdout, expected);
}

#[test]
fn mass_values_and_table() {
    let (stdout, _, code) = run(&["mass", "--rank", "8"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "1/696729600");
    let (stdout, _, code) = run(&["mass", "--k", "8"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "691/277667181515243520000");

    let (stdout, _, code) = run(&["mass-table", "--max", "10", "--factor"]);
    assert_eq!(code, 0);
    let expected = "\
2\t1
4\t1
6\t1
8\t[691, 1]
10\t[691, 1; 3617, 1; 43867, 1]
";
    assert_eq!(stdout, expected);
}

#[test]
fn theta_e8_expansion() {
    let (stdout, _, code) = run(&["theta-e8", "--cutoff", "8"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout.trim(),
        "1 + 240*q + 2160*q^2 + 6720*q^3 + 17520*q^4 + 30240*q^5 + 60480*q^6 + 82560*q^7 + 140400*q^8"
    );
}

#[test]
fn json_agrees_with_plain() {
    let (plain, _, code) = run(&[
        "iwasawa", "--p", "5", "--branch", "1", "--c", "2", "--coeffs", "3", "--prec", "6",
        "--cutoff", "6",
    ]);
    assert_eq!(code, 0);
    let (json, _, code) = run(&[
        "iwasawa", "--p", "5", "--branch", "1", "--c", "2", "--coeffs", "3", "--prec", "6",
        "--cutoff", "6", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(json.trim()).expect("valid JSON");
    assert_eq!(v["schema"], "padlfun/v1");
    assert_eq!(v["series"]["p"], 5);
    assert_eq!(v["series"]["N"], 6);
    assert_eq!(v["lambda"], 0);
    // reconstruct coefficient a_0 from the digit array and compare with
    // the plain rendering
    let digits = v["series"]["coeffs"][0].as_array().unwrap();
    let a0: u64 = digits
        .iter()
        .enumerate()
        .map(|(i, d)| d.as_u64().unwrap() * 5u64.pow(i as u32))
        .sum();
    let plain_a0 = plain.lines().find(|l| l.starts_with("a_0")).unwrap();
    let first_digit = a0 % 5;
    assert!(plain_a0.contains(&format!("\t{first_digit} +")));

    // zetap-table JSON carries the same strings as plain
    let (json, _, code) = run(&[
        "zetap-table",
        "--p",
        "5",
        "--prec",
        "4",
        "--max-2k",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(json.trim()).unwrap();
    let (plain, _, _) = run(&["zetap-table", "--p", "5", "--prec", "4", "--max-2k", "4"]);
    for (row, line) in v["rows"].as_array().unwrap().iter().zip(plain.lines()) {
        let (two_k, value) = line.split_once('\t').unwrap();
        assert_eq!(row["2k"].to_string(), two_k);
        assert_eq!(row["value"].as_str().unwrap(), value);
    }
}

#[test]
fn config_errors_exit_2() {
    let (_, _, code) = run(&["family", "--p", "5", "--m", "3", "--h", "1"]);
    assert_eq!(code, 2);
    let (_, _, code) = run(&["mass"]);
    assert_eq!(code, 2);
    // p dividing det(2h)
    let (_, stderr, code) = run(&["family", "--p", "5", "--m", "1", "--h", "5"]);
    assert_eq!(code, 2, "stderr: {stderr}");
}

#[test]
fn user_lattice_via_json() {
    let dir = std::env::temp_dir().join("padlfun-test-lattice");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a1.json");
    std::fs::write(&path, r#"{"rank": 1, "gram": [[2]]}"#).unwrap();
    let (stdout, _, code) = run(&[
        "theta",
        "--lattice",
        path.to_str().unwrap(),
        "--cutoff",
        "4",
    ]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "1 + 2*q + 2*q^4");
}
