use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_steenrod"));
    c.current_dir(env!("CARGO_MANIFEST_DIR"));
    c
}

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

fn stdout_of(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn normalize_examples() {
    assert_eq!(stdout_of(&["normalize", "--l", "3", "--mode", "classical", "P1 P1"]), "2 P2\n");
    assert_eq!(stdout_of(&["normalize", "--l", "3", "--mode", "motivic", "P1 P1"]), "2 P2 P0\n");
    assert_eq!(stdout_of(&["normalize", "--l", "2", "2 Sq2 Sq2 + Sq3 Sq1"]), "Sq3 Sq1\n");
    assert_eq!(stdout_of(&["normalize", "--l", "3", "P3 P1 beta"]), "P3 P1 beta\n");
    assert_eq!(stdout_of(&["normalize", "--l", "3", "Q1"]), "beta P1\n");
    assert_eq!(stdout_of(&["normalize", "--l", "3", "beta beta + P1 beta beta"]), "0\n");
}

#[test]
fn normalize_on_classes() {
    let m = ["--l", "3", "--mode", "motivic", "--model", "alg-closed"];
    let run = |src: &str, e: &str| stdout_of(&[&["normalize"][..], &m[..], &["--source", src, e][..]].concat());
    assert_eq!(run("4,2", "P1 P1"), "2 zeta^12 x^3\n");
    // P^a vanishes below degree 2a; P^1 on H^{2,1} is the cube.
    assert_eq!(run("1,1", "P1"), "0\n");
    assert_eq!(run("2,1", "P1"), "x^3\n");
    assert_eq!(run("2,1", "Q0"), "zeta^2 beta x\n");
    let et = ["normalize", "--l", "3", "--mode", "etale", "--model", "alg-closed", "--source", "2,1", "P1"];
    assert_eq!(stdout_of(&et), "x^3\n");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| bin().args(args).output().unwrap().status.code();
    assert_eq!(code(&["normalize", "--l", "3", "P1"]), Some(0));
    assert_eq!(code(&["frobnicate"]), Some(2));
    assert_eq!(code(&["normalize", "--l", "3", "P1 + + P2"]), Some(2));
    assert_eq!(code(&["normalize", "--l", "3", "--mode", "sideways", "P1"]), Some(2));
    assert_eq!(code(&["convert", "--l", "3", "--source", "3,2", "--a", "1"]), Some(3));
    assert_eq!(code(&["classify", "--kind", "conjecture", "--n", "3", "--i", "2", "--max-deg", "9"]), Some(3));
    assert_eq!(code(&["classify", "--kind", "deg1-zeta", "--l", "3", "--d", "2", "--max-deg", "4"]), Some(3));
    assert_eq!(code(&["normalize", "--l", "4", "P1"]), Some(3));
    assert_eq!(code(&["--help"]), Some(0));
}

#[test]
fn domain_messages() {
    let out = bin().args(["normalize", "--l", "3", "b^2 P0"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stderr), "error: unknown symbol b\n");
    let out = bin().args(["convert", "--l", "3", "--source", "3,2", "--a", "1"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("intermediate zone"));
    let out = bin().args(["classify", "--kind", "conjecture", "--n", "3", "--i", "2", "--max-deg", "9"]).output().unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).contains("conjecture zone requires n>=2i"));
    let out = bin().args(["normalize", "--l", "3", "P1 %"]).output().unwrap();
    assert_eq!(String::from_utf8_lossy(&out.stderr), "error: syntax error at column 4: unexpected character '%'\n");
}

#[test]
fn golden_files() {
    let lf = models().join("local-field.json");
    let lf = lf.to_str().unwrap();
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["generators", "--l", "3", "--space", "K2", "--max-deg", "8"], "generators_k2_l3.txt"),
        (vec!["generators", "--l", "2", "--space", "K3", "--max-deg", "12"], "generators_k3_l2.txt"),
        (
            vec!["descent", "--l", "3", "--d", "2", "--i", "2", "--model", lf, "--max-deg", "4", "--max-wt", "3", "--json"],
            "descent_local_field.json",
        ),
        (vec!["classify", "--kind", "etale-h1", "--l", "3", "--i", "1", "--max-deg", "4"], "etale_h1_trivial.txt"),
        (vec!["classify", "--kind", "conjecture", "--l", "3", "--n", "4", "--i", "2", "--max-deg", "24"], "conjecture_4_2_l3.txt"),
        (vec!["classify", "--kind", "motivic-w1", "--l", "3", "--n", "2", "--max-deg", "9"], "motivic_w1_k2_l3.txt"),
        (
            vec!["normalize", "--l", "3", "--mode", "motivic", "--model", "alg-closed", "--source", "4,2", "--json", "P1 P1"],
            "normalize_p1p1_motivic.json",
        ),
    ];
    for (args, file) in cases {
        assert_eq!(stdout_of(&args), golden(file), "{file}");
    }
}

#[test]
fn descent_on_local_field_includes_intro_targets() {
    let lf = models().join("local-field.json");
    let out = stdout_of(&["descent", "--l", "3", "--d", "2", "--i", "2", "--model", lf.to_str().unwrap(), "--max-deg", "4"]);
    assert!(out.contains("zeta t y: (1,2) -> (3,3)"));
    assert!(out.contains("zeta t beta(y): (1,2) -> (4,3)"));
}

#[test]
fn json_is_stable_and_well_formed() {
    let args = ["classify", "--kind", "conjecture", "--l", "2", "--n", "4", "--i", "2", "--max-deg", "30", "--json"];
    let a = stdout_of(&args);
    assert_eq!(a, stdout_of(&args));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["version"], "1");
    assert_eq!(v["command"], "classify");
    let rows = v["results"].as_array().unwrap();
    assert!(rows.iter().any(|r| r["label"] == "Sq14 SqV7 SqV3 SqV1"));
    for r in rows {
        for key in ["label", "source", "target", "data"] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
    }
}

#[test]
fn shipped_models_load() {
    for f in ["local-field.json", "finite-field.json", "alg-closed-5.json", "real-etale.json"] {
        let p = models().join(f);
        let out = bin()
            .args(["classify", "--kind", "etale-h1", "--i", "1", "--max-deg", "3", "--model", p.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success(), "{f}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn check_passes() {
    let out = bin().arg("check").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| l.starts_with("PASS ")));
}
