use std::path::PathBuf;
use std::process::{Command, Output};

fn hyperseq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperseq"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    hyperseq(args).status.code().expect("exit code")
}

fn golden(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("golden")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hyperseq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn prove_exit_codes() {
    assert_eq!(code(&["prove", "--system", "rtb", "J"]), 1);
    assert_eq!(code(&["prove", "--system", "rk", "p => p"]), 0);
    assert_eq!(code(&["prove", "--system", "rk", "p => q"]), 1);
    assert_eq!(code(&["prove", "--system", "rk", "p => (q"]), 64);
    assert_eq!(code(&["prove", "--system", "nope", "p => p"]), 64);
    assert_eq!(code(&["prove", "--system", "rk4", "--max-states", "1", "[]p => [][]p"]), 2);
}

#[test]
fn prove_writes_a_checkable_derivation() {
    let out = tmp("jprime.json");
    let o = out.to_str().unwrap();
    assert_eq!(code(&["prove", "--system", "rkb", "J'", "-o", o]), 0);
    assert_eq!(code(&["check", "--system", "rkb", o]), 0);
    assert_eq!(code(&["check", "--system", "rk", o]), 1);
}

#[test]
fn check_golden_files() {
    let ij = golden("ij_rkb.json");
    assert_eq!(code(&["check", "--system", "rkb", &ij]), 0);
    assert_ne!(code(&["check", "--system", "rk", &ij]), 0);
    let sim = golden("boxl_prime_rk4cut.json");
    assert_eq!(code(&["check", "--system", "rk4", "--cut", &sim]), 0);
    assert_eq!(code(&["check", "--system", "rk4", &sim]), 1);
    for f in ["box_dist_rkb.json", "box_dist_converse_rkb.json"] {
        assert_eq!(code(&["check", "--system", "rkb", &golden(f)]), 0);
    }
}

#[test]
fn check_rejects_corrupted_files() {
    let text = std::fs::read_to_string(golden("ij_rkb.json")).unwrap();
    let bad = tmp("corrupt.json");
    std::fs::write(&bad, &text[..text.len() / 2]).unwrap();
    assert_eq!(code(&["check", "--system", "rkb", bad.to_str().unwrap()]), 65);
    let missing = tmp("missing.json");
    assert_eq!(code(&["check", missing.to_str().unwrap()]), 66);
}

#[test]
fn decide_and_countermodels() {
    let out = hyperseq(&["decide", "--system", "rs4cut", "--bound-check", "3", "C"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("valid"));
    let model = tmp("model.json");
    assert_eq!(
        code(&["decide", "--system", "rk4cut", "--emit-model", model.to_str().unwrap(), "[]p => p"]),
        1
    );
    assert_eq!(
        code(&["countermodel", "--model", model.to_str().unwrap(), "[]p => p"]),
        0
    );
    let ps4 = hyperseq(&["countermodel", "--semantics", "ps4", "C-hyper"]);
    assert_eq!(ps4.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ps4.stdout).contains("(i,j,k)"));
    assert_eq!(code(&["countermodel", "--class", "S4", "[]p => p"]), 1);
    assert_eq!(code(&["prove", "--cut", "--system", "rs4", "C"]), 0);
    assert_eq!(code(&["prove", "--cut", "--system", "rkb", "C"]), 64);
}

#[test]
fn translate_and_transforms() {
    let out = hyperseq(&["translate", "J"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        "p | []([](~[][]p & ~[][]q) | []q)"
    );
    let d = tmp("pp.json");
    let e = tmp("inv.json");
    let (d, e) = (d.to_str().unwrap(), e.to_str().unwrap());
    assert_eq!(code(&["prove", "--system", "rk4", "=> p | ~p", "-o", d]), 0);
    assert_eq!(
        code(&["invert", d, "--system", "rk4", "--item", "1", "--component", "0", "--formula", "p | ~p", "-o", e]),
        0
    );
    assert_eq!(code(&["check", "--system", "rk4", e]), 0);
    assert_eq!(code(&["invert", d, "--system", "rk4", "--item", "7", "--component", "0", "--formula", "p"]), 64);
}

#[test]
fn merge_eliminate_on_rtb() {
    let d = tmp("rtb.json");
    let e = tmp("merged.json");
    let (d, e) = (d.to_str().unwrap(), e.to_str().unwrap());
    assert_eq!(code(&["prove", "--system", "rtb", "[]p => // => p", "-o", d]), 0);
    assert_eq!(code(&["merge-eliminate", d, "--component", "0", "-o", e]), 0);
    let out = hyperseq(&["check", "--system", "rtb", e]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[]p => p"));
}

#[test]
fn parse_round_trip() {
    let out = hyperseq(&["parse", "[]~[](p&q) =>//[]p=>//[]q=>"]);
    assert_eq!(out.status.code(), Some(0));
    let printed = String::from_utf8_lossy(&out.stdout).trim().to_string();
    let again = hyperseq(&["parse", &printed]);
    assert_eq!(String::from_utf8_lossy(&again.stdout).trim(), printed);
    assert_eq!(code(&["parse", "=> p &"]), 64);
}
