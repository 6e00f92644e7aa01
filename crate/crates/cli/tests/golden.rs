mod common;

use std::process::Command;

#[test]
fn golden_files() {
    let failures: Vec<String> = common::CASES.iter().filter_map(|c| common::check(c).err()).collect();
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}

#[test]
fn make_output_revalidates_unchanged() {
    for case in common::CASES.iter().filter(|c| c.args[0] == "make" && c.code == 0) {
        let (_, made) = common::run(case);
        let path = std::env::temp_dir().join(format!("gcoh-{}-{}.json", std::process::id(), case.name));
        std::fs::write(&path, &made).unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_gcoh")).arg("validate").arg(&path).output().unwrap();
        std::fs::remove_file(&path).unwrap();
        assert!(out.status.success());
        assert_eq!(String::from_utf8(out.stdout).unwrap(), made, "{}", case.name);
    }
}

#[test]
fn help_exits_zero() {
    let out = Command::new(env!("CARGO_BIN_EXE_gcoh")).arg("--help").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("equiv"));
}

#[test]
fn output_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("gcoh-out-{}.json", std::process::id()));
    let status = Command::new(env!("CARGO_BIN_EXE_gcoh"))
        .args(["make", "coherent", "--re", "1", "-o"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text, "{\"cov\":[[1,0],[0,1]],\"mean\":[2,0],\"modes\":1}\n");
}
