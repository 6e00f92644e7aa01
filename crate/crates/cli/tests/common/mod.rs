//! Golden-file cases for the `gcoh` binary.

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub env: &'static [(&'static str, &'static str)],
    pub code: i32,
}

const fn case(name: &'static str, args: &'static [&'static str], code: i32) -> Case {
    Case { name, args, env: &[], code }
}

pub const CASES: &[Case] = &[
    case("make_thermal", &["make", "thermal", "--n", "1,2"], 0),
    case("make_coherent", &["make", "coherent", "--re", "1"], 0),
    case("make_squeezed", &["make", "squeezed", "--r", "0.6", "--phi", "0.5", "--re", "-0.3", "--im", "1"], 0),
    case("make_standard_form", &["make", "standard-form", "--a", "2", "--b", "2", "--c", "1", "--d-corr", "1"], 0),
    case("make_unphysical", &["make", "standard-form", "--a", "1", "--b", "1", "--c", "0.5", "--d-corr", "0.5"], 2),
    case("validate_vacuum", &["validate", "fixtures/vacuum.json"], 0),
    case("validate_pretty", &["validate", "fixtures/standard_form.json", "--pretty"], 0),
    case("validate_malformed", &["validate", "fixtures/malformed.json"], 2),
    case("validate_subvacuum", &["validate", "fixtures/subvacuum.json"], 2),
    case("validate_missing", &["validate", "fixtures/no_such_file.json"], 2),
    case("coherence_vacuum", &["coherence", "fixtures/vacuum.json"], 0),
    case("coherence_coherent", &["coherence", "fixtures/coherent.json"], 0),
    case("coherence_pair", &["coherence", "fixtures/pair_a.json"], 0),
    case("spectrum_standard_form", &["spectrum", "fixtures/standard_form.json"], 0),
    case("spectrum_thermal", &["spectrum", "fixtures/thermal1.json"], 0),
    case("apply_attenuator", &["apply", "fixtures/attenuator.json", "fixtures/thermal1.json"], 0),
    case("apply_mismatch", &["apply", "fixtures/attenuator.json", "fixtures/thermal_pair.json"], 2),
    case("classify_attenuator", &["classify", "fixtures/attenuator.json"], 0),
    case("classify_beamsplitter", &["classify", "fixtures/beamsplitter.json"], 1),
    case("classify_merge", &["classify", "fixtures/merge.json"], 0),
    case("petz_attenuator", &["petz", "fixtures/attenuator.json", "--thermal", "1"], 0),
    case("petz_collapse", &["petz", "fixtures/collapse.json", "--thermal", "1"], 2),
    case("petz_not_incoherent", &["petz", "fixtures/beamsplitter.json", "--thermal", "1,1"], 2),
    case("equiv_planted", &["equiv", "fixtures/pair_a.json", "fixtures/pair_b.json"], 0),
    case("equiv_planted_oracle", &["equiv", "fixtures/pair_a.json", "fixtures/pair_b.json", "--oracle"], 0),
    case("equiv_perturbed", &["equiv", "fixtures/pert_a.json", "fixtures/pert_b.json"], 1),
    case(
        "equiv_perturbed_oracle",
        &["equiv", "fixtures/pert_a.json", "fixtures/pert_b.json", "--oracle", "--grid", "180"],
        1,
    ),
    case("equiv_incoherent", &["equiv", "fixtures/thermal1.json", "fixtures/vacuum.json"], 0),
    case("equiv_coherence_mismatch", &["equiv", "fixtures/coherent.json", "fixtures/thermal1.json"], 1),
    case("equiv_hypothesis", &["equiv", "fixtures/product.json", "fixtures/product.json"], 2),
    case("frozen_rotation", &["frozen", "fixtures/coherent.json", "fixtures/rotation.json"], 0),
    case("frozen_attenuator", &["frozen", "fixtures/coherent.json", "fixtures/attenuator.json"], 1),
    case("frozen_not_strict", &["frozen", "fixtures/thermal_pair.json", "fixtures/merge.json"], 2),
    case("sample_class", &["sample-class", "fixtures/standard_form.json", "--theta1", "0.3", "--theta2", "-1.1"], 0),
    case("gen_state", &["gen", "state", "--modes", "3", "--seed", "7"], 0),
    case("gen_pair", &["gen", "pair", "--modes", "2", "--seed", "3"], 0),
    case(
        "gen_perturbed",
        &["gen", "pair", "--modes", "2", "--seed", "3", "--perturb", "0.05", "--thermal-min", "1.2"],
        0,
    ),
    case("gen_igo", &["gen", "igo", "--modes", "3", "--seed", "5", "--non-strict"], 0),
    case("unknown_subcommand", &["frobnicate"], 2),
    case("unknown_flag", &["coherence", "--bogus", "fixtures/vacuum.json"], 2),
    case("bad_tol", &["coherence", "fixtures/vacuum.json", "--tol", "-1"], 2),
    Case {
        name: "env_tol",
        args: &["equiv", "fixtures/pair_a.json", "fixtures/pair_b.json"],
        env: &[("GAUSS_COHERENCE_TOL", "1e-30")],
        code: 1,
    },
    Case {
        name: "flag_beats_env_tol",
        args: &["equiv", "fixtures/pair_a.json", "fixtures/pair_b.json", "--tol", "1e-8"],
        env: &[("GAUSS_COHERENCE_TOL", "1e-30")],
        code: 0,
    },
];

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

/// Exit code and the document printed (stdout, or stderr on failure).
pub fn run(case: &Case) -> (i32, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gcoh"));
    cmd.args(case.args).current_dir(tests_dir()).env_remove("GAUSS_COHERENCE_TOL");
    for (k, v) in case.env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("gcoh runs");
    let code = out.status.code().expect("exit code");
    let text = if out.stdout.is_empty() { out.stderr } else { out.stdout };
    (code, String::from_utf8(text).expect("UTF-8 output"))
}

pub fn golden_path(case: &Case) -> PathBuf {
    tests_dir().join("golden").join(format!("{}.json", case.name))
}

/// Checks one case against its golden file; `GCOH_BLESS=1` rewrites it.
pub fn check(case: &Case) -> Result<(), String> {
    let (code, text) = run(case);
    if code != case.code {
        return Err(format!("{}: exit {code}, expected {}: {text}", case.name, case.code));
    }
    let (code2, text2) = run(case);
    if (code2, &text2) != (code, &text) {
        return Err(format!("{}: output not stable across runs", case.name));
    }
    if serde_json::from_str::<serde_json::Value>(&text).is_err() {
        return Err(format!("{}: output is not one JSON document: {text}", case.name));
    }
    let path = golden_path(case);
    if std::env::var_os("GCOH_BLESS").is_some() {
        std::fs::write(&path, &text).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let expected = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if expected != text {
        return Err(format!(
            "{}: output differs from golden file\n  got:      {text}  expected: {expected}",
            case.name
        ));
    }
    Ok(())
}
