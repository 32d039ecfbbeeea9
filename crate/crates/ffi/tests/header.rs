use std::path::{Path, PathBuf};
use std::process::Command;

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn header() -> String {
    std::fs::read_to_string(crate_dir().join("include/kicked_dirac.h")).unwrap()
}

#[test]
fn header_declares_the_whole_api() {
    let h = header();
    for name in [
        "typedef struct KdSimulation KdSimulation;",
        "KD_STATUS_OK = 0",
        "KD_STATUS_PANIC",
        "KD_MODEL_QKR = 4",
        "kd_simulation_new(",
        "kd_simulation_free(",
        "kd_simulation_step(",
        "kd_simulation_step_inverse(",
        "kd_simulation_observables(",
        "kd_simulation_momentum_density(",
        "kd_simulation_n_modes(",
        "kd_effective_params(",
        "kd_crossing_time(",
        "kd_lz_probability(",
        "kd_last_error_message(",
        "kd_version(",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
    assert!(h.starts_with("#ifndef KICKED_DIRAC_H"));
}

/// Directory holding the static library built alongside this test binary.
fn lib_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_and_runs() {
    let lib = lib_dir().join("libkicked_dirac_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out_dir = tempfile::tempdir().unwrap();
    let exe = out_dir.path().join("smoke");
    let build = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(crate_dir().join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .output()
        .unwrap_or_else(|e| panic!("cannot run C compiler '{cc}': {e}"));
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(&exe).output().unwrap();
    let stdout = String::from_utf8_lossy(&run.stdout);
    assert!(run.status.success(), "{stdout}{}", String::from_utf8_lossy(&run.stderr));
    assert!(stdout.contains("ok"), "{stdout}");
}
