//! Compiles and runs a C program against the generated header and the
//! static library. Skipped when no C compiler or library is found.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "nucgrow.h"

int main(void) {
    NgParams *p = NULL;
    if (ng_params_new(100.0, 10.0, 2, NG_FLAVOR_DS, &p) != NG_STATUS_OK) return 10;
    double tau = -1.0;
    if (ng_relaxation_time(p, 7, 1000000, &tau) != NG_STATUS_OK || tau <= 0.0) return 11;
    if (ng_relaxation_time(NULL, 7, 10, &tau) != NG_STATUS_NULL) return 12;
    if (ng_last_error() == NULL || strstr(ng_last_error(), "null") == NULL) return 13;
    ng_params_free(p);
    double q = 0.0;
    if (ng_exp_sum_tail(2, 1.0, 1.0, &q) != NG_STATUS_OK) return 14;
    printf("%.12f %s\n", q, ng_version());
    return 0;
}
"#;

fn target_dir() -> Option<PathBuf> {
    // Integration tests live in <target>/<profile>/deps.
    let exe = std::env::current_exe().ok()?;
    Some(exe.parent()?.parent()?.to_path_buf())
}

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok_and(|o| o.status.success()))
}

#[test]
fn c_program_links_and_runs() {
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    assert!(include.join("nucgrow.h").exists(), "header is generated by the build script");
    let Some(cc) = compiler() else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let Some(lib) = target_dir().map(|d| d.join("libnucgrow_ffi.a")).filter(|p| p.exists()) else {
        eprintln!("static library not found; skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status.code());
    let text = String::from_utf8(out.stdout).unwrap();
    let q: f64 = text.split_whitespace().next().unwrap().parse().unwrap();
    assert!((q - (1.0 - 2.0 * (-1.0f64).exp())).abs() < 1e-9);
    assert!(text.contains(nucgrow::VERSION));
}
