//! Compiles a small C program against the generated header and links it with
//! the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "bergman.h"

int main(void) {
    BergmanWeight *w = NULL;
    if (bergman_weight_parse("std:alpha=0", &w) != BERGMAN_STATUS_OK) return 10;
    double m[3];
    size_t needed = 0;
    if (bergman_weight_moments(w, 2, m, 3, &needed) != BERGMAN_STATUS_OK || needed != 3) return 11;
    /* omega_n = 1/(n+1) */
    for (int n = 0; n < 3; n++) {
        double want = 1.0 / (n + 1);
        if (m[n] - want > 1e-15 || want - m[n] > 1e-15) return 12;
    }
    BergmanWeight *bad = NULL;
    if (bergman_weight_parse("nonsense", &bad) == BERGMAN_STATUS_OK || bad != NULL) return 13;
    char msg[256];
    if (bergman_last_error_message(msg, sizeof msg, &needed) != BERGMAN_STATUS_OK || strlen(msg) == 0) return 14;
    bergman_weight_free(w);
    printf("%s\n", bergman_version());
    return 0;
}
"#;

/// `target/<profile>`, the directory holding the library artifacts.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    // target/<profile>/deps/<test-binary>
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = profile_dir().join("libbergman_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .args(["-std=c11", "-Wall", "-Werror", "-o"])
        .arg(&bin)
        .arg(&src)
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .expect("a C compiler named `cc`");
    assert!(status.success(), "C client failed to compile");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), env!("CARGO_PKG_VERSION"));
}
