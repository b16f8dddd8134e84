//! Compiles and runs a small C program against the generated header and
//! the static library. Skipped when no C compiler or library is found.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "wittop.h"

int main(void) {
    WittopWitt *a = NULL, *s = NULL;
    char *text = NULL;
    if (wittop_witt_parse("[1;0]", 2, 1, 2, &a) != WITTOP_STATUS_OK) return 1;
    if (wittop_witt_add(a, a, &s) != WITTOP_STATUS_OK) return 2;
    if (wittop_witt_to_string(s, &text) != WITTOP_STATUS_OK) return 3;
    int ok = strcmp(text, "[0;1]") == 0;
    wittop_string_free(text);
    wittop_witt_free(a);
    wittop_witt_free(s);
    if (wittop_witt_parse("[1;", 2, 1, 2, &a) != WITTOP_STATUS_PARSE) return 4;
    if (strlen(wittop_last_error()) == 0) return 5;
    return ok ? 0 : 6;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/<test> -> target/<profile>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libwittop_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipped: static library or C compiler not available");
        return;
    }
    let dir = std::env::temp_dir().join(format!("wittop-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    let bin = dir.join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C program failed to build");
    let run = Command::new(&bin).status().unwrap();
    assert_eq!(run.code(), Some(0), "C program exit code");
    let _ = std::fs::remove_dir_all(&dir);
}
