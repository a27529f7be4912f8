//! Compiles a C program against the generated header and the static library.

use std::path::PathBuf;
use std::process::Command;

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn header_compiles_and_links() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libemodel_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("emodel_smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
