use std::path::PathBuf;
use std::process::{Command, Output};

fn presym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_presym"))
        .args(args)
        .output()
        .unwrap()
}

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/{name}.psa"));
    p.to_str().unwrap().to_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn examples_lists_and_writes_fixtures() {
    let out = presym(&["examples"]);
    assert!(out.status.success());
    let names: Vec<String> = stdout(&out).lines().map(str::to_owned).collect();
    assert_eq!(names.len(), 8);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sphere.psa");
    assert!(
        presym(&["examples", "sphere", "-o", path.to_str().unwrap()])
            .status
            .success()
    );
    assert_eq!(
        std::fs::read_to_string(&path).unwrap(),
        std::fs::read_to_string(fixture("sphere")).unwrap()
    );
    assert_eq!(presym(&["examples", "nope"]).status.code(), Some(2));
}

#[test]
fn every_fixture_checks_clean() {
    for name in ["sphere", "prolongation-so3", "lsa2", "parakahler-lsa2"] {
        let out = presym(&["check", &fixture(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}\n{}", stdout(&out));
        assert!(!stdout(&out).contains("[fail]"));
    }
}

#[test]
fn exit_codes() {
    let out = presym(&["check", &fixture("broken_sphere")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[fail] algebroid.anchor_morphism"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.psa");
    std::fs::write(&bad, "[chart]\ncoords = x\n\n[anchor]\nnot a line\n").unwrap();
    assert_eq!(
        presym(&["check", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        presym(&["check", "/nonexistent/file.psa"]).status.code(),
        Some(2)
    );
    assert_eq!(
        presym(&["check", &fixture("sphere"), "--suite", "bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        presym(&["derive", &fixture("lsa2"), "--direction", "twist"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn derive_writes_a_checkable_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("double.psa");
    let o = presym(&[
        "derive",
        &fixture("lsa2"),
        "--direction",
        "pseudo-semidirect",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = presym(&["check", out.to_str().unwrap()]);
    assert_eq!(rep.status.code(), Some(0), "{}", stdout(&rep));
}

#[test]
fn cohomology_prints_dimensions() {
    let out = presym(&["cohomology", &fixture("lsa2"), "--degree", "2"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim(),
        "degree 2: cochains 6, ker 2, im 0, H~ 2"
    );
    assert_eq!(
        presym(&["cohomology", &fixture("lsa2"), "--degree", "5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        presym(&["cohomology", &fixture("twist-r2"), "--degree", "1"])
            .status
            .code(),
        Some(2)
    );
    assert!(presym(&[
        "cohomology",
        &fixture("twist-r2"),
        "--degree",
        "1",
        "--truncate",
        "1"
    ])
    .status
    .success());
}

#[test]
fn json_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        presym(&[
            "check",
            &fixture("prolongation-so3"),
            "--json",
            p.to_str().unwrap(),
        ]);
    }
    let ja = std::fs::read(&a).unwrap();
    assert_eq!(ja, std::fs::read(&b).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert!(v.is_object());
}
