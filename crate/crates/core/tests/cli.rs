use std::path::Path;
use std::process::{Command, Output};

fn bn6(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bn6"));
    c.args(args).env_remove("BN6_OUTPUT_DIR");
    if let Some(d) = env_out {
        c.env("BN6_OUTPUT_DIR", d);
    }
    c.output().expect("spawn bn6")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn constants_stage_succeeds_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bn6(&["constants", "--out", out], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = std::fs::read(dir.path().join("constants.json")).unwrap();
    let o = bn6(&["constants", "--out", out, "--jobs", "2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read(dir.path().join("constants.json")).unwrap(), first);
}

#[test]
fn unknown_config_key_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "grid_n = 2048\ngrid_size = 10\n").unwrap();
    let o = bn6(&["constants", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("grid_size"), "{}", stderr(&o));
}

#[test]
fn invalid_value_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "domain_radius = -1\n").unwrap();
    let o = bn6(&["lambda0", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("domain_radius"));
}

#[test]
fn missing_upstream_output_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for stage in ["ground-state", "expansion", "branch", "report"] {
        let o = bn6(&[stage, "--out", out], None);
        assert_eq!(o.status.code(), Some(2), "{stage}: {}", stderr(&o));
    }
}

#[test]
fn output_directory_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = bn6(&["constants"], Some(env_dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(env_dir.path().join("constants.json").exists());
    std::fs::remove_file(env_dir.path().join("constants.json")).unwrap();
    let o = bn6(&["constants", "--out", flag_dir.path().to_str().unwrap()], Some(env_dir.path()));
    assert_eq!(o.status.code(), Some(0));
    assert!(flag_dir.path().join("constants.json").exists());
    assert!(!env_dir.path().join("constants.json").exists());
}

#[test]
fn stage_refuses_inputs_from_another_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bn6(&["lambda0", "--out", out, "--jobs", "2"], None);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cfg = dir.path().join("other.cfg");
    std::fs::write(&cfg, "grid_n = 2048\n").unwrap();
    let o = bn6(&["ground-state", "--config", cfg.to_str().unwrap(), "--out", out], None);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("config"), "{}", stderr(&o));
}
