use std::path::PathBuf;
use std::process::Command;

fn example(name: &str) -> String {
    let mut path: PathBuf = std::env::current_exe().unwrap();
    path.pop();
    if path.ends_with("deps") {
        path.pop();
    }
    let bin = path
        .join("examples")
        .join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
    let out = Command::new(&bin)
        .output()
        .unwrap_or_else(|e| panic!("{}: {e}", bin.display()));
    assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn forward_square_well() {
    assert!(example("forward_square_well").contains("bound states: [1.5713"));
}

#[test]
fn i_to_scattering() {
    assert!(example("i_to_scattering").contains("poles at κ = [1.57"));
}

#[test]
fn data_to_i() {
    assert!(example("data_to_i").contains("A(0,0) from the Jost tail: -3.99"));
}

#[test]
fn cauchy_transform() {
    assert_eq!(example("cauchy_transform").lines().count(), 4);
}

#[test]
fn marchenko() {
    assert!(example("marchenko").contains("jumps at [2.0]"));
}

#[test]
fn gelfand_levitan() {
    assert!(example("gelfand_levitan").contains("jumps at [2.0]"));
}

#[test]
fn pipeline() {
    assert!(example("pipeline").contains("J = 0"));
}

#[test]
fn dataset_io() {
    assert!(example("dataset_io").contains("round trip kind: ifunction"));
}
