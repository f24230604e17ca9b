use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fuzzy-ifs"))
}

fn example_scene() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/scenes/example.json")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn run_writes_csv_image_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let img = dir.path().join("out.pgm");
    let report = dir.path().join("report.json");
    let out = run(&[
        "run",
        example_scene().to_str().unwrap(),
        "--steps",
        "2",
        "--out-csv",
        csv.to_str().unwrap(),
        "--out-image",
        img.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--grid",
        "4x4",
        "--bbox",
        "0,0,1,1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,level,iteration\n"));
    assert!(text.contains("1/2,1/2,3/4,1\n"));
    assert!(text.contains("1/2,3/4,9/16,2\n"));

    let pgm = fs::read(&img).unwrap();
    assert!(pgm.starts_with(b"P5\n4 4\n255\n"));
    assert_eq!(pgm.len(), 11 + 16);

    let json: serde_like::Report = serde_like::parse(&fs::read_to_string(&report).unwrap());
    assert_eq!(json.iterations, 2);
}

#[test]
fn tolerance_run_prints_report() {
    let out = run(&["run", example_scene().to_str().unwrap(), "--tol", "0.01"]);
    assert_eq!(code(&out), 0);
    let report = serde_like::parse(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(report.iterations, 8);
}

#[test]
fn float_mode_run_succeeds() {
    let out = run(&[
        "run",
        example_scene().to_str().unwrap(),
        "--steps",
        "4",
        "--mode",
        "float",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn invalid_scene_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let text = fs::read_to_string(example_scene())
        .unwrap()
        .replace("\"1/2\"", "\"1\"");
    fs::write(&path, text).unwrap();
    let out = run(&["run", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("contraction_constant out of range"));

    fs::write(&path, "{ not json").unwrap();
    assert_eq!(code(&run(&["run", path.to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["run", "/nonexistent/scene.json"])), 1);
}

#[test]
fn support_cap_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("capped.json");
    let text = fs::read_to_string(example_scene()).unwrap();
    let capped = text.replacen('{', "{\n  \"support_cap\": 20,", 1);
    fs::write(&path, capped).unwrap();
    let out = run(&["run", path.to_str().unwrap(), "--steps", "10"]);
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("partial run"));
}

#[test]
fn verify_passes_and_detects_fault() {
    let out = run(&["verify", "--trials", "30", "--depth", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = run(&["verify", "--trials", "5", "--depth", "3", "--inject-fault"]);
    assert_eq!(code(&out), 2);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL oracle_equivalence"), "{stdout}");
    assert!(stdout.contains("y = 1/2"));
}

#[test]
fn render_from_scene_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("scene.pgm");
    let out = run(&[
        "render",
        example_scene().to_str().unwrap(),
        "--out-image",
        img.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read(&img).unwrap().starts_with(b"P5\n64 64\n255\n"));

    let csv = dir.path().join("dump.csv");
    fs::write(
        &csv,
        "x,y,level,iteration\n1/2,0,1,0\n1/2,1/2,3/4,1\n1/2,0,1,1\n",
    )
    .unwrap();
    let img2 = dir.path().join("csv.pgm");
    let out = run(&[
        "render",
        csv.to_str().unwrap(),
        "--out-image",
        img2.to_str().unwrap(),
        "--grid",
        "1x2",
        "--bbox",
        "0,0,1,1",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(&img2).unwrap(), b"P5\n1 2\n255\n\xbf\xff".to_vec());
}

/// Minimal field extraction from the pretty-printed report.
mod serde_like {
    pub struct Report {
        pub iterations: usize,
    }

    pub fn parse(text: &str) -> Report {
        let line = text
            .lines()
            .find(|l| l.trim_start().starts_with("\"iterations\""))
            .expect("iterations field");
        let value = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
        Report {
            iterations: value.parse().unwrap(),
        }
    }
}
