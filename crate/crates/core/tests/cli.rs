use std::path::Path;
use std::process::{Command, Output};

use hwgibbs::templates::VOTING_TEMPLATE;

fn hwgibbs(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwgibbs"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("voting.tmpl"), VOTING_TEMPLATE).unwrap();
    std::fs::write(dir.path().join("voters.txt"), "object Voter v1\nobject Voter v2\nevidence F(v2) = 0\n").unwrap();
    let o = hwgibbs(&["ground", "voting.tmpl", "voters.txt", "--semantics", "logical", "--out", "v.fg"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

#[test]
fn ground_then_width() {
    let dir = setup();
    let o = hwgibbs(&["width", "v.fg", "--k", "3", "--certificate", "cert.txt", "--seed", "4"], dir.path());
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.contains("hierarchy_width 3\n") && out.contains("hw_at_most_3 true\n"), "{out}");
    let cert = std::fs::read_to_string(dir.path().join("cert.txt")).unwrap();
    assert!(cert.starts_with("node 0 parent none :"));
}

#[test]
fn sample_output_is_reproducible() {
    let dir = setup();
    let args = ["sample", "v.fg", "--steps", "2000", "--chains", "3", "--seed", "8", "--query", "Q"];
    let a = hwgibbs(&[&args[..], &["--out", "a.csv"]].concat(), dir.path());
    let b = hwgibbs(&[&args[..], &["--out", "b.csv"]].concat(), dir.path());
    assert_eq!((code(&a), code(&b)), (0, 0));
    let a = std::fs::read_to_string(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.path().join("b.csv")).unwrap());
    assert!(a.contains("# seed = 8\n") && a.contains("step,chain,variable,estimate\n"));
    let coupled = hwgibbs(&["sample", "v.fg", "--steps", "5000", "--chains", "4", "--couple"], dir.path());
    let text = String::from_utf8(coupled.stdout).unwrap();
    assert!(text.contains("replicate,coupling_time\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn spectral_row_and_lemmas() {
    let dir = setup();
    let o = hwgibbs(&["spectral", "v.fg", "--mixing", "--verify-lemmas", "--out", "s.csv"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    let mut rows = csv.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(rows.next(), Some("n,s,e,M,hw,gamma,pi_min,t_mix_exact,theorem2_bound,relaxation_bound"));
    assert_eq!(rows.next().unwrap().split(',').count(), 10);
    assert!(!String::from_utf8(o.stderr).unwrap().contains("FAIL"));
}

#[test]
fn config_files_supply_options() {
    let dir = setup();
    std::fs::write(dir.path().join("s.cfg"), "file = v.fg\nsteps = 500\nchains = 2\nout = c.csv\n").unwrap();
    let o = hwgibbs(&["sample", "--config", "s.cfg", "--seed", "3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(dir.path().join("c.csv")).unwrap().contains("# seed = 3\n"));
    std::fs::write(dir.path().join("bad.cfg"), "file = v.fg\nsteps = 500\nspeed = 2\n").unwrap();
    assert_eq!(code(&hwgibbs(&["sample", "--config", "bad.cfg"], dir.path())), 1);
}

#[test]
fn experiment_output_is_byte_reproducible() {
    let dir = setup();
    std::fs::write(
        dir.path().join("e.cfg"),
        "experiment = voting-convergence\nn = 4\nchains = 3\nschedule = 100, 400\nout = e.csv\n",
    )
    .unwrap();
    assert_eq!(code(&hwgibbs(&["experiment", "--config", "e.cfg"], dir.path())), 0);
    let first = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert_eq!(code(&hwgibbs(&["experiment", "--config", "e.cfg", "--out", "f.csv"], dir.path())), 0);
    assert_eq!(first, std::fs::read_to_string(dir.path().join("f.csv")).unwrap());
    assert!(first.starts_with("# experiment = voting-convergence\n# seed = 1\n# n = 4\n"));
    assert_eq!(code(&hwgibbs(&["experiment", "--config", "e.cfg", "--seed", "2"], dir.path())), 0);
    let reseeded = std::fs::read_to_string(dir.path().join("e.csv")).unwrap();
    assert!(reseeded.contains("# seed = 2\n") && reseeded != first);
}

#[test]
fn exit_codes() {
    let dir = setup();
    assert_eq!(code(&hwgibbs(&["--help"], dir.path())), 0);
    assert_eq!(code(&hwgibbs(&["width", "--frobnicate"], dir.path())), 1);
    assert_eq!(code(&hwgibbs(&["width", "missing.fg"], dir.path())), 1);
    std::fs::write(dir.path().join("broken.fg"), "fg 1\nvar x 2 0 1\ntable t y : 0 1\n").unwrap();
    let o = hwgibbs(&["width", "broken.fg"], dir.path());
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stderr).unwrap().contains("line 3"));
    // 15 binary variables exceed the exact spectral state cap.
    let big: String = (0..15).map(|i| format!("var x{i} 2 0 1\n")).collect();
    std::fs::write(dir.path().join("big.fg"), format!("fg 1\n{big}")).unwrap();
    assert_eq!(code(&hwgibbs(&["spectral", "big.fg"], dir.path())), 2);
    std::fs::write(dir.path().join("x.cfg"), "experiment = ising-hw\nnodes = 1\n").unwrap();
    assert_eq!(code(&hwgibbs(&["experiment", "--config", "x.cfg"], dir.path())), 1);
}
