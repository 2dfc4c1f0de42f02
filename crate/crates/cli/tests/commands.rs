use std::path::Path;
use std::process::{Command, Output};

fn mcgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcgap")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("UTF-8")
}

fn write_gen(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path_str]);
    let out = mcgap(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path_str
}

#[test]
fn star_gap_row() {
    let dir = tempfile::tempdir().unwrap();
    let star = write_gen(dir.path(), "star.mcg", &["star", "3"]);
    let out = mcgap(&["gap", &star]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "instance,edges,pairs,opt_lp,opt_ip,ip_optimal,ip_lower_bound,gap,bb_nodes\nstar,3,3,3/2,2,true,2,4/3,3\n"
    );
}

#[test]
fn cactus_one_matches_expected_costs() {
    let dir = tempfile::tempdir().unwrap();
    let c = write_gen(dir.path(), "c1.mcg", &["cactus", "1"]);
    let lp = stdout(&mcgap(&["--format", "text", "solve-lp", &c]));
    assert!(lp.starts_with("opt_lp 1\n"), "{lp}");
    let ip = stdout(&mcgap(&["--format", "text", "solve-ip", &c]));
    assert!(ip.starts_with("opt_ip 1\n"), "{ip}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = mcgap(&["gen", "tree", "12", "--seed", "9", "--pairs", "4", "--max-cost", "5"]);
    let b = mcgap(&["gen", "tree", "12", "--seed", "9", "--pairs", "4", "--max-cost", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = mcgap(&["gen", "tree", "12", "--seed", "10", "--pairs", "4", "--max-cost", "5"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn gadget_frontier_by_mark_name() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_gen(dir.path(), "g.mcg", &["gadget", "2"]);
    let out = mcgap(&["pload", &g, "--w", "2", "--rooted", "r", "--radius", "1"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "w,k,m,p,wp,family_size,pivots\n2,1,1,5/9,10/9,24,8\n");
}

#[test]
fn carr_vempala_both_sides() {
    let dir = tempfile::tempdir().unwrap();
    let star = write_gen(dir.path(), "star.mcg", &["star", "3"]);
    let out = mcgap(&["--format", "text", "carr-vempala", &star, "--min-alpha"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("min alpha 4/3\n"));
    let out = mcgap(&["--format", "text", "carr-vempala", &star, "--alpha", "5/4"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("alpha 5/4 is too small"));
}

#[test]
fn flow_matches_lp() {
    let dir = tempfile::tempdir().unwrap();
    let star = write_gen(dir.path(), "star.mcg", &["star", "4"]);
    let out = mcgap(&["--format", "text", "flow", &star]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("total 2\n"));
}

#[test]
fn decomposition_tools() {
    let dir = tempfile::tempdir().unwrap();
    let tree = write_gen(dir.path(), "t.mcg", &["tree", "20", "--seed", "1"]);
    let out = mcgap(&["tree-decomp", &tree, "--root", "0", "--w", "4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
    let g = write_gen(dir.path(), "g.mcg", &["gadget", "2"]);
    let out = mcgap(&["decomp-enum", &g, "--t", "4", "--root", "r", "--k", "2"]);
    assert_eq!(stdout(&out).lines().count(), 25);
    let out = mcgap(&["amplify", &g, "--root", "r", "--w", "2", "--p", "3/8", "--m", "1,2"]);
    let text = stdout(&out);
    let z: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(z, ["1/2", "1"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mcgap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(mcgap(&["solve-lp", "/nonexistent/file.mcg"]).status.code(), Some(1));
    let bad = dir.path().join("bad.mcg");
    std::fs::write(&bad, "mcg 1\ngraph 2 1\nedge 0 1 1 1\npairs 1\npair 0 0\n").unwrap();
    let out = mcgap(&["solve-lp", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let garbled = dir.path().join("garbled.mcg");
    std::fs::write(&garbled, "mcg 1\ngraph 2 one\n").unwrap();
    let out = mcgap(&["solve-lp", garbled.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2, column 9"));
    let c = write_gen(dir.path(), "c2.mcg", &["cactus", "2"]);
    let out = mcgap(&["solve-ip", &c, "--budget", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stdout.is_empty());
    let g = write_gen(dir.path(), "g.mcg", &["gadget", "2"]);
    assert_eq!(mcgap(&["pload", &g, "--w", "2", "--rooted", "nowhere"]).status.code(), Some(1));
    assert_eq!(mcgap(&["gen", "gadget", "3"]).status.code(), Some(1));
}

#[test]
fn verify_subset_passes() {
    let out = mcgap(&["verify-all", "--only", "5,9"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.starts_with("PASS 5 ") && text.contains("\nPASS 9 "));
}
