use std::process::Command;

fn hgl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_hgl")).args(args).env_remove("HGL_SEED").output().unwrap()
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn unknown_example_is_a_usage_error() {
    let o = hgl(&["run", "toaster"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_parameter_is_a_usage_error() {
    assert_eq!(hgl(&["run", "ripple", "--param", "depth=3"]).status.code(), Some(2));
    assert_eq!(hgl(&["run", "ripple", "--param", "w=0"]).status.code(), Some(2));
    assert_eq!(hgl(&["bench", "--x-ratio", "2"]).status.code(), Some(2));
}

#[test]
fn run_reports_key_values() {
    let o = hgl(&["run", "vending", "--cycles", "40"]);
    assert!(o.status.success());
    let s = stdout(&o);
    for key in ["example=vending", "seed=1", "failed=0", "unfinished=", "sim.events="] {
        assert!(s.contains(key), "{key} missing from\n{s}");
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_hgl"))
        .args(["run", "fulladder", "--cycles", "5"])
        .env("HGL_SEED", "42")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed=42"));
    let o = Command::new(env!("CARGO_BIN_EXE_hgl"))
        .args(["run", "fulladder", "--cycles", "5", "--seed", "3"])
        .env("HGL_SEED", "42")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("seed=3"));
}

#[test]
fn seeds_change_the_waveform() {
    let dir = tempfile::tempdir().unwrap();
    let vcd = |seed: &str| {
        let p = dir.path().join(format!("{seed}.vcd"));
        assert!(hgl(&["run", "ripple", "--param", "w=8", "--cycles", "20", "--seed", seed, "--vcd", p.to_str().unwrap()]).status.success());
        std::fs::read_to_string(p).unwrap()
    };
    assert_eq!(vcd("5"), vcd("5"));
    assert_ne!(vcd("5"), vcd("6"));
}

#[test]
fn emit_writes_verilog_and_waveform() {
    let dir = tempfile::tempdir().unwrap();
    let o = hgl(&["emit", "koggestone", "--param", "w=16", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let sv = std::fs::read_to_string(dir.path().join("koggestone.sv")).unwrap();
    assert!(sv.contains("module "));
    let vcd = std::fs::read_to_string(dir.path().join("koggestone.vcd")).unwrap();
    assert!(vcd.starts_with("$date") || vcd.contains("$enddefinitions"));
    assert!(stdout(&o).contains("lint=0"));
}

#[test]
fn bench_writes_csv_and_warns_on_binary_only_with_x() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let o = hgl(&["bench", "--width", "4", "--n-stimuli", "20", "--x-ratio", "0.5", "--csv", csv.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let text = std::fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(stdout(&o).contains("optimized.x0.50.checksum="));
}

#[test]
fn strategies_agree_on_the_product_checksum() {
    let o = hgl(&["bench", "--width", "8", "--n-stimuli", "50", "--x-ratio", "0.3", "--strategies", "optimized,always_full"]);
    let s = stdout(&o);
    let sum = |k: &str| s.lines().find(|l| l.starts_with(k)).unwrap().split('=').nth(1).unwrap().to_string();
    assert_eq!(sum("optimized.x0.30.checksum"), sum("always_full.x0.30.checksum"));
}

#[test]
fn failing_check_sets_exit_code() {
    assert_eq!(hgl(&["selftest", "--only", "11"]).status.code(), Some(2));
    let o = hgl(&["selftest", "--only", "6"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("PASS  6"));
}

#[test]
fn emit_matches_the_goldens() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for (example, params, golden) in [
        ("fulladder", vec![], "full_adder"),
        ("vending", vec![], "vending"),
        ("ripple", vec!["--param", "w=8"], "ripple_carry8"),
    ] {
        let mut args = vec!["emit", example, "--out", out];
        args.extend(params);
        assert!(hgl(&args).status.success());
        let got = std::fs::read_to_string(dir.path().join(format!("{example}.sv"))).unwrap();
        let want = std::fs::read_to_string(format!("{}/../core/tests/golden/{golden}.sv", env!("CARGO_MANIFEST_DIR"))).unwrap();
        assert_eq!(got, want, "{example}");
    }
}
