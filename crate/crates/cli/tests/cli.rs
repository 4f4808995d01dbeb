use std::process::{Command, Output};

fn locon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locon")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn q2_table_passes_all_rows() {
    let o = locon(&["q2-table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows = text.lines().filter(|l| l.starts_with("| ") && l.contains("Q2(sqrt(")).collect::<Vec<_>>();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.trim_end().ends_with("| PASS |")));
    assert!(text.contains("product = 1: PASS"));
}

#[test]
fn q2_table_csv_has_header_and_seven_rows() {
    let o = locon(&["q2-table", "--format", "csv"]);
    let text = stdout(&o);
    let data: Vec<&str> = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert_eq!(data.len(), 7);
    assert!(text.contains("k,extension,conductor,norm group,lambda,human,expected,status"));
}

#[test]
fn gauss_over_f9() {
    let o = locon(&["gauss", "--p", "3", "--s", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "G = 3"));
    assert!(text.contains("closed form: 3 : PASS"));
}

#[test]
fn verify_small_grid_exits_zero() {
    let o = locon(&["verify", "--q-max", "13"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verify: PASS"));
}

#[test]
fn injected_faults_fail_verify() {
    for fault in ["q2-table", "catalogue"] {
        let o = locon(&["verify", "--q-max", "5", "--inject-fault", fault]);
        assert_eq!(o.status.code(), Some(1), "{fault}");
        assert!(stdout(&o).contains("verify: FAIL"));
    }
    let o = locon(&["q2-table", "--inject-fault", "q2-table"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let a = locon(&["verify", "--q-max", "7", "--seed", "11", "--format", "csv"]);
    let b = locon(&["verify", "--q-max", "7", "--seed", "11", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
    let a = locon(&["report", "--q-max", "9"]);
    let b = locon(&["report", "--q-max", "9"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(locon(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(locon(&["gauss", "--p", "4"]).status.code(), Some(2));
    assert_eq!(locon(&["lambda", "tame", "--p", "2"]).status.code(), Some(3));
    let o = locon(&["heisenberg", "det", "--group", "D8", "--chi", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("usage error"));
}

#[test]
fn module_error_names_are_reported() {
    let o = locon(&["lambda", "klein4", "--q", "8"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("LambdaError"));
}

#[test]
fn config_file_sets_defaults() {
    let dir = std::env::temp_dir().join(format!("locon-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("grid.conf");
    std::fs::write(&path, "# small grid\nformat = csv\nq_max = 5\np_max = 3\nconductor_max = 2\n").unwrap();
    let o = locon(&["verify", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# verification (q_max = 5, p_max = 3, conductor_max = 2, seed = 0)"));
    let o = locon(&["verify", "--config", path.to_str().unwrap(), "--format", "md"]);
    assert!(stdout(&o).starts_with("## verification"));
    std::fs::write(&path, "q_max = 0\n").unwrap();
    assert_eq!(locon(&["verify", "--config", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn heisenberg_det_d8() {
    let o = locon(&["heisenberg", "det", "--group", "D8", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("g,det_brute,det_invariant,gallagher,agree"));
    assert!(text.contains("b,-1,-1,-1,PASS"));
    assert!(text.contains("a,1,1,1,PASS"));
}

#[test]
fn other_verbs_run() {
    for args in [
        &["tame-lambda", "--p", "3", "--s", "3"][..],
        &["lambda", "klein4", "--q", "9"],
        &["lambda", "classify", "--group", "Q8"],
        &["group", "info", "--group", "C2xC4"],
        &["group", "transfer", "--group", "heis(3)"],
        &["heisenberg", "conductors", "--m", "3", "--a", "2", "--p", "7"],
        &["heisenberg", "minimal-w", "--q", "7", "--eta", "3", "--delta-pi", "-1"],
        &["epsilon", "eval", "--field", "Local(5, 1, 1, 0)", "--chi", "locchi(1; pi->i; unit->chi(1 mod 4))"],
        &["epsilon", "verify", "--p-max", "3", "--conductor-max", "2"],
    ] {
        let o = locon(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
