use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMALL: &[&str] = &["--ns", "32", "--nt", "8", "--levels", "3", "--ns1d", "256", "--levels1d", "2"];

fn thinstrip(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thinstrip"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn dip_sweep(dir: &Path, out: &str, extra: &[&str]) -> Output {
    let mut args = vec![
        "sweep",
        "--profile",
        "gaussian_dip:1,0,1",
        "--interval",
        "-6,6",
        "--eps",
        "0.2,0.1,0.05",
        "--jmax",
        "2",
        "--out",
        out,
    ];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    thinstrip(&args, dir)
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn sweep_writes_one_row_per_eps_and_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = dip_sweep(dir.path(), "sweep.csv", &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# thinstrip ") && first.contains("command=sweep config="));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "eps,j,lambda_strip,lambda_1d,remainder_thm2,scaled_thm1,disc_err,trusted"
    );
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 6);
    for row in rows {
        assert_eq!(row.split(',').count(), 8);
    }
}

#[test]
fn sweep_output_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    assert!(dip_sweep(dir.path(), "a.csv", &[]).status.success());
    assert!(dip_sweep(dir.path(), "b.csv", &[]).status.success());
    assert!(dip_sweep(dir.path(), "c.csv", &["--workers", "3"]).status.success());
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(a, fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn increasing_eps_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinstrip(&["sweep", "--profile", "negcos", "--eps", "0.1,0.2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps_list must be decreasing"));
}

#[test]
fn bad_inputs_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["spectrum", "--profile", "bogus", "--eps", "0.1"][..],
        &["spectrum", "--profile", "constant:1", "--eps", "-0.1"],
        &["spectrum", "--profile", "constant:20", "--eps", "0.1"],
        &["sweep", "--profile", "negcos"],
        &["no-such-command"],
    ] {
        let out = thinstrip(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn transverse_at_zero_is_the_neumann_dirichlet_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinstrip(&["transverse", "--c", "0"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let nu: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("nu = "))
        .unwrap()
        .parse()
        .unwrap();
    let exact = std::f64::consts::FRAC_PI_2.powi(2);
    assert!((nu - exact).abs() < 1e-7, "{nu}");
}

#[test]
fn sweep_without_trusted_records_exits_1() {
    // a straight strip has remainder zero, so no discretization error is small against it
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--profile", "zero", "--eps", "0.2,0.1", "--out", "z.csv"];
    args.extend_from_slice(SMALL);
    let out = thinstrip(&args, dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("z.csv").exists());
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[oracle]\nradius = 1.0\neps = 0.1\ntheta = 3.141592653589793\nm = 1\n",
    )
    .unwrap();
    let from_file = thinstrip(&["oracle", "--config", "run.toml", "--out", "a.csv"], dir.path());
    assert!(from_file.status.success(), "{}", String::from_utf8_lossy(&from_file.stderr));
    let flags = thinstrip(
        &["oracle", "--radius", "1", "--eps", "0.1", "--theta", "3.141592653589793", "--m", "1", "--out", "b.csv"],
        dir.path(),
    );
    assert!(flags.status.success());
    let a = fs::read_to_string(dir.path().join("a.csv")).unwrap();
    let b = fs::read_to_string(dir.path().join("b.csv")).unwrap();
    assert_eq!(data_rows(&a), data_rows(&b));
    assert!(!data_rows(&a).is_empty());

    let overridden = thinstrip(&["oracle", "--config", "run.toml", "--m", "2", "--out", "c.csv"], dir.path());
    assert!(overridden.status.success());
    let c = fs::read_to_string(dir.path().join("c.csv")).unwrap();
    assert!(data_rows(&c).len() > data_rows(&a).len());
    assert_ne!(a.lines().next(), c.lines().next(), "config hash follows the effective options");
}

#[test]
fn summary_json_has_limits_and_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dip_sweep(dir.path(), "s.csv", &["--summary", "s.json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert!(v["limits"]["j1"].is_number());
    assert!(v["verdicts"]["bounded_j1"].is_boolean());
}

#[test]
fn count_and_embed_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = thinstrip(
        &["count", "--profile", "gaussian_dip:1,0,1", "--eps", "0.1", "--ns", "128", "--nt", "8"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("count = "));

    let out = thinstrip(&["embed", "--profile", "constant:1", "--eps", "0.1", "--points", "11"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().count() >= 12);
}
