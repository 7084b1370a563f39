//! End-to-end tests against the built binary: schemas, determinism,
//! exit codes, and the reproduction configurations.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn macrocoh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macrocoh"))
        .args(args)
        .output()
        .expect("failed to spawn binary")
}

fn macrocoh_with_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macrocoh"))
        .args(args)
        .env("MACROCOH_THREADS", threads)
        .output()
        .expect("failed to spawn binary")
}

fn read_rows(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

#[test]
fn spin_sweep_single_point_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ghz.csv");
    let status = macrocoh(&[
        "spin-sweep",
        "--n",
        "256",
        "--states",
        "ghz",
        "--sigma",
        "1",
        "1",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let rows = read_rows(&out);
    assert_eq!(rows[0], "state,sigma,measure,M,I_W,I_F_or_4Var,bound_M_w,bound_M_f");
    assert_eq!(rows.len(), 2);
    let fields: Vec<&str> = rows[1].split(',').collect();
    assert_eq!(fields[0], "ghz");
    assert_eq!(fields[2], "bures");
    let m: f64 = fields[3].parse().unwrap();
    assert!((m - 0.5857864376269049).abs() < 1e-9);
}

#[test]
fn csv_output_is_byte_identical_across_runs_and_schedules() {
    let dir = tempfile::tempdir().unwrap();
    let args_for = |name: &str| {
        vec![
            "spin-sweep".to_string(),
            "--n".into(),
            "64".into(),
            "--states".into(),
            "ghz,product:theta=0.7853981633974483,rdicke:k=8".into(),
            "--sigma".into(),
            "1".into(),
            "64".into(),
            "12".into(),
            "--out".into(),
            dir.path().join(name).to_str().unwrap().to_string(),
        ]
    };
    let run = |name: &str, threads: &str| {
        let args = args_for(name);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = macrocoh_with_threads(&refs, threads);
        assert!(out.status.success());
        fs::read(dir.path().join(name)).unwrap()
    };
    let first = run("a.csv", "1");
    let second = run("b.csv", "1");
    let parallel = run("c.csv", "4");
    assert_eq!(first, second, "reruns must be byte-identical");
    assert_eq!(first, parallel, "thread count must not affect output");
}

#[test]
fn sweep_rows_are_sorted_and_respect_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = macrocoh(&[
        "spin-sweep",
        "--n",
        "32",
        "--states",
        "ghz,decoghz:gamma=0.85",
        "--sigma",
        "0.5",
        "32",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let rows = read_rows(&out);
    let data = &rows[1..];
    assert_eq!(data.len(), 18);
    let keys: Vec<(String, f64)> = data
        .iter()
        .map(|r| {
            let fields: Vec<&str> = r.split(',').collect();
            (fields[0].to_string(), fields[1].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(keys, sorted, "rows must be sorted by (state, sigma)");
    for row in data {
        let fields: Vec<&str> = row.split(',').collect();
        let m: f64 = fields[3].parse().unwrap();
        let bound_w: f64 = fields[6].parse().unwrap();
        let bound_f: f64 = fields[7].parse().unwrap();
        assert!(m <= bound_w + 1e-8);
        assert!(m <= bound_f + 1e-8);
    }
}

#[test]
fn malformed_state_spec_exits_2_and_names_the_token() {
    let out = macrocoh(&[
        "spin-sweep",
        "--n",
        "8",
        "--states",
        "rdicke:q=3",
        "--sigma",
        "1",
        "2",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("rdicke:q=3"), "stderr: {stderr}");
}

#[test]
fn missing_required_flag_exits_2() {
    let out = macrocoh(&["spin-sweep", "--n", "8", "--states", "ghz"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn insufficient_cutoff_exits_4() {
    let out = macrocoh(&[
        "boson-sweep",
        "--states",
        "coherent:alpha=5",
        "--cutoff",
        "10",
        "--sigma",
        "1",
        "1",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn boson_sweep_emits_variance_bound_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("boson.csv");
    let status = macrocoh(&[
        "boson-sweep",
        "--states",
        "coherent:alpha=2,fock:n=4",
        "--sigma",
        "1",
        "4",
        "3",
        "--grid-points",
        "1024",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let rows = read_rows(&out);
    assert_eq!(rows.len(), 7);
    for row in &rows[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        let m: f64 = fields[3].parse().unwrap();
        let var: f64 = fields[4].parse().unwrap();
        let four_var: f64 = fields[5].parse().unwrap();
        assert!((four_var - 4.0 * var).abs() < 1e-12);
        let bound_w: f64 = fields[6].parse().unwrap();
        assert!(m <= bound_w + 1e-8);
    }
}

#[test]
fn bounds_compare_emits_crossing_footer() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bounds.csv");
    let status = macrocoh(&[
        "bounds-compare",
        "--n",
        "100",
        "--gamma",
        "0.85",
        "--sigma",
        "5",
        "200",
        "31",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("sigma,fidelity_sqrt,bound_w,bound_f"));
    let footer = text
        .lines()
        .last()
        .expect("footer row");
    assert!(footer.starts_with("# crossing_sigma = "), "footer: {footer}");
    assert!(!footer.contains("none"));
}

#[test]
fn gnuplot_flag_writes_companion_script() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("fig.csv");
    let status = macrocoh(&[
        "spin-sweep",
        "--n",
        "16",
        "--states",
        "ghz",
        "--sigma",
        "1",
        "16",
        "4",
        "--out",
        out.to_str().unwrap(),
        "--gnuplot",
    ]);
    assert!(status.status.success());
    let script = fs::read_to_string(dir.path().join("fig.gp")).unwrap();
    assert!(script.contains("fig.csv"));
    assert!(script.contains("ghz"));
}

#[test]
fn gnuplot_without_out_is_a_usage_error() {
    let out = macrocoh(&[
        "spin-sweep",
        "--n",
        "8",
        "--states",
        "ghz",
        "--sigma",
        "1",
        "2",
        "2",
        "--gnuplot",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decoherence_check_reports_mapping_and_passes() {
    let out = macrocoh(&[
        "decoherence-check",
        "--n",
        "8",
        "--g",
        "1",
        "--t",
        "1",
        "--mu",
        "1",
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("sigma = mu/(sqrt(2) g t)"), "{stdout}");
    assert!(stdout.contains("OK"), "{stdout}");
}

#[test]
fn decoherence_check_thermal_mapping() {
    let out = macrocoh(&[
        "decoherence-check",
        "--n",
        "6",
        "--g",
        "1",
        "--t",
        "1",
        "--beta",
        "2",
        "--omega",
        "1",
    ]);
    assert!(out.status.success(), "{out:?}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("thermal mapping"), "{stdout}");
    assert!(stdout.contains("6.1708757723509"), "{stdout}");
}

#[test]
fn decoherence_check_zero_time_reports_inf() {
    let out = macrocoh(&[
        "decoherence-check",
        "--n",
        "4",
        "--g",
        "1",
        "--t",
        "0",
        "--mu",
        "1",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("sigma = inf"), "{stdout}");
}

#[test]
fn relent_distance_leaves_bound_columns_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("relent.csv");
    let status = macrocoh(&[
        "spin-sweep",
        "--n",
        "8",
        "--states",
        "ghz",
        "--sigma",
        "1",
        "2",
        "2",
        "--distance",
        "relent",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{status:?}");
    for row in &read_rows(&out)[1..] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields[2], "relent");
        assert!(fields[3].parse::<f64>().unwrap() >= 0.0);
        assert_eq!(fields[6], "");
        assert_eq!(fields[7], "");
    }
}
