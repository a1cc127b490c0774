use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fracsob(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsob")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write_grid(path: &Path, n: usize, f: impl Fn(f64) -> f64) {
    let mut s = format!("# domain_length=1 n_intervals={n}\n");
    for j in 0..=n {
        let t = j as f64 / n as f64;
        s.push_str(&format!("{t:.17e},{:.17e}\n", f(t)));
    }
    fs::write(path, s).unwrap();
}

fn read_grid(text: &str) -> Vec<(f64, f64)> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| {
            let mut it = l.split(',');
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect()
}

#[test]
fn ml_eval_prints_value_error_and_regime() {
    let o = fracsob(&["ml-eval", "--alpha", "1", "--beta", "1", "--z", "-1.5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let fields: Vec<&str> = out.trim().split(',').collect();
    assert_eq!(fields.len(), 3);
    let v: f64 = fields[0].parse().unwrap();
    assert!((v - (-1.5f64).exp()).abs() < 1e-14);
    assert!(fields[1].parse::<f64>().unwrap() >= 0.0);
}

#[test]
fn invalid_order_exits_one() {
    let o = fracsob(&["ml-eval", "--alpha", "0", "--beta", "1", "--z", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: invalid-order:"), "{}", stderr(&o));
    let o = fracsob(&["ml-eval", "--alpha", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: invalid-input:"));
    let o = fracsob(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(fracsob(&["--help"]).status.success());
}

#[test]
fn frac_integrate_and_caputo_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.csv");
    let out = dir.path().join("j.csv");
    write_grid(&input, 256, |_| 1.0);
    let o = fracsob(&["frac-integrate", "--alpha", "0.5", "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_grid(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 257);
    for (t, v) in &rows {
        assert!((v - 2.0 * (t / std::f64::consts::PI).sqrt()).abs() < 1e-14);
    }
    // J^{1/2} 1 vanishes at 0, so the L1 derivative of it lands back near 1
    let back = fracsob(&["caputo", "--alpha", "0.5", "--method", "l1", "--input", out.to_str().unwrap()]);
    assert!(back.status.success());
    let rows = read_grid(&stdout(&back));
    assert!(rows[128..].iter().all(|(_, v)| (v - 1.0).abs() < 5e-2));

    let spectral = fracsob(&["caputo", "--alpha", "0.75", "--modes", "32", "--input", input.to_str().unwrap()]);
    assert!(spectral.status.success());
    assert!(stderr(&spectral).contains("warning"));
}

#[test]
fn rl_derivative_and_balakrishnan_run() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.csv");
    write_grid(&input, 128, |t| (3.0 * t).sin());
    let a = fracsob(&["balakrishnan", "--alpha", "0.4", "--input", input.to_str().unwrap()]);
    let b = fracsob(&["frac-integrate", "--alpha", "0.4", "--input", input.to_str().unwrap()]);
    assert!(a.status.success() && b.status.success());
    assert!(stderr(&a).contains("tail_bound="));
    for ((_, x), (_, y)) in read_grid(&stdout(&a)).iter().zip(read_grid(&stdout(&b)).iter()) {
        assert!((x - y).abs() < 1e-4);
    }
    let d = fracsob(&["rl-derivative", "--alpha", "0.4", "--input", input.to_str().unwrap()]);
    assert!(d.status.success());
    assert_eq!(read_grid(&stdout(&d)).len(), 129);
    let missing = fracsob(&["rl-derivative", "--alpha", "0.4", "--input", "/nonexistent/u.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).starts_with("error: "));
}

#[test]
fn verify_norms_writes_footer() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("norms.csv");
    let o = fracsob(&["verify-norms", "--alpha", "0.5", "--family", "eigen", "--n", "512", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# family=eigen"));
    assert_eq!(lines[1], "index,ratio");
    let data: Vec<&str> = lines.iter().filter(|l| l.chars().next().is_some_and(|c| c.is_ascii_digit())).copied().collect();
    assert_eq!(data.len(), 16);
    let footer: Vec<(&str, f64)> = lines[lines.len() - 3..]
        .iter()
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k, v.parse().unwrap())
        })
        .collect();
    assert_eq!(footer[0].0, "min");
    assert_eq!(footer[1].0, "max");
    assert_eq!(footer[2].0, "spread");
    assert!((footer[2].1 - footer[1].1 / footer[0].1).abs() < 1e-12 * footer[2].1);

    let inv = fracsob(&["verify-norms", "--alpha", "0.75", "--family", "trig", "--direction", "inverse", "--n", "512"]);
    // every trig member has a nonzero trace at α > 1/2
    assert_eq!(inv.status.code(), Some(1));
}

fn write_config(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

const SMALL: &str = "\
alpha = 0.5
M = 32
N = 64
K = 8
time_modes = 16
b_expr = 1
c_expr = 0.5
solver = general
F_expr = sin(pi*x)*(1+t)
solution_output = u.csv
report_output = report.csv
increments_output = inc.csv
snapshots_output = snap.csv
";

#[test]
fn solve_diffusion_is_thread_count_independent() {
    let mut outputs = Vec::new();
    for threads in ["1", "2"] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = write_config(dir.path(), "run.cfg", SMALL);
        let o = fracsob(&["--threads", threads, "solve-diffusion", "--config", cfg.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        let read = |n: &str| fs::read(dir.path().join(n)).unwrap();
        outputs.push((read("u.csv"), read("report.csv"), read("inc.csv"), read("snap.csv")));
    }
    assert!(outputs[0] == outputs[1]);
    let report = String::from_utf8(outputs[0].1.clone()).unwrap();
    let mut lines = report.lines();
    assert_eq!(
        lines.next().unwrap(),
        "norm_halpha_time,norm_l2h2,norm_l2h2_fd,norm_f,c_observed,log_slope,residual,source_truncation,solver,iterations"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[8], "general");
    assert!(row[9].parse::<usize>().unwrap() > 1);
    let inc = String::from_utf8(outputs[0].2.clone()).unwrap();
    assert!(inc.starts_with("iteration,increment,ratio\n1,"));
    let snap = String::from_utf8(outputs[0].3.clone()).unwrap();
    assert!(snap.starts_with("x,t="));
    assert_eq!(snap.lines().count(), 34);
}

#[test]
fn regularity_report_matches_solver_report() {
    let dir = tempfile::tempdir().unwrap();
    let body = SMALL.replace("b_expr = 1\n", "").replace("c_expr = 0.5\n", "").replace("solver = general\n", "");
    let cfg = write_config(dir.path(), "run.cfg", &body);
    let o = fracsob(&["solve-diffusion", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let sol = dir.path().join("u.csv");
    let o = fracsob(&["regularity-report", "--config", cfg.to_str().unwrap(), "--solution", sol.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let a: Vec<f64> = stdout(&o).lines().nth(1).unwrap().split(',').take(8).map(|v| v.parse().unwrap()).collect();
    let saved = fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let b: Vec<f64> = saved.lines().nth(1).unwrap().split(',').take(8).map(|v| v.parse().unwrap()).collect();
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-10 * y.abs().max(1e-300), "{a:?} vs {b:?}");
    }
}

#[test]
fn config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.cfg", &format!("{SMALL}colour = blue\n"));
    let o = fracsob(&["solve-diffusion", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: invalid-input:"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "stuck.cfg", &format!("{SMALL}max_iter = 1\n"));
    let o = fracsob(&["solve-diffusion", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: no-convergence:"), "{}", stderr(&o));

    let cfg = write_config(dir.path(), "flat.cfg", &SMALL.replace("alpha = 0.5", "alpha = 0.5\na_expr = x - 0.5"));
    let o = fracsob(&["solve-diffusion", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: ellipticity:"), "{}", stderr(&o));
}
