use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn oscilla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscilla"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(cmd: &str, config: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![
        cmd,
        "--config",
        config.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = oscilla(&args);
    assert!(
        o.status.success(),
        "{cmd} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn negative_tolerance_is_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "[volume]\nfamily = \"euclidean\"\nm = 3\n\n[potential]\nfamily = \"euler\"\nh = 1.0\n\n[solver]\nresidual_tol = -1e-6\n\n[solve]\nhorizon = 10\n",
    )
    .unwrap();
    let o = oscilla(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":10: field `solver.residual_tol`"), "{err}");
    assert!(!dir.path().join("track.csv").exists());
}

#[test]
fn syntax_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[solve]\nhorizon = = 3\n").unwrap();
    let o = oscilla(&["solve", "--config", cfg.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.toml:2"));
    let o = oscilla(&["solve"]);
    assert!(!o.status.success());
}

#[test]
fn euler_zero_ratios() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("solve", &configs().join("euler.toml"), dir.path(), &[]);
    assert_eq!(header(&dir.path().join("track.csv")), "t,z,flux,y,is_near_zero");
    let zeros = fs::read_to_string(dir.path().join("zeros.csv")).unwrap();
    let mut lines = zeros.lines();
    assert_eq!(lines.next(), Some("index,location,bracket_width,ratio"));
    let ratios: Vec<f64> = lines
        .filter_map(|l| {
            l.split(',')
                .nth(3)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().unwrap())
        })
        .collect();
    assert!(ratios.len() >= 4);
    let target = (2.0 * std::f64::consts::PI / 3f64.sqrt()).exp();
    for r in ratios {
        assert!((r / target - 1.0).abs() < 1e-3, "{r}");
    }
}

#[test]
fn outputs_are_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cases = [
        ("solve", "euler.toml", vec!["track.csv", "zeros.csv"]),
        ("critical", "euler.toml", vec!["critical.csv"]),
        (
            "criteria",
            "hyperbolic.toml",
            vec!["criteria.json", "criteria_series.csv"],
        ),
        ("gaps", "exponential_gaps.toml", vec!["gaps.csv"]),
        ("spectral", "exponential_gaps.toml", vec!["index.csv"]),
    ];
    for (cmd, cfg, files) in cases {
        run_ok(cmd, &configs().join(cfg), a.path(), &["--seed", "7", "--threads", "1"]);
        run_ok(cmd, &configs().join(cfg), b.path(), &["--seed", "7", "--threads", "4"]);
        for f in files {
            let x = fs::read(a.path().join(f)).unwrap();
            let y = fs::read(b.path().join(f)).unwrap();
            assert!(!x.is_empty());
            assert_eq!(x, y, "{cmd}: {f} differs between runs");
        }
    }
}

#[test]
fn documented_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run_ok("critical", &configs().join("euler.toml"), d, &[]);
    assert_eq!(header(&d.join("critical.csv")), "t,chi,chi_f,chi_tilde_f,tail_integral");
    run_ok("gaps", &configs().join("exponential_gaps.toml"), d, &[]);
    assert_eq!(
        header(&d.join("gaps.csv")),
        "tau,T1,T2,ratio,g3,g1,g2,g3p,g1p,g2p,bound"
    );
    run_ok("spectral", &configs().join("spectral.toml"), d, &[]);
    assert_eq!(header(&d.join("spectral.csv")), "R,lower,upper,fd,constant,c_star");
    run_ok("criteria", &configs().join("euler.toml"), d, &[]);
    assert_eq!(header(&d.join("criteria_series.csv")), "id,t,value");
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("criteria.json")).unwrap()).unwrap();
    let ids: Vec<&str> = json
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    assert_eq!(
        ids,
        [
            "first_zero",
            "oscillation",
            "item_i",
            "item_ii",
            "item_iii",
            "item_iv",
            "item_v",
            "hille_nehari"
        ]
    );
}

#[test]
fn table_profile_with_jump() {
    let dir = tempfile::tempdir().unwrap();
    run_ok("solve", &configs().join("jump_table.toml"), dir.path(), &[]);
    let track = fs::read_to_string(dir.path().join("track.csv")).unwrap();
    assert!(
        track.lines().any(|l| l.starts_with("3,")),
        "jump location missing from the grid"
    );
}
