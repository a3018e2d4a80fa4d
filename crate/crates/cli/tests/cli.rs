use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use clap::Parser;
use tmsv_cli::{resolve, Cli, RunConfig};
use tmsv_core::wigner::{wigner_tmsv, PhaseSpacePoint4};
use tmsv_core::{GridSpec, SqueezeParams};

fn tmsv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmsv")).args(args).output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn cfg(args: &[&str]) -> Result<RunConfig, tmsv_cli::CliError> {
    let argv: Vec<&str> = std::iter::once("tmsv").chain(args.iter().copied()).collect();
    resolve(&Cli::try_parse_from(argv).unwrap())
}

/// `(width, height, maxval, comment, pixels)` of a 16-bit P5 file.
fn read_pgm(path: &Path) -> (usize, usize, String, Vec<u16>) {
    let bytes = fs::read(path).unwrap();
    let mut lines = Vec::new();
    let mut pos = 0;
    while lines.len() < 4 {
        let end = pos + bytes[pos..].iter().position(|&b| b == b'\n').unwrap();
        lines.push(String::from_utf8(bytes[pos..end].to_vec()).unwrap());
        pos = end + 1;
    }
    assert_eq!(lines[0], "P5");
    assert_eq!(lines[3], "65535");
    let dims: Vec<usize> = lines[2].split(' ').map(|s| s.parse().unwrap()).collect();
    let px = bytes[pos..].chunks(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect::<Vec<_>>();
    assert_eq!(px.len(), dims[0] * dims[1]);
    (dims[0], dims[1], lines[1].clone(), px)
}

#[test]
fn empty_argv_gives_defaults() {
    let c = cfg(&[]).unwrap();
    assert_eq!((c.r, c.theta, c.k), (0.8, FRAC_PI_2, 1));
    assert_eq!(c.grid, GridSpec::square(3.0, 201).unwrap());
}

#[test]
fn flags_override_file_which_overrides_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "# comment\nr=0.7\nk=2\n").unwrap();
    let path = conf.to_str().unwrap();
    let c = cfg(&["--config", path, "--r", "1.5"]).unwrap();
    assert_eq!((c.r, c.k), (1.5, 2));
    let c = cfg(&["--config", path]).unwrap();
    assert_eq!(c.r, 0.7);
}

#[test]
fn malformed_input_exits_2_naming_the_token() {
    let o = tmsv(&["--k", "-1", "wigner"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`k`"), "{}", stderr(&o));

    let o = tmsv(&["wigner", "--grid", "0:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`grid`"));

    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    fs::write(&conf, "colour=red\n").unwrap();
    let o = tmsv(&["--config", conf.to_str().unwrap(), "wigner"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("colour"));

    assert_eq!(tmsv(&["reproduce", "fig9"]).status.code(), Some(2));
    assert_eq!(tmsv(&["--bogus"]).status.code(), Some(2));
    assert_eq!(tmsv(&[]).status.code(), Some(2));
}

#[test]
fn truncation_failure_exits_3_naming_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["herald", "--r", "2", "--cutoff", "3", "--out", out]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("two-mode squeezed vacuum"));
}

#[test]
fn unwritable_output_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("plain-file");
    fs::write(&file, "x").unwrap();
    let o = tmsv(&["vortex", "--out", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`out`"));
}

#[test]
fn wigner_outputs_and_heatmap_orientation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["wigner", "--grid", "-3:3:41", "--format", "csv,json,pgm", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let csv = fs::read_to_string(dir.path().join("wigner_xy.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,y,W"));
    assert_eq!(lines.count(), 41 * 41);
    assert!(!csv.contains('\r'));

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("wigner_xy.json")).unwrap()).unwrap();
    assert_eq!(json["columns"], serde_json::json!(["x", "y", "W"]));
    assert_eq!(json["data"].as_array().unwrap().len(), 41 * 41);
    assert_eq!(json["manifest"]["config"]["k"], "1");

    // k = 1: the most negative value sits at the origin
    let (w, h, comment, px) = read_pgm(&dir.path().join("wigner_xy.pgm"));
    assert_eq!((w, h), (41, 41));
    let darkest = px.iter().enumerate().min_by_key(|(_, &v)| v).unwrap().0;
    assert_eq!(darkest, 20 * 41 + 20);
    assert_eq!(px[darkest], 0);
    let origin = wigner_tmsv(SqueezeParams::new(0.8, FRAC_PI_2).unwrap(), 1, &PhaseSpacePoint4::origin());
    assert!(comment.contains(&format!("min={origin}")), "{comment}");
}

#[test]
fn fixed_axes_reach_the_slice() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["wigner", "--slice", "xpy", "--fixed", "y=0.25,px=-0.5", "--grid", "-1:1:3", "--k", "2", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("wigner_xpy.csv")).unwrap();
    let p = SqueezeParams::new(0.8, FRAC_PI_2).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,py,W"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        let expect = wigner_tmsv(p, 2, &PhaseSpacePoint4::new(v[0], -0.5, 0.25, v[1]));
        assert_eq!(v[2], expect);
    }
}

#[test]
fn manifest_conf_reruns_to_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let o = tmsv(&["vortex", "--k", "2", "--theta", "0.4", "--grid", "-2:2:61", "--format", "csv,json", "--out", a.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let conf = a.path().join("manifest.conf");
    let o = tmsv(&["--config", conf.to_str().unwrap(), "--out", b.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["vortex_singularities.csv", "vortex_summary.json", "manifest.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
    let summary = fs::read_to_string(a.path().join("vortex_summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().starts_with("2,0.8,2,"), "{summary}");
}

#[test]
fn scan_emits_both_negativity_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["scan", "--k", "0", "--r-grid", "0.5:1:0.25", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("scan_log_negativity_k0.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("r,log_negativity,log_negativity_paper_literal"));
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[1] - 2.0 * v[0] / std::f64::consts::LN_2).abs() < 1e-9);
        assert!(v[2].abs() < 1e-12);
    }
}

#[test]
fn herald_reports_fidelities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["herald", "--r", "0.5", "--k", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("herald.csv")).unwrap();
    let row: Vec<f64> = csv.lines().nth(1).unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert!(row[6] >= 0.99 && (row[7] - 1.0).abs() < 1e-10, "{csv}");
}

#[test]
fn fig2_marks_three_singularities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["reproduce", "fig2", "--format", "csv,pgm", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = fs::read_to_string(dir.path().join("fig2_singularities.csv")).unwrap();
    assert_eq!(s.lines().count(), 1 + 3);
    let (w, h, _, _) = read_pgm(&dir.path().join("fig2_intensity.pgm"));
    assert_eq!((w, h), (201, 201));
}

#[test]
fn fig4_writes_six_slices_with_positive_peak() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["reproduce", "fig4", "--grid", "-3:3:21", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for plane in ["xy", "pxpy", "xpx", "ypy", "xpy", "ypx"] {
        assert!(dir.path().join(format!("fig4_{plane}.csv")).exists(), "{plane}");
    }
    let s = fs::read_to_string(dir.path().join("fig4_summary.csv")).unwrap();
    let center: f64 = s.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((center - 4.0 / std::f64::consts::PI.powi(2)).abs() < 1e-12);
}

#[test]
fn fig5_and_fig6_have_their_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tmsv(&["reproduce", "fig5", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = fs::read_to_string(dir.path().join("fig5.csv")).unwrap();
    assert!(s.starts_with("k,r,ratio,paper_closed_form,log_negativity,log_negativity_paper_literal\n"));
    assert_eq!(s.lines().count(), 1 + 4 * 50);

    let o = tmsv(&["reproduce", "fig6", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = fs::read_to_string(dir.path().join("fig6_argmax.csv")).unwrap();
    assert!(s.starts_with("k,argmax_r,"));
    assert_eq!(s.lines().count(), 1 + 4);
}
