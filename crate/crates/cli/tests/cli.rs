use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const AT_DRIVE: &str = "# small resonant sweep\nmode = at-drive\nstart = 30\nstop = 60\npoints = 3\n";

fn sps(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sps")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Metadata lines and data records of an output CSV.
fn parse(text: &str) -> (Vec<String>, Vec<csv::StringRecord>) {
    let meta = text.lines().filter(|l| l.starts_with('#')).map(String::from).collect();
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let rows = reader.records().map(|r| r.unwrap()).collect();
    (meta, rows)
}

#[test]
fn run_writes_metadata_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "a.conf", AT_DRIVE);
    let out = dir.path().join("a.csv");
    let o = sps(&["run", s(&conf), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let (meta, rows) = parse(&text);
    assert!(meta.contains(&"# mode = at-drive".to_string()));
    assert!(meta.iter().any(|l| l.starts_with("# sps_version = ")));
    assert_eq!(rows.len(), 3);
    let swept: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(swept, [30.0, 45.0, 60.0]);
    for r in &rows {
        let i: f64 = r[4].parse().unwrap();
        assert!(i > 0.5 && i < 0.6);
        assert_eq!(&r[r.len() - 1], "ok");
    }
    assert!(!dir.path().join("a.csv.partial").exists());
}

#[test]
fn output_does_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "a.conf", AT_DRIVE);
    let one = sps(&["run", s(&conf), "--jobs", "1"]);
    let three = sps(&["run", s(&conf), "--jobs", "3"]);
    assert_eq!(one.status.code(), Some(0));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, three.stdout);
}

#[test]
fn flags_and_set_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "a.conf", AT_DRIVE);
    let o = sps(&["run", s(&conf), "--engine", "full-pme", "--rtol", "1e-9", "--set", "points=2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (meta, rows) = parse(&String::from_utf8(o.stdout).unwrap());
    assert!(meta.contains(&"# engine = full-pme".to_string()));
    assert!(meta.contains(&"# rtol = 1e-9".to_string()), "{meta:?}");
    assert_eq!(rows.len(), 2);
}

#[test]
fn configuration_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "a.conf", AT_DRIVE);
    let typo = write(dir.path(), "typo.conf", "mode = at-drive\nstrat = 1\n");
    let unknown_mode = write(dir.path(), "m.conf", "mode = sideways\nstart = 1\nstop = 2\npoints = 2\n");
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["run", s(&typo)], "line 2"),
        (vec!["run", s(&unknown_mode)], "sideways"),
        (vec!["run", "/nonexistent/x.conf"], "x.conf"),
        (vec!["run", s(&conf), "--set", "points"], "points"),
        (vec!["run", s(&conf), "--engine", "exact"], "exact"),
        (vec!["run", s(&conf), "--out", "x.csv", "--plot", "fig99"], "fig99"),
        (vec!["run", s(&conf), "--plot", "fig3a"], "--plot"),
        (vec!["frobnicate"], "frobnicate"),
    ];
    for (args, needle) in cases {
        let o = sps(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains(needle), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn failed_points_set_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // Negative drive amplitudes are rejected point by point.
    let all = write(dir.path(), "all.conf", "mode = at-drive\nstart = -2\nstop = -1\npoints = 2\n");
    let some = write(dir.path(), "some.conf", "mode = stark-fixed-delta\ndelta = 40\nstart = -0.5\nstop = 0.5\npoints = 3\n");
    let o = sps(&["run", s(&all)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = sps(&["run", s(&some)]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let (_, rows) = parse(&String::from_utf8(o.stdout).unwrap());
    let status: Vec<&str> = rows.iter().map(|r| r.get(r.len() - 1).unwrap()).collect();
    assert!(status[0].starts_with("error:"), "{status:?}");
    assert!(!status[1].starts_with("error:") && !status[2].starts_with("error:"));
}

#[test]
fn table_i_reports_the_presets() {
    let o = sps(&["table-i"]);
    assert_eq!(o.status.code(), Some(0));
    let (meta, rows) = parse(&String::from_utf8(o.stdout).unwrap());
    assert!(meta.contains(&"# purcell_factor = 10".to_string()));
    let b: Vec<f64> = rows.iter().map(|r| r[16].parse().unwrap()).collect();
    for (got, want) in b.iter().zip([0.949, 0.809, 0.826]) {
        assert!((got - want).abs() < 2e-3, "{b:?}");
    }
}

#[test]
fn run_renders_requested_plots_next_to_the_csv() {
    let dir = tempfile::tempdir().unwrap();
    let conf = write(dir.path(), "a.conf", AT_DRIVE);
    let out = dir.path().join("a.csv");
    let o = sps(&["run", s(&conf), "--out", s(&out), "--plot", "fig3a", "--plot", "efficiency"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["fig3a.svg", "efficiency.svg"] {
        let svg = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(svg.starts_with("<svg"));
    }
}

#[test]
fn plot_subcommand_reports_recipe_errors() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write(dir.path(), "in.csv", "# x\nswept,N,I\n1,0.5,0.6\n2,0.5,0.7\n");
    let o = sps(&["plot", s(&csv), "fig9", "--out-dir", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("g2_0"));
    assert!(!dir.path().join("fig9.svg").exists());
    let o = sps(&["plot", s(&csv), "nonesuch"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn optimum_flags_a_boundary_maximum_without_phonons() {
    let o = sps(&["optimum", "--delta-ac", "10", "--phonons", "none", "--points", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let (_, rows) = parse(&String::from_utf8_lossy(&o.stdout));
    assert_eq!(&rows[0][4], "false");
    assert!(stderr(&o).contains("boundary"));
}

#[test]
fn list_names_every_registry() {
    let o = sps(&["list"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["dopri5", "expm", "rk4", "secular", "full-pme", "stark-detuning", "fig8b", "tail_floor"] {
        assert!(text.contains(name), "{name}");
    }
}
