use std::path::Path;
use std::process::{Command, Output};

fn rydpump(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydpump")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn identical_specs_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = rydpump(&[
            "evolve", "--preset", "fig2-inset", "--t-max-ms", "20", "--samples", "11", "--no-timestamp", "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let first = std::fs::read_to_string(&a).unwrap();
    assert!(first.starts_with("time_ms,pop_ff,pop_S,pop_T,pop_aa"));
    let r = rows(&first);
    for v in &r[1][1..5] {
        assert!((v.parse::<f64>().unwrap() - 0.25).abs() < 1e-12);
    }
}

#[test]
fn timestamp_line_is_written_by_default() {
    let o = rydpump(&["steady", "--preset", "fig2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("# generated: "));
}

#[test]
fn closed_system_without_drive_is_stationary() {
    let o = rydpump(&[
        "evolve", "--scheme", "bell", "--gamma-khz", "0", "--rabi-mhz", "0", "--microwave", "0", "--initial",
        "singlet", "--samples", "5", "--no-timestamp",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    for row in &r[2..] {
        assert_eq!(row[1..], r[1][1..]);
    }
}

#[test]
fn steady_reports_residual_and_backend() {
    let o = rydpump(&["steady", "--preset", "fig2", "--delta-mhz", "3.435", "--no-timestamp", "--cross-check"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    let col = |name: &str| r[0].iter().position(|c| c == name).unwrap();
    let f: f64 = r[1][col("fidelity")].parse().unwrap();
    assert!((f - 0.999).abs() <= 0.005);
    assert!(r[1][col("residual")].parse::<f64>().unwrap() < 1e-8);
    assert_eq!(r[1][col("backend")], "null-space");
}

#[test]
fn exit_codes() {
    let o = rydpump(&["steady", "--scheme", "bell", "--rabi-mhz", "0", "--microwave", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("non-unique steady state"));
    let o = rydpump(&["steady", "--preset", "fig99"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rydpump(&["evolve", "--samples", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("samples"));
    let o = rydpump(&["steady", "--scheme", "qutrit", "--measures", "chsh"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rydpump(&["evolve", "--initial", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = rydpump(&["evolve", "--bogus-flag"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn degenerate_sweep_gives_identical_values() {
    let o = rydpump(&[
        "sweep", "--preset", "fig2", "--axis", "urr-mhz:6:6:2", "--axis", "gamma-khz:1.5:1.5:2", "--no-timestamp",
        "--workers", "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = rows(&stdout(&o));
    assert_eq!(r[0], ["urr_mhz", "gamma_khz", "fidelity", "error"]);
    assert_eq!(r.len(), 5);
    for row in &r[2..] {
        assert_eq!(row[2], r[1][2]);
    }
}

#[test]
fn sweep_records_point_failures_and_continues() {
    // zero drive at the first Ω point leaves the steady state non-unique
    let o = rydpump(&["sweep", "--preset", "fig8a", "--axis", "rabi-mhz:0:0.04:3", "--no-timestamp"]);
    assert!(o.status.success());
    let r = rows(&stdout(&o));
    assert_eq!(r[1][1], "NaN");
    assert!(r[1][2].contains("non-unique"));
    assert!(r[2][2].is_empty() && r[3][2].is_empty());
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |w: &str| {
        stdout(&rydpump(&[
            "sweep", "--preset", "fig8b", "--axis", "urr-mhz:2:8:3", "--axis", "gamma-khz:1:2:3", "--reduce", "chsh",
            "--no-timestamp", "--workers", w,
        ]))
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "preset = fig2\nrabimhz = 0.05\ngammakhz = 9\nnotimestamp = true\n").unwrap();
    let from_file = stdout(&rydpump(&["steady", "--config", cfg.to_str().unwrap(), "--gamma-khz", "2"]));
    let from_flags = stdout(&rydpump(&["steady", "--preset", "fig2", "--rabi-mhz", "0.05", "--gamma-khz", "2", "--no-timestamp"]));
    assert_eq!(from_file, from_flags);
    std::fs::write(&cfg, "rabi_mhz = quick\n").unwrap();
    let o = rydpump(&["steady", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn initial_state_from_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.txt");
    // |ff⟩⟨ff| as re im pairs
    let mut text = String::new();
    for i in 0..9 {
        let row: Vec<&str> = (0..9).map(|j| if i == 0 && j == 0 { "1 0" } else { "0 0" }).collect();
        text.push_str(&row.join("  "));
        text.push('\n');
    }
    std::fs::write(&path, text).unwrap();
    let a = stdout(&rydpump(&["evolve", "--preset", "fig2", "--initial", path.to_str().unwrap(), "--t-max-ms", "5", "--samples", "3", "--no-timestamp"]));
    let b = stdout(&rydpump(&["evolve", "--preset", "fig2", "--initial", "ground-ff", "--t-max-ms", "5", "--samples", "3", "--no-timestamp"]));
    assert_eq!(a, b);
}

#[test]
fn json_output_mirrors_csv() {
    let csv = stdout(&rydpump(&["steady", "--preset", "fig5", "--no-timestamp"]));
    let json = stdout(&rydpump(&["steady", "--preset", "fig5", "--no-timestamp", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    let r = rows(&csv);
    for (i, name) in r[0].iter().enumerate() {
        let field = &v["records"][0][name];
        match field.as_f64() {
            Some(x) => assert_eq!(x, r[1][i].parse::<f64>().unwrap()),
            None => assert_eq!(field.as_str().unwrap(), r[1][i]),
        }
    }
}

#[test]
fn reproduce_writes_named_file() {
    let dir = tempfile::tempdir().unwrap();
    let o = rydpump(&["reproduce", "fig2", "--out-dir", dir.path().to_str().unwrap(), "--steps", "3", "--no-timestamp"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert!(text.starts_with("urr_mhz,fidelity,error\n"));
    assert_eq!(text.lines().count(), 4);
    assert!(!Path::new("fig2.csv").exists());
    let o = rydpump(&["reproduce", "fig7", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}
