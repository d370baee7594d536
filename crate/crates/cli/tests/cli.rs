use std::process::{Command, Output};

use gqca_core::{decode, CellConfig, Layout};

fn gqca(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gqca")).args(args).output().expect("run gqca")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn layout_file(dir: &tempfile::TempDir, text: &str) -> String {
    let p = dir.path().join("layout.txt");
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sim_trace_lines_round_trip() {
    // One qubit and a CU; four transport steps.
    let o = gqca(&["sim", "--config", "duuddddddddddddddduudduudd", "--seq", "B0 A0 B0 A0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    for (i, l) in lines.iter().enumerate() {
        let parts: Vec<&str> = l.split(" | ").collect();
        assert_eq!(parts.len(), 3, "{l}");
        assert_eq!(parts[0], i.to_string());
        let c: CellConfig = parts[2].parse().unwrap();
        assert_eq!(c.to_string(), parts[2]);
    }
    let last: CellConfig = lines[4].split(" | ").nth(2).unwrap().parse().unwrap();
    let moved = Layout::new(26, vec![5], Some(14)).unwrap();
    assert_eq!(decode(&moved, &last).unwrap().to_string(), "q=0,cu=1");
}

#[test]
fn quantum_trace_lists_terms() {
    let o = gqca(&["sim", "--config", "dudd", "--seq", "A0:H"]);
    assert!(o.status.success());
    let last = stdout(&o).lines().last().unwrap().to_string();
    assert!(last.contains("superposed("), "{last}");
    assert!(last.contains("0.707107"), "{last}");
}

#[test]
fn exit_codes() {
    assert_eq!(gqca(&["sim"]).status.code(), Some(2));
    assert_eq!(gqca(&["spectra", "--bogus"]).status.code(), Some(2));
    assert_eq!(gqca(&["spectra", "--scan", "3:2:0.1"]).status.code(), Some(2));
    let o = gqca(&["spectra", "--k", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error:"));
    assert_eq!(gqca(&["parallel", "--n", "8", "--pred", "table:10101010"]).status.code(), Some(1));
    assert_eq!(gqca(&["sim", "--config", "dxd", "--seq", "A0"]).status.code(), Some(1));
}

#[test]
fn spectra_k3_is_separated() {
    let o = gqca(&["spectra", "--k", "3", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,W,margin,separated"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("3,0.404113806319,"));
    assert!(row.ends_with(",true"));
}

#[test]
fn parallel_csv_columns() {
    let o = gqca(&["parallel", "--n", "4,8,16", "--pred", "single", "--report", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "N,tau,total_pulses,overhead_factor");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("4,"));
}

#[test]
fn json_is_versioned_and_reproducible() {
    let args = ["parallel", "--n", "8,16", "--pred", "pow2", "--report", "json", "--seed", "4"];
    let a = gqca(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_gqca"))
        .args(args)
        .env("GQCA_THREADS", "1")
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["rows"][0]["correct"], true);
    assert!(v["fit"]["c1"].as_f64().unwrap() > 0.0);
}

#[test]
fn gate_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = layout_file(&dir, "n_cells = 60\nqubits = 5, 13\ncu = 22\n");
    let o = gqca(&["gate", "--layout", &path, "--word", "01", "--gate", "cu:X:1:0", "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(text.lines().nth(1), Some("11,1.000000,0.000000"));
}

#[test]
fn synth_finds_a_one_qubit_gate() {
    let o = gqca(&["synth", "--kind", "one", "--gate", "H", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["outcome"]["status"], "found");
    assert!(v["outcome"]["error"].as_f64().unwrap() < 1e-8);
    let o = gqca(&["synth", "--kind", "cu", "--max-len", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_passes_on_checkout() {
    let o = gqca(&["verify"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 4);
}

#[test]
fn transport_trace_matches_golden() {
    let root = env!("CARGO_MANIFEST_DIR");
    let config = std::fs::read_to_string(format!("{root}/data/transport.cfg")).unwrap();
    let pulses = format!("{root}/data/transport.pulse");
    let o = gqca(&["sim", "--config", config.trim(), "--pulses", &pulses]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(format!("{root}/tests/golden/transport.trace")).unwrap();
    assert_eq!(stdout(&o), golden);
}
