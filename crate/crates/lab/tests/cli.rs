use std::path::Path;
use std::process::{Command, Output};

use sperner_core::antichain::is_antichain;
use sperner_core::lattice::initial_segment;
use sperner_core::VertexSet;
use sperner_lab::io::{format_vertex_set, read_vertex_set};

const BIN: &str = env!("CARGO_BIN_EXE_sperner");

fn sperner(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_set(dir: &Path, name: &str, set: &VertexSet) -> String {
    let path = dir.join(name);
    std::fs::write(&path, format_vertex_set(set)).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn exit_codes() {
    assert_eq!(sperner(&["selftest", "--quick"]).status.code(), Some(0));
    assert_eq!(sperner(&["maxantichain", "--input", "missing.txt"]).status.code(), Some(2));
    assert_eq!(
        sperner(&["experiment", "threshold", "--n", "30", "--c-list", "8"]).status.code(),
        Some(3)
    );
    assert_eq!(sperner(&["nonsense"]).status.code(), Some(2));
    assert_eq!(sperner(&["census", "--n", "7"]).status.code(), Some(3));
    assert_eq!(sperner(&["kleitman", "--n", "5", "--r", "3", "--exhaustive"]).status.code(), Some(3));
    assert_eq!(sperner(&["greedy", "--n", "4", "--t", "1", "--s", "7"]).status.code(), Some(3));
    assert_eq!(sperner(&["bounds", "--t", "1", "--eps", "0.1", "--n-exp", "14"]).status.code(), Some(2));
    assert_eq!(sperner(&["kleitman", "--n", "3", "--exhaustive"]).status.code(), Some(2));
    let v = sperner(&["--version"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains(env!("CARGO_PKG_VERSION")));
}

#[test]
fn kleitman_table() {
    let o = sperner(&["kleitman", "--n", "3", "--all-r", "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,segment_edges,verified");
    assert_eq!(lines[5], "4,2,true");
    assert_eq!(lines.len(), 10);
}

#[test]
fn maxantichain_witness_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_set(dir.path(), "p6.txt", &VertexSet::full(6).unwrap());
    let witness = dir.path().join("w.txt");
    let out = dir.path().join("row.csv");
    let o = sperner(&[
        "maxantichain",
        "--input",
        &input,
        "--certificate",
        "--witness",
        witness.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let row = std::fs::read_to_string(&out).unwrap();
    assert_eq!(row, "alpha,matching_size,edges,millis\n20,44,665,0\n");
    let (w, _) = read_vertex_set(&witness).unwrap();
    assert_eq!(w.len(), 20);
    assert!(is_antichain(&w));

    let manifest: serde_json::Value = serde_json::from_slice(
        &std::fs::read(dir.path().join("row.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["exit_code"], 0);
}

#[test]
fn containers_writes_sets_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let layer = VertexSet::layer(10, 5).unwrap();
    let input = write_set(dir.path(), "i.txt", &layer);
    let out_dir = dir.path().join("out");
    let trace = dir.path().join("trace.jsonl");
    let o = sperner(&[
        "containers",
        "--n",
        "10",
        "--t",
        "1",
        "--eps",
        "0.2",
        "--input",
        &input,
        "--trace",
        trace.to_str().unwrap(),
        "--tie-order",
        "centrality",
        "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let parts: Vec<VertexSet> = ["s1.txt", "s2.txt", "f_s1.txt", "g.txt"]
        .iter()
        .map(|f| read_vertex_set(&out_dir.join(f)).unwrap().0)
        .collect();
    let selected = parts[0].union(&parts[1]);
    assert!(selected.is_subset(&layer));
    assert!(layer.is_subset(&selected.union(&parts[3])));
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["idempotent"], true);
    assert_eq!(report["tie_order"], "centrality");
    let trace_text = std::fs::read_to_string(&trace).unwrap();
    let first: serde_json::Value = serde_json::from_str(trace_text.lines().next().unwrap()).unwrap();
    for key in ["step", "phase", "vertex", "degree", "branch"] {
        assert!(first.get(key).is_some(), "{key}");
    }
}

#[test]
fn containers_reject_wrong_n_and_eps() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_set(dir.path(), "i.txt", &VertexSet::layer(8, 4).unwrap());
    let base = ["containers", "--input", &input, "--t", "2"];
    let run = |extra: &[&str]| {
        let mut args = base.to_vec();
        args.extend_from_slice(extra);
        sperner(&args).status.code()
    };
    assert_eq!(run(&["--n", "9", "--eps", "0.01"]), Some(2));
    // 0.03 exceeds 1/(2t)^(t+1) = 1/64 unless relaxed
    assert_eq!(run(&["--n", "8", "--eps", "0.03"]), Some(2));
    assert_ne!(run(&["--n", "8", "--eps", "0.03", "--relaxed-eps"]), Some(2));
}

#[test]
fn experiment_csv_shape() {
    let o = sperner(&[
        "experiment", "window", "--n", "8", "--t", "2", "--p", "1", "--trials", "2", "--seed", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mode,n,t,c_or_p,trial,sample_size,alpha,pm_t,ratio,millis"
    );
    assert_eq!(lines.next().unwrap(), "window,8,2,1.0,0,256,70,140.0,0.5,0");
    // the manifest goes to stderr when there is no output file
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"seeds\":[1]"));

    let o = sperner(&["experiment", "threshold", "--n", "8", "--c-list", "8", "--trials", "3"]);
    let text = stdout(&o);
    assert!(text.lines().skip(1).all(|l| l.contains(",70,70.0,1.0,")), "{text}");
}

#[test]
fn partially_refused_experiment_keeps_rows() {
    let o = sperner(&["experiment", "threshold", "--n", "4", "--c-list", "1,8", "--trials", "2"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o).lines().count(), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("skipped c_or_p=8"));
}

#[test]
fn census_greedy_bracket_bounds() {
    let o = sperner(&["census", "--n", "3"]);
    assert_eq!(stdout(&o), "s,count\n0,1\n1,8\n2,9\n3,2\n");

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.txt");
    let o = sperner(&["greedy", "--n", "8", "--t", "1", "--s", "70", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (g, _) = read_vertex_set(&out).unwrap();
    assert_eq!(g, VertexSet::layer(8, 4).unwrap());

    let o = sperner(&["bracket", "--n", "6", "--s", "10", "--t", "1", "--eps", "0.25"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let lower = v["lower"].as_f64().unwrap();
    let upper = v["upper"].as_f64().unwrap();
    assert!((lower - 184_756f64.ln()).abs() < 1e-6);
    // (t + 2 eps) m = 1.5 * 20 = 30
    assert!((upper - 30_045_015f64.ln()).abs() < 1e-6);
    assert!(v["census_log_count"].as_f64().unwrap() >= lower);

    let o = sperner(&["bounds", "--t", "1", "--eps", "0.1", "--n-exp", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["c"].as_f64().unwrap() / 1e15 - 1.0).abs() < 1e-12);
    assert_eq!(v["total_negative"], true);
    // keys keep declaration order
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("{\n  \"n_exponent\": 16,\n  \"n\":"));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_set(dir.path(), "seg.txt", &initial_segment(9, 300).unwrap());
    let a = sperner(&["maxantichain", "--input", &input]);
    let b = sperner(&["maxantichain", "--input", &input]);
    assert_eq!(a.stdout, b.stdout);
    let a = sperner(&["kleitman", "--n", "5", "--all-r", "--samples", "50", "--seed", "2"]);
    let b = sperner(&["kleitman", "--n", "5", "--all-r", "--samples", "50", "--seed", "2"]);
    assert_eq!(a.stdout, b.stdout);
}
