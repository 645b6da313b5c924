use listdefect::io::instance_from_json;
use listdefect::{validate_ldc, ColoringOutput, Flavor};
use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_listdefect")).args(args).output().expect("binary runs")
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_str().unwrap().to_string();
    let mut all = vec!["generate", "--out", &path];
    all.extend_from_slice(args);
    let out = bin(&all);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

#[test]
fn ring_degree_plus_one_lists_have_three_colors() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "ring.json", &["--family", "ring", "--n", "8", "--list-model", "degree-plus-one"]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let lists = v["lists"].as_array().unwrap();
    assert_eq!(lists.len(), 8);
    assert!(lists.iter().all(|l| l.as_array().unwrap().len() == 3));
}

#[test]
fn generation_repeats_byte_for_byte() {
    let args = ["generate", "--family", "random-gnp", "--n", "30", "--delta", "5", "--seed", "9"];
    assert_eq!(bin(&args).stdout, bin(&args).stdout);
}

#[test]
fn defect_budget_lists_meet_the_degree_condition() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "k5.json",
        &["--family", "clique", "--n", "5", "--list-model", "defect-budget", "--target", "eq1", "--space", "4"],
    );
    let (_, inst) = instance_from_json(&std::fs::read_to_string(path).unwrap()).unwrap();
    for l in inst.lists() {
        assert!(l.iter().map(|&(_, d)| d + 1).sum::<u64>() >= 5);
    }
}

#[test]
fn oracle_reports_unsat_on_a_tight_clique() {
    let dir = tempfile::tempdir().unwrap();
    // K3 where every node has two colors of defect 0: Σ(d+1) = Δ.
    let inst = r#"{"n":3,"edges":[[0,1],[0,2],[1,2]],"init_colors":[0,1,2],"m":3,"color_space":[0,1],
        "lists":[[0,1],[0,1],[0,1]],"defects":[{"0":0,"1":0},{"0":0,"1":0},{"0":0,"1":0}],"flavor":"defective"}"#;
    let path = dir.path().join("k3.json");
    std::fs::write(&path, inst).unwrap();
    let out_dir = dir.path().join("out");
    let out = bin(&["oracle", "--instance", path.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out_dir)["verdict"], "UNSAT");
    assert!(!out_dir.join("coloring.json").exists());
}

#[test]
fn tight_budget_fails_fast() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "ring.json", &["--family", "ring", "--n", "32", "--list-model", "degree-plus-one"]);
    let out_dir = dir.path().join("out");
    let out = bin(&[
        "run", "--instance", &path, "--algorithm", "congest-pipeline", "--bits-budget", "2", "--out-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let r = report(&out_dir);
    assert_eq!(r["failure_kind"], "BudgetViolation");
    assert!(r["failure"].as_str().unwrap().contains("bits"));
}

#[test]
fn successful_runs_leave_a_valid_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "g.json",
        &["--family", "random-gnp", "--n", "40", "--delta", "6", "--list-model", "defect-budget", "--seed", "3"],
    );
    let (graph, inst) = instance_from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for (algo, flavor) in [("seq", Flavor::Defective), ("seq-arb", Flavor::Arbdefective), ("framework", Flavor::Arbdefective)] {
        let out_dir = dir.path().join(algo);
        let out = bin(&["run", "--instance", &path, "--algorithm", algo, "--out-dir", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{algo}: {}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(report(&out_dir)["status"], "valid");
        let coloring: ColoringOutput =
            serde_json::from_str(&std::fs::read_to_string(out_dir.join("coloring.json")).unwrap()).unwrap();
        let check = validate_ldc(&graph, &inst.clone().with_flavor(flavor), &coloring).unwrap();
        assert!(check.valid, "{algo}");
        assert!(std::fs::read_to_string(out_dir.join("trace.csv")).unwrap().starts_with("round,max_bits"));
    }
}

#[test]
fn failed_runs_write_no_coloring() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "ring.json", &["--family", "ring", "--n", "8"]);
    let out_dir = dir.path().join("out");
    let out = bin(&["run", "--instance", &path, "--algorithm", "oldc-basic", "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(report(&out_dir)["status"], "fail-fast");
    assert!(!out_dir.join("coloring.json").exists());
}

#[test]
fn malformed_instance_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"n\": 2}").unwrap();
    let out = bin(&["run", "--instance", path.to_str().unwrap(), "--algorithm", "seq", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

fn sweep(dir: &Path, matrix: &str) -> String {
    let path = dir.join("matrix.json");
    std::fs::write(&path, matrix).unwrap();
    let out = bin(&["sweep", "--matrix", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const HEADER: &str = "family,n,delta,algorithm,r,seed,rounds,max_bits,valid,failure";

#[test]
fn empty_matrix_gives_header_only() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sweep(dir.path(), "{}"), format!("{HEADER}\n"));
}

#[test]
fn single_cell_matrix_gives_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sweep(dir.path(), r#"{"families":["ring"],"n":[10],"delta":[2],"algorithms":["seq"]}"#);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines, vec![HEADER, "ring,10,2,seq,1,0,0,0,true,"]);
}

#[test]
fn message_preset_sweep_does_not_raise_max_bits() {
    let dir = tempfile::tempdir().unwrap();
    let csv = sweep(
        dir.path(),
        r#"{"families":["random-dag"],"n":[24],"delta":[4],"algorithms":["space-reduced"],"r":[1,2,4],
            "seeds":[0,1,2,3,4,5],"list_model":{"uniform-k":{"k":32,"defect":2}},"space":256}"#,
    );
    let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let mut conforming = 0;
    for seed in 0..6 {
        let bits: Vec<Option<u64>> = ["1", "2", "4"]
            .iter()
            .map(|r| {
                let row = rows.iter().find(|row| row[4] == *r && row[5] == seed.to_string()).unwrap();
                (row[8] == "true").then(|| row[7].parse().unwrap())
            })
            .collect();
        let valid: Vec<u64> = bits.iter().flatten().copied().collect();
        if valid.len() >= 2 {
            conforming += 1;
            assert!(valid.windows(2).all(|w| w[1] <= w[0]), "seed {seed}: {bits:?}");
        }
    }
    assert!(conforming > 0);
}
