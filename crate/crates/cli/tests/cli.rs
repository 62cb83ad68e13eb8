use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cetsp::io::read_solution;

fn cetsp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cetsp")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn generate(dir: &Path, kind: &str, n: usize, seed: u64) -> PathBuf {
    let out = dir.join(format!("{kind}-{n}-{seed}.txt"));
    let o = cetsp(&[
        "generate", "--kind", kind, "--n", &n.to_string(), "--seed", &seed.to_string(),
        "--out", path_str(&out),
    ]);
    assert!(o.status.success(), "{o:?}");
    out
}

fn solve(instance: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", "--instance", path_str(instance), "--out", path_str(out)];
    args.extend_from_slice(extra);
    cetsp(&args)
}

#[test]
fn solve_then_validate_and_render() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "random", 200, 3);
    let sol = dir.path().join("sol.json");
    let o = solve(&inst, &sol, &["--seed", "5"]);
    assert!(o.status.success(), "{o:?}");
    let summary = stdout(&o);
    assert!(summary.contains("n=200") && summary.contains("best="), "{summary}");

    let o = cetsp(&["validate", "--instance", path_str(&inst), "--solution", path_str(&sol)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    assert!(stdout(&o).starts_with("ok:"));

    let svg = dir.path().join("tour.svg");
    let o = cetsp(&[
        "render", "--instance", path_str(&inst), "--solution", path_str(&sol),
        "--out", path_str(&svg),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle ").count(), 200);
    assert_eq!(text.matches("<polyline ").count(), 1);
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "structured", 300, 1);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(solve(&inst, &a, &["--seed", "9"]).status.success());
    assert!(solve(&inst, &b, &["--seed", "9"]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn restarts_keep_the_shortest_run() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "random", 150, 8);
    let best = dir.path().join("best.json");
    assert!(solve(&inst, &best, &["--seed", "100", "--restarts", "6"]).status.success());
    let best = read_solution(&fs::read_to_string(&best).unwrap()).unwrap();

    let mut singles = Vec::new();
    for seed in 100..106 {
        let out = dir.path().join(format!("s{seed}.json"));
        assert!(solve(&inst, &out, &["--seed", &seed.to_string()]).status.success());
        singles.push(read_solution(&fs::read_to_string(&out).unwrap()).unwrap().length);
    }
    assert!(singles.iter().all(|&l| best.length <= l));
    let first_min = singles.iter().position(|&l| l == best.length).unwrap();
    assert_eq!(best.seed, 100 + first_min as u64);
}

#[test]
fn overlapping_pair_reports_zero_length() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("pair.txt");
    fs::write(&inst, "0 0 0 1\n1 0 0 1\n").unwrap();
    let out = dir.path().join("pair.json");
    let o = solve(&inst, &out, &["--seed", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("best=0 "), "{}", stdout(&o));
}

#[test]
fn tampered_solution_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("two.txt");
    fs::write(&inst, "0 0 0 1\n10 0 0 1\n").unwrap();
    let out = dir.path().join("two.json");
    assert!(solve(&inst, &out, &["--seed", "1"]).status.success());
    let mut sol = read_solution(&fs::read_to_string(&out).unwrap()).unwrap();
    sol.tour[0].x += 5.0;
    sol.length = cetsp::construction::tour_length(&sol.tour);
    fs::write(&out, cetsp::io::write_solution(&sol)).unwrap();
    let o = cetsp(&["validate", "--instance", path_str(&inst), "--solution", path_str(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("outside"));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1 2\nfoo bar\n").unwrap();
    let o = cetsp(&["solve", "--instance", path_str(&bad), "--seed", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let missing = dir.path().join("missing.txt");
    assert_eq!(cetsp(&["solve", "--instance", path_str(&missing), "--seed", "1"]).status.code(), Some(1));
    assert_eq!(cetsp(&["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(cetsp(&["--help"]).status.code(), Some(0));
}

#[test]
fn reconstruct_prints_radius() {
    let dir = tempfile::tempdir().unwrap();
    let centers = dir.path().join("centers.txt");
    let tour = dir.path().join("tour.txt");
    fs::write(&centers, "0 0\n4 0\n4 3\n").unwrap();
    fs::write(&tour, "1 0\n3 1\n").unwrap();
    let o = cetsp(&["reconstruct", "--centers", path_str(&centers), "--tour", path_str(&tour)]);
    assert!(o.status.success());
    let r: f64 = stdout(&o).trim().parse().unwrap();
    assert!((r - 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn reconstruct_accepts_solution_files() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("unit.txt");
    fs::write(&inst, "0 0 0 1\n5 0 0 1\n5 5 0 1\n0 5 0 1\n").unwrap();
    let sol = dir.path().join("unit.json");
    assert!(solve(&inst, &sol, &["--seed", "2"]).status.success());
    let o = cetsp(&["reconstruct", "--centers", path_str(&inst), "--tour", path_str(&sol)]);
    assert!(o.status.success());
    let r: f64 = stdout(&o).trim().parse().unwrap();
    // a feasible tour serves every centre within the true radius
    assert!(r <= 1.0 + 1e-9, "{r}");
}

#[test]
fn bench_writes_reps_rows_per_size_and_phase() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    let o = cetsp(&[
        "bench", "--kind", "random", "--n", "64,128", "--reps", "3", "--seed", "4",
        "--no-warmup", "--out", path_str(&csv_path),
    ]);
    assert!(o.status.success(), "{o:?}");
    let text = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().next(), Some("n,seed,phase,millis,tour_points,length"));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    for n in ["64", "128"] {
        for phase in ["preprocess", "cluster", "construct", "total"] {
            let count = rows.iter().filter(|r| &r[0] == n && &r[2] == phase).count();
            assert_eq!(count, 3, "n={n} phase={phase}");
        }
    }
}

#[test]
fn gadget_small_cases() {
    for n in ["0", "1"] {
        let o = cetsp(&["gadget", "--n", n, "--seeds", "20"]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("max_x=0 "), "{}", stdout(&o));
    }
}

#[test]
fn trace_file_lists_merges_and_events() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "random", 40, 2);
    let sol = dir.path().join("sol.json");
    let trace = dir.path().join("trace.json");
    let o = solve(&inst, &sol, &["--seed", "1", "--restarts", "3", "--trace", path_str(&trace)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    let merges = v["merges"].as_array().unwrap();
    let leaves = v["leaf_input"].as_array().unwrap();
    assert_eq!(merges.len() + 1, leaves.len());
    assert!(v["events"].as_array().unwrap().iter().any(|e| e["event"] == "insert"));
}

#[test]
fn budget_flags() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(dir.path(), "random", 100, 6);
    let out = dir.path().join("o.json");
    for extra in [&["--no-budget"][..], &["--budget-factor", "0"], &["--newton"]] {
        let mut args = vec!["--seed", "1"];
        args.extend_from_slice(extra);
        let o = solve(&inst, &out, &args);
        assert!(o.status.success(), "{extra:?}: {o:?}");
        let v = cetsp(&["validate", "--instance", path_str(&inst), "--solution", path_str(&out)]);
        assert_eq!(v.status.code(), Some(0), "{extra:?}");
    }
    let o = solve(&inst, &out, &["--seed", "1", "--no-budget", "--budget-factor", "1"]);
    assert_eq!(o.status.code(), Some(1));
}
