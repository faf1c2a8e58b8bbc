use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use transit_cg::fixtures::{contention_instance, three_stop_example};
use transit_cg_cli::generate::generate_instance;
use transit_cg_cli::io::{load_instance_dir, write_instance, DEMAND, ROUTES};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_transit-cg")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn solve(network: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["solve", "--network", network.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn bundles_match_fixtures() {
    assert_eq!(load_instance_dir(&data("three_stop")).unwrap(), three_stop_example());
    assert_eq!(load_instance_dir(&data("contention")).unwrap(), contention_instance());
}

#[test]
fn example_solves_to_seven_in_every_configuration() {
    let tmp = tempfile::tempdir().unwrap();
    let net = data("three_stop");
    for (k, extra) in [
        vec!["--integer"],
        vec!["--integer", "--pricer", "dijkstra", "--filter", "off"],
        vec!["--integer", "--pricer", "astar", "--filter", "off", "--threads", "1"],
    ]
    .iter()
    .enumerate()
    {
        let out = tmp.path().join(k.to_string());
        let o = solve(&net, &out, extra);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("integer=7 gap=0 served=1/1"), "{}", stdout(&o));
        let sol = read_json(&out.join("solution.json"));
        assert_eq!(sol["total_cost"], 7.0);
        let legs: Vec<(String, i64)> = sol["passengers"][0]["legs"]
            .as_array()
            .unwrap()
            .iter()
            .map(|l| {
                let place = match &l["place"] {
                    Value::String(s) => s.clone(),
                    Value::Object(m) => m["stop"].as_str().unwrap().to_owned(),
                    other => panic!("{other}"),
                };
                (place, l["time"].as_i64().unwrap())
            })
            .collect();
        let expect = [("origin", 0), ("s3", 3), ("s1", 5), ("s2", 6), ("destination", 7)];
        assert_eq!(legs, expect.map(|(p, t)| (p.to_owned(), t)));
        assert!(out.join("report.json").exists());
        assert!(fs::read_to_string(out.join("report.csv")).unwrap().starts_with("iteration,objective,lb"));
    }
}

#[test]
fn lp_only_solution() {
    let tmp = tempfile::tempdir().unwrap();
    let o = solve(&data("contention"), tmp.path(), &[]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("status=Optimal lp=9 lb=9"), "{}", stdout(&o));
    let sol = read_json(&tmp.path().join("solution.json"));
    assert_eq!(sol["mode"], "lp");
    assert_eq!(sol["total_cost"], 9.0);
}

#[test]
fn oracles_print_objective() {
    let net = data("three_stop");
    let o = run(&["oracle", "--network", net.to_str().unwrap(), "--mode", "arcflow"]);
    assert_eq!(stdout(&o), "7\n");
    let net = data("contention");
    let o = run(&["oracle", "--network", net.to_str().unwrap(), "--mode", "bruteforce"]);
    assert_eq!(stdout(&o), "9\n");
    let o = run(&["oracle", "--network", net.to_str().unwrap(), "--mode", "bruteforce", "--path-limit", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solution_files_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let base = data("generator_base");
    for out in [&a, &b] {
        let o = solve(&base, out, &["--integer", "--seed", "5"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(fs::read(a.join("solution.json")).unwrap(), fs::read(b.join("solution.json")).unwrap());
}

#[test]
fn generator_scales_pinned_base() {
    let tmp = tempfile::tempdir().unwrap();
    let base = data("generator_base");
    let out = tmp.path().join("tenth");
    let o = run(&["generate", "--network", base.to_str().unwrap(), "--fraction", "0.1", "--seed", "3", "--count", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 2);
    for k in 0..2 {
        let inst = load_instance_dir(&out.join(format!("instance_{k:03}"))).unwrap();
        assert_eq!(inst.requests.len(), 10);
        let caps: Vec<u32> = inst.routes.iter().map(|r| r.capacity).collect();
        assert_eq!(caps, vec![1, 2, 3, 1, 3]);
        assert_eq!(inst, generate_instance(&load_instance_dir(&base).unwrap(), 0.1, 3, k).unwrap());
    }
    let first = load_instance_dir(&out.join("instance_000")).unwrap();
    let second = load_instance_dir(&out.join("instance_001")).unwrap();
    assert_ne!(first.requests, second.requests);

    let runs: Vec<PathBuf> = (0..2).map(|k| tmp.path().join(format!("half{k}"))).collect();
    for dir in &runs {
        let o = run(&["generate", "--network", base.to_str().unwrap(), "--fraction", "0.5", "--seed", "7", "--count", "1", "--out", dir.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for file in [DEMAND, ROUTES] {
        let read = |d: &PathBuf| fs::read(d.join("instance_000").join(file)).unwrap();
        assert_eq!(read(&runs[0]), read(&runs[1]));
    }

    let o = run(&["generate", "--network", data("contention").to_str().unwrap(), "--fraction", "0.1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad");
    write_instance(&contention_instance(), &bad).unwrap();
    fs::write(bad.join(DEMAND), "passenger_id,ox,oy,dx,dy,depart\na,0,0,8,0,-2\n").unwrap();
    let o = solve(&bad, &tmp.path().join("o1"), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("demand.csv:2"), "{err}");

    let o = solve(&tmp.path().join("missing"), &tmp.path().join("o2"), &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = solve(&data("contention"), &tmp.path().join("o3"), &["--time-limit", "-1"]);
    assert_eq!(o.status.code(), Some(2));

    // A zero time limit stops before the first pricing round; artifacts are still written.
    let out = tmp.path().join("o4");
    let o = solve(&data("contention"), &out, &["--time-limit", "0", "--integer"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("status=TimeLimit"));
    assert!(out.join("solution.json").exists());

    assert_eq!(run(&["solve", "--bogus"]).status.code(), Some(2));
}

#[test]
fn graph_dump() {
    let net = data("three_stop");
    let o = run(&["graph-dump", "--network", net.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("kind,from,to,cost,capacity"));
    assert_eq!(text.lines().filter(|l| l.starts_with("access")).count(), 1);
    assert_eq!(text.lines().filter(|l| l.starts_with("egress")).count(), 3);
}

#[test]
fn empty_demand_solves_to_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let mut inst = contention_instance();
    inst.requests.clear();
    write_instance(&inst, &tmp.path().join("net")).unwrap();
    let o = solve(&tmp.path().join("net"), &tmp.path().join("out"), &["--integer"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("lp=0") && stdout(&o).contains("integer=0"));
}
