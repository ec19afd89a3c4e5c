mod common;

use std::fs;
use std::path::{Path, PathBuf};

use taxflow::cli::run_cli;
use taxflow::io::{parse_inputs, write_incomes, write_ownership};
use taxflow::{generate, GeneratorConfig};

use common::fixture_dir;

fn run(args: &[&str]) -> i32 {
    run_cli(std::iter::once("taxflow").chain(args.iter().copied()))
}

fn fixture(name: &str) -> String {
    fixture_dir().join(name).display().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn final_income(results: &str, id: &str) -> String {
    results
        .lines()
        .find(|l| l.starts_with(&format!("{id},")))
        .and_then(|l| l.rsplit(',').next())
        .unwrap()
        .to_string()
}

#[test]
fn csv_round_trip_is_exact() {
    let g = generate(&GeneratorConfig::small(300, 500, 5, 10).with_seed(4)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (own, inc) = (dir.path().join("o.csv"), dir.path().join("i.csv"));
    write_ownership(&g.network, fs::File::create(&own).unwrap()).unwrap();
    write_incomes(&g.network, &g.incomes, fs::File::create(&inc).unwrap()).unwrap();
    let back = parse_inputs(&own, &inc).unwrap();
    assert!(back.warnings.is_empty());
    assert_eq!(back.network.ids(), g.network.ids());
    assert!(back.network.edges().eq(g.network.edges()));
    assert_eq!(back.incomes, g.incomes);
}

#[test]
fn solve_e5_writes_rounded_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("final.csv");
    let report = dir.path().join("report.json");
    let code = run(&[
        "solve",
        "--ownership",
        &fixture("e5_ownership.csv"),
        "--incomes",
        &fixture("e5_incomes.csv"),
        "--algorithm",
        "decomp",
        "--out",
        s(&out),
        "--report",
        s(&report),
    ]);
    assert_eq!(code, 0);
    let results = fs::read_to_string(&out).unwrap();
    assert!(results.starts_with("taxpayer_id,kind,initial_income,final_income\n"));
    assert_eq!(final_income(&results, "p1"), "56.67");
    assert_eq!(final_income(&results, "p2"), "13.33");
    assert_eq!(final_income(&results, "c2"), "0.00");

    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["algorithm"], "decomp");
    assert_eq!(json["linear_solves"], 2);
    assert_eq!(json["redo_total"], 1);
}

#[test]
fn every_algorithm_solves_the_fixtures() {
    for alg in ["naive", "global", "decomp"] {
        for fx in ["e5", "mutual", "holding"] {
            let dir = tempfile::tempdir().unwrap();
            let out = dir.path().join("final.csv");
            let code = run(&[
                "solve",
                "--ownership",
                &fixture(&format!("{fx}_ownership.csv")),
                "--incomes",
                &fixture(&format!("{fx}_incomes.csv")),
                "--algorithm",
                alg,
                "--epsilon",
                "1e-9",
                "--out",
                s(&out),
            ]);
            assert_eq!(code, 0, "{alg} on {fx}");
        }
    }
}

#[test]
fn verify_agrees_on_fixtures() {
    for fx in ["e5", "mutual", "holding"] {
        let own = fixture(&format!("{fx}_ownership.csv"));
        let inc = fixture(&format!("{fx}_incomes.csv"));
        let code = run(&[
            "verify", "--ownership", &own, "--incomes", &inc, "--algorithms", "naive,decomp", "--tolerance", "1e-6",
        ]);
        assert_eq!(code, 0, "{fx}");
        let code = run(&["verify", "--ownership", &own, "--incomes", &inc, "--algorithms", "global,decomp"]);
        assert_eq!(code, 0, "{fx}");
    }
}

#[test]
fn verify_flags_a_crude_solver() {
    let code = run(&[
        "verify",
        "--ownership",
        &fixture("mutual_ownership.csv"),
        "--incomes",
        &fixture("mutual_incomes.csv"),
        "--algorithms",
        "naive,decomp",
        "--epsilon",
        "20",
        "--tolerance",
        "1e-6",
    ]);
    assert_eq!(code, 4);
}

#[test]
fn closed_cycle_fails_validation() {
    let code = run(&[
        "solve",
        "--ownership",
        &fixture("closed_cycle_ownership.csv"),
        "--incomes",
        &fixture("closed_cycle_incomes.csv"),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn naive_iteration_cap_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("partial.json");
    let code = run(&[
        "solve",
        "--ownership",
        &fixture("mutual_ownership.csv"),
        "--incomes",
        &fixture("mutual_incomes.csv"),
        "--algorithm",
        "naive",
        "--epsilon",
        "1e-8",
        "--max-iter",
        "3",
        "--report",
        s(&report),
    ]);
    assert_eq!(code, 2);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["converged"], false);
    assert_eq!(json["outer_iterations"], 3);
}

#[test]
fn io_and_format_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.csv");
    let inc = fixture("e5_incomes.csv");
    assert_eq!(run(&["solve", "--ownership", s(&missing), "--incomes", &inc]), 3);

    let bad_header = dir.path().join("bad.csv");
    fs::write(&bad_header, "owner,owned,share\nc1,p1,1\n").unwrap();
    assert_eq!(run(&["solve", "--ownership", s(&bad_header), "--incomes", &inc]), 3);

    let bad_share = dir.path().join("share.csv");
    fs::write(&bad_share, "owned_id,owner_id,share\nc1,p1,1.5\n").unwrap();
    assert_eq!(run(&["solve", "--ownership", s(&bad_share), "--incomes", &inc]), 3);

    assert_eq!(run(&["solve", "--bogus"]), 3);
}

#[test]
fn generate_stats_and_bench() {
    let dir = tempfile::tempdir().unwrap();
    let config = fixture("small.json");
    let own: PathBuf = dir.path().join("own.csv");
    let inc: PathBuf = dir.path().join("inc.csv");
    let code = run(&[
        "generate", "--config", &config, "--seed", "3", "--out-ownership", s(&own), "--out-incomes", s(&inc),
    ]);
    assert_eq!(code, 0);
    let first = fs::read(&own).unwrap();
    run(&[
        "generate", "--config", &config, "--seed", "3", "--out-ownership", s(&own), "--out-incomes", s(&inc),
    ]);
    assert_eq!(fs::read(&own).unwrap(), first, "same seed, same file");

    let stats = dir.path().join("stats.json");
    assert_eq!(run(&["stats", "--ownership", s(&own), "--incomes", s(&inc), "--out", s(&stats)]), 0);
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&stats).unwrap()).unwrap();
    assert_eq!(json["n_corporations"], 2000);
    assert_eq!(json["n_nontrivial_sccs"], 12);
    assert_eq!(json["largest_scc"], 40);

    let out = dir.path().join("final.csv");
    let args = ["solve", "--ownership", s(&own), "--incomes", s(&inc), "--out", s(&out)];
    assert_eq!(run(&args), 0);
    assert_eq!(run(&["verify", "--ownership", s(&own), "--incomes", s(&inc)]), 0);

    let bench = dir.path().join("bench.txt");
    let code = run(&[
        "bench", "--config", &config, "--seed", "1", "--naive-epsilon", "1", "--report", s(&bench),
    ]);
    assert_eq!(code, 0);
    assert!(fs::read_to_string(&bench).unwrap().contains("linear solves"));
}

#[test]
fn bad_generator_config_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, "{ \"n_corporations\": \"many\" }").unwrap();
    let (o, i) = (dir.path().join("o.csv"), dir.path().join("i.csv"));
    let code = run(&["generate", "--config", s(&cfg), "--seed", "1", "--out-ownership", s(&o), "--out-incomes", s(&i)]);
    assert_eq!(code, 3);
}
