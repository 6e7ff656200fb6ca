use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use access_sentiment::classify::stub::StubServer;
use access_sentiment::geostat::region::write_regions;
use access_sentiment::synth::demo::{write_demo, DemoConfig};
use access_sentiment::synth::{gam_data, regions_from, GamSynth};

const BIN: &str = env!("CARGO_BIN_EXE_access-sentiment");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("ACCESS_SENTIMENT_OUT")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

struct Demo {
    dir: tempfile::TempDir,
}

impl Demo {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let cfg = DemoConfig {
            states: 4,
            counties_per_state: 10,
            reviews_per_poi: 10,
            annotated: 200,
            ..Default::default()
        };
        write_demo(dir.path(), &cfg).unwrap();
        Demo { dir }
    }

    fn path(&self, f: &str) -> String {
        self.dir.path().join(f).to_string_lossy().into_owned()
    }

    fn out(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["filter", "--no-such-flag"]).status.code(), Some(2));
}

#[test]
fn validation_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let missing = run(&["filter", "--reviews", "/nonexistent/reviews.jsonl", "--out", out]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("does not exist"));

    let unset = run(&["filter", "--out", out]);
    assert_eq!(unset.status.code(), Some(1));

    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[thresholds]\nregion_min_reviews = -3\n").unwrap();
    assert_eq!(run(&["filter", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));

    let no_model = run(&["label", "--snippets", &fixture("reviews_100.jsonl"), "--out", out]);
    assert_eq!(no_model.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&no_model.stderr).contains("no classifier"));
}

#[test]
fn filter_writes_seven_snippets_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let stdout = ok(&["filter", "--reviews", &fixture("reviews_100.jsonl"), "--out", out, "--seed", "3"]);
    assert!(stdout.contains("7 of 100"), "{stdout}");
    let rows = std::fs::read_to_string(dir.path().join("snippets.jsonl")).unwrap();
    assert_eq!(rows.lines().count(), 7);

    let m: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.filter.json")).unwrap()).unwrap();
    assert_eq!(m["command"], "filter");
    assert_eq!(m["seed"], 3);
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(m["inputs"][0]["role"], "reviews");
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert!(m["versions"]["access_sentiment"].is_string());
    assert!(m["timestamp_unix"].as_u64().unwrap() > 0);
    let outputs: Vec<&str> = m["outputs"].as_array().unwrap().iter().map(|o| o["role"].as_str().unwrap()).collect();
    assert_eq!(outputs, ["snippets.jsonl", "filter_stats.json"]);
}

#[test]
fn output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("from-env");
    let out = Command::new(BIN)
        .args(["filter", "--reviews", &fixture("reviews_100.jsonl")])
        .env("ACCESS_SENTIMENT_OUT", &target)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(target.join("snippets.jsonl").is_file());
}

#[test]
fn staged_commands_match_run_all() {
    let demo = Demo::new();
    let (staged, fused) = (demo.out("staged"), demo.out("fused"));
    let s = staged.to_str().unwrap();
    ok(&["filter", "--reviews", &demo.path("reviews.jsonl"), "--out", s]);
    ok(&["train", "--gold", &demo.path("labeled.jsonl"), "--out", s]);
    ok(&["label", "--out", s]);
    ok(&["poi-report", "--pois", &demo.path("pois.jsonl"), "--out", s]);
    ok(&[
        "run-all", "--reviews", &demo.path("reviews.jsonl"), "--gold", &demo.path("labeled.jsonl"), "--pois",
        &demo.path("pois.jsonl"), "--out", fused.to_str().unwrap(),
    ]);
    for f in ["snippets.jsonl", "model.json", "labeled.jsonl", "poi_sentiment.csv", "poi_summary.json", "poi_summary.csv"] {
        assert_eq!(std::fs::read(staged.join(f)).unwrap(), std::fs::read(fused.join(f)).unwrap(), "{f}");
    }
    assert!(!fused.join("regions.jsonl").exists());
}

#[test]
fn threshold_flag_targets_the_stage() {
    let demo = Demo::new();
    let out = demo.out("o");
    let o = out.to_str().unwrap();
    ok(&["filter", "--reviews", &demo.path("reviews.jsonl"), "--out", o]);
    ok(&["train", "--gold", &demo.path("labeled.jsonl"), "--out", o]);
    ok(&["label", "--out", o]);
    ok(&["poi-report", "--pois", &demo.path("pois.jsonl"), "--threshold", "12", "--out", o]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("poi_summary.json")).unwrap()).unwrap();
    assert!(summary["types"].as_array().unwrap().iter().all(|t| t["min_reviews"] == 12));

    ok(&[
        "geo-build", "--pois", &demo.path("pois.jsonl"), "--regions", &demo.path("regions.csv"), "--covariates",
        &demo.path("covariates.csv"), "--threshold", "25", "--out", o,
    ]);
    let regions = std::fs::read_to_string(out.join("regions.jsonl")).unwrap();
    for line in regions.lines() {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["included"], r["n_reviews"].as_u64().unwrap() >= 25);
    }
    ok(&["export", "--threshold", "25", "--out", o]);
    let csv = std::fs::read_to_string(out.join("choropleth.csv")).unwrap();
    assert_eq!(csv.lines().count(), regions.lines().count() + 1);
}

#[test]
fn label_through_a_remote_service() {
    let stub = StubServer::per_text(|t| if t.to_lowercase().contains("ramp") { "positive" } else { "neutral" }.into())
        .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    ok(&["filter", "--reviews", &fixture("reviews_100.jsonl"), "--out", out]);
    ok(&["label", "--classifier", &stub.endpoint(), "--out", out]);
    let labeled = std::fs::read_to_string(dir.path().join("labeled.jsonl")).unwrap();
    assert_eq!(labeled.lines().count(), 7);
    let m = std::fs::read_to_string(dir.path().join("manifest.label.json")).unwrap();
    assert!(m.contains(&stub.endpoint()));

    let bad = StubServer::constant("Positive").unwrap();
    let failed = run(&["label", "--classifier", &bad.endpoint(), "--out", out]);
    assert_eq!(failed.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("protocol"));
}

#[test]
fn regress_reports_significance_on_synthetic_regions() {
    let (data, _) = gam_data(&GamSynth {
        n: 600,
        k: 4,
        n_states: 6,
        ..Default::default()
    });
    let regions = regions_from(&data, |i| 20 + i % 30);
    let dir = tempfile::tempdir().unwrap();
    let records = dir.path().join("regions.jsonl");
    write_regions(&records, &regions).unwrap();
    let cfg = dir.path().join("p.toml");
    std::fs::write(
        &cfg,
        format!(
            "output_dir = \"out\"\n[paths]\nregion_records = \"regions.jsonl\"\n[regress]\ncovariates = {:?}\n",
            data.names
        ),
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let report = ok(&["regress", "--config", c]);
    assert!(report.contains("***"), "{report}");
    assert!(report.contains("Significance codes"));
    assert!(report.contains("ti(Lat,Lng)"));
    let fit: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out/fit.json")).unwrap()).unwrap();
    assert_eq!(fit["fit"]["coefficients"].as_array().unwrap().len(), 5);

    ok(&["sensitivity", "--config", c]);
    let sens = std::fs::read_to_string(dir.path().join("out/sensitivity.csv")).unwrap();
    assert_eq!(sens.lines().count(), 12);
}

#[test]
fn agree_and_eval_print_their_numbers() {
    let demo = Demo::new();
    let o = demo.out("o");
    let o = o.to_str().unwrap();
    let agree = ok(&["agree", "--annotations", &demo.path("annotations.jsonl"), "--out", o]);
    assert!(agree.starts_with("alpha "), "{agree}");
    ok(&["train", "--gold", &demo.path("labeled.jsonl"), "--out", o]);
    let eval = ok(&["eval", "--gold", &demo.path("labeled.jsonl"), "--out", o]);
    assert!(eval.contains("accuracy"));
    assert!(demo.out("o/eval.json").is_file());
}
