use std::fs;
use std::path::{Path, PathBuf};

use early_citers::cli::{run, validate_report};
use early_citers::corpus::Corpus;
use early_citers::earlyciters::EcOptions;
use early_citers::study::{correlation_study, Property, CORRELATION_DELTA_TS};

fn cli(ws: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["early-citers".to_string(), "--workspace".into(), ws.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    run(argv)
}

const DESK_TOML: &str = "train_size = 200\ntest_size = 100\nn_test_samples = 2\ndelta_t_list = [3, 5]\ntest_years = [1998, 2008]\ntopic_k = 10\n";

/// synth through evaluate on a small corpus.
fn pipeline(ws: &Path) {
    assert_eq!(cli(ws, &["synth", "--seed", "42", "--papers", "1000"]), 0);
    assert_eq!(cli(ws, &["filter", "--delta", "2"]), 0);
    assert_eq!(cli(ws, &["graphs"]), 0);
    assert_eq!(cli(ws, &["topics", "--seed", "1", "--k", "10", "--iterations", "60", "--max-year", "1997"]), 0);
    assert_eq!(cli(ws, &["features"]), 0);
    let cfg = ws.join("desk.toml");
    fs::write(&cfg, DESK_TOML).unwrap();
    assert_eq!(cli(ws, &["train", "--seed", "7", "--config", cfg.to_str().unwrap()]), 0);
    assert_eq!(cli(ws, &["evaluate"]), 0);
}

fn first_paper(ws: &Path) -> String {
    let text = fs::read_to_string(ws.join("features.csv")).unwrap();
    text.lines().nth(1).unwrap().split(',').next().unwrap().to_string()
}

fn outputs(ws: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![ws.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(dir).unwrap().flatten() {
            let p = e.path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "csv" || x == "json" || x == "tsv" || x == "html") {
                out.push((p.strip_prefix(ws).unwrap().to_path_buf(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn seeded_pipeline_is_bitwise_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for ws in [a.path(), b.path()] {
        pipeline(ws);
        assert_eq!(cli(ws, &["study", "--kind", "correlation"]), 0);
        assert_eq!(cli(ws, &["report", "--paper", &first_paper(ws)]), 0);
    }
    let (oa, ob) = (outputs(a.path()), outputs(b.path()));
    assert!(oa.iter().any(|(p, _)| p.ends_with("metrics.csv")));
    assert!(oa.iter().any(|(p, _)| p.ends_with("report.json")));
    assert_eq!(oa.len(), ob.len());
    for ((pa, da), (pb, db)) in oa.iter().zip(&ob) {
        assert_eq!(pa, pb);
        assert!(da == db, "{} differs between runs", pa.display());
    }
    // Report reruns on the same workspace are byte-identical.
    let id = first_paper(a.path());
    let report = a.path().join(format!("reports/{id}/report.json"));
    let first = fs::read(&report).unwrap();
    assert_eq!(cli(a.path(), &["report", "--paper", &id, "--format", "json"]), 0);
    assert_eq!(fs::read(&report).unwrap(), first);
}

#[test]
fn study_command_is_a_thin_adapter() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    assert_eq!(cli(ws, &["synth", "--seed", "42", "--papers", "1500"]), 0);
    assert_eq!(cli(ws, &["filter"]), 0);
    assert_eq!(cli(ws, &["study", "--kind", "correlation", "--property", "PC"]), 0);
    let corpus = Corpus::load(&ws.join("filtered.bin")).unwrap();
    let table = correlation_study(&corpus, Property::Pc, &EcOptions::default(), &CORRELATION_DELTA_TS).unwrap();
    let mut direct = Vec::new();
    table.write_csv(&mut direct).unwrap();
    assert_eq!(fs::read(ws.join("study/correlation_PC.csv")).unwrap(), direct);
}

#[test]
fn ingest_then_filter_matches_library_stats() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    assert_eq!(cli(ws, &["synth", "--seed", "3", "--papers", "600", "--streams", "streams"]), 0);
    let s = ws.join("streams");
    let arg = |f: &str| s.join(f).display().to_string();
    let (p, a, v, c) = (arg("papers.jsonl"), arg("authors.jsonl"), arg("venues.jsonl"), arg("contexts.jsonl"));
    let code = cli(
        ws,
        &["ingest", "--papers", &p, "--authors", &a, "--venues", &v, "--contexts", &c, "--out", "ingested.bin"],
    );
    assert_eq!(code, 0);
    let ingested = Corpus::load(&ws.join("ingested.bin")).unwrap();
    let generated = Corpus::load(&ws.join("corpus.bin")).unwrap();
    assert_eq!(ingested.stats(), generated.stats());
    fs::copy(ws.join("ingested.bin"), ws.join("corpus.bin")).unwrap();
    assert_eq!(cli(ws, &["filter", "--delta", "2"]), 0);
    let filtered = Corpus::load(&ws.join("filtered.bin")).unwrap();
    assert_eq!(filtered.stats(), ingested.filter(2).unwrap().stats());
}

#[test]
fn every_report_validates() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    pipeline(ws);
    let features = fs::read_to_string(ws.join("features.csv")).unwrap();
    let ids: Vec<&str> = features.lines().skip(1).map(|l| l.split(',').next().unwrap()).step_by(15).collect();
    assert!(ids.len() > 20);
    for id in ids {
        assert_eq!(cli(ws, &["report", "--paper", id, "--format", "json"]), 0);
        let text = fs::read_to_string(ws.join(format!("reports/{id}/report.json"))).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        validate_report(&doc).unwrap();
        // One series per model, one point per trained Δt.
        let preds = doc["predictions"].as_object().unwrap();
        assert_eq!(preds.len(), 4);
        for series in preds.values() {
            let keys: Vec<&String> = series.as_object().unwrap().keys().collect();
            assert_eq!(keys, ["3", "5"]);
        }
    }
    let id = first_paper(ws);
    let html = fs::read_to_string(ws.join(format!("reports/{id}/report.html")));
    assert!(html.is_err(), "json-only run must not write html");
    assert_eq!(cli(ws, &["report", "--paper", &id, "--format", "html"]), 0);
    let html = fs::read_to_string(ws.join(format!("reports/{id}/report.html"))).unwrap();
    assert!(html.starts_with("<!DOCTYPE html>") && html.contains("<svg"));
}

#[test]
fn validator_rejects_malformed_reports() {
    let good = serde_json::json!({
        "paper": {"id": "P"},
        "ec": {"ecc": 2, "pc": 1.0, "cc": 0.0, "ca": 6.0, "bucket": "BUCKET3",
               "citers": [{"author": "a", "class": "influential"}]},
        "predictions": {"LR": {"3": {"predicted": 1.5, "actual": null}}}
    });
    validate_report(&good).unwrap();
    let mut bad = good.clone();
    bad["ec"]["bucket"] = "BUCKET4".into();
    assert!(validate_report(&bad).is_err());
    let mut bad = good.clone();
    bad["predictions"]["LR"]["3"]["actual"] = (-1).into();
    assert!(validate_report(&bad).is_err());
    let mut bad = good.clone();
    bad["predictions"]["XGB"] = serde_json::json!({});
    assert!(validate_report(&bad).is_err());
    let mut bad = good;
    bad["ec"]["citers"][0]["class"] = "famous".into();
    assert!(validate_report(&bad).is_err());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ws = dir.path();
    assert_eq!(cli(ws, &["filter", "--bogus"]), 2);
    assert_eq!(cli(ws, &["topics", "--k", "3"]), 2, "randomized commands need --seed");
    assert_eq!(cli(ws, &["synth", "--papers", "10"]), 2);
    assert_eq!(cli(ws, &["filter"]), 1, "no corpus yet");
    assert_eq!(cli(ws, &["report", "--paper", "P1", "--format", "json"]), 1);
    assert_eq!(cli(ws, &["--help"]), 0);

    assert_eq!(cli(ws, &["synth", "--seed", "1", "--papers", "300"]), 0);
    assert_eq!(cli(ws, &["filter"]), 0);
    assert_eq!(cli(ws, &["study", "--kind", "ranking"]), 2);
    fs::write(ws.join(".lock"), "1").unwrap();
    assert_eq!(cli(ws, &["filter"]), 1, "advisory lock held");
    fs::remove_file(ws.join(".lock")).unwrap();
    assert_eq!(cli(ws, &["filter"]), 0);
    assert!(!ws.join(".lock").exists());
}
