use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn entangle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn synthetic() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/synthetic")
}

fn rows(path: &Path) -> Vec<BTreeMap<String, String>> {
    csv::Reader::from_path(path)
        .unwrap()
        .deserialize()
        .map(|r| r.unwrap())
        .collect()
}

#[test]
fn selftest_passes() {
    let o = entangle(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert!(String::from_utf8_lossy(&o.stdout).contains("all checks passed"));
}

#[test]
fn corrupted_partitions_fail_selftest() {
    let o = entangle(&["selftest", "--corrupt-partitions"]);
    assert_eq!(o.status.code(), Some(3));
    let out = String::from_utf8_lossy(&o.stdout);
    assert!(
        out.lines()
            .any(|l| l.starts_with("FAIL") && l.contains("144 canonical vs 576")),
        "{out}"
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(entangle(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(entangle(&["simulate", "--samples", "many"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let manifest = synthetic().join("manifest.json");
    let o = entangle(&[
        "analyze",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        out,
        "--window",
        "5,0",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn empty_topic_list_is_a_corpus_error() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("manifest.json");
    fs::write(&manifest, r#"{"topics": []}"#).unwrap();
    let o = entangle(&[
        "analyze",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no topics"), "{}", stderr(&o));
}

#[test]
fn missing_manifest_is_a_corpus_error() {
    let o = entangle(&["analyze", "--manifest", "/nonexistent/manifest.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/manifest.json"));
}

#[test]
fn analyze_writes_sorted_summaries_matching_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synthetic().join("manifest.json");
    let o = entangle(&[
        "analyze",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let expected: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(synthetic().join("expected.json")).unwrap()).unwrap();
    for method in ["frequency", "tfidf"] {
        let summary = rows(&dir.path().join(format!("summary_{method}.csv")));
        assert_eq!(summary.len(), 9);
        for row in &summary {
            let cell = &expected["topics"][&row["topic_id"]]["methods"][method]["cells"][&row["W"]];
            assert_eq!(row["n_entangled"], cell["n_entangled"].to_string());
            assert_eq!(row["n_pairs"], "44100");
            let p: f64 = row["p"].parse().unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
        // Descending p at W = 5, ties by topic id.
        let at5: Vec<(f64, &str)> = summary
            .iter()
            .filter(|r| r["W"] == "5")
            .map(|r| (r["p"].parse().unwrap(), r["topic_id"].as_str()))
            .collect();
        for w in at5.windows(2) {
            assert!(w[0].0 > w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1), "{at5:?}");
        }
    }
    let hist = rows(&dir.path().join("histograms.csv"));
    let total: u64 = hist
        .iter()
        .filter(|r| r["topic_id"] == "astronomy" && r["method"] == "tfidf" && r["W"] == "10")
        .map(|r| r["count"].parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 100);
    assert!(dir.path().join("rankings/fermentation__tfidf.csv").exists());
    assert!(dir.path().join("matrices/grain-markets__frequency__W20.csv").exists());
    let result: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("results/astronomy__tfidf__W5.json")).unwrap())
            .unwrap();
    for key in ["topic_id", "W", "method", "p", "n_entangled", "top_violations"] {
        assert!(result.get(key).is_some(), "{key}");
    }
}

#[test]
fn simulate_default_grid_writes_eighty_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves.csv");
    let o = entangle(&["simulate", "--samples", "100", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let curves = rows(&out);
    assert_eq!(curves.len(), 80);
    for r in &curves {
        let p: f64 = r["p_hat"].parse().unwrap();
        let se: f64 = r["std_err"].parse().unwrap();
        assert!((se - (p * (1.0 - p) / 100.0).sqrt()).abs() < 1e-12);
        assert_eq!(r["kind"], "zipf");
        assert_eq!(r["n_samples"], "100");
    }
    assert!(out.with_extension("json").exists());
}

#[test]
fn homogeneous_curve_below_zipf_peak() {
    let dir = tempfile::tempdir().unwrap();
    let (zipf, flat) = (dir.path().join("zipf.csv"), dir.path().join("flat.csv"));
    let common = ["--B", "10,50,100,500", "--samples", "2000", "--seed", "5"];
    let o = entangle(&[&["simulate", "--out", zipf.to_str().unwrap()][..], &common].concat());
    assert!(o.status.success(), "{}", stderr(&o));
    let o = entangle(
        &[
            &["simulate", "--kind", "homogeneous", "--out", flat.to_str().unwrap()][..],
            &common,
        ]
        .concat(),
    );
    assert!(o.status.success(), "{}", stderr(&o));

    let flat = rows(&flat);
    assert_eq!(flat.len(), 4);
    let zipf = rows(&zipf);
    for r in &flat {
        let peak = zipf
            .iter()
            .filter(|z| z["B"] == r["B"])
            .map(|z| z["p_hat"].parse::<f64>().unwrap())
            .fold(0.0, f64::max);
        assert!(r["p_hat"].parse::<f64>().unwrap() < peak, "B={}", r["B"]);
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = |out: &Path| {
        [
            "simulate",
            "--lambda-grid",
            "0.2,0.8",
            "--B",
            "20,60",
            "--samples",
            "300",
            "--out",
            out.to_str().unwrap(),
        ]
        .map(String::from)
    };
    let one = Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(args(&a))
        .env("ENTANGLE_THREADS", "1")
        .output()
        .unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_entangle"))
        .args(args(&b))
        .output()
        .unwrap();
    assert!(one.status.success() && many.status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}
