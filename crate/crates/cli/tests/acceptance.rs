//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines always reach the console.

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use access_sentiment::annotation::{krippendorff_alpha, split, AgreementItem, AgreementTable, AttitudeLabel};
use access_sentiment::classify::stub::{StubReply, StubServer};
use access_sentiment::classify::{
    evaluate, grid_search, kfold, CvOptions, GridFile, IdfBase, ModelKind, NativeClassifier, RemoteClassifier,
    RemoteClassifierConfig, Vocabulary,
};
use access_sentiment::geostat::gam::{fit_gam, ols_linear, GamSpec, Smoothing, SPATIAL_TERM};
use access_sentiment::geostat::influence::{cooks_threshold, prune_influential};
use access_sentiment::geostat::sensitivity::{threshold_grid, threshold_sensitivity};
use access_sentiment::geostat::vif::{compute_vif, vif_prune};
use access_sentiment::lsva::{lsva_compute, LsvaOptions, Stopwords, DEFAULT_STOPWORDS};
use access_sentiment::poianalysis::{aggregate_poi, distribution, PoiType};
use access_sentiment::synth::demo::{write_demo, DemoConfig};
use access_sentiment::synth::{
    collinear_covariates, gam_data, labeled_snippets, regions_from, separable_corpus, GamSynth, Noise,
};
use access_sentiment::Error;

use AttitudeLabel::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const BIN: &str = env!("CARGO_BIN_EXE_access-sentiment");

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn cli(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(BIN)
        .args(args)
        .env_remove("ACCESS_SENTIMENT_OUT")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out)
}

fn keyword_filter() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = dir.path().to_str().unwrap();
    let reviews = fixtures().join("reviews_100.jsonl");
    let start = Instant::now();
    cli(&["filter", "--reviews", reviews.to_str().unwrap(), "--out", out])?;
    let secs = start.elapsed().as_secs_f64();
    let read = |p: &Path| -> Vec<serde_json::Value> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect()
    };
    let got = read(&dir.path().join("snippets.jsonl"));
    let want = read(&fixtures().join("reviews_100.expected.jsonl"));
    ensure!(got.len() == 7, "{} snippets", got.len());
    for (g, w) in got.iter().zip(&want) {
        ensure!(g["review_id"] == w["review_id"], "review {} vs {}", g["review_id"], w["review_id"]);
        ensure!(g["targeted_text"] == w["targeted_text"], "targeted text of {}", g["review_id"]);
    }
    ensure!(
        got.iter().any(|g| g["matched_keywords"] == serde_json::json!(["handicap"])),
        "no snippet matched on the handicap root"
    );
    ensure!(secs < 1.0, "took {secs:.3}s");
    Ok(format!("7 snippets, targeted text exact, {secs:.3}s"))
}

fn alpha_brute(pairs: &[(usize, usize)]) -> f64 {
    let values: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let n = values.len() as f64;
    let within: f64 = pairs.iter().map(|&(a, b)| if a != b { 2.0 } else { 0.0 }).sum();
    let mut between = 0.0;
    for (i, a) in values.iter().enumerate() {
        for (j, b) in values.iter().enumerate() {
            if i != j && a != b {
                between += 1.0;
            }
        }
    }
    if between == 0.0 {
        1.0
    } else {
        1.0 - (within / n) / (between / (n * (n - 1.0)))
    }
}

fn alpha() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let n = rng.random_range(2..=50);
        let p = rng.random_range(0.0..1.0);
        let pairs: Vec<(usize, usize)> = (0..n)
            .map(|_| {
                let a = rng.random_range(0..4);
                (a, if rng.random_bool(p) { a } else { rng.random_range(0..4) })
            })
            .collect();
        let items = pairs
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| AgreementItem {
                item_id: format!("{t}/{i}"),
                coder_a: AttitudeLabel::ALL[a],
                coder_b: AttitudeLabel::ALL[b],
            })
            .collect();
        let got = krippendorff_alpha(&AgreementTable::new(items).map_err(|e| e.to_string())?).alpha;
        worst = worst.max((got - alpha_brute(&pairs)).abs());
    }
    ensure!(worst <= 1e-12, "max deviation {worst:e}");

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ann = dir.path().join("perfect.jsonl");
    let lines: Vec<String> = (0..16)
        .flat_map(|i| {
            let l = AttitudeLabel::ALL[i % 4].as_str();
            ["a", "b"].map(|c| {
                format!(r#"{{"review_id":"r{i}","targeted_text":"t","label":"{l}","annotator_id":"{c}"}}"#)
            })
        })
        .collect();
    std::fs::write(&ann, lines.join("\n")).unwrap();
    let out = cli(&["agree", "--annotations", ann.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])?;
    let text = String::from_utf8_lossy(&out.stdout);
    ensure!(text.contains("alpha 1.0000"), "agree printed {text:?}");
    Ok(format!("20 tables within {worst:.1e}; perfect agreement gives 1.0"))
}

fn tfidf() -> Outcome {
    let docs = ["the ramp the door", "the ramp staff", "the wide door open"];
    let v = Vocabulary::fit(&docs, IdfBase::Natural).map_err(|e| e.to_string())?;
    let w = |d: usize, t: &str| v.transform(docs[d]).get(v.index_of(t).unwrap());
    let (l34, l32) = (0.75f64.ln(), 1.5f64.ln());
    let cases = [
        (0, "the", 0.5 * l34),
        (0, "ramp", 0.0),
        (1, "the", l34 / 3.0),
        (1, "staff", l32 / 3.0),
        (2, "door", 0.0),
        (2, "wide", 0.25 * l32),
        (2, "open", 0.25 * l32),
    ];
    for (d, t, want) in cases {
        let got = w(d, t);
        ensure!((got - want).abs() <= 1e-12, "doc {d} `{t}`: {got} vs {want}");
    }
    let single = Vocabulary::fit(&["wheelchair ramp"], IdfBase::Natural).map_err(|e| e.to_string())?;
    let x = single.transform("wheelchair ramp");
    for &(_, val) in x.entries() {
        ensure!((val - 0.5 * 0.5f64.ln()).abs() <= 1e-12, "single-document weight {val}");
    }
    Ok("3-document fixture and negative single-document IDF exact to 1e-12".into())
}

fn classifier() -> Outcome {
    let (docs, labels) = separable_corpus(400, 17);
    let idx: Vec<usize> = (0..docs.len()).collect();
    let parts = split(&idx, |&i| labels[i], 0.8, 17, true).map_err(|e| e.to_string())?;
    let take = |ix: &[usize]| -> (Vec<&str>, Vec<AttitudeLabel>) {
        (ix.iter().map(|&i| docs[i].as_str()).collect(), ix.iter().map(|&i| labels[i]).collect())
    };
    let (tx, ty) = take(&parts.train);
    let (vx, vy) = take(&parts.test);
    let combos = GridFile::default().combinations(ModelKind::LogisticRegression);
    let opts = CvOptions {
        seed: 17,
        ..Default::default()
    };
    let run = || -> Result<(f64, Vec<u64>), Error> {
        let search = grid_search(&combos, &tx, &ty, opts)?;
        let model = NativeClassifier::fit(&tx, &ty, &search.best, IdfBase::Natural, 17)?;
        let pred: Vec<AttitudeLabel> = vx.iter().map(|t| model.predict(t)).collect();
        let acc = evaluate(&pred, &vy)?.accuracy;
        let bits = model
            .model
            .weights
            .iter()
            .flatten()
            .chain(&model.model.intercepts)
            .map(|w| w.to_bits())
            .collect();
        Ok((acc, bits))
    };
    let (acc, a) = run().map_err(|e| e.to_string())?;
    let (_, b) = run().map_err(|e| e.to_string())?;
    ensure!(acc >= 0.95, "held-out accuracy {acc}");
    ensure!(a == b, "reruns differ");
    let folds = kfold(400, 10, 17, None).map_err(|e| e.to_string())?;
    let mut seen = vec![0; 400];
    folds.iter().flatten().for_each(|&i| seen[i] += 1);
    ensure!(folds.len() == 10 && seen.iter().all(|&c| c == 1), "folds do not partition");
    Ok(format!("held-out accuracy {acc:.3}, reruns bit-identical, 10 folds partition"))
}

fn metrics() -> Outcome {
    let gold = [Negative, Negative, Negative, Neutral, Neutral, Positive, Positive, Unrelated];
    let pred = [Negative, Negative, Neutral, Neutral, Positive, Positive, Positive, Negative];
    let r = evaluate(&pred, &gold).map_err(|e| e.to_string())?;
    let want = [
        (2.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0),
        (0.5, 0.5, 0.5),
        (2.0 / 3.0, 1.0, 0.8),
        (0.0, 0.0, 0.0),
    ];
    let eq = |a: f64, b: f64| (a - b).abs() <= 1e-15;
    for (m, (p, rc, f)) in r.per_class.iter().zip(want) {
        ensure!(eq(m.precision, p) && eq(m.recall, rc) && eq(m.f1, f), "{}: {m:?}", m.label);
    }
    ensure!(r.accuracy == 0.625, "accuracy {}", r.accuracy);
    ensure!(eq(r.macro_precision, 11.0 / 24.0), "macro precision {}", r.macro_precision);
    ensure!(eq(r.macro_recall, 13.0 / 24.0), "macro recall {}", r.macro_recall);
    ensure!(eq(r.macro_f1, 59.0 / 120.0), "macro f1 {}", r.macro_f1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.random_range(1..50);
        let g: Vec<_> = (0..n).map(|_| AttitudeLabel::ALL[rng.random_range(0..4)]).collect();
        let p: Vec<_> = (0..n).map(|_| AttitudeLabel::ALL[rng.random_range(0..4)]).collect();
        let r = evaluate(&p, &g).map_err(|e| e.to_string())?;
        let f1s = r.per_class.iter().map(|m| m.f1);
        let (lo, hi) = f1s.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), f| (l.min(f), h.max(f)));
        ensure!(lo <= r.macro_f1 && r.macro_f1 <= hi, "macro f1 {} outside [{lo}, {hi}]", r.macro_f1);
    }
    Ok("8-item fixture exact; macro-F1 bounded on 100 random fixtures".into())
}

fn lsva() -> Outcome {
    let corpus = labeled_snippets(200, 30, 123);
    let stop: BTreeSet<String> = DEFAULT_STOPWORDS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect();
    let mut docs_with: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (i, s) in corpus.iter().enumerate() {
        let lower = s.snippet.targeted_text.to_lowercase();
        for w in lower.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty()) {
            if !stop.contains(w) {
                docs_with.entry(w.to_string()).or_default().insert(i);
            }
        }
    }
    let got = lsva_compute(
        corpus.iter().map(|s| (s.snippet.targeted_text.as_str(), s.label)),
        &Stopwords::default(),
        LsvaOptions {
            min_total: 1,
            bigrams: false,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!(got.len() == docs_with.len(), "{} words vs {}", got.len(), docs_with.len());
    for e in &got {
        let d = docs_with.get(&e.word).ok_or_else(|| format!("unexpected word {}", e.word))?;
        let pos = d.iter().filter(|&&i| corpus[i].label == Positive).count() as f64;
        let neg = d.iter().filter(|&&i| corpus[i].label == Negative).count() as f64;
        let n = d.len() as f64;
        ensure!(e.salience == n.log10(), "salience of {}", e.word);
        ensure!(e.valence == (pos - neg) / n, "valence of {}", e.word);
        ensure!((-1.0..=1.0).contains(&e.valence), "valence of {} out of range", e.word);
    }
    Ok(format!("{} words match the presence-count oracle exactly", got.len()))
}

fn poi() -> Outcome {
    let snippets = labeled_snippets(1000, 80, 31);
    let got = aggregate_poi(&snippets, &Default::default());
    let mut oracle: BTreeMap<&str, (i64, usize)> = BTreeMap::new();
    for s in &snippets {
        let v = match s.label {
            Positive => 1,
            Negative => -1,
            Neutral => 0,
            Unrelated => continue,
        };
        let e = oracle.entry(s.snippet.poi_id.as_str()).or_default();
        e.0 += v;
        e.1 += 1;
    }
    ensure!(got.len() == oracle.len(), "{} POIs vs {}", got.len(), oracle.len());
    for (p, (id, (sum, n))) in got.iter().zip(&oracle) {
        ensure!(p.poi_id == *id && p.n_access_reviews == *n, "POI {}", p.poi_id);
        ensure!(p.mean_sentiment == *sum as f64 / *n as f64, "mean of {}", p.poi_id);
    }
    let counts: Vec<usize> = (0..30).map(|m| distribution(&got, PoiType::Other, m).n_pois).collect();
    ensure!(counts.windows(2).all(|w| w[1] <= w[0]), "counts {counts:?}");
    Ok(format!("{} POI means match the group-by; filter monotone over 0..30", got.len()))
}

fn vif() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for d in 0..20 {
        let n = rng.random_range(60..200);
        let k = rng.random_range(3..8);
        let mut cols: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        for j in 1..k {
            let w = rng.random_range(0.0..3.0);
            for i in 0..n {
                cols[j][i] += w * cols[j - 1][i];
            }
        }
        cols.push((0..n).map(|i| cols[0][i] - 2.0 * cols[1][i]).collect());
        let names: Vec<String> = (0..cols.len()).map(|j| format!("c{j}")).collect();
        let r = vif_prune(&names, &cols, 5.0).map_err(|e| e.to_string())?;
        ensure!(r.dropped.first().map(|x| x.column.as_str()) == Some(names[k].as_str()), "design {d}: {:?}", r.dropped);
        let kept: Vec<Vec<f64>> =
            r.retained.iter().map(|c| cols[names.iter().position(|x| x == c).unwrap()].clone()).collect();
        if kept.len() > 1 {
            let v = compute_vif(&kept).map_err(|e| e.to_string())?;
            ensure!(v.iter().all(|x| *x <= 5.0), "design {d}: retained VIF {v:?}");
        }
    }
    let (names, cols) = collinear_covariates(3000, 1);
    let r = vif_prune(&names, &cols, 5.0).map_err(|e| e.to_string())?;
    let dropped: BTreeSet<&str> = r.dropped.iter().map(|d| d.column.as_str()).collect();
    let expect = BTreeSet::from(["Urban Population", "Median Income", "White"]);
    ensure!(dropped == expect, "dropped {dropped:?}");
    Ok("exact column first on 20 designs, retained VIF <= 5, constructed table drops its 3 analogues".into())
}

fn gam() -> Outcome {
    let cfg = GamSynth::default();
    let (data, truth) = gam_data(&cfg);
    let start = Instant::now();
    let fit = fit_gam(&data, &GamSpec::default()).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let worst = fit
        .slopes()
        .iter()
        .zip(truth.standardized(&data))
        .map(|(b, t)| (b - t).abs())
        .fold(0.0, f64::max);
    ensure!(worst <= 0.05, "max |beta error| {worst}");
    ensure!(secs < 60.0, "fit took {secs:.1}s");

    let (small, _) = gam_data(&GamSynth { n: 800, ..cfg.clone() });
    let stiff = GamSpec {
        smoothing: Smoothing::Fixed(vec![1e12; 4]),
        ..Default::default()
    };
    let f = fit_gam(&small, &stiff).map_err(|e| e.to_string())?;
    let ols = ols_linear(&small).map_err(|e| e.to_string())?;
    let ols_gap = f.coefficients.iter().zip(&ols).map(|(c, o)| (c.estimate - o).abs()).fold(0.0, f64::max);
    ensure!(ols_gap < 1e-6, "penalized vs OLS {ols_gap:e}");

    let (flat, _) = gam_data(&GamSynth {
        smooth_amplitude: 0.0,
        ..cfg
    });
    let edf = fit_gam(&flat, &GamSpec::default()).map_err(|e| e.to_string())?.smooth(SPATIAL_TERM).unwrap().edf;
    ensure!(edf < 0.5, "spatial e.d.f. {edf} without a surface");
    Ok(format!(
        "n=5000 k=15 max |error| {worst:.4} in {secs:.1}s; OLS gap {ols_gap:.1e}; flat-surface e.d.f. {edf:.3}"
    ))
}

fn cooks() -> Outcome {
    let cfg = GamSynth {
        n: 500,
        k: 4,
        n_states: 5,
        noise: Noise::Uniform,
        covariates: Noise::Uniform,
        smooth_amplitude: 0.0,
        ..Default::default()
    };
    let (mut data, _) = gam_data(&cfg);
    data.y[137] += 20.0 * cfg.noise_sd;
    let spec = GamSpec::default();
    let fit = fit_gam(&data, &spec).map_err(|e| e.to_string())?;
    let out = prune_influential(&data, &spec, &fit).map_err(|e| e.to_string())?;
    ensure!(out.threshold == 4.0 / 495.0, "threshold {}", out.threshold);
    ensure!(out.threshold == cooks_threshold(500, 4).map_err(|e| e.to_string())?, "threshold helper differs");
    ensure!(out.removed == vec![137], "removed {:?}", out.removed);
    Ok("only the planted point removed; threshold 4/495".into())
}

fn sensitivity() -> Outcome {
    let (data, _) = gam_data(&GamSynth {
        n: 400,
        k: 5,
        n_states: 6,
        ..Default::default()
    });
    let regions = regions_from(&data, |i| 60 + i % 40);
    let grid = threshold_grid(50, 5);
    let t = threshold_sensitivity(&regions, &grid, &data.names, &GamSpec::default(), 30).map_err(|e| e.to_string())?;
    let first = t.rows[0].coefficients.clone().ok_or("threshold 0 skipped")?;
    for r in &t.rows {
        ensure!(r.coefficients.as_ref() == Some(&first), "threshold {} differs", r.threshold);
    }
    Ok(format!("{} thresholds 0..=50, trajectories constant", t.rows.len()))
}

fn artifacts(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| !p.file_name().unwrap().to_string_lossy().starts_with("manifest."))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = DemoConfig {
        states: 6,
        counties_per_state: 12,
        reviews_per_poi: 12,
        annotated: 240,
        ..Default::default()
    };
    write_demo(dir.path(), &cfg).map_err(|e| e.to_string())?;
    let d = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let run = |out: &str| {
        cli(&[
            "run-all", "--seed", "7", "--reviews", &d("reviews.jsonl"), "--pois", &d("pois.jsonl"), "--regions",
            &d("regions.csv"), "--covariates", &d("covariates.csv"), "--annotations", &d("annotations.jsonl"),
            "--gold", &d("labeled.jsonl"), "--out", &d(out),
        ])
    };
    run("a")?;
    run("b")?;
    let (a, b) = (artifacts(&dir.path().join("a")), artifacts(&dir.path().join("b")));
    ensure!(a.len() >= 20, "only {} artifacts", a.len());
    ensure!(a.keys().eq(b.keys()), "artifact sets differ");
    for (name, bytes) in &a {
        ensure!(&b[name] == bytes, "{name} differs between runs");
    }
    Ok(format!("{} artifacts byte-identical across two runs", a.len()))
}

fn remote() -> Outcome {
    let rule = |t: &str| if t.contains("great") { "positive" } else { "negative" }.to_string();
    let stub = StubServer::per_text(rule).map_err(|e| e.to_string())?;
    let texts: Vec<String> = (0..97).map(|i| if i % 3 == 0 { format!("great {i}") } else { format!("bad {i}") }).collect();
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let mut cfg = RemoteClassifierConfig::new(stub.endpoint());
    cfg.batch_size = 8;
    cfg.max_in_flight = 4;
    let labels = RemoteClassifier::new(cfg.clone())
        .and_then(|c| c.classify_all(&refs))
        .map_err(|e| e.to_string())?;
    ensure!(labels.len() == texts.len(), "{} labels for {} texts", labels.len(), texts.len());
    for (t, l) in texts.iter().zip(&labels) {
        ensure!(l.as_str() == rule(t), "order broken at {t}");
    }
    for bad in ["Positive", "pos", "very negative"] {
        let s = StubServer::spawn(move |_, texts| StubReply::Labels(vec![bad.to_string(); texts.len()]))
            .map_err(|e| e.to_string())?;
        let mut c = RemoteClassifierConfig::new(s.endpoint());
        c.retries = 0;
        let err = RemoteClassifier::new(c).and_then(|c| c.classify_all(&["x"]));
        ensure!(matches!(err, Err(Error::Protocol(_))), "`{bad}` gave {err:?}");
    }
    Ok("97 texts in 13 batches kept order and length; malformed labels raise protocol errors".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("keyword filter", keyword_filter),
        ("krippendorff alpha", alpha),
        ("tf-idf", tfidf),
        ("classifier training", classifier),
        ("metrics", metrics),
        ("lsva", lsva),
        ("poi aggregation", poi),
        ("vif", vif),
        ("gam recovery", gam),
        ("cook's pruning", cooks),
        ("sensitivity sweep", sensitivity),
        ("end-to-end determinism", determinism),
        ("remote classifier protocol", remote),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  {name:<28} {detail} [{secs:.2}s]"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<28} {why} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
