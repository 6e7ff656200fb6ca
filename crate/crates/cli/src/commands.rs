use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;
use serde_json::json;

use access_sentiment::annotation::{class_histogram, krippendorff_alpha, read_labeled, split, AgreementTable};
use access_sentiment::classify::{
    evaluate, grid_search, label_corpus, read_labeled_snippets, Classifier, CvOptions, EvalReport, GridFile,
    LabeledSnippet, NativeClassifier, RemoteClassifier,
};
use access_sentiment::corpus::{ingest_pois, join_regions, read_assignments, Poi};
use access_sentiment::filter::{filter_file, read_snippets, write_snippets, KeywordMatcher, SearchList};
use access_sentiment::geostat::region::{
    build_regions, choropleth_export, read_covariates, read_regions, with_threshold, write_regions, RegionOptions,
    RegionRecord,
};
use access_sentiment::geostat::sensitivity::{threshold_grid, write_sensitivity_csv};
use access_sentiment::geostat::{
    engagement_contrast, format_report, regress, sentiment_correlations, threshold_sensitivity, vif_prune, GamData,
};
use access_sentiment::lsva::{lsva_compute, lsva_export, LsvaOptions, Stopwords};
use access_sentiment::poianalysis::{
    aggregate_poi, distributions, type_index, write_sentiments_csv, write_summary_csv, write_summary_json,
    MappingTable,
};
use access_sentiment::Error;

use crate::config::PipelineConfig;
use crate::manifest::{self, Manifest, Versions};

/// Bookkeeping for one subcommand: declared inputs, written outputs and the
/// manifest that lists them.
struct Stage<'a> {
    cfg: &'a PipelineConfig,
    name: &'static str,
    inputs: Vec<manifest::FileRecord>,
    outputs: Vec<(String, PathBuf)>,
    params: serde_json::Map<String, serde_json::Value>,
}

impl<'a> Stage<'a> {
    fn new(cfg: &'a PipelineConfig, name: &'static str) -> Self {
        Stage {
            cfg,
            name,
            inputs: Vec::new(),
            outputs: Vec::new(),
            params: serde_json::Map::new(),
        }
    }

    fn input(&mut self, role: &str, path: &Path) -> Result<PathBuf> {
        if !path.is_file() {
            bail!("{}: {role} input {} not found", self.name, path.display());
        }
        self.inputs.push(manifest::record(role, path)?);
        Ok(path.to_path_buf())
    }

    fn required(&mut self, role: &str, path: &Option<PathBuf>) -> Result<PathBuf> {
        let p = path
            .as_ref()
            .ok_or_else(|| anyhow!("{}: no {role} input (set paths.{role} or pass --{})", self.name, role.replace('_', "-")))?;
        self.input(role, p)
    }

    /// An earlier stage's artifact unless the config names a file.
    fn intermediate(&mut self, role: &str, configured: &Option<PathBuf>, default: &str) -> Result<PathBuf> {
        let p = configured.clone().unwrap_or_else(|| self.cfg.output_dir.join(default));
        self.input(role, &p)
    }

    fn out(&mut self, file: &str) -> PathBuf {
        let p = self.cfg.output_dir.join(file);
        self.outputs.push((file.to_string(), p.clone()));
        p
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.params.insert(key.to_string(), serde_json::to_value(value).expect("parameter serializes"));
    }

    fn finish(self) -> Result<()> {
        let outputs = self
            .outputs
            .iter()
            .map(|(role, p)| manifest::record(role, p))
            .collect::<Result<Vec<_>>>()?;
        let m = Manifest {
            command: self.name.to_string(),
            config_hash: self.cfg.hash(),
            seed: self.cfg.seed,
            versions: Versions::current(),
            timestamp_unix: manifest::now_unix(),
            inputs: self.inputs,
            outputs,
            parameters: serde_json::Value::Object(self.params),
        };
        write_json(&self.cfg.output_dir.join(format!("manifest.{}.json", self.name)), &m)
    }
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_with(path: &Path, f: impl FnOnce(&mut Vec<u8>) -> access_sentiment::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    f(&mut buf)?;
    std::fs::write(path, buf).with_context(|| format!("writing {}", path.display()))
}

fn load_pois(stage: &mut Stage, cfg: &PipelineConfig) -> Result<Vec<Poi>> {
    let path = stage.required("pois", &cfg.paths.pois)?;
    let mut pois = Vec::new();
    let stats = ingest_pois(&path, |p| pois.push(p))?;
    if stats.skipped > 0 {
        log::warn!("{}: {} malformed POI lines skipped", path.display(), stats.skipped);
    }
    Ok(pois)
}

fn load_regions(stage: &mut Stage, cfg: &PipelineConfig) -> Result<Vec<RegionRecord>> {
    let path = stage.intermediate("region_records", &cfg.paths.region_records, "regions.jsonl")?;
    let regions = read_regions(&path)?;
    Ok(with_threshold(&regions, cfg.thresholds.region_min_reviews))
}

fn classifier(stage: &mut Stage, cfg: &PipelineConfig) -> Result<Box<dyn Classifier>> {
    if let Some(endpoint) = &cfg.classifier.endpoint {
        let c = RemoteClassifier::new(cfg.classifier.remote(endpoint))?;
        stage.param("classifier", c.describe());
        return Ok(Box::new(c));
    }
    let path = cfg
        .classifier
        .model
        .clone()
        .unwrap_or_else(|| cfg.output_dir.join("model.json"));
    if !path.is_file() {
        bail!("no classifier: pass --classifier <model file | URL> or run `train` first");
    }
    stage.input("model", &path)?;
    let c = NativeClassifier::load(&path)?;
    stage.param("classifier", c.describe());
    Ok(Box::new(c))
}

pub fn format_eval(r: &EvalReport) -> String {
    let mut s = format!("{:<10} {:>9} {:>9} {:>9} {:>8}\n", "label", "precision", "recall", "f1", "support");
    for m in &r.per_class {
        let _ = writeln!(
            s,
            "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            m.label.as_str(),
            m.precision,
            m.recall,
            m.f1,
            m.support
        );
    }
    let _ = writeln!(
        s,
        "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>8}",
        "macro", r.macro_precision, r.macro_recall, r.macro_f1, r.total
    );
    let _ = writeln!(s, "accuracy {:.4}", r.accuracy);
    s
}

pub fn filter(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "filter");
    let reviews = st.required("reviews", &cfg.paths.reviews)?;
    let list = match &cfg.paths.search_list {
        Some(p) => SearchList::from_file(st.input("search_list", p)?)?,
        None => SearchList::default(),
    };
    st.param("patterns", list.patterns().len());
    let matcher = KeywordMatcher::new(list);
    let (snippets, stats, ingest) = filter_file(&reviews, &matcher, cfg.lanes)?;
    write_with(&st.out("snippets.jsonl"), |w| write_snippets(w, &snippets))?;
    write_json(&st.out("filter_stats.json"), &json!({ "filter": stats, "ingest": ingest }))?;
    println!("filter: {} of {} reviews mention accessibility", stats.matched, stats.scanned);
    st.finish()
}

pub fn agree(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "agree");
    let path = st.required("annotations", &cfg.paths.annotations)?;
    let examples = read_labeled(&path)?;
    let table = AgreementTable::from_examples(&examples)?;
    let alpha = krippendorff_alpha(&table);
    write_json(
        &st.out("agreement.json"),
        &json!({
            "items": table.items().len(),
            "alpha": alpha,
            "label_counts": class_histogram(&examples),
        }),
    )?;
    println!("alpha {:.4} over {} items", alpha.alpha, table.items().len());
    st.finish()
}

pub fn train(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "train");
    let gold = read_labeled(st.required("gold", &cfg.paths.gold)?)?;
    let t = &cfg.train;
    let parts = split(&gold, |e| e.label, t.train_ratio, cfg.seed, t.stratified)?;
    let grid = match &cfg.paths.grid {
        Some(p) => GridFile::from_file(st.input("grid", p)?)?,
        None => GridFile::default(),
    };
    let combos = grid.combinations(t.model);
    let docs: Vec<&str> = parts.train.iter().map(|e| e.targeted_text.as_str()).collect();
    let labels: Vec<_> = parts.train.iter().map(|e| e.label).collect();
    let opts = CvOptions {
        folds: t.folds,
        seed: cfg.seed,
        stratified: t.stratified,
        idf_base: t.idf_base,
    };
    let search = grid_search(&combos, &docs, &labels, opts)?;
    let model = NativeClassifier::fit(&docs, &labels, &search.best, t.idf_base, cfg.seed)?;
    model.save(st.out("model.json"))?;

    let pred: Vec<_> = parts.test.iter().map(|e| model.predict(&e.targeted_text)).collect();
    let gold_test: Vec<_> = parts.test.iter().map(|e| e.label).collect();
    let report = evaluate(&pred, &gold_test)?;
    write_json(
        &st.out("train_report.json"),
        &json!({
            "n_train": parts.train.len(),
            "n_test": parts.test.len(),
            "best": search.best,
            "best_cv_accuracy": search.best_accuracy,
            "grid": search.points,
            "test": report,
        }),
    )?;
    let text = format!(
        "best {} (cv accuracy {:.4})\nheld-out {} of {}\n{}",
        search.best,
        search.best_accuracy,
        parts.test.len(),
        gold.len(),
        format_eval(&report)
    );
    std::fs::write(st.out("train_report.txt"), &text)?;
    print!("{text}");
    st.param("combinations", combos.len());
    st.finish()
}

pub fn eval(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "eval");
    let clf = classifier(&mut st, cfg)?;
    let gold = read_labeled(st.required("gold", &cfg.paths.gold)?)?;
    let texts: Vec<&str> = gold.iter().map(|e| e.targeted_text.as_str()).collect();
    let pred = clf.classify(&texts)?;
    let truth: Vec<_> = gold.iter().map(|e| e.label).collect();
    let report = evaluate(&pred, &truth)?;
    write_json(&st.out("eval.json"), &report)?;
    let text = format_eval(&report);
    std::fs::write(st.out("eval.txt"), &text)?;
    print!("{text}");
    st.finish()
}

pub fn label(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "label");
    let clf = classifier(&mut st, cfg)?;
    let snippets = read_snippets(st.intermediate("snippets", &cfg.paths.snippets, "snippets.jsonl")?)?;
    let (labeled, counts) = label_corpus(snippets, clf.as_ref())?;
    access_sentiment::jsonl::write_all(st.out("labeled.jsonl"), &labeled)?;
    write_json(&st.out("label_counts.json"), &counts)?;
    println!(
        "label: {} snippets (negative {}, neutral {}, positive {}, unrelated {})",
        counts.total(),
        counts.0[0],
        counts.0[1],
        counts.0[2],
        counts.0[3]
    );
    st.finish()
}

fn labeled(st: &mut Stage, cfg: &PipelineConfig) -> Result<Vec<LabeledSnippet>> {
    Ok(read_labeled_snippets(st.intermediate("labeled", &cfg.paths.labeled, "labeled.jsonl")?)?)
}

pub fn lsva(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "lsva");
    let snippets = labeled(&mut st, cfg)?;
    let stop = match &cfg.paths.stopwords {
        Some(p) => Stopwords::from_file(st.input("stopwords", p)?)?,
        None => Stopwords::default(),
    };
    let opts = LsvaOptions {
        min_total: cfg.lsva.min_total,
        bigrams: cfg.lsva.bigrams,
    };
    let entries = lsva_compute(
        snippets.iter().map(|s| (s.snippet.targeted_text.as_str(), s.label)),
        &stop,
        opts,
    )?;
    write_with(&st.out("lsva.csv"), |w| lsva_export(w, &entries))?;
    println!("lsva: {} words with at least {} reviews", entries.len(), opts.min_total);
    st.param("min_total", opts.min_total);
    st.finish()
}

pub fn poi_report(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "poi-report");
    let snippets = labeled(&mut st, cfg)?;
    let pois = load_pois(&mut st, cfg)?;
    let table = match &cfg.paths.mapping {
        Some(p) => MappingTable::from_file(st.input("mapping", p)?)?,
        None => MappingTable::default(),
    };
    let types = type_index(&pois, &table);
    let sentiments = aggregate_poi(&snippets, &types);
    let min = cfg.thresholds.poi_min_reviews;
    let summaries = distributions(&sentiments, min);
    write_with(&st.out("poi_sentiment.csv"), |w| write_sentiments_csv(w, &sentiments))?;
    write_with(&st.out("poi_summary.json"), |w| write_summary_json(w, &summaries))?;
    write_with(&st.out("poi_summary.csv"), |w| write_summary_csv(w, &summaries))?;
    println!("poi-report: {} POIs, threshold {min}", sentiments.len());
    for s in summaries.iter().filter(|s| s.n_pois > 0) {
        let q = s.quartiles.expect("non-empty group has quartiles");
        println!("  {:<28} n={:<6} median {:+.3}", s.poi_type.as_str(), s.n_pois, q[1]);
    }
    st.param("poi_min_reviews", min);
    st.finish()
}

pub fn geo_build(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "geo-build");
    let snippets = labeled(&mut st, cfg)?;
    let pois = load_pois(&mut st, cfg)?;
    let assignments = read_assignments(st.required("regions", &cfg.paths.regions)?)?;
    let (pois, join) = join_regions(pois, &assignments)?;
    let covariates = read_covariates(st.required("covariates", &cfg.paths.covariates)?)?;
    let opts = RegionOptions {
        level: cfg.regress.level,
        min_reviews: cfg.thresholds.region_min_reviews,
    };
    let (regions, stats) = build_regions(&snippets, &pois, &covariates, opts)?;
    write_regions(st.out("regions.jsonl"), &regions)?;
    write_json(&st.out("region_stats.json"), &json!({ "join": join, "build": stats }))?;

    let names: Vec<&str> = cfg.regress.covariates.iter().map(String::as_str).collect();
    let correlations = match sentiment_correlations(&regions, &names) {
        Ok(c) => Some(c),
        Err(e @ Error::InsufficientData { .. }) => {
            log::warn!("correlations skipped: {e}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    write_json(&st.out("correlations.json"), &correlations)?;
    let contrast = match engagement_contrast(&regions, opts.min_reviews, &names) {
        Ok(c) => Some(c),
        Err(e @ Error::InsufficientData { .. }) => {
            log::warn!("engagement contrast skipped: {e}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    write_json(&st.out("engagement.json"), &contrast)?;
    println!(
        "geo-build: {} {} regions, {} with at least {} reviews",
        stats.regions,
        opts.level.as_str(),
        stats.included,
        opts.min_reviews
    );
    st.param("level", opts.level);
    st.param("region_min_reviews", opts.min_reviews);
    st.finish()
}

pub fn regress_cmd(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "regress");
    let regions = load_regions(&mut st, cfg)?;
    let outcome = regress(&regions, &cfg.regress.options())?;
    write_json(&st.out("fit.json"), &outcome)?;

    let mut text = String::new();
    let _ = writeln!(text, "VIF threshold {}", outcome.vif.threshold);
    for d in &outcome.vif.dropped {
        let _ = writeln!(text, "  dropped {:<28} VIF {:.2}", d.column, d.vif);
    }
    text.push('\n');
    if let Some(p) = &outcome.pruning {
        text.push_str(&format_report("Initial fit", &outcome.initial));
        let _ = writeln!(
            text,
            "\nCook's distance threshold {:.6}: removed {} of {}\n",
            p.threshold,
            p.removed.len(),
            outcome.initial.n
        );
    }
    text.push_str(&format_report("Final fit", &outcome.fit));
    for (k, v) in &outcome.metadata {
        let _ = writeln!(text, "# {k}: {v}");
    }
    std::fs::write(st.out("fit_report.txt"), &text)?;
    print!("{}", format_report("Final fit", &outcome.fit));
    st.param("region_min_reviews", cfg.thresholds.region_min_reviews);
    st.param("options", cfg.regress.options());
    st.finish()
}

pub fn sensitivity(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "sensitivity");
    let regions = load_regions(&mut st, cfg)?;
    let data = GamData::from_regions(&regions, &cfg.regress.covariates)?;
    let retained = vif_prune(&data.names, &data.columns, cfg.regress.vif_threshold)?.retained;
    let s = &cfg.sensitivity;
    let grid = threshold_grid(s.max_threshold, s.step);
    let table = threshold_sensitivity(&regions, &grid, &retained, &cfg.regress.spec(), s.min_regions)?;
    write_with(&st.out("sensitivity.csv"), |w| write_sensitivity_csv(w, &table))?;
    write_json(&st.out("sensitivity.json"), &table)?;
    let fitted = table.rows.iter().filter(|r| r.coefficients.is_some()).count();
    match table.stability {
        Some(v) => println!("sensitivity: {fitted} of {} thresholds fitted, largest late change {v:.4}", grid.len()),
        None => println!("sensitivity: {fitted} of {} thresholds fitted", grid.len()),
    }
    st.param("thresholds", grid);
    st.finish()
}

pub fn export(cfg: &PipelineConfig) -> Result<()> {
    let mut st = Stage::new(cfg, "export");
    let regions = load_regions(&mut st, cfg)?;
    write_with(&st.out("choropleth.csv"), |w| choropleth_export(w, &regions))?;
    println!("export: {} regions", regions.len());
    st.finish()
}

pub fn run_all(cfg: &PipelineConfig) -> Result<()> {
    let mut ran: Vec<&str> = Vec::new();
    let mut step = |name: &'static str, f: fn(&PipelineConfig) -> Result<()>| -> Result<()> {
        f(cfg).with_context(|| format!("stage `{name}`"))?;
        ran.push(name);
        Ok(())
    };
    if cfg.paths.annotations.is_some() {
        step("agree", agree)?;
    }
    step("filter", filter)?;
    if cfg.classifier.endpoint.is_none() && cfg.classifier.model.is_none() {
        if cfg.paths.gold.is_none() {
            bail!("run-all needs a classifier (--classifier) or gold labels (paths.gold) to train one");
        }
        step("train", train)?;
    }
    step("label", label)?;
    step("lsva", lsva)?;
    if cfg.paths.pois.is_some() {
        step("poi-report", poi_report)?;
    }
    let geo = [&cfg.paths.pois, &cfg.paths.regions, &cfg.paths.covariates];
    if geo.iter().all(|p| p.is_some()) {
        step("geo-build", geo_build)?;
        step("regress", regress_cmd)?;
        step("sensitivity", sensitivity)?;
        step("export", export)?;
    } else {
        log::warn!("regional stages skipped: pois, regions and covariates are all required");
    }
    write_json(
        &cfg.output_dir.join("manifest.run-all.json"),
        &json!({
            "command": "run-all",
            "stages": ran,
            "config_hash": cfg.hash(),
            "seed": cfg.seed,
            "versions": Versions::current(),
            "timestamp_unix": manifest::now_unix(),
        }),
    )
}
