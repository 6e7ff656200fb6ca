//! Writes a synthetic input set plus a `pipeline.toml` that points at it.
//!
//! ```text
//! cargo run -p access-sentiment-cli --example make_demo -- demo [seed]
//! cargo run -p access-sentiment-cli -- --config demo/pipeline.toml run-all
//! ```

use std::path::PathBuf;

use access_sentiment::synth::demo::{write_demo, DemoConfig};

const PIPELINE: &str = r#"seed = 42
output_dir = "out"

[paths]
reviews = "reviews.jsonl"
pois = "pois.jsonl"
regions = "regions.csv"
covariates = "covariates.csv"
annotations = "annotations.jsonl"
gold = "labeled.jsonl"

[thresholds]
poi_min_reviews = 5
region_min_reviews = 10
"#;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "demo".into()));
    let mut cfg = DemoConfig::default();
    if let Some(seed) = args.next() {
        cfg.seed = seed.parse()?;
    }
    let summary = write_demo(&dir, &cfg)?;
    std::fs::write(dir.join("pipeline.toml"), PIPELINE)?;
    println!(
        "{}: {} reviews ({} about accessibility), {} POIs, {} counties, {} block groups, {} annotated",
        dir.display(),
        summary.reviews,
        summary.access_reviews,
        summary.pois,
        summary.counties,
        summary.cbgs,
        summary.annotated
    );
    Ok(())
}
