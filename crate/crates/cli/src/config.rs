use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use access_sentiment::classify::{IdfBase, ModelKind, RemoteClassifierConfig};
use access_sentiment::geostat::region::{Level, COVARIATES};
use access_sentiment::geostat::{GamSpec, RegressOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Shards used when scanning the review file.
    pub lanes: usize,
    pub paths: Paths,
    pub classifier: ClassifierConfig,
    pub thresholds: Thresholds,
    pub train: TrainConfig,
    pub lsva: LsvaConfig,
    pub regress: RegressConfig,
    pub sensitivity: SensitivityConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 42,
            output_dir: PathBuf::from("out"),
            lanes: 4,
            paths: Paths::default(),
            classifier: ClassifierConfig::default(),
            thresholds: Thresholds::default(),
            train: TrainConfig::default(),
            lsva: LsvaConfig::default(),
            regress: RegressConfig::default(),
            sensitivity: SensitivityConfig::default(),
        }
    }
}

/// Input files. Intermediate inputs (`snippets`, `labeled`, `region_records`)
/// default to the artifacts of earlier stages in the output directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub reviews: Option<PathBuf>,
    pub pois: Option<PathBuf>,
    /// POI to county / block group assignments.
    pub regions: Option<PathBuf>,
    pub covariates: Option<PathBuf>,
    /// Doubly annotated examples for the agreement check.
    pub annotations: Option<PathBuf>,
    /// Gold labels for training and evaluation.
    pub gold: Option<PathBuf>,
    pub search_list: Option<PathBuf>,
    pub mapping: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub grid: Option<PathBuf>,
    pub snippets: Option<PathBuf>,
    pub labeled: Option<PathBuf>,
    pub region_records: Option<PathBuf>,
}

impl Paths {
    fn each_mut(&mut self) -> [(&'static str, &mut Option<PathBuf>); 13] {
        [
            ("reviews", &mut self.reviews),
            ("pois", &mut self.pois),
            ("regions", &mut self.regions),
            ("covariates", &mut self.covariates),
            ("annotations", &mut self.annotations),
            ("gold", &mut self.gold),
            ("search_list", &mut self.search_list),
            ("mapping", &mut self.mapping),
            ("stopwords", &mut self.stopwords),
            ("grid", &mut self.grid),
            ("snippets", &mut self.snippets),
            ("labeled", &mut self.labeled),
            ("region_records", &mut self.region_records),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    /// Saved native model.
    pub model: Option<PathBuf>,
    /// Base URL of a classification service.
    pub endpoint: Option<String>,
    pub batch_size: usize,
    pub timeout_ms: u64,
    pub retries: u32,
    pub max_in_flight: usize,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        let r = RemoteClassifierConfig::new("");
        ClassifierConfig {
            model: None,
            endpoint: None,
            batch_size: r.batch_size,
            timeout_ms: r.timeout_ms,
            retries: r.retries,
            max_in_flight: r.max_in_flight,
        }
    }
}

impl ClassifierConfig {
    pub fn remote(&self, endpoint: &str) -> RemoteClassifierConfig {
        RemoteClassifierConfig {
            endpoint: endpoint.to_string(),
            batch_size: self.batch_size,
            timeout_ms: self.timeout_ms,
            retries: self.retries,
            max_in_flight: self.max_in_flight,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub poi_min_reviews: usize,
    pub region_min_reviews: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            poi_min_reviews: 5,
            region_min_reviews: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub model: ModelKind,
    pub folds: usize,
    pub train_ratio: f64,
    pub stratified: bool,
    pub idf_base: IdfBase,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            model: ModelKind::LogisticRegression,
            folds: 10,
            train_ratio: 0.8,
            stratified: true,
            idf_base: IdfBase::Natural,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LsvaConfig {
    pub min_total: usize,
    pub bigrams: bool,
}

impl Default for LsvaConfig {
    fn default() -> Self {
        LsvaConfig {
            min_total: 10,
            bigrams: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RegressConfig {
    pub level: Level,
    pub covariates: Vec<String>,
    pub vif_threshold: f64,
    pub knots: usize,
    pub spatial: bool,
    pub state_effect: bool,
    pub prune: bool,
}

impl Default for RegressConfig {
    fn default() -> Self {
        let o = RegressOptions::default();
        RegressConfig {
            level: Level::County,
            covariates: COVARIATES.iter().map(|s| s.to_string()).collect(),
            vif_threshold: o.vif_threshold,
            knots: o.spec.knots,
            spatial: o.spec.spatial,
            state_effect: o.spec.state_effect,
            prune: o.prune,
        }
    }
}

impl RegressConfig {
    pub fn spec(&self) -> GamSpec {
        GamSpec {
            knots: self.knots,
            spatial: self.spatial,
            state_effect: self.state_effect,
            ..GamSpec::default()
        }
    }

    pub fn options(&self) -> RegressOptions {
        RegressOptions {
            covariates: self.covariates.clone(),
            vif_threshold: self.vif_threshold,
            spec: self.spec(),
            prune: self.prune,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensitivityConfig {
    pub max_threshold: usize,
    pub step: usize,
    /// Thresholds leaving fewer regions are skipped.
    pub min_regions: usize,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig {
            max_threshold: 50,
            step: 5,
            min_regions: 30,
        }
    }
}

impl PipelineConfig {
    /// Reads a TOML file. Relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg: PipelineConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for (_, p) in cfg.paths.each_mut() {
            if let Some(p) = p {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        if let Some(m) = &mut cfg.classifier.model {
            if m.is_relative() {
                *m = base.join(&*m);
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    /// Every configured input must exist before anything runs.
    pub fn validate(&mut self) -> Result<()> {
        for (name, p) in self.paths.each_mut() {
            if let Some(p) = p {
                if !p.exists() && !matches!(name, "snippets" | "labeled" | "region_records") {
                    bail!("paths.{name}: {} does not exist", p.display());
                }
            }
        }
        if let Some(m) = &self.classifier.model {
            if !m.exists() {
                bail!("classifier.model: {} does not exist", m.display());
            }
        }
        if self.classifier.model.is_some() && self.classifier.endpoint.is_some() {
            bail!("classifier: set either `model` or `endpoint`, not both");
        }
        if !(self.train.train_ratio > 0.0 && self.train.train_ratio < 1.0) {
            bail!("train.train_ratio must lie strictly between 0 and 1");
        }
        if self.train.folds < 2 {
            bail!("train.folds must be at least 2");
        }
        if self.lsva.min_total == 0 {
            bail!("lsva.min_total must be at least 1");
        }
        if self.lanes == 0 {
            bail!("lanes must be at least 1");
        }
        if self.regress.vif_threshold <= 1.0 {
            bail!("regress.vif_threshold must exceed 1");
        }
        Ok(())
    }

    /// SHA-256 of the resolved configuration.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }
}
