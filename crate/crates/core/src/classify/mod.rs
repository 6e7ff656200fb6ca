//! Attitude classification: TF-IDF features, linear models, cross-validated
//! grid search, evaluation metrics, and labeling through any [`Classifier`],
//! including a remote service.

pub mod conformance;
pub mod cv;
pub mod linear;
pub mod metrics;
pub mod remote;
pub mod stub;
pub mod tfidf;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::{AttitudeLabel, LabelCounts};
use crate::error::{Error, Result};
use crate::filter::AccessibilitySnippet;

pub use conformance::{run_conformance, Check};
pub use cv::{grid_search, kfold, CvOptions, GridFile, GridSearchResult};
pub use linear::{train, Hyperparams, LinearModel, ModelKind, Penalty};
pub use metrics::{evaluate, EvalReport};
pub use remote::{classify_remote, RemoteClassifier, RemoteClassifierConfig};
pub use tfidf::{tokenize, IdfBase, TfidfVector, Vocabulary};

/// Anything that maps texts to attitude labels, one per text, in order.
pub trait Classifier: Sync {
    fn classify(&self, texts: &[&str]) -> Result<Vec<AttitudeLabel>>;

    /// Short human-readable identity for manifests and logs.
    fn describe(&self) -> String;
}

/// Vocabulary plus trained weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NativeClassifier {
    pub vocabulary: Vocabulary,
    pub model: LinearModel,
}

pub const MODEL_FORMAT: &str = "access-sentiment/linear-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    #[serde(flatten)]
    classifier: NativeClassifier,
}

impl NativeClassifier {
    /// Fits the vocabulary on `docs` and trains the model on their vectors.
    pub fn fit<S: AsRef<str>>(
        docs: &[S],
        labels: &[AttitudeLabel],
        hyperparams: &Hyperparams,
        idf_base: IdfBase,
        seed: u64,
    ) -> Result<Self> {
        let vocabulary = Vocabulary::fit(docs, idf_base)?;
        let x: Vec<TfidfVector> = docs.iter().map(|d| vocabulary.transform(d.as_ref())).collect();
        let model = linear::train(hyperparams, &x, labels, vocabulary.len(), seed)?;
        Ok(NativeClassifier { vocabulary, model })
    }

    pub fn predict(&self, text: &str) -> AttitudeLabel {
        self.model.predict(&self.vocabulary.transform(text))
    }

    /// Writes a self-describing JSON container (vocabulary, IDF base,
    /// hyperparameters, weights).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            classifier: self.clone(),
        };
        let text = serde_json::to_string(&file)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ModelFile = serde_json::from_str(&text)?;
        if file.format != MODEL_FORMAT || file.version != MODEL_VERSION {
            return Err(Error::invalid(format!(
                "{}: unsupported model container {} v{}",
                path.display(),
                file.format,
                file.version
            )));
        }
        if file.classifier.model.n_features != file.classifier.vocabulary.len() {
            return Err(Error::invalid("model width does not match vocabulary size"));
        }
        Ok(file.classifier)
    }
}

impl Classifier for NativeClassifier {
    fn classify(&self, texts: &[&str]) -> Result<Vec<AttitudeLabel>> {
        Ok(texts.par_iter().map(|t| self.predict(t)).collect())
    }

    fn describe(&self) -> String {
        format!("native {}", self.model.hyperparams)
    }
}

impl Classifier for RemoteClassifier {
    fn classify(&self, texts: &[&str]) -> Result<Vec<AttitudeLabel>> {
        self.classify_all(texts)
    }

    fn describe(&self) -> String {
        format!("remote {}", self.config().endpoint)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSnippet {
    #[serde(flatten)]
    pub snippet: AccessibilitySnippet,
    pub label: AttitudeLabel,
}

/// Labels every snippet's targeted text exactly once, in input order.
pub fn label_corpus<C: Classifier + ?Sized>(
    snippets: Vec<AccessibilitySnippet>,
    classifier: &C,
) -> Result<(Vec<LabeledSnippet>, LabelCounts)> {
    let texts: Vec<&str> = snippets.iter().map(|s| s.targeted_text.as_str()).collect();
    let labels = classifier.classify(&texts)?;
    if labels.len() != snippets.len() {
        return Err(Error::Protocol(format!(
            "classifier returned {} labels for {} snippets",
            labels.len(),
            snippets.len()
        )));
    }
    let counts: LabelCounts = labels.iter().copied().collect();
    let out = snippets
        .into_iter()
        .zip(labels)
        .map(|(snippet, label)| LabeledSnippet { snippet, label })
        .collect();
    Ok((out, counts))
}

pub fn read_labeled_snippets(path: impl AsRef<Path>) -> Result<Vec<LabeledSnippet>> {
    crate::jsonl::read_all(path)
}
