//! K-fold partitioning and exhaustive hyperparameter grids.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::linear::{self, Hyperparams, ModelKind, Penalty};
use super::tfidf::{IdfBase, TfidfVector, Vocabulary};
use crate::annotation::AttitudeLabel;
use crate::error::{Error, Result};

/// Shipped grid file; values reproduce the published search space.
pub const DEFAULT_GRID: &str = include_str!("../../data/grid.toml");

/// Value lists per hyperparameter. Combinations are enumerated with the
/// first list varying slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFile {
    pub sgd: SgdGrid,
    pub lr: LrGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdGrid {
    #[serde(alias = "clf__alpha")]
    pub alpha: Vec<f64>,
    #[serde(alias = "clf__max_iter")]
    pub max_iter: Vec<usize>,
    #[serde(alias = "clf__penalty")]
    pub penalty: Vec<Penalty>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrGrid {
    #[serde(rename = "C", alias = "clf__C")]
    pub c: Vec<f64>,
    #[serde(alias = "clf__max_iter")]
    pub max_iter: Vec<usize>,
    #[serde(alias = "clf__solver")]
    pub solver: Vec<String>,
}

impl GridFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::invalid(format!("grid file: {e}")))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn combinations(&self, kind: ModelKind) -> Vec<Hyperparams> {
        let mut out = Vec::new();
        match kind {
            ModelKind::Sgd => {
                for &a in &self.sgd.alpha {
                    for &m in &self.sgd.max_iter {
                        for &p in &self.sgd.penalty {
                            out.push(Hyperparams::sgd(a, m, p));
                        }
                    }
                }
            }
            ModelKind::LogisticRegression => {
                for &c in &self.lr.c {
                    for &m in &self.lr.max_iter {
                        for s in &self.lr.solver {
                            out.push(Hyperparams::LogisticRegression {
                                c,
                                max_iter: m,
                                solver: s.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

impl Default for GridFile {
    fn default() -> Self {
        Self::parse(DEFAULT_GRID).expect("shipped grid is valid")
    }
}

/// Validation folds: every index in `0..n` lands in exactly one fold and
/// fold sizes differ by at most one. With `labels`, each class is dealt
/// round-robin across folds so class shares stay balanced.
pub fn kfold(n: usize, k: usize, seed: u64, labels: Option<&[AttitudeLabel]>) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if n < k {
        return Err(Error::InsufficientData {
            required: k,
            available: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    match labels {
        None => {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let mut start = 0;
            for (f, fold) in folds.iter_mut().enumerate() {
                let size = n / k + usize::from(f < n % k);
                fold.extend_from_slice(&idx[start..start + size]);
                start += size;
            }
        }
        Some(labels) => {
            if labels.len() != n {
                return Err(Error::invalid("label count differs from item count"));
            }
            let mut next = 0;
            for class in AttitudeLabel::ALL {
                let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                members.shuffle(&mut rng);
                for i in members {
                    folds[next % k].push(i);
                    next += 1;
                }
            }
        }
    }
    for f in folds.iter_mut() {
        f.sort_unstable();
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub hyperparams: Hyperparams,
    pub mean_accuracy: f64,
    pub fold_accuracies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub best: Hyperparams,
    pub best_accuracy: f64,
    pub points: Vec<GridPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub stratified: bool,
    pub idf_base: IdfBase,
}

impl Default for CvOptions {
    fn default() -> Self {
        CvOptions {
            folds: 10,
            seed: 0,
            stratified: false,
            idf_base: IdfBase::Natural,
        }
    }
}

struct FoldData {
    n_features: usize,
    train_x: Vec<TfidfVector>,
    train_y: Vec<AttitudeLabel>,
    val_x: Vec<TfidfVector>,
    val_y: Vec<AttitudeLabel>,
}

/// Exhaustive K-fold search. The vocabulary is refit on each training fold,
/// folds are shared by every combination, and ties keep the first-listed
/// combination. Combinations differing only in solver tag are trained once.
pub fn grid_search<S: AsRef<str>>(
    combos: &[Hyperparams],
    docs: &[S],
    labels: &[AttitudeLabel],
    opts: CvOptions,
) -> Result<GridSearchResult> {
    use rayon::prelude::*;

    if combos.is_empty() {
        return Err(Error::invalid("empty hyperparameter grid"));
    }
    if docs.len() != labels.len() {
        return Err(Error::invalid("document and label counts differ"));
    }
    let folds = kfold(
        docs.len(),
        opts.folds,
        opts.seed,
        opts.stratified.then_some(labels),
    )?;
    let fold_data: Vec<FoldData> = folds
        .iter()
        .map(|val| {
            let mut is_val = vec![false; docs.len()];
            val.iter().for_each(|&i| is_val[i] = true);
            let train_docs: Vec<&str> = (0..docs.len())
                .filter(|&i| !is_val[i])
                .map(|i| docs[i].as_ref())
                .collect();
            let vocab = Vocabulary::fit(&train_docs, opts.idf_base)?;
            let train_x = train_docs.iter().map(|d| vocab.transform(d)).collect();
            let train_y = (0..docs.len()).filter(|&i| !is_val[i]).map(|i| labels[i]).collect();
            Ok(FoldData {
                n_features: vocab.len(),
                train_x,
                train_y,
                val_x: val.iter().map(|&i| vocab.transform(docs[i].as_ref())).collect(),
                val_y: val.iter().map(|&i| labels[i]).collect(),
            })
        })
        .collect::<Result<_>>()?;

    let mut unique: Vec<Hyperparams> = Vec::new();
    let mut slot: Vec<usize> = Vec::with_capacity(combos.len());
    for hp in combos {
        let eff = hp.effective();
        match unique.iter().position(|u| *u == eff) {
            Some(p) => slot.push(p),
            None => {
                slot.push(unique.len());
                unique.push(eff);
            }
        }
    }
    if unique.len() < combos.len() {
        log::info!(
            "grid: {} combinations map to {} distinct fits (solver tags share one solver)",
            combos.len(),
            unique.len()
        );
    }

    let scores: Vec<Result<Vec<f64>>> = unique
        .par_iter()
        .map(|hp| {
            fold_data
                .iter()
                .map(|fd| {
                    let m = linear::train(hp, &fd.train_x, &fd.train_y, fd.n_features, opts.seed)?;
                    let hits = fd
                        .val_x
                        .iter()
                        .zip(&fd.val_y)
                        .filter(|(x, y)| m.predict(x) == **y)
                        .count();
                    Ok(hits as f64 / fd.val_y.len() as f64)
                })
                .collect()
        })
        .collect();
    let scores: Vec<Vec<f64>> = scores.into_iter().collect::<Result<_>>()?;

    let points: Vec<GridPoint> = combos
        .iter()
        .zip(&slot)
        .map(|(hp, &s)| {
            let folds = scores[s].clone();
            GridPoint {
                hyperparams: hp.clone(),
                mean_accuracy: folds.iter().sum::<f64>() / folds.len() as f64,
                fold_accuracies: folds,
            }
        })
        .collect();
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.mean_accuracy > points[best].mean_accuracy {
            best = i;
        }
    }
    Ok(GridSearchResult {
        best: points[best].hyperparams.clone(),
        best_accuracy: points[best].mean_accuracy,
        points,
    })
}
