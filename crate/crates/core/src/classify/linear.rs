//! Multinomial linear classifiers over sparse TF-IDF features.
//!
//! Two trainers share one model type:
//!
//! * [`ModelKind::LogisticRegression`] minimizes
//!   `mean(cross_entropy) + ||W||^2 / (2 C n)` with L-BFGS and an Armijo
//!   backtracking line search, so the objective never increases between
//!   outer iterations. Intercepts are not penalized. Solver tags from the
//!   grid file are recorded but all map to this routine.
//! * [`ModelKind::Sgd`] runs per-sample stochastic updates on the same
//!   cross-entropy loss with an `alpha`-scaled l2, l1 or elastic-net penalty,
//!   using the `1 / (alpha (t0 + t))` step schedule, lazy l2 scaling and a
//!   cumulative l1 penalty.

use serde::{Deserialize, Serialize};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::tfidf::TfidfVector;
use crate::annotation::AttitudeLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LogisticRegression,
    Sgd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Penalty {
    L2,
    L1,
    Elasticnet,
}

impl std::str::FromStr for Penalty {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l2" => Ok(Penalty::L2),
            "l1" => Ok(Penalty::L1),
            "elasticnet" => Ok(Penalty::Elasticnet),
            _ => Err(Error::invalid(format!("unknown penalty `{s}`"))),
        }
    }
}

/// Elastic-net mixing used by the SGD trainer.
pub const L1_RATIO: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Hyperparams {
    LogisticRegression {
        c: f64,
        max_iter: usize,
        /// Accepted for grid compatibility; every tag runs L-BFGS.
        solver: String,
    },
    Sgd {
        alpha: f64,
        max_iter: usize,
        penalty: Penalty,
    },
}

impl Hyperparams {
    pub fn kind(&self) -> ModelKind {
        match self {
            Hyperparams::LogisticRegression { .. } => ModelKind::LogisticRegression,
            Hyperparams::Sgd { .. } => ModelKind::Sgd,
        }
    }

    pub fn logistic(c: f64, max_iter: usize) -> Self {
        Hyperparams::LogisticRegression {
            c,
            max_iter,
            solver: "lbfgs".into(),
        }
    }

    pub fn sgd(alpha: f64, max_iter: usize, penalty: Penalty) -> Self {
        Hyperparams::Sgd {
            alpha,
            max_iter,
            penalty,
        }
    }

    /// Hyperparameters with the solver tag erased; two values with the same
    /// effective form train identical models.
    pub fn effective(&self) -> Hyperparams {
        match self {
            Hyperparams::LogisticRegression { c, max_iter, .. } => Hyperparams::LogisticRegression {
                c: *c,
                max_iter: *max_iter,
                solver: "lbfgs".into(),
            },
            other => other.clone(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Hyperparams::LogisticRegression { c, max_iter, .. } => *c > 0.0 && c.is_finite() && *max_iter > 0,
            Hyperparams::Sgd { alpha, max_iter, .. } => *alpha > 0.0 && alpha.is_finite() && *max_iter > 0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid hyperparameters {self:?}")))
        }
    }
}

impl std::fmt::Display for Hyperparams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Hyperparams::LogisticRegression { c, max_iter, solver } => {
                write!(f, "lr(C={c}, max_iter={max_iter}, solver={solver})")
            }
            Hyperparams::Sgd { alpha, max_iter, penalty } => {
                write!(f, "sgd(alpha={alpha}, max_iter={max_iter}, penalty={penalty:?})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub hyperparams: Hyperparams,
    pub n_features: usize,
    /// Classes seen in training; rows of `weights` follow this order.
    pub classes: Vec<AttitudeLabel>,
    pub weights: Vec<Vec<f64>>,
    pub intercepts: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Objective value after each outer iteration (LR) or epoch (SGD).
    pub loss_trace: Vec<f64>,
}

impl LinearModel {
    pub fn kind(&self) -> ModelKind {
        self.hyperparams.kind()
    }

    pub fn decision(&self, x: &TfidfVector) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.intercepts)
            .map(|(w, b)| x.dot(w) + b)
            .collect()
    }

    /// Highest-scoring class; ties go to the earlier class.
    pub fn predict(&self, x: &TfidfVector) -> AttitudeLabel {
        let scores = self.decision(x);
        let mut best = 0;
        for (k, s) in scores.iter().enumerate() {
            if *s > scores[best] {
                best = k;
            }
        }
        self.classes[best]
    }
}

/// Fits a model. Non-convergence within `max_iter` is reported through
/// `converged`, not as an error.
pub fn train(
    hyperparams: &Hyperparams,
    x: &[TfidfVector],
    y: &[AttitudeLabel],
    n_features: usize,
    seed: u64,
) -> Result<LinearModel> {
    hyperparams.validate()?;
    if x.len() != y.len() {
        return Err(Error::invalid(format!("{} feature rows but {} labels", x.len(), y.len())));
    }
    if x.len() < 4 {
        return Err(Error::InsufficientData {
            required: 4,
            available: x.len(),
        });
    }
    let classes: Vec<AttitudeLabel> = AttitudeLabel::ALL
        .into_iter()
        .filter(|c| y.contains(c))
        .collect();
    if classes.len() < 2 {
        return Err(Error::invalid("training data needs at least two classes"));
    }
    if let Some(bad) = x.iter().flat_map(|v| v.entries()).find(|(i, _)| *i >= n_features) {
        return Err(Error::invalid(format!("feature index {} out of range {n_features}", bad.0)));
    }
    let targets: Vec<usize> = y
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    let problem = Problem {
        x,
        y: &targets,
        n_classes: classes.len(),
        n_features,
    };
    let fit = match hyperparams {
        Hyperparams::LogisticRegression { c, max_iter, .. } => problem.lbfgs(*c, *max_iter),
        Hyperparams::Sgd {
            alpha,
            max_iter,
            penalty,
        } => problem.sgd(*alpha, *penalty, *max_iter, seed),
    };
    Ok(LinearModel {
        hyperparams: hyperparams.clone(),
        n_features,
        classes,
        weights: fit.weights,
        intercepts: fit.intercepts,
        converged: fit.converged,
        iterations: fit.iterations,
        loss_trace: fit.trace,
    })
}

struct Fit {
    weights: Vec<Vec<f64>>,
    intercepts: Vec<f64>,
    converged: bool,
    iterations: usize,
    trace: Vec<f64>,
}

struct Problem<'a> {
    x: &'a [TfidfVector],
    y: &'a [usize],
    n_classes: usize,
    n_features: usize,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// `-log softmax(z)[target]`, computed stably.
fn cross_entropy(z: &[f64], target: usize) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
    lse - z[target]
}

const LBFGS_MEMORY: usize = 10;
const LBFGS_TOL: f64 = 1e-6;

impl Problem<'_> {
    fn dim(&self) -> usize {
        self.n_classes * (self.n_features + 1)
    }

    // Parameter layout: class k occupies [k*(F+1), (k+1)*(F+1)), intercept last.
    fn scores(&self, theta: &[f64], row: &TfidfVector, out: &mut [f64]) {
        let stride = self.n_features + 1;
        for (k, o) in out.iter_mut().enumerate() {
            let w = &theta[k * stride..(k + 1) * stride];
            *o = row.dot(w) + w[self.n_features];
        }
    }

    fn objective(&self, theta: &[f64], c: f64, grad: Option<&mut [f64]>) -> f64 {
        let n = self.x.len() as f64;
        let stride = self.n_features + 1;
        let reg = 1.0 / (c * n);
        let mut z = vec![0.0; self.n_classes];
        let mut loss = 0.0;
        let mut grad = grad;
        if let Some(g) = grad.as_deref_mut() {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        for (row, &t) in self.x.iter().zip(self.y) {
            self.scores(theta, row, &mut z);
            loss += cross_entropy(&z, t);
            if let Some(g) = grad.as_deref_mut() {
                softmax_in_place(&mut z);
                z[t] -= 1.0;
                for (k, &err) in z.iter().enumerate() {
                    let gk = &mut g[k * stride..(k + 1) * stride];
                    for &(i, v) in row.entries() {
                        gk[i] += err * v / n;
                    }
                    gk[self.n_features] += err / n;
                }
            }
        }
        let mut penalty = 0.0;
        for k in 0..self.n_classes {
            let w = &theta[k * stride..k * stride + self.n_features];
            penalty += w.iter().map(|v| v * v).sum::<f64>();
            if let Some(g) = grad.as_deref_mut() {
                let gk = &mut g[k * stride..k * stride + self.n_features];
                for (gi, wi) in gk.iter_mut().zip(w) {
                    *gi += reg * wi;
                }
            }
        }
        loss / n + 0.5 * reg * penalty
    }

    fn lbfgs(&self, c: f64, max_iter: usize) -> Fit {
        let dim = self.dim();
        let mut theta = vec![0.0; dim];
        let mut grad = vec![0.0; dim];
        let mut f = self.objective(&theta, c, Some(&mut grad));
        let mut trace = vec![f];
        let mut s_hist: Vec<Vec<f64>> = Vec::new();
        let mut y_hist: Vec<Vec<f64>> = Vec::new();
        let mut converged = inf_norm(&grad) < LBFGS_TOL;
        let mut iterations = 0;
        let mut new_grad = vec![0.0; dim];
        let mut candidate = vec![0.0; dim];

        while !converged && iterations < max_iter {
            iterations += 1;
            let mut dir = two_loop(&grad, &s_hist, &y_hist);
            let mut slope: f64 = dot(&grad, &dir);
            if slope >= 0.0 {
                // not a descent direction: restart from steepest descent
                s_hist.clear();
                y_hist.clear();
                dir = grad.iter().map(|g| -g).collect();
                slope = -dot(&grad, &grad);
            }
            let mut step = if s_hist.is_empty() {
                (1.0 / inf_norm(&grad).max(1e-12)).min(1.0)
            } else {
                1.0
            };
            let mut accepted = None;
            for _ in 0..60 {
                for ((c_i, t), d) in candidate.iter_mut().zip(&theta).zip(&dir) {
                    *c_i = t + step * d;
                }
                let f_new = self.objective(&candidate, c, Some(&mut new_grad));
                if f_new <= f + 1e-4 * step * slope {
                    accepted = Some(f_new);
                    break;
                }
                step *= 0.5;
            }
            let Some(f_new) = accepted else {
                // line search exhausted: no further decrease available at this precision
                converged = inf_norm(&grad) < LBFGS_TOL * 1e3;
                break;
            };
            let s: Vec<f64> = candidate.iter().zip(&theta).map(|(a, b)| a - b).collect();
            let yv: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
            if dot(&s, &yv) > 1e-12 {
                if s_hist.len() == LBFGS_MEMORY {
                    s_hist.remove(0);
                    y_hist.remove(0);
                }
                s_hist.push(s);
                y_hist.push(yv);
            }
            std::mem::swap(&mut theta, &mut candidate);
            std::mem::swap(&mut grad, &mut new_grad);
            let decrease = f - f_new;
            f = f_new;
            trace.push(f);
            converged = inf_norm(&grad) < LBFGS_TOL || decrease <= 1e-14 * f.abs().max(1.0);
        }

        let stride = self.n_features + 1;
        let weights = (0..self.n_classes)
            .map(|k| theta[k * stride..k * stride + self.n_features].to_vec())
            .collect();
        let intercepts = (0..self.n_classes)
            .map(|k| theta[k * stride + self.n_features])
            .collect();
        Fit {
            weights,
            intercepts,
            converged,
            iterations,
            trace,
        }
    }

    fn sgd(&self, alpha: f64, penalty: Penalty, max_iter: usize, seed: u64) -> Fit {
        const TOL: f64 = 1e-3;
        const PATIENCE: usize = 5;
        let l1_ratio = match penalty {
            Penalty::L2 => 0.0,
            Penalty::L1 => 1.0,
            Penalty::Elasticnet => L1_RATIO,
        };
        let n = self.x.len();
        let k_count = self.n_classes;
        let mut w = vec![vec![0.0; self.n_features]; k_count];
        let mut q = vec![vec![0.0; self.n_features]; k_count];
        let mut b = vec![0.0; k_count];
        let mut wscale = 1.0;
        let mut u = 0.0;

        // step schedule: eta_t = 1 / (alpha (t0 + t))
        let typw = (1.0 / alpha.sqrt()).sqrt();
        let t0 = 1.0 / (alpha * typw);
        let mut t = 0.0f64;

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        let mut z = vec![0.0; k_count];
        let mut best = f64::INFINITY;
        let mut stale = 0;
        let mut trace = Vec::new();
        let mut converged = false;
        let mut epochs = 0;

        for _ in 0..max_iter {
            epochs += 1;
            order.shuffle(&mut rng);
            let mut sum_loss = 0.0;
            for &i in &order {
                let row = &self.x[i];
                let target = self.y[i];
                let eta = 1.0 / (alpha * (t0 + t));
                for k in 0..k_count {
                    z[k] = wscale * row.dot(&w[k]) + b[k];
                }
                sum_loss += cross_entropy(&z, target);
                softmax_in_place(&mut z);
                z[target] -= 1.0;

                wscale *= 1.0 - eta * alpha * (1.0 - l1_ratio);
                if wscale < 1e-9 {
                    for wk in w.iter_mut() {
                        wk.iter_mut().for_each(|v| *v *= wscale);
                    }
                    for qk in q.iter_mut() {
                        qk.iter_mut().for_each(|v| *v *= wscale);
                    }
                    wscale = 1.0;
                }
                for k in 0..k_count {
                    let step = eta * z[k] / wscale;
                    for &(j, v) in row.entries() {
                        w[k][j] -= step * v;
                    }
                    b[k] -= eta * z[k];
                }
                if l1_ratio > 0.0 {
                    u += eta * alpha * l1_ratio;
                    for k in 0..k_count {
                        for &(j, _) in row.entries() {
                            let before = w[k][j];
                            if before > 0.0 {
                                w[k][j] = (before - (u + q[k][j]) / wscale).max(0.0);
                            } else if before < 0.0 {
                                w[k][j] = (before + (u - q[k][j]) / wscale).min(0.0);
                            }
                            q[k][j] += wscale * (w[k][j] - before);
                        }
                    }
                }
                t += 1.0;
            }
            let epoch_loss = sum_loss / n as f64;
            trace.push(epoch_loss);
            if epoch_loss > best - TOL {
                stale += 1;
            } else {
                stale = 0;
            }
            best = best.min(epoch_loss);
            if stale >= PATIENCE {
                converged = true;
                break;
            }
        }
        for wk in w.iter_mut() {
            wk.iter_mut().for_each(|v| *v *= wscale);
        }
        Fit {
            weights: w,
            intercepts: b,
            converged,
            iterations: epochs,
            trace,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn inf_norm(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// L-BFGS two-loop recursion: returns `-H g`.
fn two_loop(grad: &[f64], s_hist: &[Vec<f64>], y_hist: &[Vec<f64>]) -> Vec<f64> {
    let mut q = grad.to_vec();
    let m = s_hist.len();
    let mut alphas = vec![0.0; m];
    let rhos: Vec<f64> = s_hist.iter().zip(y_hist).map(|(s, y)| 1.0 / dot(s, y)).collect();
    for i in (0..m).rev() {
        alphas[i] = rhos[i] * dot(&s_hist[i], &q);
        for (qj, yj) in q.iter_mut().zip(&y_hist[i]) {
            *qj -= alphas[i] * yj;
        }
    }
    if let (Some(s), Some(y)) = (s_hist.last(), y_hist.last()) {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for i in 0..m {
        let beta = rhos[i] * dot(&y_hist[i], &q);
        for (qj, sj) in q.iter_mut().zip(&s_hist[i]) {
            *qj += sj * (alphas[i] - beta);
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}
