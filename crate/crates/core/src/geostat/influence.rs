//! Cook's distance on a penalized fit and single-pass pruning.

use serde::{Deserialize, Serialize};

use super::gam::{fit_gam, GamData, GamFit, GamSpec};
use crate::error::{Error, Result};

/// `4 / (n - k - 1)` with `k` linear covariates.
pub fn cooks_threshold(n: usize, k: usize) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::InsufficientData {
            required: k + 2,
            available: n,
        });
    }
    Ok(4.0 / (n - k - 1) as f64)
}

/// `D_i = e_i² h_i / (p σ² (1 - h_i)²)` with `p` the total effective degrees
/// of freedom and `h_i` the influence-matrix diagonal.
pub fn cooks_distances(fit: &GamFit) -> Vec<f64> {
    fit.residuals
        .iter()
        .zip(&fit.leverage)
        .map(|(&e, &h)| {
            if h >= 1.0 {
                f64::INFINITY
            } else {
                e * e * h / (fit.total_edf * fit.sigma2 * (1.0 - h) * (1.0 - h))
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruneOutcome {
    pub threshold: f64,
    /// Positions in the input data, ascending.
    pub removed: Vec<usize>,
    pub removed_ids: Vec<String>,
    pub max_distance: f64,
    pub refit: GamFit,
}

/// Removes observations whose distance exceeds the threshold and refits
/// once. With nothing removed the refit is the original fit.
pub fn prune_influential(data: &GamData, spec: &GamSpec, fit: &GamFit) -> Result<PruneOutcome> {
    if fit.residuals.len() != data.n() {
        return Err(Error::invalid("fit does not belong to these data"));
    }
    let threshold = cooks_threshold(data.n(), data.names.len())?;
    let d = cooks_distances(fit);
    let removed: Vec<usize> = (0..d.len()).filter(|&i| d[i] > threshold).collect();
    let max_distance = d.iter().cloned().fold(0.0, f64::max);
    let refit = if removed.is_empty() {
        fit.clone()
    } else {
        let keep: Vec<usize> = (0..d.len()).filter(|&i| d[i] <= threshold).collect();
        let mut f = fit_gam(&data.subset(&keep), spec)?;
        f.removed_outliers = removed.len();
        f
    };
    Ok(PruneOutcome {
        threshold,
        removed_ids: removed.iter().map(|&i| data.ids[i].clone()).collect(),
        removed,
        max_distance,
        refit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_arithmetic() {
        assert!((cooks_threshold(200, 15).unwrap() - 4.0 / 184.0).abs() < 1e-18);
        assert!(cooks_threshold(5, 4).is_err());
    }
}
