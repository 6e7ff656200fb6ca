//! Coefficient trajectories over a range of minimum-review thresholds.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::gam::{fit_gam, GamData, GamSpec, INTERCEPT};
use super::region::{with_threshold, RegionRecord};
use crate::error::{Error, Result};

/// Thresholds from which the stability metric is measured.
pub const STABLE_FROM: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub threshold: usize,
    pub n: usize,
    /// Intercept then slopes; `None` when the threshold was skipped.
    pub coefficients: Option<Vec<f64>>,
    pub adj_r_squared: Option<f64>,
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityTable {
    pub names: Vec<String>,
    pub rows: Vec<SensitivityRow>,
    /// Largest coefficient change between consecutive fitted thresholds, both
    /// at least [`STABLE_FROM`].
    pub stability: Option<f64>,
}

/// `0, step, 2·step, ..., max`.
pub fn threshold_grid(max: usize, step: usize) -> Vec<usize> {
    (0..=max).step_by(step.max(1)).collect()
}

/// Fits the model at every threshold (in parallel). Thresholds leaving
/// fewer than `min_regions` regions, or an unfittable sample, are skipped
/// and logged. A threshold of 0 still needs one review for a sentiment.
pub fn threshold_sensitivity(
    regions: &[RegionRecord],
    thresholds: &[usize],
    names: &[String],
    spec: &GamSpec,
    min_regions: usize,
) -> Result<SensitivityTable> {
    if thresholds.is_empty() {
        return Err(Error::invalid("no thresholds given"));
    }
    let rows: Vec<Result<SensitivityRow>> = thresholds
        .par_iter()
        .map(|&t| {
            let data = GamData::from_regions(&with_threshold(regions, t), names)?;
            let n = data.n();
            let skip = |why: String| {
                log::warn!("sensitivity: threshold {t} skipped ({why})");
                Ok(SensitivityRow {
                    threshold: t,
                    n,
                    coefficients: None,
                    adj_r_squared: None,
                    skipped: Some(why),
                })
            };
            if n < min_regions {
                return skip(format!("{n} regions, need {min_regions}"));
            }
            match fit_gam(&data, spec) {
                Ok(fit) => Ok(SensitivityRow {
                    threshold: t,
                    n,
                    coefficients: Some(fit.coefficients.iter().map(|c| c.estimate).collect()),
                    adj_r_squared: Some(fit.adj_r_squared),
                    skipped: None,
                }),
                Err(e @ (Error::InsufficientData { .. } | Error::Singular { .. })) => skip(e.to_string()),
                Err(e) => Err(e),
            }
        })
        .collect();
    let rows: Vec<SensitivityRow> = rows.into_iter().collect::<Result<_>>()?;

    let fitted: Vec<&SensitivityRow> = rows
        .iter()
        .filter(|r| r.threshold >= STABLE_FROM && r.coefficients.is_some())
        .collect();
    let stability = fitted
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].coefficients.as_ref().unwrap(), w[1].coefficients.as_ref().unwrap());
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .reduce(f64::max);

    let mut all_names = vec![INTERCEPT.to_string()];
    all_names.extend(names.iter().cloned());
    Ok(SensitivityTable {
        names: all_names,
        rows,
        stability,
    })
}

/// `threshold,n,<coefficient columns>`; skipped thresholds leave the
/// coefficient cells empty.
pub fn write_sensitivity_csv<W: Write>(w: W, table: &SensitivityTable) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["threshold".to_string(), "n".to_string(), "adj_r_squared".to_string()];
    header.extend(table.names.iter().cloned());
    wtr.write_record(&header)?;
    for r in &table.rows {
        let mut rec = vec![
            r.threshold.to_string(),
            r.n.to_string(),
            r.adj_r_squared.map(|v| v.to_string()).unwrap_or_default(),
        ];
        match &r.coefficients {
            Some(c) => rec.extend(c.iter().map(|v| v.to_string())),
            None => rec.extend(std::iter::repeat_n(String::new(), table.names.len())),
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<sensitivity>", e))
}
