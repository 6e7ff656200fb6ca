//! Univariate statistics over region tables.

use serde::{Deserialize, Serialize};

use super::region::RegionRecord;
use crate::error::{Error, Result};

/// Product-moment correlation, accumulated with running co-moments.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("pearson: lengths {} and {} differ", x.len(), y.len())));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData {
            required: 3,
            available: x.len(),
        });
    }
    let (mut mx, mut my, mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        let n = (i + 1) as f64;
        let dx = a - mx;
        let dy = b - my;
        mx += dx / n;
        my += dy / n;
        sxx += dx * (a - mx);
        syy += dy * (b - my);
        sxy += dx * (b - my);
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(Error::invalid("pearson: zero variance"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn sample_var(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64
}

fn column(regions: &[&RegionRecord], name: &str) -> Result<Vec<f64>> {
    regions
        .iter()
        .map(|r| {
            r.covariate(name)
                .ok_or_else(|| Error::invalid(format!("region {} lacks covariate `{name}`", r.region_id)))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub covariate: String,
    pub r: f64,
    pub n: usize,
}

/// Correlation of each covariate with sentiment over included regions, in
/// `names` order. Constant covariates are skipped.
pub fn sentiment_correlations(regions: &[RegionRecord], names: &[&str]) -> Result<Vec<Correlation>> {
    let used: Vec<&RegionRecord> = regions.iter().filter(|r| r.included && r.sentiment.is_some()).collect();
    let y: Vec<f64> = used.iter().filter_map(|r| r.sentiment).collect();
    let mut out = Vec::new();
    for &name in names {
        let x = column(&used, name)?;
        match pearson(&x, &y) {
            Ok(r) => out.push(Correlation {
                covariate: name.to_string(),
                r,
                n: y.len(),
            }),
            Err(Error::Invalid(_)) => log::warn!("correlation: `{name}` or sentiment is constant, skipped"),
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContrastRow {
    pub covariate: String,
    pub mean_with: f64,
    pub mean_without: f64,
    pub difference: f64,
    /// Difference over the pooled standard deviation; `None` when both
    /// groups are constant.
    pub standardized: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngagementContrast {
    pub min_reviews: usize,
    pub n_with: usize,
    pub n_without: usize,
    pub rows: Vec<ContrastRow>,
}

/// Compares regions with more than `min_reviews` reviews against the rest.
pub fn engagement_contrast(regions: &[RegionRecord], min_reviews: usize, names: &[&str]) -> Result<EngagementContrast> {
    let (with, without): (Vec<&RegionRecord>, Vec<&RegionRecord>) =
        regions.iter().partition(|r| r.n_reviews > min_reviews);
    for g in [&with, &without] {
        if g.is_empty() {
            return Err(Error::InsufficientData {
                required: 1,
                available: 0,
            });
        }
    }
    let mut rows = Vec::with_capacity(names.len());
    for &name in names {
        let a = column(&with, name)?;
        let b = column(&without, name)?;
        let (ma, mb) = (mean(&a), mean(&b));
        let pooled = ((sample_var(&a) + sample_var(&b)) / 2.0).sqrt();
        let difference = ma - mb;
        rows.push(ContrastRow {
            covariate: name.to_string(),
            mean_with: ma,
            mean_without: mb,
            difference,
            standardized: (pooled > 0.0).then(|| difference / pooled),
        });
    }
    Ok(EngagementContrast {
        min_reviews,
        n_with: with.len(),
        n_without: without.len(),
        rows,
    })
}
