//! Region-level statistics: sentiment tables, correlations, collinearity
//! pruning, additive regression, influence pruning and threshold sweeps.

pub mod basis;
pub mod gam;
pub mod influence;
pub mod region;
pub mod sensitivity;
pub mod stats;
pub mod vif;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use gam::{fit_gam, format_report, GamData, GamFit, GamSpec, Smoothing};
pub use influence::{cooks_distances, cooks_threshold, prune_influential, PruneOutcome};
pub use region::{
    build_regions, choropleth_export, read_covariates, CovariateRow, Level, RegionOptions, RegionRecord, COVARIATES,
};
pub use sensitivity::{threshold_sensitivity, SensitivityTable};
pub use stats::{engagement_contrast, pearson, sentiment_correlations, EngagementContrast};
pub use vif::{compute_vif, vif_prune, VifReport};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegressOptions {
    /// Candidate covariates before collinearity pruning.
    pub covariates: Vec<String>,
    pub vif_threshold: f64,
    pub spec: GamSpec,
    /// Drop influential regions and refit once.
    pub prune: bool,
}

impl Default for RegressOptions {
    fn default() -> Self {
        RegressOptions {
            covariates: COVARIATES.iter().map(|s| s.to_string()).collect(),
            vif_threshold: vif::DEFAULT_VIF_THRESHOLD,
            spec: GamSpec::default(),
            prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionOutcome {
    pub vif: VifReport,
    pub initial: GamFit,
    pub pruning: Option<PruneOutcome>,
    /// The refit after pruning, or the initial fit.
    pub fit: GamFit,
    pub metadata: BTreeMap<String, String>,
}

/// Collinearity pruning, fit, influence pruning and refit over the included
/// regions.
pub fn regress(regions: &[RegionRecord], opts: &RegressOptions) -> Result<RegressionOutcome> {
    let data = GamData::from_regions(regions, &opts.covariates)?;
    let vif = vif_prune(&data.names, &data.columns, opts.vif_threshold)?;
    let data = data.select(&vif.retained)?;
    let initial = fit_gam(&data, &opts.spec)?;
    let pruning = if opts.prune {
        Some(prune_influential(&data, &opts.spec, &initial)?)
    } else {
        None
    };
    let fit = pruning.as_ref().map_or_else(|| initial.clone(), |p| p.refit.clone());
    let metadata = BTreeMap::from([
        ("link".to_string(), "identity, Gaussian response".to_string()),
        ("standardization".to_string(), "covariates centered and scaled by sample sd".to_string()),
        ("smoothing".to_string(), "GCV, coordinate-wise golden section on log lambda".to_string()),
        (
            "spatial_term".to_string(),
            format!("tensor interaction of region centroids, {} knots per margin", opts.spec.knots),
        ),
        ("centroids".to_string(), "as supplied in the covariate table".to_string()),
        ("review_density".to_string(), region::REVIEW_DENSITY_UNITS.to_string()),
        ("sentiment_mapping".to_string(), crate::poianalysis::SENTIMENT_MAPPING.to_string()),
        ("influence".to_string(), "Cook's distance > 4/(n-k-1), single pass".to_string()),
    ]);
    Ok(RegressionOutcome {
        vif,
        initial,
        pruning,
        fit,
        metadata,
    })
}
