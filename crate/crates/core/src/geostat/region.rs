//! Region tables: covariates joined with snippet sentiment.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotation::AttitudeLabel;
use crate::classify::LabeledSnippet;
use crate::corpus::Poi;
use crate::error::{Error, Result};

/// Candidate covariates, in report order.
pub const COVARIATES: [&str; 19] = [
    "Population Density",
    "Employment Density",
    "Poverty",
    "Rural Population",
    "Urban Population",
    "Median Income",
    "Highly-Educated",
    "Male",
    "Age 18-44",
    "Age 45-64",
    "Age over 65",
    "White",
    "Asian",
    "African American",
    "Hispanic",
    "Others",
    "Disability",
    "Avg. POI Score",
    "Review density",
];

/// Shares in percent; values must lie in `[0, 100]`.
pub const PERCENT_COVARIATES: [&str; 14] = [
    "Poverty",
    "Rural Population",
    "Urban Population",
    "Highly-Educated",
    "Male",
    "Age 18-44",
    "Age 45-64",
    "Age over 65",
    "White",
    "Asian",
    "African American",
    "Hispanic",
    "Others",
    "Disability",
];

pub const AVG_POI_SCORE: &str = "Avg. POI Score";
pub const REVIEW_DENSITY: &str = "Review density";

/// Columns every covariate file carries besides the covariates.
pub const KEY_COLUMNS: [&str; 6] = ["region_id", "level", "state", "centroid_lat", "centroid_lng", "area_acres"];

pub const REVIEW_DENSITY_UNITS: &str = "accessibility reviews (unrelated excluded) per acre";

/// Postal codes of the states, DC and Puerto Rico.
pub const STATE_CODES: [&str; 52] = [
    "AL", "AK", "AZ", "AR", "CA", "CO", "CT", "DE", "DC", "FL", "GA", "HI", "ID", "IL", "IN", "IA", "KS", "KY",
    "LA", "ME", "MD", "MA", "MI", "MN", "MS", "MO", "MT", "NE", "NV", "NH", "NJ", "NM", "NY", "NC", "ND", "OH",
    "OK", "OR", "PA", "RI", "SC", "SD", "TN", "TX", "UT", "VT", "VA", "WA", "WV", "WI", "WY", "PR",
];

pub fn is_state_code(s: &str) -> bool {
    STATE_CODES.contains(&s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    County,
    Cbg,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::County => "county",
            Level::Cbg => "cbg",
        }
    }

    fn id_len(self) -> usize {
        match self {
            Level::County => 5,
            Level::Cbg => 12,
        }
    }

    /// The POI's region id at this level, if assigned.
    pub fn region_of(self, poi: &Poi) -> Option<&str> {
        match self {
            Level::County => poi.county_fips.as_deref(),
            Level::Cbg => poi.cbg_geoid.as_deref(),
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "county" => Ok(Level::County),
            "cbg" => Ok(Level::Cbg),
            _ => Err(Error::invalid(format!("unknown region level `{s}` (expected county or cbg)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovariateRow {
    pub region_id: String,
    pub level: Level,
    pub state: String,
    pub centroid_lat: f64,
    pub centroid_lng: f64,
    pub area_acres: f64,
    pub values: BTreeMap<String, f64>,
}

/// Reads the covariate file. Every covariate except the two review-derived
/// ones is required; unknown columns are rejected.
pub fn read_covariates(path: impl AsRef<Path>) -> Result<Vec<CovariateRow>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_covariates(file).map_err(|e| match e {
        Error::Invalid(m) => Error::invalid(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_covariates<R: std::io::Read>(reader: R) -> Result<Vec<CovariateRow>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    for h in headers.iter() {
        if !KEY_COLUMNS.contains(&h) && !COVARIATES.contains(&h) {
            return Err(Error::invalid(format!("unknown covariate column `{h}`")));
        }
    }
    let mut key_idx = [0usize; 6];
    for (i, k) in KEY_COLUMNS.iter().enumerate() {
        key_idx[i] = col(k).ok_or_else(|| Error::invalid(format!("missing column `{k}`")))?;
    }
    let mut cov_idx = Vec::new();
    for name in COVARIATES {
        match col(name) {
            Some(i) => cov_idx.push((name, i)),
            None if name == AVG_POI_SCORE || name == REVIEW_DENSITY => {}
            None => return Err(Error::invalid(format!("missing covariate column `{name}`"))),
        }
    }

    let mut rows = Vec::new();
    let mut seen = HashMap::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = n + 2;
        let num = |i: usize, what: &str| -> Result<f64> {
            rec[i]
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("`{what}` is not a finite number: `{}`", &rec[i]),
                })
        };
        let level: Level = rec[key_idx[1]].parse()?;
        let region_id = rec[key_idx[0]].to_string();
        if region_id.len() != level.id_len() || !region_id.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                line,
                message: format!("region_id `{region_id}` is not a {}-digit {level} code", level.id_len()),
            });
        }
        let state = rec[key_idx[2]].to_ascii_uppercase();
        if !is_state_code(&state) {
            return Err(Error::UnknownState(state));
        }
        let area_acres = num(key_idx[5], "area_acres")?;
        if area_acres <= 0.0 {
            return Err(Error::Parse {
                line,
                message: "area_acres must be positive".into(),
            });
        }
        let mut values = BTreeMap::new();
        for &(name, i) in &cov_idx {
            let v = num(i, name)?;
            if PERCENT_COVARIATES.contains(&name) && !(0.0..=100.0).contains(&v) {
                return Err(Error::Parse {
                    line,
                    message: format!("`{name}` = {v} outside [0, 100]"),
                });
            }
            values.insert(name.to_string(), v);
        }
        if seen.insert((region_id.clone(), level), line).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate {level} region `{region_id}`"),
            });
        }
        rows.push(CovariateRow {
            region_id,
            level,
            state,
            centroid_lat: num(key_idx[3], "centroid_lat")?,
            centroid_lng: num(key_idx[4], "centroid_lng")?,
            area_acres,
            values,
        });
    }
    Ok(rows)
}

/// Writes covariate rows in the file format [`read_covariates`] expects.
pub fn write_covariates<W: Write>(w: W, rows: &[CovariateRow]) -> Result<()> {
    let names: Vec<&str> = COVARIATES
        .into_iter()
        .filter(|n| !is_derived(n) || (!rows.is_empty() && rows.iter().all(|r| r.values.contains_key(*n))))
        .collect();
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(KEY_COLUMNS.iter().copied().chain(names.iter().copied()))?;
    for r in rows {
        let mut rec = vec![
            r.region_id.clone(),
            r.level.to_string(),
            r.state.clone(),
            r.centroid_lat.to_string(),
            r.centroid_lng.to_string(),
            r.area_acres.to_string(),
        ];
        for n in &names {
            let v = r
                .values
                .get(*n)
                .ok_or_else(|| Error::invalid(format!("region {} lacks `{n}`", r.region_id)))?;
            rec.push(v.to_string());
        }
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<covariates>", e))
}

fn is_derived(name: &str) -> bool {
    name == AVG_POI_SCORE || name == REVIEW_DENSITY
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionRecord {
    pub region_id: String,
    pub level: Level,
    pub state: String,
    pub centroid_lat: f64,
    pub centroid_lng: f64,
    /// Snippets other than Unrelated.
    pub n_reviews: usize,
    pub n_positive: usize,
    pub n_neutral: usize,
    pub n_negative: usize,
    /// Mean label sentiment; `None` without reviews.
    pub sentiment: Option<f64>,
    /// `n_reviews >= min_reviews`.
    pub included: bool,
    pub covariates: BTreeMap<String, f64>,
}

impl RegionRecord {
    pub fn covariate(&self, name: &str) -> Option<f64> {
        self.covariates.get(name).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionOptions {
    pub level: Level,
    pub min_reviews: usize,
}

impl Default for RegionOptions {
    fn default() -> Self {
        RegionOptions {
            level: Level::County,
            min_reviews: 10,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionBuildStats {
    pub regions: usize,
    pub included: usize,
    pub snippets_placed: usize,
    /// Snippets whose POI is unknown or has no region.
    pub snippets_unplaced: usize,
    /// Regions with snippets but no covariate row, sorted.
    pub regions_without_covariates: Vec<String>,
}

/// One record per covariate row at `opts.level`, sorted by region id.
///
/// `Avg. POI Score` (mean `avg_score` of the region's POIs) and
/// `Review density` (`n_reviews / area_acres`) are derived unless the
/// covariate file supplies them.
pub fn build_regions(
    snippets: &[LabeledSnippet],
    pois: &[Poi],
    covariates: &[CovariateRow],
    opts: RegionOptions,
) -> Result<(Vec<RegionRecord>, RegionBuildStats)> {
    let level = opts.level;
    let rows: BTreeMap<&str, &CovariateRow> = covariates
        .iter()
        .filter(|r| r.level == level)
        .map(|r| (r.region_id.as_str(), r))
        .collect();

    let mut poi_region: HashMap<&str, &str> = HashMap::new();
    let mut scores: HashMap<&str, (f64, usize)> = HashMap::new();
    for p in pois {
        let Some(region) = level.region_of(p) else { continue };
        if let (Some(row), Some(state)) = (rows.get(region), p.state.as_deref()) {
            if !row.state.eq_ignore_ascii_case(state) {
                return Err(Error::invalid(format!(
                    "POI {} is assigned to state {state} but region {region} is in {}",
                    p.poi_id, row.state
                )));
            }
        }
        poi_region.insert(p.poi_id.as_str(), region);
        if let Some(s) = p.avg_score {
            let e = scores.entry(region).or_insert((0.0, 0));
            e.0 += s;
            e.1 += 1;
        }
    }

    // region -> [pos, neu, neg], plus unplaced count
    let (tallies, unplaced) = snippets
        .par_iter()
        .fold(
            || (HashMap::<&str, [usize; 3]>::new(), 0usize),
            |(mut acc, mut lost), s| {
                match poi_region.get(s.snippet.poi_id.as_str()) {
                    None => lost += 1,
                    Some(region) => {
                        let slot = match s.label {
                            AttitudeLabel::Positive => Some(0),
                            AttitudeLabel::Neutral => Some(1),
                            AttitudeLabel::Negative => Some(2),
                            AttitudeLabel::Unrelated => None,
                        };
                        let t = acc.entry(region).or_default();
                        if let Some(i) = slot {
                            t[i] += 1;
                        }
                    }
                }
                (acc, lost)
            },
        )
        .reduce(
            || (HashMap::new(), 0),
            |(mut a, la), (b, lb)| {
                for (k, v) in b {
                    let t = a.entry(k).or_default();
                    for i in 0..3 {
                        t[i] += v[i];
                    }
                }
                (a, la + lb)
            },
        );

    let mut stats = RegionBuildStats {
        snippets_placed: snippets.len() - unplaced,
        snippets_unplaced: unplaced,
        ..Default::default()
    };
    stats.regions_without_covariates = tallies
        .keys()
        .filter(|r| !rows.contains_key(*r))
        .map(|r| r.to_string())
        .collect();
    stats.regions_without_covariates.sort();

    let mut out = Vec::with_capacity(rows.len());
    for (id, row) in rows {
        let [pos, neu, neg] = tallies.get(id).copied().unwrap_or_default();
        let n = pos + neu + neg;
        let mut cov = row.values.clone();
        if !cov.contains_key(AVG_POI_SCORE) {
            if let Some(&(sum, k)) = scores.get(id) {
                cov.insert(AVG_POI_SCORE.to_string(), sum / k as f64);
            }
        }
        cov.entry(REVIEW_DENSITY.to_string())
            .or_insert(n as f64 / row.area_acres);
        let included = n >= opts.min_reviews && n > 0;
        stats.included += usize::from(included);
        out.push(RegionRecord {
            region_id: id.to_string(),
            level,
            state: row.state.clone(),
            centroid_lat: row.centroid_lat,
            centroid_lng: row.centroid_lng,
            n_reviews: n,
            n_positive: pos,
            n_neutral: neu,
            n_negative: neg,
            sentiment: (n > 0).then(|| (pos as f64 - neg as f64) / n as f64),
            included,
            covariates: cov,
        });
    }
    stats.regions = out.len();
    Ok((out, stats))
}

/// Re-applies the review threshold.
pub fn with_threshold(regions: &[RegionRecord], min_reviews: usize) -> Vec<RegionRecord> {
    regions
        .iter()
        .map(|r| RegionRecord {
            included: r.n_reviews >= min_reviews && r.n_reviews > 0,
            ..r.clone()
        })
        .collect()
}

pub fn write_regions(path: impl AsRef<Path>, regions: &[RegionRecord]) -> Result<()> {
    crate::jsonl::write_all(path, regions)
}

pub fn read_regions(path: impl AsRef<Path>) -> Result<Vec<RegionRecord>> {
    crate::jsonl::read_all(path)
}

/// `region_id,level,sentiment,n_reviews,included`; excluded regions get an
/// empty sentiment cell.
pub fn choropleth_export<W: Write>(w: W, regions: &[RegionRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["region_id", "level", "sentiment", "n_reviews", "included"])?;
    for r in regions {
        let sentiment = match (r.included, r.sentiment) {
            (true, Some(s)) => s.to_string(),
            _ => String::new(),
        };
        wtr.write_record([
            r.region_id.as_str(),
            r.level.as_str(),
            &sentiment,
            &r.n_reviews.to_string(),
            if r.included { "true" } else { "false" },
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<choropleth>", e))
}
