//! A small self-consistent dataset: reviews, places, region assignments,
//! covariates and annotations, all in the on-disk input formats.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{collinear_covariates, state_cell};
use crate::annotation::{AttitudeLabel, LabeledExample};
use crate::corpus::{RegionAssignment, Review};
use crate::error::{Error, Result};
use crate::filter::{filter_review, FilterStats, KeywordMatcher, SearchList};
use crate::geostat::region::{write_covariates, CovariateRow, Level, COVARIATES, STATE_CODES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DemoConfig {
    pub states: usize,
    pub counties_per_state: usize,
    pub cbgs_per_county: usize,
    pub pois_per_cbg: usize,
    /// Typical reviews per POI, scaled by a per-county volume factor.
    pub reviews_per_poi: usize,
    /// Share of reviews carrying an accessibility sentence.
    pub access_share: f64,
    /// Accessibility reviews given two annotations.
    pub annotated: usize,
    /// Probability the second coder repeats the first coder's label.
    pub coder_agreement: f64,
    pub seed: u64,
}

impl Default for DemoConfig {
    fn default() -> Self {
        DemoConfig {
            states: 8,
            counties_per_state: 16,
            cbgs_per_county: 3,
            pois_per_cbg: 2,
            reviews_per_poi: 30,
            access_share: 0.3,
            annotated: 400,
            coder_agreement: 0.9,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoFiles {
    pub reviews: PathBuf,
    pub pois: PathBuf,
    pub regions: PathBuf,
    pub covariates: PathBuf,
    /// Two labels per item, with annotator ids.
    pub annotations: PathBuf,
    /// One adjudicated label per item.
    pub labeled: PathBuf,
}

impl DemoFiles {
    pub fn in_dir(dir: &Path) -> Self {
        DemoFiles {
            reviews: dir.join("reviews.jsonl"),
            pois: dir.join("pois.jsonl"),
            regions: dir.join("regions.csv"),
            covariates: dir.join("covariates.csv"),
            annotations: dir.join("annotations.jsonl"),
            labeled: dir.join("labeled.jsonl"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoSummary {
    pub files: DemoFiles,
    pub reviews: usize,
    pub access_reviews: usize,
    pub pois: usize,
    pub counties: usize,
    pub cbgs: usize,
    pub annotated: usize,
}

const FILLER: [&str; 24] = [
    "Food was good and came out hot.",
    "Prices were fair for the area.",
    "Long wait on a Saturday night.",
    "The staff were friendly and quick.",
    "Nice selection and clean shelves.",
    "Parking lot was a bit crowded.",
    "Would come back again.",
    "The coffee was strong and fresh.",
    "Checkout took forever today.",
    "Great views from the back patio.",
    "Rooms were quiet and comfortable.",
    "The music was too loud for me.",
    "Friendly manager who remembered our names.",
    "Closed earlier than the posted hours.",
    "Lots of options for kids.",
    "The line moved fast.",
    "Bathrooms could be cleaner.",
    "Good value overall.",
    "Open late which is handy.",
    "The place feels a little dated.",
    "Easy to find from the main road.",
    "Service was slow but polite.",
    "Loved the atmosphere.",
    "Not worth the drive.",
];

const POSITIVE: [&str; 8] = [
    "The wheelchair ramp at the entrance was smooth and wide.",
    "Plenty of handicap parking right by the door.",
    "Staff went out of their way to help my disabled father.",
    "Fully accessible restrooms that were clean and roomy.",
    "They welcomed my service dog without any fuss.",
    "Menus in braille were a lovely touch.",
    "A sturdy handrail on every stair made me feel safe.",
    "Great wheelchair seating with a perfect view.",
];

const NEGATIVE: [&str; 8] = [
    "No wheelchair access at the front so we had to go around back.",
    "The handicap spots were blocked by delivery trucks again.",
    "The bathroom is not accessible at all and the stall is tiny.",
    "They refused entry to my service dog which was upsetting.",
    "A broken curb ramp makes it impossible with a walker.",
    "Staff were rude to my disabled sister.",
    "Terrible wheelchair route with steps everywhere.",
    "Handicap parking is always full and nobody checks.",
];

const NEUTRAL: [&str; 6] = [
    "There is a wheelchair entrance on the north side.",
    "Handicap parking is in the lower lot.",
    "Accessible seating is available on request.",
    "They list an ada compliant room on their website.",
    "The disability desk is next to the lobby.",
    "I asked whether the patio was wheelchair friendly.",
];

const UNRELATED: [&str; 6] = [
    "Prices are accessible to everyone on a budget.",
    "I went in blind and loved everything.",
    "The location is easily accessible from the highway.",
    "We turned a deaf ear to the rain and had fun.",
    "Menu is accessible online before you order.",
    "Their chef is a blind taste test champion.",
];

const CATEGORIES: [&str; 14] = [
    "Restaurant",
    "Coffee shop",
    "Grocery store",
    "Pharmacy",
    "Hotel",
    "Hair salon",
    "Hospital",
    "Dentist",
    "Bus station",
    "Post office",
    "Apartment complex",
    "Public school",
    "Park",
    "Museum",
];

fn sentences(label: AttitudeLabel) -> &'static [&'static str] {
    match label {
        AttitudeLabel::Positive => &POSITIVE,
        AttitudeLabel::Negative => &NEGATIVE,
        AttitudeLabel::Neutral => &NEUTRAL,
        AttitudeLabel::Unrelated => &UNRELATED,
    }
}

/// A random accessibility sentence written with attitude `label`.
pub fn template(label: AttitudeLabel, rng: &mut impl Rng) -> &'static str {
    sentences(label).choose(rng).unwrap()
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

fn line<W: Write, T: Serialize>(w: &mut W, path: &Path, v: &T) -> Result<()> {
    serde_json::to_writer(&mut *w, v)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))
}

struct Region {
    id: String,
    state: String,
    lat: f64,
    lng: f64,
    /// Latent mean attitude of the county.
    lean: f64,
    /// Review volume multiplier; lognormal so some regions stay sparse.
    activity: f64,
}

fn standardized(v: &[f64]) -> Vec<f64> {
    let m = v.iter().sum::<f64>() / v.len() as f64;
    let sd = super::sample_sd(v).max(1e-12);
    v.iter().map(|x| (x - m) / sd).collect()
}

/// Writes the dataset into `dir` (created if missing). Output is a pure
/// function of `cfg`.
pub fn write_demo(dir: impl AsRef<Path>, cfg: &DemoConfig) -> Result<DemoSummary> {
    let dir = dir.as_ref();
    if cfg.states == 0 || cfg.states > STATE_CODES.len() || cfg.counties_per_state == 0 || cfg.cbgs_per_county == 0 {
        return Err(Error::invalid("demo needs at least one state, county and block group"));
    }
    if cfg.cbgs_per_county > 9 || cfg.counties_per_state > 999 {
        return Err(Error::invalid("at most 9 block groups per county and 999 counties per state"));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = DemoFiles::in_dir(dir);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let normal = Normal::new(0.0, 1.0).unwrap();

    let n_counties = cfg.states * cfg.counties_per_state;
    let n_cbgs = n_counties * cfg.cbgs_per_county;
    let (names, county_cols) = collinear_covariates(n_counties, cfg.seed ^ 0x5eed);
    let (_, cbg_cols) = collinear_covariates(n_cbgs, cfg.seed ^ 0xcb9);
    let col = |name: &str| names.iter().position(|n| n == name).unwrap();
    let poverty = standardized(&county_cols[col("Poverty")]);
    let educated = standardized(&county_cols[col("Highly-Educated")]);
    let older = standardized(&county_cols[col("Age over 65")]);
    let state_lean: Vec<f64> = (0..cfg.states).map(|_| 0.15 * normal.sample(&mut rng)).collect();

    let mut counties = Vec::with_capacity(n_counties);
    let mut cov_rows = Vec::with_capacity(n_counties + n_cbgs);
    let own = |cols: &[Vec<f64>], i: usize| -> BTreeMap<String, f64> {
        names
            .iter()
            .zip(cols)
            .filter(|(n, _)| !matches!(n.as_str(), "Avg. POI Score" | "Review density"))
            .map(|(n, c)| (n.clone(), c[i]))
            .collect()
    };
    for s in 0..cfg.states {
        let (a, b, c, d) = state_cell(s, cfg.states);
        for k in 0..cfg.counties_per_state {
            let i = s * cfg.counties_per_state + k;
            let lean = (0.25 - 0.2 * poverty[i] + 0.12 * educated[i] - 0.08 * older[i]
                + state_lean[s]
                + 0.1 * normal.sample(&mut rng))
            .clamp(-0.9, 0.9);
            let r = Region {
                id: format!("{:02}{:03}", s + 1, k + 1),
                state: STATE_CODES[s].to_string(),
                lat: rng.random_range(a..b),
                lng: rng.random_range(c..d),
                lean,
                activity: (1.2 * normal.sample(&mut rng)).exp(),
            };
            cov_rows.push(CovariateRow {
                region_id: r.id.clone(),
                level: Level::County,
                state: r.state.clone(),
                centroid_lat: r.lat,
                centroid_lng: r.lng,
                area_acres: rng.random_range(2.0e5..2.0e6f64).round(),
                values: own(&county_cols, i),
            });
            counties.push(r);
        }
    }
    let mut cbgs = Vec::with_capacity(n_cbgs);
    for (ci, county) in counties.iter().enumerate() {
        for g in 0..cfg.cbgs_per_county {
            let j = ci * cfg.cbgs_per_county + g;
            let r = Region {
                id: format!("{}000100{}", county.id, g + 1),
                state: county.state.clone(),
                lat: county.lat + rng.random_range(-0.05..0.05),
                lng: county.lng + rng.random_range(-0.05..0.05),
                lean: (county.lean + 0.1 * normal.sample(&mut rng)).clamp(-0.95, 0.95),
                activity: county.activity,
            };
            cov_rows.push(CovariateRow {
                region_id: r.id.clone(),
                level: Level::Cbg,
                state: r.state.clone(),
                centroid_lat: r.lat,
                centroid_lng: r.lng,
                area_acres: rng.random_range(200.0..5000.0f64).round(),
                values: own(&cbg_cols, j),
            });
            cbgs.push((ci, r));
        }
    }
    write_covariates(create(&files.covariates)?, &cov_rows)?;

    let mut poi_w = create(&files.pois)?;
    let mut assign = csv::Writer::from_writer(create(&files.regions)?);
    let mut review_w = create(&files.reviews)?;
    let matcher = KeywordMatcher::new(SearchList::parse(crate::filter::DEFAULT_SEARCH_LIST)?);
    let mut stats = FilterStats::new(matcher.list());
    let mut gold: Vec<LabeledExample> = Vec::new();
    let (mut n_pois, mut n_reviews, mut n_access) = (0usize, 0usize, 0usize);
    let t0: i64 = 1_546_300_800_000;

    for (ci, cbg) in &cbgs {
        let county = &counties[*ci];
        for p in 0..cfg.pois_per_cbg {
            n_pois += 1;
            let poi_id = format!("0x{:08x}:{p}", n_pois);
            let category = *CATEGORIES.choose(&mut rng).unwrap();
            let quality: f64 = rng.random_range(-0.3..0.3);
            let avg = (4.2 + quality + 0.3 * county.lean).clamp(1.0, 5.0);
            line(
                &mut poi_w,
                &files.pois,
                &serde_json::json!({
                    "gmap_id": poi_id,
                    "name": format!("{category} {n_pois}"),
                    "latitude": cbg.lat + rng.random_range(-0.01..0.01),
                    "longitude": cbg.lng + rng.random_range(-0.01..0.01),
                    "category": [category],
                    "avg_rating": (avg * 10.0).round() / 10.0,
                }),
            )?;
            assign
                .serialize(RegionAssignment {
                    poi_id: poi_id.clone(),
                    county_fips: county.id.clone(),
                    cbg_geoid: cbg.id.clone(),
                    state: cbg.state.clone(),
                })
                .map_err(Error::from)?;

            let volume = (cfg.reviews_per_poi as f64 * cbg.activity).round().max(1.0) as usize;
            for _ in 0..volume {
                n_reviews += 1;
                let review_id = format!("r{n_reviews:07}");
                let mut parts: Vec<&str> = Vec::with_capacity(4);
                for _ in 0..rng.random_range(1..=2) {
                    parts.push(FILLER.choose(&mut rng).unwrap());
                }
                let label = rng.random_bool(cfg.access_share).then(|| {
                    let lean = (cbg.lean + quality).clamp(-1.0, 1.0);
                    let u: f64 = rng.random();
                    if u < 0.1 {
                        AttitudeLabel::Unrelated
                    } else if u < 0.28 {
                        AttitudeLabel::Neutral
                    } else if u < 0.28 + 0.72 * (1.0 + lean) / 2.0 {
                        AttitudeLabel::Positive
                    } else {
                        AttitudeLabel::Negative
                    }
                });
                if let Some(l) = label {
                    let at = rng.random_range(0..=parts.len());
                    parts.insert(at, sentences(l).choose(&mut rng).unwrap());
                }
                if rng.random_bool(0.5) {
                    parts.push(FILLER.choose(&mut rng).unwrap());
                }
                let text = parts.join(" ");
                let rating = match label {
                    Some(AttitudeLabel::Positive) => rng.random_range(4..=5),
                    Some(AttitudeLabel::Negative) => rng.random_range(1..=3),
                    _ => rng.random_range(2..=5),
                };
                let time = t0 + rng.random_range(0..126_230_400_000i64);
                let review = Review {
                    review_id: review_id.clone(),
                    poi_id: poi_id.clone(),
                    rating: Some(rating),
                    text,
                    timestamp: Some(time),
                };
                line(
                    &mut review_w,
                    &files.reviews,
                    &serde_json::json!({
                        "review_id": review.review_id,
                        "gmap_id": review.poi_id,
                        "rating": review.rating,
                        "text": review.text,
                        "time": review.timestamp,
                    }),
                )?;
                if let Some(l) = label {
                    n_access += 1;
                    if gold.len() < cfg.annotated && rng.random_bool(0.5) {
                        let snippet = filter_review(&review, &matcher, &mut stats)
                            .ok_or_else(|| Error::invalid(format!("template without keyword in {review_id}")))?;
                        gold.push(LabeledExample {
                            review_id,
                            targeted_text: snippet.targeted_text,
                            label: l,
                            annotator_id: None,
                        });
                    }
                }
            }
        }
    }
    poi_w.flush().map_err(|e| Error::io(&files.pois, e))?;
    review_w.flush().map_err(|e| Error::io(&files.reviews, e))?;
    assign.flush().map_err(|e| Error::io(&files.regions, e))?;

    let mut ann_w = create(&files.annotations)?;
    for g in &gold {
        let second = if rng.random_bool(cfg.coder_agreement) {
            g.label
        } else {
            *AttitudeLabel::ALL.choose(&mut rng).unwrap()
        };
        for (coder, label) in [("coder_a", g.label), ("coder_b", second)] {
            line(
                &mut ann_w,
                &files.annotations,
                &LabeledExample {
                    annotator_id: Some(coder.to_string()),
                    label,
                    ..g.clone()
                },
            )?;
        }
    }
    ann_w.flush().map_err(|e| Error::io(&files.annotations, e))?;
    crate::jsonl::write_all(&files.labeled, &gold)?;

    debug_assert_eq!(COVARIATES.len(), names.len());
    Ok(DemoSummary {
        files,
        reviews: n_reviews,
        access_reviews: n_access,
        pois: n_pois,
        counties: n_counties,
        cbgs: n_cbgs,
        annotated: gold.len(),
    })
}
