//! Seeded synthetic data with known ground truth, for tests, benchmarks
//! and demos.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::geostat::region::{Level, RegionRecord, COVARIATES, STATE_CODES};
use crate::geostat::GamData;

pub mod demo;

/// Latitude and longitude box the synthetic states tile.
pub const LAT_RANGE: (f64, f64) = (25.0, 49.0);
pub const LNG_RANGE: (f64, f64) = (-124.0, -67.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    Gaussian,
    /// Uniform with the same standard deviation; bounded by `√3 σ`.
    Uniform,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GamSynth {
    pub n: usize,
    pub k: usize,
    pub n_states: usize,
    pub noise_sd: f64,
    pub noise: Noise,
    /// Distribution of the covariates around their centers.
    pub covariates: Noise,
    /// Amplitude of the spatial interaction surface; 0 disables it.
    pub smooth_amplitude: f64,
    pub state_sd: f64,
    pub seed: u64,
}

impl Default for GamSynth {
    fn default() -> Self {
        GamSynth {
            n: 5000,
            k: 15,
            n_states: 48,
            noise_sd: 0.1,
            noise: Noise::Gaussian,
            covariates: Noise::Gaussian,
            smooth_amplitude: 0.2,
            state_sd: 0.2,
            seed: 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GamTruth {
    pub intercept: f64,
    /// Slopes on the raw covariate scale.
    pub beta: Vec<f64>,
    pub state_effects: Vec<(String, f64)>,
}

impl GamTruth {
    /// Slopes on the standardized scale the fit reports, `βⱼ · sd(xⱼ)`.
    pub fn standardized(&self, data: &GamData) -> Vec<f64> {
        self.beta
            .iter()
            .zip(&data.columns)
            .map(|(b, c)| b * sample_sd(c))
            .collect()
    }
}

pub fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// Grid cell `(lat_lo, lat_hi, lng_lo, lng_hi)` of state `s` out of `count`.
pub fn state_cell(s: usize, count: usize) -> (f64, f64, f64, f64) {
    let cols = (count as f64).sqrt().ceil() as usize;
    let rows = count.div_ceil(cols);
    let (r, c) = (s / cols, s % cols);
    let dlat = (LAT_RANGE.1 - LAT_RANGE.0) / rows as f64;
    let dlng = (LNG_RANGE.1 - LNG_RANGE.0) / cols as f64;
    (
        LAT_RANGE.0 + r as f64 * dlat,
        LAT_RANGE.0 + (r + 1) as f64 * dlat,
        LNG_RANGE.0 + c as f64 * dlng,
        LNG_RANGE.0 + (c + 1) as f64 * dlng,
    )
}

/// Pure interaction surface over the box: a product of two functions that
/// each average to zero across it.
pub fn spatial_surface(lat: f64, lng: f64, amplitude: f64) -> f64 {
    let u = (lat - LAT_RANGE.0) / (LAT_RANGE.1 - LAT_RANGE.0);
    let v = (lng - LNG_RANGE.0) / (LNG_RANGE.1 - LNG_RANGE.0);
    amplitude * (std::f64::consts::TAU * u).sin() * (std::f64::consts::TAU * v).sin()
}

/// Unit-variance draw.
fn draw(kind: Noise, rng: &mut ChaCha8Rng) -> f64 {
    match kind {
        Noise::Gaussian => Normal::new(0.0, 1.0).unwrap().sample(rng),
        Noise::Uniform => rng.random_range(-3f64.sqrt()..3f64.sqrt()),
    }
}

/// `y = β₀ + Xβ + f(lat, lng) + state + ε`, regions dealt round-robin to
/// states and placed uniformly in their state's cell.
pub fn gam_data(cfg: &GamSynth) -> (GamData, GamTruth) {
    assert!(cfg.n_states >= 1 && cfg.n_states <= STATE_CODES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let intercept = -0.05;
    let beta: Vec<f64> = (0..cfg.k).map(|_| rng.random_range(-0.3..0.3)).collect();
    let centers: Vec<f64> = (0..cfg.k).map(|_| rng.random_range(-5.0..5.0)).collect();
    let scales: Vec<f64> = (0..cfg.k).map(|_| rng.random_range(0.5..3.0)).collect();
    let state_effects: Vec<(String, f64)> = (0..cfg.n_states)
        .map(|s| (STATE_CODES[s].to_string(), cfg.state_sd * std_normal.sample(&mut rng)))
        .collect();

    let mut columns = vec![Vec::with_capacity(cfg.n); cfg.k];
    let (mut y, mut lat, mut lng, mut state) = (vec![], vec![], vec![], vec![]);
    for i in 0..cfg.n {
        let s = i % cfg.n_states;
        let (a, b, c, d) = state_cell(s, cfg.n_states);
        let la = rng.random_range(a..b);
        let lo = rng.random_range(c..d);
        let mut v = intercept + state_effects[s].1 + spatial_surface(la, lo, cfg.smooth_amplitude);
        for j in 0..cfg.k {
            let x = centers[j] + scales[j] * draw(cfg.covariates, &mut rng);
            columns[j].push(x);
            v += beta[j] * x;
        }
        v += cfg.noise_sd * draw(cfg.noise, &mut rng);
        y.push(v);
        lat.push(la);
        lng.push(lo);
        state.push(state_effects[s].0.clone());
    }
    let data = GamData {
        ids: (0..cfg.n).map(|i| format!("{i:05}")).collect(),
        names: (1..=cfg.k).map(|j| format!("x{j}")).collect(),
        columns,
        y,
        lat,
        lng,
        state,
    };
    (
        data,
        GamTruth {
            intercept,
            beta,
            state_effects,
        },
    )
}

/// Region records carrying `data` as sentiment and covariates, with review
/// counts from `reviews(i)`.
pub fn regions_from(data: &GamData, reviews: impl Fn(usize) -> usize) -> Vec<RegionRecord> {
    (0..data.n())
        .map(|i| {
            let n = reviews(i);
            RegionRecord {
                region_id: format!("{:05}", i % 100_000),
                level: Level::County,
                state: data.state[i].clone(),
                centroid_lat: data.lat[i],
                centroid_lng: data.lng[i],
                n_reviews: n,
                n_positive: 0,
                n_neutral: 0,
                n_negative: 0,
                sentiment: (n > 0).then_some(data.y[i]),
                included: n > 0,
                covariates: data
                    .names
                    .iter()
                    .zip(&data.columns)
                    .map(|(name, c)| (name.clone(), c[i]))
                    .collect(),
            }
        })
        .collect()
}

/// Columns named after the candidate covariates, with three built to be
/// collinear: the urban share mirrors the rural share (plus density), median
/// income follows poverty and education, and the white share is the
/// remainder of the other groups.
pub fn collinear_covariates(n: usize, seed: u64) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let normal = |m: f64, s: f64| Normal::new(m, s).unwrap();
    let pct = |v: f64| v.clamp(0.0, 100.0);
    for _ in 0..n {
        let pop: f64 = normal(1.0, 0.8).sample(&mut rng).exp();
        let emp = pop * normal(0.5, 0.8).sample(&mut rng).exp();
        let poverty = pct(normal(14.0, 6.0).sample(&mut rng));
        let rural = rng.random_range(0.0..60.0);
        let urban = pct(100.0 - rural + 2.0 * (pop.ln() - 1.0) + normal(0.0, 2.0).sample(&mut rng));
        let edu = pct(normal(35.0, 12.0).sample(&mut rng));
        let income = 60.0 - 1.5 * poverty + 0.8 * edu + normal(0.0, 4.0).sample(&mut rng);
        let asian = rng.random_range(0.0..10.0);
        let black = rng.random_range(0.0..30.0);
        let hisp = rng.random_range(0.0..30.0);
        let others = rng.random_range(0.0..5.0);
        let white = pct(100.0 - asian - black - hisp - others + normal(0.0, 2.0).sample(&mut rng) - 2.0);
        let values = [
            ("Population Density", pop),
            ("Employment Density", emp),
            ("Poverty", poverty),
            ("Rural Population", rural),
            ("Urban Population", urban),
            ("Median Income", income),
            ("Highly-Educated", edu),
            ("Male", pct(normal(49.3, 3.0).sample(&mut rng))),
            ("Age 18-44", pct(normal(39.0, 8.0).sample(&mut rng))),
            ("Age 45-64", pct(normal(24.7, 5.0).sample(&mut rng))),
            ("Age over 65", pct(normal(17.5, 6.0).sample(&mut rng))),
            ("White", white),
            ("Asian", asian),
            ("African American", black),
            ("Hispanic", hisp),
            ("Others", others),
            ("Disability", pct(normal(11.6, 4.0).sample(&mut rng))),
            ("Avg. POI Score", normal(4.25, 0.18).sample(&mut rng)),
            ("Review density", normal(-1.5, 1.0).sample(&mut rng).exp()),
        ];
        for (k, v) in values {
            cols.entry(k).or_default().push(v);
        }
    }
    let names: Vec<String> = COVARIATES.iter().map(|s| s.to_string()).collect();
    let columns = COVARIATES.iter().map(|k| cols.remove(k).unwrap()).collect();
    (names, columns)
}

const CLASS_WORDS: [[&str; 8]; 4] = [
    ["blocked", "broken", "rude", "impossible", "narrow", "refused", "steep", "awful"],
    ["located", "available", "listed", "north", "request", "lower", "desk", "side"],
    ["wonderful", "smooth", "helpful", "spacious", "welcoming", "easy", "perfect", "lovely"],
    ["budget", "highway", "online", "prices", "taste", "music", "menu", "traffic"],
];
const SHARED_WORDS: [&str; 8] = ["the", "entrance", "ramp", "parking", "staff", "door", "was", "very"];

/// Texts whose label is decided by a class-specific vocabulary, with a few
/// shared words mixed in; classes are balanced and dealt in a seeded order.
pub fn separable_corpus(n: usize, seed: u64) -> (Vec<String>, Vec<crate::annotation::AttitudeLabel>) {
    use crate::annotation::AttitudeLabel;
    use rand::seq::{IndexedRandom, SliceRandom};
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels: Vec<AttitudeLabel> = (0..n).map(|i| AttitudeLabel::ALL[i % 4]).collect();
    labels.shuffle(&mut rng);
    let docs = labels
        .iter()
        .map(|l| {
            let mut words: Vec<&str> = Vec::with_capacity(8);
            for _ in 0..rng.random_range(3..=5) {
                words.push(CLASS_WORDS[l.index()].choose(&mut rng).unwrap());
            }
            for _ in 0..rng.random_range(2..=4) {
                words.push(SHARED_WORDS.choose(&mut rng).unwrap());
            }
            words.shuffle(&mut rng);
            words.join(" ")
        })
        .collect();
    (docs, labels)
}

/// Labeled snippets spread over `n_pois` places, with texts drawn from the
/// demo templates so words recur across labels.
pub fn labeled_snippets(n: usize, n_pois: usize, seed: u64) -> Vec<crate::classify::LabeledSnippet> {
    use crate::annotation::AttitudeLabel;
    use crate::classify::LabeledSnippet;
    use crate::filter::AccessibilitySnippet;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let label = AttitudeLabel::ALL[rng.random_range(0..4)];
            let text = demo::template(label, &mut rng).to_string();
            LabeledSnippet {
                snippet: AccessibilitySnippet {
                    review_id: format!("s{i:06}"),
                    poi_id: format!("poi{:04}", rng.random_range(0..n_pois.max(1))),
                    matched_keywords: Vec::new(),
                    targeted_text: text.clone(),
                    full_text: text,
                },
                label,
            }
        })
        .collect()
}
