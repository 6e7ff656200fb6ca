//! POI types, per-POI sentiment and per-type distributions.
//!
//! Labels map to numbers as Negative = -1, Neutral = 0, Positive = +1;
//! Unrelated snippets are ignored. A POI's sentiment is the plain mean over
//! its remaining snippets.

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

pub const DEFAULT_MAPPING: &str = include_str!("../data/poi_types.csv");

/// Number of equal-width histogram bins on `[-1, 1]`.
pub const HISTOGRAM_BINS: usize = 20;

pub const SENTIMENT_MAPPING: &str = "negative=-1, neutral=0, positive=+1, unrelated excluded; uniform mean per POI";
pub const QUARTILE_METHOD: &str = "linear interpolation between order statistics (type 7)";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PoiType {
    Restaurant,
    RetailTrade,
    Recreation,
    Hotel,
    PersonalService,
    HealthCare,
    Transportation,
    PublicService,
    Apartment,
    Education,
    Other,
}

impl PoiType {
    pub const ALL: [PoiType; 11] = [
        PoiType::Restaurant,
        PoiType::RetailTrade,
        PoiType::Recreation,
        PoiType::Hotel,
        PoiType::PersonalService,
        PoiType::HealthCare,
        PoiType::Transportation,
        PoiType::PublicService,
        PoiType::Apartment,
        PoiType::Education,
        PoiType::Other,
    ];

    /// The six types with most accessibility reviews, used for the
    /// per-type lexical and distribution reports.
    pub const MAJOR: [PoiType; 6] = [
        PoiType::Restaurant,
        PoiType::RetailTrade,
        PoiType::Recreation,
        PoiType::Hotel,
        PoiType::PersonalService,
        PoiType::HealthCare,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PoiType::Restaurant => "Restaurant",
            PoiType::RetailTrade => "RetailTrade",
            PoiType::Recreation => "Recreation",
            PoiType::Hotel => "Hotel",
            PoiType::PersonalService => "PersonalService",
            PoiType::HealthCare => "HealthCare",
            PoiType::Transportation => "Transportation",
            PoiType::PublicService => "PublicService",
            PoiType::Apartment => "Apartment",
            PoiType::Education => "Education",
            PoiType::Other => "Other",
        }
    }

    /// File-name friendly form, e.g. `retail_trade`.
    pub fn slug(self) -> String {
        let mut out = String::new();
        for (i, c) in self.as_str().chars().enumerate() {
            if c.is_ascii_uppercase() && i > 0 {
                out.push('_');
            }
            out.push(c.to_ascii_lowercase());
        }
        out
    }
}

impl fmt::Display for PoiType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PoiType {
    type Err = Error;

    /// Accepts `RetailTrade`, `Retail Trade` and `retail_trade`.
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        PoiType::ALL
            .into_iter()
            .find(|t| t.as_str().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::invalid(format!("unknown POI type `{s}`")))
    }
}

/// Ordered `(substring, type)` rules; the first rule matching any category
/// wins.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingTable {
    rules: Vec<(String, PoiType)>,
}

impl MappingTable {
    pub fn new(rules: Vec<(String, PoiType)>) -> Result<Self> {
        let rules: Vec<(String, PoiType)> = rules
            .into_iter()
            .map(|(s, t)| (s.trim().to_lowercase(), t))
            .collect();
        if let Some((s, _)) = rules.iter().find(|(s, _)| s.is_empty()) {
            return Err(Error::invalid(format!("empty substring in mapping rule `{s}`")));
        }
        Ok(MappingTable { rules })
    }

    /// Parses `substring,poi_type` CSV with a header row.
    pub fn parse(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "substring" || &headers[1] != "poi_type" {
            return Err(Error::invalid("mapping table header must be `substring,poi_type`"));
        }
        let mut rules = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            rules.push((rec[0].to_string(), rec[1].parse()?));
        }
        Self::new(rules)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn rules(&self) -> &[(String, PoiType)] {
        &self.rules
    }

    pub fn map<S: AsRef<str>>(&self, categories: &[S]) -> PoiType {
        map_poi_type(categories, self)
    }
}

impl Default for MappingTable {
    fn default() -> Self {
        Self::parse(DEFAULT_MAPPING).expect("shipped mapping table is valid")
    }
}

/// Case-insensitive substring lookup; no hit gives [`PoiType::Other`].
pub fn map_poi_type<S: AsRef<str>>(categories: &[S], table: &MappingTable) -> PoiType {
    let cats: Vec<String> = categories.iter().map(|c| c.as_ref().to_lowercase()).collect();
    table
        .rules
        .iter()
        .find(|(sub, _)| cats.iter().any(|c| c.contains(sub.as_str())))
        .map_or(PoiType::Other, |&(_, t)| t)
}

/// POI id to type for every POI.
pub fn type_index(pois: &[Poi], table: &MappingTable) -> HashMap<String, PoiType> {
    pois.iter()
        .map(|p| (p.poi_id.clone(), table.map(&p.categories)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoiSentiment {
    pub poi_id: String,
    pub poi_type: PoiType,
    /// Snippets other than Unrelated.
    pub n_access_reviews: usize,
    pub n_positive: usize,
    pub n_neutral: usize,
    pub n_negative: usize,
    pub mean_sentiment: f64,
}

/// Positive, neutral, negative counts.
type Tally = [usize; 3];

fn tally(acc: &mut HashMap<String, Tally>, s: &LabeledSnippet) {
    let slot = match s.label {
        AttitudeLabel::Positive => 0,
        AttitudeLabel::Neutral => 1,
        AttitudeLabel::Negative => 2,
        AttitudeLabel::Unrelated => return,
    };
    acc.entry(s.snippet.poi_id.clone()).or_default()[slot] += 1;
}

fn merge(mut a: HashMap<String, Tally>, b: HashMap<String, Tally>) -> HashMap<String, Tally> {
    for (k, v) in b {
        let t = a.entry(k).or_default();
        for i in 0..3 {
            t[i] += v[i];
        }
    }
    a
}

/// Per-POI sentiment, sorted by `poi_id`. POIs missing from `types` are
/// typed [`PoiType::Other`].
pub fn aggregate_poi(snippets: &[LabeledSnippet], types: &HashMap<String, PoiType>) -> Vec<PoiSentiment> {
    let tallies = snippets
        .par_iter()
        .fold(HashMap::new, |mut acc, s| {
            tally(&mut acc, s);
            acc
        })
        .reduce(HashMap::new, merge);
    let mut out: Vec<PoiSentiment> = tallies
        .into_iter()
        .map(|(poi_id, [pos, neu, neg])| {
            let n = pos + neu + neg;
            PoiSentiment {
                poi_type: types.get(&poi_id).copied().unwrap_or(PoiType::Other),
                poi_id,
                n_access_reviews: n,
                n_positive: pos,
                n_neutral: neu,
                n_negative: neg,
                mean_sentiment: (pos as f64 - neg as f64) / n as f64,
            }
        })
        .collect();
    out.sort_by(|a, b| a.poi_id.cmp(&b.poi_id));
    out
}

/// Linear-interpolation quantile of sorted data (`p` in `[0, 1]`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Bin index on `[-1, 1]`; `1.0` falls in the last bin.
pub fn histogram_bin(x: f64) -> usize {
    let b = ((x + 1.0) / 2.0 * HISTOGRAM_BINS as f64).floor();
    (b.max(0.0) as usize).min(HISTOGRAM_BINS - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSummary {
    pub poi_type: PoiType,
    pub min_reviews: usize,
    /// POIs of this type before the review-count filter.
    pub n_pois_all: usize,
    pub n_pois: usize,
    /// Q1, Q2, Q3; absent when no POI passes the filter.
    pub quartiles: Option<[f64; 3]>,
    pub histogram: Vec<usize>,
}

pub fn distribution(sentiments: &[PoiSentiment], poi_type: PoiType, min_reviews: usize) -> DistributionSummary {
    let of_type: Vec<&PoiSentiment> = sentiments.iter().filter(|s| s.poi_type == poi_type).collect();
    let mut means: Vec<f64> = of_type
        .iter()
        .filter(|s| s.n_access_reviews >= min_reviews)
        .map(|s| s.mean_sentiment)
        .collect();
    means.sort_by(f64::total_cmp);
    let mut histogram = vec![0; HISTOGRAM_BINS];
    for &m in &means {
        histogram[histogram_bin(m)] += 1;
    }
    DistributionSummary {
        poi_type,
        min_reviews,
        n_pois_all: of_type.len(),
        n_pois: means.len(),
        quartiles: (!means.is_empty()).then(|| {
            [
                quantile_sorted(&means, 0.25),
                quantile_sorted(&means, 0.5),
                quantile_sorted(&means, 0.75),
            ]
        }),
        histogram,
    }
}

/// Summaries for every type, in [`PoiType::ALL`] order.
pub fn distributions(sentiments: &[PoiSentiment], min_reviews: usize) -> Vec<DistributionSummary> {
    PoiType::ALL
        .into_iter()
        .map(|t| distribution(sentiments, t, min_reviews))
        .collect()
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    sentiment_mapping: &'a str,
    quartile_method: &'a str,
    histogram_range: [f64; 2],
    histogram_bins: usize,
    types: &'a [DistributionSummary],
}

/// JSON summary with method metadata.
pub fn write_summary_json<W: Write>(w: W, summaries: &[DistributionSummary]) -> Result<()> {
    let file = SummaryFile {
        sentiment_mapping: SENTIMENT_MAPPING,
        quartile_method: QUARTILE_METHOD,
        histogram_range: [-1.0, 1.0],
        histogram_bins: HISTOGRAM_BINS,
        types: summaries,
    };
    serde_json::to_writer_pretty(w, &file)?;
    Ok(())
}

/// Long-format histogram, one row per type and bin:
/// `poi_type,n_pois,q1,q2,q3,bin_lo,bin_hi,count`.
pub fn write_summary_csv<W: Write>(w: W, summaries: &[DistributionSummary]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["poi_type", "n_pois", "q1", "q2", "q3", "bin_lo", "bin_hi", "count"])?;
    let width = 2.0 / HISTOGRAM_BINS as f64;
    for s in summaries {
        let q: [String; 3] = match s.quartiles {
            Some(q) => q.map(|v| v.to_string()),
            None => Default::default(),
        };
        for (b, count) in s.histogram.iter().enumerate() {
            let lo = -1.0 + b as f64 * width;
            wtr.write_record([
                s.poi_type.as_str().to_string(),
                s.n_pois.to_string(),
                q[0].clone(),
                q[1].clone(),
                q[2].clone(),
                format!("{lo:.2}"),
                format!("{:.2}", lo + width),
                count.to_string(),
            ])?;
        }
    }
    wtr.flush().map_err(|e| Error::io("<summary>", e))
}

pub fn write_sentiments_csv<W: Write>(w: W, sentiments: &[PoiSentiment]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for s in sentiments {
        wtr.serialize(s)?;
    }
    if sentiments.is_empty() {
        wtr.write_record([
            "poi_id",
            "poi_type",
            "n_access_reviews",
            "n_positive",
            "n_neutral",
            "n_negative",
            "mean_sentiment",
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<sentiments>", e))
}

/// Groups labeled snippets by the type of their POI.
pub fn group_by_type<'a>(
    snippets: &'a [LabeledSnippet],
    types: &HashMap<String, PoiType>,
) -> BTreeMap<PoiType, Vec<&'a LabeledSnippet>> {
    let mut out: BTreeMap<PoiType, Vec<&LabeledSnippet>> = BTreeMap::new();
    for s in snippets {
        let t = types.get(&s.snippet.poi_id).copied().unwrap_or(PoiType::Other);
        out.entry(t).or_default().push(s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filter::AccessibilitySnippet;
    use AttitudeLabel::*;

    fn ls(poi: &str, label: AttitudeLabel) -> LabeledSnippet {
        LabeledSnippet {
            snippet: AccessibilitySnippet {
                review_id: String::new(),
                poi_id: poi.into(),
                matched_keywords: vec![],
                targeted_text: String::new(),
                full_text: String::new(),
            },
            label,
        }
    }

    #[test]
    fn mapping_examples() {
        let t = MappingTable::default();
        assert_eq!(t.map(&["Restaurant"]), PoiType::Restaurant);
        assert_eq!(t.map(&["Grocery store"]), PoiType::RetailTrade);
        assert_eq!(t.map::<&str>(&[]), PoiType::Other);
        assert_eq!(t.map(&["Barber shop"]), PoiType::PersonalService);
        assert_eq!(t.map(&["Parking garage"]), PoiType::Transportation);
        assert_eq!(t.map(&["Business center"]), PoiType::PublicService);
        assert_eq!(t.map(&["Dog park"]), PoiType::Recreation);
        assert_eq!(t.map(&["Something odd"]), PoiType::Other);
    }

    #[test]
    fn first_rule_wins_in_table_order() {
        let t = MappingTable::parse("substring,poi_type\nstore,RetailTrade\ngrocery,Restaurant\n").unwrap();
        assert_eq!(t.map(&["Grocery store"]), PoiType::RetailTrade);
        let t = MappingTable::parse("substring,poi_type\ngrocery,Restaurant\nstore,RetailTrade\n").unwrap();
        assert_eq!(t.map(&["Grocery store"]), PoiType::Restaurant);
        assert!(MappingTable::parse("a,b\nx,Hotel\n").is_err());
        assert!(MappingTable::parse("substring,poi_type\nx,Castle\n").is_err());
    }

    #[test]
    fn type_names() {
        assert_eq!("Retail Trade".parse::<PoiType>().unwrap(), PoiType::RetailTrade);
        assert_eq!("health_care".parse::<PoiType>().unwrap(), PoiType::HealthCare);
        assert_eq!(PoiType::PersonalService.slug(), "personal_service");
    }

    #[test]
    fn aggregate_examples() {
        let mut snippets = vec![];
        snippets.extend((0..3).map(|_| ls("a", Positive)));
        snippets.extend((0..2).map(|_| ls("a", Negative)));
        snippets.extend((0..4).map(|_| ls("b", Unrelated)));
        snippets.push(ls("c", Neutral));
        let types = HashMap::from([("a".to_string(), PoiType::Hotel)]);
        let out = aggregate_poi(&snippets, &types);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].poi_id, "a");
        assert!((out[0].mean_sentiment - 0.2).abs() < 1e-15);
        assert_eq!(out[0].poi_type, PoiType::Hotel);
        assert_eq!(out[1].poi_type, PoiType::Other);
        assert_eq!(out[1].mean_sentiment, 0.0);
    }

    fn sent(mean: f64, n: usize) -> PoiSentiment {
        PoiSentiment {
            poi_id: String::new(),
            poi_type: PoiType::Hotel,
            n_access_reviews: n,
            n_positive: 0,
            n_neutral: 0,
            n_negative: 0,
            mean_sentiment: mean,
        }
    }

    #[test]
    fn distribution_examples() {
        let d = distribution(&[sent(-1.0, 5), sent(-1.0, 5), sent(1.0, 5)], PoiType::Hotel, 5);
        assert_eq!(d.quartiles.unwrap()[1], -1.0);
        assert_eq!(d.histogram[0], 2);
        assert_eq!(d.histogram[19], 1);

        let d = distribution(&[sent(-0.4, 9), sent(0.4, 9), sent(-0.7, 9), sent(0.7, 9)], PoiType::Hotel, 5);
        assert_eq!(d.quartiles.unwrap()[1], 0.0);
        assert_eq!(d.histogram.iter().sum::<usize>(), 4);

        let d = distribution(&[sent(0.5, 4)], PoiType::Hotel, 5);
        assert_eq!((d.n_pois, d.n_pois_all, d.quartiles), (0, 1, None));
    }

    #[test]
    fn quantile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.25), 1.75);
        assert_eq!(quantile_sorted(&v, 0.5), 2.5);
        assert_eq!(quantile_sorted(&v, 0.75), 3.25);
    }

    #[test]
    fn bins() {
        assert_eq!(histogram_bin(-1.0), 0);
        assert_eq!(histogram_bin(1.0), 19);
        assert_eq!(histogram_bin(0.0), 10);
        assert_eq!(histogram_bin(-0.35), 6);
    }
}
