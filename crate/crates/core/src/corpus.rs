//! Streaming readers for review and place metadata files, and the join that
//! attaches each place to its county / block group.
//!
//! Both record files are line-delimited JSON. A line that fails validation is
//! skipped and tallied; the reader never attempts to repair it.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom};
use std::ops::Range;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of skipped-line diagnostics retained per ingest. The skip count
/// itself is always exact.
pub const MAX_DIAGNOSTICS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub review_id: String,
    pub poi_id: String,
    pub rating: Option<u8>,
    pub text: String,
    pub timestamp: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poi {
    pub poi_id: String,
    pub name: String,
    pub latitude: Option<f64>,
    pub longitude: Option<f64>,
    pub categories: Vec<String>,
    pub avg_score: Option<f64>,
    pub county_fips: Option<String>,
    pub cbg_geoid: Option<String>,
    pub state: Option<String>,
}

impl Poi {
    pub fn has_region(&self) -> bool {
        self.county_fips.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionAssignment {
    pub poi_id: String,
    pub county_fips: String,
    pub cbg_geoid: String,
    pub state: String,
}

impl RegionAssignment {
    pub fn validate(&self) -> Result<()> {
        let digits = |s: &str, n: usize| s.len() == n && s.bytes().all(|b| b.is_ascii_digit());
        if self.poi_id.is_empty() {
            return Err(Error::invalid("region assignment with empty poi_id"));
        }
        if !digits(&self.county_fips, 5) {
            return Err(Error::invalid(format!(
                "region assignment for {}: county_fips `{}` is not 5 digits",
                self.poi_id, self.county_fips
            )));
        }
        if !digits(&self.cbg_geoid, 12) {
            return Err(Error::invalid(format!(
                "region assignment for {}: cbg_geoid `{}` is not 12 digits",
                self.poi_id, self.cbg_geoid
            )));
        }
        if self.state.len() != 2 || !self.state.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(Error::invalid(format!(
                "region assignment for {}: state `{}` is not a 2-letter code",
                self.poi_id, self.state
            )));
        }
        if !self.cbg_geoid.starts_with(&self.county_fips) {
            return Err(Error::RegionMismatch {
                poi_id: self.poi_id.clone(),
                county_fips: self.county_fips.clone(),
                cbg_geoid: self.cbg_geoid.clone(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub shard: usize,
    /// 1-based line number within the shard (the whole file for sequential ingest).
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub accepted: usize,
    pub skipped: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl IngestStats {
    fn skip(&mut self, shard: usize, line: usize, message: String) {
        self.skipped += 1;
        if self.diagnostics.len() < MAX_DIAGNOSTICS {
            self.diagnostics.push(Diagnostic {
                shard,
                line,
                message,
            });
        }
    }

    pub fn merge(&mut self, other: IngestStats) {
        self.accepted += other.accepted;
        self.skipped += other.skipped;
        let room = MAX_DIAGNOSTICS.saturating_sub(self.diagnostics.len());
        self.diagnostics
            .extend(other.diagnostics.into_iter().take(room));
    }
}

/// Wire shape of one review line. Extra fields in the source corpus are ignored.
#[derive(Deserialize)]
struct RawReview {
    review_id: Option<String>,
    gmap_id: Option<String>,
    rating: Option<serde_json::Value>,
    text: Option<String>,
    time: Option<serde_json::Value>,
}

#[derive(Deserialize)]
struct RawPoi {
    gmap_id: Option<String>,
    name: Option<String>,
    latitude: Option<f64>,
    longitude: Option<f64>,
    category: Option<Vec<String>>,
    avg_rating: Option<f64>,
}

/// Parses and validates one review line.
pub fn parse_review(line: &str) -> std::result::Result<Review, String> {
    let raw: RawReview = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let review_id = raw
        .review_id
        .filter(|s| !s.is_empty())
        .ok_or("missing review_id")?;
    let poi_id = raw
        .gmap_id
        .filter(|s| !s.is_empty())
        .ok_or("missing gmap_id")?;
    let text = raw.text.ok_or("missing text")?;
    if text.trim().is_empty() {
        return Err("empty text".into());
    }
    let rating = match raw.rating {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => {
            let r = v.as_u64().ok_or("rating is not an integer")?;
            if !(1..=5).contains(&r) {
                return Err(format!("rating {r} outside 1..=5"));
            }
            Some(r as u8)
        }
    };
    let timestamp = match raw.time {
        None | Some(serde_json::Value::Null) => None,
        Some(v) => Some(v.as_i64().ok_or("time is not an integer")?),
    };
    Ok(Review {
        review_id,
        poi_id,
        rating,
        text,
        timestamp,
    })
}

/// Parses and validates one place metadata line.
pub fn parse_poi(line: &str) -> std::result::Result<Poi, String> {
    let raw: RawPoi = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let poi_id = raw
        .gmap_id
        .filter(|s| !s.is_empty())
        .ok_or("missing gmap_id")?;
    if let Some(lat) = raw.latitude {
        if !(-90.0..=90.0).contains(&lat) {
            return Err(format!("latitude {lat} out of range"));
        }
    }
    if let Some(lng) = raw.longitude {
        if !(-180.0..=180.0).contains(&lng) {
            return Err(format!("longitude {lng} out of range"));
        }
    }
    if let Some(score) = raw.avg_rating {
        if !(1.0..=5.0).contains(&score) {
            return Err(format!("avg_rating {score} outside [1, 5]"));
        }
    }
    Ok(Poi {
        poi_id,
        name: raw.name.unwrap_or_default(),
        latitude: raw.latitude,
        longitude: raw.longitude,
        categories: raw.category.unwrap_or_default(),
        avg_score: raw.avg_rating,
        county_fips: None,
        cbg_geoid: None,
        state: None,
    })
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn ingest_reader<T, R, P, F>(
    reader: R,
    shard: usize,
    path: &Path,
    parse: P,
    mut on_record: F,
) -> Result<IngestStats>
where
    R: BufRead,
    P: Fn(&str) -> std::result::Result<T, String>,
    F: FnMut(T),
{
    let mut stats = IngestStats::default();
    let mut buf = Vec::new();
    let mut reader = reader;
    let mut line_no = 0usize;
    loop {
        buf.clear();
        let n = reader
            .read_until(b'\n', &mut buf)
            .map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let line = match std::str::from_utf8(&buf) {
            Ok(s) => s.trim_end_matches(['\n', '\r']),
            Err(e) => {
                stats.skip(shard, line_no, format!("invalid utf-8: {e}"));
                continue;
            }
        };
        if line.trim().is_empty() {
            stats.skip(shard, line_no, "blank line".into());
            continue;
        }
        match parse(line) {
            Ok(record) => {
                stats.accepted += 1;
                on_record(record);
            }
            Err(msg) => stats.skip(shard, line_no, msg),
        }
    }
    Ok(stats)
}

/// Streams a review file, handing each valid record to `on_record` in file
/// order. Memory use is bounded by the longest line.
pub fn ingest_reviews<F>(path: impl AsRef<Path>, on_record: F) -> Result<IngestStats>
where
    F: FnMut(Review),
{
    let path = path.as_ref();
    let reader = BufReader::with_capacity(1 << 16, open(path)?);
    ingest_reader(reader, 0, path, parse_review, on_record)
}

pub fn ingest_pois<F>(path: impl AsRef<Path>, on_record: F) -> Result<IngestStats>
where
    F: FnMut(Poi),
{
    let path = path.as_ref();
    let reader = BufReader::with_capacity(1 << 16, open(path)?);
    ingest_reader(reader, 0, path, parse_poi, on_record)
}

/// Splits a file into at most `lanes` byte ranges, each starting at a line
/// start and ending just after a newline (or at EOF).
pub fn plan_shards(path: impl AsRef<Path>, lanes: usize) -> Result<Vec<Range<u64>>> {
    let path = path.as_ref();
    let mut file = open(path)?;
    let len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let lanes = lanes.max(1) as u64;
    let mut cuts = vec![0u64];
    let mut byte = [0u8; 1];
    for i in 1..lanes {
        let mut pos = (len * i / lanes).max(*cuts.last().unwrap());
        if pos >= len {
            break;
        }
        // advance to just after the next newline
        file.seek(SeekFrom::Start(pos))
            .map_err(|e| Error::io(path, e))?;
        let mut reader = BufReader::new(&mut file);
        loop {
            match reader.read(&mut byte) {
                Ok(0) => {
                    pos = len;
                    break;
                }
                Ok(_) => {
                    pos += 1;
                    if byte[0] == b'\n' {
                        break;
                    }
                }
                Err(e) => return Err(Error::io(path, e)),
            }
        }
        if pos > *cuts.last().unwrap() && pos < len {
            cuts.push(pos);
        }
    }
    cuts.push(len);
    cuts.dedup();
    Ok(cuts.windows(2).map(|w| w[0]..w[1]).collect())
}

/// Ingests one shard produced by [`plan_shards`].
pub fn ingest_reviews_shard<F>(
    path: impl AsRef<Path>,
    shard: usize,
    range: Range<u64>,
    on_record: F,
) -> Result<IngestStats>
where
    F: FnMut(Review),
{
    let path = path.as_ref();
    let mut file = open(path)?;
    file.seek(SeekFrom::Start(range.start))
        .map_err(|e| Error::io(path, e))?;
    let reader = BufReader::with_capacity(1 << 16, file.take(range.end - range.start));
    ingest_reader(reader, shard, path, parse_review, on_record)
}

/// Parallel ingest over disjoint shards. `on_record` receives the shard index;
/// order is preserved within a shard but not across shards.
pub fn ingest_reviews_parallel<F>(
    path: impl AsRef<Path>,
    lanes: usize,
    on_record: F,
) -> Result<IngestStats>
where
    F: Fn(usize, Review) + Sync,
{
    let path = path.as_ref();
    let shards = plan_shards(path, lanes)?;
    let per_shard: Vec<Result<IngestStats>> = shards
        .into_par_iter()
        .enumerate()
        .map(|(i, range)| ingest_reviews_shard(path, i, range, |r| on_record(i, r)))
        .collect();
    let mut total = IngestStats::default();
    for stats in per_shard {
        total.merge(stats?);
    }
    Ok(total)
}

/// Reads the `poi_id,county_fips,cbg_geoid,state` table. Any invalid or
/// duplicated row is fatal.
pub fn read_assignments(path: impl AsRef<Path>) -> Result<Vec<RegionAssignment>> {
    let path = path.as_ref();
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let mut out = Vec::new();
    for row in rdr.deserialize() {
        let a: RegionAssignment = row?;
        a.validate()?;
        out.push(a);
    }
    Ok(out)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct JoinStats {
    pub assigned: usize,
    pub region_less: usize,
}

/// Left join of places against region assignments. Places without an
/// assignment pass through with their region fields empty.
pub fn join_regions<I>(pois: I, assignments: &[RegionAssignment]) -> Result<(Vec<Poi>, JoinStats)>
where
    I: IntoIterator<Item = Poi>,
{
    let mut table: HashMap<&str, &RegionAssignment> = HashMap::with_capacity(assignments.len());
    for a in assignments {
        a.validate()?;
        if table.insert(a.poi_id.as_str(), a).is_some() {
            return Err(Error::DuplicateAssignment(a.poi_id.clone()));
        }
    }
    let mut stats = JoinStats::default();
    let out = pois
        .into_iter()
        .map(|mut poi| {
            match table.get(poi.poi_id.as_str()) {
                Some(a) => {
                    poi.county_fips = Some(a.county_fips.clone());
                    poi.cbg_geoid = Some(a.cbg_geoid.clone());
                    poi.state = Some(a.state.to_ascii_uppercase());
                    stats.assigned += 1;
                }
                None => {
                    poi.county_fips = None;
                    poi.cbg_geoid = None;
                    poi.state = None;
                    stats.region_less += 1;
                }
            }
            poi
        })
        .collect();
    Ok((out, stats))
}
