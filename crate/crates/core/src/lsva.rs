//! Lexical salience-valence analysis.
//!
//! For each word, `n_total` counts the labeled reviews containing it (each
//! review at most once), and
//!
//! ```text
//! salience = log10(n_total)
//! valence  = (n_positive - n_negative) / n_total
//! ```
//!
//! Neutral and unrelated reviews add to `n_total` only, so they pull valence
//! towards zero.

use std::collections::{BTreeMap, HashSet};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::annotation::AttitudeLabel;
use crate::classify::tokenize;
use crate::error::{Error, Result};

pub const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stopwords(HashSet<String>);

impl Stopwords {
    pub fn parse(text: &str) -> Self {
        Stopwords(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn none() -> Self {
        Stopwords(HashSet::new())
    }

    pub fn contains(&self, w: &str) -> bool {
        self.0.contains(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for Stopwords {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsvaEntry {
    pub word: String,
    pub n_total: usize,
    pub n_positive: usize,
    pub n_negative: usize,
    pub salience: f64,
    pub valence: f64,
}

impl LsvaEntry {
    fn new(word: String, n_total: usize, n_positive: usize, n_negative: usize) -> Self {
        LsvaEntry {
            salience: (n_total as f64).log10(),
            valence: (n_positive as f64 - n_negative as f64) / n_total as f64,
            word,
            n_total,
            n_positive,
            n_negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LsvaOptions {
    pub min_total: usize,
    /// Adds adjacent word pairs ("service dog") as extra terms. Pairs are
    /// formed after stopword removal.
    pub bigrams: bool,
}

impl Default for LsvaOptions {
    fn default() -> Self {
        LsvaOptions {
            min_total: 10,
            bigrams: false,
        }
    }
}

/// Computes entries for one corpus of `(text, label)` pairs, sorted by
/// salience descending then word.
pub fn lsva_compute<'a, I>(docs: I, stopwords: &Stopwords, opts: LsvaOptions) -> Result<Vec<LsvaEntry>>
where
    I: IntoIterator<Item = (&'a str, AttitudeLabel)>,
{
    if opts.min_total == 0 {
        return Err(Error::invalid("min_total must be at least 1"));
    }
    // word -> (total, positive, negative)
    let mut counts: BTreeMap<String, (usize, usize, usize)> = BTreeMap::new();
    for (text, label) in docs {
        let words: Vec<String> = tokenize(text)
            .into_iter()
            .filter(|w| !stopwords.contains(w))
            .collect();
        let mut terms: Vec<String> = words.clone();
        if opts.bigrams {
            terms.extend(words.windows(2).map(|w| format!("{} {}", w[0], w[1])));
        }
        terms.sort_unstable();
        terms.dedup();
        for t in terms {
            let c = counts.entry(t).or_insert((0, 0, 0));
            c.0 += 1;
            match label {
                AttitudeLabel::Positive => c.1 += 1,
                AttitudeLabel::Negative => c.2 += 1,
                AttitudeLabel::Neutral | AttitudeLabel::Unrelated => {}
            }
        }
    }
    let mut out: Vec<LsvaEntry> = counts
        .into_iter()
        .filter(|(_, c)| c.0 >= opts.min_total)
        .map(|(w, (t, p, n))| LsvaEntry::new(w, t, p, n))
        .collect();
    sort_entries(&mut out);
    Ok(out)
}

fn sort_entries(entries: &mut [LsvaEntry]) {
    entries.sort_by(|a, b| {
        b.salience
            .total_cmp(&a.salience)
            .then_with(|| a.word.cmp(&b.word))
    });
}

/// Writes the scatter file: `word,salience,valence,n_total,n_positive,n_negative`,
/// sorted by salience descending.
pub fn lsva_export<W: Write>(w: W, entries: &[LsvaEntry]) -> Result<()> {
    let mut sorted = entries.to_vec();
    sort_entries(&mut sorted);
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["word", "salience", "valence", "n_total", "n_positive", "n_negative"])?;
    for e in &sorted {
        wtr.write_record([
            e.word.clone(),
            e.salience.to_string(),
            e.valence.to_string(),
            e.n_total.to_string(),
            e.n_positive.to_string(),
            e.n_negative.to_string(),
        ])?;
    }
    wtr.flush().map_err(|e| Error::io("<lsva>", e))
}
