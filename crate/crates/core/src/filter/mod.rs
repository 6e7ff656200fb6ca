//! Keyword selection of accessibility-related reviews.
//!
//! A pattern matches case-insensitively when it starts at a word boundary; the
//! matched word may continue past the end of the pattern, so `handicap` also
//! selects `handicapped`. Spaces inside multi-word patterns match any run of
//! whitespace. Typos are not handled.
//!
//! All patterns are compiled into a single Aho-Corasick automaton, so a text is
//! scanned once regardless of list length.

mod sentence;

use std::io::Write;
use std::path::Path;

use aho_corasick::{AhoCorasick, AhoCorasickBuilder, MatchKind};
use serde::{Deserialize, Serialize};

use crate::corpus::{self, IngestStats, Review};
use crate::error::{Error, Result};

pub use sentence::sentence_spans;

/// The shipped search list.
pub const DEFAULT_SEARCH_LIST: &str = include_str!("../../data/search_list.txt");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchList {
    patterns: Vec<String>,
}

impl SearchList {
    pub fn new<I, S>(patterns: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out: Vec<String> = Vec::new();
        for p in patterns {
            let p: String = p.into();
            let p = p.split_whitespace().collect::<Vec<_>>().join(" ");
            if p.is_empty() {
                return Err(Error::invalid("empty search pattern"));
            }
            if p != p.to_lowercase() {
                return Err(Error::invalid(format!("search pattern `{p}` is not lowercase")));
            }
            if out.contains(&p) {
                return Err(Error::invalid(format!("duplicate search pattern `{p}`")));
            }
            out.push(p);
        }
        if out.is_empty() {
            return Err(Error::invalid("search list is empty"));
        }
        Ok(SearchList { patterns: out })
    }

    /// One pattern per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }
}

impl Default for SearchList {
    fn default() -> Self {
        Self::parse(DEFAULT_SEARCH_LIST).expect("shipped search list is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeywordMatch {
    /// Index into the search list.
    pub pattern: usize,
    /// Byte offsets into the scanned text.
    pub start: usize,
    pub end: usize,
}

/// Compiled, immutable matcher. Cheap to share across threads.
#[derive(Debug, Clone)]
pub struct KeywordMatcher {
    list: SearchList,
    automaton: AhoCorasick,
}

impl KeywordMatcher {
    pub fn new(list: SearchList) -> Self {
        let automaton = AhoCorasickBuilder::new()
            .ascii_case_insensitive(true)
            .match_kind(MatchKind::Standard)
            .build(list.patterns())
            .expect("search list compiles");
        KeywordMatcher { list, automaton }
    }

    pub fn list(&self) -> &SearchList {
        &self.list
    }

    pub fn pattern(&self, m: &KeywordMatch) -> &str {
        &self.list.patterns[m.pattern]
    }

    /// All matches in `text`, ordered by start offset then list order.
    pub fn scan(&self, text: &str) -> Vec<KeywordMatch> {
        let normalized = collapse_whitespace(text);
        let (haystack, offsets): (&str, Option<&[usize]>) = match &normalized {
            Haystack::Borrowed(s) => (s, None),
            Haystack::Owned(s, map) => (s.as_str(), Some(map.as_slice())),
        };
        let to_orig = |i: usize| offsets.map_or(i, |m| m[i]);
        let mut out: Vec<KeywordMatch> = self
            .automaton
            .find_overlapping_iter(haystack)
            .filter(|m| at_word_start(haystack, m.start()))
            .map(|m| KeywordMatch {
                pattern: m.pattern().as_usize(),
                start: to_orig(m.start()),
                // end maps through the last matched byte, which is never whitespace
                end: to_orig(m.end() - 1) + 1,
            })
            .collect();
        out.sort_by_key(|m| (m.start, m.pattern));
        out
    }
}

impl Default for KeywordMatcher {
    fn default() -> Self {
        Self::new(SearchList::default())
    }
}

fn at_word_start(text: &str, i: usize) -> bool {
    text[..i].chars().next_back().is_none_or(|c| !c.is_alphanumeric())
}

enum Haystack<'a> {
    Borrowed(&'a str),
    /// Rewritten text plus, for each of its bytes, the original byte offset.
    Owned(String, Vec<usize>),
}

/// Replaces every whitespace run by a single ASCII space.
/// Borrows when the text needs no change.
fn collapse_whitespace(text: &str) -> Haystack<'_> {
    let needs = {
        let mut prev_ws = false;
        text.chars().any(|c| {
            let ws = c.is_whitespace();
            let bad = ws && (c != ' ' || prev_ws);
            prev_ws = ws;
            bad
        })
    };
    if !needs {
        return Haystack::Borrowed(text);
    }
    let mut s = String::with_capacity(text.len());
    let mut map = Vec::with_capacity(text.len() + 1);
    let mut in_ws = false;
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if !in_ws {
                s.push(' ');
                map.push(i);
            }
            in_ws = true;
        } else {
            s.push(c);
            map.extend(i..i + c.len_utf8());
            in_ws = false;
        }
    }
    map.push(text.len());
    Haystack::Owned(s, map)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccessibilitySnippet {
    pub review_id: String,
    pub poi_id: String,
    pub matched_keywords: Vec<String>,
    pub targeted_text: String,
    pub full_text: String,
}

/// Builds the snippet for a review from its matches: the targeted text is
/// every sentence holding at least one match start, joined by single spaces.
pub fn chunk_targeted_text(
    review: &Review,
    matches: &[KeywordMatch],
    matcher: &KeywordMatcher,
) -> Option<AccessibilitySnippet> {
    if matches.is_empty() {
        return None;
    }
    let text = review.text.as_str();
    let spans = sentence_spans(text);
    let mut keep = vec![false; spans.len()];
    let mut keywords: Vec<String> = Vec::new();
    for m in matches {
        if let Some(idx) = spans.iter().position(|s| s.start <= m.start && m.start < s.end) {
            keep[idx] = true;
        }
        let p = matcher.pattern(m);
        if !keywords.iter().any(|k| k == p) {
            keywords.push(p.to_string());
        }
    }
    let targeted: Vec<&str> = spans
        .iter()
        .zip(&keep)
        .filter(|(_, k)| **k)
        .map(|(s, _)| &text[s.clone()])
        .collect();
    Some(AccessibilitySnippet {
        review_id: review.review_id.clone(),
        poi_id: review.poi_id.clone(),
        matched_keywords: keywords,
        targeted_text: targeted.join(" "),
        full_text: review.text.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterStats {
    pub scanned: usize,
    pub matched: usize,
    /// Reviews containing each pattern, in search-list order.
    pub per_pattern: Vec<(String, usize)>,
}

impl FilterStats {
    pub fn new(list: &SearchList) -> Self {
        FilterStats {
            scanned: 0,
            matched: 0,
            per_pattern: list.patterns().iter().map(|p| (p.clone(), 0)).collect(),
        }
    }

    pub fn merge(&mut self, other: &FilterStats) {
        self.scanned += other.scanned;
        self.matched += other.matched;
        for (mine, theirs) in self.per_pattern.iter_mut().zip(&other.per_pattern) {
            mine.1 += theirs.1;
        }
    }
}

/// Scans one review, updating `stats`.
pub fn filter_review(
    review: &Review,
    matcher: &KeywordMatcher,
    stats: &mut FilterStats,
) -> Option<AccessibilitySnippet> {
    stats.scanned += 1;
    let matches = matcher.scan(&review.text);
    if matches.is_empty() {
        return None;
    }
    stats.matched += 1;
    let mut seen = vec![false; stats.per_pattern.len()];
    for m in &matches {
        if !seen[m.pattern] {
            seen[m.pattern] = true;
            stats.per_pattern[m.pattern].1 += 1;
        }
    }
    chunk_targeted_text(review, &matches, matcher)
}

pub fn filter_corpus<I, F>(reviews: I, matcher: &KeywordMatcher, mut on_snippet: F) -> FilterStats
where
    I: IntoIterator<Item = Review>,
    F: FnMut(AccessibilitySnippet),
{
    let mut stats = FilterStats::new(matcher.list());
    for r in reviews {
        if let Some(s) = filter_review(&r, matcher, &mut stats) {
            on_snippet(s);
        }
    }
    stats
}

/// Filters a review file across `lanes` shards. Snippets come back in file
/// order regardless of lane count.
pub fn filter_file(
    path: impl AsRef<Path>,
    matcher: &KeywordMatcher,
    lanes: usize,
) -> Result<(Vec<AccessibilitySnippet>, FilterStats, IngestStats)> {
    use rayon::prelude::*;
    let path = path.as_ref();
    let shards = corpus::plan_shards(path, lanes)?;
    let results: Vec<Result<(Vec<AccessibilitySnippet>, FilterStats, IngestStats)>> = shards
        .into_par_iter()
        .enumerate()
        .map(|(i, range)| {
            let mut stats = FilterStats::new(matcher.list());
            let mut out = Vec::new();
            let ingest = corpus::ingest_reviews_shard(path, i, range, |r| {
                if let Some(s) = filter_review(&r, matcher, &mut stats) {
                    out.push(s);
                }
            })?;
            Ok((out, stats, ingest))
        })
        .collect();
    let mut snippets = Vec::new();
    let mut stats = FilterStats::new(matcher.list());
    let mut ingest = IngestStats::default();
    for r in results {
        let (s, f, i) = r?;
        snippets.extend(s);
        stats.merge(&f);
        ingest.merge(i);
    }
    Ok((snippets, stats, ingest))
}

pub fn write_snippets<W: Write>(mut w: W, snippets: &[AccessibilitySnippet]) -> Result<()> {
    for s in snippets {
        serde_json::to_writer(&mut w, s)?;
        w.write_all(b"\n").map_err(|e| Error::io("<snippets>", e))?;
    }
    Ok(())
}

pub fn read_snippets(path: impl AsRef<Path>) -> Result<Vec<AccessibilitySnippet>> {
    crate::jsonl::read_all(path)
}
