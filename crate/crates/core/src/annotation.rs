//! Labeled examples, two-coder agreement and train/test splitting.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttitudeLabel {
    Negative,
    Neutral,
    Positive,
    Unrelated,
}

impl AttitudeLabel {
    pub const ALL: [AttitudeLabel; 4] = [
        AttitudeLabel::Negative,
        AttitudeLabel::Neutral,
        AttitudeLabel::Positive,
        AttitudeLabel::Unrelated,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AttitudeLabel::Negative => "negative",
            AttitudeLabel::Neutral => "neutral",
            AttitudeLabel::Positive => "positive",
            AttitudeLabel::Unrelated => "unrelated",
        }
    }

    /// Numeric sentiment used by the place and region aggregates:
    /// negative -1, neutral 0, positive +1, unrelated has none.
    pub fn sentiment(self) -> Option<f64> {
        match self {
            AttitudeLabel::Negative => Some(-1.0),
            AttitudeLabel::Neutral => Some(0.0),
            AttitudeLabel::Positive => Some(1.0),
            AttitudeLabel::Unrelated => None,
        }
    }
}

impl fmt::Display for AttitudeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exact, case-sensitive parse of the four wire strings.
impl FromStr for AttitudeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(AttitudeLabel::Negative),
            "neutral" => Ok(AttitudeLabel::Neutral),
            "positive" => Ok(AttitudeLabel::Positive),
            "unrelated" => Ok(AttitudeLabel::Unrelated),
            other => Err(Error::invalid(format!("unknown attitude label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub review_id: String,
    pub targeted_text: String,
    pub label: AttitudeLabel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator_id: Option<String>,
}

pub fn read_labeled(path: impl AsRef<std::path::Path>) -> Result<Vec<LabeledExample>> {
    crate::jsonl::read_all(path)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts(pub [usize; 4]);

impl LabelCounts {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn add(&mut self, label: AttitudeLabel) {
        self[label] += 1;
    }
}

impl Index<AttitudeLabel> for LabelCounts {
    type Output = usize;
    fn index(&self, l: AttitudeLabel) -> &usize {
        &self.0[l.index()]
    }
}

impl IndexMut<AttitudeLabel> for LabelCounts {
    fn index_mut(&mut self, l: AttitudeLabel) -> &mut usize {
        &mut self.0[l.index()]
    }
}

impl FromIterator<AttitudeLabel> for LabelCounts {
    fn from_iter<I: IntoIterator<Item = AttitudeLabel>>(iter: I) -> Self {
        let mut c = LabelCounts::default();
        for l in iter {
            c.add(l);
        }
        c
    }
}

/// Counts per label in (negative, neutral, positive, unrelated) order.
pub fn class_histogram(examples: &[LabeledExample]) -> LabelCounts {
    examples.iter().map(|e| e.label).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementItem {
    pub item_id: String,
    pub coder_a: AttitudeLabel,
    pub coder_b: AttitudeLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgreementTable {
    items: Vec<AgreementItem>,
}

impl AgreementTable {
    pub fn new(items: Vec<AgreementItem>) -> Result<Self> {
        if items.len() < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                available: items.len(),
            });
        }
        Ok(AgreementTable { items })
    }

    pub fn items(&self) -> &[AgreementItem] {
        &self.items
    }

    /// Pairs up examples that share a `review_id` and were labeled by two
    /// different annotators. Every review must carry exactly two labels.
    pub fn from_examples(examples: &[LabeledExample]) -> Result<Self> {
        let mut by_item: BTreeMap<&str, Vec<&LabeledExample>> = BTreeMap::new();
        for e in examples {
            by_item.entry(e.review_id.as_str()).or_default().push(e);
        }
        let mut items = Vec::with_capacity(by_item.len());
        for (id, labels) in by_item {
            if labels.len() != 2 {
                return Err(Error::invalid(format!(
                    "item {id} has {} annotations, expected 2",
                    labels.len()
                )));
            }
            let (a, b) = (labels[0], labels[1]);
            if a.annotator_id.is_some() && a.annotator_id == b.annotator_id {
                return Err(Error::invalid(format!("item {id} labeled twice by the same annotator")));
            }
            let (a, b) = if a.annotator_id <= b.annotator_id { (a, b) } else { (b, a) };
            items.push(AgreementItem {
                item_id: id.to_string(),
                coder_a: a.label,
                coder_b: b.label,
            });
        }
        Self::new(items)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaResult {
    pub alpha: f64,
    pub observed_disagreement: f64,
    pub expected_disagreement: f64,
    /// Set when every annotation uses the same label, so expected
    /// disagreement is zero and alpha is reported as 1.
    pub degenerate: bool,
}

/// Nominal Krippendorff's alpha for two coders, via the coincidence matrix.
pub fn krippendorff_alpha(table: &AgreementTable) -> AlphaResult {
    // each item contributes both ordered pairs with weight 1/(m_u - 1) = 1
    let mut coincidence = [[0.0f64; 4]; 4];
    for item in &table.items {
        let (a, b) = (item.coder_a.index(), item.coder_b.index());
        coincidence[a][b] += 1.0;
        coincidence[b][a] += 1.0;
    }
    let marginals: Vec<f64> = coincidence.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = marginals.iter().sum();

    let mut observed = 0.0;
    let mut expected = 0.0;
    for c in 0..4 {
        for k in 0..4 {
            if c != k {
                observed += coincidence[c][k];
                expected += marginals[c] * marginals[k];
            }
        }
    }
    let d_o = observed / n;
    let d_e = expected / (n * (n - 1.0));
    if d_e == 0.0 {
        return AlphaResult {
            alpha: 1.0,
            observed_disagreement: d_o,
            expected_disagreement: d_e,
            degenerate: true,
        };
    }
    let alpha = if d_o == 0.0 { 1.0 } else { 1.0 - d_o / d_e };
    AlphaResult {
        alpha,
        observed_disagreement: d_o,
        expected_disagreement: d_e,
        degenerate: false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split<T> {
    pub train: Vec<T>,
    pub test: Vec<T>,
}

/// Random train/test partition with `round(ratio * n)` training items.
/// Both parts keep the input order. With `stratified`, each class is split
/// separately and remainders are assigned by largest fractional part so the
/// total still equals `round(ratio * n)`.
pub fn split<T: Clone>(
    examples: &[T],
    label_of: impl Fn(&T) -> AttitudeLabel,
    ratio: f64,
    seed: u64,
    stratified: bool,
) -> Result<Split<T>> {
    let n = examples.len();
    if n < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            available: n,
        });
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::invalid(format!("split ratio {ratio} not in (0, 1)")));
    }
    let n_train = (ratio * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_train = vec![false; n];

    if stratified {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); 4];
        for (i, e) in examples.iter().enumerate() {
            groups[label_of(e).index()].push(i);
        }
        let exact: Vec<f64> = groups.iter().map(|g| ratio * g.len() as f64).collect();
        let mut take: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| {
            let fa = exact[a] - exact[a].floor();
            let fb = exact[b] - exact[b].floor();
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        let mut missing = n_train.saturating_sub(take.iter().sum());
        for &g in order.iter().cycle().take(16) {
            if missing == 0 {
                break;
            }
            if take[g] < groups[g].len() {
                take[g] += 1;
                missing -= 1;
            }
        }
        for (g, idx) in groups.iter_mut().enumerate() {
            idx.shuffle(&mut rng);
            for &i in idx.iter().take(take[g]) {
                in_train[i] = true;
            }
        }
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        for &i in idx.iter().take(n_train) {
            in_train[i] = true;
        }
    }

    let mut out = Split {
        train: Vec::with_capacity(n_train),
        test: Vec::with_capacity(n - n_train),
    };
    for (e, t) in examples.iter().zip(in_train) {
        if t {
            out.train.push(e.clone());
        } else {
            out.test.push(e.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use AttitudeLabel::*;

    fn table(a: &[AttitudeLabel], b: &[AttitudeLabel]) -> AgreementTable {
        AgreementTable::new(
            a.iter()
                .zip(b)
                .enumerate()
                .map(|(i, (&x, &y))| AgreementItem {
                    item_id: i.to_string(),
                    coder_a: x,
                    coder_b: y,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn perfect_agreement_is_one() {
        let labels = [Positive, Negative, Neutral, Unrelated, Positive, Positive, Negative, Unrelated, Neutral, Positive];
        let r = krippendorff_alpha(&table(&labels, &labels));
        assert_eq!(r.alpha, 1.0);
        assert!(!r.degenerate);
    }

    #[test]
    fn single_label_is_degenerate() {
        let labels = [Positive; 5];
        let r = krippendorff_alpha(&table(&labels, &labels));
        assert_eq!(r.alpha, 1.0);
        assert!(r.degenerate);
    }

    #[test]
    fn four_item_example() {
        // A=(P,P,N,U), B=(P,N,N,U): n=8, n_P=3, n_N=3, n_U=2.
        // Observed off-diagonal mass 2, so D_o = 2/8.
        // Sum over c != k of n_c n_k = 64 - (9+9+4) = 42, D_e = 42/56.
        let r = krippendorff_alpha(&table(&[Positive, Positive, Negative, Unrelated], &[Positive, Negative, Negative, Unrelated]));
        let expected = 1.0 - (2.0 / 8.0) / (42.0 / 56.0);
        assert!((r.alpha - expected).abs() < 1e-15);
        assert!((r.alpha - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn too_few_items() {
        assert!(AgreementTable::new(vec![]).is_err());
    }

    #[test]
    fn table_from_examples() {
        let ex = |id: &str, who: &str, l| LabeledExample {
            review_id: id.into(),
            targeted_text: String::new(),
            label: l,
            annotator_id: Some(who.into()),
        };
        let t = AgreementTable::from_examples(&[
            ex("1", "b", Negative),
            ex("1", "a", Positive),
            ex("2", "a", Neutral),
            ex("2", "b", Neutral),
        ])
        .unwrap();
        assert_eq!(t.items()[0].coder_a, Positive);
        assert!(AgreementTable::from_examples(&[ex("1", "a", Positive), ex("2", "a", Positive)]).is_err());
    }

    #[test]
    fn split_of_2840_rounds_to_2272() {
        let ids: Vec<usize> = (0..2840).collect();
        let s = split(&ids, |_| Positive, 0.8, 7, false).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (2272, 568));
    }

    #[test]
    fn split_is_deterministic_and_a_partition() {
        let ids: Vec<usize> = (0..10).collect();
        let a = split(&ids, |_| Positive, 0.8, 42, false).unwrap();
        let b = split(&ids, |_| Positive, 0.8, 42, false).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<usize> = a.train.iter().chain(&a.test).copied().collect();
        all.sort();
        assert_eq!(all, ids);
    }

    #[test]
    fn stratified_split_keeps_total_and_proportions() {
        let labels: Vec<AttitudeLabel> = (0..103).map(|i| AttitudeLabel::ALL[i % 4]).collect();
        let s = split(&labels, |l| *l, 0.8, 1, true).unwrap();
        assert_eq!(s.train.len(), (0.8f64 * 103.0).round() as usize);
        let h: LabelCounts = s.train.iter().copied().collect();
        for l in AttitudeLabel::ALL {
            let total = labels.iter().filter(|x| **x == l).count() as f64;
            assert!((h[l] as f64 - 0.8 * total).abs() <= 1.0);
        }
    }

    #[test]
    fn split_errors() {
        assert!(split(&[1], |_| Positive, 0.8, 0, false).is_err());
        assert!(split(&[1, 2], |_| Positive, 1.0, 0, false).is_err());
    }

    #[test]
    fn histogram() {
        assert_eq!(class_histogram(&[]).0, [0, 0, 0, 0]);
        let ex = |l| LabeledExample {
            review_id: "x".into(),
            targeted_text: "t".into(),
            label: l,
            annotator_id: None,
        };
        assert_eq!(class_histogram(&[ex(Positive), ex(Positive), ex(Positive)]).0, [0, 0, 3, 0]);
        let labels: Vec<AttitudeLabel> = [(Negative, 531), (Neutral, 103), (Positive, 458), (Unrelated, 1180)]
            .iter()
            .flat_map(|&(l, n)| std::iter::repeat_n(l, n))
            .collect();
        let h: LabelCounts = labels.into_iter().collect();
        assert_eq!(h.0, [531, 103, 458, 1180]);
        assert_eq!(h.total(), 2272);
    }

    #[test]
    fn label_strings_are_exact() {
        assert_eq!("positive".parse::<AttitudeLabel>().unwrap(), Positive);
        assert!("POSITIVE".parse::<AttitudeLabel>().is_err());
        assert!("pos".parse::<AttitudeLabel>().is_err());
        assert!(serde_json::from_str::<AttitudeLabel>("\"Positive\"").is_err());
    }
}
