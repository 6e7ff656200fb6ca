use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use proptest::sample::select;

use access_sentiment::annotation::{krippendorff_alpha, split, AgreementItem, AgreementTable, AttitudeLabel};
use access_sentiment::classify::{kfold, LabeledSnippet};
use access_sentiment::corpus::Review;
use access_sentiment::filter::{filter_review, AccessibilitySnippet, FilterStats, KeywordMatcher, SearchList};
use access_sentiment::geostat::gam::{fit_gam, GamData, GamSpec};
use access_sentiment::geostat::stats::pearson;
use access_sentiment::lsva::{lsva_compute, LsvaOptions, Stopwords};
use access_sentiment::poianalysis::{aggregate_poi, quantile_sorted};

const WORDS: &[&str] = &[
    "ramp", "wheelchair", "Wheelchairs", "handicapped", "unhandicapped", "braille", "deaf", "deafening", "ada",
    "compliant", "curb", "cut", "the", "door", "staff", "great", "no", "Blind", "blinds", "accessible.", "x-ada",
    "mobility", "aid", "café", "über",
];
const SEPS: &[&str] = &[" ", "  ", "\n", "\t ", ". ", "! ", ", ", "-", "/"];

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec((select(WORDS), select(SEPS)), 0..25)
        .prop_map(|v| v.into_iter().map(|(w, s)| format!("{w}{s}")).collect())
}

fn label() -> impl Strategy<Value = AttitudeLabel> {
    (0usize..4).prop_map(|i| AttitudeLabel::from_index(i).unwrap())
}

/// Patterns found at a word start after collapsing whitespace, by plain search.
fn brute_scan(list: &SearchList, text: &str) -> BTreeSet<String> {
    let mut norm = String::new();
    let mut in_ws = false;
    for c in text.chars() {
        if c.is_whitespace() {
            if !in_ws {
                norm.push(' ');
            }
            in_ws = true;
        } else {
            norm.push(c);
            in_ws = false;
        }
    }
    let hay = norm.to_ascii_lowercase();
    let mut found = BTreeSet::new();
    for p in list.patterns() {
        for (i, _) in hay.match_indices(p.as_str()) {
            if hay[..i].chars().next_back().is_none_or(|c| !c.is_alphanumeric()) {
                found.insert(p.clone());
            }
        }
    }
    found
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn filter_agrees_with_plain_search(t in text()) {
        let matcher = KeywordMatcher::default();
        let review = Review { review_id: "r".into(), poi_id: "p".into(), rating: None, text: t.clone(), timestamp: None };
        let mut stats = FilterStats::new(matcher.list());
        let got = filter_review(&review, &matcher, &mut stats);
        let want = brute_scan(matcher.list(), &t);
        match got {
            None => prop_assert!(want.is_empty()),
            Some(s) => {
                let kw: BTreeSet<String> = s.matched_keywords.iter().cloned().collect();
                prop_assert_eq!(kw, want);
                prop_assert!(!s.targeted_text.is_empty());
                prop_assert!(s.targeted_text.len() <= t.len());
            }
        }
    }

    #[test]
    fn alpha_is_bounded_and_symmetric(pairs in prop::collection::vec((label(), label()), 2..60)) {
        let make = |swap: bool, rev: bool| {
            let mut items: Vec<AgreementItem> = pairs.iter().enumerate().map(|(i, &(a, b))| AgreementItem {
                item_id: i.to_string(),
                coder_a: if swap { b } else { a },
                coder_b: if swap { a } else { b },
            }).collect();
            if rev { items.reverse(); }
            krippendorff_alpha(&AgreementTable::new(items).unwrap())
        };
        let r = make(false, false);
        prop_assert!(r.alpha <= 1.0 + 1e-12);
        prop_assert!(r.observed_disagreement >= 0.0);
        let s = make(true, true);
        prop_assert!((r.alpha - s.alpha).abs() < 1e-12);
    }

    #[test]
    fn split_partitions(n in 2usize..300, ratio in 0.05f64..0.95, seed in any::<u64>(), stratified in any::<bool>()) {
        let items: Vec<usize> = (0..n).collect();
        let labels = |i: &usize| AttitudeLabel::from_index((i * 7 + i / 3) % 4).unwrap();
        let s = split(&items, labels, ratio, seed, stratified).unwrap();
        prop_assert_eq!(s.train.len(), (ratio * n as f64).round() as usize);
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, items.clone());
        prop_assert!(s.train.windows(2).all(|w| w[0] < w[1]));
        let again = split(&items, labels, ratio, seed, stratified).unwrap();
        prop_assert_eq!(s, again);
    }

    #[test]
    fn kfold_partitions(n in 10usize..300, k in 2usize..11, seed in any::<u64>(), strat in any::<bool>()) {
        let labels: Vec<AttitudeLabel> = (0..n).map(|i| AttitudeLabel::from_index(i % 3).unwrap()).collect();
        let folds = kfold(n, k, seed, strat.then_some(labels.as_slice())).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        if !strat {
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn lsva_valence_and_salience(docs in prop::collection::vec((text(), label()), 1..40), min in 1usize..4) {
        let entries = lsva_compute(
            docs.iter().map(|(t, l)| (t.as_str(), *l)),
            &Stopwords::default(),
            LsvaOptions { min_total: min, bigrams: false },
        ).unwrap();
        for e in &entries {
            prop_assert!((-1.0..=1.0).contains(&e.valence));
            prop_assert!(e.n_total >= min && e.n_total <= docs.len());
            prop_assert!(e.n_positive + e.n_negative <= e.n_total);
            prop_assert_eq!(e.salience, (e.n_total as f64).log10());
        }
    }

    #[test]
    fn poi_aggregation_ignores_order(
        rows in prop::collection::vec((0usize..8, label()), 1..120),
        perm_seed in any::<u64>(),
    ) {
        let snippets: Vec<LabeledSnippet> = rows.iter().enumerate().map(|(i, &(p, label))| LabeledSnippet {
            snippet: AccessibilitySnippet {
                review_id: format!("r{i}"),
                poi_id: format!("p{p}"),
                matched_keywords: vec![],
                targeted_text: String::new(),
                full_text: String::new(),
            },
            label,
        }).collect();
        let mut shuffled = snippets.clone();
        let mut s = perm_seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let types = HashMap::new();
        let a = aggregate_poi(&snippets, &types);
        prop_assert_eq!(&a, &aggregate_poi(&shuffled, &types));
        for p in &a {
            prop_assert!((-1.0..=1.0).contains(&p.mean_sentiment));
        }
    }

    #[test]
    fn pearson_symmetric_and_affine_invariant(
        xy in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..80),
        a in 0.1f64..10.0,
        b in -50.0f64..50.0,
    ) {
        let (x, y): (Vec<f64>, Vec<f64>) = xy.into_iter().unzip();
        let (Ok(r), Ok(r2)) = (pearson(&x, &y), pearson(&y, &x)) else { return Ok(()) };
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&r));
        prop_assert!((r - r2).abs() < 1e-12);
        let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let neg: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((pearson(&ax, &y).unwrap() - r).abs() < 1e-9);
        prop_assert!((pearson(&neg, &y).unwrap() + r).abs() < 1e-9);
    }

    #[test]
    fn quantiles_are_ordered_and_bounded(mut v in prop::collection::vec(-1.0f64..1.0, 1..100), p in 0.0f64..=1.0) {
        v.sort_by(f64::total_cmp);
        let q = quantile_sorted(&v, p);
        prop_assert!(v[0] <= q && q <= v[v.len() - 1]);
        prop_assert_eq!(quantile_sorted(&v, 0.0), v[0]);
        prop_assert_eq!(quantile_sorted(&v, 1.0), v[v.len() - 1]);
        let qs: Vec<f64> = [0.25, 0.5, 0.75].iter().map(|&p| quantile_sorted(&v, p)).collect();
        prop_assert!(qs[0] <= qs[1] && qs[1] <= qs[2]);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn standardized_slopes_ignore_units(
        seed in any::<u64>(),
        scale in 0.01f64..100.0,
        shift in -1000.0f64..1000.0,
    ) {
        let mut s = seed | 1;
        let mut next = || {
            s ^= s << 13;
            s ^= s >> 7;
            s ^= s << 17;
            (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let n = 60;
        let x1: Vec<f64> = (0..n).map(|_| next()).collect();
        let x2: Vec<f64> = (0..n).map(|_| next()).collect();
        let y: Vec<f64> = (0..n).map(|i| 0.4 * x1[i] - 0.2 * x2[i] + 0.1 * next()).collect();
        let data = GamData {
            ids: (0..n).map(|i| i.to_string()).collect(),
            names: vec!["a".into(), "b".into()],
            columns: vec![x1.clone(), x2],
            y,
            lat: vec![40.0; n],
            lng: vec![-90.0; n],
            state: vec!["OH".into(); n],
        };
        let mut moved = data.clone();
        moved.columns[0] = x1.iter().map(|v| scale * v + shift).collect();
        let spec = GamSpec::linear_only();
        let f = fit_gam(&data, &spec).unwrap();
        let g = fit_gam(&moved, &spec).unwrap();
        for (c, d) in f.coefficients.iter().zip(&g.coefficients) {
            prop_assert!((c.estimate - d.estimate).abs() < 1e-8, "{} {} {}", c.name, c.estimate, d.estimate);
        }
        prop_assert!((g.standardization[0].sd / f.standardization[0].sd - scale).abs() < 1e-9 * scale);
    }
}
