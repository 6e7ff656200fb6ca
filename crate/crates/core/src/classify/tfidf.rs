use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowercased runs of alphanumeric characters. No stemming, no stop words.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Logarithm used for inverse document frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdfBase {
    #[default]
    Natural,
    Ten,
}

impl IdfBase {
    fn log(self, x: f64) -> f64 {
        match self {
            IdfBase::Natural => x.ln(),
            IdfBase::Ten => x.log10(),
        }
    }
}

/// Term index and document frequencies over a fitting corpus. Terms are
/// indexed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VocabularyFile", into = "VocabularyFile")]
pub struct Vocabulary {
    terms: Vec<String>,
    df: Vec<usize>,
    n_docs: usize,
    idf_base: IdfBase,
    index: HashMap<String, usize>,
}

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    idf_base: IdfBase,
    n_docs: usize,
    terms: Vec<(String, usize)>,
}

impl From<Vocabulary> for VocabularyFile {
    fn from(v: Vocabulary) -> Self {
        VocabularyFile {
            idf_base: v.idf_base,
            n_docs: v.n_docs,
            terms: v.terms.into_iter().zip(v.df).collect(),
        }
    }
}

impl TryFrom<VocabularyFile> for Vocabulary {
    type Error = Error;

    fn try_from(f: VocabularyFile) -> Result<Self> {
        if f.n_docs == 0 {
            return Err(Error::invalid("vocabulary with zero documents"));
        }
        let mut index = HashMap::with_capacity(f.terms.len());
        let mut terms = Vec::with_capacity(f.terms.len());
        let mut df = Vec::with_capacity(f.terms.len());
        for (i, (t, d)) in f.terms.into_iter().enumerate() {
            if d == 0 || d > f.n_docs {
                return Err(Error::invalid(format!("term `{t}` has document frequency {d}")));
            }
            if index.insert(t.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate vocabulary term `{t}`")));
            }
            terms.push(t);
            df.push(d);
        }
        Ok(Vocabulary {
            terms,
            df,
            n_docs: f.n_docs,
            idf_base: f.idf_base,
            index,
        })
    }
}

impl Vocabulary {
    pub fn fit<S: AsRef<str>>(docs: &[S], idf_base: IdfBase) -> Result<Self> {
        if docs.is_empty() {
            return Err(Error::InsufficientData {
                required: 1,
                available: 0,
            });
        }
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for d in docs {
            let mut toks = tokenize(d.as_ref());
            toks.sort_unstable();
            toks.dedup();
            for t in toks {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        let (terms, df): (Vec<String>, Vec<usize>) = counts.into_iter().unzip();
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Vocabulary {
            terms,
            df,
            n_docs: docs.len(),
            idf_base,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn idf_base(&self) -> IdfBase {
        self.idf_base
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, idx: usize) -> &str {
        &self.terms[idx]
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.index_of(term).map(|i| self.df[i])
    }

    /// `log(N / (1 + DF(t)))`, negative whenever `DF(t) + 1 > N`.
    pub fn idf(&self, idx: usize) -> f64 {
        self.idf_base
            .log(self.n_docs as f64 / (1.0 + self.df[idx] as f64))
    }

    /// TF-IDF weights for one document. TF is the raw count divided by the
    /// document's total token count, out-of-vocabulary tokens included.
    pub fn transform(&self, doc: &str) -> TfidfVector {
        let tokens = tokenize(doc);
        if tokens.is_empty() {
            return TfidfVector::default();
        }
        let total = tokens.len() as f64;
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for t in &tokens {
            if let Some(i) = self.index_of(t) {
                *counts.entry(i).or_insert(0) += 1;
            }
        }
        TfidfVector {
            entries: counts
                .into_iter()
                .map(|(i, c)| (i, c as f64 / total * self.idf(i)))
                .collect(),
        }
    }
}

/// Sparse weights sorted by term index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TfidfVector {
    entries: Vec<(usize, f64)>,
}

impl TfidfVector {
    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn get(&self, idx: usize) -> f64 {
        self.entries
            .binary_search_by_key(&idx, |e| e.0)
            .map_or(0.0, |p| self.entries[p].1)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i]).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer() {
        assert_eq!(tokenize("Wheel-chair ramp, 2nd FLOOR!"), ["wheel", "chair", "ramp", "2nd", "floor"]);
        assert!(tokenize(" ,.; ").is_empty());
    }

    #[test]
    fn document_frequencies() {
        let v = Vocabulary::fit(&["a b", "b c"], IdfBase::Natural).unwrap();
        assert_eq!(v.n_docs(), 2);
        assert_eq!(v.document_frequency("a"), Some(1));
        assert_eq!(v.document_frequency("b"), Some(2));
        assert_eq!(v.document_frequency("c"), Some(1));
        assert_eq!((v.index_of("a"), v.index_of("c")), (Some(0), Some(2)));

        let v = Vocabulary::fit(&["x y y z"], IdfBase::Natural).unwrap();
        assert!(["x", "y", "z"].iter().all(|t| v.document_frequency(t) == Some(1)));
        assert!(Vocabulary::fit::<&str>(&[], IdfBase::Natural).is_err());
    }

    #[test]
    fn single_document_idf_is_negative() {
        let v = Vocabulary::fit(&["x"], IdfBase::Natural).unwrap();
        let w = v.transform("x");
        assert_eq!(w.entries(), &[(0, 0.5f64.ln())]);
        let v10 = Vocabulary::fit(&["x"], IdfBase::Ten).unwrap();
        assert_eq!(v10.transform("x").get(0), 0.5f64.log10());
    }

    #[test]
    fn absent_and_oov_terms() {
        let v = Vocabulary::fit(&["a b", "b c", "c d"], IdfBase::Natural).unwrap();
        let w = v.transform("a zzz");
        assert_eq!(w.get(v.index_of("b").unwrap()), 0.0);
        // TF denominator counts the out-of-vocabulary token
        assert_eq!(w.get(0), 0.5 * (3.0f64 / 2.0).ln());
        assert!(v.transform("").entries().is_empty());
        assert!(v.transform("!!!").entries().is_empty());
    }

    #[test]
    fn file_round_trip_rejects_bad_df() {
        let v = Vocabulary::fit(&["a b", "b c"], IdfBase::Ten).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let back: Vocabulary = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
        let bad = r#"{"idf_base":"natural","n_docs":1,"terms":[["a",0]]}"#;
        assert!(serde_json::from_str::<Vocabulary>(bad).is_err());
    }
}
