use serde::Serialize;

use crate::annotation::AttitudeLabel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub label: AttitudeLabel,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub per_class: [ClassMetrics; 4],
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
    /// `confusion[gold][predicted]`, indexed in label order.
    pub confusion: [[usize; 4]; 4],
    pub total: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// One-vs-rest precision, recall and F1 per class, with 0/0 taken as 0.
/// Macro averages run over all four classes.
pub fn evaluate(pred: &[AttitudeLabel], gold: &[AttitudeLabel]) -> Result<EvalReport> {
    if pred.len() != gold.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} gold labels",
            pred.len(),
            gold.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::InsufficientData {
            required: 1,
            available: 0,
        });
    }
    let mut confusion = [[0usize; 4]; 4];
    for (p, g) in pred.iter().zip(gold) {
        confusion[g.index()][p.index()] += 1;
    }
    let per_class = AttitudeLabel::ALL.map(|label| {
        let c = label.index();
        let tp = confusion[c][c];
        let predicted: usize = (0..4).map(|g| confusion[g][c]).sum();
        let support: usize = confusion[c].iter().sum();
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        ClassMetrics {
            label,
            precision,
            recall,
            f1,
            support,
        }
    });
    let mean = |f: fn(&ClassMetrics) -> f64| per_class.iter().map(f).sum::<f64>() / 4.0;
    let trace: usize = (0..4).map(|c| confusion[c][c]).sum();
    Ok(EvalReport {
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        accuracy: ratio(trace, gold.len()),
        per_class,
        confusion,
        total: gold.len(),
    })
}

impl EvalReport {
    /// Plain-text table: one row per class then the macro row and accuracy.
    pub fn to_table(&self) -> String {
        let mut s = String::from("class       precision  recall  f1      support\n");
        for m in &self.per_class {
            s.push_str(&format!(
                "{:<11} {:<10.4} {:<7.4} {:<7.4} {}\n",
                m.label.as_str(),
                m.precision,
                m.recall,
                m.f1,
                m.support
            ));
        }
        s.push_str(&format!(
            "{:<11} {:<10.4} {:<7.4} {:<7.4} {}\n",
            "macro", self.macro_precision, self.macro_recall, self.macro_f1, self.total
        ));
        s.push_str(&format!("accuracy    {:.4}\n", self.accuracy));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AttitudeLabel::*;

    #[test]
    fn perfect_predictions() {
        let gold = [Negative, Neutral, Positive, Unrelated, Positive];
        let r = evaluate(&gold, &gold).unwrap();
        assert_eq!(r.accuracy, 1.0);
        for m in &r.per_class {
            assert_eq!((m.precision, m.recall, m.f1), (1.0, 1.0, 1.0));
        }
        assert_eq!(r.macro_f1, 1.0);
    }

    #[test]
    fn zero_over_zero_is_zero() {
        let r = evaluate(&[Positive, Positive], &[Positive, Negative]).unwrap();
        let neutral = r.per_class[Neutral.index()];
        assert_eq!((neutral.precision, neutral.recall, neutral.f1, neutral.support), (0.0, 0.0, 0.0, 0));
        let negative = r.per_class[Negative.index()];
        assert_eq!((negative.precision, negative.recall), (0.0, 0.0));
    }

    #[test]
    fn errors() {
        assert!(evaluate(&[], &[]).is_err());
        assert!(evaluate(&[Positive], &[]).is_err());
    }
}
