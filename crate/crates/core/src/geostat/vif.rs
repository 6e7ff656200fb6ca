//! Variance inflation factors and iterative pruning.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_VIF_THRESHOLD: f64 = 5.0;

/// `1 - R²` below this is exact collinearity and reported as infinite VIF.
const COLLINEAR_TOL: f64 = 1e-10;

fn standardized(col: &[f64]) -> Option<Vec<f64>> {
    let n = col.len() as f64;
    let m = col.iter().sum::<f64>() / n;
    let ss: f64 = col.iter().map(|x| (x - m) * (x - m)).sum();
    let scale = ss.sqrt();
    if !(scale > 0.0) || scale < 1e-12 * (m.abs() * n.sqrt()).max(1.0) {
        return None;
    }
    Some(col.iter().map(|x| (x - m) / scale).collect())
}

/// VIF of each column against all others (with intercept). Constant
/// columns and exact linear combinations get `f64::INFINITY`.
pub fn compute_vif(columns: &[Vec<f64>]) -> Result<Vec<f64>> {
    let p = columns.len();
    if p == 0 {
        return Ok(Vec::new());
    }
    let n = columns[0].len();
    if columns.iter().any(|c| c.len() != n) {
        return Err(Error::invalid("design columns differ in length"));
    }
    if n <= p {
        return Err(Error::InsufficientData {
            required: p + 1,
            available: n,
        });
    }
    if p == 1 {
        return Ok(vec![if standardized(&columns[0]).is_some() { 1.0 } else { f64::INFINITY }]);
    }
    let z: Vec<Option<Vec<f64>>> = columns.iter().map(|c| standardized(c)).collect();
    let mut out = Vec::with_capacity(p);
    for j in 0..p {
        let Some(target) = &z[j] else {
            out.push(f64::INFINITY);
            continue;
        };
        let others: Vec<&Vec<f64>> = (0..p).filter(|&k| k != j).filter_map(|k| z[k].as_ref()).collect();
        if others.is_empty() {
            out.push(1.0);
            continue;
        }
        let a = DMatrix::from_fn(n, others.len(), |i, k| others[k][i]);
        let b = DVector::from_column_slice(target);
        let svd = a.clone().svd(true, true);
        let coef = svd
            .solve(&b, 1e-12)
            .map_err(|e| Error::invalid(format!("VIF regression failed: {e}")))?;
        let resid = &b - &a * coef;
        // target has unit sum of squares
        let one_minus_r2 = resid.norm_squared();
        out.push(if one_minus_r2 < COLLINEAR_TOL {
            f64::INFINITY
        } else {
            1.0 / one_minus_r2
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifRound {
    pub columns: Vec<String>,
    pub vif: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dropped {
    pub column: String,
    pub vif: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VifReport {
    pub threshold: f64,
    pub rounds: Vec<VifRound>,
    /// In drop order.
    pub dropped: Vec<Dropped>,
    pub retained: Vec<String>,
}

impl VifReport {
    pub fn final_vif(&self) -> &[f64] {
        self.rounds.last().map_or(&[], |r| &r.vif)
    }
}

/// Drops the highest-VIF column while any VIF exceeds `threshold`. Ties go
/// to the later column, so a column built from earlier ones leaves first.
pub fn vif_prune(names: &[String], columns: &[Vec<f64>], threshold: f64) -> Result<VifReport> {
    if names.len() != columns.len() {
        return Err(Error::invalid("column names and columns differ in count"));
    }
    let mut keep: Vec<usize> = (0..columns.len()).collect();
    let mut report = VifReport {
        threshold,
        rounds: Vec::new(),
        dropped: Vec::new(),
        retained: Vec::new(),
    };
    loop {
        let cols: Vec<Vec<f64>> = keep.iter().map(|&k| columns[k].clone()).collect();
        let vif = compute_vif(&cols)?;
        report.rounds.push(VifRound {
            columns: keep.iter().map(|&k| names[k].clone()).collect(),
            vif: vif.clone(),
        });
        let mut worst: Option<usize> = None;
        for (i, &v) in vif.iter().enumerate() {
            if worst.is_none_or(|w| v >= vif[w]) {
                worst = Some(i);
            }
        }
        match worst {
            Some(w) if vif[w] > threshold => {
                let k = keep.remove(w);
                log::info!("vif: dropping `{}` (VIF {})", names[k], vif[w]);
                report.dropped.push(Dropped {
                    column: names[k].clone(),
                    vif: vif[w],
                });
            }
            _ => break,
        }
    }
    report.retained = keep.iter().map(|&k| names[k].clone()).collect();
    Ok(report)
}
