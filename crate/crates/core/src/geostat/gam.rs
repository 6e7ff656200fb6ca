//! Gaussian additive model with identity link:
//!
//! ```text
//! y = β₀ + Σ βₖ xₖ + ti(lat, lng) + s(state) + ε
//! ```
//!
//! Linear covariates are standardized before fitting. `ti(lat, lng)` is the
//! tensor product of two centered cubic regression spline marginals, so it
//! carries no main effects; it has one penalty per margin plus a shrinkage
//! penalty on their joint null space, which lets the whole term shrink to
//! zero. `s(state)` is a ridge-penalized indicator block (random
//! intercepts). Smoothing parameters minimize GCV by coordinate-wise golden
//! section search over `log λ`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::basis::{row_kronecker, Marginal};
use super::region::{is_state_code, RegionRecord};
use crate::error::{Error, Result};

pub const INTERCEPT: &str = "(Intercept)";
pub const SPATIAL_TERM: &str = "ti(Lat,Lng)";
pub const STATE_TERM: &str = "s(State)";

/// Response, covariate columns and smoother inputs for one fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamData {
    pub ids: Vec<String>,
    pub names: Vec<String>,
    /// Raw covariate columns, each of length `n`.
    pub columns: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    pub lat: Vec<f64>,
    pub lng: Vec<f64>,
    pub state: Vec<String>,
}

impl GamData {
    /// Included regions with a sentiment, covariates in `names` order.
    pub fn from_regions(regions: &[RegionRecord], names: &[String]) -> Result<Self> {
        let used: Vec<&RegionRecord> = regions.iter().filter(|r| r.included && r.sentiment.is_some()).collect();
        let mut columns = vec![Vec::with_capacity(used.len()); names.len()];
        for r in &used {
            for (c, name) in columns.iter_mut().zip(names) {
                c.push(r.covariate(name).ok_or_else(|| {
                    Error::invalid(format!("region {} lacks covariate `{name}`", r.region_id))
                })?);
            }
        }
        Ok(GamData {
            ids: used.iter().map(|r| r.region_id.clone()).collect(),
            names: names.to_vec(),
            columns,
            y: used.iter().filter_map(|r| r.sentiment).collect(),
            lat: used.iter().map(|r| r.centroid_lat).collect(),
            lng: used.iter().map(|r| r.centroid_lng).collect(),
            state: used.iter().map(|r| r.state.clone()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn subset(&self, keep: &[usize]) -> GamData {
        let pick = |v: &Vec<f64>| keep.iter().map(|&i| v[i]).collect::<Vec<f64>>();
        GamData {
            ids: keep.iter().map(|&i| self.ids[i].clone()).collect(),
            names: self.names.clone(),
            columns: self.columns.iter().map(pick).collect(),
            y: pick(&self.y),
            lat: pick(&self.lat),
            lng: pick(&self.lng),
            state: keep.iter().map(|&i| self.state[i].clone()).collect(),
        }
    }

    /// Only the named columns, in the given order.
    pub fn select(&self, names: &[String]) -> Result<GamData> {
        let mut columns = Vec::with_capacity(names.len());
        for n in names {
            let i = self
                .names
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::invalid(format!("no covariate `{n}`")))?;
            columns.push(self.columns[i].clone());
        }
        Ok(GamData {
            names: names.to_vec(),
            columns,
            ..self.clone()
        })
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.names.len() != self.columns.len() {
            return Err(Error::invalid("covariate names and columns differ in count"));
        }
        let lens = [self.ids.len(), self.lat.len(), self.lng.len(), self.state.len()];
        if self.columns.iter().any(|c| c.len() != n) || lens.iter().any(|&l| l != n) {
            return Err(Error::invalid("GAM inputs differ in length"));
        }
        let all = self.columns.iter().flatten().chain(&self.y).chain(&self.lat).chain(&self.lng);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("GAM inputs contain non-finite values"));
        }
        if let Some(s) = self.state.iter().find(|s| !is_state_code(s)) {
            return Err(Error::UnknownState(s.clone()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "method", content = "lambda")]
pub enum Smoothing {
    Gcv,
    /// One λ per penalty, in [`GamFit::penalty_names`] order.
    Fixed(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GamSpec {
    pub knots: usize,
    pub spatial: bool,
    pub state_effect: bool,
    pub smoothing: Smoothing,
    /// Search interval for `ln λ` under GCV, on the scaled penalties.
    pub log_lambda_range: (f64, f64),
}

impl Default for GamSpec {
    fn default() -> Self {
        GamSpec {
            knots: 5,
            spatial: true,
            state_effect: true,
            smoothing: Smoothing::Gcv,
            log_lambda_range: (-12.0, 20.0),
        }
    }
}

impl GamSpec {
    pub fn linear_only() -> Self {
        GamSpec {
            spatial: false,
            state_effect: false,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

impl Coefficient {
    pub fn stars(&self) -> &'static str {
        significance_code(self.p_value)
    }
}

/// `0 '***' 0.001 '**' 0.01 '*' 0.05 '' 1`.
pub fn significance_code(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothTerm {
    pub name: String,
    pub edf: f64,
    pub basis_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub name: String,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GamFit {
    /// Intercept first, then covariates in input order.
    pub coefficients: Vec<Coefficient>,
    pub smooths: Vec<SmoothTerm>,
    pub penalty_names: Vec<String>,
    pub lambdas: Vec<f64>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub n: usize,
    pub removed_outliers: usize,
    pub total_edf: f64,
    pub residual_df: f64,
    pub sigma2: f64,
    pub gcv: f64,
    pub standardization: Vec<Standardization>,
    /// Estimated random intercept per state, sorted by state code.
    pub state_effects: Vec<(String, f64)>,
    #[serde(skip)]
    pub fitted: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
    /// Diagonal of the influence matrix.
    #[serde(skip)]
    pub leverage: Vec<f64>,
}

impl GamFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn smooth(&self, name: &str) -> Option<&SmoothTerm> {
        self.smooths.iter().find(|s| s.name == name)
    }

    /// Linear coefficients without the intercept.
    pub fn slopes(&self) -> Vec<f64> {
        self.coefficients[1..].iter().map(|c| c.estimate).collect()
    }
}

struct Block {
    name: &'static str,
    start: usize,
    len: usize,
}

struct PenaltyBlock {
    name: String,
    start: usize,
    s: DMatrix<f64>,
}

/// Design matrix and cross products shared by every λ evaluation.
struct Problem {
    x: DMatrix<f64>,
    y: DVector<f64>,
    xtx: DMatrix<f64>,
    xty: DVector<f64>,
    tss: f64,
    blocks: Vec<Block>,
    penalties: Vec<PenaltyBlock>,
    standardization: Vec<Standardization>,
    states: Vec<String>,
}

struct Eval {
    rho: Vec<f64>,
    beta: DVector<f64>,
    m_inv: DMatrix<f64>,
    rss: f64,
    tau: f64,
    gcv: f64,
}

fn standardize(name: &str, col: &[f64]) -> Result<(Vec<f64>, Standardization)> {
    let n = col.len() as f64;
    let mean = col.iter().sum::<f64>() / n;
    let var = col.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if !(sd > 0.0) {
        return Err(Error::Singular {
            block: format!("linear: `{name}` is constant"),
        });
    }
    Ok((
        col.iter().map(|x| (x - mean) / sd).collect(),
        Standardization {
            name: name.to_string(),
            mean,
            sd,
        },
    ))
}

/// Cholesky succeeds with no pivot collapsing relative to its diagonal.
fn well_conditioned(m: DMatrix<f64>) -> bool {
    let diag: Vec<f64> = m.diagonal().iter().copied().collect();
    match Cholesky::new(m) {
        Some(c) => {
            let l = c.l_dirty();
            diag.iter().enumerate().all(|(i, &d)| l[(i, i)] * l[(i, i)] > 1e-10 * d)
        }
        None => false,
    }
}

fn embed(m: &mut DMatrix<f64>, start: usize, s: &DMatrix<f64>, w: f64) {
    let k = s.nrows();
    let mut v = m.view_mut((start, start), (k, k));
    v += s * w;
}

impl Problem {
    fn new(data: &GamData, spec: &GamSpec) -> Result<Self> {
        data.validate()?;
        let n = data.n();
        let k = data.names.len();

        let mut cols: Vec<Vec<f64>> = vec![vec![1.0; n]];
        let mut standardization = Vec::with_capacity(k);
        for (name, c) in data.names.iter().zip(&data.columns) {
            let (z, s) = standardize(name, c)?;
            cols.push(z);
            standardization.push(s);
        }
        let mut blocks = vec![Block {
            name: "linear",
            start: 0,
            len: 1 + k,
        }];
        let mut penalties = Vec::new();

        if spec.spatial {
            let la = Marginal::new(&data.lat, spec.knots)?;
            let lo = Marginal::new(&data.lng, spec.knots)?;
            let t = row_kronecker(&la.design, &lo.design);
            let start = cols.len();
            let (da, db) = (la.dim(), lo.dim());
            let s_lat = la.penalty.kronecker(&DMatrix::<f64>::identity(db, db));
            let s_lng = DMatrix::<f64>::identity(da, da).kronecker(&lo.penalty);
            let eig = SymmetricEigen::new(&s_lat + &s_lng);
            let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
            let mut s_null = DMatrix::zeros(da * db, da * db);
            for (i, &ev) in eig.eigenvalues.iter().enumerate() {
                if ev < 1e-9 * top {
                    let u = eig.eigenvectors.column(i);
                    s_null += u * u.transpose();
                }
            }
            for c in t.column_iter() {
                cols.push(c.iter().copied().collect());
            }
            blocks.push(Block {
                name: SPATIAL_TERM,
                start,
                len: da * db,
            });
            penalties.push(PenaltyBlock {
                name: format!("{SPATIAL_TERM}:lat"),
                start,
                s: s_lat,
            });
            penalties.push(PenaltyBlock {
                name: format!("{SPATIAL_TERM}:lng"),
                start,
                s: s_lng,
            });
            penalties.push(PenaltyBlock {
                name: format!("{SPATIAL_TERM}:null"),
                start,
                s: s_null,
            });
        }

        let mut states: Vec<String> = data.state.clone();
        states.sort();
        states.dedup();
        if spec.state_effect {
            let start = cols.len();
            for s in &states {
                cols.push(data.state.iter().map(|t| if t == s { 1.0 } else { 0.0 }).collect());
            }
            blocks.push(Block {
                name: STATE_TERM,
                start,
                len: states.len(),
            });
            penalties.push(PenaltyBlock {
                name: STATE_TERM.to_string(),
                start,
                s: DMatrix::identity(states.len(), states.len()),
            });
        }

        let p = cols.len();
        if n <= p {
            return Err(Error::InsufficientData {
                required: p + 1,
                available: n,
            });
        }
        let x = DMatrix::from_fn(n, p, |i, j| cols[j][i]);
        let y = DVector::from_column_slice(&data.y);
        let xtx = x.tr_mul(&x);
        let xty = x.tr_mul(&y);
        let ybar = y.mean();
        let tss = y.iter().map(|v| (v - ybar) * (v - ybar)).sum();

        // scale each penalty to its block of XᵀX
        for pb in &mut penalties {
            let len = pb.s.nrows();
            let g = xtx.view((pb.start, pb.start), (len, len)).norm();
            let s = pb.s.norm();
            if s > 0.0 {
                pb.s *= g / s;
            }
        }

        let lin = xtx.view((0, 0), (1 + k, 1 + k)).into_owned();
        if !well_conditioned(lin) {
            return Err(Error::Singular {
                block: "linear".into(),
            });
        }

        Ok(Problem {
            x,
            y,
            xtx,
            xty,
            tss,
            blocks,
            penalties,
            standardization,
            states,
        })
    }

    fn system(&self, rho: &[f64]) -> DMatrix<f64> {
        let mut m = self.xtx.clone();
        for (pb, &r) in self.penalties.iter().zip(rho) {
            embed(&mut m, pb.start, &pb.s, r.exp());
        }
        m
    }

    fn culprit(&self, rho: &[f64]) -> String {
        let m = self.system(rho);
        for b in &self.blocks {
            let end = b.start + b.len;
            if !well_conditioned(m.view((0, 0), (end, end)).into_owned()) {
                return b.name.to_string();
            }
        }
        "penalized system".into()
    }

    fn eval(&self, rho: &[f64]) -> Result<Eval> {
        let m = self.system(rho);
        let chol: Cholesky<f64, Dyn> = Cholesky::new(m).ok_or_else(|| Error::Singular {
            block: self.culprit(rho),
        })?;
        let beta = chol.solve(&self.xty);
        let resid = &self.y - &self.x * &beta;
        let rss = resid.norm_squared();
        let m_inv = chol.inverse();
        let tau = m_inv.component_mul(&self.xtx).sum();
        let n = self.y.len() as f64;
        // residual variation below floating-point resolution is not evidence
        let floor = self.tss.max(f64::MIN_POSITIVE) * 1e-14;
        let gcv = if n - tau > 0.0 {
            n * rss.max(floor) / ((n - tau) * (n - tau))
        } else {
            f64::INFINITY
        };
        Ok(Eval {
            rho: rho.to_vec(),
            beta,
            m_inv,
            rss,
            tau,
            gcv,
        })
    }

    fn block_edf(&self, e: &Eval, b: &Block) -> f64 {
        let mut s = 0.0;
        for i in b.start..b.start + b.len {
            s += e.m_inv.row(i).dot(&self.xtx.column(i).transpose());
        }
        s.max(0.0)
    }

    fn select(&self, spec: &GamSpec) -> Result<Eval> {
        let q = self.penalties.len();
        match &spec.smoothing {
            Smoothing::Fixed(l) => {
                if l.len() != q {
                    return Err(Error::invalid(format!(
                        "fixed smoothing needs {q} lambdas ({}), got {}",
                        self.penalties.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(", "),
                        l.len()
                    )));
                }
                if l.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::invalid("fixed lambdas must be positive and finite"));
                }
                let rho: Vec<f64> = l.iter().map(|v| v.ln()).collect();
                self.eval(&rho)
            }
            Smoothing::Gcv => {
                let (lo, hi) = spec.log_lambda_range;
                if !(lo < hi) {
                    return Err(Error::invalid("log_lambda_range must be increasing"));
                }
                let mut best = self.eval(&vec![0.0; q])?;
                if q == 0 {
                    return Ok(best);
                }
                for _sweep in 0..6 {
                    let before = best.gcv;
                    for j in 0..q {
                        best = self.golden(best, j, lo, hi)?;
                    }
                    if before - best.gcv <= 1e-10 * before.abs() {
                        break;
                    }
                }
                Ok(best)
            }
        }
    }

    /// Golden-section search on coordinate `j`, keeping the incumbent and
    /// interval ends as candidates.
    fn golden(&self, incumbent: Eval, j: usize, lo: f64, hi: f64) -> Result<Eval> {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let at = |r: f64, base: &[f64]| -> Result<Eval> {
            let mut rho = base.to_vec();
            rho[j] = r;
            self.eval(&rho)
        };
        let base = incumbent.rho.clone();
        let mut best = incumbent;
        let keep = |e: Eval, best: &mut Eval| {
            if e.gcv < best.gcv {
                *best = e;
            }
        };
        let (mut a, mut b) = (lo, hi);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let mut fc = at(c, &base)?;
        let mut fd = at(d, &base)?;
        while b - a > 1e-3 {
            if fc.gcv <= fd.gcv {
                b = d;
                d = c;
                let new_c = b - INV_PHI * (b - a);
                keep(std::mem::replace(&mut fd, fc), &mut best);
                c = new_c;
                fc = at(c, &base)?;
            } else {
                a = c;
                c = d;
                let new_d = a + INV_PHI * (b - a);
                keep(std::mem::replace(&mut fc, fd), &mut best);
                d = new_d;
                fd = at(d, &base)?;
            }
        }
        keep(fc, &mut best);
        keep(fd, &mut best);
        keep(at(lo, &base)?, &mut best);
        keep(at(hi, &base)?, &mut best);
        Ok(best)
    }
}

/// Fits the model; see the module docs.
pub fn fit_gam(data: &GamData, spec: &GamSpec) -> Result<GamFit> {
    let prob = Problem::new(data, spec)?;
    let e = prob.select(spec)?;
    let n = data.n();
    let nf = n as f64;
    let residual_df = nf - e.tau;
    let sigma2 = if residual_df > 0.0 { e.rss / residual_df } else { f64::NAN };
    let t_dist = StudentsT::new(0.0, 1.0, residual_df.max(1e-9)).ok();

    let k = data.names.len();
    let mut coefficients = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let name = if j == 0 { INTERCEPT.to_string() } else { data.names[j - 1].clone() };
        let estimate = e.beta[j];
        let std_error = (sigma2 * e.m_inv[(j, j)]).sqrt();
        let t_value = estimate / std_error;
        let p_value = match &t_dist {
            Some(t) if t_value.is_finite() => 2.0 * t.sf(t_value.abs()),
            _ => f64::NAN,
        };
        coefficients.push(Coefficient {
            name,
            estimate,
            std_error,
            t_value,
            p_value,
        });
    }

    let smooths = prob.blocks[1..]
        .iter()
        .map(|b| SmoothTerm {
            name: b.name.to_string(),
            edf: prob.block_edf(&e, b).min(b.len as f64),
            basis_dim: b.len,
        })
        .collect();

    let fitted = &prob.x * &e.beta;
    let residuals = &prob.y - &fitted;
    let xm = &prob.x * &e.m_inv;
    let leverage: Vec<f64> = (0..n).map(|i| xm.row(i).dot(&prob.x.row(i))).collect();

    let r_squared = if prob.tss > 0.0 { (1.0 - e.rss / prob.tss).clamp(0.0, 1.0) } else { 0.0 };
    let adj = if prob.tss > 0.0 && residual_df > 0.0 {
        1.0 - (e.rss / residual_df) / (prob.tss / (nf - 1.0))
    } else {
        0.0
    };

    let state_effects = match prob.blocks.iter().find(|b| b.name == STATE_TERM) {
        Some(b) => prob
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), e.beta[b.start + i]))
            .collect(),
        None => Vec::new(),
    };

    Ok(GamFit {
        coefficients,
        smooths,
        penalty_names: prob.penalties.iter().map(|p| p.name.clone()).collect(),
        lambdas: e.rho.iter().map(|r| r.exp()).collect(),
        r_squared,
        adj_r_squared: adj.clamp(0.0, r_squared),
        n,
        removed_outliers: 0,
        total_edf: e.tau,
        residual_df,
        sigma2,
        gcv: e.gcv,
        standardization: prob.standardization,
        state_effects,
        fitted: fitted.iter().copied().collect(),
        residuals: residuals.iter().copied().collect(),
        leverage,
    })
}

/// Ordinary least squares on the standardized linear block only; the
/// reference the penalized fit approaches as every λ grows.
pub fn ols_linear(data: &GamData) -> Result<Vec<f64>> {
    let prob = Problem::new(data, &GamSpec::linear_only())?;
    let chol = Cholesky::new(prob.xtx.clone()).ok_or_else(|| Error::Singular {
        block: "linear".into(),
    })?;
    Ok(chol.solve(&prob.xty).iter().copied().collect())
}

/// Number of penalties [`fit_gam`] uses under `spec`.
pub fn penalty_count(spec: &GamSpec) -> usize {
    3 * usize::from(spec.spatial) + usize::from(spec.state_effect)
}

const GROUPS: [(&str, &[&str]); 3] = [
    (
        "Demographics",
        &[
            "White",
            "Asian",
            "African American",
            "Hispanic",
            "Others",
            "Male",
            "Age 18-44",
            "Age 45-64",
            "Age over 65",
            "Disability",
        ],
    ),
    (
        "Socioeconomics",
        &[
            "Population Density",
            "Employment Density",
            "Rural Population",
            "Urban Population",
            "Poverty",
            "Median Income",
            "Highly-Educated",
        ],
    ),
    ("Reviews", &["Review density", "Avg. POI Score"]),
];

/// Fixed-width text report: grouped standardized coefficients with
/// significance codes, smooth-term e.d.f. and fit statistics.
pub fn format_report(title: &str, fit: &GamFit) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let rule = "-".repeat(44);
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{:<26}{:>18}", "Variables", "Estimate");
    let _ = writeln!(out, "{rule}");
    let line = |out: &mut String, c: &Coefficient| {
        let _ = writeln!(out, "{:<26}{:>15.3}{:<3}", c.name, c.estimate, c.stars());
    };
    line(&mut out, &fit.coefficients[0]);
    let mut placed = vec![false; fit.coefficients.len()];
    placed[0] = true;
    for (group, members) in GROUPS {
        let rows: Vec<usize> = (1..fit.coefficients.len())
            .filter(|&i| members.contains(&fit.coefficients[i].name.as_str()))
            .collect();
        if rows.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{group}");
        for i in rows {
            placed[i] = true;
            line(&mut out, &fit.coefficients[i]);
        }
    }
    let rest: Vec<usize> = (0..placed.len()).filter(|&i| !placed[i]).collect();
    if !rest.is_empty() {
        let _ = writeln!(out, "Other covariates");
        for i in rest {
            line(&mut out, &fit.coefficients[i]);
        }
    }
    if !fit.smooths.is_empty() {
        let _ = writeln!(out, "Nonlinear terms (e.d.f.)");
        for s in &fit.smooths {
            let _ = writeln!(out, "{:<26}{:>15.3}", s.name, s.edf);
        }
    }
    let _ = writeln!(out, "Model fit");
    let _ = writeln!(out, "{:<26}{:>15.3}", "Adjusted R2", fit.adj_r_squared);
    let _ = writeln!(out, "{:<26}{:>15.3}", "R2", fit.r_squared);
    let _ = writeln!(out, "{:<26}{:>15}", "Sample size", fit.n);
    let _ = writeln!(out, "{:<26}{:>15}", "Removed outliers", fit.removed_outliers);
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "Significance codes: 0 '***' 0.001 '**' 0.01 '*' 0.05 '' 1");
    out
}
