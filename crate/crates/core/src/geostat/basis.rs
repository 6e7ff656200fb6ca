//! Cubic regression spline bases and tensor-product interactions.
//!
//! A cubic regression spline with knots `x_1 < ... < x_k` is parametrized by
//! its values at the knots. With `h_j = x_{j+1} - x_j`, second derivatives at
//! the knots are `F β` where `F = [0; B⁻¹D; 0]` and the wiggliness penalty
//! `∫ f''² = βᵀ Dᵀ B⁻¹ D β`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    knots: Vec<f64>,
    /// Maps knot values to knot second derivatives (k × k).
    f: DMatrix<f64>,
    penalty: DMatrix<f64>,
}

/// `k` knots at evenly spaced quantiles of the distinct values of `x`.
pub fn quantile_knots(x: &[f64], k: usize) -> Result<Vec<f64>> {
    let mut u: Vec<f64> = x.to_vec();
    u.sort_by(f64::total_cmp);
    u.dedup();
    if u.len() < k {
        return Err(Error::InsufficientData {
            required: k,
            available: u.len(),
        });
    }
    Ok((0..k)
        .map(|i| {
            let h = (u.len() - 1) as f64 * i as f64 / (k - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            u[lo] + (h - lo as f64) * (u[hi] - u[lo])
        })
        .collect())
}

impl CubicSpline {
    pub fn new(knots: Vec<f64>) -> Result<Self> {
        let k = knots.len();
        if k < 3 {
            return Err(Error::invalid("cubic spline needs at least 3 knots"));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("spline knots must be strictly increasing"));
        }
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let mut d = DMatrix::zeros(k - 2, k);
        let mut b = DMatrix::zeros(k - 2, k - 2);
        for i in 0..k - 2 {
            d[(i, i)] = 1.0 / h[i];
            d[(i, i + 1)] = -1.0 / h[i] - 1.0 / h[i + 1];
            d[(i, i + 2)] = 1.0 / h[i + 1];
            b[(i, i)] = (h[i] + h[i + 1]) / 3.0;
            if i + 1 < k - 2 {
                b[(i, i + 1)] = h[i + 1] / 6.0;
                b[(i + 1, i)] = h[i + 1] / 6.0;
            }
        }
        let b_inv_d = b
            .cholesky()
            .ok_or_else(|| Error::invalid("spline knot spacing is degenerate"))?
            .solve(&d);
        let mut f = DMatrix::zeros(k, k);
        f.view_mut((1, 0), (k - 2, k)).copy_from(&b_inv_d);
        let penalty = d.transpose() * &b_inv_d;
        Ok(CubicSpline { knots, f, penalty })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn dim(&self) -> usize {
        self.knots.len()
    }

    pub fn penalty(&self) -> &DMatrix<f64> {
        &self.penalty
    }

    /// Basis row at `x`; values outside the knot range are clamped to it.
    pub fn row(&self, x: f64) -> DVector<f64> {
        let k = self.dim();
        let x = x.clamp(self.knots[0], self.knots[k - 1]);
        let j = match self.knots.iter().rposition(|&t| t <= x) {
            Some(j) if j < k - 1 => j,
            _ => k - 2,
        };
        let (lo, hi) = (self.knots[j], self.knots[j + 1]);
        let h = hi - lo;
        let am = (hi - x) / h;
        let ap = (x - lo) / h;
        let cm = ((hi - x).powi(3) / h - h * (hi - x)) / 6.0;
        let cp = ((x - lo).powi(3) / h - h * (x - lo)) / 6.0;
        let mut r: DVector<f64> = self.f.row(j).transpose() * cm + self.f.row(j + 1).transpose() * cp;
        r[j] += am;
        r[j + 1] += ap;
        r
    }

    pub fn design(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(x.len(), self.dim());
        for (i, &v) in x.iter().enumerate() {
            m.set_row(i, &self.row(v).transpose());
        }
        m
    }
}

/// Orthonormal basis (k × (k-1)) of the space orthogonal to `c`, from a
/// Householder reflection. Multiplying a design by it imposes `cᵀβ = 0`.
pub fn sum_to_zero(c: &DVector<f64>) -> DMatrix<f64> {
    let k = c.len();
    let norm = c.norm();
    let mut v = c.clone();
    v[0] += if c[0] >= 0.0 { norm } else { -norm };
    let vv = v.norm_squared();
    let mut h = DMatrix::identity(k, k);
    if vv > 0.0 {
        h -= &v * v.transpose() * (2.0 / vv);
    }
    h.columns(1, k - 1).into_owned()
}

/// A marginal spline with the centering constraint absorbed.
#[derive(Debug, Clone)]
pub struct Marginal {
    pub spline: CubicSpline,
    pub z: DMatrix<f64>,
    /// Constrained design (n × (k-1)).
    pub design: DMatrix<f64>,
    /// Constrained penalty ((k-1) × (k-1)).
    pub penalty: DMatrix<f64>,
}

impl Marginal {
    pub fn new(x: &[f64], knots: usize) -> Result<Self> {
        let spline = CubicSpline::new(quantile_knots(x, knots)?)?;
        let raw = spline.design(x);
        let colsum = DVector::from_iterator(raw.ncols(), raw.column_iter().map(|c| c.sum()));
        let z = sum_to_zero(&colsum);
        let design = &raw * &z;
        let penalty = z.transpose() * spline.penalty() * &z;
        Ok(Marginal {
            spline,
            z,
            design,
            penalty,
        })
    }

    pub fn dim(&self) -> usize {
        self.z.ncols()
    }
}

/// Row-wise Kronecker product: column `a * q + b` is `A[:, a] * B[:, b]`.
pub fn row_kronecker(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, p, q) = (a.nrows(), a.ncols(), b.ncols());
    DMatrix::from_fn(n, p * q, |i, c| a[(i, c / q)] * b[(i, c % q)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spline() -> CubicSpline {
        CubicSpline::new(vec![0.0, 1.0, 2.5, 3.0, 5.0]).unwrap()
    }

    #[test]
    fn interpolates_knot_values() {
        let s = spline();
        for (j, &t) in s.knots().iter().enumerate() {
            let r = s.row(t);
            for i in 0..s.dim() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((r[i] - want).abs() < 1e-12, "knot {j} col {i}: {}", r[i]);
            }
        }
    }

    #[test]
    fn reproduces_linear_functions_with_zero_penalty() {
        let s = spline();
        let beta = DVector::from_iterator(5, s.knots().iter().map(|t| 2.0 * t - 1.0));
        for x in [0.3, 1.7, 2.9, 4.4] {
            let v = s.row(x).dot(&beta);
            assert!((v - (2.0 * x - 1.0)).abs() < 1e-12);
        }
        assert!((beta.transpose() * s.penalty() * &beta)[0].abs() < 1e-10);
    }

    #[test]
    fn penalty_matches_numeric_integral() {
        let s = spline();
        let beta = DVector::from_vec(vec![0.0, 1.0, -1.0, 2.0, 0.5]);
        let sec = &s.f * &beta;
        // f'' is piecewise linear between knots
        let mut integral = 0.0;
        for j in 0..4 {
            let h = s.knots()[j + 1] - s.knots()[j];
            let (a, b) = (sec[j], sec[j + 1]);
            integral += h * (a * a + a * b + b * b) / 3.0;
        }
        let quad = (beta.transpose() * s.penalty() * &beta)[0];
        assert!((integral - quad).abs() < 1e-10);
    }

    #[test]
    fn constraint_centers_columns() {
        let x: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin() * 10.0).collect();
        let m = Marginal::new(&x, 5).unwrap();
        assert_eq!(m.dim(), 4);
        for c in m.design.column_iter() {
            assert!(c.sum().abs() < 1e-9);
        }
        assert!((m.z.transpose() * &m.z - DMatrix::identity(4, 4)).norm() < 1e-12);
    }

    #[test]
    fn knots_need_distinct_values() {
        assert!(quantile_knots(&[1.0, 1.0, 2.0], 5).is_err());
        assert_eq!(quantile_knots(&[0.0, 1.0, 2.0, 3.0, 4.0], 3).unwrap(), [0.0, 2.0, 4.0]);
    }
}
